use std::time::Instant;

use collisim::kernel::strobo::ancilla_averaged_hamiltonian;
use collisim::scenario::file::ScenarioSpec;
use collisim::scenario::{preset, PRESET_NAMES};
use collisim::validate::validate;

#[test]
fn heisenberg_coupling_averages_to_zero() {
    let s = preset("aklt-heisenberg").unwrap();
    let rho1 = s.env.reduced_site_density(1).unwrap();
    let avg = ancilla_averaged_hamiltonian(s.hamiltonian().unwrap(), 2, rho1.matrix());
    assert!(avg.max_abs() < 1e-14);
}

#[test]
fn every_preset_validates_quickly() {
    for name in PRESET_NAMES {
        let start = Instant::now();
        let report = validate(name).unwrap();
        assert!(report.passed(), "{report}");
        assert!(start.elapsed().as_secs_f64() < 60.0, "{name} took {:?}", start.elapsed());
    }
}

#[test]
fn full_self_check_passes() {
    let report = validate("all").unwrap();
    assert!(report.passed(), "{report}");
}

#[test]
fn exported_file_reloads_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for name in PRESET_NAMES {
        let s = preset(name).unwrap();
        let text = ScenarioSpec::from_scenario(name, &s).unwrap().to_toml().unwrap();
        let path = dir.path().join(format!("{name}.toml"));
        std::fs::write(&path, &text).unwrap();
        let (_, back, _) = collisim::scenario::load_scenario(path.to_str().unwrap()).unwrap();
        assert_eq!(back.rho_s0.matrix().as_slice(), s.rho_s0.matrix().as_slice());
        assert_eq!(back.unitary().unwrap().as_slice(), s.unitary().unwrap().as_slice());
        assert_eq!(back.env.chi0().matrix().as_slice(), s.env.chi0().matrix().as_slice());
        assert_eq!(back.g_tau(), s.g_tau());
        assert_eq!(back.steps, s.steps);
    }
}
