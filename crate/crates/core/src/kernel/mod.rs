//! Memory kernels of the discrete Nakajima–Zwanzig equation and their
//! stroboscopic limits.

pub mod exact;
pub mod integrate;
pub mod perturbative;
pub mod strobo;

pub use exact::{exact_kernel_term, nz_reconstruct, project_p, project_q};
pub use integrate::{integrate_generator, integrate_superoperator};
pub use perturbative::{
    kernel_order2, kernel_order2_at, kernel_order3, kernel_order3_at, perturbative_order_check, phi_table,
    three_point_cumulant, two_point_cumulant, CumulantTable, OrderReport, PhiTable,
};
pub use strobo::{
    dissipator, gksl_decomposition, local_generator, stroboscopic_generator, stroboscopic_generator_with,
    GkslDecomposition, HamiltonianPart, NonlocalTerm, StroboscopicGenerator,
};
