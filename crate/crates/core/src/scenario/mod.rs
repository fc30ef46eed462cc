//! Built-in scenarios, scenario files and report formatting.

pub mod file;
pub mod presets;
pub mod report;

pub use file::{load_scenario, load_scenario_with, ScenarioSpec};
pub use presets::{preset, PRESET_NAMES};
