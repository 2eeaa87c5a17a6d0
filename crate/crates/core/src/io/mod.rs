//! Run configuration, forcing presets and field dumps.

pub mod config;
pub mod dump;

pub use config::{apply_override, gaussian, ForcingMode, PresetTarget, RunConfig};
pub use dump::{read_dump, write_dump, write_eta_csv, write_json, Dump, DumpContents, Manifest};
