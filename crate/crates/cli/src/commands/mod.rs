pub mod buffer_sim;
pub mod compress;
pub mod gen_synthetic;
pub mod presets;
pub mod reconstruct;
pub mod sweep;
