pub mod fock;
pub mod nelson;
pub mod sweep;
pub mod verify;

pub use fock::run_fock;
pub use nelson::run_nelson;
pub use sweep::run_sweep;
pub use verify::run_verify;
