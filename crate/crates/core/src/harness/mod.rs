//! Instance library, verification suites, reports and sweeps.

pub mod describe;
pub mod library;
pub mod oracles;
pub mod report;
pub mod suites;
pub mod sweep;

pub use describe::describe;
pub use report::{CheckResult, Report};
pub use suites::{run_suite, Options, Suite};
pub use sweep::{sweep, write_csv, Functional, SweepRow};
