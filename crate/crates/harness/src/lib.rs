//! Suite runner for the `hyperlevel` checks: configuration, verification
//! records, the JSON report and CSV curve dumps.

pub mod config;
pub mod curves;
pub mod error;
pub mod record;
pub mod report;
pub mod suites;

pub use config::{Budget, ConfigOverrides, Suite, SuiteConfig};
pub use error::{HarnessError, Result};
pub use record::{Reading, VerificationRecord};
pub use report::{Report, SCHEMA_VERSION};
pub use suites::{run_suite, verify, SuiteRun};

/// Exit status of `verify` and `ineq`.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const FAIL: u8 = 1;
    pub const CONFIG: u8 = 2;
}
