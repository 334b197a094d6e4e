//! Orchestration behind the command-line tool: identity suites, scaling
//! studies, the embedding table, the continuity sweep and report files.

pub mod config;
pub mod continuity;
pub mod fit;
pub mod identities;
pub mod report;
pub mod scaling;
pub mod table;

pub use config::RunConfig;
pub use continuity::{run_continuity_sweep, SweepConfig, SweepReport};
pub use fit::{fit_linear, fit_loglog, Fit};
pub use identities::{run_identities, IdentityReport, IdentityResult};
pub use table::{default_grid, exact_classification, run_embedding_table, EmbeddingTable, Ratio};
pub use report::{scaling_svg, write_scaling_report};
pub use scaling::{run_scaling, PairingAxis, ScalingReport, ScalingRow};

/// One named pass/fail outcome with a human-readable detail.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }

    /// `PASS name: detail` or `FAIL name: detail`.
    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}
