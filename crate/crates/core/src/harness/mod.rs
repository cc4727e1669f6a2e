//! Experiment pipelines, function specifications and report output shared by
//! the command-line tool and the acceptance suite.

mod experiments;
mod identities;
mod report;
mod spec;

pub use experiments::*;
pub use identities::{run_identity, Identity, IdentityOutcome};
pub use report::{write_atomic, ExperimentReport, Relation, ReportRow};
pub use spec::FunctionSpec;
