//! Campaign runner, JSON reporting and replay for the `opjensen` command.

pub mod campaign;
mod error;
pub mod json;
pub mod replay;
pub mod search;
pub mod table;

pub use campaign::{
    run_campaign, CampaignConfig, CampaignRun, CampaignSummary, Instance, NRange, Subdivision,
    Target, TrialRecord,
};
pub use error::{CliError, Result};
pub use json::{ConstantsJson, ReportJson, WitnessJson};
pub use replay::{replay, reproduces, ReplayContext};
pub use search::{run_search, SearchConfig, SearchOutcome};
