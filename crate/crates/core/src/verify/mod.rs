//! Numerical checks of the lattice criterion: explicit counterexamples,
//! truncated kernel and injectivity probes, and parameter sweeps.

mod counterexample;
mod probes;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::arith::{FieldConfig, ScalarText, Tower};
use crate::induction::SatakeData;
use crate::rep::WeightProfile;

pub use counterexample::{
    build_counterexample, check_counterexample, choose_delta, power_sum_identities, teichmuller_power_sum,
    Counterexample, CounterexampleCase, CounterexampleCheck,
};
pub use probes::{
    ball_size, counterexample_probe, separation_probe, t_injectivity_probe, theta_kernel_probe, Assembly,
    ProbeLimits, SeparationOptions,
};
pub use sweep::{sweep, SweepReport, SweepRow, SweepSpec, SweepSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeMode {
    Counterexample,
    ThetaKernel,
    TInjectivity,
    Separation,
}

/// The parameters a probe ran with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub field: FieldConfig,
    pub weights: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_p: Option<ScalarText>,
}

impl ConfigSummary {
    pub fn new(t: &Tower, w: &WeightProfile, s: Option<&SatakeData>) -> ConfigSummary {
        ConfigSummary {
            field: t.config().clone(),
            weights: w.weights().to_vec(),
            a_p: s.map(|s| t.scalar_to_text(s.a_p())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub config: ConfigSummary,
    pub mode: ProbeMode,
    pub depth: usize,
    pub verdict: bool,
    pub certificate: serde_json::Value,
    /// `π`-digits between the decisive valuations and the precision at
    /// which entries were treated as zero.
    pub precision_margin: i64,
    /// Filled in by callers that time the run; left out otherwise so that
    /// reports stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}
