use crate::model::Policy;

/// Errors shared across parameter validation, the analytic formulas, the
/// simulator, and sweep reporting.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} must be a finite positive rate, got {value}")]
    NonPositiveRate { name: &'static str, value: f64 },

    #[error("delivery probability must lie in (0, 1], got {p}")]
    ProbabilityOutOfRange { p: f64 },

    #[error("utilization rho = {rho} >= 1 but policy {policy} requires a stable queue")]
    UnstableUtilization { rho: f64, policy: Policy },

    #[error("policy {policy} has no closed-form peak-age expression")]
    NoAnalyticForm { policy: Policy },

    #[error("delivery at t = {deliver_time} does not postdate generation at t = {gen_time}")]
    NonCausalDelivery { gen_time: f64, deliver_time: f64 },

    #[error("need at least {need} samples for {n_batches} batches, got {have}")]
    InsufficientSamples {
        have: usize,
        need: usize,
        n_batches: usize,
    },

    #[error("event budget of {max_events} exhausted with {peaks_collected} peaks collected")]
    EventBudgetExceeded {
        max_events: u64,
        peaks_collected: usize,
    },

    #[error("internal domain violation: {0}")]
    InternalDomain(&'static str),

    #[error("comparison inputs do not belong together: {0}")]
    MismatchedInputs(String),

    #[error("cannot aggregate an empty sweep")]
    EmptySweep,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown policy name '{0}'")]
    UnknownPolicy(String),

    #[error("malformed report: {0}")]
    MalformedReport(String),
}

pub type Result<T> = std::result::Result<T, Error>;
