//! Domain types shared by the analytic formulas, the simulator, and the CLI:
//! system parameters, the policy taxonomy, and validation guards.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the lossy M/M/1 status-update system: Poisson arrival rate
/// `lambda`, exponential service rate `mu`, and per-delivery success
/// probability `p`.
///
/// Construction enforces `lambda > 0`, `mu > 0`, `0 < p <= 1`, so a value of
/// this type is always basically valid. Stability (`rho < 1`) is a
/// policy-dependent requirement checked separately by [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    lambda: f64,
    mu: f64,
    p: f64,
}

impl SystemParams {
    pub fn new(lambda: f64, mu: f64, p: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::NonPositiveRate {
                name: "lambda",
                value: lambda,
            });
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::NonPositiveRate {
                name: "mu",
                value: mu,
            });
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::ProbabilityOutOfRange { p });
        }
        Ok(Self { lambda, mu, p })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Offered load `rho = lambda / mu`, always derived, never stored.
    pub fn rho(&self) -> f64 {
        self.lambda / self.mu
    }
}

impl fmt::Display for SystemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lambda={}, mu={}, p={}",
            self.lambda, self.mu, self.p
        )
    }
}

/// Scheduling discipline of the status-update queue.
///
/// The first five have exact closed-form peak-age expressions. The
/// packet-management discipline is simulated only, for comparison plots.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub enum Policy {
    /// First-come-first-served through an unbounded FIFO queue.
    #[serde(rename = "fcfs")]
    Fcfs,
    /// Newest arrival seizes the server immediately; displaced work waits on
    /// a stack.
    #[serde(rename = "lcfs-pre")]
    LcfsPreemptive,
    /// Server finishes the current service, then serves the newest waiting
    /// packet.
    #[serde(rename = "lcfs-non")]
    LcfsNonPreemptive,
    /// One packet slot, replaced on arrival; the slot's packet is transmitted
    /// over and over without feedback.
    #[serde(rename = "retx-pre")]
    RetxPreemptive,
    /// Like retransmission, but an in-progress service is never aborted; one
    /// waiting slot holds the most recent arrival.
    #[serde(rename = "retx-non")]
    RetxNonPreemptive,
    /// LCFS non-preemptive with a single waiting slot that discards stale
    /// packets. No closed form is provided; simulation only.
    #[serde(rename = "packet-mgmt")]
    PacketMgmtSimOnly,
}

impl Policy {
    /// The five disciplines with closed-form peak-age expressions, in report
    /// order.
    pub const ANALYTIC: [Policy; 5] = [
        Policy::Fcfs,
        Policy::LcfsPreemptive,
        Policy::LcfsNonPreemptive,
        Policy::RetxPreemptive,
        Policy::RetxNonPreemptive,
    ];

    /// All six disciplines, in report order.
    pub const ALL: [Policy; 6] = [
        Policy::Fcfs,
        Policy::LcfsPreemptive,
        Policy::LcfsNonPreemptive,
        Policy::RetxPreemptive,
        Policy::RetxNonPreemptive,
        Policy::PacketMgmtSimOnly,
    ];

    pub fn has_analytic_form(&self) -> bool {
        !matches!(self, Policy::PacketMgmtSimOnly)
    }

    /// Short stable token used in CSV reports and on the command line.
    pub fn token(&self) -> &'static str {
        match self {
            Policy::Fcfs => "fcfs",
            Policy::LcfsPreemptive => "lcfs-pre",
            Policy::LcfsNonPreemptive => "lcfs-non",
            Policy::RetxPreemptive => "retx-pre",
            Policy::RetxNonPreemptive => "retx-non",
            Policy::PacketMgmtSimOnly => "packet-mgmt",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fcfs" => Ok(Policy::Fcfs),
            "lcfs-pre" | "lcfs-preemptive" => Ok(Policy::LcfsPreemptive),
            "lcfs-non" | "lcfs-nonpreemptive" | "lcfs-non-preemptive" => {
                Ok(Policy::LcfsNonPreemptive)
            }
            "retx-pre" | "retx-preemptive" => Ok(Policy::RetxPreemptive),
            "retx-non" | "retx-nonpreemptive" | "retx-non-preemptive" => {
                Ok(Policy::RetxNonPreemptive)
            }
            "packet-mgmt" | "packet-management" => Ok(Policy::PacketMgmtSimOnly),
            other => Err(Error::UnknownPolicy(other.to_string())),
        }
    }
}

/// Stability requirement attached to a policy's closed form and simulation.
///
/// FCFS and LCFS non-preemptive derivations rest on the stationary M/M/1
/// queue and are rejected outright at `rho >= 1`. The LCFS preemptive form is
/// guarded by default but can be opened up for experimentation, since its
/// service-process derivation does not involve the queue-length distribution.
/// The retransmission and packet-management systems hold at most two packets
/// and need no stability at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainGuard {
    pub policy: Policy,
    pub requires_stable: bool,
}

impl DomainGuard {
    pub fn for_policy(policy: Policy) -> Self {
        let requires_stable = matches!(
            policy,
            Policy::Fcfs | Policy::LcfsNonPreemptive | Policy::LcfsPreemptive
        );
        Self {
            policy,
            requires_stable,
        }
    }

    /// Lift the default stability guard, allowed for LCFS preemptive only.
    pub fn allow_unstable_lcfs_pre(mut self) -> Self {
        if self.policy == Policy::LcfsPreemptive {
            self.requires_stable = false;
        }
        self
    }

    pub fn check(&self, params: &SystemParams) -> Result<()> {
        if self.requires_stable && params.rho() >= 1.0 {
            return Err(Error::UnstableUtilization {
                rho: params.rho(),
                policy: self.policy,
            });
        }
        Ok(())
    }
}

/// Validate `params` for use under `policy` with the policy's default guard,
/// returning the params unchanged on success.
pub fn validate_params(params: SystemParams, policy: Policy) -> Result<SystemParams> {
    validate_params_with(params, &DomainGuard::for_policy(policy))
}

/// Validate `params` against an explicit guard (e.g. one with the LCFS
/// preemptive stability override applied).
pub fn validate_params_with(params: SystemParams, guard: &DomainGuard) -> Result<SystemParams> {
    // Basic invariants are enforced by construction; re-derive them here so
    // the validation contract stands on its own.
    let params = SystemParams::new(params.lambda(), params.mu(), params.p())?;
    guard.check(&params)?;
    Ok(params)
}

/// Closed-form evaluation output: the peak age plus whichever intermediate
/// quantities the policy's derivation defines.
///
/// Probabilities present are in (0, 1]; times present are positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticResult {
    /// Expected peak age of information.
    pub paoi: f64,
    /// Success probability of the policy's tagged service process.
    pub p_tilde: Option<f64>,
    /// Conditional duration given a success within the tagged process.
    pub t_tilde: Option<f64>,
    /// Conditional duration given no success within the tagged process.
    pub s_tilde: Option<f64>,
    /// Auxiliary duration entering the LCFS non-preemptive form.
    pub tau: Option<f64>,
    /// Probability that a packet ends up informative.
    pub prob_informative: Option<f64>,
    /// Expected service span of an informative packet.
    pub mean_service_informative: Option<f64>,
}

impl AnalyticResult {
    pub fn paoi_only(paoi: f64) -> Self {
        Self {
            paoi,
            p_tilde: None,
            t_tilde: None,
            s_tilde: None,
            tau: None,
            prob_informative: None,
            mean_service_informative: None,
        }
    }

    /// True when every present field satisfies its range invariant.
    pub fn is_well_formed(&self) -> bool {
        let time_ok = |v: Option<f64>| v.is_none_or(|x| x > 0.0 && x.is_finite());
        let prob_ok = |v: Option<f64>| v.is_none_or(|x| x > 0.0 && x <= 1.0);
        self.paoi > 0.0
            && self.paoi.is_finite()
            && prob_ok(self.p_tilde)
            && time_ok(self.t_tilde)
            && time_ok(self.s_tilde)
            && time_ok(self.tau)
            && prob_ok(self.prob_informative)
            && time_ok(self.mean_service_informative)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_fcfs_params() {
        let params = SystemParams::new(0.5, 1.0, 0.5).unwrap();
        assert_eq!(validate_params(params, Policy::Fcfs), Ok(params));
    }

    #[test]
    fn rejects_unstable_fcfs() {
        let params = SystemParams::new(1.2, 1.0, 0.5).unwrap();
        assert!(matches!(
            validate_params(params, Policy::Fcfs),
            Err(Error::UnstableUtilization { .. })
        ));
    }

    #[test]
    fn rejects_zero_delivery_probability() {
        // Every closed form has p in a denominator, so p = 0 has no finite
        // answer and is rejected at construction.
        assert!(matches!(
            SystemParams::new(0.5, 1.0, 0.0),
            Err(Error::ProbabilityOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_nonpositive_and_nonfinite_rates() {
        assert!(SystemParams::new(0.0, 1.0, 0.5).is_err());
        assert!(SystemParams::new(1.0, -2.0, 0.5).is_err());
        assert!(SystemParams::new(f64::NAN, 1.0, 0.5).is_err());
        assert!(SystemParams::new(1.0, f64::INFINITY, 0.5).is_err());
        assert!(SystemParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(SystemParams::new(1.0, 1.0, 1.0 + 1e-12).is_err());
    }

    #[test]
    fn rho_is_exact_quotient() {
        let params = SystemParams::new(0.3, 0.7, 1.0).unwrap();
        assert_eq!(params.rho(), 0.3 / 0.7);
    }

    #[test]
    fn unstable_policies_by_default() {
        let unstable = SystemParams::new(2.0, 1.0, 0.5).unwrap();
        for policy in [Policy::Fcfs, Policy::LcfsNonPreemptive, Policy::LcfsPreemptive] {
            assert!(validate_params(unstable, policy).is_err());
        }
        for policy in [
            Policy::RetxPreemptive,
            Policy::RetxNonPreemptive,
            Policy::PacketMgmtSimOnly,
        ] {
            assert!(validate_params(unstable, policy).is_ok());
        }
    }

    #[test]
    fn lcfs_pre_guard_override() {
        let unstable = SystemParams::new(1.0, 1.0, 0.5).unwrap();
        let guard = DomainGuard::for_policy(Policy::LcfsPreemptive).allow_unstable_lcfs_pre();
        assert!(validate_params_with(unstable, &guard).is_ok());

        // The override must not weaken the hard guards.
        let fcfs_guard = DomainGuard::for_policy(Policy::Fcfs).allow_unstable_lcfs_pre();
        assert!(validate_params_with(unstable, &fcfs_guard).is_err());
    }

    #[test]
    fn policy_tokens_round_trip() {
        for policy in Policy::ALL {
            assert_eq!(policy.token().parse::<Policy>().unwrap(), policy);
        }
        assert!("mm1".parse::<Policy>().is_err());
    }
}
