//! Exact closed-form peak age of information (PAoI) for the five scheduling
//! disciplines of the lossy M/M/1 status-update queue, together with every
//! intermediate quantity their derivations define.
//!
//! All formulas are algebraic in (lambda, mu, p). The two LCFS disciplines
//! hinge on the positive root of a quadratic in the tagged-process success
//! probability `p_tilde`; both roots are evaluated in a cancellation-safe
//! form and reported together with the residual of the defining polynomial.

use crate::error::{Error, Result};
use crate::model::{AnalyticResult, DomainGuard, Policy, SystemParams};

/// A root of one of the defining quadratics, with the absolute residual of
/// the polynomial evaluated at the root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticRoot {
    /// The root itself; always in (0, 1].
    pub value: f64,
    /// |a v^2 + b v - c| at v = value.
    pub residual: f64,
}

/// Positive root of `a x^2 + b x - c = 0` with `a >= 0`, `c > 0`.
///
/// Uses `2c / (b + sqrt(b^2 + 4ac))` when `b >= 0` and the conjugate form
/// otherwise, so neither branch subtracts nearly-equal quantities. The first
/// branch also stays exact as `a -> 0`, where the equation degenerates to a
/// linear one.
fn stable_positive_root(a: f64, b: f64, c: f64) -> f64 {
    debug_assert!(a >= 0.0 && c > 0.0);
    let disc = (b * b + 4.0 * a * c).sqrt();
    if b >= 0.0 {
        2.0 * c / (b + disc)
    } else {
        (disc - b) / (2.0 * a)
    }
}

fn residual(a: f64, b: f64, c: f64, x: f64) -> f64 {
    (a * x * x + b * x - c).abs()
}

/// PAoI under FCFS: `1/(p lambda) + 1/(mu - lambda)`.
///
/// The first term is the mean spacing between successfully delivered
/// arrivals, the second the mean system time of a stable M/M/1 queue.
pub fn paoi_fcfs(params: &SystemParams) -> Result<f64> {
    DomainGuard::for_policy(Policy::Fcfs).check(params)?;
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    Ok(1.0 / (p * lambda) + 1.0 / (mu - lambda))
}

/// Success probability of the LCFS-preemptive tagged service process: the
/// positive root of `lambda x^2 + (mu - lambda) x - mu p = 0`.
///
/// The root is exactly 1 when p = 1 and lies in (0, 1) otherwise. It is
/// finite and positive for every valid parameter triple, stability or not.
pub fn lcfs_pre_root(params: &SystemParams) -> QuadraticRoot {
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    let (a, b, c) = (lambda, mu - lambda, mu * p);
    if p == 1.0 {
        // x = 1 solves the equation identically; short-circuit so floating
        // point cannot push the root above 1.
        return QuadraticRoot {
            value: 1.0,
            residual: residual(a, b, c, 1.0),
        };
    }
    let value = stable_positive_root(a, b, c);
    QuadraticRoot {
        value,
        residual: residual(a, b, c, value),
    }
}

/// Intermediates of the LCFS-preemptive derivation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcfsPreIntermediates {
    /// E{S | no success within S}: `1 / (mu - lambda + 2 lambda p_tilde)`.
    pub s_tilde: f64,
    /// E{span | success within S}.
    pub t_tilde: f64,
    /// Probability a packet is informative: `mu p / (mu + lambda p_tilde)`.
    pub prob_informative: f64,
    /// E{S | informative}: `1 / (mu - lambda + 2 lambda p_tilde)`.
    pub mean_service_informative: f64,
}

pub fn lcfs_pre_intermediates(params: &SystemParams) -> LcfsPreIntermediates {
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    let pt = lcfs_pre_root(params).value;
    // mu - lambda + 2 lambda pt > 0 for every valid triple; see the root
    // bound pt > (lambda - mu)/lambda in the tests.
    let d = mu - lambda + 2.0 * lambda * pt;
    let s_tilde = 1.0 / d;
    let pt_tt = (pt + (mu / d) * (pt - p)) / (mu - lambda + lambda * pt);
    LcfsPreIntermediates {
        s_tilde,
        t_tilde: pt_tt / pt,
        prob_informative: mu * p / (mu + lambda * pt),
        mean_service_informative: 1.0 / d,
    }
}

/// PAoI under LCFS with preemptive priority:
/// `[mu(mu - lambda) + 3 lambda mu p + lambda(lambda + mu) p_tilde]
///  / [lambda mu p (mu - lambda + 2 lambda p_tilde)]`.
///
/// At p = 1 this reduces to `1/(lambda + mu) + 1/lambda + 1/mu`.
pub fn paoi_lcfs_preemptive(params: &SystemParams) -> AnalyticResult {
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    let pt = lcfs_pre_root(params).value;
    let inter = lcfs_pre_intermediates(params);
    let d = mu - lambda + 2.0 * lambda * pt;
    let paoi = (mu * (mu - lambda) + 3.0 * lambda * mu * p + lambda * (lambda + mu) * pt)
        / (lambda * mu * p * d);
    AnalyticResult {
        paoi,
        p_tilde: Some(pt),
        t_tilde: Some(inter.t_tilde),
        s_tilde: Some(inter.s_tilde),
        tau: None,
        prob_informative: Some(inter.prob_informative),
        mean_service_informative: Some(inter.mean_service_informative),
    }
}

/// Threshold below which `1 - p` is treated as zero in the non-preemptive
/// root, whose p < 1 expression is 0/0 at p = 1.
const NON_PRE_P_ONE_EPS: f64 = 1e-12;

/// Success probability of the LCFS non-preemptive tagged process: for p < 1
/// the positive root of
/// `lambda (1-p) x^2 + (mu - lambda + 2 lambda p) x - lambda p = 0`,
/// and `lambda / (lambda + mu)` at p = 1. The two branches join continuously.
pub fn lcfs_non_root(params: &SystemParams) -> Result<QuadraticRoot> {
    DomainGuard::for_policy(Policy::LcfsNonPreemptive).check(params)?;
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    let (a, b, c) = (lambda * (1.0 - p), mu - lambda + 2.0 * lambda * p, lambda * p);
    let value = if (1.0 - p).abs() < NON_PRE_P_ONE_EPS {
        lambda / (lambda + mu)
    } else {
        // b > 0 under the stability guard, so the conjugate form holds.
        stable_positive_root(a, b, c)
    };
    Ok(QuadraticRoot {
        value,
        residual: residual(a, b, c, value),
    })
}

/// Intermediates of the LCFS non-preemptive derivation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcfsNonIntermediates {
    /// `1 / [lambda + mu - 2 lambda (1-p)(1-p_tilde)]`.
    pub s_tilde: f64,
    pub t_tilde: f64,
    /// Auxiliary duration feeding the busy-system recursion of the PAoI form.
    pub tau: f64,
}

pub fn lcfs_non_intermediates(params: &SystemParams) -> Result<LcfsNonIntermediates> {
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    let pt = lcfs_non_root(params)?.value;
    let d = lambda + mu - 2.0 * lambda * (1.0 - p) * (1.0 - pt);
    let s_tilde = 1.0 / d;
    let pt_tt = (lambda * p + 2.0 * lambda * p * p
        + (lambda - 2.0 * lambda * p * p - mu + mu * p) * pt)
        / (mu * p * d);
    let tau = ((lambda + mu) * p + (lambda + mu) * p * p
        + (lambda + (mu - lambda) * p * p - mu) * pt)
        / (mu * p * d);
    Ok(LcfsNonIntermediates {
        s_tilde,
        t_tilde: pt_tt / pt,
        tau,
    })
}

/// The three additive components of the LCFS non-preemptive PAoI: the
/// waiting term, the empty-or-busy recursion term, and the geometric queue
/// tail term. Exposed separately because each has an independently
/// hand-checkable value.
pub fn lcfs_non_terms(params: &SystemParams) -> Result<[f64; 3]> {
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    let pt = lcfs_non_root(params)?.value;
    let tau = lcfs_non_intermediates(params)?.tau;
    let d = lambda + mu - 2.0 * lambda * (1.0 - p) * (1.0 - pt);
    let served_gap = mu - lambda * (1.0 - pt);
    if served_gap <= 0.0 {
        // Impossible for rho < 1 since lambda (1 - pt) < lambda < mu.
        return Err(Error::InternalDomain(
            "mu - lambda (1 - p_tilde) must be positive under a stable queue",
        ));
    }
    let wait = lambda * (1.0 - pt) / ((mu - lambda * pt) * d);
    let busy = mu * (mu - lambda) * (mu + lambda + lambda * p + lambda * lambda * tau)
        / (lambda
            * (mu - lambda * pt)
            * served_gap
            * (lambda + mu * p - lambda * (1.0 - p) * (1.0 - pt)));
    let tail = lambda * lambda * (1.0 - pt) * (1.0 - pt) * (1.0 + lambda * tau)
        / (mu * (mu - lambda * pt) * served_gap);
    Ok([wait, busy, tail])
}

/// PAoI under LCFS with non-preemptive priority, as the sum of the three
/// terms of [`lcfs_non_terms`].
pub fn paoi_lcfs_nonpreemptive(params: &SystemParams) -> Result<AnalyticResult> {
    let [wait, busy, tail] = lcfs_non_terms(params)?;
    let root = lcfs_non_root(params)?.value;
    let inter = lcfs_non_intermediates(params)?;
    Ok(AnalyticResult {
        paoi: wait + busy + tail,
        p_tilde: Some(root),
        t_tilde: Some(inter.t_tilde),
        s_tilde: Some(inter.s_tilde),
        tau: Some(inter.tau),
        prob_informative: None,
        mean_service_informative: None,
    })
}

/// Intermediates common to both retransmission disciplines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetxIntermediates {
    pub p_tilde: f64,
    pub t_tilde: f64,
    pub s_tilde: f64,
}

/// Retransmission with preemption: `p_tilde = p mu / (lambda + p mu)`,
/// `t_tilde = 1 / (lambda + p mu)`, `s_tilde = 1 / (p mu)`.
pub fn retx_pre_intermediates(params: &SystemParams) -> RetxIntermediates {
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    RetxIntermediates {
        p_tilde: p * mu / (lambda + p * mu),
        t_tilde: 1.0 / (lambda + p * mu),
        s_tilde: 1.0 / (p * mu),
    }
}

/// PAoI under retransmission with preemptive priority:
/// `1/(lambda + p mu) + 1/lambda + 1/(p mu)`.
///
/// Numerically identical to the LCFS-preemptive form at service rate
/// `p mu` and success probability 1: losing a delivery is indistinguishable
/// from a longer effective service when the slot holds one packet.
pub fn paoi_retx_preemptive(params: &SystemParams) -> AnalyticResult {
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    let inter = retx_pre_intermediates(params);
    let paoi = 1.0 / (lambda + p * mu) + 1.0 / lambda + 1.0 / (p * mu);
    AnalyticResult {
        paoi,
        p_tilde: Some(inter.p_tilde),
        t_tilde: Some(inter.t_tilde),
        s_tilde: Some(inter.s_tilde),
        tau: None,
        // For this discipline p_tilde is, by definition, the probability
        // that a packet ends up informative.
        prob_informative: Some(inter.p_tilde),
        mean_service_informative: None,
    }
}

/// Retransmission without preemption:
/// `p_tilde = p (lambda + mu) / (lambda + p mu)`,
/// `t_tilde = 1/mu + (1-p) mu / [(lambda + mu)(lambda + p mu)]`,
/// `s_tilde = 1 / (p mu)`.
pub fn retx_non_intermediates(params: &SystemParams) -> RetxIntermediates {
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    RetxIntermediates {
        p_tilde: p * (lambda + mu) / (lambda + p * mu),
        t_tilde: 1.0 / mu + (1.0 - p) * mu / ((lambda + mu) * (lambda + p * mu)),
        s_tilde: 1.0 / (p * mu),
    }
}

/// PAoI under retransmission with non-preemptive priority:
/// `1/mu + 1/(lambda + p mu) + 1/lambda + 1/(p mu)`, i.e. the preemptive
/// value plus one full service of blocking.
pub fn paoi_retx_nonpreemptive(params: &SystemParams) -> AnalyticResult {
    let (lambda, mu, p) = (params.lambda(), params.mu(), params.p());
    let inter = retx_non_intermediates(params);
    let paoi = 1.0 / mu + 1.0 / (lambda + p * mu) + 1.0 / lambda + 1.0 / (p * mu);
    AnalyticResult {
        paoi,
        p_tilde: Some(inter.p_tilde),
        t_tilde: Some(inter.t_tilde),
        s_tilde: Some(inter.s_tilde),
        tau: None,
        prob_informative: None,
        mean_service_informative: None,
    }
}

/// Closed-form PAoI under `policy`, applying the policy's default domain
/// guard.
pub fn paoi(policy: Policy, params: &SystemParams) -> Result<AnalyticResult> {
    paoi_with_guard(policy, params, &DomainGuard::for_policy(policy))
}

/// Closed-form PAoI under `policy` with an explicit guard, so callers can
/// evaluate the LCFS-preemptive form at `rho >= 1`.
pub fn paoi_with_guard(
    policy: Policy,
    params: &SystemParams,
    guard: &DomainGuard,
) -> Result<AnalyticResult> {
    guard.check(params)?;
    match policy {
        Policy::Fcfs => Ok(AnalyticResult::paoi_only(paoi_fcfs(params)?)),
        Policy::LcfsPreemptive => Ok(paoi_lcfs_preemptive(params)),
        Policy::LcfsNonPreemptive => paoi_lcfs_nonpreemptive(params),
        Policy::RetxPreemptive => Ok(paoi_retx_preemptive(params)),
        Policy::RetxNonPreemptive => Ok(paoi_retx_nonpreemptive(params)),
        Policy::PacketMgmtSimOnly => Err(Error::NoAnalyticForm { policy }),
    }
}
