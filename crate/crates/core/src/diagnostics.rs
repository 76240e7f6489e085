//! Distribution-shift diagnostics on discrete distributions.
//!
//! For target and calibration distributions `P_T`, `P_C` over a shared
//! finite support, the importance weight at point `i` is
//! `w_i = P_T(i) / P_C(i)`. Two scalars summarize how far apart the
//! distributions sit:
//!
//! * `var_w`: the variance of `w` under `P_C` (the weights always have mean
//!   1 under `P_C`);
//! * `d2`: the exponentiated Renyi divergence of order 2,
//!   `sum_i P_T(i)^2 / P_C(i)`.
//!
//! They are two views of the same quantity: `var_w = d2 - 1` exactly, which
//! this module verifies on every call. The gap bound connects them to
//! calibration transfer: for any bounded per-point loss `L`, the gap
//! `|E_T[L] - E_C[L]|` is at most `sqrt(E_C[(1-w)^2] * E_C[L^2])`
//! (Cauchy-Schwarz), which is itself at most the arithmetic mean of the two
//! factors. Small `var_w` therefore certifies that a temperature fit on the
//! calibration mixture transfers to the target.
//!
//! Continuous samples enter through `induce_histogram_pair`, which bins a
//! 1-D projection of both sample sets over their joint range. Without
//! smoothing, a target sample in a bin that no calibration sample reaches
//! is a support violation and the ratios are unbounded; callers choose
//! whether that is an error or a finding.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sums may drift from 1 by float accumulation; beyond this it is a caller
/// bug.
const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("support has {support} points but distributions have {target} and {cal}")]
    LengthMismatch {
        support: usize,
        target: usize,
        cal: usize,
    },
    #[error("support must be non-empty")]
    EmptySupport,
    #[error("{which} has a negative probability at index {index}")]
    NegativeProbability { which: &'static str, index: usize },
    #[error("{which} contains a non-finite value")]
    NonFinite { which: String },
    #[error("{which} sums to {sum}, not 1")]
    NotNormalized { which: &'static str, sum: f64 },
    #[error("target places mass on '{point}' where the calibration distribution has none; density ratios are unbounded")]
    SupportViolation { point: String },
    #[error("got {losses} losses for a support of {support} points")]
    LossLengthMismatch { losses: usize, support: usize },
    #[error("density-ratio statistics overflowed; the distributions barely overlap")]
    Overflow,
    #[error("internal identity check failed: var_w={var_w} vs d2-1={}", d2 - 1.0)]
    IdentityViolation { var_w: f64, d2: f64 },
    #[error("internal bound check failed: gap={gap}, cs={cs}, amgm={amgm}")]
    BoundViolation { gap: f64, cs: f64, amgm: f64 },
    #[error("histogram needs at least 1 bin")]
    InvalidBins,
    #[error("{which} sample set is empty")]
    EmptyValues { which: &'static str },
    #[error("{which} sample set has a non-finite value at index {index}")]
    NonFiniteValue { which: &'static str, index: usize },
    #[error("smoothing must be finite and non-negative, got {0}")]
    InvalidSmoothing(f64),
}

/// Target and calibration distributions over one shared support, validated
/// on construction: equal lengths, finite non-negative masses, both summing
/// to 1 within float tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteDistributionPair {
    support: Vec<String>,
    p_target: Vec<f64>,
    p_cal: Vec<f64>,
}

fn check_distribution(p: &[f64], which: &'static str) -> Result<(), DiagnosticsError> {
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() {
            return Err(DiagnosticsError::NonFinite { which: which.into() });
        }
        if v < 0.0 {
            return Err(DiagnosticsError::NegativeProbability { which, index: i });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(DiagnosticsError::NotNormalized { which, sum });
    }
    Ok(())
}

impl DiscreteDistributionPair {
    pub fn new(
        support: Vec<String>,
        p_target: Vec<f64>,
        p_cal: Vec<f64>,
    ) -> Result<Self, DiagnosticsError> {
        if support.is_empty() {
            return Err(DiagnosticsError::EmptySupport);
        }
        if support.len() != p_target.len() || support.len() != p_cal.len() {
            return Err(DiagnosticsError::LengthMismatch {
                support: support.len(),
                target: p_target.len(),
                cal: p_cal.len(),
            });
        }
        check_distribution(&p_target, "target distribution")?;
        check_distribution(&p_cal, "calibration distribution")?;
        Ok(DiscreteDistributionPair {
            support,
            p_target,
            p_cal,
        })
    }

    pub fn support(&self) -> &[String] {
        &self.support
    }

    pub fn p_target(&self) -> &[f64] {
        &self.p_target
    }

    pub fn p_cal(&self) -> &[f64] {
        &self.p_cal
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Index of the first point with target mass but no calibration mass,
    /// if any. Such a point makes the density ratio unbounded.
    pub fn support_violation(&self) -> Option<usize> {
        self.p_target
            .iter()
            .zip(&self.p_cal)
            .position(|(&t, &c)| t > 0.0 && c == 0.0)
    }
}

/// `(var_w, d2)` for the pair. Points carrying no calibration mass and no
/// target mass contribute nothing (they are outside both supports); points
/// with target mass but no calibration mass are an error.
pub fn density_ratio_stats(pair: &DiscreteDistributionPair) -> Result<(f64, f64), DiagnosticsError> {
    if let Some(i) = pair.support_violation() {
        return Err(DiagnosticsError::SupportViolation {
            point: pair.support[i].clone(),
        });
    }
    let mut var_w = 0.0;
    let mut d2 = 0.0;
    for (&t, &c) in pair.p_target.iter().zip(&pair.p_cal) {
        if c == 0.0 {
            continue;
        }
        let w = t / c;
        var_w += c * (w - 1.0) * (w - 1.0);
        d2 += t * t / c;
    }
    if !var_w.is_finite() || !d2.is_finite() {
        return Err(DiagnosticsError::Overflow);
    }
    // The identity var_w = d2 - 1 is algebraic; a violation beyond float
    // noise means the inputs escaped validation somehow.
    if (var_w - (d2 - 1.0)).abs() > 1e-10 * (1.0 + d2.abs()) {
        return Err(DiagnosticsError::IdentityViolation { var_w, d2 });
    }
    Ok((var_w, d2))
}

/// The transfer-gap bound for one loss profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapBound {
    /// `|E_target[L] - E_cal[L]|`, the quantity being bounded.
    pub gap: f64,
    /// Cauchy-Schwarz bound `sqrt(E_cal[(1-w)^2] * E_cal[L^2])`.
    pub cs_bound: f64,
    /// AM-GM relaxation `(E_cal[(1-w)^2] + E_cal[L^2]) / 2`.
    pub amgm_bound: f64,
    /// `E_cal[(1-w)^2]`, identical to `var_w`.
    pub weight_mse: f64,
    /// `E_cal[L^2]`.
    pub loss_second_moment: f64,
}

/// Evaluates the gap and both bounds for per-point losses `losses`. The
/// chain `gap <= cs_bound <= amgm_bound` holds by construction and is
/// re-checked numerically before returning.
pub fn calibration_gap_bound(
    pair: &DiscreteDistributionPair,
    losses: &[f64],
) -> Result<GapBound, DiagnosticsError> {
    if losses.len() != pair.len() {
        return Err(DiagnosticsError::LossLengthMismatch {
            losses: losses.len(),
            support: pair.len(),
        });
    }
    if losses.iter().any(|l| !l.is_finite()) {
        return Err(DiagnosticsError::NonFinite {
            which: "losses".into(),
        });
    }
    if let Some(i) = pair.support_violation() {
        return Err(DiagnosticsError::SupportViolation {
            point: pair.support[i].clone(),
        });
    }

    let mut e_cal_l = 0.0;
    let mut e_target_l = 0.0;
    let mut weight_mse = 0.0;
    let mut loss_sq = 0.0;
    for ((&t, &c), &l) in pair.p_target.iter().zip(&pair.p_cal).zip(losses) {
        e_target_l += t * l;
        e_cal_l += c * l;
        loss_sq += c * l * l;
        if c > 0.0 {
            let w = t / c;
            weight_mse += c * (1.0 - w) * (1.0 - w);
        }
    }
    let gap = (e_target_l - e_cal_l).abs();
    let cs_bound = (weight_mse * loss_sq).sqrt();
    let amgm_bound = 0.5 * (weight_mse + loss_sq);
    if !gap.is_finite() || !cs_bound.is_finite() || !amgm_bound.is_finite() {
        return Err(DiagnosticsError::Overflow);
    }
    // Both inequalities are theorems; allow only accumulated rounding.
    let tol = 1e-12 * (1.0 + amgm_bound.abs());
    if gap > cs_bound + tol || cs_bound > amgm_bound + tol {
        return Err(DiagnosticsError::BoundViolation {
            gap,
            cs: cs_bound,
            amgm: amgm_bound,
        });
    }
    Ok(GapBound {
        gap,
        cs_bound,
        amgm_bound,
        weight_mse,
        loss_second_moment: loss_sq,
    })
}

/// Bins two 1-D sample sets over their joint range into a distribution
/// pair. `smoothing` is an additive pseudo-count per bin (0 keeps empirical
/// frequencies, so disjoint regions produce genuine support violations
/// downstream). Bins are `[lo + j*width, lo + (j+1)*width)` with the top
/// edge closed in the last bin.
pub fn induce_histogram_pair(
    target_vals: &[f64],
    cal_vals: &[f64],
    bins: usize,
    smoothing: f64,
) -> Result<DiscreteDistributionPair, DiagnosticsError> {
    if bins == 0 {
        return Err(DiagnosticsError::InvalidBins);
    }
    if !smoothing.is_finite() || smoothing < 0.0 {
        return Err(DiagnosticsError::InvalidSmoothing(smoothing));
    }
    for (vals, which) in [(target_vals, "target"), (cal_vals, "calibration")] {
        if vals.is_empty() {
            return Err(DiagnosticsError::EmptyValues { which });
        }
        if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
            return Err(DiagnosticsError::NonFiniteValue { which, index: i });
        }
    }

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in target_vals.iter().chain(cal_vals) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        // All values identical: widen to an arbitrary unit interval so one
        // bin captures everything.
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;

    let index = |v: f64| -> usize {
        let j = ((v - lo) / width).floor();
        (j as usize).min(bins - 1)
    };
    let histogram = |vals: &[f64]| -> Vec<f64> {
        let mut counts = vec![0.0f64; bins];
        for &v in vals {
            counts[index(v)] += 1.0;
        }
        let total = vals.len() as f64 + smoothing * bins as f64;
        counts.iter().map(|c| (c + smoothing) / total).collect()
    };

    let support = (0..bins)
        .map(|j| {
            let a = lo + j as f64 * width;
            let b = lo + (j as f64 + 1.0) * width;
            format!("bin_{j} [{a:.6}, {b:.6})")
        })
        .collect();
    DiscreteDistributionPair::new(support, histogram(target_vals), histogram(cal_vals))
}
