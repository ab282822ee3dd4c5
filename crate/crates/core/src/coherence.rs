//! Coherence quantifiers relative to the computational basis.
//!
//! The central family is the α-affinity of coherence
//! `C_a^(α)(ρ) = 1 - max_σ (Tr ρ^α σ^{1-α})^{1/α}` over diagonal `σ`, which
//! has the closed form `1 - Σ_i ⟨i|ρ^α|i⟩^{1/α}`. The maximizing incoherent
//! state has weights proportional to `⟨i|ρ^α|i⟩^{1/α}`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::states::{DensityMatrix, IncoherentState};

/// Values with magnitude at most `REPORT_CLAMP` are reported as `0`.
pub const REPORT_CLAMP: f64 = 1e-12;
const IMAGINARY_TOL: f64 = 1e-10;

/// Search window for the Chernoff-bound maximization over α.
pub const QCB_ALPHA_MIN: f64 = 0.001;
pub const QCB_ALPHA_MAX: f64 = 0.999;
const QCB_SCAN_POINTS: usize = 1000;
const QCB_ALPHA_TOL: f64 = 1e-6;

/// An exponent strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub const HALF: AlphaParam = AlphaParam(0.5);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::BadAlpha(alpha))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    AlphaAffinity,
    Affinity,
    Qcb,
    L1,
    GeometricQubit,
}

impl MeasureKind {
    pub fn label(self) -> &'static str {
        match self {
            MeasureKind::AlphaAffinity => "alpha-affinity",
            MeasureKind::Affinity => "affinity",
            MeasureKind::Qcb => "qcb",
            MeasureKind::L1 => "l1",
            MeasureKind::GeometricQubit => "geometric-qubit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            MeasureKind::AlphaAffinity,
            MeasureKind::Affinity,
            MeasureKind::Qcb,
            MeasureKind::L1,
            MeasureKind::GeometricQubit,
        ]
        .into_iter()
        .find(|m| m.label() == s)
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A coherence value together with the closest incoherent state, when the
/// measure defines one.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub value: f64,
    pub closest_incoherent: Option<IncoherentState>,
    pub measure: MeasureKind,
}

fn clamp_report(v: f64) -> f64 {
    if v.abs() <= REPORT_CLAMP {
        0.0
    } else {
        v
    }
}

/// `A^(α)(ρ, σ) = Tr ρ^α σ^{1-α}`.
pub fn alpha_affinity(rho: &DensityMatrix, sigma: &DensityMatrix, a: AlphaParam) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let alpha = a.get();
    let t = linalg::trace_product(&rho.power(alpha)?, &sigma.power(1.0 - alpha)?)?;
    real_part(t)
}

fn real_part(t: Complex64) -> Result<f64> {
    if t.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue { value: t.im });
    }
    Ok(t.re)
}

/// `Tr ρ^α σ^{1-α}` for diagonal `σ`, using only the diagonal of `ρ^α`.
pub fn alpha_affinity_incoherent(
    rho: &DensityMatrix,
    sigma: &IncoherentState,
    a: AlphaParam,
) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let alpha = a.get();
    let diag = rho.power_diagonal(alpha)?;
    Ok(diag
        .iter()
        .zip(sigma.diag())
        .map(|(r, &s)| {
            if s > 0.0 {
                r * s.powf(1.0 - alpha)
            } else {
                0.0
            }
        })
        .sum())
}

/// `⟨i|ρ^α|i⟩^{1/α}` for each `i`.
fn affinity_weights(rho: &DensityMatrix, alpha: f64) -> Result<Vec<f64>> {
    Ok(rho
        .power_diagonal(alpha)?
        .into_iter()
        .map(|x| x.max(0.0).powf(1.0 / alpha))
        .collect())
}

fn closest_from_weights(weights: &[f64]) -> Option<IncoherentState> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    IncoherentState::new(weights.iter().map(|w| w / total).collect()).ok()
}

/// α-affinity of coherence and its closest incoherent state.
pub fn alpha_affinity_coherence(rho: &DensityMatrix, a: AlphaParam) -> Result<CoherenceReport> {
    let w = affinity_weights(rho, a.get())?;
    let value = clamp_report(1.0 - w.iter().sum::<f64>());
    Ok(CoherenceReport {
        value,
        closest_incoherent: closest_from_weights(&w),
        measure: MeasureKind::AlphaAffinity,
    })
}

/// Shorthand for the value of [`alpha_affinity_coherence`].
pub fn alpha_coherence(rho: &DensityMatrix, a: AlphaParam) -> Result<f64> {
    Ok(alpha_affinity_coherence(rho, a)?.value)
}

/// `1 - Σ_i |⟨i|ψ⟩|^{2/α}`.
pub fn pure_state_coherence(psi: &[Complex64], a: AlphaParam) -> Result<f64> {
    linalg::check_unit(psi)?;
    let e = 1.0 / a.get();
    Ok(clamp_report(
        1.0 - psi.iter().map(|z| z.norm_sqr().powf(e)).sum::<f64>(),
    ))
}

/// Bloch vector `(c1, c2, c3)` of `ρ = (I + c·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BlochVector {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let v = Self { c1, c2, c3 };
        let n = v.norm();
        if !n.is_finite() || n > 1.0 + 1e-9 {
            return Err(Error::BadBlochVector { norm: n });
        }
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        (self.c1 * self.c1 + self.c2 * self.c2 + self.c3 * self.c3).sqrt()
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: rho.dim(),
            });
        }
        let m = rho.matrix();
        let off = m[(1, 0)];
        Self::new(2.0 * off.re, 2.0 * off.im, (m[(0, 0)] - m[(1, 1)]).re)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = ComplexMatrix::from_rows(vec![
            vec![
                Complex64::new(0.5 * (1.0 + self.c3), 0.0),
                Complex64::new(0.5 * self.c1, -0.5 * self.c2),
            ],
            vec![
                Complex64::new(0.5 * self.c1, 0.5 * self.c2),
                Complex64::new(0.5 * (1.0 - self.c3), 0.0),
            ],
        ])
        .expect("2x2");
        DensityMatrix::trusted(m)
    }
}

/// Single-qubit closed form `1 - (A+B)^{1/α} - (A-B)^{1/α}`.
pub fn qubit_alpha_affinity_coherence(c: &BlochVector, a: AlphaParam) -> Result<f64> {
    let c = BlochVector::new(c.c1, c.c2, c.c3)?;
    let r = c.norm();
    if r <= 1e-12 {
        return Ok(0.0);
    }
    let alpha = a.get();
    let r_clamped = r.min(1.0);
    let (small, large) = ((1.0 - r_clamped) / 2.0, (1.0 + r_clamped) / 2.0);
    // same zero threshold as the eigendecomposition route
    let lo = if small <= linalg::ZERO_CLAMP_REL * large {
        0.0
    } else {
        small.powf(alpha)
    };
    let hi = large.powf(alpha);
    let big_a = (lo + hi) / 2.0;
    let big_b = c.c3 * (hi - lo) / (2.0 * r);
    let e = 1.0 / alpha;
    Ok(clamp_report(
        1.0 - (big_a + big_b).max(0.0).powf(e) - (big_a - big_b).max(0.0).powf(e),
    ))
}

/// Affinity of coherence `1 - √(Σ_i ⟨i|√ρ|i⟩²)`.
///
/// Satisfies faithfulness, monotonicity and convexity but not additivity on
/// block-diagonal states.
pub fn affinity_coherence(rho: &DensityMatrix) -> Result<CoherenceReport> {
    let w = affinity_weights(rho, 0.5)?;
    Ok(CoherenceReport {
        value: clamp_report(1.0 - w.iter().sum::<f64>().sqrt()),
        closest_incoherent: closest_from_weights(&w),
        measure: MeasureKind::Affinity,
    })
}

/// Chernoff-bound coherence `max_α C_a^(α)(ρ)` over `[0.001, 0.999]`.
pub fn qcb_coherence(rho: &DensityMatrix) -> Result<f64> {
    Ok(qcb_coherence_argmax(rho)?.0)
}

/// Returns `(max value, maximizing α)`.
///
/// A uniform scan locates the best bracket, golden-section search refines it.
pub fn qcb_coherence_argmax(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let spectrum = rho.spectrum()?;
    let f = |alpha: f64| -> Result<f64> {
        let diag = spectrum.power_diagonal(alpha)?;
        Ok(1.0
            - diag
                .iter()
                .map(|x| x.max(0.0).powf(1.0 / alpha))
                .sum::<f64>())
    };

    let step = (QCB_ALPHA_MAX - QCB_ALPHA_MIN) / (QCB_SCAN_POINTS - 1) as f64;
    let grid = |k: usize| QCB_ALPHA_MIN + step * k as f64;
    let mut best_k = 0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..QCB_SCAN_POINTS {
        let v = f(grid(k))?;
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let mut best_alpha = grid(best_k);

    let mut lo = grid(best_k.saturating_sub(1));
    let mut hi = grid((best_k + 1).min(QCB_SCAN_POINTS - 1));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > QCB_ALPHA_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best {
            best = v;
            best_alpha = x;
        }
    }
    Ok((clamp_report(best), best_alpha))
}

/// `Σ_{i≠j} |ρ_ij|`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    rho.matrix().off_diagonal_l1()
}

/// Geometric coherence of a qubit, `1 - ½(1 + √(1 - c1² - c2²))`.
pub fn geometric_coherence_qubit(c: &BlochVector) -> Result<f64> {
    let c = BlochVector::new(c.c1, c.c2, c.c3)?;
    let t = (1.0 - c.c1 * c.c1 - c.c2 * c.c2).max(0.0);
    Ok(clamp_report(1.0 - 0.5 * (1.0 + t.sqrt())))
}

/// Geometric coherence of `ρ_m = p|ψ_d⟩⟨ψ_d| + (1-p) I/d`.
pub fn geometric_coherence_mcms(d: usize, p: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::BadParam(format!("dimension {d} < 2")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::BadParam(format!("p = {p} outside [0, 1)")));
    }
    Ok(clamp_report(1.0 - symmetric_success(d, p)))
}

/// `[((d-1)/d)√(1-p) + (1/d)√(1-p+dp)]²`.
pub(crate) fn symmetric_success(d: usize, p: f64) -> f64 {
    let df = d as f64;
    let b = (df - 1.0) / df * (1.0 - p).sqrt() + (1.0 - p + df * p).sqrt() / df;
    b * b
}

/// `(C(pρ ⊕ (1-p)σ), p C(ρ) + (1-p) C(σ))` for an arbitrary measure.
pub fn block_diag_additivity<F>(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    p: f64,
    measure: F,
) -> Result<(f64, f64)>
where
    F: Fn(&DensityMatrix) -> Result<f64>,
{
    let joint = rho.direct_sum(sigma, p)?;
    Ok((
        measure(&joint)?,
        p * measure(rho)? + (1.0 - p) * measure(sigma)?,
    ))
}

/// Block-diagonal additivity of the α-affinity of coherence.
pub fn block_diag_coherence_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    p: f64,
    a: AlphaParam,
) -> Result<(f64, f64)> {
    block_diag_additivity(rho, sigma, p, |s| alpha_coherence(s, a))
}
