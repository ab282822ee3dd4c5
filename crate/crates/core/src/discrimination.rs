//! Minimum-error discrimination of pure-state ensembles.
//!
//! The workhorse is the least-square ("pretty good") measurement
//! `M_i = η_i ρ_out^{-1/2} |ψ_i⟩⟨ψ_i| ρ_out^{-1/2}`. For two states the
//! Helstrom measurement gives the true optimum, and for the symmetric
//! equiprobable family the LSM itself is optimal with a closed-form success
//! probability.

use std::fmt;

use num_complex::Complex64;

use crate::coherence::{self, AlphaParam, BlochVector};
use crate::error::{Error, Result};
use crate::linalg::{self, eig_hermitian, ComplexMatrix, ZERO};
use crate::states::{self, DensityMatrix, PureEnsemble};

pub const POVM_POSITIVITY_TOL: f64 = 1e-10;
pub const POVM_COMPLETENESS_TOL: f64 = 1e-9;
const CLOSED_FORM_TOL: f64 = 1e-9;
const BOUND_SLACK: f64 = 1e-10;

/// Positive operators summing to the identity, or to `support` when given.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
    support: Option<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>, support: Option<ComplexMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let dim = elements[0].dim();
        let mut total = ComplexMatrix::zeros(dim);
        for (index, m) in elements.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            let min_eigenvalue = eig_hermitian(m)?.min_eigenvalue();
            if min_eigenvalue < -POVM_POSITIVITY_TOL {
                return Err(Error::PovmNotPositive {
                    index,
                    min_eigenvalue,
                });
            }
            total = &total + m;
        }
        let target = match &support {
            Some(p) if p.dim() != dim => {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                })
            }
            Some(p) => p.clone(),
            None => ComplexMatrix::identity(dim),
        };
        let deviation = total.max_abs_diff(&target);
        if deviation > POVM_COMPLETENESS_TOL {
            return Err(Error::IncompletePovm { deviation });
        }
        Ok(Self { elements, support })
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn support(&self) -> Option<&ComplexMatrix> {
        self.support.as_ref()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Lsm,
    Helstrom,
    SymmetricOptimal,
}

impl Strategy {
    pub fn label(self) -> &'static str {
        match self {
            Strategy::Lsm => "lsm",
            Strategy::Helstrom => "helstrom",
            Strategy::SymmetricOptimal => "symmetric-optimal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Strategy::Lsm,
            Strategy::Helstrom,
            Strategy::SymmetricOptimal,
        ]
        .into_iter()
        .find(|x| x.label() == s)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationResult {
    pub success_prob: f64,
    pub error_prob: f64,
    pub povm: Povm,
    pub strategy: Strategy,
}

/// Least-square measurement for a pure-state ensemble.
///
/// Elements resolve the support projector of `ρ_out` when it is rank deficient.
pub fn lsm_povm(e: &PureEnsemble) -> Result<Povm> {
    if e.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let spectrum = eig_hermitian(&e.average_state())?;
    let inv_root = spectrum.pinv_sqrt()?;
    let support = spectrum.support_projector();
    let mut elements = Vec::with_capacity(e.len());
    for (eta, psi) in e.probs().iter().zip(e.states()) {
        let v = inv_root.mul_vec(psi)?;
        elements.push(ComplexMatrix::projector(&v).scale_real(*eta));
    }
    let full_rank = spectrum.rank() == e.dim();
    Povm::new(elements, if full_rank { None } else { Some(support) })
}

/// `Σ_i η_i ⟨ψ_i|M_i|ψ_i⟩` and its complement.
pub fn success_probability(
    e: &PureEnsemble,
    m: &Povm,
    strategy: Strategy,
) -> Result<DiscriminationResult> {
    if m.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: m.dim(),
        });
    }
    if m.len() != e.len() {
        return Err(Error::CountMismatch {
            expected: e.len(),
            found: m.len(),
        });
    }
    let mut success = 0.0;
    for ((eta, psi), el) in e.probs().iter().zip(e.states()).zip(m.elements()) {
        let mpsi = el.mul_vec(psi)?;
        success += eta * linalg::inner(psi, &mpsi).re;
    }
    let success = success.clamp(0.0, 1.0);
    Ok(DiscriminationResult {
        success_prob: success,
        error_prob: 1.0 - success,
        povm: m.clone(),
        strategy,
    })
}

/// Builds the LSM and evaluates it.
pub fn lsm(e: &PureEnsemble) -> Result<DiscriminationResult> {
    success_probability(e, &lsm_povm(e)?, Strategy::Lsm)
}

/// `(C_a^(1/2)(ρ), P_E^lsm)` for the coherence ensemble of `ρ`; the two agree.
pub fn state_lsm_identity(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let c = coherence::alpha_coherence(rho, AlphaParam::HALF)?;
    let e = states::coherence_ensemble(rho)?;
    Ok((c, lsm(&e)?.error_prob))
}

/// `(P_E^lsm(e), C_a^(1/2)(M))` with `M` the QSD-state of `e`; the two agree.
pub fn ensemble_lsm_identity(e: &PureEnsemble) -> Result<(f64, f64)> {
    let pe = lsm(e)?.error_prob;
    let m = states::qsd_state(e)?;
    Ok((pe, coherence::alpha_coherence(&m, AlphaParam::HALF)?))
}

/// Optimal two-state measurement from the sign decomposition of
/// `η₁|ψ₁⟩⟨ψ₁| - η₂|ψ₂⟩⟨ψ₂|`. Kernel directions go to outcome 1.
pub fn helstrom_two_state(e: &PureEnsemble) -> Result<DiscriminationResult> {
    if e.len() != 2 {
        return Err(Error::WrongCount {
            expected: 2,
            found: e.len(),
        });
    }
    let (p, s) = (e.probs(), e.states());
    let gamma = &ComplexMatrix::projector(&s[0]).scale_real(p[0])
        - &ComplexMatrix::projector(&s[1]).scale_real(p[1]);
    let eig = eig_hermitian(&gamma)?;
    let tol = 1e-14 * eig.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let positive = eig.map(|l| if l >= -tol { 1.0 } else { 0.0 });
    let negative = &ComplexMatrix::identity(e.dim()) - &positive;
    let povm = Povm::new(vec![positive, negative], None)?;
    success_probability(e, &povm, Strategy::Helstrom)
}

/// `½(1 - √(1 - 4 η₁ η₂ |⟨ψ₁|ψ₂⟩|²))`.
pub fn helstrom_pure_error(e: &PureEnsemble) -> Result<f64> {
    if e.len() != 2 {
        return Err(Error::WrongCount {
            expected: 2,
            found: e.len(),
        });
    }
    let (p, s) = (e.probs(), e.states());
    let ov = linalg::inner(&s[0], &s[1]).norm_sqr();
    Ok(0.5 * (1.0 - (1.0 - 4.0 * p[0] * p[1] * ov).max(0.0).sqrt()))
}

/// Equiprobable `d` states with pairwise overlap `p`, realized as
/// `√p |0⟩ + √(1-p) |i⟩` in `d + 1` dimensions.
pub fn symmetric_ensemble(d: usize, p: f64) -> Result<PureEnsemble> {
    check_symmetric_params(d, p)?;
    let states: Vec<Vec<Complex64>> = (0..d)
        .map(|i| {
            let mut v = vec![ZERO; d + 1];
            v[0] = Complex64::new(p.sqrt(), 0.0);
            v[i + 1] = Complex64::new((1.0 - p).sqrt(), 0.0);
            v
        })
        .collect();
    PureEnsemble::uniform(states)
}

fn check_symmetric_params(d: usize, p: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::BadParam(format!("need at least 2 states, got {d}")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::BadParam(format!("overlap {p} outside [0, 1)")));
    }
    Ok(())
}

/// Closed-form optimal success for the symmetric equiprobable family.
pub fn symmetric_success_closed_form(d: usize, p: f64) -> Result<f64> {
    check_symmetric_params(d, p)?;
    Ok(coherence::symmetric_success(d, p))
}

/// LSM on the symmetric family, checked against the closed-form optimum.
pub fn symmetric_optimal(d: usize, p: f64) -> Result<DiscriminationResult> {
    symmetric_optimal_for(&symmetric_ensemble(d, p)?, d, p)
}

/// As [`symmetric_optimal`], on a caller-supplied realization of the family.
pub fn symmetric_optimal_for(e: &PureEnsemble, d: usize, p: f64) -> Result<DiscriminationResult> {
    let closed_form = symmetric_success_closed_form(d, p)?;
    let mut r = lsm(e)?;
    if (r.success_prob - closed_form).abs() > CLOSED_FORM_TOL {
        return Err(Error::ClosedFormMismatch {
            lsm: r.success_prob,
            closed_form,
        });
    }
    r.strategy = Strategy::SymmetricOptimal;
    Ok(r)
}

/// Detects an equiprobable ensemble with a common real pairwise overlap and
/// returns that overlap.
pub fn detect_symmetric(e: &PureEnsemble) -> Option<f64> {
    let n = e.len();
    if n < 2 {
        return None;
    }
    let u = 1.0 / n as f64;
    if e.probs().iter().any(|p| (p - u).abs() > 1e-9) {
        return None;
    }
    let g = e.overlaps();
    let p = g[(0, 1)];
    for i in 0..n {
        for j in i + 1..n {
            if (g[(i, j)] - p).norm() > 1e-9 {
                return None;
            }
        }
    }
    if p.im.abs() > 1e-9 || p.re < -1e-12 || p.re >= 1.0 {
        return None;
    }
    Some(p.re.max(0.0))
}

/// `(P_S^opt, √P_S^lsm, 2 P_E^opt)` for a two-member ensemble, after checking
/// `P_S^opt ≤ √P_S^lsm` and `P_E^lsm ≤ 2 P_E^opt`.
pub fn barnum_knill_check(e: &PureEnsemble) -> Result<(f64, f64, f64)> {
    let opt = helstrom_two_state(e)?;
    let l = lsm(e)?;
    let root = l.success_prob.sqrt();
    let twice_opt_err = 2.0 * opt.error_prob;
    if opt.success_prob > root + BOUND_SLACK {
        return Err(Error::BoundViolated(format!(
            "P_S^opt = {} > sqrt(P_S^lsm) = {}",
            opt.success_prob, root
        )));
    }
    if l.error_prob > twice_opt_err + BOUND_SLACK {
        return Err(Error::BoundViolated(format!(
            "P_E^lsm = {} > 2 P_E^opt = {}",
            l.error_prob, twice_opt_err
        )));
    }
    Ok((opt.success_prob, root, twice_opt_err))
}

/// Closed forms for the QSD-state of two pure states with Bloch vector `c`:
/// `([A^(1/2)]², F², optimal?)` where the flag says whether the LSM reaches
/// the optimum.
pub fn qubit_lsm_optimality(c: &BlochVector) -> Result<(f64, f64, bool)> {
    let c = BlochVector::new(c.c1, c.c2, c.c3)?;
    let r2 = c.c1 * c.c1 + c.c2 * c.c2 + c.c3 * c.c3;
    // √(1 - |c|²) amplifies rounding near the surface; snap to pure there
    let s = if r2 >= 1.0 - 1e-12 {
        0.0
    } else {
        (1.0 - r2).sqrt()
    };
    let a2 = 0.5 * (1.0 + s + c.c3 * c.c3 / (1.0 + s));
    let f2 = 0.5 * (1.0 + (1.0 - c.c1 * c.c1 - c.c2 * c.c2).max(0.0).sqrt());
    let flag = (a2.sqrt() - f2.sqrt()).abs() <= 1e-9;
    Ok((a2, f2, flag))
}

/// QSD-state of `n` copies: `√(η_i η_j) ⟨ψ_i|ψ_j⟩^n`, computed from overlaps only.
pub fn multicopy_qsd_state(e: &PureEnsemble, n: u32) -> Result<DensityMatrix> {
    if n < 1 {
        return Err(Error::BadParam("copy count must be at least 1".into()));
    }
    states::validate_density(linalg::unchecked_gram(e.states(), e.probs(), n))
}

/// LSM error for `n` copies, evaluated on a realization of the `n`-copy Gram
/// matrix (the coherence ensemble of the multi-copy QSD-state).
pub fn multicopy_lsm_error(e: &PureEnsemble, n: u32) -> Result<f64> {
    let m = multicopy_qsd_state(e, n)?;
    Ok(lsm(&states::coherence_ensemble(&m)?)?.error_prob)
}
