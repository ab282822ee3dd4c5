//! Multi-slit quanton/detector model.
//!
//! A quanton in `d` paths couples to detector states `|d_i⟩`. The reduced
//! quanton state is the entrywise product of the quanton matrix with the
//! detector overlaps `⟨d_j|d_i⟩`. Path distinguishability is the LSM success
//! probability for the detector states weighted by the path populations.
//! For a pure quanton `C_a^(1/2)(ρ_s) + D_q = 1`; for a mixed quanton the sum
//! is at most one whenever an incoherent channel mapping `ρ'_s` to `ρ_s`
//! exists, which [`appendix_channel`] constructs.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::coherence::{self, AlphaParam};
use crate::discrimination;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ZERO};
use crate::states::{self, DensityMatrix, PureEnsemble};

pub const KRAUS_COMPLETENESS_TOL: f64 = 1e-12;
/// Slack on the construction conditions `… ≤ 1`.
pub const CONDITION_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Quanton {
    /// Path amplitudes `c_i`.
    Pure(Vec<Complex64>),
    /// Path density matrix `ρ_ij`.
    Mixed(DensityMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantonDetectorModel {
    quanton: Quanton,
    detectors: Vec<Vec<Complex64>>,
}

impl QuantonDetectorModel {
    pub fn new(quanton: Quanton, detectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = match &quanton {
            Quanton::Pure(c) => {
                let n = linalg::norm(c);
                if c.is_empty() || (n - 1.0).abs() > NORM_TOL {
                    return Err(Error::InvalidModel(format!(
                        "amplitudes have norm {n}, expected 1"
                    )));
                }
                c.len()
            }
            Quanton::Mixed(rho) => rho.dim(),
        };
        if detectors.len() != d {
            return Err(Error::InvalidModel(format!(
                "{} detector states for {d} paths",
                detectors.len()
            )));
        }
        let ddim = detectors[0].len();
        for (i, v) in detectors.iter().enumerate() {
            if v.len() != ddim || ddim == 0 {
                return Err(Error::InvalidModel(format!(
                    "detector {i} has dimension {}, expected {ddim}",
                    v.len()
                )));
            }
            let n = linalg::norm(v);
            if (n - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidModel(format!("detector {i} has norm {n}")));
            }
        }
        Ok(Self { quanton, detectors })
    }

    pub fn pure(amplitudes: Vec<Complex64>, detectors: Vec<Vec<Complex64>>) -> Result<Self> {
        Self::new(Quanton::Pure(amplitudes), detectors)
    }

    pub fn mixed(rho: DensityMatrix, detectors: Vec<Vec<Complex64>>) -> Result<Self> {
        Self::new(Quanton::Mixed(rho), detectors)
    }

    pub fn quanton(&self) -> &Quanton {
        &self.quanton
    }

    pub fn detectors(&self) -> &[Vec<Complex64>] {
        &self.detectors
    }

    /// Number of paths.
    pub fn dim(&self) -> usize {
        self.detectors.len()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.quanton, Quanton::Pure(_))
    }

    /// `c c†` or `ρ`.
    pub fn quanton_matrix(&self) -> ComplexMatrix {
        match &self.quanton {
            Quanton::Pure(c) => ComplexMatrix::projector(c),
            Quanton::Mixed(rho) => rho.matrix().clone(),
        }
    }

    /// Path populations `|c_i|²` or `ρ_ii`.
    pub fn populations(&self) -> Vec<f64> {
        match &self.quanton {
            Quanton::Pure(c) => c.iter().map(|z| z.norm_sqr()).collect(),
            Quanton::Mixed(rho) => rho.populations(),
        }
    }

    /// `G_ij = ⟨d_j|d_i⟩`.
    pub fn detector_overlaps(&self) -> ComplexMatrix {
        let d = &self.detectors;
        ComplexMatrix::from_fn(self.dim(), |i, j| linalg::inner(&d[j], &d[i]))
    }

    /// Same quanton, different detectors.
    pub fn with_detectors(&self, detectors: Vec<Vec<Complex64>>) -> Result<Self> {
        Self::new(self.quanton.clone(), detectors)
    }
}

/// `ρ_s = Σ ρ_ij ⟨d_j|d_i⟩ |i⟩⟨j|`.
pub fn reduced_quanton(m: &QuantonDetectorModel) -> Result<DensityMatrix> {
    states::validate_density(m.quanton_matrix().hadamard(&m.detector_overlaps())?)
}

/// `ρ'_s = Σ √(ρ_ii ρ_jj) ⟨d_j|d_i⟩ |i⟩⟨j|`: the reduced state of the pure
/// quanton with amplitudes `√ρ_ii`.
pub fn primed_quanton(m: &QuantonDetectorModel) -> Result<DensityMatrix> {
    let pops = m.populations();
    let g = m.detector_overlaps();
    states::validate_density(ComplexMatrix::from_fn(m.dim(), |i, j| {
        g[(i, j)] * (pops[i].max(0.0) * pops[j].max(0.0)).sqrt()
    }))
}

/// LSM success probability for `{|d_i⟩, populations_i}`.
pub fn path_distinguishability(m: &QuantonDetectorModel) -> Result<f64> {
    let e = PureEnsemble::new(m.populations(), m.detectors.clone())
        .map_err(|err| Error::InvalidModel(err.to_string()))?
        .without_null_members()?;
    Ok(discrimination::lsm(&e)?.success_prob)
}

/// `(C_a^(1/2)(ρ_s), D_q)` for a pure quanton; they sum to one.
pub fn duality_check_pure(m: &QuantonDetectorModel) -> Result<(f64, f64)> {
    if !m.is_pure() {
        return Err(Error::InvalidModel("expected an amplitude quanton".into()));
    }
    coherence_and_distinguishability(m)
}

fn coherence_and_distinguishability(m: &QuantonDetectorModel) -> Result<(f64, f64)> {
    let c = coherence::alpha_coherence(&reduced_quanton(m)?, AlphaParam::HALF)?;
    Ok((c, path_distinguishability(m)?))
}

/// `(C_a^(1/2)(ρ_s), D_q)` for a density quanton whose sum is bounded by one.
///
/// Fails with [`Error::ConditionNotMet`] when no incoherent channel taking
/// `ρ'_s` to `ρ_s` can be built for this quanton.
pub fn duality_check_mixed(m: &QuantonDetectorModel) -> Result<(f64, f64)> {
    let rho = match m.quanton() {
        Quanton::Pure(_) => return duality_check_pure(m),
        Quanton::Mixed(rho) => rho,
    };
    check_condition(rho.matrix())?;
    coherence_and_distinguishability(m)
}

/// `(C_a^(1/2)(ρ_s), C_a^(1/2)(ρ'_s))`; the first never exceeds the second.
pub fn appendix_monotonicity_check(m: &QuantonDetectorModel) -> Result<(f64, f64)> {
    if let Quanton::Mixed(rho) = m.quanton() {
        check_condition(rho.matrix())?;
    }
    let c = coherence::alpha_coherence(&reduced_quanton(m)?, AlphaParam::HALF)?;
    let c_primed = coherence::alpha_coherence(&primed_quanton(m)?, AlphaParam::HALF)?;
    Ok((c, c_primed))
}

/// Normalized coherences `σ_ij = ρ_ij / √(ρ_ii ρ_jj)`, zero where a population vanishes.
pub fn normalized_coherences(rho: &ComplexMatrix) -> ComplexMatrix {
    let pops = rho.real_diagonal();
    ComplexMatrix::from_fn(rho.dim(), |i, j| {
        let den = (pops[i] * pops[j]).sqrt();
        if i == j {
            Complex64::new(1.0, 0.0)
        } else if den > states::ZERO_PROB {
            rho[(i, j)] / den
        } else {
            ZERO
        }
    })
}

/// Left-hand side of the construction condition for `ρ` (must be ≤ 1).
///
/// Pure states need no channel (`ρ'_s = ρ_s`) and report `0`. For `d = 3` the
/// three-path condition `|σ₁₂| + |σ₁₃ - σ₂₃ e^{iθ₁₂}|` is used after sorting
/// the pairs by modulus; otherwise the row sums `max_i Σ_{j≠i} |σ_ij|`.
pub fn condition_lhs(rho: &ComplexMatrix) -> f64 {
    let d = rho.dim();
    if d == 1 || is_pure_matrix(rho) {
        return 0.0;
    }
    let sigma = normalized_coherences(rho);
    if d == 3 {
        let perm = three_path_order(&sigma);
        let s = sigma.permuted(&perm);
        let (_, x) = three_path_terms(&s);
        s[(0, 1)].norm() + x.norm()
    } else {
        row_sum_max(&sigma)
    }
}

fn row_sum_max(sigma: &ComplexMatrix) -> f64 {
    let d = sigma.dim();
    (0..d)
        .map(|i| {
            (0..d)
                .filter(|&j| j != i)
                .map(|j| sigma[(i, j)].norm())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn is_pure_matrix(rho: &ComplexMatrix) -> bool {
    let purity: f64 = rho.as_slice().iter().map(|z| z.norm_sqr()).sum();
    purity >= 1.0 - 1e-9
}

fn check_condition(rho: &ComplexMatrix) -> Result<()> {
    let lhs = condition_lhs(rho);
    if lhs > 1.0 + CONDITION_TOL {
        return Err(Error::ConditionNotMet { lhs });
    }
    Ok(())
}

/// Permutation putting the pair with largest `|σ|` at (0,1) and the second
/// largest at (0,2).
fn three_path_order(sigma: &ComplexMatrix) -> [usize; 3] {
    let mut pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    pairs.sort_by(|a, b| sigma[*b].norm().total_cmp(&sigma[*a].norm()));
    let (a, b) = pairs[0];
    let (c, e) = pairs[1];
    let shared = if a == c || a == e { a } else { b };
    let other = if shared == a { b } else { a };
    let rest = 3 - shared - other;
    [shared, other, rest]
}

/// `(e^{iθ₁₂}, σ₁₃ - σ₂₃ e^{iθ₁₂})` in the sorted frame.
fn three_path_terms(s: &ComplexMatrix) -> (Complex64, Complex64) {
    let s12 = s[(0, 1)];
    let phase = if s12.norm() > 0.0 {
        s12 / s12.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (phase, s[(0, 2)] - s[(1, 2)] * phase)
}

/// Kraus operators each of which maps diagonal states to diagonal states,
/// with `Σ K†K = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentChannel {
    kraus: Vec<ComplexMatrix>,
}

impl IncoherentChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::IncompleteKraus {
                deviation: f64::INFINITY,
            });
        }
        let dim = kraus[0].dim();
        let mut total = ComplexMatrix::zeros(dim);
        for (index, k) in kraus.iter().enumerate() {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.dim(),
                });
            }
            for col in 0..dim {
                if (0..dim).filter(|&row| k[(row, col)] != ZERO).count() > 1 {
                    return Err(Error::NotIncoherent { index });
                }
            }
            total = &total + &(&k.adjoint() * k);
        }
        let deviation = total.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > KRAUS_COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus { deviation });
        }
        Ok(Self { kraus })
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    /// `Σ_k K_k X K_k†`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.dim());
        for k in &self.kraus {
            out = &out + &x.conjugate_by(k)?;
        }
        Ok(out)
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        states::validate_density(self.apply(rho.matrix())?)
    }

    /// Largest deviation of `Σ K†K` from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        let mut total = ComplexMatrix::zeros(self.dim());
        for k in &self.kraus {
            total = &total + &(&k.adjoint() * k);
        }
        total.max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }
}

/// Principal square root of `z`, paired with its conjugate for `conj(z)` so
/// that `√z · conj(√conj(z)) = z` holds on the branch cut too.
fn sqrt_pair(z: Complex64) -> (Complex64, Complex64) {
    let r = z.sqrt();
    (r, r.conj())
}

fn diag_op(entries: &[Complex64]) -> ComplexMatrix {
    let mut k = ComplexMatrix::zeros(entries.len());
    for (i, &e) in entries.iter().enumerate() {
        k[(i, i)] = e;
    }
    k
}

fn sqrt_slack(x: f64) -> Result<f64> {
    if x < -CONDITION_TOL {
        return Err(Error::ConditionNotMet { lhs: 1.0 - x });
    }
    Ok(x.max(0.0).sqrt())
}

/// Incoherent channel `Φ` with `Φ(ρ'_s) = ρ_s` for every detector choice.
///
/// * `d = 2`: `{K₁₂, K₁₁, K₂₂}`.
/// * `d = 3`: `{K₁₂, K₁₃, K₁₁, K₂₂, K₃₃}` built in the frame where
///   `|σ₁₂| ≥ |σ₁₃| ≥ |σ₂₃|`, then mapped back.
/// * other `d`: `K_ij` (i < j) with entries `√σ_ij`, `√σ_ji` at `(i,i)`,
///   `(j,j)`, plus `K_ii = √(1 - Σ_{j≠i} |σ_ij|) |i⟩⟨i|`.
pub fn appendix_channel(rho: &DensityMatrix, d: usize) -> Result<IncoherentChannel> {
    if rho.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    if let Some(index) = m
        .real_diagonal()
        .iter()
        .position(|&p| p <= states::ZERO_PROB)
    {
        return Err(Error::ZeroDiagonal { index });
    }
    let sigma = normalized_coherences(m);
    let kraus = if d == 3 {
        let lhs = condition_lhs_three(&sigma);
        if lhs > 1.0 + CONDITION_TOL {
            return Err(Error::ConditionNotMet { lhs });
        }
        three_path_kraus(&sigma)?
    } else {
        let lhs = row_sum_max(&sigma);
        if lhs > 1.0 + CONDITION_TOL {
            return Err(Error::ConditionNotMet { lhs });
        }
        general_kraus(&sigma)?
    };
    IncoherentChannel::new(kraus)
}

fn condition_lhs_three(sigma: &ComplexMatrix) -> f64 {
    let s = sigma.permuted(&three_path_order(sigma));
    s[(0, 1)].norm() + three_path_terms(&s).1.norm()
}

fn general_kraus(sigma: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
    let d = sigma.dim();
    let mut kraus = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i + 1..d {
            let (a, b) = sqrt_pair(sigma[(i, j)]);
            let mut entries = vec![ZERO; d];
            entries[i] = a;
            entries[j] = b;
            kraus.push(diag_op(&entries));
        }
    }
    for i in 0..d {
        let row: f64 = (0..d)
            .filter(|&j| j != i)
            .map(|j| sigma[(i, j)].norm())
            .sum();
        let mut entries = vec![ZERO; d];
        entries[i] = Complex64::new(sqrt_slack(1.0 - row)?, 0.0);
        kraus.push(diag_op(&entries));
    }
    Ok(kraus)
}

fn three_path_kraus(sigma: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
    let perm = three_path_order(sigma);
    let s = sigma.permuted(&perm);
    let s12 = s[(0, 1)];
    let s23 = s[(1, 2)];
    let (_, x) = three_path_terms(&s);
    let m12 = s12.norm();

    let (r12, r12c) = sqrt_pair(s12);
    let k12_third = if m12 > 0.0 { s23.conj() / r12 } else { ZERO };
    let (rx, rxc) = sqrt_pair(x);
    let ratio = if m12 > 0.0 { s23.norm_sqr() / m12 } else { 0.0 };

    let sorted = [
        [r12, r12c, k12_third],
        [rx, ZERO, rxc],
        [
            Complex64::new(sqrt_slack(1.0 - m12 - x.norm())?, 0.0),
            ZERO,
            ZERO,
        ],
        [ZERO, Complex64::new(sqrt_slack(1.0 - m12)?, 0.0), ZERO],
        [
            ZERO,
            ZERO,
            Complex64::new(sqrt_slack(1.0 - ratio - x.norm())?, 0.0),
        ],
    ];
    // sorted index a corresponds to original index perm[a]
    Ok(sorted
        .iter()
        .map(|e| {
            let mut orig = [ZERO; 3];
            for (a, &p) in perm.iter().enumerate() {
                orig[p] = e[a];
            }
            diag_op(&orig)
        })
        .collect())
}

/// Random channel `{P_k D_k}`: permutations times diagonal operators whose
/// squared moduli sum to one column-wise.
pub fn random_permutation_dephasing<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    terms: usize,
) -> Result<IncoherentChannel> {
    let terms = terms.max(1);
    let weights: Vec<Vec<f64>> = (0..dim)
        .map(|_| states::random_probabilities(rng, terms))
        .collect();
    let mut kraus = Vec::with_capacity(terms);
    for k in 0..terms {
        let mut perm: Vec<usize> = (0..dim).collect();
        perm.shuffle(rng);
        let mut op = ComplexMatrix::zeros(dim);
        for (j, (&target, w)) in perm.iter().zip(&weights).enumerate() {
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            op[(target, j)] = Complex64::from_polar(w[k].sqrt(), phase);
        }
        kraus.push(op);
    }
    IncoherentChannel::new(kraus)
}

/// Random channel whose Kraus operators each carry a single entry
/// `a_kj |f_k(j)⟩⟨j|`, so several inputs may be sent to the same output.
pub fn random_single_entry<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    terms: usize,
) -> Result<IncoherentChannel> {
    let terms = terms.max(1);
    let mut kraus = Vec::with_capacity(terms * dim);
    for j in 0..dim {
        let w = states::random_probabilities(rng, terms);
        for wk in w {
            let mut op = ComplexMatrix::zeros(dim);
            let target = rng.random_range(0..dim);
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            op[(target, j)] = Complex64::from_polar(wk.sqrt(), phase);
            kraus.push(op);
        }
    }
    IncoherentChannel::new(kraus)
}

/// Random full-rank state rescaled so that [`appendix_channel`] applies.
pub fn random_admissible_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<DensityMatrix> {
    let rho = states::random_density_with(rng, d, d)?;
    let lhs = condition_lhs(rho.matrix());
    let limit = rng.random_range(0.05..1.0);
    if lhs <= limit {
        return Ok(rho);
    }
    let s = limit / lhs;
    let m = rho.matrix();
    // convex combination of ρ and its dephased part stays a state
    states::validate_density(ComplexMatrix::from_fn(d, |i, j| {
        if i == j {
            m[(i, j)]
        } else {
            m[(i, j)] * s
        }
    }))
}

/// [`appendix_channel`] of a random admissible state in dimension `d`.
pub fn random_appendix_channel<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
) -> Result<IncoherentChannel> {
    let rho = random_admissible_state(rng, d)?;
    appendix_channel(&rho, d)
}

/// Detector states with common pairwise overlap `s`, `√s |0⟩ + √(1-s) |i⟩`
/// in `d + 1` dimensions.
pub fn symmetric_detectors(d: usize, s: f64) -> Result<Vec<Vec<Complex64>>> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::BadParam(format!("overlap {s} outside [0, 1]")));
    }
    Ok((0..d)
        .map(|i| {
            let mut v = vec![ZERO; d + 1];
            v[0] = Complex64::new(s.sqrt(), 0.0);
            v[i + 1] = Complex64::new((1.0 - s).sqrt(), 0.0);
            v
        })
        .collect())
}

/// Random model with `d` paths and `d`-dimensional detectors.
pub fn random_model<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    mixed: bool,
) -> Result<QuantonDetectorModel> {
    let detectors = (0..d).map(|_| states::random_unit_vector(rng, d)).collect();
    if mixed {
        let rank = rng.random_range(1..=d);
        QuantonDetectorModel::mixed(states::random_density_with(rng, d, rank)?, detectors)
    } else {
        QuantonDetectorModel::pure(states::random_unit_vector(rng, d), detectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn two_path_half_overlap() -> QuantonDetectorModel {
        // ⟨d₂|d₁⟩ = ½
        let d1 = vec![c(1.0), c(0.0)];
        let d2 = vec![c(0.5), c(0.75f64.sqrt())];
        QuantonDetectorModel::pure(vec![c(FRAC_1_SQRT_2); 2], vec![d1, d2]).unwrap()
    }

    #[test]
    fn reduced_quanton_examples() {
        let amps = vec![c(0.6), Complex64::new(0.0, 0.8)];
        let ortho = (0..2).map(|i| linalg::basis_vector(2, i)).collect();
        let m = QuantonDetectorModel::pure(amps.clone(), ortho).unwrap();
        assert!(reduced_quanton(&m).unwrap().is_incoherent(0.0));

        let same = vec![linalg::basis_vector(3, 0); 2];
        let m = QuantonDetectorModel::pure(amps.clone(), same).unwrap();
        let bare = ComplexMatrix::projector(&amps);
        assert!(reduced_quanton(&m).unwrap().matrix().max_abs_diff(&bare) < 1e-15);

        let rho_s = reduced_quanton(&two_path_half_overlap()).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        assert!(rho_s.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn distinguishability_examples() {
        let ortho: Vec<_> = (0..3).map(|i| linalg::basis_vector(3, i)).collect();
        let amps = states::maximally_coherent_vector(3);
        let m = QuantonDetectorModel::pure(amps.clone(), ortho).unwrap();
        assert!((path_distinguishability(&m).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(duality_check_pure(&m).unwrap().0, 0.0);

        let same = vec![linalg::basis_vector(2, 1); 3];
        let m = QuantonDetectorModel::pure(amps, same).unwrap();
        assert!((path_distinguishability(&m).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        let (cval, dq) = duality_check_pure(&m).unwrap();
        assert!((cval - 2.0 / 3.0).abs() < 1e-12);
        assert!((dq - 1.0 / 3.0).abs() < 1e-12);

        let m = two_path_half_overlap();
        let rho_s = reduced_quanton(&m).unwrap();
        let cval = coherence::alpha_coherence(&rho_s, AlphaParam::HALF).unwrap();
        assert!((path_distinguishability(&m).unwrap() - (1.0 - cval)).abs() < 1e-12);
    }

    #[test]
    fn random_pure_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_model(&mut rng, 4, false).unwrap();
        let (cval, dq) = duality_check_pure(&m).unwrap();
        assert!((cval + dq - 1.0).abs() < 1e-9);
        assert!(duality_check_pure(&random_model(&mut rng, 3, true).unwrap()).is_err());
    }

    #[test]
    fn mixed_duality_examples() {
        // pure quanton given as a density matrix
        let amps = states::maximally_coherent_vector(4);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let dets: Vec<_> = (0..4)
            .map(|_| states::random_unit_vector(&mut rng, 4))
            .collect();
        let rho = DensityMatrix::from_pure(&amps).unwrap();
        let m = QuantonDetectorModel::mixed(rho, dets.clone()).unwrap();
        let (cval, dq) = duality_check_mixed(&m).unwrap();
        assert!((cval + dq - 1.0).abs() < 1e-9);

        let m =
            QuantonDetectorModel::mixed(DensityMatrix::maximally_mixed(4), dets.clone()).unwrap();
        let (cval, dq) = duality_check_mixed(&m).unwrap();
        assert_eq!(cval, 0.0);
        let e = PureEnsemble::uniform(dets.clone()).unwrap();
        let expected = discrimination::lsm(&e).unwrap().success_prob;
        assert!((dq - expected).abs() < 1e-12);
        assert!(cval + dq <= 1.0 + 1e-9);

        let rho = random_admissible_state(&mut rng, 4).unwrap();
        let m = QuantonDetectorModel::mixed(rho, dets).unwrap();
        let (cval, dq) = duality_check_mixed(&m).unwrap();
        assert!(cval + dq <= 1.0 + 1e-9);
    }

    #[test]
    fn mixed_duality_condition_failure() {
        // nearly pure but not pure, strong coherences on 4 paths
        let v = states::maximally_coherent_vector(4);
        let pure = ComplexMatrix::projector(&v);
        let mixed = &pure.scale_real(0.9) + &ComplexMatrix::identity(4).scale_real(0.025);
        let rho = states::validate_density(mixed).unwrap();
        let dets = (0..4).map(|i| linalg::basis_vector(4, i)).collect();
        let m = QuantonDetectorModel::mixed(rho, dets).unwrap();
        assert!(matches!(
            duality_check_mixed(&m),
            Err(Error::ConditionNotMet { .. })
        ));
    }

    #[test]
    fn two_path_channel_matches_printed_form() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.6, 0.3], vec![0.3, 0.4]]).unwrap();
        let rho = states::validate_density(m).unwrap();
        let ch = appendix_channel(&rho, 2).unwrap();
        assert_eq!(ch.kraus().len(), 3);
        let s = 0.3 / (0.6f64 * 0.4).sqrt();
        let k12 = &ch.kraus()[0];
        assert!((k12[(0, 0)] - c(s.sqrt())).norm() < 1e-15);
        assert!((k12[(1, 1)] - c(s.sqrt())).norm() < 1e-15);
        assert!((ch.kraus()[1][(0, 0)] - c((1.0 - s).sqrt())).norm() < 1e-15);
        assert!(ch.completeness_deviation() <= 1e-12);
    }

    #[test]
    fn channel_of_diagonal_state_is_identity_on_diagonals() {
        let rho =
            states::validate_density(ComplexMatrix::from_diag(&[0.2, 0.3, 0.1, 0.4])).unwrap();
        let ch = appendix_channel(&rho, 4).unwrap();
        for (idx, k) in ch.kraus().iter().take(6).enumerate() {
            assert!(k.frobenius_norm() == 0.0, "K_ij {idx} should vanish");
        }
        for (i, k) in ch.kraus().iter().skip(6).enumerate() {
            assert!(k.max_abs_diff(&ComplexMatrix::projector(&linalg::basis_vector(4, i))) < 1e-15);
        }
        let diag = ComplexMatrix::from_diag(&[0.7, 0.1, 0.1, 0.1]);
        assert!(ch.apply(&diag).unwrap().max_abs_diff(&diag) < 1e-15);
    }

    #[test]
    fn channel_maps_primed_to_reduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for d in [2, 3, 4, 5] {
            for _ in 0..5 {
                let rho = random_admissible_state(&mut rng, d).unwrap();
                let dets = (0..d)
                    .map(|_| states::random_unit_vector(&mut rng, d))
                    .collect();
                let m = QuantonDetectorModel::mixed(rho.clone(), dets).unwrap();
                let ch = appendix_channel(&rho, d).unwrap();
                let mapped = ch.apply(primed_quanton(&m).unwrap().matrix()).unwrap();
                let target = reduced_quanton(&m).unwrap();
                assert!(mapped.max_abs_diff(target.matrix()) < 1e-9, "d = {d}");
                let (a, b) = appendix_monotonicity_check(&m).unwrap();
                assert!(a <= b + 1e-9);
            }
        }
    }

    #[test]
    fn three_path_channel_has_five_operators_and_handles_ordering() {
        // |σ₂₃| largest so the canonical frame needs a relabeling
        let m = ComplexMatrix::from_rows(vec![
            vec![c(0.3), Complex64::new(0.02, 0.01), c(0.05)],
            vec![
                Complex64::new(0.02, -0.01),
                c(0.35),
                Complex64::new(0.1, 0.12),
            ],
            vec![c(0.05), Complex64::new(0.1, -0.12), c(0.35)],
        ])
        .unwrap();
        let rho = states::validate_density(m).unwrap();
        let ch = appendix_channel(&rho, 3).unwrap();
        assert_eq!(ch.kraus().len(), 5);
        let dets: Vec<_> = (0..3).map(|i| linalg::basis_vector(3, i)).collect();
        let g = vec![dets[0].clone(), dets[0].clone(), dets[0].clone()];
        let model = QuantonDetectorModel::mixed(rho, g).unwrap();
        let mapped = ch.apply(primed_quanton(&model).unwrap().matrix()).unwrap();
        assert!(mapped.max_abs_diff(reduced_quanton(&model).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn channel_errors() {
        let rho = states::validate_density(ComplexMatrix::from_diag(&[1.0, 0.0])).unwrap();
        assert!(matches!(
            appendix_channel(&rho, 2),
            Err(Error::ZeroDiagonal { index: 1 })
        ));
        let v = states::maximally_coherent_vector(4);
        let mixed = &ComplexMatrix::projector(&v).scale_real(0.9)
            + &ComplexMatrix::identity(4).scale_real(0.025);
        let rho = states::validate_density(mixed).unwrap();
        assert!(matches!(
            appendix_channel(&rho, 4),
            Err(Error::ConditionNotMet { .. })
        ));
        assert!(matches!(
            appendix_channel(&rho, 3),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn incoherent_channel_validation() {
        let not_incoherent =
            ComplexMatrix::from_real_rows(&[vec![FRAC_1_SQRT_2, 0.0], vec![FRAC_1_SQRT_2, 0.0]])
                .unwrap();
        assert!(matches!(
            IncoherentChannel::new(vec![not_incoherent]),
            Err(Error::NotIncoherent { index: 0 })
        ));
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(matches!(
            IncoherentChannel::new(vec![half]),
            Err(Error::IncompleteKraus { .. })
        ));
    }

    #[test]
    fn random_channels_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..=5 {
            let a = random_permutation_dephasing(&mut rng, d, 3).unwrap();
            let b = random_single_entry(&mut rng, d, 2).unwrap();
            let c = random_appendix_channel(&mut rng, d).unwrap();
            let rho = states::random_density_with(&mut rng, d, d).unwrap();
            for ch in [a, b, c] {
                let out = ch.apply_state(&rho).unwrap();
                assert_eq!(out.dim(), d);
            }
        }
    }

    #[test]
    fn symmetric_detector_overlaps() {
        let dets = symmetric_detectors(3, 0.4).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let g = linalg::inner(&dets[i], &dets[j]).re;
                let expected = if i == j { 1.0 } else { 0.4 };
                assert!((g - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn model_validation() {
        let dets = vec![linalg::basis_vector(2, 0)];
        assert!(QuantonDetectorModel::pure(vec![c(FRAC_1_SQRT_2); 2], dets).is_err());
        let dets = vec![linalg::basis_vector(2, 0); 2];
        assert!(QuantonDetectorModel::pure(vec![c(1.0), c(1.0)], dets).is_err());
    }
}
