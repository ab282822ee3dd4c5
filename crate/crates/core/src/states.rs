//! Validated states, pure-state ensembles and the two maps between them:
//! the coherence ensemble of a state and the QSD-state (weighted Gram matrix)
//! of an ensemble.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, eig_hermitian, ComplexMatrix, Spectrum, ZERO};

pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Ensemble members with probability at or below this are dropped.
pub const ZERO_PROB: f64 = 1e-12;

/// A Hermitian, positive semidefinite, unit-trace matrix in the computational basis.
///
/// The spectrum is computed on first use and cached.
#[derive(Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: OnceLock<Spectrum>,
}

impl Clone for DensityMatrix {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            matrix: self.matrix.clone(),
            spectrum,
        }
    }
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = eig_hermitian(&self.matrix)?;
        Ok(self.spectrum.get_or_init(|| s))
    }

    /// `ρ^α` from the cached spectrum.
    pub fn power(&self, alpha: f64) -> Result<ComplexMatrix> {
        self.spectrum()?.power(alpha)
    }

    /// `⟨i|ρ^α|i⟩` for every `i`.
    pub fn power_diagonal(&self, alpha: f64) -> Result<Vec<f64>> {
        self.spectrum()?.power_diagonal(alpha)
    }

    pub fn sqrt(&self) -> Result<ComplexMatrix> {
        self.power(0.5)
    }

    /// Populations `⟨i|ρ|i⟩`.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.real_diagonal()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_incoherent(&self, tol: f64) -> bool {
        self.matrix.off_diagonal_l1() <= tol
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::trusted(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        linalg::check_unit(psi)?;
        validate_density(ComplexMatrix::projector(psi))
    }

    pub fn from_incoherent(sigma: &IncoherentState) -> Self {
        Self::trusted(ComplexMatrix::from_diag(&sigma.diag))
    }

    /// Completely dephased copy.
    pub fn dephased(&self) -> Self {
        Self::trusted(self.matrix.dephased())
    }

    /// `p ρ ⊕ (1 - p) σ`.
    pub fn direct_sum(&self, other: &DensityMatrix, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadParam(format!("mixing weight {p} outside [0, 1]")));
        }
        let m = self
            .matrix
            .scale_real(p)
            .direct_sum(&other.matrix.scale_real(1.0 - p));
        validate_density(m)
    }

    /// `Σ_k w_k ρ_k`.
    pub fn mixture(states: &[&DensityMatrix], weights: &[f64]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if states.len() != weights.len() {
            return Err(Error::CountMismatch {
                expected: states.len(),
                found: weights.len(),
            });
        }
        linalg::check_weights(weights)?;
        let dim = states[0].dim();
        let mut m = ComplexMatrix::zeros(dim);
        for (s, &w) in states.iter().zip(weights) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            m = &m + &s.matrix.scale_real(w);
        }
        validate_density(m)
    }

    /// Wraps a matrix known to be valid by construction.
    pub(crate) fn trusted(matrix: ComplexMatrix) -> Self {
        Self {
            matrix,
            spectrum: OnceLock::new(),
        }
    }
}

/// Checks Hermiticity, unit trace and positivity, in that order.
pub fn validate_density(m: ComplexMatrix) -> Result<DensityMatrix> {
    let deviation = m.hermiticity_deviation();
    if !deviation.is_finite() || deviation > linalg::HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = m.trace().re;
    if !trace.is_finite() || (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceNotOne { trace });
    }
    if !shifted_cholesky_ok(&m, POSITIVITY_TOL) {
        let min_eigenvalue = eig_hermitian(&m)?.min_eigenvalue();
        if min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
    }
    Ok(DensityMatrix::trusted(m))
}

/// Cholesky factorization of `m + shift·I`; succeeds iff that matrix is
/// numerically positive definite. Avoids a full eigendecomposition on the
/// common valid path.
fn shifted_cholesky_ok(m: &ComplexMatrix, shift: f64) -> bool {
    let n = m.dim();
    let mut l = ComplexMatrix::zeros(n);
    for j in 0..n {
        let mut d = m[(j, j)].re + shift;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    true
}

/// A diagonal state `Σ λ_i |i⟩⟨i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentState {
    diag: Vec<f64>,
}

impl IncoherentState {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::BadWeights("empty probability vector".into()));
        }
        linalg::check_weights(&diag)?;
        Ok(Self { diag })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_incoherent(self)
    }
}

/// Pure states `|ψ_i⟩` with prior probabilities `η_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureEnsemble {
    probs: Vec<f64>,
    states: Vec<Vec<Complex64>>,
}

impl PureEnsemble {
    pub fn new(probs: Vec<f64>, states: Vec<Vec<Complex64>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if probs.len() != states.len() {
            return Err(Error::CountMismatch {
                expected: states.len(),
                found: probs.len(),
            });
        }
        let dim = states[0].len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for s in &states {
            if s.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.len(),
                });
            }
            linalg::check_unit(s)?;
        }
        linalg::check_weights(&probs)?;
        Ok(Self { probs, states })
    }

    /// Equal priors.
    pub fn uniform(states: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(vec![1.0 / n as f64; states.len()], states)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[Vec<Complex64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Dimension of the state vectors.
    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    /// Drops members with `η_i ≤ ZERO_PROB`.
    pub fn without_null_members(&self) -> Result<Self> {
        let (probs, states): (Vec<f64>, Vec<Vec<Complex64>>) = self
            .probs
            .iter()
            .zip(&self.states)
            .filter(|(p, _)| **p > ZERO_PROB)
            .map(|(p, s)| (*p, s.clone()))
            .unzip();
        if states.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        Ok(Self { probs, states })
    }

    /// `ρ_out = Σ η_i |ψ_i⟩⟨ψ_i|`.
    pub fn average_state(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim());
        for (p, s) in self.probs.iter().zip(&self.states) {
            m = &m + &ComplexMatrix::projector(s).scale_real(*p);
        }
        m
    }

    /// Unweighted Gram matrix `⟨ψ_i|ψ_j⟩`.
    pub fn overlaps(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, |i, j| linalg::inner(&self.states[i], &self.states[j]))
    }
}

/// The ensemble `{η_i = ⟨i|ρ|i⟩, |ψ_i⟩ = η_i^{-1/2} √ρ |i⟩}` whose average is `ρ`.
///
/// Members with `η_i ≤ ZERO_PROB` are dropped; their vectors vanish.
pub fn coherence_ensemble(rho: &DensityMatrix) -> Result<PureEnsemble> {
    let root = rho.sqrt()?;
    let pops = rho.populations();
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for (i, &eta) in pops.iter().enumerate() {
        if eta <= ZERO_PROB {
            continue;
        }
        let mut v = root.column(i);
        let nv = linalg::norm(&v);
        if nv == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= nv);
        probs.push(eta);
        states.push(v);
    }
    if states.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    Ok(PureEnsemble { probs, states })
}

/// The QSD-state `M_ij = √(η_i η_j) ⟨ψ_i|ψ_j⟩` of an ensemble.
pub fn qsd_state(e: &PureEnsemble) -> Result<DensityMatrix> {
    validate_density(linalg::gram_matrix(&e.states, &e.probs)?)
}

/// `p |ψ_d⟩⟨ψ_d| + (1 - p) I/d` with `|ψ_d⟩` the uniform superposition.
pub fn maximally_coherent_mixed(d: usize, p: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::BadParam(format!("dimension {d} < 2")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParam(format!("p = {p} outside [0, 1]")));
    }
    let df = d as f64;
    Ok(DensityMatrix::trusted(ComplexMatrix::from_fn(d, |i, j| {
        let v = if i == j { 1.0 / df } else { p / df };
        Complex64::new(v, 0.0)
    })))
}

/// Uniform superposition `Σ_i |i⟩ / √d`.
pub fn maximally_coherent_vector(d: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0 / (d as f64).sqrt(), 0.0); d]
}

/// Seeded random state of the given rank: `G G† / Tr(G G†)` with `G` a
/// `dim × rank` complex Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_with(&mut rng, dim, rank)
}

pub fn random_density_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::BadRank { dim, rank });
    }
    let g: Vec<Vec<Complex64>> = (0..rank).map(|_| gaussian_vector(rng, dim)).collect();
    let mut m = ComplexMatrix::zeros(dim);
    for col in &g {
        m = &m + &ComplexMatrix::projector(col);
    }
    let tr = m.trace().re;
    Ok(DensityMatrix::trusted(m.scale_real(1.0 / tr)))
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-random unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let mut v = gaussian_vector(rng, dim);
        let nv = linalg::norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|z| *z /= nv);
            return v;
        }
    }
}

/// Uniform point on the probability simplex.
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Random incoherent state.
pub fn random_incoherent<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> IncoherentState {
    IncoherentState {
        diag: random_probabilities(rng, dim),
    }
}

/// Haar-random unitary (QR of a complex Gaussian matrix via Gram–Schmidt).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = gaussian_vector(rng, dim);
        for _ in 0..2 {
            for c in &cols {
                let proj = linalg::inner(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let nv = linalg::norm(&v);
        if nv > 1e-6 {
            v.iter_mut().for_each(|z| *z /= nv);
            cols.push(v);
        }
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Random ensemble of `members` states in `dim` dimensions.
///
/// With `independent`, resamples until the unweighted Gram matrix has minimum
/// eigenvalue at least `1e-8`.
pub fn random_ensemble<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    members: usize,
    independent: bool,
) -> Result<PureEnsemble> {
    if members == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if independent && members > dim {
        return Err(Error::BadParam(format!(
            "{members} vectors cannot be independent in dimension {dim}"
        )));
    }
    loop {
        let states: Vec<_> = (0..members).map(|_| random_unit_vector(rng, dim)).collect();
        let probs = random_probabilities(rng, members);
        let e = PureEnsemble { probs, states };
        if !independent || eig_hermitian(&e.overlaps())?.min_eigenvalue() >= 1e-8 {
            return Ok(e);
        }
    }
}

/// Zero vector of the given length.
pub fn zero_vector(dim: usize) -> Vec<Complex64> {
    vec![ZERO; dim]
}
