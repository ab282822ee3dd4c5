//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything here works on [`ComplexMatrix`], a square row-major matrix of
//! `Complex64`. The eigensolver is a cyclic complex Jacobi iteration, which is
//! accurate to a few ulps of `‖A‖` at the sizes this crate deals with
//! (d ≲ 64). Matrix functions (fractional powers, pseudo-inverse square roots)
//! are built on top of the resulting [`Spectrum`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|a_ij - conj(a_ji)|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Eigenvalues below this (absolute) are an error for PSD-only operations.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-8;
/// Relative threshold below which eigenvalues are treated as exactly zero
/// when raising to a power.
pub const ZERO_CLAMP_REL: f64 = 1e-13;
/// Relative support threshold used by [`pinv_sqrt`].
pub const SUPPORT_REL: f64 = 1e-10;

const JACOBI_REL_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from rows; fails unless the rows form a non-empty square.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        assert_eq!(v.len(), w.len());
        Self::from_fn(v.len(), |i, j| v[i] * w[j].conj())
    }

    /// `|v⟩⟨v|`
    pub fn projector(v: &[Complex64]) -> Self {
        Self::outer(v, v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// Real parts of the diagonal.
    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        check_same_dim(self, other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_same_dim(self, other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect())
    }

    /// `U A U†`
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n + m);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..m {
            for j in 0..m {
                out[(n + i, n + j)] = other[(i, j)];
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |r, c| self[(r / m, c / m)] * other[(r % m, c % m)])
    }

    /// Trace over the second factor of a `da·db` dimensional operator.
    pub fn partial_trace_second(&self, da: usize, db: usize) -> Result<Self> {
        if da * db != self.dim {
            return Err(Error::DimensionMismatch {
                expected: da * db,
                found: self.dim,
            });
        }
        Ok(Self::from_fn(da, |i, j| {
            (0..db).map(|k| self[(i * db + k, j * db + k)]).sum()
        }))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_ij - conj(a_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Sum of moduli of the off-diagonal entries.
    pub fn off_diagonal_l1(&self) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self[(i, j)].norm();
                }
            }
        }
        s
    }

    /// The diagonal part of the matrix (complete dephasing).
    pub fn dephased(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            out[(i, i)] = self[(i, i)];
        }
        out
    }

    /// Relabel the basis: `out[(i, j)] = self[(perm[i], perm[j])]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        Self::from_fn(self.dim, |i, j| self[(perm[i], perm[j])])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(())
}

/// `⟨v|w⟩`, conjugate-linear in the first argument.
pub fn inner(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Computational basis vector `|i⟩` in dimension `dim`.
pub fn basis_vector(dim: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    v[i] = ONE;
    v
}

/// Eigendecomposition `A = U diag(λ) U†` of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `Σ_k f(λ_k) |u_k⟩⟨u_k|`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = ZERO;
                for (k, &w) in weights.iter().enumerate() {
                    if w != 0.0 {
                        s += u[(i, k)] * u[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = s;
                out[(j, i)] = s.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    /// Diagonal of `Σ_k f(λ_k) |u_k⟩⟨u_k|` without forming the matrix.
    pub fn map_diagonal(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.dim();
        let u = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        (0..n)
            .map(|i| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| w * u[(i, k)].norm_sqr())
                    .sum()
            })
            .collect()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }

    /// Rejects eigenvalues below `-NEGATIVE_EIGENVALUE_TOL`.
    pub fn check_psd(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -NEGATIVE_EIGENVALUE_TOL {
            return Err(Error::NegativeEigenvalue { eigenvalue: min });
        }
        Ok(())
    }

    /// `λ^α` on eigenvalues above the zero clamp, `0` elsewhere.
    pub fn power(&self, alpha: f64) -> Result<ComplexMatrix> {
        self.check_psd()?;
        let cut = ZERO_CLAMP_REL * self.max_eigenvalue().max(0.0);
        Ok(self.map(|l| clamped_power(l, alpha, cut)))
    }

    /// Diagonal of [`Spectrum::power`].
    pub fn power_diagonal(&self, alpha: f64) -> Result<Vec<f64>> {
        self.check_psd()?;
        let cut = ZERO_CLAMP_REL * self.max_eigenvalue().max(0.0);
        Ok(self.map_diagonal(|l| clamped_power(l, alpha, cut)))
    }

    /// Pseudo-inverse square root over the support `λ > SUPPORT_REL · λ_max`.
    pub fn pinv_sqrt(&self) -> Result<ComplexMatrix> {
        self.check_psd()?;
        let tau = SUPPORT_REL * self.max_eigenvalue().max(0.0);
        Ok(self.map(|l| if l > tau { l.powf(-0.5) } else { 0.0 }))
    }

    /// Orthogonal projector onto the same support used by [`Spectrum::pinv_sqrt`].
    pub fn support_projector(&self) -> ComplexMatrix {
        let tau = SUPPORT_REL * self.max_eigenvalue().max(0.0);
        self.map(|l| if l > tau { 1.0 } else { 0.0 })
    }

    pub fn rank(&self) -> usize {
        let tau = SUPPORT_REL * self.max_eigenvalue().max(0.0);
        self.eigenvalues.iter().filter(|&&l| l > tau).count()
    }
}

fn clamped_power(l: f64, alpha: f64, cut: f64) -> f64 {
    if l <= cut {
        0.0
    } else {
        l.powf(alpha)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending; eigenvectors are the columns of a unitary.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<Spectrum> {
    let deviation = a.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.dim();
    // work on the exactly Hermitian part
    let mut m = ComplexMatrix::from_fn(n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);

    let total = m.frobenius_norm();
    let target = JACOBI_REL_TOL * total;
    let mut converged = n == 1 || total == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > target {
        return Err(Error::NoConvergence { sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi step zeroing `m[(p, q)]`; accumulates the rotation into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = m.dim();
    // phase that makes the pivot real: e^{-iφ}
    let phase = apq.conj() / r;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] acting on the (p, q) plane; M <- G† M G
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c - mkq * phase * s;
        m[(k, q)] = mkp * s + mkq * phase * c;
    }
    let phase_c = phase.conj();
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c - mqk * phase_c * s;
        m[(q, k)] = mpk * s + mqk * phase_c * c;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * phase * s;
        v[(k, q)] = vkp * s + vkq * phase * c;
    }
}

/// `A^α` for Hermitian PSD `A`, with `0^α := 0`.
pub fn mat_power(a: &ComplexMatrix, alpha: f64) -> Result<ComplexMatrix> {
    eig_hermitian(a)?.power(alpha)
}

/// Pseudo-inverse square root over the support of a Hermitian PSD matrix.
pub fn pinv_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    eig_hermitian(a)?.pinv_sqrt()
}

/// `Tr(a b) = Σ_ij a_ij b_ji`.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    check_same_dim(a, b)?;
    let n = a.dim();
    let mut s = ZERO;
    for i in 0..n {
        for j in 0..n {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(s)
}

/// Weighted Gram matrix `M_ij = √(w_i w_j) ⟨v_i|v_j⟩`.
pub fn gram_matrix(vectors: &[Vec<Complex64>], weights: &[f64]) -> Result<ComplexMatrix> {
    if vectors.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if vectors.len() != weights.len() {
        return Err(Error::CountMismatch {
            expected: vectors.len(),
            found: weights.len(),
        });
    }
    check_weights(weights)?;
    let dim = vectors[0].len();
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        check_unit(v)?;
    }
    Ok(unchecked_gram(vectors, weights, 1))
}

/// Gram matrix with every overlap raised to `power`; no validation.
pub(crate) fn unchecked_gram(
    vectors: &[Vec<Complex64>],
    weights: &[f64],
    power: u32,
) -> ComplexMatrix {
    let n = vectors.len();
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(weights[i], 0.0);
        for j in i + 1..n {
            let g = inner(&vectors[i], &vectors[j]).powu(power) * (weights[i] * weights[j]).sqrt();
            m[(i, j)] = g;
            m[(j, i)] = g.conj();
        }
    }
    m
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::BadWeights(format!(
            "weight {w} is negative or not finite"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadWeights(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    Ok(())
}

pub(crate) fn check_unit(v: &[Complex64]) -> Result<()> {
    let nv = norm(v);
    if !nv.is_finite() || (nv - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm: nv });
    }
    Ok(())
}
