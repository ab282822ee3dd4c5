//! Cross-checks against values computed here by routes that do not go
//! through the library's eigensolver or LSM construction.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coh::coherence::{self, AlphaParam, BlochVector};
use coh::discrimination;
use coh::linalg;
use coh::states::{self, DensityMatrix, PureEnsemble};

/// Eigen-decomposition of a 2×2 Hermitian matrix by the quadratic formula.
fn qubit_power(rho: &DensityMatrix, alpha: f64) -> [[Complex64; 2]; 2] {
    let m = rho.matrix();
    let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    let mean = (a + d) / 2.0;
    let r = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    let (l1, l2) = (mean + r, mean - r);
    let p = |x: f64| if x > 1e-14 { x.powf(alpha) } else { 0.0 };
    if r < 1e-15 {
        let v = Complex64::new(p(mean), 0.0);
        return [[v, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), v]];
    }
    // projector onto the top eigenvector is (ρ - l2 I) / (l1 - l2)
    let (f1, f2) = (p(l1), p(l2));
    let proj = |i: usize, j: usize| {
        let id = if i == j { 1.0 } else { 0.0 };
        (m[(i, j)] - Complex64::new(l2 * id, 0.0)) / (l1 - l2)
    };
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let id = if i == j { 1.0 } else { 0.0 };
            proj(i, j) * f1 + (Complex64::new(id, 0.0) - proj(i, j)) * f2
        })
    })
}

#[test]
fn qubit_alpha_coherence_from_quadratic_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..200 {
        let rho = states::random_density_with(&mut rng, 2, 2).unwrap();
        let alpha = rng.random_range(0.05..0.95);
        let p = qubit_power(&rho, alpha);
        let expected = 1.0 - p[0][0].re.powf(1.0 / alpha) - p[1][1].re.powf(1.0 / alpha);
        let got = coherence::alpha_coherence(&rho, AlphaParam::new(alpha).unwrap()).unwrap();
        assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
    }
}

#[test]
fn classical_affinity_on_diagonal_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..50 {
        let f = states::random_incoherent(&mut rng, 4);
        let g = states::random_incoherent(&mut rng, 4);
        let alpha = rng.random_range(0.05..0.95);
        let expected: f64 = f
            .diag()
            .iter()
            .zip(g.diag())
            .map(|(x, y)| x.powf(alpha) * y.powf(1.0 - alpha))
            .sum();
        let got = coherence::alpha_affinity(
            &f.to_density(),
            &g.to_density(),
            AlphaParam::new(alpha).unwrap(),
        )
        .unwrap();
        assert!((got - expected).abs() < 1e-12);
    }
}

#[test]
fn helstrom_pure_pair_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..100 {
        let e = states::random_ensemble(&mut rng, 3, 2, false).unwrap();
        let (p, s) = (
            e.probs(),
            linalg::inner(&e.states()[0], &e.states()[1]).norm_sqr(),
        );
        let expected = 0.5 * (1.0 - (1.0 - 4.0 * p[0] * p[1] * s).sqrt());
        let got = discrimination::helstrom_two_state(&e).unwrap().error_prob;
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }
}

#[test]
fn lsm_is_optimal_for_equiprobable_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..100 {
        let mut e = states::random_ensemble(&mut rng, 3, 2, false).unwrap();
        e = PureEnsemble::uniform(e.states().to_vec()).unwrap();
        let s = linalg::inner(&e.states()[0], &e.states()[1]).norm_sqr();
        let expected = 0.5 * (1.0 - (1.0 - s).sqrt());
        assert!((discrimination::lsm(&e).unwrap().error_prob - expected).abs() < 1e-12);
    }
}

fn tensor_power(v: &[Complex64], n: u32) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect();
    }
    out
}

#[test]
fn multicopy_matches_explicit_tensor_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for members in [2, 3] {
        for _ in 0..5 {
            let e = states::random_ensemble(&mut rng, 2, members, false).unwrap();
            for n in 1..=3 {
                let copies: Vec<_> = e.states().iter().map(|v| tensor_power(v, n)).collect();
                let explicit = PureEnsemble::new(e.probs().to_vec(), copies).unwrap();
                let direct = discrimination::lsm(&explicit).unwrap().error_prob;
                let via_gram = discrimination::multicopy_lsm_error(&e, n).unwrap();
                assert!(
                    (direct - via_gram).abs() < 1e-9,
                    "n={n}: {direct} vs {via_gram}"
                );
            }
        }
    }
}

/// `max_t F(ρ, diag(t, 1-t))²` by dense scan plus ternary-search refinement.
fn brute_force_fidelity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let (a, d, b2) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)].norm_sqr());
    // F = Tr √(√σ ρ √σ); for 2×2 with eigenvalues μ±, Tr√ = √(tr + 2√det)
    let f = |t: f64| {
        let tr = t * a + (1.0 - t) * d;
        let det = t * (1.0 - t) * (a * d - b2);
        (tr + 2.0 * det.max(0.0).sqrt()).max(0.0)
    };
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..=10_000 {
        let t = k as f64 / 10_000.0;
        if f(t) > best.1 {
            best = (t, f(t));
        }
    }
    let (mut lo, mut hi) = ((best.0 - 1e-4).max(0.0), (best.0 + 1e-4).min(1.0));
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    f((lo + hi) / 2.0).max(best.1)
}

#[test]
fn geometric_coherence_against_fidelity_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..100 {
        let rho = states::random_density_with(&mut rng, 2, 2).unwrap();
        let cg = coherence::geometric_coherence_qubit(&BlochVector::from_density(&rho).unwrap())
            .unwrap();
        assert!((cg - (1.0 - brute_force_fidelity(&rho))).abs() < 1e-10);
    }
}

#[test]
fn qcb_dominates_a_fine_alpha_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for d in 2..=4 {
        let rho = states::random_density_with(&mut rng, d, d).unwrap();
        let qcb = coherence::qcb_coherence(&rho).unwrap();
        let grid_max = (0..=10_000)
            .map(|k| {
                let a = 0.001 + 0.998 * k as f64 / 10_000.0;
                coherence::alpha_coherence(&rho, AlphaParam::new(a).unwrap()).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(qcb >= grid_max - 1e-12, "{qcb} < {grid_max}");
        assert!(qcb <= grid_max + 1e-6);
    }
}
