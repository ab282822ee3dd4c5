//! Seeded randomized checks of every identity and inequality in the crate.
//!
//! Each suite runs `trials` independent trials. Trial `t` draws from a ChaCha8
//! stream keyed by `(seed, suite, t)`, so records do not depend on how rayon
//! schedules the work. A check reports a non-negative gap (zero when the
//! relation holds exactly); gaps above the suite tolerance are failures.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coherence::{self, AlphaParam, BlochVector};
use crate::discrimination;
use crate::duality::{self, QuantonDetectorModel};
use crate::error::{Error, Result};
use crate::states::{self, DensityMatrix, PureEnsemble};

pub const TOLERANCE_SCALE_ENV: &str = "COH_TOLERANCE_SCALE";

/// Multicopy ensembles reject pairs with `|⟨ψ_i|ψ_j⟩|` above this.
pub const MULTICOPY_MAX_OVERLAP: f64 = 0.9;
pub const MULTICOPY_MAX_COPIES: u32 = 50;
/// Upper bound on the LSM error at the largest copy number.
pub const MULTICOPY_FINAL_ERROR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Axioms,
    StateIdentity,
    EnsembleIdentity,
    Chains,
    Symmetric,
    Multicopy,
    Duality,
    KrausConstruction,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Axioms,
        Suite::StateIdentity,
        Suite::EnsembleIdentity,
        Suite::Chains,
        Suite::Symmetric,
        Suite::Multicopy,
        Suite::Duality,
        Suite::KrausConstruction,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::StateIdentity => "theorem2",
            Suite::EnsembleIdentity => "theorem4",
            Suite::Chains => "chains",
            Suite::Symmetric => "symmetric",
            Suite::Multicopy => "multicopy",
            Suite::Duality => "duality",
            Suite::KrausConstruction => "appendix",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.label() == s)
    }

    /// Unscaled tolerance on every gap in the suite.
    pub fn tolerance(self) -> f64 {
        match self {
            Suite::Axioms | Suite::Chains => 1e-10,
            Suite::Multicopy => 1e-12,
            _ => 1e-9,
        }
    }

    fn stream(self) -> u64 {
        Self::ALL.iter().position(|&s| s == self).unwrap() as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parses a suite name, with `all` expanding to every suite.
pub fn parse_suites(s: &str) -> Option<Vec<Suite>> {
    if s == "all" {
        Some(Suite::ALL.to_vec())
    } else {
        Suite::parse(s).map(|x| vec![x])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRecord {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub max_violation: f64,
    /// `(instance descriptor, gap)` for every gap above the tolerance.
    pub failures: Vec<(String, f64)>,
    /// Instances outside the hypotheses of the checked statement.
    pub unverified: usize,
}

impl VerificationRecord {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for VerificationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<10} seed {} trials {} max_violation {:.3e} tolerance {:.0e} failures {}",
            self.suite.label(),
            self.seed,
            self.trials,
            self.max_violation,
            self.tolerance,
            self.failures.len()
        )?;
        if self.unverified > 0 {
            write!(f, " unverified {}", self.unverified)?;
        }
        f.write_str(if self.passed() { " PASS" } else { " FAIL" })
    }
}

/// Value of `COH_TOLERANCE_SCALE`, or 1 when unset or unparsable.
pub fn tolerance_scale() -> f64 {
    std::env::var(TOLERANCE_SCALE_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|x| x.is_finite() && *x > 0.0)
        .unwrap_or(1.0)
}

/// The RNG for trial `t` of `suite`.
pub fn trial_rng(seed: u64, suite: Suite, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((suite.stream() << 32) | t as u64);
    rng
}

#[derive(Default)]
struct Trial {
    gaps: Vec<(String, f64)>,
    unverified: usize,
}

impl Trial {
    fn eq(&mut self, what: impl Into<String>, a: f64, b: f64) {
        self.gaps.push((what.into(), nan_as_inf((a - b).abs())));
    }

    /// Gap of `a ≤ b`.
    fn le(&mut self, what: impl Into<String>, a: f64, b: f64) {
        self.gaps.push((what.into(), nan_as_inf((a - b).max(0.0))));
    }
}

fn nan_as_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> VerificationRecord {
    let tolerance = suite.tolerance() * tolerance_scale();
    let outcomes: Vec<(usize, Trial)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, suite, t);
            let mut trial = Trial::default();
            if let Err(e) = run_trial(suite, t, &mut rng, &mut trial) {
                trial.gaps.push((format!("error: {e}"), f64::INFINITY));
            }
            (t, trial)
        })
        .collect();

    let mut max_violation: f64 = 0.0;
    let mut failures = Vec::new();
    let mut unverified = 0;
    for (t, trial) in outcomes {
        unverified += trial.unverified;
        for (what, gap) in trial.gaps {
            max_violation = max_violation.max(gap);
            if gap > tolerance {
                failures.push((format!("trial {t}: {what}"), gap));
            }
        }
    }
    VerificationRecord {
        suite,
        seed,
        trials,
        tolerance,
        max_violation,
        failures,
        unverified,
    }
}

pub fn run_suites(suites: &[Suite], seed: u64, trials: usize) -> Vec<VerificationRecord> {
    suites.iter().map(|&s| run_suite(s, seed, trials)).collect()
}

fn run_trial(suite: Suite, t: usize, rng: &mut ChaCha8Rng, out: &mut Trial) -> Result<()> {
    match suite {
        Suite::Axioms => axioms(t, rng, out),
        Suite::StateIdentity => state_identity(t, rng, out),
        Suite::EnsembleIdentity => ensemble_identity(t, rng, out),
        Suite::Chains => chains(rng, out),
        Suite::Symmetric => symmetric(t, rng, out),
        Suite::Multicopy => multicopy(t, rng, out),
        Suite::Duality => duality_sum(t, rng, out),
        Suite::KrausConstruction => appendix(t, rng, out),
    }
}

/// Random state of uniformly chosen rank.
fn random_state<R: Rng>(rng: &mut R, d: usize) -> Result<DensityMatrix> {
    let rank = rng.random_range(1..=d);
    states::random_density_with(rng, d, rank)
}

const ALPHA_GRID: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

fn axioms(t: usize, rng: &mut ChaCha8Rng, out: &mut Trial) -> Result<()> {
    let d = 2 + t % 4;
    let a = AlphaParam::new(ALPHA_GRID[t % ALPHA_GRID.len()])?;
    let alpha = a.get();
    let rho = random_state(rng, d)?;
    let sigma = states::random_density_with(rng, d, d)?;

    // boundedness
    let aff = coherence::alpha_affinity(&rho, &sigma, a)?;
    out.le("affinity >= 0", -aff, 0.0);
    out.le("affinity <= 1", aff, 1.0);
    out.eq(
        "affinity of equal states",
        coherence::alpha_affinity(&rho, &rho, a)?,
        1.0,
    );
    let distance = (rho.matrix() - sigma.matrix()).frobenius_norm();
    if distance > 1e-8 && aff >= 1.0 {
        out.le("affinity 1 for distinct states", distance, 0.0);
    }

    // joint concavity
    let rho2 = states::random_density_with(rng, d, d)?;
    let sigma2 = random_state(rng, d)?;
    let p: f64 = rng.random();
    let mixed_rho = DensityMatrix::mixture(&[&rho, &rho2], &[p, 1.0 - p])?;
    let mixed_sigma = DensityMatrix::mixture(&[&sigma, &sigma2], &[p, 1.0 - p])?;
    let lhs = coherence::alpha_affinity(&mixed_rho, &mixed_sigma, a)?;
    let rhs = p * aff + (1.0 - p) * coherence::alpha_affinity(&rho2, &sigma2, a)?;
    out.le("joint concavity", rhs, lhs);

    // data processing
    let dephased = coherence::alpha_affinity(&rho.dephased(), &sigma.dephased(), a)?;
    out.le("dephasing", aff, dephased);
    let u = states::random_unitary(rng, d);
    let rotated = coherence::alpha_affinity(
        &states::validate_density(rho.matrix().conjugate_by(&u)?)?,
        &states::validate_density(sigma.matrix().conjugate_by(&u)?)?,
        a,
    )?;
    out.le("unitary conjugation", aff, rotated);
    let db = 2 + t % 2;
    let rho_ab = random_state(rng, 2 * db)?;
    let sigma_ab = states::random_density_with(rng, 2 * db, 2 * db)?;
    let joint = coherence::alpha_affinity(&rho_ab, &sigma_ab, a)?;
    let reduced = coherence::alpha_affinity(
        &states::validate_density(rho_ab.matrix().partial_trace_second(2, db)?)?,
        &states::validate_density(sigma_ab.matrix().partial_trace_second(2, db)?)?,
        a,
    )?;
    out.le("partial trace", joint, reduced);

    // faithfulness
    let report = coherence::alpha_affinity_coherence(&rho, a)?;
    let c = report.value;
    out.eq(
        "coherence of dephased state",
        coherence::alpha_coherence(&rho.dephased(), a)?,
        0.0,
    );
    if rho.matrix().off_diagonal_l1() > 1e-8 && c <= 0.0 {
        out.le(
            "zero coherence with off-diagonal mass",
            rho.matrix().off_diagonal_l1(),
            0.0,
        );
    }

    // monotonicity under incoherent channels
    let channel = match t % 3 {
        0 => duality::random_permutation_dephasing(rng, d, 1 + t % 4)?,
        1 => duality::random_single_entry(rng, d, 1 + t % 3)?,
        _ => duality::random_appendix_channel(rng, d)?,
    };
    let image = channel.apply_state(&rho)?;
    for x in [0.25, 0.5, 0.75] {
        let b = AlphaParam::new(x)?;
        out.le(
            format!("monotonicity alpha={x}"),
            coherence::alpha_coherence(&image, b)?,
            coherence::alpha_coherence(&rho, b)?,
        );
    }

    // closest incoherent state
    let closest = report
        .closest_incoherent
        .as_ref()
        .ok_or(Error::ZeroDiagonal { index: 0 })?;
    let best = coherence::alpha_affinity_incoherent(&rho, closest, a)?.powf(1.0 / alpha);
    out.eq("closed form vs closest state", 1.0 - best, c);
    for _ in 0..20 {
        let s = states::random_incoherent(rng, d);
        let v = coherence::alpha_affinity_incoherent(&rho, &s, a)?.powf(1.0 / alpha);
        out.le("closest state optimality", v, best);
    }

    // pure states
    let psi = states::random_unit_vector(rng, d);
    let projector = DensityMatrix::from_pure(&psi)?;
    out.eq(
        "pure-state formula",
        coherence::pure_state_coherence(&psi, a)?,
        coherence::alpha_coherence(&projector, a)?,
    );
    let mut previous = f64::INFINITY;
    for k in 1..20 {
        let v = coherence::pure_state_coherence(&psi, AlphaParam::new(0.05 * k as f64)?)?;
        out.le("pure coherence non-increasing in alpha", v, previous);
        previous = v;
    }

    // qubit closed form
    let qubit = random_state(rng, 2)?;
    out.eq(
        "qubit closed form",
        coherence::qubit_alpha_affinity_coherence(&BlochVector::from_density(&qubit)?, a)?,
        coherence::alpha_coherence(&qubit, a)?,
    );

    // block-diagonal additivity
    let other = states::random_density_with(rng, 1 + t % 3, 1)?;
    let (joint, split) = coherence::block_diag_coherence_check(&rho, &other, p, a)?;
    out.eq("block-diagonal additivity", joint, split);

    // Chernoff-bound coherence dominates every α
    out.le("qcb >= alpha coherence", c, coherence::qcb_coherence(&rho)?);
    Ok(())
}

fn state_identity(t: usize, rng: &mut ChaCha8Rng, out: &mut Trial) -> Result<()> {
    let d = 2 + t % 5;
    let rho = random_state(rng, d)?;
    let (c, pe) = discrimination::state_lsm_identity(&rho)?;
    out.eq(format!("C_a^(1/2) = P_E^lsm, d={d}"), c, pe);
    Ok(())
}

fn ensemble_identity(t: usize, rng: &mut ChaCha8Rng, out: &mut Trial) -> Result<()> {
    let d = 2 + t % 5;
    let members = rng.random_range(2..=d);
    let e = states::random_ensemble(rng, d, members, true)?;
    let (pe, c) = discrimination::ensemble_lsm_identity(&e)?;
    out.eq(format!("P_E^lsm = C_a^(1/2)(M), d={d} n={members}"), pe, c);

    let pair = states::random_ensemble(rng, d, 2, true)?;
    let opt = discrimination::helstrom_two_state(&pair)?;
    let lsm = discrimination::lsm(&pair)?;
    out.le(
        "P_S^opt <= sqrt(P_S^lsm)",
        opt.success_prob,
        lsm.success_prob.sqrt(),
    );
    out.le("P_E^lsm <= 2 P_E^opt", lsm.error_prob, 2.0 * opt.error_prob);
    let c = BlochVector::from_density(&states::qsd_state(&pair)?)?;
    let (a2, f2, _) = discrimination::qubit_lsm_optimality(&c)?;
    out.eq("qubit closed form for P_S^lsm", a2, lsm.success_prob);
    out.eq("qubit closed form for P_S^opt", f2, opt.success_prob);
    Ok(())
}

fn chains(rng: &mut ChaCha8Rng, out: &mut Trial) -> Result<()> {
    let rho = states::random_density_with(rng, 2, 2)?;
    let l1 = coherence::l1_coherence(&rho);
    let cg = coherence::geometric_coherence_qubit(&BlochVector::from_density(&rho)?)?;
    let ca = coherence::alpha_coherence(&rho, AlphaParam::HALF)?;
    let aff = coherence::affinity_coherence(&rho)?.value;
    out.le("2 C_l1 >= 2 C_g", 2.0 * cg, 2.0 * l1);
    out.le("2 C_g >= C_a^(1/2)", ca, 2.0 * cg);
    out.le("C_a^(1/2) >= C_g", cg, ca);
    out.le("C_g >= affinity coherence", aff, cg);
    Ok(())
}

fn symmetric(t: usize, rng: &mut ChaCha8Rng, out: &mut Trial) -> Result<()> {
    let d = 2 + t % 5;
    let p = if t < 50 {
        0.1 * ((t / 5) % 10) as f64
    } else {
        rng.random_range(0.0..0.99)
    };
    let closed = discrimination::symmetric_success_closed_form(d, p)?;
    let e = discrimination::symmetric_ensemble(d, p)?;
    let lsm = discrimination::lsm(&e)?;
    out.eq(
        format!("symmetric LSM, d={d} p={p:.3}"),
        lsm.success_prob,
        closed,
    );
    if d == 2 {
        out.eq(
            "symmetric Helstrom",
            discrimination::helstrom_two_state(&e)?.success_prob,
            closed,
        );
    }
    let rho_m = states::maximally_coherent_mixed(d, p)?;
    out.eq(
        "geometric = C_a^(1/2) on maximally coherent mixed",
        coherence::geometric_coherence_mcms(d, p)?,
        coherence::alpha_coherence(&rho_m, AlphaParam::HALF)?,
    );
    out.eq(
        "success = 1 - C_g",
        closed,
        1.0 - coherence::geometric_coherence_mcms(d, p)?,
    );
    Ok(())
}

/// Random ensemble with every pairwise overlap modulus at most `max_overlap`.
pub fn random_distinct_ensemble<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    members: usize,
    max_overlap: f64,
) -> Result<PureEnsemble> {
    loop {
        let e = states::random_ensemble(rng, dim, members, false)?;
        let g = e.overlaps();
        let ok = (0..members).all(|i| (i + 1..members).all(|j| g[(i, j)].norm() <= max_overlap));
        if ok {
            return Ok(e);
        }
    }
}

/// LSM errors for `1..=max_n` copies.
pub fn multicopy_errors(e: &PureEnsemble, max_n: u32) -> Result<Vec<f64>> {
    (1..=max_n)
        .map(|n| discrimination::multicopy_lsm_error(e, n))
        .collect()
}

fn multicopy(t: usize, rng: &mut ChaCha8Rng, out: &mut Trial) -> Result<()> {
    let members = 2 + t % 2;
    let e = random_distinct_ensemble(rng, 4, members, MULTICOPY_MAX_OVERLAP)?;
    let errors = multicopy_errors(&e, MULTICOPY_MAX_COPIES)?;
    for (n, w) in errors.windows(2).enumerate() {
        out.le(format!("P_E({}) <= P_E({})", n + 2, n + 1), w[1], w[0]);
    }
    out.le(
        format!("P_E({MULTICOPY_MAX_COPIES}) < {MULTICOPY_FINAL_ERROR:e}"),
        errors[errors.len() - 1],
        MULTICOPY_FINAL_ERROR,
    );
    Ok(())
}

fn duality_sum(t: usize, rng: &mut ChaCha8Rng, out: &mut Trial) -> Result<()> {
    let d = 2 + t % 5;
    let pure = duality::random_model(rng, d, false)?;
    let (c, dq) = duality::duality_check_pure(&pure)?;
    out.eq(format!("C + D_q = 1, d={d}"), c + dq, 1.0);

    let mixed = if t.is_multiple_of(2) {
        duality::random_model(rng, d, true)?
    } else {
        let rho = duality::random_admissible_state(rng, d)?;
        let detectors = (0..d).map(|_| states::random_unit_vector(rng, d)).collect();
        QuantonDetectorModel::mixed(rho, detectors)?
    };
    match duality::duality_check_mixed(&mixed) {
        Ok((c, dq)) => out.le(format!("C + D_q <= 1, d={d}"), c + dq, 1.0),
        Err(Error::ConditionNotMet { .. }) => out.unverified += 1,
        Err(e) => return Err(e),
    }
    Ok(())
}

fn appendix(t: usize, rng: &mut ChaCha8Rng, out: &mut Trial) -> Result<()> {
    let d = 2 + t % 4;
    let rho = duality::random_admissible_state(rng, d)?;
    let detectors = (0..d).map(|_| states::random_unit_vector(rng, d)).collect();
    let model = QuantonDetectorModel::mixed(rho.clone(), detectors)?;
    let channel = duality::appendix_channel(&rho, d)?;
    out.le("Kraus completeness", channel.completeness_deviation(), 0.0);
    let mapped = channel.apply(duality::primed_quanton(&model)?.matrix())?;
    let target = duality::reduced_quanton(&model)?;
    out.eq(
        format!("channel maps primed to reduced, d={d}"),
        mapped.max_abs_diff(target.matrix()),
        0.0,
    );
    let (c, c_primed) = duality::appendix_monotonicity_check(&model)?;
    out.le("C(rho_s) <= C(rho'_s)", c, c_primed);
    Ok(())
}
