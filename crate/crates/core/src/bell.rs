//! CHSH Bell witnesses built from effective observables.
//!
//! For settings `(n, m, n', m')`, with `n, n'` on side A and `m, m'` on
//! side B, the witness is
//!
//! ```text
//! B = O_n ⊗ (O_m - O_m') + O_n' ⊗ (O_m + O_m')
//! ```
//!
//! Local realism bounds `Tr(B rho)` by `±2`, and the extremal eigenvalues of
//! `B` bound every quantum state. Settings carry their own detection times,
//! so decay enters through the effective observables.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::basis::{cp_basis_data, Quasispin};
use crate::effective::{bipartite_expectation, effective_operator, effective_operator_cp, ObservableMatrix};
use crate::error::{Error, Result};
use crate::evolution::DensityMatrix;
use crate::linalg::{cr, hermitian_eigen, inner, kron, outer, CMatrix, CVector};
use crate::params::MesonParams;

/// Local-realistic bound.
pub const CLASSICAL_BOUND: f64 = 2.0;
/// Quantum bound for unit-length observables.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;
/// Default seed of the random-state oracle.
pub const DEFAULT_SEED: u64 = 0xB311;

const VIOLATION_TOL: f64 = 1e-9;
const DEGENERATE_GAP: f64 = 1e-12;

/// How one scan parameter `t` is distributed over `(t_n, t_m, t_n', t_m')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimePolicy {
    /// `(t, t, t, t)`
    AllEqual,
    /// `(0, t, t, 0)`
    Alternating1,
    /// `(t, 0, 0, t)`
    Alternating2,
}

impl TimePolicy {
    pub fn times(self, t: f64) -> [f64; 4] {
        match self {
            TimePolicy::AllEqual => [t, t, t, t],
            TimePolicy::Alternating1 => [0.0, t, t, 0.0],
            TimePolicy::Alternating2 => [t, 0.0, 0.0, t],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TimePolicy::AllEqual => "all-equal",
            TimePolicy::Alternating1 => "alternating-1",
            TimePolicy::Alternating2 => "alternating-2",
        }
    }
}

impl fmt::Display for TimePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "all-equal" => Ok(TimePolicy::AllEqual),
            "b" | "alternating-1" => Ok(TimePolicy::Alternating1),
            "c" | "alternating-2" => Ok(TimePolicy::Alternating2),
            _ => Err(Error::UnknownTag {
                kind: "time policy",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSetting {
    pub n: (Quasispin, f64),
    pub m: (Quasispin, f64),
    pub n_prime: (Quasispin, f64),
    pub m_prime: (Quasispin, f64),
    /// Use the CP-corrected observables.
    pub cp_mode: bool,
}

impl BellSetting {
    pub fn new(
        n: (Quasispin, f64),
        m: (Quasispin, f64),
        n_prime: (Quasispin, f64),
        m_prime: (Quasispin, f64),
    ) -> Result<Self> {
        for (_, t) in [n, m, n_prime, m_prime] {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::NegativeTime(t));
            }
        }
        Ok(Self {
            n,
            m,
            n_prime,
            m_prime,
            cp_mode: false,
        })
    }

    /// Quasispins `[n, m, n', m']` with times from `policy`.
    pub fn from_policy(quasispins: [Quasispin; 4], policy: TimePolicy, t: f64) -> Result<Self> {
        let ts = policy.times(t);
        Self::new(
            (quasispins[0], ts[0]),
            (quasispins[1], ts[1]),
            (quasispins[2], ts[2]),
            (quasispins[3], ts[3]),
        )
    }

    /// Every side asks "K0bar?".
    pub fn all_k_zero_bar(policy: TimePolicy, t: f64) -> Result<Self> {
        Self::from_policy([Quasispin::k_zero_bar(); 4], policy, t)
    }

    /// `t = 0` planar setting reaching Tsirelson's bound: `alpha = 0, pi/2`
    /// on side A and `pi/4, 3pi/4` on side B.
    pub fn planar_optimal() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        let q = |a: f64| Quasispin::new(a, 0.0).expect("angle in range");
        Self {
            n: (q(0.0), 0.0),
            m: (q(FRAC_PI_4), 0.0),
            n_prime: (q(FRAC_PI_2), 0.0),
            m_prime: (q(3.0 * FRAC_PI_4), 0.0),
            cp_mode: false,
        }
    }

    pub fn with_cp_mode(mut self, on: bool) -> Self {
        self.cp_mode = on;
        self
    }

    /// `[O_n, O_m, O_n', O_m']`
    pub fn observables(&self, params: &MesonParams) -> Result<[ObservableMatrix; 4]> {
        let build = |(q, t): (Quasispin, f64)| {
            if self.cp_mode {
                effective_operator_cp(&q, t, params)
            } else {
                effective_operator(&q, t, params)
            }
        };
        Ok([build(self.n)?, build(self.m)?, build(self.n_prime)?, build(self.m_prime)?])
    }
}

fn witness(o: &[ObservableMatrix; 4]) -> CMatrix {
    let [on, om, onp, omp] = o;
    kron(&on.matrix, &(&om.matrix - &omp.matrix)) + kron(&onp.matrix, &(&om.matrix + &omp.matrix))
}

pub fn bell_operator(s: &BellSetting, params: &MesonParams) -> Result<CMatrix> {
    Ok(witness(&s.observables(params)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Entropic bound between the eigenbases of the two witness summands.
    pub summand_mu_bound: f64,
    pub classical_bound: f64,
    pub tsirelson: f64,
}

/// Eigenbasis of a 2x2 Hermitian matrix, or `None` if it is a multiple of
/// the identity.
fn eigenbasis(m: &CMatrix) -> Result<Option<[CVector; 2]>> {
    let s = hermitian_eigen(m)?;
    if s.max() - s.min() <= DEGENERATE_GAP * s.max().abs().max(1.0) {
        return Ok(None);
    }
    Ok(Some([s.eigenvectors[0].clone(), s.eigenvectors[1].clone()]))
}

/// `max |<a_i|b_j>|`. A degenerate factor may use any basis; the partner's
/// basis is picked, which gives overlap one.
fn basis_overlap(a: &Option<[CVector; 2]>, b: &Option<[CVector; 2]>) -> f64 {
    match (a, b) {
        (Some(a), Some(b)) => a
            .iter()
            .flat_map(|x| b.iter().map(move |y| inner(x, y).norm()))
            .fold(0.0, f64::max)
            .min(1.0),
        _ => 1.0,
    }
}

fn summand_bound(o: &[ObservableMatrix; 4]) -> Result<f64> {
    let [on, om, onp, omp] = o;
    let a1 = eigenbasis(&on.matrix)?;
    let a2 = eigenbasis(&onp.matrix)?;
    let b1 = eigenbasis(&(&om.matrix - &omp.matrix))?;
    let b2 = eigenbasis(&(&om.matrix + &omp.matrix))?;
    let m = basis_overlap(&a1, &a2) * basis_overlap(&b1, &b2);
    let bound = -2.0 * m.log2();
    // Rounding in the eigensolver leaves overlaps a few ulps below one.
    Ok(if bound < 1e-12 { 0.0 } else { bound })
}

pub fn bell_bounds(s: &BellSetting, params: &MesonParams) -> Result<BellReport> {
    let o = s.observables(params)?;
    let spec = hermitian_eigen(&witness(&o))?;
    Ok(BellReport {
        lambda_min: spec.min(),
        lambda_max: spec.max(),
        summand_mu_bound: summand_bound(&o)?,
        classical_bound: CLASSICAL_BOUND,
        tsirelson: TSIRELSON_BOUND,
    })
}

/// CHSH value of a state: `abs` keeps the absolute values of the
/// inequality, `witness` is `Tr(B rho)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshValue {
    pub abs: f64,
    pub witness: f64,
}

/// `|E(n,m) - E(n,m')| + |E(n',m) + E(n',m')|` for a `t = 0` pair state in
/// the mass basis.
pub fn chsh_value(s: &BellSetting, rho0: &DensityMatrix, params: &MesonParams) -> Result<ChshValue> {
    let [on, om, onp, omp] = s.observables(params)?;
    let e = |a: &ObservableMatrix, b: &ObservableMatrix| bipartite_expectation(a, b, rho0);
    Ok(chsh_from_correlations(e(&on, &om)?, e(&on, &omp)?, e(&onp, &om)?, e(&onp, &omp)?))
}

/// Combines `E(n,m), E(n,m'), E(n',m), E(n',m')`.
pub fn chsh_from_correlations(e_nm: f64, e_nmp: f64, e_npm: f64, e_npmp: f64) -> ChshValue {
    ChshValue {
        abs: (e_nm - e_nmp).abs() + (e_npm + e_npmp).abs(),
        witness: e_nm - e_nmp + e_npm + e_npmp,
    }
}

/// Outcome of the `t = 0` CP Bell test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpBellReport {
    pub delta: f64,
    pub lambda_max_ks: f64,
    pub lambda_max_kl: f64,
    pub variant_ks_violates: bool,
    pub variant_kl_violates: bool,
    /// `lambda_max - 2` for the K_S and K_L variants.
    pub margins: [f64; 2],
    /// Singlet CHSH values (with absolute values) for the two variants.
    pub singlet_ks: f64,
    pub singlet_kl: f64,
}

impl CpBellReport {
    pub fn exactly_one_violates(&self) -> bool {
        self.variant_ks_violates != self.variant_kl_violates
    }
}

/// CP Bell test at `t = 0` with settings `n = K_S` (or `K_L`), `m = K0bar`,
/// `n' = m' = K_1`, using the exact non-orthogonal mass eigenstates in the
/// strangeness basis. A variant violates when its witness has
/// `lambda_max > 2 + 1e-9`.
pub fn cp_bell_test(delta: f64) -> Result<CpBellReport> {
    if !delta.is_finite() || delta.abs() >= 0.1 {
        return Err(Error::UnphysicalDelta(delta));
    }
    let cp = cp_basis_data(delta)?;
    let proj = |v: &CVector| outer(v) * cr(2.0) - CMatrix::identity(2, 2);
    let (om, onp) = (proj(&cp.k_zero_bar()), proj(&cp.k1()));
    let omp = onp.clone();
    let singlet = {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        outer(&CVector::from_vec(vec![cr(0.0), cr(s), cr(-s), cr(0.0)]))
    };
    let run = |kn: &CVector| -> Result<(f64, f64)> {
        let on = proj(kn);
        let b = kron(&on, &(&om - &omp)) + kron(&onp, &(&om + &omp));
        let lmax = hermitian_eigen(&b)?.max();
        let e = |a: &CMatrix, b: &CMatrix| (kron(a, b) * &singlet).trace().re;
        let v = chsh_from_correlations(e(&on, &om), e(&on, &omp), e(&onp, &om), e(&onp, &omp));
        Ok((lmax, v.abs))
    };
    let (lks, sks) = run(&cp.k_short())?;
    let (lkl, skl) = run(&cp.k_long())?;
    Ok(CpBellReport {
        delta,
        lambda_max_ks: lks,
        lambda_max_kl: lkl,
        variant_ks_violates: lks > CLASSICAL_BOUND + VIOLATION_TOL,
        variant_kl_violates: lkl > CLASSICAL_BOUND + VIOLATION_TOL,
        margins: [lks - CLASSICAL_BOUND, lkl - CLASSICAL_BOUND],
        singlet_ks: sks,
        singlet_kl: skl,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellRow {
    pub t: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub summand_mu_bound: f64,
}

/// Witness bounds along a time grid. Rows are computed in parallel and
/// returned in grid order.
pub fn scan_bell(
    policy: TimePolicy,
    t_grid: &[f64],
    params: &MesonParams,
    quasispins: [Quasispin; 4],
    cp_mode: bool,
) -> Result<Vec<BellRow>> {
    if t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if t_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::UnsortedGrid);
    }
    t_grid
        .par_iter()
        .map(|&t| {
            let s = BellSetting::from_policy(quasispins, policy, t)?.with_cp_mode(cp_mode);
            let r = bell_bounds(&s, params)?;
            Ok(BellRow {
                t,
                lambda_min: r.lambda_min,
                lambda_max: r.lambda_max,
                summand_mu_bound: r.summand_mu_bound,
            })
        })
        .collect()
}

/// Extremes of `<psi|B|psi>` over sampled pure states, found without any
/// eigendecomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessSample {
    /// Largest and smallest value among the uniformly drawn states.
    pub sampled_max: f64,
    pub sampled_min: f64,
    /// Best value after a local random search started from the best sample.
    pub refined_max: f64,
    /// Extreme over every state visited, for the upper-bound check.
    pub visited_max: f64,
    pub visited_min: f64,
}

fn gaussian_state(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    v / cr(n)
}

fn rayleigh(b: &CMatrix, v: &CVector) -> f64 {
    inner(v, &(b * v)).re
}

/// Haar-random pure states (normalized complex Gaussians) followed by a
/// stochastic hill-climb with shrinking step size.
pub fn sample_witness(b: &CMatrix, samples: usize, refine_steps: usize, seed: u64) -> WitnessSample {
    let d = b.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::NEG_INFINITY, CVector::zeros(d));
    let mut lo = f64::INFINITY;
    for _ in 0..samples.max(1) {
        let v = gaussian_state(&mut rng, d);
        let e = rayleigh(b, &v);
        lo = lo.min(e);
        if e > best.0 {
            best = (e, v);
        }
    }
    let (sampled_max, sampled_min) = (best.0, lo);
    let mut visited_max = sampled_max;
    let mut visited_min = sampled_min;
    let mut step = 0.5;
    for i in 0..refine_steps {
        let noise = gaussian_state(&mut rng, d);
        let trial = &best.1 + noise * cr(step);
        let n = trial.norm();
        let trial = trial / cr(n);
        let e = rayleigh(b, &trial);
        visited_max = visited_max.max(e);
        visited_min = visited_min.min(e);
        if e > best.0 {
            best = (e, trial);
        }
        if (i + 1) % 200 == 0 {
            step *= 0.6;
        }
    }
    WitnessSample {
        sampled_max,
        sampled_min,
        refined_max: best.0,
        visited_max,
        visited_min,
    }
}
