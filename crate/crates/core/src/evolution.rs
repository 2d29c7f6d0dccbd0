//! Time evolution of decaying single and paired mesons.
//!
//! A single particle lives on `surviving ⊕ final`, indexed `(S, L, f_L, f_S)`
//! in the mass basis. Decay is a Lindblad process with Hamiltonian
//! `diag(m_S, m_L, 0, 0)`, `m_S = -1/2`, `m_L = +1/2`, and a jump operator
//! sending `K_S -> f_S` with rate `gamma_s` and `K_L -> f_L` with rate
//! `gamma_l`. [`evolve_single_closed`] and [`evolve_bipartite`] use the exact
//! solution; [`lindblad_integrate`] and [`lindblad_integrate_bipartite`]
//! integrate the master equation numerically and serve as an oracle.
//!
//! Coherences inside the final block are unobservable and the closed form
//! drops them. [`DensityMatrix::drop_final_coherences`] applies the same
//! projection to integrator output before comparing.
//!
//! The evolution is CP-conserving: the mass basis is taken orthonormal and
//! `delta` is ignored here.

use std::fmt;

use num_complex::Complex64;

use crate::basis::{phase, Basis, CpBasisData, Quasispin, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{
    cr, hermitian_eigen, hermiticity_error, kron, outer, partial_trace_second, CMatrix,
};
use crate::params::MesonParams;

const M_S: f64 = -0.5;
const M_L: f64 = 0.5;

const STATE_TOL: f64 = 1e-10;
const DRIFT_TOL: f64 = 1e-6;

/// Default RK4 step.
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    /// `{S, L}` only (a `t = 0` state).
    Surviving,
    /// `{S, L, f_L, f_S}`.
    Full,
    /// Pair on `surviving ⊗ surviving`.
    PairSurviving,
    /// Pair on `full ⊗ full`.
    PairFull,
}

impl Layout {
    pub fn dim(self) -> usize {
        match self {
            Layout::Surviving => 2,
            Layout::Full | Layout::PairSurviving => 4,
            Layout::PairFull => 16,
        }
    }

    pub fn is_pair(self) -> bool {
        matches!(self, Layout::PairSurviving | Layout::PairFull)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Layout::Surviving => "surviving",
            Layout::Full => "full",
            Layout::PairSurviving => "pair-surviving",
            Layout::PairFull => "pair-full",
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn basis_name(b: Basis) -> &'static str {
    b.as_str()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    layout: Layout,
    basis: Basis,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and trace (`= 1` on full layouts,
    /// `<= 1` on surviving ones), all within `1e-10`.
    pub fn new(matrix: CMatrix, layout: Layout, basis: Basis) -> Result<Self> {
        let rho = Self::unchecked(matrix, layout, basis)?;
        rho.validate(STATE_TOL)?;
        Ok(rho)
    }

    fn unchecked(matrix: CMatrix, layout: Layout, basis: Basis) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != layout.dim() {
            return Err(Error::UnsupportedDimension(matrix.nrows()));
        }
        Ok(Self {
            matrix,
            layout,
            basis,
        })
    }

    /// `|v><v|` for a two-component (single) or four-component (pair)
    /// vector; the vector is normalized first.
    pub fn pure(v: &StateVector) -> Result<Self> {
        let layout = match v.dim() {
            2 => Layout::Surviving,
            4 => Layout::PairSurviving,
            d => return Err(Error::UnsupportedDimension(d)),
        };
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v = v.normalized();
        Self::new(outer(v.components()), layout, v.basis())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigen(&self.matrix)?.min())
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let herr = hermiticity_error(&self.matrix);
        if herr > tol {
            return Err(Error::NotHermitian(herr));
        }
        let tr = self.trace();
        match self.layout {
            Layout::Full | Layout::PairFull if (tr - 1.0).abs() > tol => {
                return Err(Error::InvalidState(format!("trace {tr} != 1")));
            }
            Layout::Surviving | Layout::PairSurviving if tr > 1.0 + tol || tr < -tol => {
                return Err(Error::InvalidState(format!("trace {tr} outside [0, 1]")));
            }
            _ => {}
        }
        let lmin = self.min_eigenvalue()?;
        if lmin < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {lmin:.3e}")));
        }
        Ok(())
    }

    /// Pads a surviving-only layout with an empty final block.
    pub fn embed(&self) -> DensityMatrix {
        match self.layout {
            Layout::Full | Layout::PairFull => self.clone(),
            Layout::Surviving => {
                let mut m = CMatrix::zeros(4, 4);
                m.view_mut((0, 0), (2, 2)).copy_from(&self.matrix);
                Self {
                    matrix: m,
                    layout: Layout::Full,
                    basis: self.basis,
                }
            }
            Layout::PairSurviving => {
                let mut m = CMatrix::zeros(16, 16);
                for i in 0..4 {
                    for j in 0..4 {
                        m[(pair_index(i), pair_index(j))] = self.matrix[(i, j)];
                    }
                }
                Self {
                    matrix: m,
                    layout: Layout::PairFull,
                    basis: self.basis,
                }
            }
        }
    }

    /// The surviving block (not renormalized).
    pub fn surviving(&self) -> DensityMatrix {
        match self.layout {
            Layout::Surviving | Layout::PairSurviving => self.clone(),
            Layout::Full => Self {
                matrix: self.matrix.view((0, 0), (2, 2)).into_owned(),
                layout: Layout::Surviving,
                basis: self.basis,
            },
            Layout::PairFull => Self {
                matrix: CMatrix::from_fn(4, 4, |i, j| {
                    self.matrix[(pair_index(i), pair_index(j))]
                }),
                layout: Layout::PairSurviving,
                basis: self.basis,
            },
        }
    }

    pub fn surviving_trace(&self) -> f64 {
        self.surviving().trace()
    }

    /// Zeroes the `(f_L, f_S)` coherences (per factor for pairs).
    pub fn drop_final_coherences(&self) -> DensityMatrix {
        let mut out = self.clone();
        match self.layout {
            Layout::Full => {
                out.matrix[(2, 3)] = Complex64::new(0.0, 0.0);
                out.matrix[(3, 2)] = Complex64::new(0.0, 0.0);
            }
            Layout::PairFull => {
                for r in 0..16 {
                    for c in 0..16 {
                        let final_pair = |i: usize, j: usize| matches!((i, j), (2, 3) | (3, 2));
                        if final_pair(r / 4, c / 4) || final_pair(r % 4, c % 4) {
                            out.matrix[(r, c)] = Complex64::new(0.0, 0.0);
                        }
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// Re-expresses the surviving part in `target`; final blocks are left
    /// untouched.
    pub fn to_basis(&self, target: Basis, cp: &CpBasisData) -> DensityMatrix {
        let t2 = cp.transform(self.basis, target);
        let single = if matches!(self.layout, Layout::Full | Layout::PairFull) {
            let mut t4 = CMatrix::identity(4, 4);
            t4.view_mut((0, 0), (2, 2)).copy_from(&t2);
            t4
        } else {
            t2
        };
        let t = if self.layout.is_pair() {
            kron(&single, &single)
        } else {
            single
        };
        Self {
            matrix: &t * &self.matrix * t.adjoint(),
            layout: self.layout,
            basis: target,
        }
    }

    /// Reduced state of the first (side A) particle of a pair.
    pub fn reduced_first(&self) -> Result<DensityMatrix> {
        let (d, layout) = match self.layout {
            Layout::PairSurviving => (2, Layout::Surviving),
            Layout::PairFull => (4, Layout::Full),
            _ => {
                return Err(Error::LayoutMismatch {
                    expected: "pair",
                    found: self.layout.as_str(),
                })
            }
        };
        Ok(Self {
            matrix: partial_trace_second(&self.matrix, d, d),
            layout,
            basis: self.basis,
        })
    }

    fn require_mass(&self) -> Result<()> {
        if self.basis != Basis::Mass {
            return Err(Error::BasisMismatch {
                expected: basis_name(Basis::Mass),
                found: basis_name(self.basis),
            });
        }
        Ok(())
    }

    fn require_layout(&self, single: bool) -> Result<()> {
        if self.layout.is_pair() == single {
            return Err(Error::LayoutMismatch {
                expected: if single { "single" } else { "pair" },
                found: self.layout.as_str(),
            });
        }
        Ok(())
    }
}

/// Index of `(i, j)` of `surviving ⊗ surviving` in `full ⊗ full`.
fn pair_index(k: usize) -> usize {
    (k / 2) * 4 + k % 2
}

/// Outcome probabilities of a pair measurement; the first letter refers to
/// side A (the later measurement at `t_n`), the second to side B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOutcome {
    pub p_yy: f64,
    pub p_yn: f64,
    pub p_ny: f64,
    pub p_nn: f64,
}

impl JointOutcome {
    /// `p_yy + p_nn - p_yn - p_ny`
    pub fn correlation(&self) -> f64 {
        self.p_yy + self.p_nn - self.p_yn - self.p_ny
    }

    pub fn total(&self) -> f64 {
        self.p_yy + self.p_yn + self.p_ny + self.p_nn
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// Exact single-particle decay map on a 4x4 block (not necessarily
/// Hermitian, so it can act on sub-blocks of a pair).
fn closed_map(x: &CMatrix, t: f64, params: &MesonParams) -> CMatrix {
    let a = (-params.gamma_s() * t).exp();
    let b = (-params.gamma_l() * t).exp();
    let g = params.gamma();
    let mass = [M_S, M_L];
    let width = [params.gamma_s(), params.gamma_l()];

    let mut y = CMatrix::zeros(4, 4);
    y[(0, 0)] = x[(0, 0)] * a;
    y[(1, 1)] = x[(1, 1)] * b;
    let damp = (-g * t).exp();
    y[(0, 1)] = x[(0, 1)] * phase((M_L - M_S) * t) * damp;
    y[(1, 0)] = x[(1, 0)] * phase((M_S - M_L) * t) * damp;
    y[(2, 2)] = x[(2, 2)] + x[(1, 1)] * (1.0 - b);
    y[(3, 3)] = x[(3, 3)] + x[(0, 0)] * (1.0 - a);
    for s in 0..2 {
        let damp = (-0.5 * width[s] * t).exp();
        for f in 2..4 {
            y[(s, f)] = x[(s, f)] * phase(-mass[s] * t) * damp;
            y[(f, s)] = x[(f, s)] * phase(mass[s] * t) * damp;
        }
    }
    y
}

/// Applies `closed_map` to side A of a 16x16 pair matrix.
fn map_first(rho: &CMatrix, t: f64, params: &MesonParams) -> CMatrix {
    let mut out = CMatrix::zeros(16, 16);
    for b in 0..4 {
        for bp in 0..4 {
            let block = CMatrix::from_fn(4, 4, |a, ap| rho[(a * 4 + b, ap * 4 + bp)]);
            let mapped = closed_map(&block, t, params);
            for a in 0..4 {
                for ap in 0..4 {
                    out[(a * 4 + b, ap * 4 + bp)] = mapped[(a, ap)];
                }
            }
        }
    }
    out
}

/// Applies `closed_map` to side B of a 16x16 pair matrix.
fn map_second(rho: &CMatrix, t: f64, params: &MesonParams) -> CMatrix {
    let mut out = CMatrix::zeros(16, 16);
    for a in 0..4 {
        for ap in 0..4 {
            let block = rho.view((a * 4, ap * 4), (4, 4)).into_owned();
            out.view_mut((a * 4, ap * 4), (4, 4))
                .copy_from(&closed_map(&block, t, params));
        }
    }
    out
}

/// Closed-form single-particle evolution in the mass basis. Accepts a
/// surviving-only or full state and returns the full state at `t`.
///
/// ```text
/// rho_SS -> e^{-gamma_s t} rho_SS      rho_SL -> e^{i t - Gamma t} rho_SL
/// rho_LL -> e^{-gamma_l t} rho_LL      final  += diag((1-e^{-gamma_l t}) rho_LL, (1-e^{-gamma_s t}) rho_SS)
/// ```
pub fn evolve_single_closed(
    rho0: &DensityMatrix,
    t: f64,
    params: &MesonParams,
) -> Result<DensityMatrix> {
    check_time(t)?;
    rho0.require_layout(true)?;
    rho0.require_mass()?;
    let full = rho0.embed().drop_final_coherences();
    DensityMatrix::unchecked(closed_map(&full.matrix, t, params), Layout::Full, Basis::Mass)
}

/// Closed-form pair evolution: the single-particle map applied to each
/// factor independently.
pub fn evolve_bipartite(
    rho0: &DensityMatrix,
    t: f64,
    params: &MesonParams,
) -> Result<DensityMatrix> {
    check_time(t)?;
    rho0.require_layout(false)?;
    rho0.require_mass()?;
    let full = rho0.embed().drop_final_coherences();
    let m = map_second(&map_first(&full.matrix, t, params), t, params);
    DensityMatrix::unchecked(m, Layout::PairFull, Basis::Mass)
}

/// Decay channel structure of a pair in the numerical integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BipartiteGenerator {
    /// Two jump operators `A ⊗ 1` and `1 ⊗ A`: each particle decays on its own.
    #[default]
    Independent,
    /// A single summed jump operator `A ⊗ 1 + 1 ⊗ A`. Produces cross terms
    /// between the two decays and does not factorize product states.
    LiteralSum,
}

fn single_hamiltonian() -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        cr(M_S),
        cr(M_L),
        cr(0.0),
        cr(0.0),
    ]))
}

fn single_jump(params: &MesonParams) -> CMatrix {
    let mut a = CMatrix::zeros(4, 4);
    a[(3, 0)] = cr(params.gamma_s().sqrt());
    a[(2, 1)] = cr(params.gamma_l().sqrt());
    a
}

/// `d rho/dt = K rho + rho K^dagger + sum_j A_j rho A_j^dagger`, with
/// `K = -i H - 1/2 sum_j A_j^dagger A_j`.
struct Generator {
    k: CMatrix,
    jumps: Vec<CMatrix>,
}

impl Generator {
    fn new(h: CMatrix, jumps: Vec<CMatrix>) -> Self {
        let n = h.nrows();
        let damping = jumps
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, a| acc + a.adjoint() * a);
        let k = h * Complex64::new(0.0, -1.0) - damping * cr(0.5);
        Self { k, jumps }
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let kr = &self.k * rho;
        let mut out = &kr + kr.adjoint();
        for a in &self.jumps {
            out += a * rho * a.adjoint();
        }
        out
    }

    fn integrate(&self, rho0: &CMatrix, t: f64, dt: f64) -> Result<CMatrix> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidStep(dt));
        }
        check_time(t)?;
        let steps = (t / dt).ceil() as usize;
        let mut rho = rho0.clone();
        if steps == 0 {
            return Ok(rho);
        }
        let h = t / steps as f64;
        let tr0 = rho0.trace().re;
        let half = cr(0.5 * h);
        let full = cr(h);
        let sixth = cr(h / 6.0);
        for _ in 0..steps {
            let k1 = self.apply(&rho);
            let k2 = self.apply(&(&rho + &k1 * half));
            let k3 = self.apply(&(&rho + &k2 * half));
            let k4 = self.apply(&(&rho + &k3 * full));
            rho += (k1 + (k2 + k3) * cr(2.0) + k4) * sixth;
            if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::StepTooLarge {
                    dt,
                    deviation: f64::INFINITY,
                });
            }
        }
        let worst = rho.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let drift = (rho.trace().re - tr0).abs();
        if worst > 1.0 + DRIFT_TOL || drift > DRIFT_TOL {
            return Err(Error::StepTooLarge {
                dt,
                deviation: drift.max(worst - 1.0),
            });
        }
        Ok(rho)
    }
}

/// Classical fixed-step RK4 integration of the single-particle master
/// equation, `ceil(t / dt)` steps. The output keeps final-block
/// coherences; see [`DensityMatrix::drop_final_coherences`].
pub fn lindblad_integrate(
    rho0: &DensityMatrix,
    t: f64,
    params: &MesonParams,
    dt: f64,
) -> Result<DensityMatrix> {
    rho0.require_layout(true)?;
    rho0.require_mass()?;
    let full = rho0.embed();
    let gen = Generator::new(single_hamiltonian(), vec![single_jump(params)]);
    DensityMatrix::unchecked(gen.integrate(&full.matrix, t, dt)?, Layout::Full, Basis::Mass)
}

/// RK4 integration of the pair master equation with Hamiltonian
/// `H ⊗ 1 + 1 ⊗ H` and the chosen decay generator.
pub fn lindblad_integrate_bipartite(
    rho0: &DensityMatrix,
    t: f64,
    params: &MesonParams,
    dt: f64,
    generator: BipartiteGenerator,
) -> Result<DensityMatrix> {
    rho0.require_layout(false)?;
    rho0.require_mass()?;
    let full = rho0.embed();
    let id = CMatrix::identity(4, 4);
    let h = single_hamiltonian();
    let a = single_jump(params);
    let h2 = kron(&h, &id) + kron(&id, &h);
    let jumps = match generator {
        BipartiteGenerator::Independent => vec![kron(&a, &id), kron(&id, &a)],
        BipartiteGenerator::LiteralSum => vec![kron(&a, &id) + kron(&id, &a)],
    };
    let gen = Generator::new(h2, jumps);
    DensityMatrix::unchecked(
        gen.integrate(&full.matrix, t, dt)?,
        Layout::PairFull,
        Basis::Mass,
    )
}

/// `(|K0 K0bar> - |K0bar K0>)/sqrt 2` on `full ⊗ full`, strangeness basis.
pub fn singlet_state() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = nalgebra::DVector::<Complex64>::zeros(16);
    v[1] = cr(s);
    v[4] = cr(-s);
    DensityMatrix {
        matrix: outer(&v),
        layout: Layout::PairFull,
        basis: Basis::Strangeness,
    }
}

/// `|k><k| ⊕ 0` on the full single-particle space, mass basis.
fn yes_projector(k: &Quasispin) -> CMatrix {
    let mut p = CMatrix::zeros(4, 4);
    p.view_mut((0, 0), (2, 2)).copy_from(&outer(&k.amplitudes()));
    p
}

fn checked_probability(p: f64) -> Result<f64> {
    const SLACK: f64 = 1e-10;
    if !p.is_finite() || !(-SLACK..=1.0 + SLACK).contains(&p) {
        return Err(Error::ProbabilityRange(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// The four outcome probabilities of asking "quasispin `k_m` at `t_m`?" on
/// side B and "quasispin `k_n` at `t_n`?" on side A, `t_n >= t_m`.
///
/// The pair evolves to `t_m`, side B is projected onto `|k_m><k_m| ⊕ 0`
/// or its complement (which includes the decayed block) and traced out,
/// and side A evolves on to `t_n` before its own projection.
pub fn joint_probabilities(
    rho0: &DensityMatrix,
    k_n: &Quasispin,
    t_n: f64,
    k_m: &Quasispin,
    t_m: f64,
    params: &MesonParams,
) -> Result<JointOutcome> {
    check_time(t_m)?;
    check_time(t_n)?;
    if t_n < t_m {
        return Err(Error::TimeOrdering { t_n, t_m });
    }
    let rho = evolve_bipartite(rho0, t_m, params)?;
    let id = CMatrix::identity(4, 4);
    let pm = yes_projector(k_m);
    let qm = &id - &pm;
    let pn = yes_projector(k_n);

    let branch = |proj_b: &CMatrix| -> Result<(f64, f64)> {
        let lift = kron(&id, proj_b);
        let projected = &lift * rho.matrix() * &lift;
        let side_a = DensityMatrix::unchecked(
            partial_trace_second(&projected, 4, 4),
            Layout::Full,
            Basis::Mass,
        )?;
        let later = closed_map(&side_a.matrix, t_n - t_m, params);
        let weight = later.trace().re;
        let yes = (&pn * &later).trace().re;
        Ok((yes, weight - yes))
    };

    let (p_yy, p_ny) = branch(&pm)?;
    let (p_yn, p_nn) = branch(&qm)?;
    let out = JointOutcome {
        p_yy: checked_probability(p_yy)?,
        p_yn: checked_probability(p_yn)?,
        p_ny: checked_probability(p_ny)?,
        p_nn: checked_probability(p_nn)?,
    };
    if (out.total() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!(
            "joint probabilities sum to {}",
            out.total()
        )));
    }
    Ok(out)
}
