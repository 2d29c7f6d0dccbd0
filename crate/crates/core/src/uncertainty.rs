//! Entropic (Maassen-Uffink) and Robertson uncertainty relations for
//! effective observables, and the characteristic times of the kaon system.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::basis::{phase, Quasispin, StateVector};
use crate::effective::{EigenPair, ObservableMatrix};
use crate::error::{Error, Result};
use crate::linalg::{inner, CVector};
use crate::params::MesonParams;

const NORM_TOL: f64 = 1e-10;
const ROOT_TOL: f64 = 1e-10;

/// Right-hand side of `H(p1) + H(p2) >= -2 log2 max |<chi_i|chi'_j>|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub bound: f64,
    pub max_overlap: f64,
    /// 1-based indices `(i, j)` of the maximizing eigenvectors.
    pub argmax_pair: (usize, usize),
    /// Side-B indices for pair bounds.
    pub argmax_pair_b: Option<(usize, usize)>,
}

fn bound_from_overlap(max_overlap: f64) -> f64 {
    (-2.0 * max_overlap.min(1.0).log2()).max(0.0)
}

/// `-p log2 p - (1-p) log2(1-p)`
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !p.is_finite() || !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(Error::ProbabilityRange(p));
    }
    let p = p.clamp(0.0, 1.0);
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    Ok(h(p) + h(1.0 - p))
}

fn check_orthonormal(pair: &EigenPair) -> Result<()> {
    let a = pair.chi1.components();
    let b = pair.chi2.components();
    let dev = (a.norm() - 1.0)
        .abs()
        .max((b.norm() - 1.0).abs())
        .max(inner(a, b).norm());
    if dev > NORM_TOL || !dev.is_finite() {
        return Err(Error::NotNormalized(dev));
    }
    Ok(())
}

fn check_same_basis(a: &EigenPair, b: &EigenPair) -> Result<()> {
    if a.chi1.basis() != b.chi1.basis() {
        return Err(Error::BasisMismatch {
            expected: a.chi1.basis().as_str(),
            found: b.chi1.basis().as_str(),
        });
    }
    Ok(())
}

/// Largest `|<a_i|b_j>|`, ties resolved towards the lowest `(i, j)`.
fn max_overlap(a: &EigenPair, b: &EigenPair) -> (f64, (usize, usize)) {
    let mut best = (-1.0, (1, 1));
    for (i, x) in a.vectors().into_iter().enumerate() {
        for (j, y) in b.vectors().into_iter().enumerate() {
            let v = x.inner(y).norm();
            if v > best.0 + 1e-14 {
                best = (v, (i + 1, j + 1));
            }
        }
    }
    best
}

pub fn mu_bound(pair1: &EigenPair, pair2: &EigenPair) -> Result<UncertaintyReport> {
    check_orthonormal(pair1)?;
    check_orthonormal(pair2)?;
    check_same_basis(pair1, pair2)?;
    let (m, arg) = max_overlap(pair1, pair2);
    Ok(UncertaintyReport {
        bound: bound_from_overlap(m),
        max_overlap: m,
        argmax_pair: arg,
        argmax_pair_b: None,
    })
}

/// Two-particle bound for product eigenbases: `pair_a1` vs `pair_a2` on
/// side A and `pair_b1` vs `pair_b2` on side B. The largest of the 16
/// product overlaps factorizes into the two single-side maxima.
pub fn bipartite_mu_bound(
    pair_a1: &EigenPair,
    pair_a2: &EigenPair,
    pair_b1: &EigenPair,
    pair_b2: &EigenPair,
) -> Result<UncertaintyReport> {
    let a = mu_bound(pair_a1, pair_a2)?;
    let b = mu_bound(pair_b1, pair_b2)?;
    let m = a.max_overlap * b.max_overlap;
    Ok(UncertaintyReport {
        bound: bound_from_overlap(m),
        max_overlap: m,
        argmax_pair: a.argmax_pair,
        argmax_pair_b: Some(b.argmax_pair),
    })
}

/// Closed-form `<chi(q_n, t_n)|chi(q_m, t_m)>` for the CP-free eigenvectors:
///
/// ```text
/// [c_n c_m + s_n s_m e^{i(t_m - t_n + phi_m - phi_n)} e^{-dGamma (t_n + t_m)}]
///   / sqrt(c_n^2 + s_n^2 e^{-2 dGamma t_n}) / sqrt(c_m^2 + s_m^2 e^{-2 dGamma t_m})
/// ```
pub fn eigen_overlap(
    q_n: &Quasispin,
    t_n: f64,
    q_m: &Quasispin,
    t_m: f64,
    params: &MesonParams,
) -> Complex64 {
    let dg = params.delta_gamma();
    let (s_n, c_n) = (q_n.alpha() / 2.0).sin_cos();
    let (s_m, c_m) = (q_m.alpha() / 2.0).sin_cos();
    let num = Complex64::new(c_n * c_m, 0.0)
        + phase(t_m - t_n + q_m.phi() - q_n.phi()) * (s_n * s_m * (-dg * (t_n + t_m)).exp());
    let norm = |c: f64, s: f64, t: f64| (c * c + s * s * (-2.0 * dg * t).exp()).sqrt();
    num / (norm(c_n, s_n, t_n) * norm(c_m, s_m, t_m))
}

/// `|<chi_CP1(K_S, t)|chi_CP1(K_S, 0)>|`:
///
/// ```text
/// |e^{-gs t/2} + delta^2 e^{-i t} e^{-gl t/2}| / sqrt((1 + delta^2)(e^{-gs t} + delta^2 e^{-gl t}))
/// ```
///
/// Falls from 1 at `t = 0` to `delta / sqrt(1 + delta^2)` at late times.
pub fn cp_overlap_ks(t: f64, params: &MesonParams) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(cp_overlap_unchecked(t, params.delta(), params))
}

fn cp_overlap_unchecked(t: f64, delta: f64, params: &MesonParams) -> f64 {
    let d2 = delta * delta;
    // Scale by e^{gl t/2} so that nothing underflows at late times.
    let r = (-0.5 * (params.gamma_s() - params.gamma_l()) * t).exp();
    let num = (Complex64::new(r, 0.0) + phase(-t) * d2).norm();
    let den = ((1.0 + d2) * (r * r + d2)).sqrt();
    num / den
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return Err(Error::NoRoot(format!("no sign change on [{lo}, {hi}]")));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First grid interval `[x_i, x_{i+1}]` on which `f` drops from positive to
/// non-positive.
fn first_crossing(start: f64, end: f64, step: f64, f: &impl Fn(f64) -> f64) -> Option<(f64, f64)> {
    let n = ((end - start) / step).round() as usize;
    let mut prev = (start, f(start));
    for i in 1..=n {
        let x = if i == n { end } else { start + step * i as f64 };
        let v = f(x);
        if prev.1 > 0.0 && v <= 0.0 {
            return Some((prev.0, x));
        }
        prev = (x, v);
    }
    None
}

/// Time at which a `K_S` question at `t` and at `0` become mutually unbiased,
/// i.e. `cp_overlap_ks(t) = 1/sqrt 2`. Scans `(0, 50]` in steps of `0.01`,
/// then bisects.
pub fn complementary_time(params: &MesonParams) -> Result<f64> {
    if params.delta() == 0.0 {
        return Err(Error::NoComplementaryTime(
            "delta = 0: the K_S overlap never drops to 1/sqrt 2".into(),
        ));
    }
    if params.delta_gamma() == 0.0 {
        return Err(Error::NoComplementaryTime(
            "equal widths: K_S and K_L decay alike".into(),
        ));
    }
    let f = |t: f64| cp_overlap_unchecked(t, params.delta(), params) - FRAC_1_SQRT_2;
    let (lo, hi) = first_crossing(0.0, 50.0, 0.01, &f).ok_or_else(|| {
        Error::NoComplementaryTime(format!("no crossing of 1/sqrt 2 for t <= 50, delta = {}", params.delta()))
    })?;
    bisect(lo, hi, ROOT_TOL, f)
}

/// Root of `1 - e^{-gs t} = e^{-gl t}`: the time at which a K_S has decayed
/// with the same probability as a K_L survives.
pub fn misid_time(params: &MesonParams) -> Result<f64> {
    const HORIZON: f64 = 100.0;
    if params.gamma_s() == params.gamma_l() {
        return Err(Error::InvalidParams("misidentification time needs gamma_s > gamma_l".into()));
    }
    let f = |t: f64| 1.0 - (-params.gamma_s() * t).exp() - (-params.gamma_l() * t).exp();
    if f(HORIZON) <= 0.0 {
        return Err(Error::Divergence(HORIZON));
    }
    bisect(0.0, HORIZON, ROOT_TOL, f)
}

/// The `delta*` for which the complementary time equals the
/// misidentification time, searched on `(|delta|, 0.5)`.
pub fn delta_for_equal_times(params: &MesonParams) -> Result<f64> {
    let tm = misid_time(params)?;
    let f = |d: f64| cp_overlap_unchecked(tm, d, params) - FRAC_1_SQRT_2;
    let start = params.delta().abs().max(1e-9);
    let (lo, hi) = first_crossing(start, 0.5, (0.5 - start) / 20_000.0, &f)
        .ok_or_else(|| Error::NoRoot(format!("no delta in ({start}, 0.5) matches t = {tm}")))?;
    let d = bisect(lo, hi, 1e-14, f)?;
    if f(d).abs() > 1e-9 {
        return Err(Error::NoRoot(format!("residual {} at delta = {d}", f(d))));
    }
    Ok(d)
}

/// Both sides of `dO1 dO2 >= |<[O1, O2]>| / 2` for a pure state `psi`.
pub fn robertson_check(
    o1: &ObservableMatrix,
    o2: &ObservableMatrix,
    psi: &StateVector,
) -> Result<(f64, f64)> {
    if psi.dim() != 2 {
        return Err(Error::UnsupportedDimension(psi.dim()));
    }
    let dev = (psi.norm() - 1.0).abs();
    if dev > 1e-12 {
        return Err(Error::NotNormalized(dev));
    }
    let v: &CVector = psi.components();
    let mean = |m: &crate::linalg::CMatrix| inner(v, &(m * v));
    let spread = |m: &crate::linalg::CMatrix| {
        let e = mean(m).re;
        (mean(&(m * m)).re - e * e).max(0.0).sqrt()
    };
    let comm = &o1.matrix * &o2.matrix - &o2.matrix * &o1.matrix;
    Ok((spread(&o1.matrix) * spread(&o2.matrix), 0.5 * mean(&comm).norm()))
}
