//! Effective Heisenberg-picture observables.
//!
//! Asking "is the particle in quasispin `k = (alpha, phi)` at time `t`?" and
//! counting decayed particles as "no" is described by the 2x2 Hermitian
//! operator
//!
//! ```text
//! O(alpha, phi, t) = -n0 * 1 + n · sigma,       n0 = 1 - |n|
//! n = e^{-Gamma t} (cos(t+phi) sin(alpha), sin(t+phi) sin(alpha),
//!                   sinh(dGamma t) + cosh(dGamma t) cos(alpha))
//! ```
//!
//! acting on the initial surviving state in the mass basis `(K_S, K_L)`, so
//! that `Tr(O rho0) = 2 P(yes) - 1`. Its spectrum is `{2|n| - 1, -1}`.

use num_complex::Complex64;

use crate::basis::{basis_convert, cp_basis_data, phase, Basis, Quasispin, StateVector};
use crate::error::{Error, Result};
use crate::evolution::{DensityMatrix, Layout};
use crate::linalg::{cr, inner, kron, outer, pauli_x, pauli_y, pauli_z, CMatrix, CVector};
use crate::params::MesonParams;

const M_S: f64 = -0.5;
const M_L: f64 = 0.5;

/// Below this Bloch length both eigenvalues are `-1` to working precision.
const DEGENERATE_LENGTH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableMatrix {
    pub matrix: CMatrix,
    pub n0: f64,
    pub bloch: [f64; 3],
    pub quasispin: Quasispin,
    pub time: f64,
    pub cp_corrected: bool,
    gamma_s: f64,
    gamma_l: f64,
}

impl ObservableMatrix {
    pub fn bloch_length(&self) -> f64 {
        norm3(&self.bloch)
    }

    /// `(2|n| - 1, -1)`
    pub fn eigenvalues(&self) -> (f64, f64) {
        (2.0 * self.bloch_length() - 1.0, -1.0)
    }
}

/// Eigen-decomposition of an effective observable. `chi1` belongs to
/// `lambda1`, `chi2` to `lambda2 = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda1: f64,
    pub chi1: StateVector,
    pub lambda2: f64,
    pub chi2: StateVector,
    /// Set when `|n| = 0`; the pair is then an arbitrary orthonormal basis.
    pub degenerate: bool,
}

impl EigenPair {
    pub fn vectors(&self) -> [&StateVector; 2] {
        [&self.chi1, &self.chi2]
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn from_bloch(n0: f64, n: &[f64; 3]) -> CMatrix {
    CMatrix::identity(2, 2) * cr(-n0)
        + pauli_x() * cr(n[0])
        + pauli_y() * cr(n[1])
        + pauli_z() * cr(n[2])
}

/// `(n0, n)` for quasispin `q` at time `t`. Negative `t` is allowed.
pub fn bloch_vector(q: &Quasispin, t: f64, params: &MesonParams) -> (f64, [f64; 3]) {
    let (sa, ca) = q.alpha().sin_cos();
    let damp = (-params.gamma() * t).exp();
    let dg = params.delta_gamma() * t;
    let n = [
        damp * (t + q.phi()).cos() * sa,
        damp * (t + q.phi()).sin() * sa,
        damp * (dg.sinh() + dg.cosh() * ca),
    ];
    (1.0 - norm3(&n), n)
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

pub fn effective_operator(q: &Quasispin, t: f64, params: &MesonParams) -> Result<ObservableMatrix> {
    check_time(t)?;
    let (n0, n) = bloch_vector(q, t, params);
    Ok(ObservableMatrix {
        matrix: from_bloch(n0, &n),
        n0,
        bloch: n,
        quasispin: *q,
        time: t,
        cp_corrected: false,
        gamma_s: params.gamma_s(),
        gamma_l: params.gamma_l(),
    })
}

/// Effective observable with the CP-violating corrections through second
/// order in `delta`:
///
/// ```text
/// n1' = n1 - e^{-Gamma t} (2 delta cos t + delta^2 sin(alpha) cos(t - phi))
/// n2' = n2 - e^{-Gamma t} (2 delta sin t + delta^2 sin(alpha) sin(t - phi))
/// n3' = n3 - delta (e^{-gs t} - e^{-gl t}) sin(alpha) cos(phi)
///          - delta^2 / 2 (e^{-gs t} - e^{-gl t} - (e^{-gs t} + e^{-gl t}) cos(alpha))
/// ```
pub fn effective_operator_cp(
    q: &Quasispin,
    t: f64,
    params: &MesonParams,
) -> Result<ObservableMatrix> {
    check_time(t)?;
    let (_, n) = bloch_vector(q, t, params);
    let d = params.delta();
    let d2 = d * d;
    let (sa, ca) = q.alpha().sin_cos();
    let phi = q.phi();
    let damp = (-params.gamma() * t).exp();
    let es = (-params.gamma_s() * t).exp();
    let el = (-params.gamma_l() * t).exp();
    let cp = [
        n[0] - damp * (2.0 * d * t.cos() + d2 * sa * (t - phi).cos()),
        n[1] - damp * (2.0 * d * t.sin() + d2 * sa * (t - phi).sin()),
        n[2] - (d * (es - el) * sa * phi.cos() + d2 * 0.5 * (es - el - (es + el) * ca)),
    ];
    let n0 = 1.0 - norm3(&cp);
    Ok(ObservableMatrix {
        matrix: from_bloch(n0, &cp),
        n0,
        bloch: cp,
        quasispin: *q,
        time: t,
        cp_corrected: true,
        gamma_s: params.gamma_s(),
        gamma_l: params.gamma_l(),
    })
}

/// `cos(a/2) e^{-gs t/2} |K_S> + sin(a/2) e^{i(t+phi)} e^{-gl t/2} |K_L>`,
/// normalized. `alpha`, `phi` and `t` are unrestricted.
pub fn chi(alpha: f64, phi: f64, t: f64, gamma_s: f64, gamma_l: f64) -> CVector {
    let (s, co) = (alpha / 2.0).sin_cos();
    chi_from_amplitudes(co, s, phi, t, gamma_s, gamma_l)
}

fn chi_from_amplitudes(co: f64, s: f64, phi: f64, t: f64, gamma_s: f64, gamma_l: f64) -> CVector {
    // Factor out the larger exponential so neither component overflows.
    let ls = -0.5 * gamma_s * t;
    let ll = -0.5 * gamma_l * t;
    let top = ls.max(ll);
    let v = CVector::from_vec(vec![
        cr(co * (ls - top).exp()),
        phase(t + phi) * (s * (ll - top).exp()),
    ]);
    let norm = v.norm();
    v / cr(norm)
}

/// Spectral decomposition of a CP-free observable:
/// `chi1 = chi(alpha, phi, t)`, `chi2 = chi(alpha + pi, phi + 2t, -t)`.
pub fn spectral(o: &ObservableMatrix) -> Result<EigenPair> {
    if o.cp_corrected {
        return Err(Error::CpCorrected);
    }
    let (a, p, t) = (o.quasispin.alpha(), o.quasispin.phi(), o.time);
    let len = o.bloch_length();
    let chi1 = chi(a, p, t, o.gamma_s, o.gamma_l);
    // chi(alpha + pi, phi + 2t, -t), with the half-angle shift done exactly.
    let (sa, ca) = (a / 2.0).sin_cos();
    let chi2 = chi_from_amplitudes(-sa, ca, p + 2.0 * t, -t, o.gamma_s, o.gamma_l);
    Ok(EigenPair {
        lambda1: 2.0 * len - 1.0,
        chi1: StateVector::new(chi1, Basis::Mass),
        lambda2: -1.0,
        chi2: StateVector::new(chi2, Basis::Mass),
        degenerate: len < DEGENERATE_LENGTH,
    })
}

/// `e^{i lambda^* t}` with `lambda = m - i gamma / 2`.
fn forward(m: f64, gamma: f64, t: f64) -> Complex64 {
    phase(m * t) * (-0.5 * gamma * t).exp()
}

/// `e^{i lambda t}`
fn backward(m: f64, gamma: f64, t: f64) -> Complex64 {
    phase(m * t) * (0.5 * gamma * t).exp()
}

/// Overlaps `(<K_S|k>, <K_L|k>)` with `k` normalized in the strangeness
/// frame.
fn mass_overlaps(k: &StateVector, params: &MesonParams) -> Result<(Complex64, Complex64, CVector)> {
    let cp = cp_basis_data(params.delta())?;
    let ks = basis_convert(k, Basis::Strangeness, &cp)?.normalized();
    if ks.dim() != 2 {
        return Err(Error::UnsupportedDimension(ks.dim()));
    }
    let v = ks.into_components();
    Ok((inner(&cp.k_short(), &v), inner(&cp.k_long(), &v), v))
}

/// `N(t) = e^{-gs t}|<K_S|k>|^2 + e^{-gl t}|<K_L|k>|^2`; `N(0)` exceeds one
/// by `delta sin(alpha) cos(phi)` for a quasispin written in the CP basis.
pub fn cp_weight(k: &StateVector, t: f64, params: &MesonParams) -> Result<f64> {
    let (a, b, _) = mass_overlaps(k, params)?;
    Ok((-params.gamma_s() * t).exp() * a.norm_sqr() + (-params.gamma_l() * t).exp() * b.norm_sqr())
}

/// CP-violating eigenvectors in `{K_1, K_2}` coordinates:
///
/// ```text
/// chi1 ∝  <K_S|k>  e^{i lambda_S^* t} K_1 + <K_L|k>  e^{i lambda_L^* t} K_2
/// chi2 ∝ -<K_L|k>* e^{i lambda_S t}   K_1 + <K_S|k>* e^{i lambda_L t}   K_2
/// ```
///
/// `lambda1 = 2 N(t) - 1` is the eigenvalue of the rank-one operator
/// `2|u><u| - 1` built from the unnormalized `chi1`.
pub fn cp_eigenvectors_for_state(k: &StateVector, t: f64, params: &MesonParams) -> Result<EigenPair> {
    let (a, b, _) = mass_overlaps(k, params)?;
    let (gs, gl) = (params.gamma_s(), params.gamma_l());
    let u = CVector::from_vec(vec![a * forward(M_S, gs, t), b * forward(M_L, gl, t)]);
    let w = CVector::from_vec(vec![-b.conj() * backward(M_S, gs, t), a.conj() * backward(M_L, gl, t)]);
    let n_t = u.norm_squared();
    let (nu, nw) = (u.norm(), w.norm());
    Ok(EigenPair {
        lambda1: 2.0 * n_t - 1.0,
        chi1: StateVector::new(u / cr(nu), Basis::Cp),
        lambda2: -1.0,
        chi2: StateVector::new(w / cr(nw), Basis::Cp),
        degenerate: n_t < DEGENERATE_LENGTH,
    })
}

/// [`cp_eigenvectors_for_state`] for a quasispin written in `basis`.
pub fn cp_eigenvectors(q: &Quasispin, basis: Basis, t: f64, params: &MesonParams) -> Result<EigenPair> {
    cp_eigenvectors_for_state(&q.state(basis), t, params)
}

/// Exact effective observable with non-orthogonal mass eigenstates, in the
/// strangeness basis: `2 U^dagger |k><k| U - 1` where
/// `U(t) = sum_j e^{-i lambda_j t} |K_j><K~_j|` and `K~_j` is the dual basis.
pub fn effective_operator_exact(k: &StateVector, t: f64, params: &MesonParams) -> Result<CMatrix> {
    check_time(t)?;
    let cp = cp_basis_data(params.delta())?;
    let (a, b, _) = mass_overlaps(k, params)?;
    // Dual vectors are the columns of (T^{-1})^dagger, T = [K_S K_L].
    let dual = cp.from_strangeness(Basis::Mass).adjoint();
    let u = dual.column(0) * (a * forward(M_S, params.gamma_s(), t))
        + dual.column(1) * (b * forward(M_L, params.gamma_l(), t));
    Ok(outer(&u) * cr(2.0) - CMatrix::identity(2, 2))
}

fn require_mass(rho: &DensityMatrix, layout: Layout) -> Result<()> {
    if rho.layout() != layout {
        return Err(Error::LayoutMismatch {
            expected: layout.as_str(),
            found: rho.layout().as_str(),
        });
    }
    if rho.basis() != Basis::Mass {
        return Err(Error::BasisMismatch {
            expected: Basis::Mass.as_str(),
            found: rho.basis().as_str(),
        });
    }
    Ok(())
}

/// `Tr(O rho0)` for a `t = 0` surviving state in the mass basis.
pub fn expectation(o: &ObservableMatrix, rho0: &DensityMatrix) -> Result<f64> {
    require_mass(rho0, Layout::Surviving)?;
    Ok((&o.matrix * rho0.matrix()).trace().re)
}

/// `Tr((O1 ⊗ O2) rho0)` for a `t = 0` pair state in the mass basis.
pub fn bipartite_expectation(
    o1: &ObservableMatrix,
    o2: &ObservableMatrix,
    rho0: &DensityMatrix,
) -> Result<f64> {
    require_mass(rho0, Layout::PairSurviving)?;
    Ok((kron(&o1.matrix, &o2.matrix) * rho0.matrix()).trace().re)
}

/// Largest entry of `|O v - lambda v|`.
pub fn eigen_residual(m: &CMatrix, lambda: f64, v: &CVector) -> f64 {
    (m * v - v * cr(lambda)).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::evolution::evolve_single_closed;
    use crate::linalg::{hermitian_eigen, same_ray};
    use std::f64::consts::{FRAC_PI_2, PI};

    const D: f64 = 3.322e-3;

    fn q(a: f64, p: f64) -> Quasispin {
        Quasispin::new(a, p).unwrap()
    }

    #[test]
    fn bloch_at_zero() {
        let k = MesonParams::kaon();
        let (n0, n) = bloch_vector(&q(0.0, 0.0), 0.0, &k);
        assert_eq!(n, [0.0, 0.0, 1.0]);
        assert_eq!(n0, 0.0);
        let (n0, n) = bloch_vector(&q(FRAC_PI_2, 0.0), 0.0, &k);
        assert!((n[0] - 1.0).abs() < 1e-15 && n[1].abs() < 1e-15 && n[2].abs() < 1e-15);
        assert!(n0.abs() < 1e-15);
    }

    #[test]
    fn bloch_at_one_kaon() {
        let k = MesonParams::kaon();
        let (_, n) = bloch_vector(&q(FRAC_PI_2, 0.0), 1.0, &k);
        let g = k.gamma();
        let dg = k.delta_gamma();
        let want = [(-g).exp() * 1f64.cos(), (-g).exp() * 1f64.sin(), (-g).exp() * dg.sinh()];
        for i in 0..3 {
            assert!((n[i] - want[i]).abs() < 1e-15);
        }
        // |n| as the sum of two survival probabilities.
        let len = norm3(&n);
        let probs = 0.5 * (-k.gamma_s()).exp() + 0.5 * (-k.gamma_l()).exp();
        assert!((len - probs).abs() < 1e-14);
    }

    #[test]
    fn operator_at_zero_is_pauli_x() {
        let o = effective_operator(&q(FRAC_PI_2, 0.0), 0.0, &MesonParams::kaon()).unwrap();
        assert!((&o.matrix - pauli_x()).norm() < 1e-15);
        assert!(!o.cp_corrected);
    }

    #[test]
    fn trace_identity() {
        let k = MesonParams::kaon();
        let o = effective_operator(&q(FRAC_PI_2, 0.0), 1.0, &k).unwrap();
        assert!((o.matrix.trace().re + 2.0 * o.n0).abs() < 1e-15);
        assert!(effective_operator(&q(1.0, 0.0), -0.1, &k).is_err());
    }

    #[test]
    fn spectral_at_zero_is_quasispin() {
        let k = MesonParams::kaon();
        let qq = q(1.1, 0.7);
        let e = spectral(&effective_operator(&qq, 0.0, &k).unwrap()).unwrap();
        assert!((e.lambda1 - 1.0).abs() < 1e-15);
        assert!(same_ray(e.chi1.components(), &qq.amplitudes(), 1e-15));
    }

    #[test]
    fn spectral_eigenvectors_are_exact() {
        let k = MesonParams::kaon();
        for t in [0.0, 0.3, 1.0, 5.0, 12.0] {
            for (a, p) in [(FRAC_PI_2, 0.0), (0.3, 2.0), (PI, 0.0), (0.0, 0.0)] {
                let o = effective_operator(&q(a, p), t, &k).unwrap();
                let e = spectral(&o).unwrap();
                assert_eq!(e.lambda2, -1.0);
                assert!(inner(e.chi1.components(), e.chi2.components()).norm() < 1e-12);
                assert!(eigen_residual(&o.matrix, e.lambda1, e.chi1.components()) < 1e-10);
                assert!(eigen_residual(&o.matrix, e.lambda2, e.chi2.components()) < 1e-10);
                let oracle = hermitian_eigen(&o.matrix).unwrap();
                assert!((oracle.max() - e.lambda1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_rejects_cp_observables() {
        let o = effective_operator_cp(&q(1.0, 0.0), 1.0, &MesonParams::kaon()).unwrap();
        assert_eq!(spectral(&o).unwrap_err(), Error::CpCorrected);
    }

    #[test]
    fn cp_operator_reduces_without_violation() {
        let k = MesonParams::kaon().with_delta(0.0).unwrap();
        let a = effective_operator(&q(0.4, 1.0), 2.0, &k).unwrap();
        let b = effective_operator_cp(&q(0.4, 1.0), 2.0, &k).unwrap();
        assert!(max_abs(&(&a.matrix - &b.matrix)) < 1e-15);
    }

    #[test]
    fn cp_operator_first_component_at_zero() {
        let k = MesonParams::kaon();
        let o = effective_operator_cp(&q(FRAC_PI_2, 0.0), 0.0, &k).unwrap();
        assert!((o.bloch[0] - (1.0 - 2.0 * D - D * D)).abs() < 1e-15);
        let (l1, l2) = o.eigenvalues();
        assert_eq!(l2, -1.0);
        assert!((l1 - (2.0 * o.bloch_length() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn cp_eigenvectors_reduce_to_spectral() {
        let k = MesonParams::kaon().with_delta(0.0).unwrap();
        let qq = q(1.2, 0.4);
        for t in [0.0, 0.5, 2.0] {
            let e = spectral(&effective_operator(&qq, t, &k).unwrap()).unwrap();
            let c = cp_eigenvectors(&qq, Basis::Mass, t, &k).unwrap();
            // K_1 = K_S at delta = 0, so CP coordinates equal mass ones.
            assert!(same_ray(e.chi1.components(), c.chi1.components(), 1e-12));
            assert!(same_ray(e.chi2.components(), c.chi2.components(), 1e-12));
            assert!((e.lambda1 - c.lambda1).abs() < 1e-12);
        }
    }

    #[test]
    fn cp_weight_sum() {
        let k = MesonParams::kaon();
        let w = cp_weight(&q(FRAC_PI_2, 0.0).state(Basis::Cp), 0.0, &k).unwrap();
        assert!((w - (1.0 + D)).abs() < 1e-12);
    }

    #[test]
    fn cp_eigenvectors_are_orthonormal() {
        let k = MesonParams::kaon();
        let e = cp_eigenvectors(&Quasispin::k_short(), Basis::Mass, 1.0, &k).unwrap();
        assert!(inner(e.chi1.components(), e.chi2.components()).norm() < 1e-14);
        assert!((e.chi1.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_operator_agrees_without_violation() {
        let k = MesonParams::kaon().with_delta(0.0).unwrap();
        let cp = cp_basis_data(0.0).unwrap();
        let qq = q(0.9, 2.5);
        let t = 1.7;
        let exact = effective_operator_exact(&qq.state(Basis::Mass), t, &k).unwrap();
        // Mass coordinates -> strangeness coordinates.
        let tm = cp.to_strangeness(Basis::Mass);
        let o = effective_operator(&qq, t, &k).unwrap();
        let want = &tm * &o.matrix * tm.adjoint();
        assert!(max_abs(&(exact - want)) < 1e-12);
    }

    #[test]
    fn expectation_matches_survival() {
        let k = MesonParams::kaon();
        let rho = DensityMatrix::pure(&Quasispin::k_short().state(Basis::Mass)).unwrap();
        let o = effective_operator(&Quasispin::k_short(), 1.0, &k).unwrap();
        let e = expectation(&o, &rho).unwrap();
        assert!((e - (2.0 * (-k.gamma_s()).exp() - 1.0)).abs() < 1e-14);
        let evolved = evolve_single_closed(&rho, 1.0, &k).unwrap();
        assert!((evolved.matrix()[(0, 0)].re * 2.0 - 1.0 - e).abs() < 1e-14);
    }

    #[test]
    fn expectation_extremes_at_zero() {
        let k = MesonParams::kaon();
        let qq = q(1.0, 0.3);
        let o = effective_operator(&qq, 0.0, &k).unwrap();
        let rho = DensityMatrix::pure(&qq.state(Basis::Mass)).unwrap();
        assert!((expectation(&o, &rho).unwrap() - 1.0).abs() < 1e-14);
        let perp = q(PI - 1.0, 0.3 + PI);
        let rho = DensityMatrix::pure(&perp.state(Basis::Mass)).unwrap();
        assert!((expectation(&o, &rho).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_expectation_factorizes() {
        let k = MesonParams::kaon();
        let o1 = effective_operator(&q(0.7, 0.1), 0.8, &k).unwrap();
        let o2 = effective_operator(&q(2.0, 4.0), 1.9, &k).unwrap();
        let ra = DensityMatrix::pure(&q(1.3, 0.2).state(Basis::Mass)).unwrap();
        let rb = DensityMatrix::pure(&q(0.2, 5.0).state(Basis::Mass)).unwrap();
        let pair = DensityMatrix::new(
            kron(ra.matrix(), rb.matrix()),
            Layout::PairSurviving,
            Basis::Mass,
        )
        .unwrap();
        let e = bipartite_expectation(&o1, &o2, &pair).unwrap();
        let want = expectation(&o1, &ra).unwrap() * expectation(&o2, &rb).unwrap();
        assert!((e - want).abs() < 1e-14);
    }
}
