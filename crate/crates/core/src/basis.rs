//! Quasispin directions, state vectors and conversions between the
//! strangeness `{K0, K0bar}`, mass `{K_S, K_L}` and CP `{K_1, K_2}` bases.
//!
//! The strangeness basis is the orthonormal reference frame. With CP
//! violation the mass eigenstates are
//!
//! ```text
//! |K_S> = (p|K0> - q|K0bar>) / N,   |K_L> = (p|K0> + q|K0bar>) / N
//! ```
//!
//! with `p = 1 + eps`, `q = 1 - eps`, `N^2 = |p|^2 + |q|^2`, so that
//! `<K_S|K_L> = delta`. The CP eigenstates are fixed as
//! `K_1 = (K0 - K0bar)/sqrt 2` and `K_2 = (K0 + K0bar)/sqrt 2`, which makes
//! `K_1 = K_S` when `delta = 0`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, cr, inner, kron, CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `{K_S, K_L}` (lifetime basis).
    Mass,
    /// `{K0, K0bar}`.
    Strangeness,
    /// `{K_1, K_2}`.
    Cp,
}

impl Basis {
    pub fn as_str(self) -> &'static str {
        match self {
            Basis::Mass => "mass",
            Basis::Strangeness => "strangeness",
            Basis::Cp => "cp",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mass" | "lifetime" => Ok(Basis::Mass),
            "strangeness" | "flavor" | "flavour" => Ok(Basis::Strangeness),
            "cp" => Ok(Basis::Cp),
            _ => Err(Error::UnknownBasis(s.to_string())),
        }
    }
}

/// A direction `cos(a/2)|e_0> + sin(a/2) e^{i phi}|e_1>` on the Bloch
/// sphere of some two-state basis (the mass basis unless stated otherwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quasispin {
    alpha: f64,
    phi: f64,
}

impl Quasispin {
    /// `alpha` must lie in `[0, pi]`; `phi` is wrapped into `[0, 2 pi)`.
    pub fn new(alpha: f64, phi: f64) -> Result<Self> {
        if !alpha.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidQuasispin("angles must be finite".into()));
        }
        const SLACK: f64 = 1e-12;
        if !(-SLACK..=PI + SLACK).contains(&alpha) {
            return Err(Error::InvalidQuasispin(format!("alpha = {alpha} outside [0, pi]")));
        }
        let alpha = alpha.clamp(0.0, PI);
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        if alpha == 0.0 {
            phi = 0.0;
        }
        Ok(Self { alpha, phi })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `K_S` direction of the mass basis.
    pub fn k_short() -> Self {
        Self { alpha: 0.0, phi: 0.0 }
    }

    /// `K_L` direction of the mass basis.
    pub fn k_long() -> Self {
        Self { alpha: PI, phi: 0.0 }
    }

    /// `K0 = (K_S + K_L)/sqrt 2` (CP-conserving limit).
    pub fn k_zero() -> Self {
        Self { alpha: PI / 2.0, phi: 0.0 }
    }

    /// `K0bar = (K_L - K_S)/sqrt 2`, equal up to a global phase to
    /// `(K_S - K_L)/sqrt 2`.
    pub fn k_zero_bar() -> Self {
        Self { alpha: PI / 2.0, phi: PI }
    }

    /// `(cos(a/2), sin(a/2) e^{i phi})`
    pub fn amplitudes(&self) -> CVector {
        let (s, co) = (self.alpha / 2.0).sin_cos();
        CVector::from_vec(vec![cr(co), Complex64::from_polar(s, self.phi)])
    }

    pub fn state(&self, basis: Basis) -> StateVector {
        StateVector::new(self.amplitudes(), basis)
    }
}

/// Complex amplitudes together with the basis they refer to. Two-component
/// vectors describe one particle, four-component vectors a pair (first
/// factor is the left/Alice particle).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    components: CVector,
    basis: Basis,
}

impl StateVector {
    pub fn new(components: CVector, basis: Basis) -> Self {
        Self { components, basis }
    }

    pub fn from_slice(components: &[Complex64], basis: Basis) -> Self {
        Self::new(CVector::from_column_slice(components), basis)
    }

    pub fn components(&self) -> &CVector {
        &self.components
    }

    pub fn into_components(self) -> CVector {
        self.components
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn norm(&self) -> f64 {
        self.components.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(&self) -> Self {
        Self::new(&self.components / cr(self.norm()), self.basis)
    }

    /// `<self|other>` on raw components; both vectors must use the same
    /// orthonormal frame.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.components, &other.components)
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        Self::new(self.components.kronecker(&other.components), self.basis)
    }
}

/// `p`, `q`, `N` and `eps` of the CP-violating mass eigenstates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpBasisData {
    pub p: Complex64,
    pub q: Complex64,
    pub norm_n: f64,
    pub epsilon: Complex64,
}

/// Builds the mass-eigenstate weights for a leptonic asymmetry `delta`.
///
/// `eps` is real and solves `delta = 2 eps / (1 + eps^2)` exactly.
pub fn cp_basis_data(delta: f64) -> Result<CpBasisData> {
    if !delta.is_finite() || delta.abs() >= 1.0 {
        return Err(Error::UnphysicalDelta(delta));
    }
    let eps = if delta == 0.0 {
        0.0
    } else {
        // Same root as (1 - sqrt(1 - delta^2)) / delta, without cancellation.
        delta / (1.0 + (1.0 - delta * delta).sqrt())
    };
    let p = cr(1.0 + eps);
    let q = cr(1.0 - eps);
    let norm_n = (p.norm_sqr() + q.norm_sqr()).sqrt();
    Ok(CpBasisData {
        p,
        q,
        norm_n,
        epsilon: cr(eps),
    })
}

impl CpBasisData {
    pub fn delta(&self) -> f64 {
        (self.p.norm_sqr() - self.q.norm_sqr()) / (self.p.norm_sqr() + self.q.norm_sqr())
    }

    /// `K_S` in strangeness coordinates.
    pub fn k_short(&self) -> CVector {
        CVector::from_vec(vec![self.p / self.norm_n, -self.q / self.norm_n])
    }

    /// `K_L` in strangeness coordinates.
    pub fn k_long(&self) -> CVector {
        CVector::from_vec(vec![self.p / self.norm_n, self.q / self.norm_n])
    }

    /// `K_1 = (K0 - K0bar)/sqrt 2` in strangeness coordinates.
    pub fn k1(&self) -> CVector {
        CVector::from_vec(vec![cr(FRAC_1_SQRT_2), cr(-FRAC_1_SQRT_2)])
    }

    /// `K_2 = (K0 + K0bar)/sqrt 2` in strangeness coordinates.
    pub fn k2(&self) -> CVector {
        CVector::from_vec(vec![cr(FRAC_1_SQRT_2), cr(FRAC_1_SQRT_2)])
    }

    pub fn k_zero(&self) -> CVector {
        CVector::from_vec(vec![cr(1.0), cr(0.0)])
    }

    pub fn k_zero_bar(&self) -> CVector {
        CVector::from_vec(vec![cr(0.0), cr(1.0)])
    }

    /// Columns are the basis vectors of `basis` written in strangeness
    /// coordinates, so `strangeness = T * coords`.
    pub fn to_strangeness(&self, basis: Basis) -> CMatrix {
        let cols = match basis {
            Basis::Strangeness => return CMatrix::identity(2, 2),
            Basis::Mass => [self.k_short(), self.k_long()],
            Basis::Cp => [self.k1(), self.k2()],
        };
        CMatrix::from_columns(&cols)
    }

    /// `coords = T^{-1} * strangeness`.
    pub fn from_strangeness(&self, basis: Basis) -> CMatrix {
        let t = self.to_strangeness(basis);
        // 2x2 inverse; det = 2 p q / N^2 != 0 for |delta| < 1.
        let det = t[(0, 0)] * t[(1, 1)] - t[(0, 1)] * t[(1, 0)];
        CMatrix::from_row_slice(
            2,
            2,
            &[t[(1, 1)] / det, -t[(0, 1)] / det, -t[(1, 0)] / det, t[(0, 0)] / det],
        )
    }

    /// Single-particle change of coordinates `from -> to`.
    pub fn transform(&self, from: Basis, to: Basis) -> CMatrix {
        if from == to {
            return CMatrix::identity(2, 2);
        }
        self.from_strangeness(to) * self.to_strangeness(from)
    }
}

/// Re-expresses `v` in `target`. Two-component vectors are single
/// particles; four-component vectors are pairs and both factors are
/// converted.
pub fn basis_convert(v: &StateVector, target: Basis, cp: &CpBasisData) -> Result<StateVector> {
    let single = cp.transform(v.basis(), target);
    let m = match v.dim() {
        2 => single,
        4 => kron(&single, &single),
        d => return Err(Error::UnsupportedDimension(d)),
    };
    Ok(StateVector::new(m * v.components(), target))
}

/// `e^{i theta}`
pub(crate) fn phase(theta: f64) -> Complex64 {
    c(theta.cos(), theta.sin())
}
