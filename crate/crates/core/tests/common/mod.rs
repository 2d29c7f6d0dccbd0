#![allow(dead_code)]

use meson_eff::linalg::{cr, outer, CMatrix, CVector};
use meson_eff::{cp_basis_data, singlet_state, Basis, DensityMatrix, Layout, Quasispin};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{PI, TAU};

pub fn random_quasispin(rng: &mut ChaCha8Rng) -> Quasispin {
    // Uniform on the sphere: cos(alpha) uniform.
    let alpha = rng.random_range(-1.0f64..1.0).acos();
    Quasispin::new(alpha.clamp(0.0, PI), rng.random_range(0.0..TAU)).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    v / cr(n)
}

/// Mixture of up to three random pure states.
pub fn random_density(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let k = rng.random_range(1..=3);
    let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter().fold(CMatrix::zeros(d, d), |acc, w| {
        acc + outer(&random_vector(rng, d)) * cr(w / total)
    })
}

pub fn random_single(rng: &mut ChaCha8Rng) -> DensityMatrix {
    DensityMatrix::new(random_density(rng, 2), Layout::Surviving, Basis::Mass).unwrap()
}

pub fn random_pair(rng: &mut ChaCha8Rng) -> DensityMatrix {
    DensityMatrix::new(random_density(rng, 4), Layout::PairSurviving, Basis::Mass).unwrap()
}

/// `(|K0 K0bar> - |K0bar K0>)/sqrt 2` on surviving ⊗ surviving, mass basis.
pub fn singlet_mass() -> DensityMatrix {
    let s = singlet_state()
        .to_basis(Basis::Mass, &cp_basis_data(0.0).unwrap())
        .surviving();
    DensityMatrix::new(s.matrix().clone(), Layout::PairSurviving, Basis::Mass).unwrap()
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    meson_eff::linalg::max_abs(&(a - b))
}
