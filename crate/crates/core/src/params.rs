//! Physical parameters of a neutral-meson system.
//!
//! All widths are expressed in units of the mass splitting (`dm = 1`), so a
//! time `t` is the dimensionless product `t * dm`.

use crate::error::{Error, Result};

/// Lifetime of the short-lived kaon, seconds.
pub const KAON_TAU_S_SECONDS: f64 = 0.89e-10;
/// Lifetime of the long-lived kaon, seconds.
pub const KAON_TAU_L_SECONDS: f64 = 5.17e-8;
/// Leptonic charge asymmetry of K_L decays.
pub const KAON_DELTA: f64 = 3.322e-3;
/// `t = 5.4` in mass-splitting units corresponds to `11.4 tau_S`.
pub const KAON_DM_TAU_S: f64 = 5.4 / 11.4;
/// B-meson width in mass-splitting units.
pub const BMESON_GAMMA: f64 = 1.0 / 0.776;

#[derive(Debug, Clone, PartialEq)]
pub struct MesonParams {
    gamma_s: f64,
    gamma_l: f64,
    delta: f64,
    label: String,
}

impl MesonParams {
    pub fn new(gamma_s: f64, gamma_l: f64, delta: f64, label: impl Into<String>) -> Result<Self> {
        if !(gamma_s.is_finite() && gamma_l.is_finite()) {
            return Err(Error::InvalidParams("decay widths must be finite".into()));
        }
        if gamma_s < 0.0 || gamma_l < 0.0 {
            return Err(Error::InvalidParams("decay widths must be non-negative".into()));
        }
        if gamma_s < gamma_l {
            return Err(Error::InvalidParams(format!(
                "gamma_s ({gamma_s}) must be >= gamma_l ({gamma_l}); S labels the shorter-lived state"
            )));
        }
        if !delta.is_finite() || delta.abs() >= 1.0 {
            return Err(Error::UnphysicalDelta(delta));
        }
        Ok(Self {
            gamma_s,
            gamma_l,
            delta,
            label: label.into(),
        })
    }

    /// Neutral kaons.
    pub fn kaon() -> Self {
        let gamma_s = 1.0 / KAON_DM_TAU_S;
        let gamma_l = gamma_s * (KAON_TAU_S_SECONDS / KAON_TAU_L_SECONDS);
        Self::new(gamma_s, gamma_l, KAON_DELTA, "kaon").expect("kaon preset is valid")
    }

    /// B mesons: equal widths, no CP violation.
    pub fn bmeson() -> Self {
        Self::new(BMESON_GAMMA, BMESON_GAMMA, 0.0, "bmeson").expect("bmeson preset is valid")
    }

    /// A non-decaying two-state system.
    pub fn stable() -> Self {
        Self::new(0.0, 0.0, 0.0, "stable").expect("stable preset is valid")
    }

    /// Both mass eigenstates decay with the same width.
    pub fn equal_width(gamma: f64) -> Result<Self> {
        Self::new(gamma, gamma, 0.0, "equal-width")
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.gamma_s, self.gamma_l, delta, self.label.clone())
    }

    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }

    pub fn gamma_l(&self) -> f64 {
        self.gamma_l
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Mean width `(gamma_s + gamma_l) / 2`; damps the S-L coherence.
    pub fn gamma(&self) -> f64 {
        0.5 * (self.gamma_s + self.gamma_l)
    }

    /// Width difference `(gamma_l - gamma_s) / 2` (non-positive by convention).
    pub fn delta_gamma(&self) -> f64 {
        0.5 * (self.gamma_l - self.gamma_s)
    }

    /// `tau_S = 1 / gamma_s` in mass-splitting units; `None` for a stable system.
    pub fn tau_s(&self) -> Option<f64> {
        (self.gamma_s > 0.0).then(|| 1.0 / self.gamma_s)
    }

    /// Converts a time in mass-splitting units into multiples of `tau_S`.
    pub fn dm_to_tau_s(&self, t: f64) -> Option<f64> {
        self.tau_s().map(|tau| t / tau)
    }

    /// Converts a time in multiples of `tau_S` into mass-splitting units.
    pub fn tau_s_to_dm(&self, t: f64) -> Option<f64> {
        self.tau_s().map(|tau| t * tau)
    }
}

pub fn kaon_defaults() -> MesonParams {
    MesonParams::kaon()
}

pub fn bmeson_defaults() -> MesonParams {
    MesonParams::bmeson()
}
