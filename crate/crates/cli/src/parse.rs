//! Text parsers for everything that arrives on the command line or in a
//! config file. None of them panic; every failure is a [`ParseError`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use meson_eff::{kaon_defaults, bmeson_defaults, Basis, MesonParams, Quasispin, TimePolicy};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("invalid number {0:?}")]
    Number(String),
    #[error("expected {expected} comma-separated values, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("unknown {kind} {value:?}")]
    Tag { kind: &'static str, value: String },
    #[error("{0}")]
    Domain(String),
}

/// A real number, optionally written as a multiple or fraction of pi:
/// `1.5`, `pi`, `-pi/2`, `3pi/4`, `0.25*pi`, `2e-3`.
pub fn parse_angle(s: &str) -> Result<f64, ParseError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseError::Empty("number"));
    }
    let bad = || ParseError::Number(t.to_string());
    let lower = t.to_ascii_lowercase();
    let Some(at) = lower.find("pi") else {
        return finite(lower.parse::<f64>().map_err(|_| bad())?).ok_or_else(bad);
    };
    let (head, tail) = (&lower[..at], &lower[at + 2..]);
    let head = match head.trim().strip_suffix('*') {
        Some(h) if h.trim().is_empty() => return Err(bad()),
        Some(h) => h.trim(),
        None => head.trim(),
    };
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let tail = tail.trim();
    let div = match tail.strip_prefix('/') {
        Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
        None if tail.is_empty() => 1.0,
        None => return Err(bad()),
    };
    if div == 0.0 {
        return Err(bad());
    }
    finite(coef * PI / div).ok_or_else(bad)
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn split_fields(s: &str, n: usize) -> Result<Vec<f64>, ParseError> {
    if s.trim().is_empty() {
        return Err(ParseError::Empty("value list"));
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(ParseError::Arity {
            expected: n,
            found: parts.len(),
        });
    }
    parts.into_iter().map(parse_angle).collect()
}

/// `"alpha,phi"` as a quasispin.
pub fn parse_quasispin(s: &str) -> Result<Quasispin, ParseError> {
    let v = split_fields(s, 2)?;
    Quasispin::new(v[0], v[1]).map_err(|e| ParseError::Domain(e.to_string()))
}

/// An observable triple `"alpha,phi,t"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSpec {
    pub quasispin: Quasispin,
    pub t: f64,
}

impl FromStr for ObservableSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let v = split_fields(s, 3)?;
        if v[2] < 0.0 {
            return Err(ParseError::Domain(format!("negative time {}", v[2])));
        }
        let quasispin = Quasispin::new(v[0], v[1]).map_err(|e| ParseError::Domain(e.to_string()))?;
        Ok(Self { quasispin, t: v[2] })
    }
}

pub fn parse_observable(s: &str) -> Result<ObservableSpec, ParseError> {
    s.parse()
}

fn normalize(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace('_', "-")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemPreset {
    Kaon,
    BMeson,
    Stable,
    /// Both widths set to the kaon `gamma_l`.
    EqualWidth,
}

impl SystemPreset {
    pub fn params(self) -> MesonParams {
        match self {
            SystemPreset::Kaon => kaon_defaults(),
            SystemPreset::BMeson => bmeson_defaults(),
            SystemPreset::Stable => MesonParams::stable(),
            SystemPreset::EqualWidth => {
                let gl = kaon_defaults().gamma_l();
                MesonParams::new(gl, gl, 0.0, "equal-width").expect("kaon gamma_l is a valid width")
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SystemPreset::Kaon => "kaon",
            SystemPreset::BMeson => "bmeson",
            SystemPreset::Stable => "stable",
            SystemPreset::EqualWidth => "equal-width",
        }
    }
}

impl fmt::Display for SystemPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemPreset {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        match normalize(s).as_str() {
            "kaon" | "k0" | "k" => Ok(SystemPreset::Kaon),
            "bmeson" | "b-meson" | "b" | "bd" => Ok(SystemPreset::BMeson),
            "stable" => Ok(SystemPreset::Stable),
            "equal-width" | "kaon-equal-width" => Ok(SystemPreset::EqualWidth),
            _ => Err(ParseError::Tag {
                kind: "system",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeUnit {
    /// Mass-splitting units, `Δm = 1`.
    #[default]
    Dm,
    /// Multiples of the short lifetime.
    TauS,
}

impl TimeUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeUnit::Dm => "dm",
            TimeUnit::TauS => "tau-s",
        }
    }
}

impl fmt::Display for TimeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimeUnit {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        match normalize(s).as_str() {
            "dm" | "delta-m" => Ok(TimeUnit::Dm),
            "tau-s" | "taus" | "tau" => Ok(TimeUnit::TauS),
            _ => Err(ParseError::Tag {
                kind: "time unit",
                value: s.to_string(),
            }),
        }
    }
}

/// Figure presets: observable or setting choices plus default system and grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    F1a,
    F1b,
    F2a,
    F2b,
    F2c,
    F2d,
    F3a,
    F3b,
    F4a,
    F4b,
    F4c,
    F5a,
    F5b,
}

impl Figure {
    pub const ALL: [Figure; 13] = [
        Figure::F1a,
        Figure::F1b,
        Figure::F2a,
        Figure::F2b,
        Figure::F2c,
        Figure::F2d,
        Figure::F3a,
        Figure::F3b,
        Figure::F4a,
        Figure::F4b,
        Figure::F4c,
        Figure::F5a,
        Figure::F5b,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::F1a => "1a",
            Figure::F1b => "1b",
            Figure::F2a => "2a",
            Figure::F2b => "2b",
            Figure::F2c => "2c",
            Figure::F2d => "2d",
            Figure::F3a => "3a",
            Figure::F3b => "3b",
            Figure::F4a => "4a",
            Figure::F4b => "4b",
            Figure::F4c => "4c",
            Figure::F5a => "5a",
            Figure::F5b => "5b",
        }
    }

    pub fn is_bell(self) -> bool {
        matches!(self, Figure::F4a | Figure::F4b | Figure::F4c | Figure::F5a | Figure::F5b)
    }

    pub fn system(self) -> SystemPreset {
        match self {
            Figure::F1b => SystemPreset::Stable,
            Figure::F5a => SystemPreset::EqualWidth,
            Figure::F5b => SystemPreset::BMeson,
            _ => SystemPreset::Kaon,
        }
    }

    /// Default `(t_min, t_max, steps)` in `Δm` units.
    pub fn grid(self) -> (f64, f64, usize) {
        match self {
            Figure::F1a | Figure::F1b => (0.0, 4.0 * PI, 1001),
            Figure::F2a | Figure::F2b | Figure::F2c | Figure::F2d => (0.0, 10.0, 1001),
            Figure::F3a | Figure::F3b => (0.0, 6.0, 601),
            _ => (0.0, 6.0, 601),
        }
    }

    pub fn policy(self) -> Option<TimePolicy> {
        match self {
            Figure::F4a => Some(TimePolicy::AllEqual),
            Figure::F4b | Figure::F5a | Figure::F5b => Some(TimePolicy::Alternating1),
            Figure::F4c => Some(TimePolicy::Alternating2),
            _ => None,
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let n = normalize(s);
        let n = n.trim_start_matches("fig").trim_start_matches('-').trim();
        Figure::ALL
            .into_iter()
            .find(|f| f.as_str() == n)
            .ok_or_else(|| ParseError::Tag {
                kind: "figure",
                value: s.to_string(),
            })
    }
}

pub fn parse_policy(s: &str) -> Result<TimePolicy, ParseError> {
    s.parse().map_err(|_| ParseError::Tag {
        kind: "time policy",
        value: s.to_string(),
    })
}

pub fn parse_basis(s: &str) -> Result<Basis, ParseError> {
    s.parse().map_err(|_| ParseError::Tag {
        kind: "basis",
        value: s.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        assert_eq!(parse_angle(" pi ").unwrap(), PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.5*PI").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("2e-3").unwrap(), 2e-3);
        for bad in ["", "pi/0", "pix", "x", "inf", "NaN", "1e400", "pi/", "*pi"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn observables() {
        let o = parse_observable("pi/2,0,1.5").unwrap();
        assert_eq!(o.quasispin.alpha(), PI / 2.0);
        assert_eq!(o.t, 1.5);
        assert_eq!(parse_observable("1,2").unwrap_err(), ParseError::Arity { expected: 3, found: 2 });
        assert!(parse_observable("4,0,0").is_err());
        assert!(parse_observable("1,0,-1").is_err());
    }

    #[test]
    fn tags() {
        assert_eq!("Kaon".parse::<SystemPreset>().unwrap(), SystemPreset::Kaon);
        assert_eq!("b_meson".parse::<SystemPreset>().unwrap(), SystemPreset::BMeson);
        assert!("charm".parse::<SystemPreset>().is_err());
        assert_eq!("tau_s".parse::<TimeUnit>().unwrap(), TimeUnit::TauS);
        assert_eq!("fig4b".parse::<Figure>().unwrap(), Figure::F4b);
        assert_eq!("2D".parse::<Figure>().unwrap(), Figure::F2d);
        assert!("6a".parse::<Figure>().is_err());
        assert_eq!(parse_policy("c").unwrap(), TimePolicy::Alternating2);
        assert_eq!(parse_basis("flavour").unwrap(), Basis::Strangeness);
    }

    #[test]
    fn equal_width_preset_uses_long_width() {
        let p = SystemPreset::EqualWidth.params();
        assert_eq!(p.gamma_s(), p.gamma_l());
        assert_eq!(p.gamma_l(), kaon_defaults().gamma_l());
    }
}
