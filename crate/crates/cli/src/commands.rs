//! The five subcommands. Each returns its output instead of printing, so the
//! binary and the tests share one code path.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use meson_eff::bell::{sample_witness, CLASSICAL_BOUND, TSIRELSON_BOUND};
use meson_eff::evolution::DEFAULT_DT;
use meson_eff::linalg::{cr, max_abs, outer, CMatrix, CVector};
use meson_eff::uncertainty::{bipartite_mu_bound, complementary_time, delta_for_equal_times, misid_time};
use meson_eff::{
    bell_bounds, bell_operator, bipartite_expectation, cp_bell_test, cp_eigenvectors,
    effective_operator, evolve_bipartite, evolve_single_closed, joint_probabilities,
    lindblad_integrate, lindblad_integrate_bipartite, mu_bound, scan_bell, singlet_state, spectral,
    Basis, BellSetting, BipartiteGenerator, DensityMatrix, EigenPair, Layout, MesonParams,
    Quasispin, TimePolicy, UncertaintyReport,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::csv::{fmt_sig, Cell, Table};
use crate::parse::{Figure, ObservableSpec};

pub fn cmd_constants(cfg: &RunConfig) -> String {
    let p = &cfg.params;
    let mut out = String::new();
    let _ = writeln!(out, "system={}", p.label());
    let _ = writeln!(out, "gamma_s={}", fmt_sig(p.gamma_s()));
    let _ = writeln!(out, "gamma_l={}", fmt_sig(p.gamma_l()));
    let _ = writeln!(out, "delta={}", fmt_delta(p.delta()));
    let _ = writeln!(out, "Gamma={}", fmt_sig(p.gamma()));
    let _ = writeln!(out, "dGamma={}", fmt_sig(p.delta_gamma()));
    match p.tau_s() {
        Some(tau) => {
            let _ = writeln!(out, "tau_S={} dm (1 dm = {} tau_S)", fmt_sig(tau), fmt_sig(1.0 / tau));
        }
        None => {
            let _ = writeln!(out, "tau_S=inf (gamma_s = 0)");
        }
    }
    out
}

pub fn cmd_times(cfg: &RunConfig) -> Result<String> {
    let p = &cfg.params;
    let tau = |t: f64| p.dm_to_tau_s(t).map_or_else(|| "n/a".to_string(), fmt_sig);
    let misid = misid_time(p).context("misidentification time")?;
    let comp = complementary_time(p).context("complementary time")?;
    let star = delta_for_equal_times(p).context("delta for equal times")?;
    let mut out = String::new();
    let _ = writeln!(out, "misid={} tau_S ({} dm)", tau(misid), fmt_sig(misid));
    let _ = writeln!(out, "complementary={} tau_S ({} dm)", tau(comp), fmt_sig(comp));
    let _ = writeln!(out, "delta_equal_times={}", fmt_sig(star));
    let _ = writeln!(out, "ratio={}", fmt_sig(star / p.delta()));
    Ok(out)
}

/// Which observable's time follows the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanVar {
    First,
    #[default]
    Second,
    Both,
}

#[derive(Debug, Clone, Default)]
pub struct UncertaintyArgs {
    pub fig: Option<Figure>,
    pub obs1: Option<ObservableSpec>,
    pub obs2: Option<ObservableSpec>,
    pub scan: ScanVar,
    /// Use the CP-violating eigenvectors with quasispins written in this basis.
    pub cp_basis: Option<Basis>,
}

/// Eigenbasis source for one observable.
#[derive(Debug, Clone, Copy)]
enum Eigen {
    Plain(Quasispin),
    Cp(Quasispin, Basis),
}

impl Eigen {
    fn at(self, t: f64, p: &MesonParams) -> meson_eff::Result<EigenPair> {
        match self {
            Eigen::Plain(q) => spectral(&effective_operator(&q, t, p)?),
            Eigen::Cp(q, b) => cp_eigenvectors(&q, b, t, p),
        }
    }
}

const T1_FRACTIONS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

pub fn cmd_uncertainty(cfg: &RunConfig, args: &UncertaintyArgs) -> Result<Table> {
    let p = &cfg.params;
    let mut times = cfg
        .grid
        .points()
        .into_iter()
        .map(|t| cfg.to_dm(t))
        .collect::<Result<Vec<_>, _>>()?;
    match args.fig {
        Some(f @ (Figure::F3a | Figure::F3b)) => return pair_uncertainty(cfg, f, &times),
        Some(f) if f.is_bell() => bail!("figure {f} is a Bell scan; use the bell command"),
        _ => {}
    }
    let zero = Quasispin::k_zero();
    let (e1, e2, t1_fixed, t2_fixed, scan) = match args.fig {
        Some(Figure::F1a | Figure::F1b) => (Eigen::Plain(zero), Eigen::Plain(zero), 0.0, 0.0, ScanVar::Second),
        Some(f @ (Figure::F2a | Figure::F2b | Figure::F2c | Figure::F2d)) => {
            let (s, l) = (Quasispin::k_short(), Quasispin::k_long());
            let (a, b) = match f {
                Figure::F2a => (s, s),
                Figure::F2b => (l, s),
                Figure::F2c => (s, l),
                _ => (l, l),
            };
            if f == Figure::F2a && p.delta() != 0.0 && p.delta_gamma() != 0.0 {
                // The curve touches its maximum at a single instant; add it to the grid.
                let tc = complementary_time(p)?;
                if tc > times[0] && tc < times[times.len() - 1] {
                    let at = times.partition_point(|&t| t < tc);
                    if times[at] != tc {
                        times.insert(at, tc);
                    }
                }
            }
            (Eigen::Cp(a, Basis::Mass), Eigen::Cp(b, Basis::Mass), 0.0, 0.0, ScanVar::Second)
        }
        _ => {
            let default = ObservableSpec { quasispin: zero, t: 0.0 };
            let (o1, o2) = (args.obs1.unwrap_or(default), args.obs2.unwrap_or(default));
            let wrap = |q| match args.cp_basis {
                Some(b) => Eigen::Cp(q, b),
                None => Eigen::Plain(q),
            };
            (wrap(o1.quasispin), wrap(o2.quasispin), cfg.to_dm(o1.t)?, cfg.to_dm(o2.t)?, args.scan)
        }
    };
    let rows: Vec<(f64, UncertaintyReport)> = times
        .par_iter()
        .map(|&t| {
            let ta = if scan == ScanVar::Second { t1_fixed } else { t };
            let tb = if scan == ScanVar::First { t2_fixed } else { t };
            Ok((t, mu_bound(&e1.at(ta, p)?, &e2.at(tb, p)?)?))
        })
        .collect::<meson_eff::Result<_>>()?;
    let mut table = Table::new(&["t", "bound", "max_overlap", "argmax_i", "argmax_j"]);
    for (t, r) in rows {
        table.push(vec![
            cfg.from_dm(t)?.into(),
            r.bound.into(),
            r.max_overlap.into(),
            r.argmax_pair.0.into(),
            r.argmax_pair.1.into(),
        ]);
    }
    Ok(table)
}

/// Two-particle bounds between `O(0)⊗O(t)` and a second product observable
/// whose free time `t1` runs over `0, t/4, ..., t`.
fn pair_uncertainty(cfg: &RunConfig, fig: Figure, times: &[f64]) -> Result<Table> {
    let p = &cfg.params;
    let e = Eigen::Plain(Quasispin::k_zero());
    let cases: Vec<(f64, f64)> = times
        .iter()
        .flat_map(|&t| T1_FRACTIONS.iter().map(move |f| (t, f * t)))
        .collect();
    let rows: Vec<(f64, f64, UncertaintyReport)> = cases
        .par_iter()
        .map(|&(t, t1)| {
            let (a1, b1) = (e.at(0.0, p)?, e.at(t, p)?);
            let r = if fig == Figure::F3a {
                bipartite_mu_bound(&a1, &e.at(t1, p)?, &b1, &e.at(0.0, p)?)?
            } else {
                bipartite_mu_bound(&a1, &e.at(0.0, p)?, &b1, &e.at(t1, p)?)?
            };
            Ok((t, t1, r))
        })
        .collect::<meson_eff::Result<_>>()?;
    let mut table = Table::new(&[
        "t",
        "t1",
        "bound",
        "max_overlap",
        "argmax_i",
        "argmax_j",
        "argmax_i_b",
        "argmax_j_b",
    ]);
    for (t, t1, r) in rows {
        let (ib, jb) = r.argmax_pair_b.unwrap_or((0, 0));
        table.push(vec![
            cfg.from_dm(t)?.into(),
            cfg.from_dm(t1)?.into(),
            r.bound.into(),
            r.max_overlap.into(),
            r.argmax_pair.0.into(),
            r.argmax_pair.1.into(),
            ib.into(),
            jb.into(),
        ]);
    }
    Ok(table)
}

#[derive(Debug, Clone, Default)]
pub struct BellArgs {
    pub fig: Option<Figure>,
    pub policy: Option<TimePolicy>,
    /// Quasispins `[n, m, n', m']`; all `K0bar` when unset.
    pub quasispins: Option<[Quasispin; 4]>,
    pub cp_mode: bool,
    pub cp_test: bool,
}

pub enum BellOutput {
    Table(Table),
    Report(String),
}

pub fn cmd_bell(cfg: &RunConfig, args: &BellArgs) -> Result<BellOutput> {
    if args.cp_test {
        return Ok(BellOutput::Report(cp_report(cfg.params.delta())?));
    }
    if let Some(f) = args.fig.filter(|f| !f.is_bell()) {
        bail!("figure {f} is an uncertainty plot; use the uncertainty command");
    }
    let policy = args
        .policy
        .or_else(|| args.fig.and_then(Figure::policy))
        .unwrap_or(TimePolicy::Alternating1);
    let quasispins = args.quasispins.unwrap_or([Quasispin::k_zero_bar(); 4]);
    let times = cfg
        .grid
        .points()
        .into_iter()
        .map(|t| cfg.to_dm(t))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = scan_bell(policy, &times, &cfg.params, quasispins, args.cp_mode)?;
    let mut table = Table::new(&[
        "t",
        "lambda_min",
        "lambda_max",
        "summand_mu_bound",
        "classical_min",
        "classical_max",
        "tsirelson_min",
        "tsirelson_max",
    ]);
    for r in rows {
        let row: Vec<Cell> = vec![
            cfg.from_dm(r.t)?.into(),
            r.lambda_min.into(),
            r.lambda_max.into(),
            r.summand_mu_bound.into(),
            (-CLASSICAL_BOUND).into(),
            CLASSICAL_BOUND.into(),
            (-TSIRELSON_BOUND).into(),
            TSIRELSON_BOUND.into(),
        ];
        table.push(row);
    }
    Ok(BellOutput::Table(table))
}

fn cp_report(delta: f64) -> Result<String> {
    let r = cp_bell_test(delta)?;
    let verdict = |a: bool, b: bool| match (a, b) {
        (true, true) => "both variants violate",
        (false, false) => "no variant violates",
        (true, false) => "one variant violates (K_S)",
        (false, true) => "one variant violates (K_L)",
    };
    let mut out = String::new();
    let _ = writeln!(out, "delta={}", fmt_delta(delta));
    let _ = writeln!(
        out,
        "witness lambda_max: K_S variant={} K_L variant={}",
        fmt_sig(r.lambda_max_ks),
        fmt_sig(r.lambda_max_kl)
    );
    let _ = writeln!(out, "witness: {}", verdict(r.variant_ks_violates, r.variant_kl_violates));
    let _ = writeln!(
        out,
        "singlet CHSH: K_S variant={} K_L variant={}",
        fmt_sig(r.singlet_ks),
        fmt_sig(r.singlet_kl)
    );
    let _ = writeln!(
        out,
        "singlet: {}",
        verdict(r.singlet_ks > CLASSICAL_BOUND + 1e-9, r.singlet_kl > CLASSICAL_BOUND + 1e-9)
    );
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct VerifyArgs {
    pub trials: usize,
    pub literal_generator: bool,
}

pub struct VerifyReport {
    pub text: String,
    pub passed: bool,
}

const TOL_EVOLUTION: f64 = 1e-8;
const TOL_JOINT: f64 = 1e-9;
const TOL_WITNESS: f64 = 1e-9;

fn gaussian_vector(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v / cr(n)
}

fn random_density(rng: &mut ChaCha8Rng, d: usize, layout: Layout) -> DensityMatrix {
    let k = rng.random_range(1..=3);
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let m = w.iter().fold(CMatrix::zeros(d, d), |acc, wi| {
        acc + outer(&gaussian_vector(rng, d)) * cr(wi / total)
    });
    DensityMatrix::new(m, layout, Basis::Mass).expect("convex mixture of pure states")
}

fn random_quasispin(rng: &mut ChaCha8Rng) -> Quasispin {
    let alpha = rng.random_range(-1.0f64..1.0).acos();
    Quasispin::new(alpha, rng.random_range(0.0..std::f64::consts::TAU)).expect("angles in range")
}

fn max_of(xs: impl ParallelIterator<Item = meson_eff::Result<f64>>) -> Result<f64> {
    Ok(xs.try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?)
}

pub fn cmd_verify(cfg: &RunConfig, args: &VerifyArgs) -> Result<VerifyReport> {
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let p = &cfg.params;
    let n = args.trials;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let singles: Vec<_> = (0..n)
        .map(|_| (random_density(&mut rng, 2, Layout::Surviving), rng.random_range(0.0..5.0)))
        .collect();
    let pairs: Vec<_> = (0..n.div_ceil(25))
        .map(|_| (random_density(&mut rng, 4, Layout::PairSurviving), rng.random_range(0.0..2.0)))
        .collect();
    let joints: Vec<_> = (0..n)
        .map(|_| {
            let rho = random_density(&mut rng, 4, Layout::PairSurviving);
            let (qa, qb) = (random_quasispin(&mut rng), random_quasispin(&mut rng));
            let (t1, t2): (f64, f64) = (rng.random_range(0.0..5.0), rng.random_range(0.0..5.0));
            (rho, qa, qb, t1.max(t2), t1.min(t2))
        })
        .collect();
    let settings: Vec<_> = (0..n.div_ceil(10))
        .map(|_| {
            let mut side = || (random_quasispin(&mut rng), rng.random_range(0.0..6.0));
            BellSetting::new(side(), side(), side(), side())
        })
        .collect::<meson_eff::Result<_>>()?;

    let single_dev = max_of(singles.par_iter().map(|(rho, t)| {
        let a = evolve_single_closed(rho, *t, p)?;
        let b = lindblad_integrate(rho, *t, p, DEFAULT_DT)?.drop_final_coherences();
        Ok(max_abs(&(a.matrix() - b.matrix())))
    }))?;
    let pair_dev = max_of(pairs.par_iter().map(|(rho, t)| {
        let a = evolve_bipartite(rho, *t, p)?;
        let b = lindblad_integrate_bipartite(rho, *t, p, DEFAULT_DT, BipartiteGenerator::Independent)?
            .drop_final_coherences();
        Ok(max_abs(&(a.matrix() - b.matrix())))
    }))?;
    let joint_dev = max_of(joints.par_iter().map(|(rho, qa, qb, t_n, t_m)| {
        let heis = bipartite_expectation(
            &effective_operator(qa, *t_n, p)?,
            &effective_operator(qb, *t_m, p)?,
            rho,
        )?;
        let schr = joint_probabilities(&rho.embed(), qa, *t_n, qb, *t_m, p)?.correlation();
        Ok((heis - schr).abs())
    }))?;
    let seed = cfg.seed;
    let witness: Vec<(f64, f64)> = settings
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let b = bell_operator(s, p)?;
            let r = bell_bounds(s, p)?;
            let w = sample_witness(&b, 2_000, 1_000, seed.wrapping_add(i as u64));
            let breach = (w.visited_max - r.lambda_max).max(r.lambda_min - w.visited_min).max(0.0);
            Ok((breach, r.lambda_max - w.refined_max))
        })
        .collect::<meson_eff::Result<_>>()?;
    let witness_dev = witness.iter().map(|w| w.0).fold(0.0, f64::max);
    let witness_gap = witness.iter().map(|w| w.1).fold(0.0, f64::max);

    let mut passed = true;
    let mut out = String::new();
    let mut line = |name: &str, cases: usize, dev: f64, tol: f64| {
        let ok = dev <= tol;
        passed &= ok;
        let _ = writeln!(
            out,
            "{} {name}: {cases} cases, max deviation {} (tolerance {})",
            if ok { "ok  " } else { "FAIL" },
            fmt_sig(dev),
            fmt_sig(tol)
        );
    };
    line("closed form vs integrator (single)", singles.len(), single_dev, TOL_EVOLUTION);
    line("closed form vs integrator (pair)", pairs.len(), pair_dev, TOL_EVOLUTION);
    line("effective expectation vs joint probabilities", joints.len(), joint_dev, TOL_JOINT);
    line("witness bounds vs sampled states", settings.len(), witness_dev, TOL_WITNESS);
    let _ = writeln!(
        out,
        "info witness: largest lambda_max - sampled max = {}",
        fmt_sig(witness_gap)
    );
    if args.literal_generator {
        let rho = singlet_state().to_basis(Basis::Mass, &meson_eff::cp_basis_data(0.0)?).surviving();
        let rho = DensityMatrix::new(rho.matrix().clone(), Layout::PairSurviving, Basis::Mass)?;
        let closed = evolve_bipartite(&rho, 1.0, p)?;
        let literal = lindblad_integrate_bipartite(&rho, 1.0, p, DEFAULT_DT, BipartiteGenerator::LiteralSum)?
            .drop_final_coherences();
        let _ = writeln!(
            out,
            "info literal summed-jump generator: singlet at t=1 deviates from the factorized evolution by {} (expected, not a failure)",
            fmt_sig(max_abs(&(closed.matrix() - literal.matrix())))
        );
    }
    let _ = writeln!(out, "{}", if passed { "verify: all checks passed" } else { "verify: FAILED" });
    Ok(VerifyReport { text: out, passed })
}

/// `3.322e-3` style, with a plain `0` for CP-conserving systems.
fn fmt_delta(d: f64) -> String {
    if d == 0.0 { "0".into() } else { format!("{d:e}") }
}
