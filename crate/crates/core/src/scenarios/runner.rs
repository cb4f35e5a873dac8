use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ConfigError, OracleParams, ScenarioConfig, ScenarioKind};
use super::report::{Report, ReportRow, RowTime};
use crate::error::{Error, Result};
use crate::families::{plane_wave_family, resonant_family, FamilyMember, SemiclassicalFamily};
use crate::lattice::check_dim;
use crate::pairing::{
    dispersion_time_averaged, oracle_time_quadrature, oracle_time_quadrature_periodic, pairing_instantaneous,
    pairing_position_density, pairing_sup_bound, pairing_time_averaged,
};
use crate::predictions::{
    lipschitz_error_bound, predict_dispersion, predict_mu0_planewave, predict_mu1, predict_mu2, predict_torus_average,
    predict_zoll,
};
use crate::propagators::{evolve_torus, GaussianPacket, TimeScale};
use crate::symbols::TorusSymbol;
use crate::window::TestWindow;

/// Caps the worker threads of a run.
pub const THREADS_ENV: &str = "WIGNERLAB_THREADS";

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Compute(Error),
    Io(std::io::Error),
}

impl RunError {
    /// Process exit code: every failure to produce a report is a 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "invalid config:\n{e}"),
            RunError::Compute(e) => write!(f, "scenario failed: {e}"),
            RunError::Io(e) => write!(f, "cannot write report: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Compute(e)
    }
}

/// Reads the thread cap; unset or empty means no cap.
pub fn threads_from_env() -> std::result::Result<Option<usize>, ConfigError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError(vec![format!("{THREADS_ENV} must be a positive integer, got `{v}`")])),
        },
        _ => Ok(None),
    }
}

/// Validates, runs on a pool of at most `threads` workers and writes the CSV
/// and JSON summary under `out`.
pub fn execute(cfg: &ScenarioConfig, out: &Path, threads: Option<usize>) -> std::result::Result<Report, RunError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| RunError::Io(std::io::Error::other(e.to_string())))?;
    let report = pool.install(|| run_scenario(cfg))?;
    report
        .write(&cfg.csv_path(out), &cfg.summary_path(out))
        .map_err(RunError::Io)?;
    Ok(report)
}

/// Runs a validated config on the current rayon pool. Rows come out in a
/// fixed order: member, then symbol, then time.
pub fn run_scenario(cfg: &ScenarioConfig) -> std::result::Result<Report, RunError> {
    cfg.validate()?;
    let rows = match cfg.scenario {
        ScenarioKind::ZollCircle | ScenarioKind::TorusNonresonant => averaged_limit(cfg)?,
        ScenarioKind::ResonantPair => resonant_pair(cfg)?,
        ScenarioKind::EuclidDispersion => dispersion(cfg)?,
        ScenarioKind::InvarianceResidual => invariance(cfg)?,
        ScenarioKind::EgorovInvariant => egorov(cfg)?,
        ScenarioKind::MarginalConsistency => marginal(cfg)?,
        ScenarioKind::OracleCrosscheck => oracle(cfg)?,
    };
    Ok(Report::new(cfg.scenario.name(), rows, cfg.max_budget()))
}

fn members(cfg: &ScenarioConfig) -> Result<Vec<FamilyMember>> {
    let keep = |n: usize| cfg.depths.as_ref().is_none_or(|d| d.contains(&n));
    match &cfg.family {
        Some(f) => (1..=f.len()).filter(|&n| keep(n)).map(|n| f.member(n)).collect(),
        None => Ok(cfg.states.iter().filter(|m| keep(m.n)).cloned().collect()),
    }
}

fn torus_symbols(cfg: &ScenarioConfig) -> Vec<(&str, &TorusSymbol)> {
    cfg.symbols
        .iter()
        .filter_map(|s| s.symbol.as_ref().map(|a| (s.id.as_str(), a)))
        .collect()
}

fn window(cfg: &ScenarioConfig) -> Result<&TestWindow> {
    cfg.window
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("{} needs a window", cfg.scenario)))
}

/// Evaluates `f` on every (member, symbol) pair in parallel, keeping order.
fn per_pair<F>(members: &[FamilyMember], symbols: &[(&str, &TorusSymbol)], f: F) -> Result<Vec<ReportRow>>
where
    F: Fn(&FamilyMember, &str, &TorusSymbol) -> Result<Vec<ReportRow>> + Sync,
{
    let jobs: Vec<(&FamilyMember, &str, &TorusSymbol)> = members
        .iter()
        .flat_map(|m| symbols.iter().map(move |&(id, a)| (m, id, a)))
        .collect();
    let parts: Vec<Vec<ReportRow>> = jobs.par_iter().map(|&(m, id, a)| f(m, id, a)).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn averaged_limit(cfg: &ScenarioConfig) -> Result<Vec<ReportRow>> {
    let w = window(cfg)?;
    let Some(SemiclassicalFamily::WavePacket { x0, xi0, .. }) = &cfg.family else {
        return Err(Error::InvalidParameter("a wave-packet family is required".into()));
    };
    let name = cfg.scenario.name();
    let tol = cfg.tolerance();
    let mass = w.integral();
    per_pair(&members(cfg)?, &torus_symbols(cfg), |m, id, a| {
        let p = pairing_time_averaged(&m.state, a, m.h, &cfg.time_scale, w)?;
        let predicted = match cfg.scenario {
            ScenarioKind::ZollCircle => predict_zoll(x0[0], xi0[0], a)?,
            _ => {
                let dir = cfg.direction.as_ref().expect("validated");
                predict_torus_average(x0, dir, a)?
            }
        } * mass;
        let alpha = cfg.time_scale.alpha(m.h)?;
        Ok(vec![ReportRow::new(name, m.n, m.h, alpha, RowTime::Averaged, id, p.value, p.budget, predicted, tol)])
    })
}

fn resonant_pair(cfg: &ScenarioConfig) -> Result<Vec<ReportRow>> {
    let w = window(cfg)?;
    let family = cfg.family.as_ref().expect("validated");
    let (SemiclassicalFamily::PlaneWave { rho, xi0, depth, .. } | SemiclassicalFamily::Resonant { rho, xi0, depth, .. }) =
        family
    else {
        return Err(Error::InvalidParameter("resonant-pair needs a plane-wave or resonant family".into()));
    };
    let ladder = family.ladder()?.expect("ladder family");
    let ns: Vec<usize> = (1..=*depth)
        .filter(|n| cfg.depths.as_ref().is_none_or(|d| d.contains(n)))
        .collect();
    let xi0_f = xi0.to_f64();
    let name = cfg.scenario.name();
    let tol = cfg.tolerance();
    let mut pairs = Vec::new();
    for &n in &ns {
        let u = plane_wave_family(rho, xi0, &ladder, n)?;
        let v = resonant_family(rho, xi0, &ladder, n)?;
        let root_h = u.h.sqrt();
        let tilt: Vec<f64> = ladder.step(n)?.k_f64().iter().map(|k| k * root_h).collect();
        pairs.push((u, v, tilt));
    }
    let zero = vec![0.0; rho.dim()];
    let symbols = torus_symbols(cfg);
    let jobs: Vec<(usize, &str, &TorusSymbol)> = (0..pairs.len())
        .flat_map(|i| symbols.iter().map(move |&(id, a)| (i, id, a)))
        .collect();
    let parts: Vec<Vec<ReportRow>> = jobs
        .par_iter()
        .map(|&(i, id, a)| -> Result<Vec<ReportRow>> {
            let (u, v, tilt) = &pairs[i];
            let h = u.h;
            let alpha = cfg.time_scale.alpha(h)?;
            let mu0 = predict_mu0_planewave(rho, &xi0_f, a)?;
            let mu1 = predict_mu1(rho, xi0, a, w)?;
            let mu2 = predict_mu2(rho, &xi0_f, a, w)?;
            let sup = w.sup_phi_hat();
            let mut rows = Vec::with_capacity(4);
            for (tag, member, offset, limit) in [("u", u, &zero, mu1), ("v", v, tilt, mu2)] {
                let sid = format!("{tag}:{id}");
                let avg = pairing_time_averaged(&member.state, a, h, &cfg.time_scale, w)?;
                let lip = lipschitz_error_bound(rho, a, sup, h, offset)?;
                rows.push(ReportRow::new(name, u.n, h, alpha, RowTime::Averaged, sid.clone(), avg.value, avg.budget + lip, limit, tol));
                let now = pairing_instantaneous(&member.state, a, h)?;
                let lip0 = lipschitz_error_bound(rho, a, 1.0, h, offset)?;
                rows.push(ReportRow::new(name, u.n, h, alpha, RowTime::At(0.0), sid, now.value, now.budget + lip0, mu0, tol));
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn dispersion(cfg: &ScenarioConfig) -> Result<Vec<ReportRow>> {
    let w = window(cfg)?;
    let p = cfg.packet.as_ref().expect("validated");
    let name = cfg.scenario.name();
    let tol = cfg.tolerance();
    let observables: Vec<_> = cfg
        .symbols
        .iter()
        .filter_map(|s| s.observable.as_ref().map(|o| (s.id.as_str(), o)))
        .collect();
    let jobs: Vec<_> = p
        .h_grid
        .iter()
        .enumerate()
        .flat_map(|(i, &h)| observables.iter().map(move |&(id, o)| (i + 1, h, id, o)))
        .collect();
    jobs.par_iter()
        .map(|&(n, h, id, o)| {
            let packet = GaussianPacket::new(p.x0.clone(), p.xi0.clone(), p.sigma, h)?;
            let alpha = cfg.time_scale.alpha(h)?;
            let v = dispersion_time_averaged(&packet, &cfg.time_scale, w, o, p.horizon, p.step_alpha / alpha)?;
            Ok(ReportRow::new(name, n, h, alpha, RowTime::Averaged, id, v.value, v.budget, predict_dispersion(), tol))
        })
        .collect()
}

/// One row of an invariance-residual table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub n: usize,
    pub h: f64,
    pub alpha: f64,
    /// The time-averaged pairing against `{a, |ξ|²/2}`.
    pub value: Complex64,
    pub residual: f64,
    /// `residual·α_h`.
    pub scaled: f64,
    /// `2‖φ'‖₁ sup_t|⟨W(t), a⟩| / α_h`, which bounds the residual.
    pub bound: f64,
    /// Truncation budget of the bracket profiles.
    pub budget: f64,
}

fn residual_row(member: &FamilyMember, symbol: &TorusSymbol, window: &TestWindow, scale: &TimeScale) -> Result<ResidualRow> {
    let bracket = symbol.poisson_bracket_with_p();
    let alpha = scale.alpha(member.h)?;
    let p = pairing_time_averaged(&member.state, &bracket, member.h, scale, window)?;
    let sup = pairing_sup_bound(&member.state, symbol)?;
    Ok(ResidualRow {
        n: member.n,
        h: member.h,
        alpha,
        value: p.value,
        residual: p.value.norm(),
        scaled: p.value.norm() * alpha,
        bound: 2.0 * window.derivative_l1() * sup / alpha,
        budget: p.budget,
    })
}

/// Residual of time-averaged invariance along the family members `depths`
/// (1-based; all members when empty).
pub fn invariance_residual(
    family: &SemiclassicalFamily,
    symbol: &TorusSymbol,
    window: &TestWindow,
    scale: &TimeScale,
    depths: &[usize],
) -> Result<Vec<ResidualRow>> {
    family.validate()?;
    check_dim(family.dim(), symbol.dim())?;
    let ns: Vec<usize> = if depths.is_empty() { (1..=family.len()).collect() } else { depths.to_vec() };
    ns.par_iter()
        .map(|&n| residual_row(&family.member(n)?, symbol, window, scale))
        .collect()
}

fn invariance(cfg: &ScenarioConfig) -> Result<Vec<ReportRow>> {
    let w = window(cfg)?;
    let name = cfg.scenario.name();
    let tol = cfg.tolerance();
    per_pair(&members(cfg)?, &torus_symbols(cfg), |m, id, a| {
        let r = residual_row(m, a, w, &cfg.time_scale)?;
        let zero = Complex64::new(0.0, 0.0);
        Ok(vec![ReportRow::new(name, m.n, m.h, r.alpha, RowTime::Averaged, id, r.value, r.bound + r.budget, zero, tol)])
    })
}

/// `(t, ⟨W(t), a⟩)` along `times`, plus the `t = 0` value.
fn egorov_trace(
    member: &FamilyMember,
    symbol: &TorusSymbol,
    scale: &TimeScale,
    times: &[f64],
) -> Result<(Complex64, Vec<(f64, Complex64)>)> {
    if !symbol.is_x_independent() {
        return Err(Error::InadmissibleSymbol("pointwise invariance needs a symbol with l = 0 terms only".into()));
    }
    let reference = pairing_instantaneous(&member.state, symbol, member.h)?.value;
    let trace = times
        .iter()
        .map(|&t| Ok((t, pairing_instantaneous(&evolve_torus(&member.state, member.h, scale, t)?, symbol, member.h)?.value)))
        .collect::<Result<_>>()?;
    Ok((reference, trace))
}

/// Largest `|⟨W(t), a⟩ - ⟨W(0), a⟩|` over every member and every `t` in
/// `times`. Only symbols without `x`-dependence are accepted.
pub fn egorov_invariant_check(
    family: &SemiclassicalFamily,
    symbol: &TorusSymbol,
    scale: &TimeScale,
    times: &[f64],
) -> Result<f64> {
    family.validate()?;
    check_dim(family.dim(), symbol.dim())?;
    let devs: Vec<f64> = family
        .members()?
        .par_iter()
        .map(|m| {
            let (reference, trace) = egorov_trace(m, symbol, scale, times)?;
            Ok(trace.iter().map(|(_, v)| (v - reference).norm()).fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

fn egorov(cfg: &ScenarioConfig) -> Result<Vec<ReportRow>> {
    let name = cfg.scenario.name();
    let tol = cfg.tolerance();
    let times = cfg.time_grid();
    per_pair(&members(cfg)?, &torus_symbols(cfg), |m, id, a| {
        let alpha = cfg.time_scale.alpha(m.h)?;
        let (reference, trace) = egorov_trace(m, a, &cfg.time_scale, &times)?;
        Ok(trace
            .into_iter()
            .map(|(t, v)| ReportRow::new(name, m.n, m.h, alpha, RowTime::At(t), id, v, 0.0, reference, tol))
            .collect())
    })
}

fn marginal(cfg: &ScenarioConfig) -> Result<Vec<ReportRow>> {
    let name = cfg.scenario.name();
    let tol = cfg.tolerance();
    let times = cfg.time_grid();
    per_pair(&members(cfg)?, &torus_symbols(cfg), |m, id, a| {
        let alpha = cfg.time_scale.alpha(m.h)?;
        times
            .iter()
            .map(|&t| {
                let evolved = evolve_torus(&m.state, m.h, &cfg.time_scale, t)?;
                let weyl = pairing_instantaneous(&evolved, a, m.h)?;
                let density = pairing_position_density(&evolved, a)?;
                Ok(ReportRow::new(name, m.n, m.h, alpha, RowTime::At(t), id, weyl.value, weyl.budget, density.value, tol))
            })
            .collect()
    })
}

fn oracle(cfg: &ScenarioConfig) -> Result<Vec<ReportRow>> {
    let w = window(cfg)?;
    let name = cfg.scenario.name();
    let tol = cfg.tolerance();
    per_pair(&members(cfg)?, &torus_symbols(cfg), |m, id, a| {
        let closed = pairing_time_averaged(&m.state, a, m.h, &cfg.time_scale, w)?;
        let quad = match &cfg.oracle {
            OracleParams::Periodic => oracle_time_quadrature_periodic(&m.state, a, m.h, &cfg.time_scale, w)?,
            OracleParams::Direct { horizon, step } => {
                oracle_time_quadrature(&m.state, a, m.h, &cfg.time_scale, w, *horizon, *step, f64::INFINITY)?
            }
        };
        let alpha = cfg.time_scale.alpha(m.h)?;
        Ok(vec![ReportRow::new(
            name,
            m.n,
            m.h,
            alpha,
            RowTime::Averaged,
            id,
            closed.value,
            closed.budget + quad.budget,
            quad.value,
            tol,
        )])
    })
}
