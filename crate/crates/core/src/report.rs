//! Experiment runners behind the command line: analytic tables, raw samples,
//! the verification suite and plot-ready series.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::config::ExperimentSpec;
use crate::error::{Error, Result};
use crate::limits::LimitLawSet;
use crate::sim::{self, FunctionalSample, MonteCarloResult};
use crate::stats::{dkw_radius, independence_gap, ks_distance, EmpiricalDistribution};

/// Runs `f` on a thread pool of the given size; `None` uses the global pool.
/// Results never depend on the size.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_all(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Serializes `value` as pretty JSON followed by a newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorSummary {
    pub zeros: Vec<f64>,
    pub poles: Vec<f64>,
    pub killing: f64,
    pub drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitsReport {
    pub gamma: f64,
    pub c_gamma: f64,
    pub ell: f64,
    pub ell_phihat_gamma: f64,
    pub k: f64,
    pub m: f64,
    pub phi0: f64,
    /// Mass of the overshoot limit at 0.
    pub atom: f64,
    /// Mass of the stationary law at 0.
    pub y_inf_atom: f64,
    /// `ell * C_gamma * phi_hat(gamma)`; times `lambda` it is the Gumbel intensity.
    pub gumbel_constant: f64,
    pub lambda: f64,
    pub ascending: FactorSummary,
    pub descending: FactorSummary,
    /// Table points where Laplace inversion was judged unreliable.
    pub inversion_warnings: Vec<String>,
}

fn summary(f: &crate::ladder::RationalBernstein) -> FactorSummary {
    FactorSummary {
        zeros: f.zeros().to_vec(),
        poles: f.poles().to_vec(),
        killing: f.killing(),
        drift: f.drift(),
    }
}

fn inverted(res: Result<Vec<f64>>, len: usize, what: &str, warnings: &mut Vec<String>) -> Vec<Option<f64>> {
    match res {
        Ok(v) => v.into_iter().map(Some).collect(),
        Err(e) => {
            warnings.push(format!("{what}: {e}"));
            vec![None; len]
        }
    }
}

/// Computes the constants and tabulates the laws. Writes the JSON report to
/// `out` and the table next to it with a `.csv` extension.
pub fn run_limits(spec: &ExperimentSpec, out: Option<&Path>) -> Result<LimitsReport> {
    let model = spec.model()?;
    let laws = LimitLawSet::from_model(&model, Some(spec.grid.lambda))?;
    let f = &laws.fact;
    let xs = spec.table.xs();
    let mut warnings = Vec::new();
    let z_inv = inverted(laws.z_inf_tail_inverted(&xs), xs.len(), "z_tail_inverted", &mut warnings);
    let y_inv = inverted(laws.y_inf_tail_inverted(&xs), xs.len(), "y_tail_inverted", &mut warnings);
    let report = LimitsReport {
        gamma: laws.gamma,
        c_gamma: f.c_gamma,
        ell: f.ell,
        ell_phihat_gamma: f.ell_phihat_gamma(),
        k: f.k,
        m: f.m(),
        phi0: f.phi0(),
        atom: laws.z_inf_atom(),
        y_inf_atom: laws.y_inf_atom(),
        gumbel_constant: f.ell_phihat_gamma() * f.c_gamma,
        lambda: spec.grid.lambda,
        ascending: summary(&f.ascending),
        descending: summary(&f.descending),
        inversion_warnings: warnings,
    };
    let mut csv = String::from(
        "x,z_laplace,z_tail,z_tail_inverted,y_laplace,y_tail,y_tail_inverted,gumbel_cdf\n",
    );
    for (i, &x) in xs.iter().enumerate() {
        let z_tail = laws.z_inf_tail(x).ok();
        csv.push_str(&format!(
            "{x},{},{},{},{},{},{},{}\n",
            laws.z_inf_laplace(x),
            cell(z_tail),
            cell(z_inv[i]),
            laws.y_inf_laplace(x),
            laws.y_inf_tail(x),
            cell(y_inv[i]),
            laws.gumbel_cdf(x)?,
        ));
    }
    if let Some(out) = out {
        write_all(out, &to_json(&report))?;
        write_all(&out.with_extension("csv"), &csv)?;
    }
    Ok(report)
}

pub const SAMPLE_HEADER: &str = "index,t,x,y_offset,y_t,z,m,tau,straddle,weight";

fn sample_row(cfg: &sim::SimConfig, s: &FunctionalSample) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        s.index,
        cfg.t,
        cfg.x,
        cfg.y_offset,
        s.y_t,
        cell(s.z),
        s.m,
        cell(s.tau),
        u8::from(s.straddle),
        s.weight
    )
}

const CHUNK: u64 = 4096;

/// Streams samples `sim.start .. sim.start + sim.n` to `out` as CSV. Returns
/// the number of rows written.
pub fn run_simulate(spec: &ExperimentSpec, out: &Path) -> Result<u64> {
    let model = spec.model()?;
    let cfg = spec.sim_config(&model, spec.sim.t, spec.sim.x, spec.grid.y_offset);
    cfg.validate(&model)?;
    let mut w = create(out)?;
    let io = |e| Error::io(out, e);
    w.write_all(SAMPLE_HEADER.as_bytes()).map_err(io)?;
    w.write_all(b"\n").map_err(io)?;
    let (start, end) = (spec.sim.start, spec.sim.start + spec.sim.n);
    let mut lo = start;
    while lo < end {
        let hi = (lo + CHUNK).min(end);
        for s in sim::sample_range(&model, &cfg, lo..hi) {
            w.write_all(sample_row(&cfg, &s).as_bytes()).map_err(io)?;
        }
        lo = hi;
    }
    w.flush().map_err(io)?;
    Ok(spec.sim.n)
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    /// `"<="` or `">="`: how `statistic` is compared with `threshold`.
    pub comparison: &'static str,
    pub pass: bool,
}

impl Verdict {
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            comparison: "<=",
            pass: statistic <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            comparison: ">=",
            pass: statistic >= threshold,
        }
    }
}

pub const CHECKS: &[&str] = &[
    "cramer_root",
    "wh_identity",
    "overshoot",
    "stationary",
    "gumbel",
    "independence",
    "exit",
    "tilted_overshoot",
    "straddle",
];

/// `100` points `i * s` with `s` log-spaced over `[1e-2, 1e2]`.
pub fn identity_test_points() -> Vec<Complex64> {
    (0..100)
        .map(|k| Complex64::new(0.0, 10f64.powf(-2.0 + 4.0 * k as f64 / 99.0)))
        .collect()
}

/// CDF of `Y(inf)` conditioned on being positive.
pub fn stationary_positive_cdf(laws: &LimitLawSet, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    1.0 - laws.y_inf_tail(y) / (1.0 - laws.y_inf_atom())
}

fn z_cdf(laws: &LimitLawSet) -> impl Fn(f64) -> f64 + '_ {
    move |x| laws.z_inf_cdf(x).unwrap_or(f64::NAN)
}

/// Runs the configured checks. Monte Carlo checks use `sim.n` paths.
pub fn run_verify(spec: &ExperimentSpec) -> Result<Vec<Verdict>> {
    let v = &spec.verify;
    for c in &v.checks {
        if !CHECKS.contains(&c.as_str()) {
            return Err(Error::Config(format!("unknown check {c:?}")));
        }
    }
    let enabled = |c: &str| v.checks.is_empty() || v.checks.iter().any(|x| x == c);
    let model = spec.model()?;
    let thresholds = spec.grid.thresholds()?;
    let laws = LimitLawSet::from_model(&model, Some(spec.grid.lambda))?;
    let gamma = laws.gamma;
    let mut out = Vec::new();

    if enabled("cramer_root") {
        out.push(Verdict::at_most("cramer_root", model.psi(gamma)?.abs(), v.tol_root));
    }
    if enabled("wh_identity") {
        let worst = identity_test_points()
            .into_iter()
            .map(|th| laws.fact.identity_residual(&model, th))
            .fold(0.0, f64::max);
        out.push(Verdict::at_most("wh_identity", worst, v.tol_wh));
        out.push(Verdict::at_most("phi_at_minus_gamma", laws.fact.phi(-gamma).abs(), 1e-9));
    }
    if enabled("overshoot") {
        let cfg = spec.sim_config(&model, spec.sim.t, spec.sim.x, spec.grid.y_offset);
        let r = sim::monte_carlo(&model, &cfg, None)?;
        if r.z.is_empty() {
            out.push(Verdict::at_least("overshoot_observed", 0.0, 1.0));
        } else {
            out.push(Verdict::at_most("overshoot_ks", ks_distance(&r.z, z_cdf(&laws)), v.tol_overshoot_ks));
            let gap = (r.z.atom_fraction() - laws.z_inf_atom()).abs();
            out.push(Verdict::at_most("overshoot_atom", gap, v.tol_overshoot_ks));
        }
    }
    if enabled("stationary") {
        let cfg = spec.sim_config(&model, v.stationary_t, spec.sim.x, 0.0);
        let r = sim::monte_carlo(&model, &cfg, None)?;
        let gap = (r.y_t.atom_fraction() - laws.y_inf_atom()).abs();
        out.push(Verdict::at_most("stationary_atom", gap, v.tol_atom));
        let pos = r.y_t.positive_part();
        if !pos.is_empty() {
            let ks = ks_distance(&pos, |y| stationary_positive_cdf(&laws, y));
            out.push(Verdict::at_most("stationary_ks", ks, v.tol_stationary_ks));
        }
    }
    if enabled("gumbel") || enabled("independence") {
        let grid = spec.coupled_grid(gamma)?;
        let runs: Vec<(f64, MonteCarloResult)> = grid
            .iter()
            .map(|&(t, x)| {
                let cfg = spec.sim_config(&model, t, x, spec.grid.y_offset);
                sim::monte_carlo(&model, &cfg, Some(&thresholds)).map(|r| (x, r))
            })
            .collect::<Result<_>>()?;
        if enabled("gumbel") {
            let mut ks = Vec::new();
            for (x, r) in &runs {
                let d = ks_distance(&r.m, |z| laws.gumbel_cdf(z).unwrap_or(f64::NAN));
                out.push(Verdict::at_most(format!("gumbel_ks[x={x}]"), d, v.tol_gumbel_ks));
                ks.push(d);
            }
            if ks.len() > 1 {
                let worst = ks.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
                out.push(Verdict::at_most("gumbel_ks_increase", worst, 0.0));
            }
        }
        if enabled("independence") {
            let reports = runs
                .iter()
                .map(|(_, r)| independence_gap(r.counts.as_ref().expect("grid counts recorded")))
                .collect::<Result<Vec<_>>>();
            match reports {
                Ok(reports) => {
                    let last = reports.last().expect("grid is non-empty");
                    out.push(Verdict::at_most("independence_gap", last.gap, v.tol_gap));
                    if reports.len() > 1 {
                        let worst = reports
                            .windows(2)
                            .map(|w| w[1].gap - w[0].gap - w[1].dkw_radius)
                            .fold(f64::NEG_INFINITY, f64::max);
                        out.push(Verdict::at_most("independence_gap_increase", worst, 0.0));
                    }
                }
                // No passage observed at some grid point.
                Err(_) => out.push(Verdict::at_least("independence_observed", 0.0, 1.0)),
            }
        }
    }
    if enabled("exit") {
        let (est, _) = sim::importance_sample_exit(&model, v.exit_x, v.exit_z, spec.sim.n, spec.sim.seed)?;
        let want = laws.two_sided_exit_asym(v.exit_x, v.exit_z);
        out.push(Verdict::at_most("exit_relative_error", (est / want - 1.0).abs(), v.tol_exit));
    }
    if enabled("tilted_overshoot") {
        for &[q, u] in &v.quadrature_pairs {
            let est = sim::tilted_overshoot_quadrature(
                &model,
                q,
                u,
                v.quadrature_nodes,
                v.quadrature_per_node,
                spec.sim.seed,
            )?;
            let want = laws.tilted_overshoot_transform(q, u)?;
            out.push(Verdict::at_most(
                format!("tilted_overshoot[q={q},u={u}]"),
                (est / want - 1.0).abs(),
                v.tol_quadrature,
            ));
        }
    }
    if enabled("straddle") && !model.has_diffusion() && v.straddle_x.len() >= 2 {
        let p = |x: f64| {
            let t = spec.grid.lambda * (gamma * x).exp();
            sim::straddle_probability(&model, t, x, v.straddle_n, spec.sim.seed).map(|r| r.0)
        };
        let first = p(v.straddle_x[0])?;
        let last = p(*v.straddle_x.last().expect("len >= 2"))?;
        // A zero count is floored at half an observation.
        let ratio = first / last.max(0.5 / v.straddle_n as f64);
        out.push(Verdict::at_least("straddle_ratio", ratio, v.min_straddle_ratio));
    }
    Ok(out)
}

/// Runs the suite and writes the verdicts as JSON.
pub fn write_verify(spec: &ExperimentSpec, out: Option<&Path>) -> Result<(Vec<Verdict>, String)> {
    let verdicts = run_verify(spec)?;
    let json = to_json(&verdicts);
    if let Some(out) = out {
        write_all(out, &json)?;
    }
    Ok((verdicts, json))
}

pub const PLOT_HEADER: &str = "series,x,analytic,empirical,band";

/// Plot series: for each law, `table.points` rows of analytic CDF, empirical
/// CDF and the 99% DKW half-width.
pub fn run_plot_data(spec: &ExperimentSpec, out: &Path) -> Result<usize> {
    let model = spec.model()?;
    let laws = LimitLawSet::from_model(&model, Some(spec.grid.lambda))?;
    let xs = spec.table.xs();
    let mut csv = format!("{PLOT_HEADER}\n");
    let mut rows = 0;
    let mut series = |name: &str, xs: &[f64], analytic: &dyn Fn(f64) -> f64, emp: &EmpiricalDistribution| -> Result<()> {
        let band = if emp.is_empty() { f64::NAN } else { dkw_radius(emp.len(), 0.99)? };
        for &x in xs {
            let e = if emp.is_empty() { None } else { Some(emp.ecdf(x)) };
            csv.push_str(&format!("{name},{x},{},{},{}\n", analytic(x), cell(e), cell(Some(band).filter(|b| b.is_finite()))));
            rows += 1;
        }
        Ok(())
    };

    let cfg = spec.sim_config(&model, spec.sim.t, spec.sim.x, spec.grid.y_offset);
    let r = sim::monte_carlo(&model, &cfg, None)?;
    series("z_inf", &xs, &z_cdf(&laws), &r.z)?;

    let cfg = spec.sim_config(&model, spec.verify.stationary_t, spec.sim.x, 0.0);
    let r = sim::monte_carlo(&model, &cfg, None)?;
    let y_cdf = |y: f64| if y < 0.0 { 0.0 } else { 1.0 - laws.y_inf_tail(y) };
    series("y_inf", &xs, &y_cdf, &r.y_t)?;

    // Maximum excess lives on the whole line; centre the table on 0.
    let half = spec.table.x_max / 2.0;
    let ms: Vec<f64> = xs.iter().map(|x| x - half).collect();
    let g_cdf = |z: f64| laws.gumbel_cdf(z).unwrap_or(f64::NAN);
    for (t, x) in spec.coupled_grid(laws.gamma)? {
        let cfg = spec.sim_config(&model, t, x, spec.grid.y_offset);
        let r = sim::monte_carlo(&model, &cfg, None)?;
        series(&format!("gumbel[x={x}]"), &ms, &g_cdf, &r.m)?;
    }
    write_all(out, &csv)?;
    Ok(rows)
}

/// Error object printed by the command line.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: &'static str,
    pub message: String,
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        Self {
            error: e.kind(),
            message: e.to_string(),
        }
    }
}

/// Default output path for a command.
pub fn default_out(command: &str) -> PathBuf {
    PathBuf::from(match command {
        "limits" => "limits.json",
        "simulate" => "samples.csv",
        "verify" => "verify.json",
        _ => "plot_data.csv",
    })
}
