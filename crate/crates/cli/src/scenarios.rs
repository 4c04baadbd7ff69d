//! The scenario implementations. Each one simulates `paths` independent
//! paths through the batch driver, reduces per-path values to checks and
//! metrics, and keeps the first few paths for CSV output.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::Instant;

use serde_json::Value;
use skewfold::{
    build_skew_system_with, folded_tanaka_local_time, gap_local_times, make_grid, mc_estimate, median,
    nakao_solution, occupation_local_time, ocone_counterexample, sample_brownian, scale_local_time_ratio,
    sign_product_residual, simulate_base, skew_bessel_with_tol, skew_brownian, unfold_conventional,
    unfold_skorokhod, upcrossing_local_time, upcrossing_signed, BatchRunner, ParticleParams, RngStream,
    SamplePath64, SemimartingalePath, Side, SkewBesselParams, TimeGrid64, UpcrossingBand,
};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma_ur;

use crate::config::{parse_estimator, Scenario, ScenarioConfig};
use crate::report::{Check, GridEcho, Report, Rule, SampleTable};
use crate::CliError;

/// Default bound for identities that hold exactly on every grid.
const EXACT: f64 = 1e-12;
/// Confidence level of reported intervals.
const CONFIDENCE: f64 = 0.95;

pub struct RunOutput {
    pub report: Report,
    pub samples: SampleTable,
}

/// Runs `scenario` under `config`. Outputs are not written here; see [`crate::execute`].
pub fn run_scenario(scenario: Scenario, config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    config.validate(scenario)?;
    let start = Instant::now();
    let ctx = Context::new(config)?;
    let findings = match scenario {
        Scenario::UnfoldSkorokhod => unfold_skorokhod_scenario(&ctx)?,
        Scenario::UnfoldConventional => unfold_conventional_scenario(&ctx)?,
        Scenario::SkewBm => skew_bm_scenario(&ctx)?,
        Scenario::SkewBessel => skew_bessel_scenario(&ctx)?,
        Scenario::Ocone => ocone_scenario(&ctx)?,
        Scenario::Nakao => nakao_scenario(&ctx)?,
        Scenario::Particles => particles_scenario(&ctx)?,
        Scenario::LocaltimeXval => localtime_scenario(&ctx)?,
    };
    let Findings {
        parameters,
        checks,
        metrics,
        samples,
    } = findings;
    let pass = checks.iter().all(|c| c.pass);
    let report = Report {
        scenario: scenario.name().to_string(),
        seed: config.seed,
        paths: config.paths,
        grid: GridEcho {
            horizon: config.grid.horizon,
            steps: config.grid.steps,
        },
        parameters,
        tolerance_overrides: config.tolerances.clone(),
        checks,
        metrics,
        pass,
        outputs: BTreeMap::new(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutput { report, samples })
}

struct Context<'a> {
    config: &'a ScenarioConfig,
    grid: TimeGrid64,
    runner: BatchRunner,
}

/// Per-path output: scalar values in a scenario-defined order and, for the
/// first `sample_paths` paths, the series written to CSV.
struct PathRow {
    values: Vec<f64>,
    series: Option<Vec<Vec<f64>>>,
}

#[derive(Default)]
struct Findings {
    parameters: BTreeMap<String, Value>,
    checks: Vec<Check>,
    metrics: BTreeMap<String, f64>,
    samples: SampleTable,
}

impl<'a> Context<'a> {
    fn new(config: &'a ScenarioConfig) -> Result<Self, CliError> {
        let grid = make_grid(config.grid.horizon, config.grid.steps)?;
        let workers = config
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));
        let runner = BatchRunner::new(config.seed, workers)?;
        Ok(Self { config, grid, runner })
    }

    fn param(&self, name: &str, value: Option<f64>) -> Result<f64, CliError> {
        value.ok_or_else(|| CliError::Config(format!("missing parameter `{name}`")))
    }

    fn tol(&self, check: &str, default: f64) -> f64 {
        self.config.tolerance(check, default)
    }

    /// Runs `jobs` paths; job `k` receives stream `k` and whether to keep its series.
    fn run<F>(&self, jobs: usize, job: F) -> Result<Vec<PathRow>, CliError>
    where
        F: Fn(RngStream, bool) -> Result<PathRow, skewfold::Error> + Sync,
    {
        let keep = self.config.output.sample_paths as u64;
        Ok(self.runner.try_run(jobs, |s| job(s, s.stream_id < keep))?)
    }

    fn findings(&self, series: &[&'static str], rows: &[PathRow]) -> Findings {
        Findings {
            samples: SampleTable {
                times: self.grid.times().collect(),
                series: series.to_vec(),
                paths: rows.iter().filter_map(|r| r.series.clone()).collect(),
            },
            ..Findings::default()
        }
    }
}

impl Findings {
    fn param(&mut self, name: &str, value: impl Into<Value>) {
        self.parameters.insert(name.to_string(), value.into());
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    fn check(&mut self, check: Check) {
        self.checks.push(check);
    }
}

fn column(rows: &[PathRow], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r.values[j]).collect()
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn median_of(values: &[f64]) -> f64 {
    let kept: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    median(&kept).unwrap_or(f64::NAN)
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn series(paths: &[&SamplePath64]) -> Vec<Vec<f64>> {
    paths.iter().map(|p| p.values().to_vec()).collect()
}

/// Worst path of an identity that should vanish.
fn exact_check(ctx: &Context, name: &str, values: &[f64], default: f64) -> Check {
    Check::new(name, Rule::AtMost, 0.0, max_of(values), ctx.tol(name, default))
}

/// Sample mean against a target, with interval and standard error attached.
fn mean_check(ctx: &Context, name: &str, values: &[f64], target: f64, rule: Rule, default: f64) -> Result<Check, CliError> {
    let s = mc_estimate(values, CONFIDENCE)?;
    Ok(Check::new(name, rule, target, s.mean, ctx.tol(name, default))
        .with_std_error(s.std_error)
        .with_ci([s.mean - s.ci_halfwidth, s.mean + s.ci_halfwidth]))
}

/// `P(X(T) > 0)` for a skew Brownian motion with variance rate `rate` started at `x0`.
fn skew_bm_positive_probability(alpha: f64, x0: f64, horizon: f64, rate: f64) -> f64 {
    if x0 == 0.0 {
        return alpha;
    }
    let hit = 2.0 * Normal::standard().cdf(-x0.abs() / (rate * horizon).sqrt());
    if x0 > 0.0 {
        1.0 - hit * (1.0 - alpha)
    } else {
        hit * alpha
    }
}

fn unfold_skorokhod_scenario(ctx: &Context) -> Result<Findings, CliError> {
    let p = &ctx.config.params;
    let alpha = ctx.param("alpha", p.alpha)?;
    let tol = p.tol.unwrap_or(0.0);
    let grid = ctx.grid;
    let band = UpcrossingBand::for_grid(&grid);
    let rows = ctx.run(ctx.config.paths, |s, keep| {
        let u = sample_brownian(&grid, s.substream(0), 1.0)?;
        let r = unfold_skorokhod(&u, alpha, s.substream(1), tol)?;
        let lx = upcrossing_signed(&r.unfolded, band, Side::Right)?.terminal();
        let ls = upcrossing_local_time(&r.folded, band)?.terminal();
        let d = &r.diagnostics;
        let values = vec![
            d["abs_identity"],
            d["reflection_identity"],
            d["pushing_flatness"],
            lx / ls,
            sign_product_residual(&r),
            d["skew_tanaka"],
            indicator(r.unfolded.last() > 0.0),
        ];
        let pushing = r.pushing.as_ref().expect("Skorokhod unfolding keeps its pushing term");
        Ok(PathRow {
            values,
            series: keep.then(|| series(&[&u.total, &r.folded, pushing, &r.sign_path, &r.unfolded])),
        })
    })?;

    let mut f = ctx.findings(&["u", "s", "c", "z", "x"], &rows);
    f.param("alpha", alpha);
    f.param("tol", tol);
    f.check(exact_check(ctx, "abs_identity", &column(&rows, 0), EXACT.max(tol)));
    f.check(exact_check(ctx, "reflection_identity", &column(&rows, 1), EXACT));
    f.check(exact_check(ctx, "pushing_flatness", &column(&rows, 2), EXACT));
    f.check(Check::new(
        "local_time_ratio",
        Rule::Absolute,
        alpha,
        median_of(&column(&rows, 3)),
        ctx.tol("local_time_ratio", 0.05),
    ));
    f.metric("median_sign_product_residual", median_of(&column(&rows, 4)));
    f.metric("median_skew_tanaka_defect", median_of(&column(&rows, 5)));
    f.metric("positive_fraction", mean_of(&column(&rows, 6)));
    Ok(f)
}

fn unfold_conventional_scenario(ctx: &Context) -> Result<Findings, CliError> {
    let p = &ctx.config.params;
    let alpha = ctx.param("alpha", p.alpha)?;
    let grid = ctx.grid;
    let tol = p.tol.unwrap_or(grid.sqrt_dt() / 4.0);
    let driver_skew = p.driver_skew;
    let rows = ctx.run(ctx.config.paths, |s, keep| {
        let u = match driver_skew {
            Some(gamma) => SemimartingalePath::from_martingale(skew_brownian(gamma, 0.0, &grid, s.substream(5))?)?,
            None => sample_brownian(&grid, s.substream(5), 1.0)?,
        };
        let r = unfold_conventional(&u, alpha, s.substream(6), tol)?;
        let last = r.unfolded.last();
        let d = &r.diagnostics;
        let values = vec![
            d["abs_identity"],
            d["levy_reflection"],
            d["skew_tanaka"],
            if last == 0.0 { f64::NAN } else { indicator(last > 0.0) },
        ];
        let levy = r.levy.as_ref().expect("conventional unfolding keeps the Levy transform");
        Ok(PathRow {
            values,
            series: keep.then(|| series(&[&u.total, &r.folded, levy, &r.sign_path, &r.unfolded])),
        })
    })?;

    let mut f = ctx.findings(&["u", "r", "levy", "z", "x"], &rows);
    f.param("alpha", alpha);
    f.param("tol", tol);
    f.param("driver_skew", driver_skew.map_or(Value::Null, Value::from));
    let signs: Vec<f64> = column(&rows, 3).into_iter().filter(|v| !v.is_nan()).collect();
    f.check(exact_check(ctx, "abs_identity", &column(&rows, 0), EXACT.max(tol)));
    f.check(mean_check(ctx, "sign_law", &signs, alpha, Rule::Absolute, 0.02)?);
    f.metric("zero_fraction", 1.0 - signs.len() as f64 / rows.len() as f64);
    f.metric("median_levy_reflection_defect", median_of(&column(&rows, 1)));
    f.metric("median_skew_tanaka_defect", median_of(&column(&rows, 2)));
    Ok(f)
}

fn skew_bm_scenario(ctx: &Context) -> Result<Findings, CliError> {
    let p = &ctx.config.params;
    let alpha = ctx.param("alpha", p.alpha)?;
    let x0 = p.x0.unwrap_or(0.0);
    let grid = ctx.grid;
    let rows = ctx.run(ctx.config.paths, |s, keep| {
        let x = skew_brownian(alpha, x0, &grid, s)?;
        let last = x.last();
        Ok(PathRow {
            values: vec![indicator(last > 0.0), indicator(last == 0.0), last],
            series: keep.then(|| series(&[&x])),
        })
    })?;

    let mut f = ctx.findings(&["x"], &rows);
    f.param("alpha", alpha);
    f.param("x0", x0);
    let target = skew_bm_positive_probability(alpha, x0, grid.horizon(), 1.0);
    f.check(mean_check(ctx, "sign_law", &column(&rows, 0), target, Rule::Absolute, 0.015)?);
    f.metric("zero_fraction", mean_of(&column(&rows, 1)));
    f.metric("mean_terminal", mean_of(&column(&rows, 2)));
    Ok(f)
}

fn skew_bessel_scenario(ctx: &Context) -> Result<Findings, CliError> {
    let p = &ctx.config.params;
    let alpha = ctx.param("alpha", p.alpha)?;
    let delta = ctx.param("delta", p.delta)?;
    let x0 = p.x0.unwrap_or(0.0);
    let grid = ctx.grid;
    let tol = p.tol.unwrap_or(grid.sqrt_dt() / 4.0);
    let params = SkewBesselParams::new(delta, alpha, x0)?;
    let rows = ctx.run(ctx.config.paths, |s, keep| {
        let r = skew_bessel_with_tol(params, &grid, s, tol)?;
        let (plus, minus) = scale_local_time_ratio(&r.unfolded, delta, tol)?;
        let values = vec![
            indicator(r.unfolded.last() > 0.0),
            plus / minus,
            r.diagnostics["bessel_local_time"],
            r.decomposition.n_excursions() as f64,
            r.diagnostics["abs_identity"],
        ];
        Ok(PathRow {
            values,
            series: keep.then(|| series(&[&r.folded, &r.sign_path, &r.unfolded])),
        })
    })?;

    let mut f = ctx.findings(&["r", "z", "x"], &rows);
    f.param("alpha", alpha);
    f.param("delta", delta);
    f.param("x0", x0);
    f.param("tol", tol);
    // From x0 > 0 the radial part reaches 0 by T with probability Q(1 − δ/2, x0²/2T).
    let target = if x0 > 0.0 {
        1.0 - gamma_ur(1.0 - delta / 2.0, x0 * x0 / (2.0 * grid.horizon())) * (1.0 - alpha)
    } else {
        alpha
    };
    f.check(mean_check(ctx, "sign_law", &column(&rows, 0), target, Rule::Absolute, 0.02)?);
    f.check(Check::new(
        "scale_local_time_ratio",
        Rule::Relative,
        alpha / (1.0 - alpha),
        median_of(&column(&rows, 1)),
        ctx.tol("scale_local_time_ratio", 0.25),
    ));
    f.check(Check::new(
        "radial_local_time",
        Rule::AtMost,
        0.0,
        median_of(&column(&rows, 2)),
        ctx.tol("radial_local_time", 0.05),
    ));
    f.metric("mean_radial_local_time", mean_of(&column(&rows, 2)));
    f.metric("mean_excursions", mean_of(&column(&rows, 3)));
    f.metric("max_abs_identity", max_of(&column(&rows, 4)));
    Ok(f)
}

fn ocone_scenario(ctx: &Context) -> Result<Findings, CliError> {
    let p = &ctx.config.params;
    let u = ctx.param("u", p.u)?;
    let v = ctx.param("v", p.v)?;
    let grid = ctx.grid;
    let rows = ctx.run(ctx.config.paths, |s, keep| {
        let r = ocone_counterexample(u, v, &grid, s)?;
        let values = vec![
            r.x.last().powi(3),
            r.xi.last().powi(3),
            r.diagnostics["tanaka_x"],
            r.diagnostics["tanaka_xi"],
        ];
        Ok(PathRow {
            values,
            series: keep.then(|| series(&[&r.x, &r.xi, &r.driver, &r.clock])),
        })
    })?;

    let mut f = ctx.findings(&["x", "xi", "u", "clock"], &rows);
    f.param("u", u);
    f.param("v", v);
    // E[X(T)³] = 3(T − 1)·E[B(1)·slope] with slope u on {B(1) > 0} and v otherwise.
    let target = 3.0 * (grid.horizon() - 1.0) * (u - v) / (2.0 * PI).sqrt();
    let cube = mean_check(ctx, "third_moment", &column(&rows, 0), target, Rule::StdErrors, 3.0)?;
    let mirror = mean_check(ctx, "mirror_third_moment", &column(&rows, 1), -target, Rule::StdErrors, 3.0)?;
    let balance = (cube.estimate + mirror.estimate).abs();
    f.check(cube);
    f.check(mirror);
    f.check(Check::new("mirror_balance", Rule::AtMost, 0.0, balance, ctx.tol("mirror_balance", EXACT)));
    f.check(exact_check(ctx, "tanaka_identity", &column(&rows, 2), EXACT));
    f.metric("median_mirror_tanaka_defect", median_of(&column(&rows, 3)));
    Ok(f)
}

fn nakao_scenario(ctx: &Context) -> Result<Findings, CliError> {
    let p = &ctx.config.params;
    let alpha = ctx.param("alpha", p.alpha)?;
    let x0 = p.x0.unwrap_or(0.0);
    let grid = ctx.grid;
    let rows = ctx.run(ctx.config.paths, |s, keep| {
        let r = nakao_solution(alpha, x0, &grid, s)?;
        let d = &r.diagnostics;
        let values = vec![
            indicator(r.x.last() > 0.0),
            d["qv_u"],
            d["qv_v"],
            d["covariation_uv"],
            r.residual,
        ];
        Ok(PathRow {
            values,
            series: keep.then(|| series(&[&r.x, &r.y, &r.u, &r.v])),
        })
    })?;

    let mut f = ctx.findings(&["x", "y", "u", "v"], &rows);
    f.param("alpha", alpha);
    f.param("x0", x0);
    let horizon = grid.horizon();
    // Away from 0 the solution moves with B₁ + B₂, so at variance rate 2.
    let target = skew_bm_positive_probability(alpha, x0, horizon, 2.0);
    f.check(mean_check(ctx, "sign_law", &column(&rows, 0), target, Rule::Absolute, 0.02)?);
    f.check(mean_check(ctx, "qv_u", &column(&rows, 1), horizon, Rule::Absolute, 0.05)?);
    f.check(mean_check(ctx, "qv_v", &column(&rows, 2), horizon, Rule::Absolute, 0.05)?);
    f.check(mean_check(ctx, "covariation_uv", &column(&rows, 3), 0.0, Rule::Absolute, 0.05)?);
    // Re-simulating the first path from its stream must reproduce it bit for bit.
    let first = ctx.runner.stream(0);
    let a = nakao_solution(alpha, x0, &grid, first)?;
    let b = nakao_solution(alpha, x0, &grid, first)?;
    let drift = a
        .x
        .values()
        .iter()
        .zip(b.x.values())
        .map(|(p, q)| if p.to_bits() == q.to_bits() { 0.0 } else { (p - q).abs().max(f64::MIN_POSITIVE) })
        .fold(0.0, f64::max);
    f.check(Check::new("reproducible", Rule::AtMost, 0.0, drift, 0.0));
    f.metric("median_equation_residual", median_of(&column(&rows, 4)));
    Ok(f)
}

fn particles_scenario(ctx: &Context) -> Result<Findings, CliError> {
    let p = &ctx.config.params;
    let params = ParticleParams {
        rho: p.rho.unwrap_or(FRAC_1_SQRT_2),
        sigma: p.sigma.unwrap_or(FRAC_1_SQRT_2),
        g: p.g.unwrap_or(0.0),
        h: p.h.unwrap_or(0.0),
        zeta1: ctx.param("zeta1", p.zeta1)?,
        zeta2: ctx.param("zeta2", p.zeta2)?,
        eta1: ctx.param("eta1", p.eta1)?,
        eta2: ctx.param("eta2", p.eta2)?,
    };
    let skew = params.validate()?;
    let estimator = parse_estimator(p.estimator.as_deref().unwrap_or("upcrossing"))?;
    let grid = ctx.grid;
    let horizon = grid.horizon();

    let mut f = if params.is_driftless() {
        let rows = ctx.run(ctx.config.paths, |s, keep| {
            let base = simulate_base(&params, &grid, s.substream(0))?;
            let r = build_skew_system_with(&base, &params, s.substream(3), estimator)?;
            let (plus, minus) = gap_local_times(&r)?;
            let d = &r.diagnostics;
            let values = vec![
                d["gap_identity"],
                d["difference_identity"],
                d["sum_identity"],
                d["gap_equals_w"],
                d["intertwine"],
                skew.zeta * plus / (skew.eta * minus),
                d["qv_b1"],
                d["qv_b2"],
                d["covariation_b"],
                d["component1_equation"],
                d["component2_equation"],
                indicator(r.gap.last() > 0.0),
            ];
            Ok(PathRow {
                values,
                series: keep.then(|| series(&[&base.x1, &base.x2, &base.y, &r.gap, &r.b1, &r.b2, &r.x1, &r.x2])),
            })
        })?;
        let mut f = ctx.findings(
            &["x1", "x2", "y", "skew_gap", "skew_b1", "skew_b2", "skew_x1", "skew_x2"],
            &rows,
        );
        for (j, name) in ["gap_identity", "difference_identity", "sum_identity", "gap_equals_w", "intertwine"]
            .into_iter()
            .enumerate()
        {
            f.check(exact_check(ctx, name, &column(&rows, j), EXACT));
        }
        f.check(Check::new(
            "local_time_balance",
            Rule::Absolute,
            1.0,
            median_of(&column(&rows, 5)),
            ctx.tol("local_time_balance", 0.15),
        ));
        f.check(mean_check(ctx, "qv_b1", &column(&rows, 6), horizon, Rule::Absolute, 0.05)?);
        f.check(mean_check(ctx, "qv_b2", &column(&rows, 7), horizon, Rule::Absolute, 0.05)?);
        f.check(mean_check(ctx, "covariation_b", &column(&rows, 8), 0.0, Rule::Absolute, 0.05)?);
        let worst = rows
            .iter()
            .map(|r| (r.values[6] - horizon).abs().max((r.values[7] - horizon).abs()).max(r.values[8].abs()))
            .fold(0.0, f64::max);
        f.metric("max_driver_covariation_deviation", worst);
        f.metric("median_component1_defect", median_of(&column(&rows, 9)));
        f.metric("median_component2_defect", median_of(&column(&rows, 10)));
        f.metric("gap_positive_fraction", mean_of(&column(&rows, 11)));
        f.metric("skew_system_built", 1.0);
        f
    } else {
        // Drift breaks the link between the gap and a skew Brownian motion:
        // only the rank-based pair is simulated.
        let rows = ctx.run(ctx.config.paths, |s, keep| {
            let base = simulate_base(&params, &grid, s.substream(0))?;
            let gap = base.x1.sub(&base.x2)?.sub(&base.y)?.sup_norm();
            let qv = skewfold::quadratic_variation(&base.y).last();
            Ok(PathRow {
                values: vec![gap, qv, base.y.last()],
                series: keep.then(|| series(&[&base.x1, &base.x2, &base.y, &base.b1, &base.b2])),
            })
        })?;
        let mut f = ctx.findings(&["x1", "x2", "y", "b1", "b2"], &rows);
        f.check(exact_check(ctx, "difference_identity", &column(&rows, 0), EXACT));
        let rate = params.rho * params.rho + params.sigma * params.sigma;
        f.check(mean_check(ctx, "qv_gap", &column(&rows, 1), rate * horizon, Rule::Absolute, 0.05)?);
        f.metric("mean_terminal_gap", mean_of(&column(&rows, 2)));
        f.metric("skew_system_built", 0.0);
        f
    };
    for (name, value) in [
        ("rho", params.rho),
        ("sigma", params.sigma),
        ("g", params.g),
        ("h", params.h),
        ("zeta1", params.zeta1),
        ("zeta2", params.zeta2),
        ("eta1", params.eta1),
        ("eta2", params.eta2),
    ] {
        f.param(name, value);
    }
    f.param("estimator", estimator.name());
    f.metric("alpha", skew.alpha);
    f.metric("beta", skew.beta);
    f.metric("zeta", skew.zeta);
    f.metric("eta", skew.eta);
    Ok(f)
}

fn localtime_scenario(ctx: &Context) -> Result<Findings, CliError> {
    let p = &ctx.config.params;
    let paths = ctx.config.paths;
    let mean_paths = p.mean_paths.unwrap_or(paths);
    if mean_paths < 2 {
        return Err(CliError::Config("mean_paths must be at least 2".into()));
    }
    let grid = ctx.grid;
    let eps = grid.sqrt_dt();
    let band = UpcrossingBand::lifted(&grid);
    let rows = ctx.run(paths.max(mean_paths), |s, keep| {
        let b = sample_brownian(&grid, s, 1.0)?;
        let r = b.total.abs();
        let occ = occupation_local_time(&r, &b.qv, eps, Side::Right)?;
        let up = upcrossing_local_time(&r, band)?;
        let ta = folded_tanaka_local_time(&b.total);
        Ok(PathRow {
            values: vec![occ.terminal(), up.terminal(), ta.terminal()],
            series: keep.then(|| series(&[&b.total, &occ.values, &up.values, &ta.values])),
        })
    })?;

    let mut f = ctx.findings(&["b", "occupation", "upcrossing", "tanaka"], &rows);
    f.param("mean_paths", mean_paths);
    f.param("epsilon", eps);
    let head = &rows[..paths];
    let medians = [0, 1, 2].map(|j| median_of(&column(head, j)));
    let names = ["occupation", "upcrossing", "tanaka"];
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let name = format!("{}_vs_{}", names[a], names[b]);
        let tol = ctx.tol(&name, 0.10);
        f.check(Check::new(name, Rule::Relative, 1.0, medians[b] / medians[a], tol));
    }
    let occupation: Vec<f64> = column(&rows[..mean_paths], 0);
    let target = (2.0 * grid.horizon() / PI).sqrt();
    f.check(mean_check(ctx, "occupation_mean", &occupation, target, Rule::Relative, 0.05)?);
    for (j, name) in names.iter().enumerate() {
        f.metric(&format!("median_{name}"), medians[j]);
        f.metric(&format!("mean_{name}"), mean_of(&column(&rows[..mean_paths], j)));
    }
    Ok(f)
}
