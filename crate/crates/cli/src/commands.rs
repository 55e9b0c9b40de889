use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fjm_core::curve::{CurveState, ForceDeflectionCurve};
use fjm_core::explorer::{
    generate_table, select_optimal, sweep, sweep_to_csv, Constraints, SweepGrid,
};
use fjm_core::fitting::manifest::{fit_runs, summarize, ConfigSummary, RunFit, RunManifest};
use fjm_core::fitting::{calibrate_friction, fit_curve};
use fjm_core::geometry::{
    max_fibers_in_circle_with, min_enclosing_layout_with, packing_density, PackingOptions,
    PackingResult,
};
use fjm_core::mechanics::{
    epsilon_model, predict_curve, FiberSpec, FjmConfig, FrictionModel, JammingState,
};

use crate::config::{validate_config, ToolConfig};
use crate::{
    CalibrateArgs, Cli, CliError, Command, FitArgs, PackArgs, PredictArgs, SweepArgs, TableArgs,
};

type Result<T> = std::result::Result<T, CliError>;

struct Context {
    config: ToolConfig,
}

impl Context {
    fn load(cli: &Cli) -> Result<Self> {
        let mut config = match &cli.config {
            Some(path) => validate_config(path)?,
            None => ToolConfig::default(),
        };
        if let Some(seed) = cli.seed {
            config.seed = seed;
        }
        Ok(Context { config })
    }

    fn packing(&self) -> PackingOptions {
        PackingOptions::with_seed(self.config.seed)
    }

    fn friction(&self) -> Result<FrictionModel> {
        match &self.config.friction_calibration {
            None => Ok(FrictionModel::bundled()),
            Some(path) => Ok(FrictionModel::from_json(&read(path)?)?),
        }
    }

    fn header(&self, command: &str) {
        eprintln!("fjm {command}: seed={}", self.config.seed);
    }
}

pub(crate) fn dispatch(cli: Cli) -> Result<()> {
    init_logging();
    let ctx = Context::load(&cli)?;
    match &cli.command {
        Command::Pack(args) => pack(&ctx, args),
        Command::Predict(args) => predict(&ctx, args),
        Command::Fit(args) => fit(&ctx, args),
        Command::Calibrate(args) => calibrate(&ctx, args),
        Command::Sweep(args) => run_sweep(&ctx, args),
        Command::Table(args) => table(&ctx, args),
        Command::Config => {
            ctx.header("config");
            emit(None, &json(&ctx.config)?)
        }
    }
}

fn init_logging() {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(fjm_core::FjmError::from)?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct PackOutput {
    seed: u64,
    #[serde(flatten)]
    result: PackingResult,
}

fn pack(ctx: &Context, args: &PackArgs) -> Result<()> {
    ctx.header("pack");
    let opts = ctx.packing();
    let result = match (args.container_radius, args.count) {
        (Some(container), _) => max_fibers_in_circle_with(container, args.fiber_radius, &opts)?,
        (None, Some(n)) => {
            if !(args.fiber_radius.is_finite() && args.fiber_radius > 0.0) {
                return Err(CliError::Usage(format!(
                    "--fiber-radius must be positive, got {}",
                    args.fiber_radius
                )));
            }
            let (_, unit) = min_enclosing_layout_with(n, &opts)?;
            PackingResult::from_layout(unit.scaled(args.fiber_radius))
        }
        (None, None) => unreachable!("clap requires one of the targets"),
    };
    let layout = &result.layout;
    eprintln!(
        "  {} fibers of radius {} mm in a {} mm radius circle, density {:.4}",
        result.count, layout.circle_radius, layout.container_radius, result.achieved_density
    );
    emit(
        args.out.as_ref(),
        &json(&PackOutput {
            seed: ctx.config.seed,
            result,
        })?,
    )
}

fn predict(ctx: &Context, args: &PredictArgs) -> Result<()> {
    ctx.header("predict");
    let cfg = &ctx.config;
    let fiber_radius = args.fiber_radius.or(cfg.fiber.radius_mm).ok_or_else(|| {
        CliError::Usage("--fiber-radius is required (or set fiber.radius_mm in the config)".into())
    })?;
    let state: CurveState = args.state.parse()?;
    let jamming = match state {
        CurveState::Jammed => {
            let kpa = args.vacuum_kpa.ok_or_else(|| {
                CliError::Usage("--vacuum-kpa is required for a jammed prediction".into())
            })?;
            JammingState::jammed(kpa)?
        }
        CurveState::Unjammed => JammingState::Unjammed,
    };
    let membrane = cfg.membrane.spec();
    let config = FjmConfig {
        fiber: FiberSpec::new(fiber_radius, cfg.fiber.youngs_modulus_mpa)?,
        fiber_count: args.fiber_count,
        bundle_radius_mm: args.bundle_radius,
        membrane,
        load_constant: cfg.load_constant,
    };
    config.validate()?;
    let density = packing_density(args.fiber_count, fiber_radius, membrane.inner_radius_mm)?;
    let epsilon = match args.epsilon {
        Some(e) => e,
        None => epsilon_model(args.fiber_count, density, &ctx.friction()?)?,
    };
    let report = config.stiffness_report(epsilon)?;
    eprintln!(
        "  N={} r={} mm R={} mm density={:.4} epsilon={:.6}",
        args.fiber_count, fiber_radius, args.bundle_radius, density, report.epsilon
    );
    eprintln!(
        "  k_jammed={:.6e} N/mm k_unjammed={:.6e} N/mm zeta={:.4}",
        report.k_jammed, report.k_unjammed, report.zeta
    );
    let curve = predict_curve(
        &config,
        jamming,
        cfg.phases,
        epsilon,
        args.max_deflection,
        args.step,
    )?;
    emit(args.out.as_ref(), &curve.to_csv())
}

#[derive(Serialize)]
struct ManifestOutput {
    runs: Vec<RunFit>,
    configs: Vec<ConfigSummary>,
}

fn fit(ctx: &Context, args: &FitArgs) -> Result<()> {
    ctx.header("fit");
    if let Some(path) = &args.manifest {
        let manifest = RunManifest::load(path)?;
        let runs = fit_runs(&manifest)?;
        let configs = summarize(&runs)?;
        for c in &configs {
            eprintln!(
                "  {}: jammed runs {}, unjammed runs {} ({} over-fed), zeta {}",
                c.config_id,
                c.jammed_runs,
                c.unjammed_runs,
                c.over_fed_runs,
                c.zeta.map_or("n/a".to_string(), |z| format!("{z:.4}"))
            );
        }
        return emit(args.out.as_ref(), &json(&ManifestOutput { runs, configs })?);
    }
    let path = args
        .curve
        .as_ref()
        .expect("clap requires --curve or --manifest");
    let state: CurveState = args.state.as_deref().unwrap_or_default().parse()?;
    let curve = ForceDeflectionCurve::read_csv(path)?.with_state(state, args.vacuum_kpa);
    let report = fit_curve(&curve)?;
    eprintln!(
        "  {state}: slope {:.6e} N/mm over [{}, {}] mm, knee {}, over-fed {}",
        report.primary_slope,
        report.region_used.0,
        report.region_used.1,
        report
            .knee_deflection
            .map_or("none".to_string(), |k| format!("{k:.4} mm")),
        report.over_fed
    );
    emit(args.out.as_ref(), &json(&report)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrationRow {
    fiber_radius_mm: f64,
    fiber_count: usize,
    bundle_radius_mm: f64,
    zeta: f64,
}

fn calibrate(ctx: &Context, args: &CalibrateArgs) -> Result<()> {
    ctx.header("calibrate");
    let text = read(&args.input)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let membrane = ctx.config.membrane.spec();
    let mut pairs = Vec::new();
    for (i, row) in reader.deserialize::<CalibrationRow>().enumerate() {
        let row = row.map_err(|e| {
            CliError::Usage(format!("{}: row {}: {e}", args.input.display(), i + 1))
        })?;
        let config = FjmConfig {
            fiber: FiberSpec::new(row.fiber_radius_mm, ctx.config.fiber.youngs_modulus_mpa)?,
            fiber_count: row.fiber_count,
            bundle_radius_mm: row.bundle_radius_mm,
            membrane,
            load_constant: ctx.config.load_constant,
        };
        pairs.push((config, row.zeta));
    }
    let model = calibrate_friction(&pairs)?;
    for g in &model.groups {
        eprintln!(
            "  density {:.2}: epsilon = {:.6} + {:.6e} * N",
            g.density, g.intercept, g.slope_per_fiber
        );
    }
    let mut text = model.to_json()?;
    text.push('\n');
    emit(args.out.as_ref(), &text)
}

fn run_sweep(ctx: &Context, args: &SweepArgs) -> Result<()> {
    ctx.header("sweep");
    let cfg = &ctx.config;
    let grid = SweepGrid {
        fiber_diameters_mm: args
            .diameters
            .clone()
            .unwrap_or_else(|| cfg.sweep.fiber_diameters_mm.clone()),
        densities: args
            .densities
            .clone()
            .unwrap_or_else(|| cfg.sweep.densities.clone()),
        membrane: cfg.membrane.spec(),
        youngs_modulus_mpa: cfg.fiber.youngs_modulus_mpa,
        friction: ctx.friction()?,
        fill_factor: cfg.fill_factor,
    };
    let length = args.length.unwrap_or(cfg.membrane.effective_length_mm);
    let points = sweep(&grid, length, cfg.load_constant)?;
    let feasible = points.iter().filter(|p| p.is_feasible()).count();
    eprintln!("  {} cells, {} feasible", points.len(), feasible);
    emit(args.out.as_ref(), &sweep_to_csv(&points))?;

    let constraints = Constraints {
        min_jammed_stiffness: args.min_jammed_stiffness,
        min_variation_ratio: args.min_variation_ratio,
        max_density: args.max_density,
    };
    if args.select || constraints != Constraints::default() {
        let best = select_optimal(&points, &constraints)?;
        let r = best.report.expect("selected points are feasible");
        eprintln!(
            "  optimum: {} mm fibers at density {} (N={}), k_jammed={:.6e} N/mm, zeta={:.4}",
            best.fiber_diameter_mm,
            best.density,
            best.fiber_count().unwrap_or_default(),
            r.k_jammed,
            r.zeta
        );
    }
    Ok(())
}

fn table(ctx: &Context, args: &TableArgs) -> Result<()> {
    ctx.header("table");
    let cfg = &ctx.config;
    let mut membrane = cfg.membrane.spec();
    if let Some(d) = args.membrane_diameter {
        membrane.inner_radius_mm = d / 2.0;
    }
    let fractions = args
        .fractions
        .clone()
        .unwrap_or_else(|| cfg.table.bundle_fractions.clone());
    let diameters = args
        .diameters
        .clone()
        .unwrap_or_else(|| cfg.table.fiber_diameters_mm.clone());
    let table = generate_table(&membrane, &fractions, &diameters, &ctx.packing())?;
    for w in &table.warnings {
        eprintln!("  warning: {w}");
    }
    eprintln!("  {} rows", table.rows.len());
    emit(args.out.as_ref(), &table.to_csv())
}
