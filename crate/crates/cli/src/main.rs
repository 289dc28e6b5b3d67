use clap::{Args, Parser, Subcommand, ValueEnum};
use slrpower::corroute::{corr_power_approx, corr_power_mc, find_sample_size_corr, lambda_to_rho, rho_to_lambda};
use slrpower::critvals::{critical_value_normal, CriticalValueCache};
use slrpower::distmath::fixed_design_power;
use slrpower::powersim::{
    critical_threshold, find_sample_size_slope_with, simulate_power_model, CriticalSource, SearchConfig, TrialSampler,
};
use slrpower::{CoreError, EffectSize, Execution, ModelParams, SimPlan};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

mod render;
mod tables;

use render::{Format, Record};

#[derive(Parser, Debug)]
#[command(
    name = "slrpower",
    version,
    about = "Critical values, power and sample sizes for the regression slope test"
)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Master seed. Drawn at random (and printed) when omitted.
    #[arg(long, global = true, env = "SLRPOWER_SEED")]
    seed: Option<u64>,
    /// Worker threads (wall time only; results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Critical-value cache file.
    #[arg(long, global = true, env = "SLRPOWER_CACHE")]
    cache: Option<PathBuf>,
    /// 1,000 inner / 50 outer replicates instead of 10,000 / 1,000.
    #[arg(long, global = true)]
    fast: bool,
    #[arg(long, global = true)]
    reps_inner: Option<u32>,
    #[arg(long, global = true)]
    reps_outer: Option<u32>,
    #[arg(long, global = true)]
    power_trials: Option<u32>,
    /// How slope-test trials are generated.
    #[arg(long, global = true, value_enum, default_value_t = SamplerArg::Regression)]
    sampler: SamplerArg,
    /// Critical values used by the slope-test power and sample-size commands.
    #[arg(long, global = true, value_enum, default_value_t = CriticalArg::Exact)]
    critical: CriticalArg,
    /// With `--critical exact`, switch to the normal approximation from this n.
    #[arg(long, global = true)]
    normal_from: Option<u32>,
    /// Sample-size search ceiling.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    ceiling: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical value C(n, alpha) for |T|.
    Critval {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Regenerate one of the seven tables, or the correlation curve.
    Table {
        /// 1 to 7, or `graph1` for the lambda-rho curve.
        #[arg(long)]
        which: tables::Which,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sample-size range of the critical-value table.
        #[arg(long, default_value_t = 20)]
        from: u32,
        #[arg(long, default_value_t = 100)]
        to: u32,
        /// Effect sizes for tables 2 to 7 (comma separated).
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        /// Target powers for tables 2 to 7 (comma separated).
        #[arg(long, value_delimiter = ',')]
        powers: Option<Vec<f64>>,
    },
    /// Smallest n reaching a target power.
    Samplesize {
        #[arg(long, value_enum)]
        route: RouteArg,
        #[arg(
            long,
            allow_negative_numbers = true,
            conflicts_with = "rho",
            required_unless_present = "rho"
        )]
        lambda: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        power: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Power at a given n.
    Power {
        #[arg(long, value_enum)]
        route: PowerRouteArg,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["rho", "a"])]
        lambda: Option<f64>,
        #[arg(long, allow_negative_numbers = true, conflicts_with = "a")]
        rho: Option<f64>,
        /// Slope under the alternative (fixed design).
        #[arg(long = "A", id = "a", visible_alias = "a", allow_negative_numbers = true, requires_all = ["sxx", "sigma"])]
        a: Option<f64>,
        #[arg(long)]
        sxx: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        alpha: f64,
        /// Trials for simulated power (default: reps-inner).
        #[arg(long)]
        trials: Option<u32>,
        /// Also simulate the correlation test.
        #[arg(long)]
        mc: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Inspect or reset the critical-value cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum CacheAction {
    Show {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    Clear,
    Path,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MethodArg {
    Exact,
    Normal,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum RouteArg {
    Slope,
    Corr,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum PowerRouteArg {
    Slope,
    Corr,
    Fixed,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SamplerArg {
    Regression,
    SufficientStats,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum CriticalArg {
    Exact,
    Normal,
    StudentT,
}

/// Command failure, split by exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(_) | CoreError::UndefinedMoment(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical(format!("i/o error: {e}"))
    }
}

type CmdResult = Result<(), Failure>;

struct Context {
    plan: SimPlan,
    config: SearchConfig,
    cache: CriticalValueCache,
}

impl Context {
    fn new(opts: &GlobalOpts, seed: u64) -> Self {
        let mut plan = if opts.fast {
            SimPlan::fast(seed)
        } else {
            SimPlan::standard(seed)
        };
        if let Some(v) = opts.reps_inner {
            plan.reps_inner = v;
        }
        if let Some(v) = opts.reps_outer {
            plan.reps_outer = v;
        }
        if let Some(v) = opts.power_trials {
            plan.power_trials = v;
        }
        if opts.sequential {
            plan.execution = Execution::Sequential;
        }
        let critical = match (opts.critical, opts.normal_from) {
            (CriticalArg::Exact, Some(m)) => CriticalSource::ExactBelow(m),
            (CriticalArg::Exact, None) => CriticalSource::ExactMc,
            (CriticalArg::Normal, _) => CriticalSource::NormalApprox,
            (CriticalArg::StudentT, _) => CriticalSource::StudentT,
        };
        let sampler = match opts.sampler {
            SamplerArg::Regression => TrialSampler::Regression,
            SamplerArg::SufficientStats => TrialSampler::SufficientStats,
        };
        let cache = match &opts.cache {
            Some(p) => CriticalValueCache::open(p),
            None => CriticalValueCache::in_memory(),
        };
        Self {
            plan,
            config: SearchConfig {
                critical,
                sampler,
                ceiling: opts.ceiling,
                ..SearchConfig::default()
            },
            cache,
        }
    }

    fn report_cache_errors(&self) {
        for e in self.cache.io_errors() {
            eprintln!("warning: critical-value cache: {e}");
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    if let Some(t) = cli.opts.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        slrpower::exec::configure_threads(t);
    }
    let seed = cli.opts.seed.unwrap_or_else(rand::random);
    eprintln!("seed: {seed}");
    let ctx = Context::new(&cli.opts, seed);

    let started = Instant::now();
    let outcome = run(&cli.command, &ctx);
    ctx.report_cache_errors();
    log::info!("finished in {:.1?}", started.elapsed());
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: &Command, ctx: &Context) -> CmdResult {
    match *command {
        Command::Critval {
            n,
            alpha,
            method,
            format,
        } => critval(ctx, n, alpha, method, format),
        Command::Table {
            which,
            format,
            ref out,
            from,
            to,
            ref lambdas,
            ref powers,
        } => {
            let started = Instant::now();
            let spec = tables::TableRequest {
                which,
                from,
                to,
                lambdas: lambdas.clone(),
                powers: powers.clone(),
            };
            let table = tables::build(&spec, ctx)?;
            let text = table.render(format)?;
            match out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| Failure::Numerical(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            eprintln!("table {which}: {} rows in {:.1?}", table.len(), started.elapsed());
            Ok(())
        }
        Command::Samplesize {
            route,
            lambda,
            rho,
            alpha,
            power,
            format,
        } => samplesize(ctx, route, lambda, rho, alpha, power, format),
        Command::Power {
            route,
            n,
            lambda,
            rho,
            a,
            sxx,
            sigma,
            alpha,
            trials,
            mc,
            format,
        } => {
            let req = PowerRequest {
                n,
                lambda,
                rho,
                a,
                sxx,
                sigma,
                alpha,
                trials,
                mc,
            };
            power(ctx, route, &req, format)
        }
        Command::Cache { action } => cache(ctx, action),
    }
}

fn critval(ctx: &Context, n: u32, alpha: f64, method: MethodArg, format: Format) -> CmdResult {
    let est = match method {
        MethodArg::Normal => critical_value_normal(n, alpha)?,
        MethodArg::Exact => ctx.cache.get_or_compute(n, alpha, &ctx.plan)?,
    };
    let mut rec = Record::new()
        .int("n", est.n as i64)
        .num("alpha", est.alpha)
        .text("method", est.method.to_string())
        .num("value", est.value)
        .num("sd", est.sd);
    if method == MethodArg::Exact {
        rec = rec
            .int("reps_inner", ctx.plan.reps_inner as i64)
            .int("reps_outer", ctx.plan.reps_outer as i64);
    }
    print!("{}", rec.render(format)?);
    Ok(())
}

fn effect(lambda: f64) -> Result<EffectSize, Failure> {
    if lambda == 0.0 {
        return Err(Failure::Usage("effect size must be nonzero".into()));
    }
    Ok(EffectSize::new(lambda)?)
}

fn samplesize(
    ctx: &Context,
    route: RouteArg,
    lambda: Option<f64>,
    rho: Option<f64>,
    alpha: f64,
    power: f64,
    format: Format,
) -> CmdResult {
    let lambda_given = lambda.is_some();
    let (lambda, rho) = match (lambda, rho) {
        (Some(l), None) => {
            let l = effect(l)?;
            (l, lambda_to_rho(l))
        }
        (None, Some(r)) => {
            if r == 0.0 {
                return Err(Failure::Usage("effect size must be nonzero".into()));
            }
            (rho_to_lambda(r)?, r)
        }
        _ => return Err(Failure::Usage("give exactly one of --lambda and --rho".into())),
    };
    let converted = match (route, lambda_given) {
        (RouteArg::Corr, true) => Some(format!(
            "lambda {lambda} converted to rho {rho:.6} for the correlation test"
        )),
        (RouteArg::Slope, false) => Some(format!(
            "rho {rho} converted to lambda {:.6} for the slope test",
            lambda.get()
        )),
        _ => None,
    };
    if let Some(note) = &converted {
        eprintln!("note: {note}");
    }
    let result = match route {
        RouteArg::Corr => find_sample_size_corr(rho, alpha, power)?,
        RouteArg::Slope => find_sample_size_slope_with(lambda, alpha, power, &ctx.plan, &ctx.config, &ctx.cache)?,
    };
    let rec = Record::new()
        .text("route", result.route.to_string())
        .num("lambda", lambda.get())
        .num("rho", rho)
        .num("alpha", alpha)
        .num("target_power", result.target_power)
        .int("n", result.n as i64)
        .num(
            if result.route == slrpower::Route::Slope {
                "validated_mean"
            } else {
                "power"
            },
            result.validated_mean,
        )
        .num("validated_sd", result.validated_sd);
    print!("{}", rec.render(format)?);
    Ok(())
}

struct PowerRequest {
    n: u32,
    lambda: Option<f64>,
    rho: Option<f64>,
    a: Option<f64>,
    sxx: Option<f64>,
    sigma: Option<f64>,
    alpha: f64,
    trials: Option<u32>,
    mc: bool,
}

fn power(ctx: &Context, route: PowerRouteArg, req: &PowerRequest, format: Format) -> CmdResult {
    let mut rec = Record::new().int("n", req.n as i64).num("alpha", req.alpha);
    match route {
        PowerRouteArg::Fixed => {
            let (Some(a), Some(sxx), Some(sigma)) = (req.a, req.sxx, req.sigma) else {
                return Err(Failure::Usage("--route fixed needs --A, --sxx and --sigma".into()));
            };
            let p = fixed_design_power(a, sxx, sigma, req.n, req.alpha)?;
            rec = rec
                .text("route", "fixed".into())
                .num("A", a)
                .num("sxx", sxx)
                .num("sigma", sigma)
                .num("ncp", a * sxx.sqrt() / sigma)
                .num("power", p);
        }
        PowerRouteArg::Slope => {
            let lambda = match (req.lambda, req.rho) {
                (Some(l), None) => EffectSize::new(l)?,
                (None, Some(r)) => rho_to_lambda(r)?,
                _ => return Err(Failure::Usage("--route slope needs one of --lambda or --rho".into())),
            };
            let threshold = critical_threshold(req.n, req.alpha, ctx.config.critical, &ctx.plan, &ctx.cache)?;
            let trials = req.trials.unwrap_or(ctx.plan.reps_inner);
            let est = simulate_power_model(
                req.n,
                &ModelParams::standardized(lambda),
                req.alpha,
                threshold,
                trials,
                &ctx.plan,
                ctx.config.sampler,
            )?;
            rec = rec
                .text("route", "slope".into())
                .num("lambda", lambda.get())
                .num("threshold", threshold)
                .int("trials", trials as i64)
                .num("power", est.power)
                .num("se", est.sd);
        }
        PowerRouteArg::Corr => {
            let rho = match (req.lambda, req.rho) {
                (None, Some(r)) => r,
                (Some(l), None) => {
                    let rho = lambda_to_rho(EffectSize::new(l)?);
                    eprintln!("note: lambda {l} converted to rho {rho:.6} for the correlation test");
                    rho
                }
                _ => return Err(Failure::Usage("--route corr needs one of --rho or --lambda".into())),
            };
            rec = rec
                .text("route", "correlation".into())
                .num("rho", rho)
                .num("power", corr_power_approx(req.n, rho, req.alpha)?);
            if req.mc {
                let mut plan = ctx.plan;
                if let Some(t) = req.trials {
                    plan.reps_inner = t;
                }
                let est = corr_power_mc(req.n, rho, req.alpha, &plan)?;
                rec = rec
                    .int("trials", plan.reps_inner as i64)
                    .num("power_mc", est.power)
                    .num("se_mc", est.sd);
            }
        }
    }
    print!("{}", rec.render(format)?);
    Ok(())
}

fn cache(ctx: &Context, action: CacheAction) -> CmdResult {
    let path = ctx
        .cache
        .path()
        .ok_or_else(|| Failure::Usage("no cache file configured (use --cache or SLRPOWER_CACHE)".into()))?;
    match action {
        CacheAction::Path => println!("{}", path.display()),
        CacheAction::Clear => {
            ctx.cache.clear()?;
            eprintln!("cleared {}", path.display());
        }
        CacheAction::Show { format } => {
            print!("{}", tables::cache_table(&ctx.cache).render(format)?);
        }
    }
    Ok(())
}
