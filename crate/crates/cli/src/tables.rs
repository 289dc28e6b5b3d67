use crate::render::{percent, Table};
use crate::{Context, Failure};
use serde_json::json;
use slrpower::corroute::{find_sample_size_corr, lambda_to_rho, rho_lambda_curve};
use slrpower::critvals::{table1, CriticalValueCache, TABLE1_COLUMNS};
use slrpower::powersim::find_sample_size_slope_with;
use slrpower::EffectSize;
use std::fmt;
use std::str::FromStr;

pub const LAMBDAS: [f64; 6] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
pub const POWERS: [f64; 4] = [0.80, 0.90, 0.95, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Critical,
    Power(u8),
    Contrast(u8),
    Curve,
}

impl Which {
    /// Significance level of tables 2 to 7.
    fn alpha(self) -> Option<f64> {
        let level = |k: u8| [0.10, 0.05, 0.01][((k - 2) % 3) as usize];
        match self {
            Which::Power(k) | Which::Contrast(k) => Some(level(k)),
            _ => None,
        }
    }
}

impl FromStr for Which {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(Which::Critical),
            "2" | "3" | "4" => Ok(Which::Power(s.trim().parse().unwrap())),
            "5" | "6" | "7" => Ok(Which::Contrast(s.trim().parse().unwrap())),
            "graph1" | "curve" => Ok(Which::Curve),
            other => Err(format!("unknown table {other:?}; expected 1-7 or graph1")),
        }
    }
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Which::Critical => f.write_str("1"),
            Which::Power(k) | Which::Contrast(k) => write!(f, "{k}"),
            Which::Curve => f.write_str("graph1"),
        }
    }
}

pub struct TableRequest {
    pub which: Which,
    pub from: u32,
    pub to: u32,
    pub lambdas: Option<Vec<f64>>,
    pub powers: Option<Vec<f64>>,
}

pub fn build(req: &TableRequest, ctx: &Context) -> Result<Table, Failure> {
    let lambdas = req.lambdas.clone().unwrap_or_else(|| LAMBDAS.to_vec());
    let powers = req.powers.clone().unwrap_or_else(|| POWERS.to_vec());
    match req.which {
        Which::Critical => critical_table(req.from, req.to, ctx),
        Which::Power(_) => power_rows(req.which.alpha().unwrap(), &lambdas, &powers, ctx),
        Which::Contrast(_) => contrast_rows(req.which.alpha().unwrap(), &lambdas, &powers, ctx),
        Which::Curve => {
            let grid = req
                .lambdas
                .clone()
                .unwrap_or_else(|| (0..=60).map(|i| i as f64 * 0.05).collect());
            let mut t = Table::new(vec!["lambda".into(), "rho".into()]);
            for (l, r) in rho_lambda_curve(&grid)? {
                t.push(
                    vec![format!("{l}"), format!("{r:.6}")],
                    json!({ "lambda": l, "rho": r }),
                );
            }
            Ok(t)
        }
    }
}

fn critical_table(from: u32, to: u32, ctx: &Context) -> Result<Table, Failure> {
    let rows = table1(from..=to, &ctx.plan)?;
    let mut t = Table::new(TABLE1_COLUMNS.iter().map(|s| s.to_string()).collect());
    for r in rows {
        let shown = [
            r.normal10,
            r.criticalvalue10,
            r.normal5,
            r.criticalvalue5,
            r.normal1,
            r.criticalvalue1,
        ];
        let mut cells = vec![r.samplesize.to_string()];
        cells.extend(shown.iter().map(|v| format!("{v:.3}")));
        t.push(
            cells,
            serde_json::to_value(r).map_err(|e| Failure::Numerical(e.to_string()))?,
        );
    }
    Ok(t)
}

fn power_rows(alpha: f64, lambdas: &[f64], powers: &[f64], ctx: &Context) -> Result<Table, Failure> {
    let mut t = Table::new(["lambda", "power", "n", "mean", "sd"].map(String::from).to_vec());
    for &l in lambdas {
        for &p in powers {
            let r = find_sample_size_slope_with(EffectSize::new(l)?, alpha, p, &ctx.plan, &ctx.config, &ctx.cache)?;
            log::info!("alpha {alpha} lambda {l} power {p}: n = {}", r.n);
            t.push(
                vec![
                    format!("{l}"),
                    percent(p),
                    r.n.to_string(),
                    format!("{:.4}", r.validated_mean),
                    format!("{:.4}", r.validated_sd),
                ],
                json!({ "lambda": l, "power": p, "n": r.n, "mean": r.validated_mean, "sd": r.validated_sd }),
            );
        }
    }
    Ok(t)
}

fn contrast_rows(alpha: f64, lambdas: &[f64], powers: &[f64], ctx: &Context) -> Result<Table, Failure> {
    let headers = [
        "alpha",
        "lambda",
        "rho",
        "power",
        "slope_test",
        "corr_test",
        "difference",
    ];
    let mut t = Table::new(headers.map(String::from).to_vec());
    for &l in lambdas {
        let lambda = EffectSize::new(l)?;
        let rho = lambda_to_rho(lambda);
        for &p in powers {
            let slope = find_sample_size_slope_with(lambda, alpha, p, &ctx.plan, &ctx.config, &ctx.cache)?;
            let corr = find_sample_size_corr(rho, alpha, p)?;
            let diff = slope.n as i64 - corr.n as i64;
            log::info!("alpha {alpha} lambda {l} power {p}: slope {} corr {}", slope.n, corr.n);
            t.push(
                vec![
                    format!("{alpha}"),
                    format!("{l}"),
                    format!("{rho:.4}"),
                    percent(p),
                    slope.n.to_string(),
                    corr.n.to_string(),
                    diff.to_string(),
                ],
                json!({
                    "alpha": alpha,
                    "lambda": l,
                    "rho": rho,
                    "power": p,
                    "slope_test": slope.n,
                    "corr_test": corr.n,
                    "difference": diff,
                    "slope_mean": slope.validated_mean,
                    "slope_sd": slope.validated_sd,
                }),
            );
        }
    }
    Ok(t)
}

pub fn cache_table(cache: &CriticalValueCache) -> Table {
    let headers = ["n", "alpha", "reps_inner", "reps_outer", "master_seed", "value", "sd"];
    let mut t = Table::new(headers.map(String::from).to_vec());
    for e in cache.entries() {
        t.push(
            vec![
                e.n.to_string(),
                format!("{}", e.alpha),
                e.reps_inner.to_string(),
                e.reps_outer.to_string(),
                e.master_seed.to_string(),
                format!("{:.6}", e.value),
                format!("{:.6}", e.sd),
            ],
            json!({
                "n": e.n,
                "alpha": e.alpha,
                "reps_inner": e.reps_inner,
                "reps_outer": e.reps_outer,
                "master_seed": e.master_seed,
                "value": e.value,
                "sd": e.sd,
            }),
        );
    }
    t
}
