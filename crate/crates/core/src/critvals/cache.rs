//! Plain-text store of Monte Carlo critical values.
//!
//! One record per line:
//!
//! ```text
//! n alpha reps_inner reps_outer master_seed value sd
//! ```
//!
//! Floats are written in shortest round-trip form, so a cache hit returns a
//! bit-identical estimate. Lines starting with `#` are comments.

use super::{critical_value_mc, CriticalMethod, CriticalValueEstimate};
use crate::error::Result;
use crate::stochastics::SimPlan;
use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

const HEADER: &str = "# slrpower critical values: n alpha reps_inner reps_outer master_seed value sd";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    n: u32,
    alpha_bits: u64,
    reps_inner: u32,
    reps_outer: u32,
    master_seed: u64,
}

impl CacheKey {
    fn new(n: u32, alpha: f64, plan: &SimPlan) -> Self {
        Self {
            n,
            alpha_bits: alpha.to_bits(),
            reps_inner: plan.reps_inner,
            reps_outer: plan.reps_outer,
            master_seed: plan.master_seed,
        }
    }

    fn alpha(&self) -> f64 {
        f64::from_bits(self.alpha_bits)
    }
}

/// A stored record, as listed by [`CriticalValueCache::entries`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheEntry {
    pub n: u32,
    pub alpha: f64,
    pub reps_inner: u32,
    pub reps_outer: u32,
    pub master_seed: u64,
    pub value: f64,
    pub sd: f64,
}

#[derive(Default)]
struct State {
    entries: HashMap<CacheKey, (f64, f64)>,
    corrupt: HashSet<CacheKey>,
    needs_rewrite: bool,
    io_errors: Vec<String>,
    hits: u64,
    misses: u64,
}

/// Memoises [`critical_value_mc`] in memory and, optionally, on disk.
///
/// All access goes through one mutex. File problems never fail a lookup:
/// they are recorded (see [`io_errors`](Self::io_errors)) and the value is
/// recomputed.
pub struct CriticalValueCache {
    path: Option<PathBuf>,
    state: Mutex<State>,
}

impl CriticalValueCache {
    pub fn in_memory() -> Self {
        Self {
            path: None,
            state: Mutex::new(State::default()),
        }
    }

    /// Opens (or lazily creates) a cache file.
    pub fn open(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let mut state = State::default();
        match fs::read_to_string(&path) {
            Ok(text) => parse_into(&text, &mut state),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => state.io_errors.push(format!("reading {}: {e}", path.display())),
        }
        Self {
            path: Some(path),
            state: Mutex::new(state),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Returns the cached estimate for `(n, alpha, plan)` or computes and
    /// stores it. Only `reps_inner`, `reps_outer` and `master_seed` of the
    /// plan form part of the key.
    pub fn get_or_compute(&self, n: u32, alpha: f64, plan: &SimPlan) -> Result<CriticalValueEstimate> {
        let key = CacheKey::new(n, alpha, plan);
        let mut state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        if !state.corrupt.contains(&key) {
            if let Some(&(value, sd)) = state.entries.get(&key) {
                state.hits += 1;
                return Ok(CriticalValueEstimate {
                    n,
                    alpha,
                    value,
                    sd,
                    method: CriticalMethod::ExactMc,
                });
            }
        }
        state.misses += 1;
        let est = critical_value_mc(n, alpha, plan)?;
        state.entries.insert(key, (est.value, est.sd));
        let rewrite = state.corrupt.remove(&key) || state.needs_rewrite;
        if let Some(path) = &self.path {
            let outcome = if rewrite {
                write_all(path, &state.entries)
            } else {
                append(path, &key, est.value, est.sd)
            };
            match outcome {
                Ok(()) => state.needs_rewrite = false,
                Err(e) => {
                    log::warn!("critical-value cache {}: {e}", path.display());
                    state.io_errors.push(format!("writing {}: {e}", path.display()));
                }
            }
        }
        Ok(est)
    }

    pub fn entries(&self) -> Vec<CacheEntry> {
        let state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        let mut out: Vec<CacheEntry> = state
            .entries
            .iter()
            .filter(|(k, _)| !state.corrupt.contains(k))
            .map(|(k, &(value, sd))| CacheEntry {
                n: k.n,
                alpha: k.alpha(),
                reps_inner: k.reps_inner,
                reps_outer: k.reps_outer,
                master_seed: k.master_seed,
                value,
                sd,
            })
            .collect();
        out.sort_by(|a, b| {
            (a.master_seed, a.reps_inner, a.reps_outer, a.n)
                .cmp(&(b.master_seed, b.reps_inner, b.reps_outer, b.n))
                .then(b.alpha.total_cmp(&a.alpha))
        });
        out
    }

    /// Drops every entry and truncates the backing file.
    pub fn clear(&self) -> std::io::Result<()> {
        let mut state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        *state = State::default();
        if let Some(path) = &self.path {
            if path.exists() {
                fs::remove_file(path)?;
            }
        }
        Ok(())
    }

    /// (hits, misses) since the cache was opened.
    pub fn stats(&self) -> (u64, u64) {
        let state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        (state.hits, state.misses)
    }

    pub fn io_errors(&self) -> Vec<String> {
        self.state.lock().unwrap_or_else(|e| e.into_inner()).io_errors.clone()
    }
}

fn parse_into(text: &str, state: &mut State) {
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let key = (|| {
            Some(CacheKey {
                n: fields.first()?.parse().ok()?,
                alpha_bits: fields.get(1)?.parse::<f64>().ok()?.to_bits(),
                reps_inner: fields.get(2)?.parse().ok()?,
                reps_outer: fields.get(3)?.parse().ok()?,
                master_seed: fields.get(4)?.parse().ok()?,
            })
        })();
        let Some(key) = key else {
            state.needs_rewrite = true;
            continue;
        };
        let value = fields.get(5).and_then(|s| s.parse::<f64>().ok());
        let sd = fields.get(6).and_then(|s| s.parse::<f64>().ok());
        match (value, sd, fields.len()) {
            (Some(v), Some(s), 7) if v.is_finite() && v > 0.0 && s.is_finite() && s >= 0.0 => {
                state.corrupt.remove(&key);
                state.entries.insert(key, (v, s));
            }
            _ => {
                state.corrupt.insert(key);
                state.needs_rewrite = true;
            }
        }
    }
}

fn record(key: &CacheKey, value: f64, sd: f64) -> String {
    format!(
        "{} {} {} {} {} {} {}\n",
        key.n,
        key.alpha(),
        key.reps_inner,
        key.reps_outer,
        key.master_seed,
        value,
        sd
    )
}

fn append(path: &Path, key: &CacheKey, value: f64, sd: f64) -> std::io::Result<()> {
    let fresh = !path.exists();
    let mut file = fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(file, "{HEADER}")?;
    }
    file.write_all(record(key, value, sd).as_bytes())
}

fn write_all(path: &Path, entries: &HashMap<CacheKey, (f64, f64)>) -> std::io::Result<()> {
    let mut text = format!("{HEADER}\n");
    let mut keys: Vec<&CacheKey> = entries.keys().collect();
    keys.sort_by_key(|k| (k.master_seed, k.reps_inner, k.reps_outer, k.n, k.alpha_bits));
    for k in keys {
        let (v, s) = entries[k];
        text.push_str(&record(k, v, s));
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}
