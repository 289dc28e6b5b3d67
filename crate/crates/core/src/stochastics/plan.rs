use crate::error::{invalid, Result};
use crate::exec::Execution;
use serde::{Deserialize, Serialize};

/// Replication counts and seed for every Monte Carlo computation.
///
/// - critical values: `reps_outer` replicates, each the empirical quantile
///   of `reps_inner` null draws;
/// - power search probes: `reps_inner` simulated regressions per probe;
/// - power validation: `reps_outer` independent power estimates of
///   `power_trials` regressions each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimPlan {
    pub reps_inner: u32,
    pub reps_outer: u32,
    pub power_trials: u32,
    pub master_seed: u64,
    /// Affects wall time only, never results.
    #[serde(skip)]
    pub execution: Execution,
}

impl SimPlan {
    /// 10,000 inner / 1,000 outer / 1,000 power trials.
    pub fn standard(master_seed: u64) -> Self {
        Self {
            reps_inner: 10_000,
            reps_outer: 1_000,
            power_trials: 1_000,
            master_seed,
            execution: Execution::default(),
        }
    }

    /// 1,000 inner / 50 outer / 1,000 power trials, for interactive use.
    pub fn fast(master_seed: u64) -> Self {
        Self {
            reps_inner: 1_000,
            reps_outer: 50,
            ..Self::standard(master_seed)
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps_inner < 100 {
            return Err(invalid(format!(
                "reps_inner must be at least 100, got {}",
                self.reps_inner
            )));
        }
        if self.reps_outer < 1 {
            return Err(invalid("reps_outer must be at least 1"));
        }
        if self.power_trials < 1 {
            return Err(invalid("power_trials must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let p = SimPlan::standard(3);
        assert_eq!((p.reps_inner, p.reps_outer, p.power_trials), (10_000, 1_000, 1_000));
        let f = SimPlan::fast(3);
        assert_eq!((f.reps_inner, f.reps_outer, f.power_trials), (1_000, 50, 1_000));
        assert!(p.validate().is_ok());
    }

    #[test]
    fn validation_limits() {
        let mut p = SimPlan::fast(0);
        p.reps_inner = 99;
        assert!(p.validate().is_err());
        p.reps_inner = 100;
        p.reps_outer = 0;
        assert!(p.validate().is_err());
    }
}
