//! Experiment runner: sweeps over corpus and sampler parameters, distribution
//! comparisons and reproducibility studies.

mod compare;
mod plan;
mod repro;
mod sweep;

pub use compare::{compare_distributions, DistributionComparison};
pub use plan::{
    AlgorithmSpec, ExperimentPlan, Recipe, Scale, Sweep, SweepPoint, SweepValue, SweptParameter,
};
pub use repro::{run_reproducibility, ReproReport, ReproRow, SeedPolicy};
pub use sweep::{
    append_rows, run_sweep, score_result, summary_path, PointSummary, ScoreRow, SweepReport,
    STATUS_FAILED, STATUS_OK,
};

/// Mean and sample standard deviation (`n - 1` denominator; zero for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_standard_deviation() {
        let (m, sd) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_sd(&[7.0]), (7.0, 0.0));
    }
}
