//! Small statistics helpers shared by the samplers and experiments.

use statrs::distribution::{ContinuousCDF, Normal};

/// A mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

impl Estimate {
    /// Sample mean and `s / sqrt(n)`.
    pub fn from_samples(xs: &[f64]) -> Estimate {
        let n = xs.len();
        if n == 0 {
            return Estimate {
                mean: f64::NAN,
                std_err: f64::NAN,
                n,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std_err = if n > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Estimate { mean, std_err, n }
    }

    /// Frequency of `hits` successes in `n` independent trials.
    pub fn proportion(hits: usize, n: usize) -> Estimate {
        let p = hits as f64 / n as f64;
        Estimate {
            mean: p,
            std_err: (p * (1.0 - p) / n as f64).sqrt(),
            n,
        }
    }

    /// Mean with a batch-means standard error for correlated series.
    pub fn batch_means(xs: &[f64], batches: usize) -> Estimate {
        let n = xs.len();
        let batches = batches.max(2).min(n.max(1));
        let size = n / batches;
        if size == 0 {
            return Estimate::from_samples(xs);
        }
        let means: Vec<f64> = (0..batches)
            .map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let be = Estimate::from_samples(&means);
        Estimate {
            mean,
            std_err: be.std_err,
            n,
        }
    }
}

/// Upper `alpha` quantile of the standard normal law.
pub fn normal_upper_quantile(alpha: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    n.inverse_cdf(1.0 - alpha)
}

/// Two-sample z statistic for `a - b`.
pub fn z_difference(a: &Estimate, b: &Estimate) -> f64 {
    let se = (a.std_err.powi(2) + b.std_err.powi(2)).sqrt();
    if se == 0.0 {
        if a.mean == b.mean {
            0.0
        } else {
            (a.mean - b.mean).signum() * f64::INFINITY
        }
    } else {
        (a.mean - b.mean) / se
    }
}

/// Integrated autocorrelation time by the initial positive sequence.
pub fn integrated_autocorrelation(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return 1.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return 1.0;
    }
    let rho = |k: usize| {
        xs[..n - k]
            .iter()
            .zip(&xs[k..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum::<f64>()
            / (n as f64 * var)
    };
    let mut tau = 1.0;
    for k in 1..n / 2 {
        let r = rho(k);
        if r <= 0.0 {
            break;
        }
        tau += 2.0 * r;
    }
    tau
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        assert!((normal_upper_quantile(0.025) - 1.959964).abs() < 1e-5);
        assert!((normal_upper_quantile(0.01 / 20.0) - 3.2905).abs() < 1e-3);
    }

    #[test]
    fn estimates() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0]);
        assert_eq!(e.mean, 2.0);
        assert!((e.std_err - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let p = Estimate::proportion(25, 100);
        assert!((p.std_err - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn iid_autocorrelation_near_one() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 13) as f64).collect();
        assert!(integrated_autocorrelation(&xs) < 3.0);
    }
}
