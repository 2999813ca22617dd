//! Monte Carlo estimates and least-squares fits.

use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Half-width of the 95% confidence interval.
    pub ci_half_width: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    /// Frequency of `hits` among `samples` with a normal-approximation interval.
    pub fn proportion(hits: u64, samples: u64, seed: u64) -> Self {
        let n = samples.max(1) as f64;
        let q = hits as f64 / n;
        Estimate {
            value: q,
            ci_half_width: Z95 * (q * (1.0 - q) / n).sqrt(),
            samples,
            seed,
        }
    }

    pub fn mean(values: &[f64], seed: u64) -> Self {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            ci_half_width: Z95 * (var / n).sqrt(),
            samples: values.len() as u64,
            seed,
        }
    }

    pub fn lo(&self) -> f64 {
        self.value - self.ci_half_width
    }

    pub fn hi(&self) -> f64 {
        self.value + self.ci_half_width
    }

    pub fn covers(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }
}

/// Ordinary least squares `y = intercept + slope x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// Residual sum of squares.
    pub rss: f64,
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_se = if n > 2 { (rss / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Some(LinearFit {
        slope,
        intercept,
        slope_se,
        rss,
        points: n,
    })
}
