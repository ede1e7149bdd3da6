//! Log-space numerics.

use crate::error::{Error, Result};

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::NonPositive {
            what: "log-gamma argument",
            value: x,
        });
    }
    Ok(ln_gamma(x))
}

#[inline]
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

/// `ln Γ(a + n) - ln Γ(a)`; exact zero when `n == 0`.
#[inline]
pub(crate) fn ln_rising(a: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= 16 && (1.0..1e18).contains(&a) {
        // short products are more accurate than a difference of two lgammas
        let mut acc = 1.0;
        for t in 0..n {
            acc *= a + t as f64;
        }
        return libm::log(acc);
    }
    ln_gamma(a + n as f64) - ln_gamma(a)
}

/// Running `ln Σ exp(x_i)` that never overflows.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * libm::exp(self.max - x) + 1.0;
            self.max = x;
        } else {
            self.scaled += libm::exp(x - self.max);
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + libm::log(self.scaled)
        }
    }
}

/// `ln Σ exp(x_i)`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut acc = LogSumExp::new();
    xs.iter().for_each(|&x| acc.add(x));
    acc.value()
}
