//! Synthetic two-regime data generator.
//!
//! The signal state is a noisy sinusoid; returns for `N` assets are Gaussian
//! with regime-dependent means and an equicorrelated one-factor structure in
//! the bad regime (realized as `sqrt(rho) F + sqrt(1 - rho) e`, which is
//! distributionally identical to a dense equicorrelation draw at O(N) cost).
//!
//! Stream separation matters for the study design: the signal column, the
//! redundant noise columns and the returns each draw from their own seeded
//! stream, so changing the number of noise states never perturbs the returns.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::seeds::{rng, tag};

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n_est: usize,
    pub n_test: usize,
    /// Number of raw state columns L (column 1 is the signal).
    pub raw_dim: usize,
    /// Number of assets N.
    pub n_assets: usize,
    pub sigma_eps: f64,
    pub regime_corr: f64,
    pub threshold: f64,
    /// Multiplier on the bad-regime return variance (1 = the base design).
    pub bad_vol_multiplier: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_est: 500,
            n_test: 1000,
            raw_dim: 1,
            n_assets: 500,
            sigma_eps: 0.25,
            regime_corr: 0.9,
            threshold: -0.5,
            bad_vol_multiplier: 1.0,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.regime_corr) {
            return Err(Error::Config(format!(
                "regime correlation {} outside [0, 1)",
                self.regime_corr
            )));
        }
        if self.n_est + self.n_test < 2 {
            return Err(Error::Config("n_est + n_test must be at least 2".into()));
        }
        if self.raw_dim == 0 || self.n_assets == 0 {
            return Err(Error::Config(
                "raw_dim and n_assets must be positive".into(),
            ));
        }
        let eps_ok = self.sigma_eps >= 0.0 && !self.sigma_eps.is_nan();
        let mult_ok = self.bad_vol_multiplier > 0.0;
        if !eps_ok || !mult_ok {
            return Err(Error::Config(
                "sigma_eps must be >= 0 and bad_vol_multiplier > 0".into(),
            ));
        }
        Ok(())
    }

    /// Rows generated: `n_est + n_test + 1` (one extra next-state row).
    pub fn total_rows(&self) -> usize {
        self.n_est + self.n_test + 1
    }
}

/// One simulated path of states, returns and regime flags.
#[derive(Debug, Clone)]
pub struct SimSample {
    pub raw_states: Matrix,
    pub returns: Matrix,
    pub regime_flags: Vec<bool>,
}

/// Deterministic component of the regime mean, per asset.
pub fn mean_return(asset: usize, n_assets: usize, bad: bool) -> f64 {
    let loading = 1.0 + asset as f64 / n_assets as f64;
    let regime = if bad { -2.0 } else { 1.0 }; // (1 - 3 * indicator)
    0.03 / 252.0 + (0.30 / 252.0) * loading * regime
}

/// Return volatility per asset (time-constant in the base design).
pub fn return_vol(asset: usize, n_assets: usize) -> f64 {
    (0.3 / (252f64).sqrt()) * (1.0 + asset as f64 / n_assets as f64)
}

/// Signal plus noise states; the regime flag marks `signal <= threshold`.
pub fn gen_states(config: &SimConfig) -> Result<(Matrix, Vec<bool>)> {
    config.validate()?;
    let rows = config.total_rows();
    let l = config.raw_dim;
    let mut sig_rng = rng(&[config.seed, tag::SIGNAL]);
    let mut noise_rng = rng(&[config.seed, tag::NOISE_STATES]);
    let mut states = Matrix::zeros(rows, l);
    let mut flags = Vec::with_capacity(rows);
    for t in 0..rows {
        // the sine argument starts at t = 1
        let time = (t + 1) as f64;
        let eps: f64 = sig_rng.sample(StandardNormal);
        let signal = (2.0 * PI * time / 100.0).sin() + config.sigma_eps * eps;
        let row = states.row_mut(t);
        row[0] = signal;
        for v in row.iter_mut().skip(1) {
            *v = noise_rng.sample(StandardNormal);
        }
        flags.push(signal <= config.threshold);
    }
    Ok((states, flags))
}

/// Regime-dependent Gaussian returns aligned with the given flags.
pub fn gen_returns(regime_flags: &[bool], config: &SimConfig) -> Result<Matrix> {
    config.validate()?;
    let rows = regime_flags.len();
    let n = config.n_assets;
    let mut ret_rng = rng(&[config.seed, tag::RETURNS]);
    let mut returns = Matrix::zeros(rows, n);
    let sqrt_corr = config.regime_corr.sqrt();
    let sqrt_rest = (1.0 - config.regime_corr).sqrt();
    for (t, &bad) in regime_flags.iter().enumerate() {
        let row = returns.row_mut(t);
        let vol_scale = if bad {
            config.bad_vol_multiplier.sqrt()
        } else {
            1.0
        };
        if bad {
            let factor: f64 = ret_rng.sample(StandardNormal);
            for (i, v) in row.iter_mut().enumerate() {
                let e: f64 = ret_rng.sample(StandardNormal);
                let z = sqrt_corr * factor + sqrt_rest * e;
                *v = mean_return(i, n, true) + vol_scale * return_vol(i, n) * z;
            }
        } else {
            for (i, v) in row.iter_mut().enumerate() {
                let z: f64 = ret_rng.sample(StandardNormal);
                *v = mean_return(i, n, false) + return_vol(i, n) * z;
            }
        }
    }
    Ok(returns)
}

/// Full sample: states, flags and returns from one seed.
pub fn gen_sample(config: &SimConfig) -> Result<SimSample> {
    let (raw_states, regime_flags) = gen_states(config)?;
    let returns = gen_returns(&regime_flags, config)?;
    Ok(SimSample {
        raw_states,
        returns,
        regime_flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64) -> SimConfig {
        SimConfig {
            seed,
            ..SimConfig::default()
        }
    }

    #[test]
    fn deterministic_signal_without_noise() {
        let config = SimConfig {
            sigma_eps: 0.0,
            n_est: 80,
            n_test: 0,
            ..cfg(3)
        };
        let (states, flags) = gen_states(&config).unwrap();
        // row index 24 is t = 25: sin(pi/2) = 1
        assert!((states[(24, 0)] - 1.0).abs() < 1e-12);
        // t = 50: sin(pi) = 0, regime flag false since 0 > -1/2
        assert!(states[(49, 0)].abs() < 1e-12);
        assert!(!flags[49]);
        // t = 75: sin(3 pi / 2) = -1 <= -1/2
        assert!(flags[74]);
    }

    #[test]
    fn regime_fraction_near_one_third() {
        let config = SimConfig {
            n_est: 20_000,
            n_test: 0,
            ..cfg(11)
        };
        let (_, flags) = gen_states(&config).unwrap();
        let frac = flags.iter().filter(|f| **f).count() as f64 / flags.len() as f64;
        assert!((0.30..=0.36).contains(&frac), "bad-regime fraction {frac}");
    }

    #[test]
    fn mean_and_vol_formulas() {
        // good regime, first asset: (0.03 + 0.30) / 252
        assert!((mean_return(0, 500, false) - 0.33 / 252.0).abs() < 1e-15);
        // bad regime, first asset: (0.03 - 0.60) / 252
        assert!((mean_return(0, 500, true) - (-0.57 / 252.0)).abs() < 1e-15);
        // highest asset's vol approaches twice the base scale
        let base = 0.3 / (252f64).sqrt();
        assert!((return_vol(499, 500) - base * (1.0 + 499.0 / 500.0)).abs() < 1e-15);
        assert!((return_vol(499, 500) / base - 2.0).abs() < 3e-3);
    }

    #[test]
    fn sharpe_shape_is_homogeneous_within_regime() {
        // (mu_i - 0.03/252) / sigma_i is the same for every asset
        for bad in [false, true] {
            let r0 = (mean_return(0, 500, bad) - 0.03 / 252.0) / return_vol(0, 500);
            for i in [7, 100, 499] {
                let ri = (mean_return(i, 500, bad) - 0.03 / 252.0) / return_vol(i, 500);
                assert!((ri - r0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sample_is_bitwise_reproducible() {
        let config = SimConfig {
            n_est: 50,
            n_test: 20,
            raw_dim: 3,
            n_assets: 8,
            ..cfg(99)
        };
        let a = gen_sample(&config).unwrap();
        let b = gen_sample(&config).unwrap();
        assert_eq!(a.raw_states, b.raw_states);
        assert_eq!(a.returns, b.returns);
        assert_eq!(a.regime_flags, b.regime_flags);
    }

    #[test]
    fn returns_do_not_depend_on_noise_state_count() {
        let narrow = SimConfig {
            n_est: 40,
            n_test: 10,
            raw_dim: 1,
            n_assets: 6,
            ..cfg(5)
        };
        let wide = SimConfig {
            raw_dim: 10,
            ..narrow.clone()
        };
        let a = gen_sample(&narrow).unwrap();
        let b = gen_sample(&wide).unwrap();
        assert_eq!(a.returns, b.returns);
        assert_eq!(a.regime_flags, b.regime_flags);
        for t in 0..a.raw_states.n_rows() {
            assert_eq!(a.raw_states[(t, 0)], b.raw_states[(t, 0)]);
        }
        assert_eq!(a.raw_states.n_cols(), 1);
    }

    #[test]
    fn bad_regime_pairwise_correlation() {
        let config = SimConfig {
            n_est: 30_000,
            n_test: 0,
            n_assets: 2,
            ..cfg(17)
        };
        let sample = gen_sample(&config).unwrap();
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0, 0usize);
        for t in 0..sample.returns.n_rows() {
            if sample.regime_flags[t] {
                let (x, y) = (sample.returns[(t, 0)], sample.returns[(t, 1)]);
                sx += x;
                sy += y;
                sxx += x * x;
                syy += y * y;
                sxy += x * y;
                m += 1;
            }
        }
        assert!(m > 8_000, "need enough bad rows, got {m}");
        let mf = m as f64;
        let corr =
            (sxy - sx * sy / mf) / ((sxx - sx * sx / mf).sqrt() * (syy - sy * sy / mf).sqrt());
        assert!((corr - 0.9).abs() < 0.03, "bad-regime correlation {corr}");
    }

    #[test]
    fn good_regime_stats() {
        let config = SimConfig {
            n_est: 30_000,
            n_test: 0,
            n_assets: 3,
            ..cfg(23)
        };
        let sample = gen_sample(&config).unwrap();
        let rows: Vec<usize> = (0..sample.returns.n_rows())
            .filter(|t| !sample.regime_flags[*t])
            .collect();
        let m = rows.len() as f64;
        for i in 0..3 {
            let mean: f64 = rows.iter().map(|&t| sample.returns[(t, i)]).sum::<f64>() / m;
            let var: f64 = rows
                .iter()
                .map(|&t| (sample.returns[(t, i)] - mean).powi(2))
                .sum::<f64>()
                / (m - 1.0);
            let want = return_vol(i, 3);
            assert!(
                (var.sqrt() / want - 1.0).abs() < 0.05,
                "asset {i} std {} vs {want}",
                var.sqrt()
            );
        }
        // cross correlation near zero in the good regime
        let (mut sxy, mut sxx, mut syy, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &t in &rows {
            let (x, y) = (sample.returns[(t, 0)], sample.returns[(t, 2)]);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        let corr = (sxy - sx * sy / m) / ((sxx - sx * sx / m).sqrt() * (syy - sy * sy / m).sqrt());
        assert!(corr.abs() < 0.05, "good-regime correlation {corr}");
    }
}
