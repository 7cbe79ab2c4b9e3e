//! Penalized least-squares projection, AIC-based ridge selection and the cap
//! operator.
//!
//! The fitted objective is the empirical one
//!
//! ```text
//! (1/n) * sum_t (y_t - x_t . b)^2  +  rho * sum_k b_k^2
//! ```
//!
//! so the normal equations are `(X'X + n * rho * D) b = X'y`, where `D` is the
//! identity except that the first column is exempt when `penalize_intercept`
//! is false. Callers whose design has no intercept column must set
//! `penalize_intercept = true`; the first column would otherwise be exempted
//! by position.

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, dot, Matrix};

/// Ridge penalty configuration.
#[derive(Debug, Clone)]
pub struct RidgeConfig {
    /// L2 penalty weight against the (1/n)-scaled squared loss.
    pub rho: f64,
    /// When false, the first design column is excluded from the penalty.
    pub penalize_intercept: bool,
    /// Candidate grid for [`select_ridge_aic`]. Empty means fixed-`rho` mode.
    pub rho_grid: Vec<f64>,
}

impl RidgeConfig {
    /// Fixed penalty, no grid search.
    pub fn fixed(rho: f64) -> Self {
        RidgeConfig {
            rho,
            penalize_intercept: false,
            rho_grid: Vec::new(),
        }
    }

    /// AIC search over the default grid.
    pub fn aic_default() -> Self {
        RidgeConfig {
            rho: 0.0,
            penalize_intercept: false,
            rho_grid: default_rho_grid(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho.is_finite() || self.rho < 0.0 {
            return Err(Error::Config(format!(
                "rho must be finite and >= 0, got {}",
                self.rho
            )));
        }
        for &r in &self.rho_grid {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::Config(format!(
                    "rho grid entry {r} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }
}

/// 0 plus 25 log-spaced points on [1e-8, 1e2].
pub fn default_rho_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    let (lo, hi, m) = (1e-8f64, 1e2f64, 25);
    let step = (hi.ln() - lo.ln()) / (m - 1) as f64;
    for i in 0..m {
        grid.push((lo.ln() + step * i as f64).exp());
    }
    grid
}

/// A fitted linear function together with its cap.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    /// Cap `B`; `f64::INFINITY` means uncapped.
    pub cap: f64,
    /// Residual sum of squares (unscaled).
    pub rss: f64,
    /// Trace of the ridge hat matrix at the fitted penalty.
    pub effective_dof: f64,
    /// Whether the rho = 0 jitter fallback was applied.
    pub jitter_applied: bool,
    /// Set by AIC selection when the winning candidate interpolated (rss = 0).
    pub degenerate: bool,
}

impl LinearFit {
    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = cap;
        self
    }
}

/// `[x]_B = sign(x) * min(|x|, B)`, for `B >= 0` (infinite means no cap).
pub fn cap(x: f64, bound: f64) -> f64 {
    debug_assert!(bound >= 0.0);
    x.clamp(-bound, bound)
}

fn check_inputs(features: &Matrix, targets: &[f64]) -> Result<()> {
    if features.n_rows() == 0 || features.n_cols() == 0 {
        return Err(Error::InputDomain("empty design matrix".into()));
    }
    if targets.len() != features.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} design rows vs {} targets",
            features.n_rows(),
            targets.len()
        )));
    }
    if !features.is_finite() || targets.iter().any(|v| !v.is_finite()) {
        return Err(Error::InputDomain(
            "non-finite entries in design or targets".into(),
        ));
    }
    Ok(())
}

/// Penalty matrix diagonal for the given settings.
fn penalty_diag(k: usize, n: usize, rho: f64, penalize_intercept: bool) -> Vec<f64> {
    let mut d = vec![n as f64 * rho; k];
    if !penalize_intercept && k > 0 {
        d[0] = 0.0;
    }
    d
}

/// Prefactored normal equations for one fixed design and penalty, for
/// callers that refit many target vectors against the same matrix.
#[derive(Debug, Clone)]
pub struct RidgeSolver {
    fact: Factorized,
    effective_dof: f64,
    rho: f64,
}

impl RidgeSolver {
    pub fn new(features: &Matrix, rho: f64, penalize_intercept: bool) -> Result<Self> {
        if features.n_rows() == 0 || features.n_cols() == 0 {
            return Err(Error::InputDomain("empty design matrix".into()));
        }
        if !features.is_finite() {
            return Err(Error::InputDomain("non-finite entries in design".into()));
        }
        let gram = features.gram();
        let pen = penalty_diag(
            features.n_cols(),
            features.n_rows(),
            rho,
            penalize_intercept,
        );
        let fact = factorize(&gram, &pen, rho)?;
        let effective_dof = dof_from_factor(&fact, &gram);
        Ok(RidgeSolver {
            fact,
            effective_dof,
            rho,
        })
    }

    /// Coefficients for one `X'y` vector.
    pub fn solve(&self, xty: &[f64]) -> Vec<f64> {
        cholesky_solve(&self.fact.chol, xty)
    }

    pub fn effective_dof(&self) -> f64 {
        self.effective_dof
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn jitter_applied(&self) -> bool {
        self.fact.jitter_applied
    }

    /// Full fit of one target vector, populating rss and dof.
    pub fn fit(&self, features: &Matrix, targets: &[f64]) -> Result<LinearFit> {
        check_inputs(features, targets)?;
        let xty = features.t_vec(targets)?;
        let coefficients = self.solve(&xty);
        let mut rss = 0.0;
        for (t, y) in targets.iter().enumerate() {
            let r = y - dot(features.row(t), &coefficients);
            rss += r * r;
        }
        Ok(LinearFit {
            coefficients,
            cap: f64::INFINITY,
            rss,
            effective_dof: self.effective_dof,
            jitter_applied: self.fact.jitter_applied,
            degenerate: false,
        })
    }
}

#[derive(Debug, Clone)]
struct Factorized {
    chol: Matrix,
    jitter_applied: bool,
}

fn factorize(gram: &Matrix, pen: &[f64], rho: f64) -> Result<Factorized> {
    let k = gram.n_rows();
    let mut a = gram.clone();
    for j in 0..k {
        a[(j, j)] += pen[j];
    }
    match cholesky(&mut a) {
        Ok(()) => Ok(Factorized {
            chol: a,
            jitter_applied: false,
        }),
        Err(pivot) => {
            if rho == 0.0 {
                // last resort before reporting the design as unusable
                let trace: f64 = (0..k).map(|j| gram[(j, j)]).sum();
                let jitter = 1e-12 * trace / k as f64;
                let mut a2 = gram.clone();
                for j in 0..k {
                    a2[(j, j)] += pen[j] + jitter;
                }
                if cholesky(&mut a2).is_ok() && jitter > 0.0 {
                    return Ok(Factorized {
                        chol: a2,
                        jitter_applied: true,
                    });
                }
            }
            Err(Error::IllConditioned {
                rank: pivot,
                dim: k,
            })
        }
    }
}

fn dof_from_factor(fact: &Factorized, gram: &Matrix) -> f64 {
    let k = gram.n_rows();
    let mut trace = 0.0;
    let mut col = vec![0.0; k];
    for j in 0..k {
        for (i, c) in col.iter_mut().enumerate() {
            *c = gram[(i, j)];
        }
        trace += cholesky_solve(&fact.chol, &col)[j];
    }
    trace
}

/// Ridge fit under the documented penalty scaling; deterministic.
pub fn ridge_fit(features: &Matrix, targets: &[f64], config: &RidgeConfig) -> Result<LinearFit> {
    config.validate()?;
    ridge_fit_at(features, targets, config.rho, config.penalize_intercept)
}

fn ridge_fit_at(
    features: &Matrix,
    targets: &[f64],
    rho: f64,
    penalize_intercept: bool,
) -> Result<LinearFit> {
    check_inputs(features, targets)?;
    RidgeSolver::new(features, rho, penalize_intercept)?.fit(features, targets)
}

/// Trace of the ridge hat matrix `X (X'X + n rho D)^-1 X'`.
pub fn effective_dof(features: &Matrix, rho: f64, penalize_intercept: bool) -> Result<f64> {
    if features.n_rows() == 0 || features.n_cols() == 0 {
        return Err(Error::InputDomain("empty design matrix".into()));
    }
    if !features.is_finite() {
        return Err(Error::InputDomain("non-finite entries in design".into()));
    }
    let gram = features.gram();
    let pen = penalty_diag(
        features.n_cols(),
        features.n_rows(),
        rho,
        penalize_intercept,
    );
    let fact = factorize(&gram, &pen, rho)?;
    Ok(dof_from_factor(&fact, &gram))
}

/// AIC value used by [`select_ridge_aic`]; `NEG_INFINITY` guards `ln(0)`.
fn aic(n: usize, rss: f64, edof: f64) -> f64 {
    if rss <= 0.0 {
        f64::NEG_INFINITY
    } else {
        n as f64 * (rss / n as f64).ln() + 2.0 * edof
    }
}

/// Pick the grid element minimizing `n ln(rss/n) + 2 edof`.
///
/// Ties break toward more shrinkage (larger rho); the scan is an explicit
/// argmin so grid order never matters. An exactly interpolating candidate
/// wins outright and is flagged as degenerate.
pub fn select_ridge_aic(
    features: &Matrix,
    targets: &[f64],
    config: &RidgeConfig,
) -> Result<(f64, LinearFit)> {
    config.validate()?;
    if config.rho_grid.is_empty() {
        return Err(Error::Config(
            "AIC selection requires a nonempty rho grid".into(),
        ));
    }
    let n = features.n_rows();
    let mut best: Option<(f64, f64, LinearFit)> = None; // (aic, rho, fit)
    for &rho in &config.rho_grid {
        let fit = ridge_fit_at(features, targets, rho, config.penalize_intercept)?;
        let score = aic(n, fit.rss, fit.effective_dof);
        let better = match &best {
            None => true,
            Some((s, r, _)) => score < *s || (score == *s && rho > *r),
        };
        if better {
            best = Some((score, rho, fit));
        }
    }
    let (score, rho_star, mut fit) = best.expect("nonempty grid");
    if score == f64::NEG_INFINITY {
        fit.degenerate = true;
    }
    Ok((rho_star, fit))
}

/// Capped predictions `[x_t . b]_B` per row.
pub fn predict(fit: &LinearFit, features: &Matrix) -> Result<Vec<f64>> {
    let mut out = features.vec_mul(&fit.coefficients)?;
    if fit.cap.is_finite() {
        for v in &mut out {
            *v = cap(*v, fit.cap);
        }
    }
    Ok(out)
}
