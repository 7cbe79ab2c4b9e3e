//! Covariate preprocessing for user-supplied data: EWMA z-scoring, bin
//! digitization into `{0, 1/7, ..., 1}`, and the covariate CSV loader.
//!
//! The z-score recursion follows the uncentered convention
//!
//! ```text
//! mu_t  = lambda mu_{t-1}  + (1 - lambda) x_t
//! s2_t  = lambda s2_{t-1}  + (1 - lambda) x_t^2
//! z_t   = (x_t - mu_t) / sqrt(s2_t)
//! ```
//!
//! note the scale is the root EWMA of raw squares, not a centered variance.
//! A centered variant (`s2 - mu^2` as the variance) sits behind a flag,
//! default off.

use std::path::Path;

use crate::csvio;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Per-column EWMA state of the z-score recursion.
#[derive(Debug, Clone)]
pub struct ZScoreState {
    pub mu: Vec<f64>,
    /// EWMA of raw squares.
    pub m2: Vec<f64>,
    pub lambda: f64,
    pub centered: bool,
    /// Last emitted z per column, carried through degenerate rows.
    last_z: Vec<f64>,
    initialized: bool,
}

impl ZScoreState {
    pub fn new(n_cols: usize, lambda: f64, centered: bool) -> Result<Self> {
        if !(0.0 < lambda && lambda < 1.0) {
            return Err(Error::Config(format!("lambda {lambda} outside (0, 1)")));
        }
        Ok(ZScoreState {
            mu: vec![0.0; n_cols],
            m2: vec![0.0; n_cols],
            lambda,
            centered,
            last_z: vec![0.0; n_cols],
            initialized: false,
        })
    }

    /// Advance one row and return the z-scores. The first row seeds the
    /// state (`mu = x`, `m2 = x^2`) and therefore scores zero wherever the
    /// observation is nonzero. A zero scale marks the column degenerate for
    /// this row: the previous z is carried forward.
    pub fn step(&mut self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.mu.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} cells vs {} z-score columns",
                row.len(),
                self.mu.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InputDomain("non-finite covariate".into()));
        }
        if !self.initialized {
            for (i, &x) in row.iter().enumerate() {
                self.mu[i] = x;
                self.m2[i] = x * x;
            }
            self.initialized = true;
        } else {
            for (i, &x) in row.iter().enumerate() {
                self.mu[i] = self.lambda * self.mu[i] + (1.0 - self.lambda) * x;
                self.m2[i] = self.lambda * self.m2[i] + (1.0 - self.lambda) * x * x;
            }
        }
        let mut z = vec![0.0; row.len()];
        for (i, &x) in row.iter().enumerate() {
            let var = if self.centered {
                self.m2[i] - self.mu[i] * self.mu[i]
            } else {
                self.m2[i]
            };
            let sigma = var.max(0.0).sqrt();
            if sigma > 0.0 {
                z[i] = (x - self.mu[i]) / sigma;
                self.last_z[i] = z[i];
            } else {
                z[i] = self.last_z[i];
            }
        }
        Ok(z)
    }
}

/// The fixed digitization grid: bins `[j - 4, j - 3)` for `j = 1..6`, with
/// everything below the grid mapped to 0 and at or above the top edge to 7,
/// then scaled by 1/7.
#[derive(Debug, Clone)]
pub struct DigitizerSpec {
    pub bin_edges: Vec<f64>,
    pub out_low: f64,
    pub out_high: f64,
    pub scale: f64,
}

impl Default for DigitizerSpec {
    fn default() -> Self {
        DigitizerSpec {
            bin_edges: (1..=7).map(|j| (j - 4) as f64).collect(),
            out_low: 0.0,
            out_high: 7.0,
            scale: 7.0,
        }
    }
}

impl DigitizerSpec {
    pub fn digitize(&self, z: f64) -> f64 {
        debug_assert!(z.is_finite());
        let m = self.bin_edges.len();
        if z < self.bin_edges[0] {
            return self.out_low / self.scale;
        }
        for j in 1..m {
            if z < self.bin_edges[j] {
                return j as f64 / self.scale;
            }
        }
        self.out_high / self.scale
    }
}

/// Standard-grid digitization of one z-score.
pub fn digitize(z: f64) -> f64 {
    DigitizerSpec::default().digitize(z)
}

/// A loaded covariate table with forward-fill diagnostics.
#[derive(Debug, Clone)]
pub struct CovariateTable {
    pub index: Vec<String>,
    pub names: Vec<String>,
    pub values: Matrix,
    /// Forward-filled cell count per column.
    pub fill_counts: Vec<usize>,
    /// Leading rows dropped because some column had no observation yet.
    pub dropped_leading: usize,
}

/// Load a covariate CSV: header row, first column a sortable date/index.
/// Rows are sorted ascending, interior missing cells are forward-filled, and
/// leading rows where any column is still unobserved are dropped.
pub fn load_covariates(path: &Path) -> Result<CovariateTable> {
    let table = csvio::read_matrix(path)?;
    let n = table.values.n_rows();
    let k = table.values.n_cols();

    // sort ascending by index: numerically when every key parses, else
    // lexicographically (covers ISO dates)
    let mut order: Vec<usize> = (0..n).collect();
    let numeric: Option<Vec<f64>> = table
        .index
        .iter()
        .map(|s| s.trim().parse::<f64>().ok())
        .collect();
    match &numeric {
        Some(keys) => order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b])),
        None => order.sort_by(|&a, &b| table.index[a].cmp(&table.index[b])),
    }
    for w in order.windows(2) {
        let (a, b) = (&table.index[w[0]], &table.index[w[1]]);
        let dup = match &numeric {
            Some(keys) => keys[w[0]] == keys[w[1]],
            None => a == b,
        };
        if dup {
            return Err(Error::Data(format!("duplicate timestamp {a:?}")));
        }
    }

    let mut fill_counts = vec![0usize; k];
    let mut last: Vec<Option<f64>> = vec![None; k];
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut index = Vec::with_capacity(n);
    let mut dropped_leading = 0usize;
    for &src in &order {
        let mut row = Vec::with_capacity(k);
        let mut complete = true;
        for j in 0..k {
            let v = table.values[(src, j)];
            if v.is_nan() {
                match last[j] {
                    Some(prev) => {
                        fill_counts[j] += 1;
                        row.push(prev);
                    }
                    None => {
                        complete = false;
                        row.push(f64::NAN);
                    }
                }
            } else {
                last[j] = Some(v);
                row.push(v);
            }
        }
        if complete {
            index.push(table.index[src].clone());
            rows.push(row);
        } else {
            dropped_leading += 1;
        }
    }
    if rows.is_empty() {
        return Err(Error::Data(format!(
            "{}: no complete rows after forward fill",
            path.display()
        )));
    }
    Ok(CovariateTable {
        index,
        names: table.names,
        values: Matrix::from_rows(rows)?,
        fill_counts,
        dropped_leading,
    })
}

/// Full preprocessing: z-score each column causally, digitize onto the
/// `{0, 1/7, ..., 1}` grid.
pub fn preprocess(values: &Matrix, lambda: f64, centered: bool) -> Result<Matrix> {
    let mut state = ZScoreState::new(values.n_cols(), lambda, centered)?;
    let digitizer = DigitizerSpec::default();
    let mut out = Matrix::zeros(values.n_rows(), values.n_cols());
    for t in 0..values.n_rows() {
        let z = state.step(values.row(t))?;
        for (j, zv) in z.iter().enumerate() {
            out[(t, j)] = digitizer.digitize(*zv);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_scores_zero() {
        let mut s = ZScoreState::new(1, 0.99, false).unwrap();
        for _ in 0..10 {
            let z = s.step(&[3.5]).unwrap();
            assert_eq!(z[0], 0.0);
        }
    }

    #[test]
    fn one_step_arithmetic() {
        // mu = 0, m2 = 1 already seeded; feed x = 2 with lambda 0.99:
        // mu' = 0.02, m2' = 1.03, z = (2 - 0.02) / sqrt(1.03)
        let mut s = ZScoreState::new(1, 0.99, false).unwrap();
        s.step(&[0.0]).unwrap(); // seeds mu = 0, m2 = 0
        s.mu[0] = 0.0;
        s.m2[0] = 1.0;
        let z = s.step(&[2.0]).unwrap();
        let want = (2.0 - 0.02) / 1.03f64.sqrt();
        assert!((z[0] - want).abs() < 1e-12);
        assert!((z[0] - 1.951).abs() < 1e-3);
        assert!((s.mu[0] - 0.02).abs() < 1e-15);
        assert!((s.m2[0] - 1.03).abs() < 1e-15);
    }

    #[test]
    fn lambda_close_to_one_freezes_the_state() {
        let mut s = ZScoreState::new(1, 0.999999, false).unwrap();
        s.step(&[1.0]).unwrap();
        let (mu0, m20) = (s.mu[0], s.m2[0]);
        let z = s.step(&[4.0]).unwrap();
        assert!((s.mu[0] - mu0).abs() < 1e-4);
        assert!((s.m2[0] - m20).abs() < 2e-2);
        let frozen = (4.0 - mu0) / m20.sqrt();
        assert!((z[0] - frozen).abs() < 1e-4);
    }

    #[test]
    fn zero_scale_carries_previous_z() {
        let mut s = ZScoreState::new(1, 0.5, false).unwrap();
        let z0 = s.step(&[0.0]).unwrap();
        assert_eq!(z0[0], 0.0, "no scale yet, defaults to zero");
        s.step(&[2.0]).unwrap();
        let z2 = s.step(&[1.0]).unwrap();
        let z3 = {
            // force a degenerate scale by hand
            s.m2[0] = 0.0;
            s.step(&[0.0]).unwrap()
        };
        assert_eq!(z3[0], z2[0]);
    }

    #[test]
    fn digitize_grid() {
        assert!(
            (digitize(0.0) - 4.0 / 7.0).abs() < 1e-15,
            "0 lands in [0, 1)"
        );
        assert_eq!(digitize(-5.0), 0.0);
        assert_eq!(digitize(10.0), 1.0);
        assert_eq!(digitize(3.0), 1.0, "top edge closes upward");
        assert!((digitize(-3.0) - 1.0 / 7.0).abs() < 1e-15);
        assert!((digitize(-2.5) - 1.0 / 7.0).abs() < 1e-15);
        assert!((digitize(2.999) - 6.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn digitizer_is_monotone_and_eight_valued() {
        let mut prev = -1.0;
        let mut seen = std::collections::BTreeSet::new();
        let mut z = -6.0;
        while z <= 6.0 {
            let d = digitize(z);
            assert!(d >= prev);
            prev = d;
            seen.insert((d * 7.0).round() as i64);
            z += 0.01;
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn pipeline_outputs_live_on_the_grid() {
        let mut rows = Vec::new();
        let mut x: f64 = 0.3;
        for t in 0..200 {
            x = 0.9 * x + ((t * 37 % 17) as f64 - 8.0) / 5.0;
            rows.push(vec![x, (t as f64).sin() * 3.0]);
        }
        let m = Matrix::from_rows(rows).unwrap();
        let out = preprocess(&m, 0.99, false).unwrap();
        for t in 0..out.n_rows() {
            for j in 0..out.n_cols() {
                let scaled = out[(t, j)] * 7.0;
                assert!((scaled - scaled.round()).abs() < 1e-12);
                assert!((0.0..=1.0).contains(&out[(t, j)]));
            }
        }
    }

    #[test]
    fn preprocessing_is_causal() {
        // truncating the input does not change earlier outputs
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|t| vec![((t * 13 % 23) as f64) / 3.0 - 2.0])
            .collect();
        let full = preprocess(&Matrix::from_rows(rows.clone()).unwrap(), 0.95, false).unwrap();
        let half = preprocess(
            &Matrix::from_rows(rows[..30].to_vec()).unwrap(),
            0.95,
            false,
        )
        .unwrap();
        for t in 0..30 {
            assert_eq!(full[(t, 0)], half[(t, 0)]);
        }
    }

    #[test]
    fn load_covariates_sorts_fills_and_reports() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cov.csv");
        std::fs::write(
            &path,
            "date,a,b\n2020-01-03,3.0,\n2020-01-01,1.0,10.0\n2020-01-02,,20.0\n",
        )
        .unwrap();
        let t = load_covariates(&path).unwrap();
        assert_eq!(t.index, vec!["2020-01-01", "2020-01-02", "2020-01-03"]);
        assert_eq!(t.values[(1, 0)], 1.0, "forward filled");
        assert_eq!(t.values[(2, 1)], 20.0, "forward filled");
        assert_eq!(t.fill_counts, vec![1, 1]);
        assert_eq!(t.dropped_leading, 0);
        assert_eq!(t.names, vec!["a", "b"]);
    }

    #[test]
    fn leading_missing_rows_are_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cov.csv");
        std::fs::write(&path, "t,a,b\n1,,5.0\n2,1.0,6.0\n3,2.0,\n").unwrap();
        let t = load_covariates(&path).unwrap();
        assert_eq!(t.dropped_leading, 1);
        assert_eq!(t.index, vec!["2", "3"]);
        assert_eq!(t.values[(1, 1)], 6.0);
        assert_eq!(t.fill_counts, vec![0, 1]);
    }

    #[test]
    fn duplicate_timestamps_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cov.csv");
        std::fs::write(&path, "t,a\n5,1.0\n5,2.0\n").unwrap();
        match load_covariates(&path) {
            Err(Error::Data(msg)) => assert!(msg.contains('5'), "{msg}"),
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn well_formed_file_preserves_rows_and_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cov.csv");
        std::fs::write(&path, "t,x,y\n1,0.1,0.2\n2,0.3,0.4\n3,0.5,0.6\n").unwrap();
        let t = load_covariates(&path).unwrap();
        assert_eq!(t.values.n_rows(), 3);
        assert_eq!(t.names, vec!["x", "y"]);
        assert_eq!(t.fill_counts, vec![0, 0]);
    }
}
