//! Declarative basis-function families mapping an augmented state
//! `(raw_state, previous_action)` to a feature row.
//!
//! Column orders are frozen because serialized coefficient vectors depend on
//! them:
//!
//! * `GeneralLinear` — `s_l * 1{a' = a''}` laid out row-major with the raw
//!   coordinate outer and the action inner: `(l=1,a_1), (l=1,a_2), ...`.
//! * `Additive` — `s_1 .. s_L`, then `1{a' != a_j}` for each action `a_j`.
//! * `Parsimonious` — `s_1 .. s_L`, then the single indicator
//!   `1{a' != anchor}`.
//! * `CubicAdditive` — a global intercept, then `(s, s^2, s^3)` for each raw
//!   coordinate and finally for the numeric action code.
//! * `Trigonometric` — one block per action `a''`, gated by `1{a' = a''}`,
//!   holding the orthonormal family `1, sqrt(2) cos(2 pi k s), sqrt(2) sin(2
//!   pi k s)` for `k = 1..order` (single raw coordinate).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Ordered set of action labels with their numeric codes in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpace {
    labels: Vec<String>,
    codes: Vec<f64>,
}

impl ActionSpace {
    pub fn new(labels: Vec<String>, codes: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Config("action space must be nonempty".into()));
        }
        if labels.len() != codes.len() {
            return Err(Error::Config(format!(
                "{} action labels vs {} codes",
                labels.len(),
                codes.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Config(format!("duplicate action label {l:?}")));
            }
        }
        for &c in &codes {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::Config(format!("action code {c} outside [0, 1]")));
            }
        }
        Ok(ActionSpace { labels, codes })
    }

    /// The three correlation models of the portfolio application with the
    /// shipped code mapping 0 -> 0, 0.1 -> 1/2, 0.75 -> 1.
    pub fn standard() -> Self {
        ActionSpace::new(
            vec!["0.00".into(), "0.10".into(), "0.75".into()],
            vec![0.0, 0.5, 1.0],
        )
        .expect("standard space is valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.labels[idx]
    }

    pub fn code(&self, idx: usize) -> f64 {
        self.codes[idx]
    }

    pub fn codes(&self) -> &[f64] {
        &self.codes
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InputDomain(format!("unknown action label {label:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFamily {
    GeneralLinear,
    Additive,
    Parsimonious,
    CubicAdditive,
    Trigonometric,
}

impl BasisFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasisFamily::GeneralLinear => "general_linear",
            BasisFamily::Additive => "additive",
            BasisFamily::Parsimonious => "parsimonious",
            BasisFamily::CubicAdditive => "cubic_additive",
            BasisFamily::Trigonometric => "trigonometric",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "general_linear" => Ok(BasisFamily::GeneralLinear),
            "additive" => Ok(BasisFamily::Additive),
            "parsimonious" => Ok(BasisFamily::Parsimonious),
            "cubic_additive" => Ok(BasisFamily::CubicAdditive),
            "trigonometric" => Ok(BasisFamily::Trigonometric),
            other => Err(Error::Config(format!("unknown basis family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub family: BasisFamily,
    pub raw_dim: usize,
    pub action_space: ActionSpace,
    /// Trigonometric order; ignored by the other families.
    pub trig_order: usize,
    /// Anchor action for the parsimonious indicator. The estimation loop sets
    /// this to the action currently being fitted.
    pub parsimonious_anchor: Option<String>,
}

impl BasisSpec {
    pub fn new(family: BasisFamily, raw_dim: usize, action_space: ActionSpace) -> Result<Self> {
        let spec = BasisSpec {
            family,
            raw_dim,
            action_space,
            trig_order: 1,
            parsimonious_anchor: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_trig_order(mut self, order: usize) -> Result<Self> {
        self.trig_order = order;
        self.validate()?;
        Ok(self)
    }

    pub fn with_anchor(&self, label: &str) -> Result<Self> {
        self.action_space.index_of(label)?;
        let mut out = self.clone();
        out.parsimonious_anchor = Some(label.to_string());
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.raw_dim == 0 {
            return Err(Error::Config("raw_dim must be positive".into()));
        }
        match self.family {
            BasisFamily::Trigonometric => {
                if self.trig_order == 0 {
                    return Err(Error::Config("trig_order must be positive".into()));
                }
                if self.raw_dim != 1 {
                    return Err(Error::Config(
                        "trigonometric family is defined on a single raw state in [0, 1]".into(),
                    ));
                }
            }
            BasisFamily::Parsimonious => {
                if let Some(a) = &self.parsimonious_anchor {
                    self.action_space.index_of(a)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Number of basis functions K.
    pub fn dimension(&self) -> usize {
        let (l, na) = (self.raw_dim, self.action_space.len());
        match self.family {
            BasisFamily::GeneralLinear => l * na,
            BasisFamily::Additive => l + na,
            BasisFamily::Parsimonious => l + 1,
            BasisFamily::CubicAdditive => 1 + 3 * (l + 1),
            BasisFamily::Trigonometric => (2 * self.trig_order + 1) * na,
        }
    }

    /// Whether the first column is a global intercept (relevant for the
    /// ridge penalty exemption).
    pub fn has_intercept(&self) -> bool {
        matches!(self.family, BasisFamily::CubicAdditive)
    }

    /// Column index where the action-dependent suffix starts, for families
    /// whose feature row splits as `[prefix(raw_state) | suffix(prev_action)]`.
    /// `None` for families that gate raw features by the action.
    pub fn split_point(&self) -> Option<usize> {
        match self.family {
            BasisFamily::Additive | BasisFamily::Parsimonious => Some(self.raw_dim),
            BasisFamily::CubicAdditive => Some(1 + 3 * self.raw_dim),
            BasisFamily::GeneralLinear | BasisFamily::Trigonometric => None,
        }
    }

    fn anchor_index(&self) -> Result<usize> {
        let label = self.parsimonious_anchor.as_deref().ok_or_else(|| {
            Error::Config("parsimonious basis evaluated without an anchor action".into())
        })?;
        self.action_space.index_of(label)
    }

    /// Feature row for one augmented state, previous action given by label.
    pub fn evaluate(&self, raw_state: &[f64], prev_action: &str) -> Result<Vec<f64>> {
        let idx = self.action_space.index_of(prev_action)?;
        let mut out = vec![0.0; self.dimension()];
        self.evaluate_into(raw_state, idx, &mut out)?;
        Ok(out)
    }

    /// Hot-path variant taking the action index and an output slice.
    pub fn evaluate_into(&self, raw_state: &[f64], prev_idx: usize, out: &mut [f64]) -> Result<()> {
        if raw_state.len() != self.raw_dim {
            return Err(Error::DimensionMismatch(format!(
                "raw state has {} coordinates, basis expects {}",
                raw_state.len(),
                self.raw_dim
            )));
        }
        if prev_idx >= self.action_space.len() {
            return Err(Error::InputDomain(format!(
                "action index {prev_idx} out of range"
            )));
        }
        if raw_state.iter().any(|v| !v.is_finite()) {
            return Err(Error::InputDomain("non-finite raw state".into()));
        }
        debug_assert_eq!(out.len(), self.dimension());
        let na = self.action_space.len();
        match self.family {
            BasisFamily::GeneralLinear => {
                out.fill(0.0);
                for (l, &s) in raw_state.iter().enumerate() {
                    out[l * na + prev_idx] = s;
                }
            }
            BasisFamily::Additive => {
                out[..self.raw_dim].copy_from_slice(raw_state);
                for j in 0..na {
                    out[self.raw_dim + j] = if prev_idx != j { 1.0 } else { 0.0 };
                }
            }
            BasisFamily::Parsimonious => {
                let anchor = self.anchor_index()?;
                out[..self.raw_dim].copy_from_slice(raw_state);
                out[self.raw_dim] = if prev_idx != anchor { 1.0 } else { 0.0 };
            }
            BasisFamily::CubicAdditive => {
                out[0] = 1.0;
                let mut k = 1;
                for &s in raw_state
                    .iter()
                    .chain([self.action_space.code(prev_idx)].iter())
                {
                    out[k] = s;
                    out[k + 1] = s * s;
                    out[k + 2] = s * s * s;
                    k += 3;
                }
            }
            BasisFamily::Trigonometric => {
                out.fill(0.0);
                let s = raw_state[0];
                let block = 2 * self.trig_order + 1;
                let base = prev_idx * block;
                out[base] = 1.0;
                for k in 1..=self.trig_order {
                    let arg = 2.0 * PI * k as f64 * s;
                    out[base + 2 * k - 1] = std::f64::consts::SQRT_2 * arg.cos();
                    out[base + 2 * k] = std::f64::consts::SQRT_2 * arg.sin();
                }
            }
        }
        Ok(())
    }

    /// Row-wise evaluation over a panel; order preserved.
    pub fn evaluate_panel(&self, states: &Matrix, prev_actions: &[usize]) -> Result<FeatureMatrix> {
        if states.n_rows() != prev_actions.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} state rows vs {} previous actions",
                states.n_rows(),
                prev_actions.len()
            )));
        }
        let k = self.dimension();
        let mut values = Matrix::zeros(states.n_rows(), k);
        for (t, prev) in prev_actions.iter().enumerate() {
            let row = states.row(t).to_vec();
            self.evaluate_into(&row, *prev, values.row_mut(t))?;
        }
        Ok(FeatureMatrix {
            values,
            spec: self.clone(),
        })
    }
}

/// A basis evaluated on a panel.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub values: Matrix,
    pub spec: BasisSpec,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.values.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.n_cols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_actions() -> ActionSpace {
        ActionSpace::new(vec!["a1".into(), "a2".into()], vec![0.0, 1.0]).unwrap()
    }

    fn three_actions() -> ActionSpace {
        ActionSpace::standard()
    }

    #[test]
    fn dimensions_match_the_counting_formulas() {
        let gl = BasisSpec::new(BasisFamily::GeneralLinear, 2, three_actions()).unwrap();
        assert_eq!(gl.dimension(), 6);
        let ad = BasisSpec::new(BasisFamily::Additive, 2, three_actions()).unwrap();
        assert_eq!(ad.dimension(), 5);
        // third-order additive polynomial in 19 raw states plus the action
        // code: 1 + 3 * (19 + 1) terms counted directly
        let cu = BasisSpec::new(BasisFamily::CubicAdditive, 19, three_actions()).unwrap();
        assert_eq!(cu.dimension(), 61);
        let tr = BasisSpec::new(BasisFamily::Trigonometric, 1, three_actions())
            .unwrap()
            .with_trig_order(4)
            .unwrap();
        assert_eq!(tr.dimension(), 27);
    }

    #[test]
    fn additive_indicator_order() {
        let spec = BasisSpec::new(BasisFamily::Additive, 1, two_actions()).unwrap();
        assert_eq!(spec.evaluate(&[0.5], "a1").unwrap(), vec![0.5, 0.0, 1.0]);
        assert_eq!(spec.evaluate(&[0.5], "a2").unwrap(), vec![0.5, 1.0, 0.0]);
    }

    #[test]
    fn cubic_additive_row() {
        let spec = BasisSpec::new(BasisFamily::CubicAdditive, 1, two_actions()).unwrap();
        // previous action a2 carries code 1
        assert_eq!(
            spec.evaluate(&[0.5], "a2").unwrap(),
            vec![1.0, 0.5, 0.25, 0.125, 1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn general_linear_gates_by_action() {
        let spec = BasisSpec::new(BasisFamily::GeneralLinear, 1, two_actions()).unwrap();
        assert_eq!(spec.evaluate(&[0.3], "a2").unwrap(), vec![0.0, 0.3]);
        assert_eq!(spec.evaluate(&[0.3], "a1").unwrap(), vec![0.3, 0.0]);
    }

    #[test]
    fn general_linear_zero_outside_active_block() {
        let spec = BasisSpec::new(BasisFamily::GeneralLinear, 3, three_actions()).unwrap();
        let row = spec.evaluate(&[0.1, -0.2, 0.7], "0.10").unwrap();
        let na = 3;
        for (k, v) in row.iter().enumerate() {
            if k % na != 1 {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn parsimonious_needs_anchor() {
        let spec = BasisSpec::new(BasisFamily::Parsimonious, 1, two_actions()).unwrap();
        assert!(spec.evaluate(&[0.5], "a1").is_err());
        let spec = spec.with_anchor("a2").unwrap();
        assert_eq!(spec.evaluate(&[0.5], "a1").unwrap(), vec![0.5, 1.0]);
        assert_eq!(spec.evaluate(&[0.5], "a2").unwrap(), vec![0.5, 0.0]);
    }

    #[test]
    fn unknown_action_and_bad_state_rejected() {
        let spec = BasisSpec::new(BasisFamily::Additive, 1, two_actions()).unwrap();
        assert!(spec.evaluate(&[0.5], "nope").is_err());
        assert!(spec.evaluate(&[f64::NAN], "a1").is_err());
        assert!(spec.evaluate(&[0.5, 0.6], "a1").is_err());
    }

    #[test]
    fn panel_evaluation_preserves_rows() {
        let spec = BasisSpec::new(BasisFamily::Additive, 2, two_actions()).unwrap();
        let empty = spec.evaluate_panel(&Matrix::zeros(0, 2), &[]).unwrap();
        assert_eq!(empty.n_rows(), 0);
        assert_eq!(empty.n_cols(), spec.dimension());

        let states =
            Matrix::from_rows(vec![vec![0.1, 0.2], vec![0.3, 0.4], vec![0.5, 0.6]]).unwrap();
        let acts = vec![0, 1, 0];
        let fm = spec.evaluate_panel(&states, &acts).unwrap();
        for t in 0..3 {
            let row = spec
                .evaluate(states.row(t), if acts[t] == 0 { "a1" } else { "a2" })
                .unwrap();
            assert_eq!(fm.values.row(t), &row[..]);
        }
        // permuting panel rows permutes feature rows identically
        let perm_states =
            Matrix::from_rows(vec![vec![0.5, 0.6], vec![0.1, 0.2], vec![0.3, 0.4]]).unwrap();
        let perm_acts = vec![0, 0, 1];
        let pm = spec.evaluate_panel(&perm_states, &perm_acts).unwrap();
        assert_eq!(pm.values.row(0), fm.values.row(2));
        assert_eq!(pm.values.row(1), fm.values.row(0));
        assert_eq!(pm.values.row(2), fm.values.row(1));
    }

    #[test]
    fn parsimonious_embeds_into_additive_with_intercept() {
        // For anchor a_j, the additive coefficient vector that puts the whole
        // indicator weight on column j reproduces parsimonious predictions.
        let actions = three_actions();
        let pars = BasisSpec::new(BasisFamily::Parsimonious, 2, actions.clone())
            .unwrap()
            .with_anchor("0.10")
            .unwrap();
        let add = BasisSpec::new(BasisFamily::Additive, 2, actions.clone()).unwrap();
        let b_pars = [0.7, -0.3, 1.9];
        // additive-with-intercept coefficients: (intercept, raw.., indicators..)
        let mut b_add = vec![0.0; 1 + add.dimension()];
        b_add[1] = b_pars[0];
        b_add[2] = b_pars[1];
        b_add[1 + 2 + 1] = b_pars[2]; // indicator column of the anchor
        for (state, prev) in [
            (vec![0.2, 0.9], "0.00"),
            (vec![-1.0, 0.4], "0.10"),
            (vec![0.0, 0.0], "0.75"),
        ] {
            let fp = pars.evaluate(&state, prev).unwrap();
            let pred_p: f64 = fp.iter().zip(&b_pars).map(|(x, b)| x * b).sum();
            let fa = add.evaluate(&state, prev).unwrap();
            let pred_a: f64 =
                b_add[0] + fa.iter().zip(&b_add[1..]).map(|(x, b)| x * b).sum::<f64>();
            assert!((pred_p - pred_a).abs() < 1e-12);
        }
    }

    #[test]
    fn trigonometric_block_is_orthonormal_on_a_dense_grid() {
        let spec = BasisSpec::new(BasisFamily::Trigonometric, 1, two_actions())
            .unwrap()
            .with_trig_order(3)
            .unwrap();
        let block = 2 * 3 + 1;
        let grid = 10_000;
        let mut gram = vec![vec![0.0; block]; block];
        for g in 0..grid {
            let s = (g as f64 + 0.5) / grid as f64;
            let row = spec.evaluate(&[s], "a1").unwrap();
            for i in 0..block {
                for j in 0..block {
                    gram[i][j] += row[i] * row[j] / grid as f64;
                }
            }
        }
        for (i, r) in gram.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-2, "gram[{i}][{j}] = {v}, want {want}");
            }
        }
    }

    proptest! {
        #[test]
        fn evaluate_length_equals_dimension(
            family_id in 0usize..5,
            raw in proptest::collection::vec(-1.0f64..1.0, 1..6),
            prev in 0usize..3,
            order in 1usize..4,
        ) {
            let family = [
                BasisFamily::GeneralLinear,
                BasisFamily::Additive,
                BasisFamily::Parsimonious,
                BasisFamily::CubicAdditive,
                BasisFamily::Trigonometric,
            ][family_id];
            let raw = if family == BasisFamily::Trigonometric { vec![raw[0]] } else { raw };
            let actions = three_actions();
            let label = actions.label(prev).to_string();
            let spec = BasisSpec::new(family, raw.len(), actions).unwrap()
                .with_trig_order(order).unwrap();
            let spec = if family == BasisFamily::Parsimonious {
                spec.with_anchor("0.75").unwrap()
            } else {
                spec
            };
            let row = spec.evaluate(&raw, &label).unwrap();
            prop_assert_eq!(row.len(), spec.dimension());
            prop_assert!(row.iter().all(|v| v.is_finite()));
        }
    }
}
