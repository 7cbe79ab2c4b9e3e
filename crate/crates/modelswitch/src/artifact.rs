//! Versioned plain-text serialization of an estimated policy, so estimation
//! and backtesting can run as separate invocations.
//!
//! Format v1, line oriented:
//!
//! ```text
//! modelswitch-policy v1
//! gamma <g>
//! cap <B|inf>
//! family <basis family>
//! raw_dim <L>
//! trig_order <m>
//! actions <count>
//! action <label> <code>          # one per action, in order
//! replications <N_A>
//! replication <u>
//! iterations <j>
//! converged <true|false>
//! rhos <rho per action>
//! fit <action index> <K coefficients>
//! end
//! ```
//!
//! Floats use shortest round-trip formatting, so save/load is exact.

use std::fs;
use std::path::Path;

use crate::csvio::{format_float, parse_float};
use crate::error::{io_err, Error, Result};
use crate::features::{ActionSpace, BasisFamily, BasisSpec};
use crate::fqi::{average_q, Policy, QEstimate};
use crate::numcore::LinearFit;

pub fn save_policy(policy: &Policy, path: &Path) -> Result<()> {
    let first = &policy.estimates[0];
    let basis = &first.basis;
    let space = &basis.action_space;
    let mut out = String::from("modelswitch-policy v1\n");
    out.push_str(&format!("gamma {}\n", format_float(first.gamma)));
    out.push_str(&format!("cap {}\n", format_float(first.fits[0].cap)));
    out.push_str(&format!("family {}\n", basis.family.as_str()));
    out.push_str(&format!("raw_dim {}\n", basis.raw_dim));
    out.push_str(&format!("trig_order {}\n", basis.trig_order));
    out.push_str(&format!("actions {}\n", space.len()));
    for a in 0..space.len() {
        out.push_str(&format!(
            "action {} {}\n",
            space.label(a),
            format_float(space.code(a))
        ));
    }
    out.push_str(&format!("replications {}\n", policy.estimates.len()));
    for est in &policy.estimates {
        out.push_str(&format!("replication {}\n", est.replication_id));
        out.push_str(&format!("iterations {}\n", est.iterations_run));
        out.push_str(&format!("converged {}\n", est.converged));
        out.push_str("rhos");
        for r in &est.rhos {
            out.push(' ');
            out.push_str(&format_float(*r));
        }
        out.push('\n');
        for (a, fit) in est.fits.iter().enumerate() {
            out.push_str(&format!("fit {a}"));
            for c in &fit.coefficients {
                out.push(' ');
                out.push_str(&format_float(*c));
            }
            out.push('\n');
        }
    }
    out.push_str("end\n");
    fs::write(path, out).map_err(|e| io_err(path, e))
}

struct LineReader<'a> {
    lines: std::str::Lines<'a>,
    path: &'a Path,
    lineno: usize,
}

impl<'a> LineReader<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.lineno += 1;
        self.lines.next().ok_or_else(|| {
            Error::Data(format!(
                "{}: truncated at line {}",
                self.path.display(),
                self.lineno
            ))
        })
    }

    fn field(&mut self, key: &str) -> Result<String> {
        let line = self.next()?;
        let rest = line
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| {
                Error::Data(format!(
                    "{}: line {}: expected `{key} ...`, found {line:?}",
                    self.path.display(),
                    self.lineno
                ))
            })?;
        Ok(rest.to_string())
    }
}

pub fn load_policy(path: &Path) -> Result<Policy> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut r = LineReader {
        lines: text.lines(),
        path,
        lineno: 0,
    };
    let header = r.next()?;
    if header != "modelswitch-policy v1" {
        return Err(Error::Data(format!(
            "{}: unsupported artifact header {header:?}",
            path.display()
        )));
    }
    let gamma = parse_float(&r.field("gamma")?)?;
    let cap = parse_float(&r.field("cap")?)?;
    let family = BasisFamily::parse(&r.field("family")?)?;
    let raw_dim: usize = parse_usize(&r.field("raw_dim")?)?;
    let trig_order: usize = parse_usize(&r.field("trig_order")?)?;
    let n_actions: usize = parse_usize(&r.field("actions")?)?;
    let mut labels = Vec::with_capacity(n_actions);
    let mut codes = Vec::with_capacity(n_actions);
    for _ in 0..n_actions {
        let rest = r.field("action")?;
        let mut parts = rest.split_whitespace();
        let label = parts
            .next()
            .ok_or_else(|| Error::Data("action line missing label".into()))?;
        let code = parse_float(
            parts
                .next()
                .ok_or_else(|| Error::Data("action line missing code".into()))?,
        )?;
        labels.push(label.to_string());
        codes.push(code);
    }
    let space = ActionSpace::new(labels, codes)?;
    let basis = BasisSpec::new(family, raw_dim, space)?.with_trig_order(trig_order)?;
    let k = basis.dimension();
    let n_reps: usize = parse_usize(&r.field("replications")?)?;
    if n_reps == 0 {
        return Err(Error::Data("artifact holds zero replications".into()));
    }
    let mut estimates = Vec::with_capacity(n_reps);
    for _ in 0..n_reps {
        let replication_id = parse_usize(&r.field("replication")?)?;
        let iterations_run = parse_usize(&r.field("iterations")?)?;
        let converged = match r.field("converged")?.as_str() {
            "true" => true,
            "false" => false,
            other => return Err(Error::Data(format!("bad converged flag {other:?}"))),
        };
        let rhos: Vec<f64> = r
            .field("rhos")?
            .split_whitespace()
            .map(parse_float)
            .collect::<Result<_>>()?;
        let mut fits = Vec::with_capacity(n_actions);
        for a in 0..n_actions {
            let rest = r.field("fit")?;
            let mut parts = rest.split_whitespace();
            let idx: usize = parse_usize(parts.next().unwrap_or(""))?;
            if idx != a {
                return Err(Error::Data(format!(
                    "fit index {idx} out of order, expected {a}"
                )));
            }
            let coefficients: Vec<f64> = parts.map(parse_float).collect::<Result<_>>()?;
            if coefficients.len() != k {
                return Err(Error::Data(format!(
                    "fit {a}: {} coefficients vs basis dimension {k}",
                    coefficients.len()
                )));
            }
            fits.push(LinearFit {
                coefficients,
                cap,
                rss: 0.0,
                effective_dof: 0.0,
                jitter_applied: false,
                degenerate: false,
            });
        }
        estimates.push(QEstimate {
            fits,
            basis: basis.clone(),
            gamma,
            iterations_run,
            converged,
            residual_history: Vec::new(),
            rhos,
            replication_id,
        });
    }
    if r.next()? != "end" {
        return Err(Error::Data(format!(
            "{}: missing end marker",
            path.display()
        )));
    }
    average_q(estimates)
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| Error::Data(format!("unparseable integer {s:?}")))
}
