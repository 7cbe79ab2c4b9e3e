//! Plain-text run configuration: `[section]` headers over flat `key = value`
//! lines, `#` comments. Flags override file values, which override defaults;
//! every resolved key carries its source so manifests can echo the full
//! configuration.
//!
//! ```text
//! seed = 12345
//!
//! [simulate]
//! n_est = 500
//! n_test = 1000
//! raw_dim = 1
//! n_assets = 500
//!
//! [portfolio]
//! actions = 0.00,0.10,0.75
//! action_codes = 0,0.5,1
//! correlations = 0,0.1,0.75
//! cost = 0.0005
//! utility = log
//!
//! [fqi]
//! gamma = 0.98
//! basis = additive
//! n_replications = 10
//!
//! [mc]
//! l_values = 1,10
//! costs = 0,0.0005,0.001
//! n_est_values = 500,1000
//! sims = 250
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::csvio::{format_float, parse_float};
use crate::error::{io_err, Error, Result};
use crate::features::{ActionSpace, BasisFamily, BasisSpec};
use crate::fqi::FqiConfig;
use crate::numcore::{default_rho_grid, RidgeConfig};
use crate::portfolio::{PortfolioEnv, Utility};
use crate::simgen::SimConfig;

/// Where a resolved value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    File,
    Flag,
}

impl Source {
    fn as_str(&self) -> &'static str {
        match self {
            Source::Default => "default",
            Source::File => "file",
            Source::Flag => "flag",
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub master_seed: u64,
    pub sim: SimConfig,
    pub env: PortfolioEnv,
    pub fqi: FqiConfig,
    pub preprocess_lambda: f64,
    pub preprocess_centered: bool,
    pub mc_l_values: Vec<usize>,
    pub mc_costs: Vec<f64>,
    pub mc_n_est_values: Vec<usize>,
    pub mc_sims: usize,
    /// Estimation/test split used when estimating or backtesting from CSVs.
    pub data_n_est: usize,
    resolved: BTreeMap<String, (String, Source)>,
}

fn defaults() -> BTreeMap<String, String> {
    let mut d = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        d.insert(k.to_string(), v);
    };
    put("seed", "12345".into());
    put("simulate.n_est", "500".into());
    put("simulate.n_test", "1000".into());
    put("simulate.raw_dim", "1".into());
    put("simulate.n_assets", "500".into());
    put("simulate.sigma_eps", "0.25".into());
    put("simulate.regime_corr", "0.9".into());
    put("simulate.threshold", "-0.5".into());
    put("simulate.bad_vol_multiplier", "1".into());
    put("portfolio.actions", "0.00,0.10,0.75".into());
    put("portfolio.action_codes", "0,0.5,1".into());
    put("portfolio.correlations", "0,0.1,0.75".into());
    put("portfolio.cost", "0.0005".into());
    put("portfolio.utility", "log".into());
    put("portfolio.risk_aversion", "2".into());
    put("portfolio.vol_lambda", "0.98".into());
    put("portfolio.vol_warmup", "20".into());
    put("fqi.gamma", "0.98".into());
    put("fqi.cap", "inf".into());
    put("fqi.epsilon", "1e-5".into());
    put("fqi.max_iters", "500".into());
    put("fqi.n_replications", "10".into());
    put("fqi.rho", "0".into());
    put("fqi.rho_grid", "".into());
    put("fqi.basis", "additive".into());
    put("fqi.trig_order", "1".into());
    put("preprocess.lambda", "0.99".into());
    put("preprocess.centered", "false".into());
    put("mc.l_values", "1,10".into());
    put("mc.costs", "0,0.0005,0.001".into());
    put("mc.n_est_values", "500,1000".into());
    put("mc.sims", "250".into());
    put("data.n_est", "500".into());
    d
}

fn parse_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut section = String::new();
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "{}:{}: expected `key = value`, found {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        let full = if section.is_empty() {
            key.trim().to_string()
        } else {
            format!("{section}.{}", key.trim())
        };
        out.insert(full, value.trim().to_string());
    }
    Ok(out)
}

struct Resolver {
    values: BTreeMap<String, (String, Source)>,
}

impl Resolver {
    fn get(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(|(v, _)| v.as_str())
            .ok_or_else(|| Error::Config(format!("missing config key {key}")))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        parse_float(self.get(key)?).map_err(|_| bad(key, self.get(key).unwrap_or("")))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.get(key)?
            .parse()
            .map_err(|_| bad(key, self.get(key).unwrap_or("")))
    }

    fn u64(&self, key: &str) -> Result<u64> {
        self.get(key)?
            .parse()
            .map_err(|_| bad(key, self.get(key).unwrap_or("")))
    }

    fn bool(&self, key: &str) -> Result<bool> {
        match self.get(key)? {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(bad(key, other)),
        }
    }

    fn list_f64(&self, key: &str) -> Result<Vec<f64>> {
        split_list(self.get(key)?)
            .map(parse_float)
            .collect::<Result<Vec<f64>>>()
            .map_err(|_| bad(key, self.get(key).unwrap_or("")))
    }

    fn list_usize(&self, key: &str) -> Result<Vec<usize>> {
        split_list(self.get(key)?)
            .map(|s| s.parse::<usize>().map_err(|_| bad(key, s)))
            .collect()
    }

    fn list_string(&self, key: &str) -> Result<Vec<String>> {
        Ok(split_list(self.get(key)?).map(str::to_string).collect())
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("bad value {value:?} for key {key}"))
}

impl RunConfig {
    /// Resolve defaults, an optional config file, and flag overrides.
    pub fn resolve(
        config_path: Option<&Path>,
        seed_flag: Option<u64>,
        sims_flag: Option<usize>,
    ) -> Result<RunConfig> {
        let mut values: BTreeMap<String, (String, Source)> = defaults()
            .into_iter()
            .map(|(k, v)| (k, (v, Source::Default)))
            .collect();
        if let Some(path) = config_path {
            for (k, v) in parse_file(path)? {
                if !values.contains_key(&k) {
                    return Err(Error::Config(format!(
                        "unknown config key {k} in {}",
                        path.display()
                    )));
                }
                values.insert(k, (v, Source::File));
            }
        }
        if let Some(seed) = seed_flag {
            values.insert("seed".into(), (seed.to_string(), Source::Flag));
        }
        if let Some(sims) = sims_flag {
            values.insert("mc.sims".into(), (sims.to_string(), Source::Flag));
        }
        let r = Resolver { values };

        let master_seed = r.u64("seed")?;
        let sim = SimConfig {
            n_est: r.usize("simulate.n_est")?,
            n_test: r.usize("simulate.n_test")?,
            raw_dim: r.usize("simulate.raw_dim")?,
            n_assets: r.usize("simulate.n_assets")?,
            sigma_eps: r.f64("simulate.sigma_eps")?,
            regime_corr: r.f64("simulate.regime_corr")?,
            threshold: r.f64("simulate.threshold")?,
            bad_vol_multiplier: r.f64("simulate.bad_vol_multiplier")?,
            seed: master_seed,
        };
        sim.validate()?;

        let labels = r.list_string("portfolio.actions")?;
        let codes = r.list_f64("portfolio.action_codes")?;
        let action_space = ActionSpace::new(labels, codes)?;
        let utility = match r.get("portfolio.utility")? {
            "log" => Utility::Log,
            "mean_variance" => Utility::MeanVariance {
                risk_aversion: r.f64("portfolio.risk_aversion")?,
            },
            other => return Err(bad("portfolio.utility", other)),
        };
        let env = PortfolioEnv {
            action_space: action_space.clone(),
            correlation_levels: r.list_f64("portfolio.correlations")?,
            cost_rate: r.f64("portfolio.cost")?,
            utility,
            vol_lambda: r.f64("portfolio.vol_lambda")?,
            n_assets: sim.n_assets,
            vol_warmup: r.usize("portfolio.vol_warmup")?,
        };
        env.validate()?;

        let rho_grid = match r.get("fqi.rho_grid")? {
            "" => Vec::new(),
            "aic" => default_rho_grid(),
            list => split_list(list)
                .map(parse_float)
                .collect::<Result<Vec<f64>>>()?,
        };
        let basis = BasisSpec::new(
            BasisFamily::parse(r.get("fqi.basis")?)?,
            sim.raw_dim,
            action_space,
        )?
        .with_trig_order(r.usize("fqi.trig_order")?)?;
        let fqi = FqiConfig {
            gamma: r.f64("fqi.gamma")?,
            cap_b: r.f64("fqi.cap")?,
            epsilon: r.f64("fqi.epsilon")?,
            max_iters: r.usize("fqi.max_iters")?,
            n_replications: r.usize("fqi.n_replications")?,
            ridge: RidgeConfig {
                rho: r.f64("fqi.rho")?,
                penalize_intercept: false,
                rho_grid,
            },
            basis,
            seed: master_seed,
        };
        fqi.validate()?;

        let cfg = RunConfig {
            master_seed,
            sim,
            env,
            fqi,
            preprocess_lambda: r.f64("preprocess.lambda")?,
            preprocess_centered: r.bool("preprocess.centered")?,
            mc_l_values: r.list_usize("mc.l_values")?,
            mc_costs: r.list_f64("mc.costs")?,
            mc_n_est_values: r.list_usize("mc.n_est_values")?,
            mc_sims: r.usize("mc.sims")?,
            data_n_est: r.usize("data.n_est")?,
            resolved: r.values,
        };
        if cfg.mc_sims < 2 {
            return Err(Error::Config("mc.sims must be at least 2".into()));
        }
        if cfg.mc_l_values.is_empty() || cfg.mc_costs.is_empty() || cfg.mc_n_est_values.is_empty() {
            return Err(Error::Config("mc grid dimensions must be nonempty".into()));
        }
        Ok(cfg)
    }

    /// Resolved `key = value  # source` lines for the manifest.
    pub fn manifest_lines(&self) -> Vec<String> {
        self.resolved
            .iter()
            .map(|(k, (v, s))| format!("{k} = {v}  # {}", s.as_str()))
            .collect()
    }

    /// Stamp of a float value formatted the way configs expect.
    pub fn fmt(v: f64) -> String {
        format_float(v)
    }
}
