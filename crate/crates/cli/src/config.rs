//! Run configuration: built-in defaults, overridden by a key-value config
//! file, overridden by command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use subho_core::comparators::IwConfig;
use subho_core::hs_sampler::HsConfig;
use subho_core::pipeline::{BasadSettings, Method, NodeMethod, SubhoSettings};
use subho_core::simgen::{Design, Scenario};
use subho_core::Rule;

/// Contents of a `--scenario` file. Every key is optional.
///
/// ```toml
/// name = "ar1_75x75"
/// design = "ar1"        # or "gwishart"
/// rho = 0.7
/// edge_prob = 0.1
/// dof = 3.0
/// n = 75
/// p = 75
/// replicates = 10
/// seed = 1
/// method = "subho"      # fit settings
/// rule = "and"
/// workers = 4
/// iters = 2000
/// burnin = 500
/// max_model_size = 10
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub name: Option<String>,
    pub design: Option<String>,
    pub rho: Option<f64>,
    pub edge_prob: Option<f64>,
    pub dof: Option<f64>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
    pub method: Option<String>,
    pub rule: Option<String>,
    pub workers: Option<usize>,
    pub iters: Option<usize>,
    pub burnin: Option<usize>,
    pub max_model_size: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Fills unset keys from `fallback`.
    pub fn or(self, fallback: &ConfigFile) -> ConfigFile {
        let f = fallback.clone();
        ConfigFile {
            name: self.name.or(f.name),
            design: self.design.or(f.design),
            rho: self.rho.or(f.rho),
            edge_prob: self.edge_prob.or(f.edge_prob),
            dof: self.dof.or(f.dof),
            n: self.n.or(f.n),
            p: self.p.or(f.p),
            replicates: self.replicates.or(f.replicates),
            seed: self.seed.or(f.seed),
            method: self.method.or(f.method),
            rule: self.rule.or(f.rule),
            workers: self.workers.or(f.workers),
            iters: self.iters.or(f.iters),
            burnin: self.burnin.or(f.burnin),
            max_model_size: self.max_model_size.or(f.max_model_size),
        }
    }

    /// Merges flags over an optional config file over defaults.
    pub fn resolve(flags: ConfigFile, file: Option<&Path>) -> Result<ConfigFile> {
        let from_file = match file {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Ok(flags.or(&from_file).or(&ConfigFile::defaults()))
    }

    pub fn defaults() -> ConfigFile {
        ConfigFile {
            name: None,
            design: Some("ar1".into()),
            rho: Some(0.7),
            edge_prob: Some(0.1),
            dof: Some(3.0),
            n: None,
            p: None,
            replicates: Some(10),
            seed: Some(1),
            method: Some("subho".into()),
            rule: Some("and".into()),
            workers: Some(1),
            iters: Some(2000),
            burnin: Some(500),
            max_model_size: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    pub fn workers(&self) -> Result<usize> {
        match self.workers.unwrap_or(1) {
            0 => bail!("worker count must be at least 1"),
            w => Ok(w),
        }
    }

    pub fn rule(&self) -> Result<Rule> {
        Ok(self.rule.as_deref().unwrap_or("and").parse()?)
    }

    pub fn method_name(&self) -> &str {
        self.method.as_deref().unwrap_or("subho")
    }

    pub fn method(&self) -> Result<Method> {
        let iters = self.iters.unwrap_or(2000);
        let burnin = self.burnin.unwrap_or(500);
        if iters == 0 {
            bail!("--iters must be at least 1");
        }
        Ok(match self.method_name().to_ascii_lowercase().as_str() {
            "subho" => Method::Nodewise(NodeMethod::Subho(SubhoSettings {
                hs: HsConfig {
                    n_iter: iters,
                    burn_in: burnin,
                    ..HsConfig::default()
                },
                max_size: self.max_model_size,
                ..SubhoSettings::default()
            })),
            "basad" => Method::Nodewise(NodeMethod::Basad(BasadSettings {
                n_iter: iters,
                burn_in: burnin,
            })),
            "iw" => Method::InverseWishart(IwConfig {
                n_draws: iters,
                ..IwConfig::default()
            }),
            other => bail!("unknown method {other:?} (expected subho|basad|iw)"),
        })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let n = self.n.context("scenario needs n")?;
        let p = self.p.context("scenario needs p")?;
        let design = match self.design.as_deref().unwrap_or("ar1").to_ascii_lowercase().as_str() {
            "ar1" => Design::Ar1 {
                rho: self.rho.unwrap_or(0.7),
            },
            "gwishart" | "g-wishart" => Design::GWishart {
                edge_prob: self.edge_prob.unwrap_or(0.1),
                dof: self.dof.unwrap_or(3.0),
            },
            other => bail!("unknown design {other:?} (expected ar1|gwishart)"),
        };
        let name = self.name.clone().unwrap_or_else(|| match &design {
            Design::Ar1 { rho } => format!("ar1_rho{rho}_n{n}_p{p}"),
            Design::GWishart { edge_prob, .. } => format!("gwishart_pg{edge_prob}_n{n}_p{p}"),
        });
        let scenario = Scenario {
            name,
            design,
            n,
            p,
            replicates: self.replicates.unwrap_or(10),
            seed: self.seed(),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Config-file form of a scenario, as written next to simulated data.
pub fn scenario_file(s: &Scenario) -> ConfigFile {
    let mut c = ConfigFile {
        name: Some(s.name.clone()),
        n: Some(s.n),
        p: Some(s.p),
        replicates: Some(s.replicates),
        seed: Some(s.seed),
        ..ConfigFile::default()
    };
    match s.design {
        Design::Ar1 { rho } => {
            c.design = Some("ar1".into());
            c.rho = Some(rho);
        }
        Design::GWishart { edge_prob, dof } => {
            c.design = Some("gwishart".into());
            c.edge_prob = Some(edge_prob);
            c.dof = Some(dof);
        }
    }
    c
}
