//! Run configuration: a versioned TOML schema with defaults for every key.
//!
//! ```toml
//! version = 1
//! seed = 7
//! worldviews = ["M", "C", "A"]
//!
//! [model]
//! alpha = 0.5
//! epsilon = 0.05
//! d = 400
//!
//! [scenario]
//! n_messages = 7
//! main_worldview = "M"
//!
//! [population]
//! n = 1000
//! inclusive_fraction = [0.5, 0.5, 0.5]
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_TAU;
use crate::error::{Error, Result};
use crate::model::{ModelParams, Worldviews};
use crate::synthesis::{default_prototypes, FitConfig, PopulationSpec};
use crate::threat::{ScenarioSpec, TerroristProfile};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub version: u32,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub worldviews: Vec<String>,
    pub model: ModelParams,
    pub scenario: ScenarioConfig,
    pub population: PopulationConfig,
    pub synthesize: SynthesizeConfig,
    pub sweep: SweepConfig,
    pub analyze: AnalyzeConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: CONFIG_VERSION,
            seed: None,
            out: None,
            worldviews: vec!["M".into(), "C".into(), "A".into()],
            model: ModelParams::default(),
            scenario: ScenarioConfig::default(),
            population: PopulationConfig::default(),
            synthesize: SynthesizeConfig::default(),
            sweep: SweepConfig::default(),
            analyze: AnalyzeConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub n_messages: usize,
    /// Worldview the terrorist identifies with.
    pub main_worldview: String,
    pub main_position: f64,
    pub other_position: f64,
    /// Terrorist margin width; defaults to `model.epsilon`.
    pub margin_width: Option<f64>,
    pub all_worldviews: bool,
    pub record_trace: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_messages: 7,
            main_worldview: "M".into(),
            main_position: 1.0,
            other_position: -1.0,
            margin_width: None,
            all_worldviews: false,
            record_trace: true,
        }
    }
}

/// Either a population file or a specification built from prototypes.
/// Unset keys keep the values of the spec file, or of the built-in
/// specification (1000 agents, equal shares, half inclusive, no jitter).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PopulationConfig {
    /// Population CSV; excludes every other key of this section.
    pub file: Option<PathBuf>,
    /// TOML file holding a full population spec (e.g. one written by `synthesize`).
    pub spec_file: Option<PathBuf>,
    pub n: Option<usize>,
    pub shares: Option<Vec<f64>>,
    pub inclusive_fraction: Option<Vec<f64>>,
    pub jitter: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthesizeConfig {
    /// Reference indicator CSV.
    pub reference: Option<PathBuf>,
    pub fit: FitConfig,
    /// Number of top candidates expanded and written as populations.
    pub write_populations: usize,
    pub expand_n: usize,
    pub expand_jitter: f64,
}

impl Default for SynthesizeConfig {
    fn default() -> Self {
        SynthesizeConfig {
            reference: None,
            fit: FitConfig::default(),
            write_populations: 10,
            expand_n: 1000,
            expand_jitter: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Group whose inclusive fraction varies.
    pub group: String,
    pub values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            group: "M".into(),
            values: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzeConfig {
    /// Output directory of a `simulate` run.
    pub input: Option<PathBuf>,
    pub tau: f64,
    /// Group whose received attitudes are analysed; defaults to the terrorist's.
    pub target: Option<String>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            input: None,
            tau: DEFAULT_TAU,
            target: None,
        }
    }
}

/// Parses and validates config text; relative paths resolve against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig> {
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let resolve = |p: &mut Option<PathBuf>| {
        if let Some(path) = p.as_mut() {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    };
    resolve(&mut cfg.population.file);
    resolve(&mut cfg.population.spec_file);
    resolve(&mut cfg.synthesize.reference);
    resolve(&mut cfg.analyze.input);
    resolve(&mut cfg.out);
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn must_exist(what: &str, p: &Option<PathBuf>) -> Result<()> {
    match p {
        Some(p) if !p.exists() => Err(Error::Config(format!("{what} {} does not exist", p.display()))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        self.model.validate()?;
        let wv = self.worldviews()?;
        wv.id(&self.scenario.main_worldview)?;
        wv.id(&self.sweep.group)?;
        if let Some(t) = &self.analyze.target {
            wv.id(t)?;
        }
        if !(self.analyze.tau >= 0.0) {
            return Err(Error::Config(format!("analyze.tau must be >= 0: {}", self.analyze.tau)));
        }
        if self.sweep.values.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::Config("sweep.values must lie in [0, 1]".into()));
        }
        let p = &self.population;
        if p.file.is_some()
            && (p.spec_file.is_some() || p.n.is_some() || p.shares.is_some() || p.inclusive_fraction.is_some() || p.jitter.is_some())
        {
            return Err(Error::Config("population.file excludes the other population keys".into()));
        }
        must_exist("population.file", &self.population.file)?;
        must_exist("population.spec_file", &self.population.spec_file)?;
        must_exist("synthesize.reference", &self.synthesize.reference)?;
        must_exist("analyze.input", &self.analyze.input)?;
        self.terrorist()?;
        if self.population.file.is_none() {
            self.population_spec(0)?.validate(self.model.epsilon)?;
        }
        Ok(())
    }

    pub fn worldviews(&self) -> Result<Worldviews> {
        Worldviews::new(self.worldviews.clone())
    }

    pub fn terrorist(&self) -> Result<TerroristProfile> {
        let wv = self.worldviews()?;
        let s = &self.scenario;
        TerroristProfile::new(
            wv.len(),
            wv.id(&s.main_worldview)?,
            s.main_position,
            s.other_position,
            s.margin_width.unwrap_or(self.model.epsilon),
        )
    }

    pub fn scenario_spec(&self) -> Result<ScenarioSpec> {
        Ok(ScenarioSpec {
            n_messages: self.scenario.n_messages,
            terrorist: self.terrorist()?,
            record_trace: self.scenario.record_trace,
            all_worldviews: self.scenario.all_worldviews,
        })
    }

    /// Population spec of the config (built-in prototypes unless a spec file
    /// is given), with the given jitter seed.
    pub fn population_spec(&self, seed: u64) -> Result<PopulationSpec> {
        let p = &self.population;
        let mut spec = match &p.spec_file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                toml::from_str::<PopulationSpec>(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => {
                let wv = self.worldviews()?;
                if wv != Worldviews::mca() {
                    return Err(Error::Config(
                        "built-in prototypes exist only for worldviews M, C, A; set population.spec_file or population.file"
                            .into(),
                    ));
                }
                PopulationSpec {
                    worldviews: wv,
                    prototypes: default_prototypes(),
                    ..PopulationSpec::mca_default()
                }
            }
        };
        if let Some(n) = p.n {
            spec.n = n;
        }
        if let Some(x) = &p.shares {
            spec.shares = x.clone();
        }
        if let Some(x) = &p.inclusive_fraction {
            spec.inclusive_fraction = x.clone();
        }
        if let Some(j) = p.jitter {
            spec.jitter = j;
        }
        spec.seed = seed;
        Ok(spec)
    }

    /// True when building the population draws random numbers.
    pub fn population_is_stochastic(&self) -> bool {
        self.population.file.is_none()
            && self
                .population_spec(0)
                .map(|s| s.jitter > 0.0)
                .unwrap_or(false)
    }

    pub fn require_seed(&self, purpose: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config(format!("{purpose} is stochastic: a seed is required (--seed or `seed` key)")))
    }

    /// Canonical TOML text of the config without its output location.
    pub fn canonical_toml(&self) -> Result<String> {
        let mut c = self.clone();
        c.out = None;
        toml::to_string(&c).map_err(|e| Error::Config(e.to_string()))
    }
}
