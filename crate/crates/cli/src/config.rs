//! Run configuration: defaults, then a flat JSON file, then flags.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use rumin_core::model::{FlatBundle, ModelManifold};
use rumin_core::spectral::{LaplacianKind, Tolerances, DEFAULT_T_SAMPLES};
use rumin_core::suite::{Suite, SuiteConfig};
use rumin_core::torsion::{validate_s_grid, DEFAULT_S_GRID};

const DEFAULT_MAX_WEIGHT: usize = 4;

#[derive(Debug)]
pub struct UsageError(pub String);

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    S3,
    Lens,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpName {
    DeltaRn,
    DeltaDr,
    DeltaT,
    DeltaB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    All,
    Thm1,
    Cor2,
    Cor3,
    Sec4,
    Thm5,
}

impl SuiteName {
    fn suite(self) -> Suite {
        match self {
            SuiteName::All => Suite::All,
            SuiteName::Thm1 => Suite::Kernel,
            SuiteName::Cor2 => Suite::Primitivity,
            SuiteName::Cor3 => Suite::Forman,
            SuiteName::Sec4 => Suite::Eigen,
            SuiteName::Thm5 => Suite::Reeb,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Command-line flags; every one of them overrides the config file.
#[derive(Args, Debug, Default)]
pub struct Overrides {
    /// Flat JSON file with any of the keys below (snake_case).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    /// Order of the lens group.
    #[arg(long)]
    p: Option<i64>,
    /// Character index of the flat line bundle, in `0..p`.
    #[arg(long)]
    character: Option<i64>,
    /// Largest Peter–Weyl weight kept.
    #[arg(long, allow_hyphen_values = true)]
    max_weight: Option<i64>,
    /// Operator for `spectrum`; `delta-t` uses the first `--t-samples` value.
    #[arg(long, value_enum)]
    op: Option<OpName>,
    /// Form degrees, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    degree: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    suite: Option<SuiteName>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t_samples: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    s_grid: Option<Vec<f64>>,
    /// Replaces every numerical tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<ModelName>,
    p: Option<i64>,
    character: Option<i64>,
    max_weight: Option<i64>,
    op: Option<OpName>,
    degree: Option<Vec<usize>>,
    suite: Option<SuiteName>,
    t_samples: Option<Vec<f64>>,
    s_grid: Option<Vec<f64>>,
    tol: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub model: ModelName,
    pub p: usize,
    pub character: usize,
    pub max_weight: usize,
    pub op: OpName,
    pub degrees: Vec<usize>,
    pub suite_name: SuiteName,
    #[serde(skip)]
    pub suite: Suite,
    pub t_samples: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub tol: Option<f64>,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

fn nonnegative(name: &str, v: i64) -> Result<usize, UsageError> {
    usize::try_from(v).or_else(|_| usage(format!("--{name} must be nonnegative, got {v}")))
}

impl RunConfig {
    pub fn resolve(flags: Overrides) -> Result<Self, UsageError> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).or_else(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<FileConfig>(&text).or_else(|e| usage(format!("bad config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let model = flags.model.or(file.model).unwrap_or(ModelName::S3);
        let (p, character) = match model {
            ModelName::S3 => (1, 0),
            ModelName::Lens => {
                let p = nonnegative("p", flags.p.or(file.p).unwrap_or(2))?;
                let character = nonnegative("character", flags.character.or(file.character).unwrap_or(0))?;
                if p < 1 {
                    return usage("--p must be at least 1");
                }
                if character >= p {
                    return usage(format!("--character must lie in 0..{p}, got {character}"));
                }
                (p, character)
            }
        };
        let max_weight = match flags.max_weight.or(file.max_weight) {
            Some(v) => nonnegative("max-weight", v)?,
            None => DEFAULT_MAX_WEIGHT,
        };
        let degrees = flags.degree.or(file.degree).unwrap_or_else(|| vec![0, 1, 2, 3]);
        if let Some(k) = degrees.iter().find(|k| **k > 3) {
            return usage(format!("--degree must be at most 3, got {k}"));
        }
        let t_samples = flags.t_samples.or(file.t_samples).unwrap_or_else(|| DEFAULT_T_SAMPLES.to_vec());
        if t_samples.is_empty() || t_samples.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return usage(format!("--t-samples must be positive, got {t_samples:?}"));
        }
        let s_grid = flags.s_grid.or(file.s_grid).unwrap_or_else(|| DEFAULT_S_GRID.to_vec());
        validate_s_grid(&s_grid).or_else(|e| usage(format!("--s-grid: {e}")))?;
        let tol = flags.tol.or(file.tol);
        if let Some(t) = tol {
            if !(t >= 0.0 && t.is_finite()) {
                return usage(format!("--tol must be a nonnegative number, got {t}"));
            }
        }
        let threads = match std::env::var("RUMIN_THREADS") {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Some(n),
                _ => return usage(format!("RUMIN_THREADS must be a positive integer, got {v:?}")),
            },
            Err(_) => None,
        };
        let suite_name = flags.suite.or(file.suite).unwrap_or(SuiteName::All);
        Ok(RunConfig {
            model,
            p,
            character,
            max_weight,
            op: flags.op.or(file.op).unwrap_or(OpName::DeltaRn),
            degrees,
            suite_name,
            suite: suite_name.suite(),
            t_samples,
            s_grid,
            tol,
            format: flags.format.or(file.format).unwrap_or(Format::Json),
            out: flags.out.or(file.out),
            threads,
        })
    }

    pub fn model(&self) -> rumin_core::Result<ModelManifold> {
        match self.model {
            ModelName::S3 => Ok(ModelManifold::su2_model()),
            ModelName::Lens => ModelManifold::lens_space(self.p, FlatBundle { character: self.character }),
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol.map(Tolerances::uniform).unwrap_or_default()
    }

    pub fn laplacian(&self) -> LaplacianKind {
        match self.op {
            OpName::DeltaRn => LaplacianKind::Rumin,
            OpName::DeltaDr => LaplacianKind::DeRham,
            OpName::DeltaT => LaplacianKind::Forman { t: self.t_samples[0] },
            OpName::DeltaB => LaplacianKind::Tangential,
        }
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            max_weight: self.max_weight,
            t_samples: self.t_samples.clone(),
            s_grid: self.s_grid.clone(),
            tolerances: self.tolerances(),
        }
    }

    /// The resolved configuration as recorded in reports.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
