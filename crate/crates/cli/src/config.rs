//! Experiment configuration files.

use cyclicity_core::capacity::BoundaryCloud;
use cyclicity_core::freespace::{FreePolynomial, FreeSpaceSpec};
use cyclicity_core::mixednorm::{MixedSpec, VarExpSpec};
use cyclicity_core::{Complex64, MultiIndex, Polynomial, SpaceSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Every field any command reads; commands reject what they need but lack.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    /// Dimension for functions given as families when no space is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<PerturbVariant>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_space: Option<FreeSpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_function: Option<FreePolynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_target: Option<FreePolynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section_n_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_section_n_in: Option<usize>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<BoundaryCloud>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_nbhd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_min: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_threshold: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed: Option<MixedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varexp: Option<VarExpSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbVariant {
    Function,
    Weight,
}

/// A polynomial, either spelled out or as a named family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Family(Family),
    Explicit(Polynomial),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// The constant `value`.
    Constant { value: f64 },
    /// `(a − z_variable)^power`, variables counted from 1.
    Shifted {
        a: f64,
        #[serde(default = "one_usize")]
        variable: usize,
        #[serde(default = "one_u32")]
        power: u32,
    },
    /// `z^exponents`.
    Monomial { exponents: Vec<u32> },
}

fn one_usize() -> usize {
    1
}

fn one_u32() -> u32 {
    1
}

impl FunctionSpec {
    pub fn build(&self, d: usize) -> Result<Polynomial, CliError> {
        let p = match self {
            FunctionSpec::Explicit(p) => p.clone(),
            FunctionSpec::Family(Family::Constant { value }) => Polynomial::constant(d, Complex64::new(*value, 0.0)),
            FunctionSpec::Family(Family::Shifted { a, variable, power }) => {
                if *variable == 0 || *variable > d {
                    return Err(CliError::Validation(format!("variable {variable} outside 1..={d}")));
                }
                let lin = Polynomial::constant(d, Complex64::new(*a, 0.0))
                    .checked_sub(&Polynomial::variable(d, variable - 1))?;
                lin.pow(*power)
            }
            FunctionSpec::Family(Family::Monomial { exponents }) => {
                Polynomial::monomial(MultiIndex::new(exponents.clone()), Complex64::new(1.0, 0.0))
            }
        };
        if p.dim() != d {
            return Err(CliError::Validation(format!(
                "function has {} variables, expected {d}",
                p.dim()
            )));
        }
        Ok(p)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("invalid config: {e}")))?;
        if let Some(v) = cfg.schema_version {
            if v != SCHEMA_VERSION {
                return Err(CliError::Validation(format!(
                    "unsupported schemaVersion {v}, expected {SCHEMA_VERSION}"
                )));
            }
        }
        Ok(cfg)
    }

    pub fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        field
            .as_ref()
            .ok_or_else(|| CliError::Validation(format!("config is missing `{name}`")))
    }

    pub fn space(&self) -> Result<&SpaceSpec, CliError> {
        Self::require(&self.space, "space")
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Validation("this command is stochastic and needs `seed`".into()))
    }

    /// Dimension from the space, else `d`, else the explicit function.
    pub fn dim(&self) -> Result<usize, CliError> {
        if let Some(s) = &self.space {
            return Ok(s.d());
        }
        if let Some(d) = self.d {
            return Ok(d);
        }
        if let Some(FunctionSpec::Explicit(p)) = &self.function {
            return Ok(p.dim());
        }
        Err(CliError::Validation("cannot infer the dimension; set `space` or `d`".into()))
    }

    pub fn function(&self) -> Result<Polynomial, CliError> {
        Self::require(&self.function, "function")?.build(self.dim()?)
    }
}
