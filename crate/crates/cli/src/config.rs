use std::path::{Path, PathBuf};

use clap::ValueEnum;
use mfld::quantize::{Backend, Budget};
use mfld::{build_basis, MatrixBasis, Polynomial};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    Dense,
    Block,
    Auto,
}

impl BackendChoice {
    pub fn resolve(self, ell: usize, n: usize) -> Backend {
        match self {
            BackendChoice::Dense => Backend::Dense,
            BackendChoice::Block => Backend::Block,
            BackendChoice::Auto => Backend::auto(ell, n),
        }
    }
}

/// One study, as read from a TOML file. Every key is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub ell: usize,
    pub h_symbol: String,
    pub a_symbol: String,
    pub t_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub backend: BackendChoice,
    pub truncation_k: usize,
    pub bins: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub majorant_order: usize,
    pub max_dense_dim: usize,
    pub max_block_n: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        let budget = Budget::default();
        Self {
            ell: 2,
            h_symbol: "0".into(),
            a_symbol: "x3".into(),
            t_values: vec![-0.2, -0.1, 0.0, 0.1, 0.2],
            n_values: vec![4, 8, 16, 32],
            backend: BackendChoice::Auto,
            truncation_k: 3,
            bins: mfld::thermo::DEFAULT_BINS,
            seed: 0x5eed,
            output_dir: PathBuf::from("."),
            majorant_order: mfld::bch::DEFAULT_MAJORANT_ORDER,
            max_dense_dim: budget.max_dense_dim,
            max_block_n: budget.max_block_n,
        }
    }
}

/// Command-line values that replace config keys when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub backend: Option<BackendChoice>,
    pub max_n: Option<usize>,
    pub trunc_k: Option<usize>,
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        if let Some(b) = o.backend {
            self.backend = b;
        }
        if let Some(k) = o.trunc_k {
            self.truncation_k = k;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(max_n) = o.max_n {
            self.n_values.retain(|&n| n <= max_n);
        }
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_dense_dim: self.max_dense_dim,
            max_block_n: self.max_block_n,
        }
    }

    /// Checks the scenario and parses both symbols.
    pub fn prepare(&self) -> Result<Prepared> {
        if self.ell < 2 {
            return Err(CliError::Config(format!("ell = {} (need ell >= 2)", self.ell)));
        }
        if self.n_values.iter().any(|&n| n == 0) {
            return Err(CliError::Config("n_values must be positive".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("n_values must be strictly ascending".into()));
        }
        if let Some(t) = self.t_values.iter().find(|t| !t.is_finite()) {
            return Err(CliError::Config(format!("non-finite t value {t}")));
        }
        if self.bins == 0 {
            return Err(CliError::Config("bins must be positive".into()));
        }
        let basis = build_basis(self.ell)?;
        let nvars = basis.dim();
        let parse = |key: &str, text: &str| {
            Polynomial::parse(text, nvars).map_err(|e| CliError::Config(format!("{key}: {e}")))
        };
        let h = parse("h_symbol", &self.h_symbol)?;
        let a = parse("a_symbol", &self.a_symbol)?;
        let mut t_values = self.t_values.clone();
        t_values.sort_by(f64::total_cmp);
        t_values.dedup();
        Ok(Prepared { basis, h, a, t_values })
    }
}

pub struct Prepared {
    pub basis: MatrixBasis,
    pub h: Polynomial,
    pub a: Polynomial,
    /// Sorted ascending, duplicates removed.
    pub t_values: Vec<f64>,
}
