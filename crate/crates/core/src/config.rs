//! TOML run configuration.
//!
//! ```toml
//! [scheme]
//! variant = "ppc"          # plc | ppc | sysppc
//! n = 4
//! k = 2
//! q = 5
//! g = 2                    # optional, defaults to the candidate degree
//! # alpha = [0, 1, 2, 3]   # optional evaluation points
//! # gamma = [4, 0]         # optional interpolation points
//! # generator = [[1, 0, 1, 1], [0, 1, 1, 1]]   # plc only
//! # rate_matrix = ["1010", "0101"]             # plc and ppc only
//!
//! [candidates]
//! kind = "nonparallel_monomials"   # linear | all_monomials | nonparallel_monomials | explicit
//! f = 2
//! g = 2
//! # rows = [[1, 0], [0, 1]]                          # linear
//! # functions = [[{ exponents = [1, 1], coef = 1 }]] # explicit
//!
//! [run]
//! seed = 1
//! trials = 5
//! # v = [1, 3]             # 1-based desired indices, default all
//!
//! [verify]
//! privacy_trials = 200
//!
//! [rates]
//! # f = [1, 2, 3]          # sweep the message count for generated sets
//! ```

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::codes::{LinearCode, RSCode};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::functions::{CandidateFunction, CandidateSet, Monomial};
use crate::linalg::Matrix;
use crate::matrices::{MatrixKind, RateMatrix};
use crate::protocol::{SchemeParams, Variant};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scheme: SchemeSection,
    pub candidates: CandidateSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub rates: RatesSection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub variant: String,
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub g: Option<usize>,
    /// Checked against the candidate set when given.
    pub f: Option<usize>,
    pub mu: Option<usize>,
    pub alpha: Option<Vec<u32>>,
    pub gamma: Option<Vec<u32>>,
    pub generator: Option<Vec<Vec<u32>>>,
    pub rate_matrix: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    Linear,
    AllMonomials,
    NonparallelMonomials,
    Explicit,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSection {
    pub kind: CandidateKind,
    pub f: Option<usize>,
    pub g: Option<usize>,
    pub rows: Option<Vec<Vec<u32>>>,
    pub functions: Option<Vec<Vec<TermSpec>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub exponents: Vec<u32>,
    #[serde(default = "one")]
    pub coef: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one_usize")]
    pub trials: usize,
    pub v: Option<Vec<usize>>,
    pub output: Option<String>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { seed: 0, trials: 1, v: None, output: None }
    }
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default = "default_privacy_trials")]
    pub privacy_trials: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection { privacy_trials: default_privacy_trials() }
    }
}

fn default_privacy_trials() -> usize {
    200
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    pub f: Option<Vec<usize>>,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Config::from_toml_str(&text)
    }

    pub fn variant(&self) -> Result<Variant> {
        self.scheme.variant.parse()
    }

    pub fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.scheme.q)
    }

    /// Checks everything that does not need the heavier constructions.
    pub fn validate(&self) -> Result<()> {
        let s = &self.scheme;
        self.variant()?;
        self.field()?;
        if s.k == 0 || s.k > s.n {
            return Err(Error::Config(format!("need 0 < k <= n, got n={}, k={}", s.n, s.k)));
        }
        if self.run.trials == 0 {
            return Err(Error::Config("run.trials must be positive".into()));
        }
        let set = self.candidate_set()?;
        if let Some(f) = s.f {
            if f != set.f {
                return Err(Error::Config(format!("scheme.f={f} but the candidates use {} messages", set.f)));
            }
        }
        if let Some(mu) = s.mu {
            if mu != set.mu() {
                return Err(Error::Config(format!("scheme.mu={mu} but {} candidates are listed", set.mu())));
            }
        }
        if let Some(vs) = &self.run.v {
            if let Some(&bad) = vs.iter().find(|&&v| v == 0 || v > set.mu()) {
                return Err(Error::Config(format!("desired index {bad} outside [1, {}]", set.mu())));
            }
        }
        Ok(())
    }

    /// Candidate set with the configured message count.
    pub fn candidate_set(&self) -> Result<CandidateSet> {
        let f = match self.candidates.kind {
            CandidateKind::Linear => self.candidates.rows.as_ref().and_then(|r| r.first()).map(Vec::len),
            CandidateKind::Explicit => self
                .candidates
                .functions
                .as_ref()
                .and_then(|fs| fs.first())
                .and_then(|t| t.first())
                .map(|t| t.exponents.len()),
            _ => self.candidates.f,
        };
        let f = f.ok_or_else(|| Error::Config("cannot determine the number of messages f".into()))?;
        self.candidate_set_for(f)
    }

    /// Candidate set regenerated for `f` messages (generated kinds only).
    pub fn candidate_set_for(&self, f: usize) -> Result<CandidateSet> {
        let field = self.field()?;
        let c = &self.candidates;
        let g = c.g.or(self.scheme.g).unwrap_or(1);
        match c.kind {
            CandidateKind::AllMonomials => CandidateSet::all_monomials(field, f, g),
            CandidateKind::NonparallelMonomials => CandidateSet::nonparallel_monomials(field, f, g),
            CandidateKind::Linear => {
                let rows = c.rows.as_ref().ok_or_else(|| Error::Config("linear candidates need `rows`".into()))?;
                if rows.iter().any(|r| r.len() != f) {
                    return Err(Error::Config(format!("every row must have {f} coefficients")));
                }
                CandidateSet::linear(field, rows)
            }
            CandidateKind::Explicit => {
                let fs = c.functions.as_ref().ok_or_else(|| Error::Config("explicit candidates need `functions`".into()))?;
                let functions = fs
                    .iter()
                    .map(|terms| {
                        if terms.iter().any(|t| t.exponents.len() != f) {
                            return Err(Error::Config(format!("every exponent vector must have {f} entries")));
                        }
                        CandidateFunction::new(field, terms.iter().map(|t| (Monomial::new(t.exponents.clone()), t.coef)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                CandidateSet::new(field, f, functions)
            }
        }
    }

    /// Scheme for the configured candidate set.
    pub fn scheme_params(&self) -> Result<SchemeParams> {
        self.scheme_params_with(self.candidate_set()?)
    }

    pub fn scheme_params_with(&self, set: CandidateSet) -> Result<SchemeParams> {
        let s = &self.scheme;
        let field = self.field()?;
        let g = s.g.unwrap_or(set.g);
        let kind = |k| -> Result<Option<RateMatrix>> {
            s.rate_matrix.as_ref().map(|rows| RateMatrix::from_text(&rows.join("\n"), k)).transpose()
        };
        match self.variant()? {
            Variant::Plc => {
                let code = match &s.generator {
                    Some(rows) => LinearCode::new(field, Matrix::from_rows(rows)?)?,
                    None => self.rs_code(field, true)?.base,
                };
                if code.n != s.n || code.k != s.k {
                    return Err(Error::Config(format!("generator is {}x{}, expected {}x{}", code.k, code.n, s.k, s.n)));
                }
                match kind(MatrixKind::Pir)? {
                    Some(rm) => SchemeParams::plc(code, rm, set),
                    None if s.generator.is_none() && s.alpha.is_none() => SchemeParams::plc_mds(field, s.n, s.k, set),
                    None => {
                        let rm = crate::matrices::construct_block_cyclic(s.n, s.k, MatrixKind::Pir)?;
                        SchemeParams::plc(code, rm, set)
                    }
                }
            }
            Variant::Ppc => {
                self.no_generator()?;
                if s.alpha.is_none() && s.gamma.is_none() && s.rate_matrix.is_none() {
                    return SchemeParams::ppc(field, s.n, s.k, g, set);
                }
                let code = self.rs_code(field, false)?;
                SchemeParams::ppc_with_code(code, g, set, kind(MatrixKind::Ppc)?)
            }
            Variant::SysPpc => {
                self.no_generator()?;
                if s.rate_matrix.is_some() || s.alpha.is_some() || s.gamma.is_some() {
                    return Err(Error::Config("the systematic scheme builds its own code and rate matrix".into()));
                }
                SchemeParams::sys_ppc(field, s.n, s.k, g, set)
            }
        }
    }

    fn no_generator(&self) -> Result<()> {
        if self.scheme.generator.is_some() {
            return Err(Error::Config("`generator` is only accepted for the plc variant".into()));
        }
        Ok(())
    }

    fn rs_code(&self, field: PrimeField, systematic: bool) -> Result<RSCode> {
        let s = &self.scheme;
        let q = field.order() as usize;
        let alpha = s.alpha.clone().unwrap_or_else(|| (0..s.n as u32).collect());
        let gamma = match &s.gamma {
            Some(g) => g.clone(),
            None if systematic => alpha[..s.k].to_vec(),
            None => (0..s.k).map(|i| ((s.n + i) % q) as u32).collect(),
        };
        RSCode::new(field, s.n, s.k, alpha, gamma)
    }

    /// 0-based desired indices to run.
    pub fn desired_indices(&self, mu: usize) -> Vec<usize> {
        match &self.run.v {
            Some(vs) => vs.iter().map(|v| v - 1).collect(),
            None => (0..mu).collect(),
        }
    }
}
