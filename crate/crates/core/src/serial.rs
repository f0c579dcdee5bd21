//! JSON formats.
//!
//! Matrices are row-major lists of rows, each entry a `[re, im]` pair:
//!
//! ```json
//! [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]
//! ```
//!
//! | value          | shape                                                        |
//! |----------------|--------------------------------------------------------------|
//! | Lindblad model | `{"H": matrix, "Ls": [matrix, …]}`                           |
//! | DD scheme      | `{"V": [matrix, …], "order": "cyclic" \| {"random": seed}, "tau": number}` |
//! | spectral model | `{"levels": [{"E": number, "P": matrix}, …], "rho": matrix}` |
//! | superoperator  | `{"dim": d, "picture": "heisenberg" \| "schrodinger", "matrix": matrix}` |
//!
//! Unknown fields are rejected everywhere. All parsers validate the decoded
//! value with the same checks as the corresponding constructor and never
//! panic on malformed input.

use serde::{Deserialize, Serialize};

use crate::decouple::{DDScheme, Order};
use crate::error::{Error, Result};
use crate::opalg::{c, Operator};
use crate::pocket::{Level, SpectralModel};
use crate::semigroup::{LindbladModel, Picture, SuperOperator};

/// Wire form of a complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl MatrixJson {
    pub fn from_operator(a: &Operator) -> Self {
        Self(
            a.row_iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        )
    }

    /// Requires a square, rectangular-consistent, finite matrix.
    pub fn to_operator(&self) -> Result<Operator> {
        let n = self.0.len();
        for row in &self.0 {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        if self.0.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Operator::from_fn(n, n, |i, j| {
            let [re, im] = self.0[i][j];
            c(re, im)
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    #[serde(rename = "H")]
    pub h: MatrixJson,
    #[serde(rename = "Ls", default)]
    pub ls: Vec<MatrixJson>,
}

impl ModelJson {
    pub fn from_model(m: &LindbladModel) -> Self {
        Self {
            h: MatrixJson::from_operator(m.h()),
            ls: m.ls().iter().map(MatrixJson::from_operator).collect(),
        }
    }

    pub fn to_model(&self) -> Result<LindbladModel> {
        let ls = self
            .ls
            .iter()
            .map(MatrixJson::to_operator)
            .collect::<Result<Vec<_>>>()?;
        LindbladModel::new(self.h.to_operator()?, ls)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeJson {
    #[serde(rename = "V")]
    pub kicks: Vec<MatrixJson>,
    pub order: Order,
    pub tau: f64,
}

impl SchemeJson {
    pub fn from_scheme(s: &DDScheme) -> Self {
        Self {
            kicks: s.kicks().iter().map(MatrixJson::from_operator).collect(),
            order: s.order(),
            tau: s.tau(),
        }
    }

    pub fn to_scheme(&self) -> Result<DDScheme> {
        let kicks = self
            .kicks
            .iter()
            .map(MatrixJson::to_operator)
            .collect::<Result<Vec<_>>>()?;
        DDScheme::new(kicks, self.order, self.tau)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelJson {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "P")]
    pub projector: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralJson {
    pub levels: Vec<LevelJson>,
    pub rho: MatrixJson,
}

impl SpectralJson {
    pub fn from_spectral(sm: &SpectralModel) -> Self {
        Self {
            levels: sm
                .levels()
                .iter()
                .map(|lv| LevelJson {
                    energy: lv.energy,
                    projector: MatrixJson::from_operator(&lv.projector),
                })
                .collect(),
            rho: MatrixJson::from_operator(sm.rho()),
        }
    }

    pub fn to_spectral(&self) -> Result<SpectralModel> {
        let levels = self
            .levels
            .iter()
            .map(|lv| {
                Ok(Level {
                    energy: lv.energy,
                    projector: lv.projector.to_operator()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SpectralModel::new(levels, self.rho.to_operator()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperOperatorJson {
    pub dim: usize,
    pub picture: Picture,
    pub matrix: MatrixJson,
}

impl SuperOperatorJson {
    pub fn from_superop(s: &SuperOperator) -> Self {
        Self {
            dim: s.dim(),
            picture: s.picture(),
            matrix: MatrixJson::from_operator(s.matrix()),
        }
    }

    pub fn to_superop(&self) -> Result<SuperOperator> {
        let s = SuperOperator::from_matrix(self.matrix.to_operator()?, self.picture)?;
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: s.dim(),
            });
        }
        Ok(s)
    }
}

fn decode<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Json(e.to_string()))
}

fn encode<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("finite values always serialize")
}

pub fn parse_matrix(bytes: &[u8]) -> Result<Operator> {
    decode::<MatrixJson>(bytes)?.to_operator()
}

pub fn parse_model(bytes: &[u8]) -> Result<LindbladModel> {
    decode::<ModelJson>(bytes)?.to_model()
}

pub fn parse_scheme(bytes: &[u8]) -> Result<DDScheme> {
    decode::<SchemeJson>(bytes)?.to_scheme()
}

pub fn parse_spectral_model(bytes: &[u8]) -> Result<SpectralModel> {
    decode::<SpectralJson>(bytes)?.to_spectral()
}

pub fn parse_superop(bytes: &[u8]) -> Result<SuperOperator> {
    decode::<SuperOperatorJson>(bytes)?.to_superop()
}

pub fn model_to_json(m: &LindbladModel) -> String {
    encode(&ModelJson::from_model(m))
}

pub fn scheme_to_json(s: &DDScheme) -> String {
    encode(&SchemeJson::from_scheme(s))
}

pub fn spectral_to_json(sm: &SpectralModel) -> String {
    encode(&SpectralJson::from_spectral(sm))
}

pub fn superop_to_json(s: &SuperOperator) -> String {
    encode(&SuperOperatorJson::from_superop(s))
}
