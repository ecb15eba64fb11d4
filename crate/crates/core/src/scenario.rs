//! Scenario files: a list of quadratic spaces with the verification suites
//! to run on each.
//!
//! ```toml
//! [[scenario]]
//! id = "plane"                        # unique within the file
//! space = "gf(3):diag(1,1)"           # <field>:<form>
//! suites = ["core", "theorems"]       # optional, defaults to every applicable suite
//! rescale = [2]                       # optional constants c, integers or strings like "-1/2"
//! budget = 5000000                    # optional per-scenario budget
//!
//! [scenario.similarity]               # optional
//! target = "gf(3):diag(2,2)"
//! matrix = [[1, 0], [0, 1]]           # rows; entries are integers or strings
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::Mat;
use crate::metric::QuadraticSpace;

/// The bundled scenario suite.
pub const BUNDLED_SUITE: &str = include_str!("../scenarios/paper-suite.toml");
pub const BUNDLED_SUITE_NAME: &str = "paper-suite";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Lipschitz,
    Ortho,
    Theorems,
    Tables,
    Rescale,
    Similarity,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Core,
        Suite::Lipschitz,
        Suite::Ortho,
        Suite::Theorems,
        Suite::Tables,
        Suite::Rescale,
        Suite::Similarity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Lipschitz => "lipschitz",
            Suite::Ortho => "ortho",
            Suite::Theorems => "theorems",
            Suite::Tables => "tables",
            Suite::Rescale => "rescale",
            Suite::Similarity => "similarity",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::validation("suite", format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilaritySpec {
    pub target: QuadraticSpace,
    pub matrix: Mat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub id: String,
    pub space: QuadraticSpace,
    pub suites: BTreeSet<Suite>,
    pub rescale: Vec<Scalar>,
    pub similarity: Option<SimilaritySpec>,
    pub budget: Option<u64>,
}

impl Scenario {
    /// A scenario running every suite that applies to `space`.
    pub fn new(id: impl Into<String>, space: QuadraticSpace) -> Scenario {
        Scenario {
            id: id.into(),
            space,
            suites: [
                Suite::Core,
                Suite::Lipschitz,
                Suite::Ortho,
                Suite::Theorems,
                Suite::Tables,
            ]
            .into(),
            rescale: Vec::new(),
            similarity: None,
            budget: None,
        }
    }

    /// Suites to run: the requested ones, or the defaults plus `rescale` and
    /// `similarity` when their data is present.
    pub fn default_suites(&self) -> BTreeSet<Suite> {
        let mut s: BTreeSet<Suite> = [
            Suite::Core,
            Suite::Lipschitz,
            Suite::Ortho,
            Suite::Theorems,
            Suite::Tables,
        ]
        .into();
        if !self.rescale.is_empty() {
            s.insert(Suite::Rescale);
        }
        if self.similarity.is_some() {
            s.insert(Suite::Similarity);
        }
        s
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    scenario: Vec<RawScenario>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: String,
    space: String,
    suites: Option<Vec<String>>,
    #[serde(default)]
    rescale: Vec<RawScalar>,
    budget: Option<u64>,
    similarity: Option<RawSimilarity>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimilarity {
    target: String,
    matrix: Vec<Vec<RawScalar>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Int(i64),
    Text(String),
}

impl RawScalar {
    fn resolve(&self, field: Field) -> Result<Scalar> {
        match self {
            RawScalar::Int(n) => Ok(field.from_i64(*n)),
            RawScalar::Text(t) => field.parse_scalar(t),
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates scenario text; scenarios keep their file order.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.scenario.len());
    for (i, r) in raw.scenario.into_iter().enumerate() {
        let at = |field: &str| format!("scenario[{i}].{field}");
        let invalid = |field: &str, e: Error| Error::validation(at(field), e.to_string());
        if r.id.trim().is_empty() {
            return Err(Error::validation(at("id"), "must not be empty"));
        }
        if !seen.insert(r.id.clone()) {
            return Err(Error::validation(at("id"), format!("duplicate id `{}`", r.id)));
        }
        let space: QuadraticSpace = r.space.parse().map_err(|e| invalid("space", e))?;
        let field = space.field();
        let rescale = r
            .rescale
            .iter()
            .map(|c| {
                let c = c.resolve(field).map_err(|e| invalid("rescale", e))?;
                if c.is_zero() {
                    return Err(Error::validation(at("rescale"), "constant must be nonzero"));
                }
                Ok(c)
            })
            .collect::<Result<Vec<_>>>()?;
        let similarity = r
            .similarity
            .map(|s| {
                let target: QuadraticSpace = s.target.parse().map_err(|e| invalid("similarity.target", e))?;
                if target.field() != field {
                    return Err(Error::validation(
                        at("similarity.target"),
                        "field differs from the space",
                    ));
                }
                let rows = s
                    .matrix
                    .iter()
                    .map(|row| row.iter().map(|x| x.resolve(field)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| invalid("similarity.matrix", e))?;
                let matrix = Mat::from_rows(field, &rows).map_err(|e| invalid("similarity.matrix", e))?;
                if matrix.rows() != target.dim() || matrix.cols() != space.dim() {
                    return Err(Error::validation(
                        at("similarity.matrix"),
                        format!("expected {}x{} matrix", target.dim(), space.dim()),
                    ));
                }
                Ok(SimilaritySpec { target, matrix })
            })
            .transpose()?;
        let mut scenario = Scenario {
            id: r.id,
            space,
            suites: BTreeSet::new(),
            rescale,
            similarity,
            budget: r.budget,
        };
        scenario.suites = match r.suites {
            None => scenario.default_suites(),
            Some(list) => list
                .iter()
                .map(|s| s.parse().map_err(|e| invalid("suites", e)))
                .collect::<Result<_>>()?,
        };
        if scenario.suites.contains(&Suite::Rescale) && scenario.rescale.is_empty() {
            return Err(Error::validation(
                at("rescale"),
                "suite `rescale` needs at least one constant",
            ));
        }
        if scenario.suites.contains(&Suite::Similarity) && scenario.similarity.is_none() {
            return Err(Error::validation(
                at("similarity"),
                "suite `similarity` needs a similarity table",
            ));
        }
        out.push(scenario);
    }
    Ok(out)
}

/// Loads a scenario file, or the bundled suite when `source` is its name.
pub fn load_scenarios(source: &str) -> Result<Vec<Scenario>> {
    if source == BUNDLED_SUITE_NAME {
        return parse_scenarios(BUNDLED_SUITE);
    }
    let text = std::fs::read_to_string(Path::new(source))
        .map_err(|e| Error::validation("scenario file", format!("{source}: {e}")))?;
    parse_scenarios(&text)
}
