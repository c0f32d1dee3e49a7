//! Scenario files: a graph in direct or Cayley-extension form plus optional
//! tolerances, time, vertex pair and output format.

use std::path::Path;

use serde::Deserialize;

use semicayley::cayley::{from_cayley, CayleyOverExtension, ExtensionKind};
use semicayley::error::{Error, Result};
use semicayley::graph::{ConnectionSets, SemiCayleyGraph, Vertex, VertexLiteral};
use semicayley::group::{FiniteAbelianGroup, GroupElement};
use semicayley::time::Time;
use semicayley::tolerance::Tolerances;

/// A group element written as a bare integer (rank one) or a residue list.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Scalar(i64),
    Residues(Vec<i64>),
}

impl ElementSpec {
    fn residues(&self) -> Vec<i64> {
        match self {
            ElementSpec::Scalar(x) => vec![*x],
            ElementSpec::Residues(r) => r.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectForm {
    pub group: Vec<u32>,
    #[serde(rename = "R", default)]
    pub r: Vec<ElementSpec>,
    #[serde(rename = "L", default)]
    pub l: Vec<ElementSpec>,
    #[serde(rename = "S", default)]
    pub s: Vec<ElementSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CayleyForm {
    pub base: Vec<u32>,
    pub kind: ExtensionKind,
    #[serde(default)]
    pub y: Option<ElementSpec>,
    #[serde(rename = "T1", default)]
    pub t1: Vec<ElementSpec>,
    #[serde(rename = "T2", default)]
    pub t2: Vec<ElementSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub graph: Option<DirectForm>,
    #[serde(default)]
    pub cayley: Option<CayleyForm>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub time: Option<String>,
    #[serde(default)]
    pub pair: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
}

fn elements(
    group: &FiniteAbelianGroup,
    field: &str,
    list: &[ElementSpec],
) -> Result<Vec<GroupElement>> {
    list.iter()
        .map(|e| {
            group
                .element(&e.residues())
                .map_err(|err| Error::Validation {
                    field: field.to_string(),
                    message: err.to_string(),
                })
        })
        .collect()
}

fn group(field: &str, factors: &[u32]) -> Result<FiniteAbelianGroup> {
    FiniteAbelianGroup::new(factors.to_vec()).map_err(|e| Error::Validation {
        field: field.to_string(),
        message: e.to_string(),
    })
}

impl CayleyForm {
    pub fn extension(&self) -> Result<CayleyOverExtension> {
        let base = group("cayley.base", &self.base)?;
        let y = match &self.y {
            Some(y) => Some(elements(&base, "cayley.y", std::slice::from_ref(y))?.remove(0)),
            None => None,
        };
        CayleyOverExtension::new(
            base.clone(),
            self.kind.clone(),
            y,
            elements(&base, "cayley.T1", &self.t1)?,
            elements(&base, "cayley.T2", &self.t2)?,
        )
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))?;
        match (&scenario.graph, &scenario.cayley) {
            (Some(_), Some(_)) => Err(Error::Validation {
                field: "graph".into(),
                message: "give either `graph` or `cayley`, not both".into(),
            }),
            (None, None) => Err(Error::Validation {
                field: "graph".into(),
                message: "scenario needs a `graph` or a `cayley` section".into(),
            }),
            _ => Ok(scenario),
        }
    }

    pub fn graph(&self) -> Result<SemiCayleyGraph> {
        if let Some(d) = &self.graph {
            let g = group("graph.group", &d.group)?;
            let sets = ConnectionSets::new(
                elements(&g, "R", &d.r)?,
                elements(&g, "L", &d.l)?,
                elements(&g, "S", &d.s)?,
            );
            return SemiCayleyGraph::build(g, sets);
        }
        let ext = self.cayley.as_ref().expect("checked on load").extension()?;
        Ok(from_cayley(&ext)?.0)
    }
}

/// Parses `"(g;o) (h;o)"` into two vertices.
pub fn parse_pair(text: &str, group: &FiniteAbelianGroup) -> Result<(Vertex, Vertex)> {
    let mut parts = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let end = rest
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed vertex in pair `{text}`")))?;
        parts.push(&rest[..=end]);
        rest = rest[end + 1..].trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    }
    if parts.len() != 2 {
        return Err(Error::Parse(format!(
            "pair `{text}` must contain exactly two vertices"
        )));
    }
    let bind = |s: &str| -> Result<Vertex> {
        let lit: VertexLiteral = s.parse()?;
        lit.bind(group).map_err(|e| Error::Validation {
            field: "pair".into(),
            message: e.to_string(),
        })
    };
    Ok((bind(parts[0])?, bind(parts[1])?))
}

pub fn parse_time(text: &str) -> Result<Time> {
    text.parse().map_err(|e: Error| Error::Validation {
        field: "time".into(),
        message: e.to_string(),
    })
}
