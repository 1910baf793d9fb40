//! The line-oriented matroid description format.
//!
//! ```text
//! # U_{2,4}
//! type: uniform
//! elements: a b c d
//! k: 2
//! ```
//!
//! `type` is one of `uniform`, `graphic`, `linear-gf2`, `explicit`,
//! `circuits` or `file-derived`. Graphic matroids list `edges: e1=u-v ...`,
//! linear ones a `matrix:` of 0/1 rows (one column per element), explicit ones
//! their `independent:` sets and circuit descriptions their `circuits:`, one
//! set per line with `{}` for the empty set. A derived file names a `base:`
//! description (relative to its own directory) followed by `derive:` steps:
//! `dual`, `contract a,b`, `delete a,b`, `restrict a,b` or `sum other.mat`.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::axioms::Candidate;
use crate::config::Budget;
use crate::constructions::{contract, delete, direct_sum, dual, restrict};
use crate::error::{MatroidError, Result};
use crate::matroid::{circuits_in, Matroid, Representation};
use crate::set::{bits, ElementSet, GroundSet};

/// A parsed description, before it is turned into a matroid.
#[derive(Debug, Clone)]
pub enum Description {
    Uniform {
        ground: Arc<GroundSet>,
        rank: usize,
    },
    Graphic {
        ground: Arc<GroundSet>,
        vertices: Vec<String>,
        edges: Vec<(usize, usize)>,
    },
    LinearGf2 {
        ground: Arc<GroundSet>,
        rows: Vec<Vec<bool>>,
    },
    Explicit {
        ground: Arc<GroundSet>,
        independent: Vec<u64>,
    },
    Circuits {
        ground: Arc<GroundSet>,
        circuits: Vec<u64>,
    },
    Derived(Matroid),
}

const KEYS: [&str; 9] = [
    "type",
    "elements",
    "k",
    "edges",
    "matrix",
    "independent",
    "circuits",
    "base",
    "derive",
];

fn err(line: usize, reason: impl Into<String>) -> MatroidError {
    MatroidError::Parse {
        line,
        reason: reason.into(),
    }
}

struct Field {
    line: usize,
    value: String,
    // following lines without a key
    rest: Vec<(usize, String)>,
}

fn split_fields(text: &str) -> Result<Vec<(String, Field)>> {
    let mut fields: Vec<(String, Field)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let key = trimmed
            .split_once(':')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, _)| {
                !k.is_empty() && k.chars().all(|c| c.is_ascii_lowercase() || c == '-')
            });
        match key {
            Some((k, v)) => {
                if !KEYS.contains(&k) {
                    return Err(err(line, format!("unknown key {k:?}")));
                }
                if k != "derive" && fields.iter().any(|(name, _)| name == k) {
                    return Err(err(line, format!("duplicate key {k:?}")));
                }
                fields.push((
                    k.to_string(),
                    Field {
                        line,
                        value: v.to_string(),
                        rest: Vec::new(),
                    },
                ));
            }
            None => match fields.last_mut() {
                Some((k, field))
                    if ["edges", "matrix", "independent", "circuits"].contains(&k.as_str()) =>
                {
                    field.rest.push((line, trimmed.to_string()));
                }
                _ => {
                    return Err(err(
                        line,
                        format!("expected `key: value`, found {trimmed:?}"),
                    ))
                }
            },
        }
    }
    Ok(fields)
}

fn field<'a>(fields: &'a [(String, Field)], key: &str) -> Option<&'a Field> {
    fields.iter().find(|(k, _)| k == key).map(|(_, f)| f)
}

fn require<'a>(
    fields: &'a [(String, Field)],
    key: &str,
    ty: &str,
    last_line: usize,
) -> Result<&'a Field> {
    field(fields, key).ok_or_else(|| err(last_line, format!("type {ty} needs `{key}:`")))
}

fn parse_elements(
    fields: &[(String, Field)],
    ty: &str,
    last_line: usize,
) -> Result<Arc<GroundSet>> {
    let f = require(fields, "elements", ty, last_line)?;
    GroundSet::new(f.value.split_whitespace()).map_err(|e| err(f.line, e.to_string()))
}

/// The value on the key line followed by continuation lines, each with its line number.
fn entries(f: &Field) -> impl Iterator<Item = (usize, &str)> {
    std::iter::once((f.line, f.value.as_str()))
        .filter(|(_, v)| !v.is_empty())
        .chain(f.rest.iter().map(|(l, v)| (*l, v.as_str())))
}

fn parse_sets(ground: &Arc<GroundSet>, f: &Field) -> Result<Vec<u64>> {
    entries(f)
        .map(|(line, text)| {
            ElementSet::parse(ground, text)
                .map(|s| s.mask())
                .map_err(|e| err(line, e.to_string()))
        })
        .collect()
}

impl Description {
    /// Parses a description; `base_dir` resolves `base:` and `sum` paths.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let fields = split_fields(text)?;
        let last_line = text.lines().count().max(1);
        let ty = field(&fields, "type").ok_or_else(|| err(1, "missing `type:`"))?;
        match ty.value.as_str() {
            "uniform" => {
                let ground = parse_elements(&fields, "uniform", last_line)?;
                let k = require(&fields, "k", "uniform", last_line)?;
                let rank = k
                    .value
                    .parse()
                    .map_err(|_| err(k.line, format!("rank {:?} is not a number", k.value)))?;
                Ok(Self::Uniform { ground, rank })
            }
            "graphic" => parse_graphic(&fields, last_line),
            "linear-gf2" => {
                let ground = parse_elements(&fields, "linear-gf2", last_line)?;
                let f = require(&fields, "matrix", "linear-gf2", last_line)?;
                let rows = entries(f)
                    .map(|(line, text)| {
                        let row: Vec<bool> = text
                            .chars()
                            .filter(|c| !c.is_whitespace())
                            .map(|c| match c {
                                '0' => Ok(false),
                                '1' => Ok(true),
                                _ => Err(err(line, format!("matrix entry {c:?} is not 0 or 1"))),
                            })
                            .collect::<Result<_>>()?;
                        if row.len() != ground.len() {
                            return Err(err(
                                line,
                                format!("row has {} entries, expected {}", row.len(), ground.len()),
                            ));
                        }
                        Ok(row)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::LinearGf2 { ground, rows })
            }
            "explicit" => {
                let ground = parse_elements(&fields, "explicit", last_line)?;
                let f = require(&fields, "independent", "explicit", last_line)?;
                Ok(Self::Explicit {
                    independent: parse_sets(&ground, f)?,
                    ground,
                })
            }
            "circuits" => {
                let ground = parse_elements(&fields, "circuits", last_line)?;
                let f = require(&fields, "circuits", "circuits", last_line)?;
                Ok(Self::Circuits {
                    circuits: parse_sets(&ground, f)?,
                    ground,
                })
            }
            "file-derived" => parse_derived(&fields, base_dir, last_line),
            other => Err(err(ty.line, format!("unknown type {other:?}"))),
        }
    }

    /// Reads and parses a description file.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MatroidError::domain(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        match self {
            Self::Uniform { ground, .. }
            | Self::Graphic { ground, .. }
            | Self::LinearGf2 { ground, .. }
            | Self::Explicit { ground, .. }
            | Self::Circuits { ground, .. } => ground,
            Self::Derived(m) => m.ground(),
        }
    }

    /// Builds the matroid. Explicit and circuit families are checked against
    /// the axioms and rejected with a witness if they fail.
    pub fn to_matroid(&self) -> Result<Matroid> {
        match self {
            Self::Uniform { ground, rank } => Ok(Matroid::uniform(ground.clone(), *rank)),
            Self::Graphic {
                ground,
                vertices,
                edges,
            } => Matroid::graphic(ground.clone(), vertices.clone(), edges.clone()),
            Self::LinearGf2 { ground, rows } => Matroid::linear_gf2(ground.clone(), rows),
            Self::Explicit {
                ground,
                independent,
            } => Matroid::explicit(ground.clone(), independent.iter().copied()),
            Self::Circuits { ground, circuits } => {
                let independent = bits::subsets(ground.full_mask())
                    .filter(|&s| !circuits.iter().any(|&c| c & !s == 0));
                Matroid::explicit(ground.clone(), independent)
            }
            Self::Derived(m) => Ok(m.clone()),
        }
    }

    /// The set system to hand to the axiom checker. Families are passed
    /// through as written; other descriptions are materialized.
    pub fn candidate(&self, budget: &Budget) -> Result<Candidate> {
        match self {
            Self::Explicit {
                ground,
                independent,
            } => {
                MatroidError::check_budget("axiom check", ground.len(), budget.axioms)?;
                Ok(Candidate::Independent {
                    ground: ground.clone(),
                    sets: independent.clone(),
                })
            }
            Self::Circuits { ground, circuits } => {
                MatroidError::check_budget("axiom check", ground.len(), budget.axioms)?;
                Ok(Candidate::Circuits {
                    ground: ground.clone(),
                    sets: circuits.clone(),
                })
            }
            _ => Candidate::from_matroid(&self.to_matroid()?, budget),
        }
    }
}

fn parse_graphic(fields: &[(String, Field)], last_line: usize) -> Result<Description> {
    let f = require(fields, "edges", "graphic", last_line)?;
    let mut labels = Vec::new();
    let mut vertices: Vec<String> = Vec::new();
    let mut ends = Vec::new();
    for (line, text) in entries(f) {
        for token in text.split_whitespace() {
            let parsed = token
                .split_once('=')
                .and_then(|(l, uv)| uv.split_once('-').map(|(u, v)| (l, u, v)));
            let Some((label, u, v)) =
                parsed.filter(|(l, u, v)| !l.is_empty() && !u.is_empty() && !v.is_empty())
            else {
                return Err(err(
                    line,
                    format!("edge {token:?} is not of the form label=u-v"),
                ));
            };
            let mut vertex = |name: &str| match vertices.iter().position(|x| x == name) {
                Some(i) => i,
                None => {
                    vertices.push(name.to_string());
                    vertices.len() - 1
                }
            };
            let end = (vertex(u), vertex(v));
            labels.push((line, label.to_string()));
            ends.push(end);
        }
    }
    let edge_ground = GroundSet::new(labels.iter().map(|(_, l)| l.clone()))
        .map_err(|e| err(f.line, e.to_string()))?;
    let (ground, edges) = match field(fields, "elements") {
        None => (edge_ground, ends),
        Some(el) => {
            let ground = GroundSet::new(el.value.split_whitespace())
                .map_err(|e| err(el.line, e.to_string()))?;
            if ground.len() != edge_ground.len() {
                return Err(err(
                    f.line,
                    format!("{} edges for {} elements", edge_ground.len(), ground.len()),
                ));
            }
            let mut edges = Vec::with_capacity(ground.len());
            for label in ground.labels() {
                let i = edge_ground
                    .position(label)
                    .ok_or_else(|| err(el.line, format!("element {label:?} has no edge")))?;
                edges.push(ends[i]);
            }
            (ground, edges)
        }
    };
    Ok(Description::Graphic {
        ground,
        vertices,
        edges,
    })
}

fn parse_derived(
    fields: &[(String, Field)],
    base_dir: Option<&Path>,
    last_line: usize,
) -> Result<Description> {
    let resolve = |p: &str| -> PathBuf {
        match base_dir {
            Some(dir) if Path::new(p).is_relative() => dir.join(p),
            _ => PathBuf::from(p),
        }
    };
    let base = require(fields, "base", "file-derived", last_line)?;
    let mut m = Description::read(&resolve(&base.value))
        .and_then(|d| d.to_matroid())
        .map_err(|e| err(base.line, e.to_string()))?;
    for (_, f) in fields.iter().filter(|(k, _)| k == "derive") {
        let (op, arg) = f
            .value
            .split_once(char::is_whitespace)
            .unwrap_or((f.value.as_str(), ""));
        let arg = arg.trim();
        let set = |m: &Matroid| m.set(arg).map_err(|e| err(f.line, e.to_string()));
        m = match op {
            "dual" => dual(&m),
            "contract" => contract(&m, &set(&m)?).map_err(|e| err(f.line, e.to_string()))?,
            "delete" => delete(&m, &set(&m)?).map_err(|e| err(f.line, e.to_string()))?,
            "restrict" => restrict(&m, &set(&m)?).map_err(|e| err(f.line, e.to_string()))?,
            "sum" => {
                let other = Description::read(&resolve(arg))
                    .and_then(|d| d.to_matroid())
                    .map_err(|e| err(f.line, e.to_string()))?;
                direct_sum(&[m, other]).map_err(|e| err(f.line, e.to_string()))?
            }
            _ => return Err(err(f.line, format!("unknown derivation {op:?}"))),
        };
    }
    Ok(Description::Derived(m))
}

fn set_line(m: &Matroid, mask: u64) -> String {
    if mask == 0 {
        "{}".to_string()
    } else {
        m.set_of(mask).labels().collect::<Vec<_>>().join(",")
    }
}

/// Writes `m` in the description format. Derived matroids are written as
/// their circuits, which needs `|E| ≤ budget.circuits`.
pub fn write_description(m: &Matroid, budget: &Budget) -> Result<String> {
    let mut out = String::new();
    let elements = m.ground().labels().join(" ");
    match m.representation() {
        Representation::Uniform { rank } => {
            writeln!(out, "type: uniform\nelements: {elements}\nk: {rank}").unwrap();
        }
        Representation::Graphic { vertices, edges } => {
            let list: Vec<String> = edges
                .iter()
                .enumerate()
                .map(|(i, &(u, v))| {
                    format!("{}={}-{}", m.ground().label(i), vertices[u], vertices[v])
                })
                .collect();
            writeln!(
                out,
                "type: graphic\nelements: {elements}\nedges: {}",
                list.join(" ")
            )
            .unwrap();
        }
        Representation::LinearGf2 { rows, columns } => {
            writeln!(out, "type: linear-gf2\nelements: {elements}\nmatrix:").unwrap();
            for r in 0..*rows {
                let row: Vec<&str> = columns
                    .iter()
                    .map(|c| if c >> r & 1 == 1 { "1" } else { "0" })
                    .collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
        }
        Representation::Explicit => {
            MatroidError::check_budget("independent set listing", m.len(), budget.circuits)?;
            writeln!(out, "type: explicit\nelements: {elements}\nindependent:").unwrap();
            for s in bits::subsets(m.full_mask()).filter(|&s| m.indep(s)) {
                writeln!(out, "{}", set_line(m, s)).unwrap();
            }
        }
        Representation::Derived(_) => {
            MatroidError::check_budget("circuit enumeration", m.len(), budget.circuits)?;
            writeln!(out, "type: circuits\nelements: {elements}\ncircuits:").unwrap();
            for c in circuits_in(m, m.full_mask()) {
                writeln!(out, "{}", set_line(m, c)).unwrap();
            }
        }
    }
    Ok(out)
}
