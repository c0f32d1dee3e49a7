//! Semi-Cayley graphs `SC(G, R, L, S)` over a finite abelian group.
//!
//! The vertex set is `G × {0, 1}`. With additive notation:
//!
//! * `(g,0) ~ (h,0)` iff `h - g ∈ R`
//! * `(g,1) ~ (h,1)` iff `h - g ∈ L`
//! * `(g,0) ~ (h,1)` iff `h - g ∈ S`
//!
//! Vertex `(g, r)` has index `r·n + index_of(g)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement};

/// Which copy of the group a vertex lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Orbit {
    /// The copy carrying the `R` edges.
    Right = 0,
    /// The copy carrying the `L` edges.
    Left = 1,
}

impl Orbit {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn other(self) -> Orbit {
        match self {
            Orbit::Right => Orbit::Left,
            Orbit::Left => Orbit::Right,
        }
    }

    pub fn both() -> [Orbit; 2] {
        [Orbit::Right, Orbit::Left]
    }
}

impl From<Orbit> for u8 {
    fn from(o: Orbit) -> u8 {
        o as u8
    }
}

impl TryFrom<u8> for Orbit {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Orbit::Right),
            1 => Ok(Orbit::Left),
            other => Err(Error::Parse(format!("orbit must be 0 or 1, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub element: GroupElement,
    pub orbit: Orbit,
}

impl Vertex {
    pub fn new(element: GroupElement, orbit: Orbit) -> Self {
        Self { element, orbit }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.element.residues();
        write!(f, "(")?;
        for (i, x) in r.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ";{})", self.orbit.index())
    }
}

/// A vertex literal before it is bound to a group: `(g_1,...,g_r ; orbit)`.
///
/// The semicolon may be omitted, in which case the last comma-separated
/// entry is the orbit: `(0,1)` is element `[0]` in orbit 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexLiteral {
    pub residues: Vec<i64>,
    pub orbit: Orbit,
}

impl VertexLiteral {
    pub fn bind(&self, group: &FiniteAbelianGroup) -> Result<Vertex> {
        Ok(Vertex::new(group.element(&self.residues)?, self.orbit))
    }
}

impl FromStr for VertexLiteral {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("vertex `{s}` must be parenthesised")))?;
        let parse_list = |part: &str| -> Result<Vec<i64>> {
            part.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| {
                    x.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad integer `{x}` in vertex `{s}`")))
                })
                .collect()
        };
        let (residues, orbit) = match inner.split_once(';') {
            Some((elem, orbit)) => {
                let orbit: u8 = orbit
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad orbit in vertex `{s}`")))?;
                (parse_list(elem)?, orbit)
            }
            None => {
                let mut all = parse_list(inner)?;
                let orbit = all
                    .pop()
                    .ok_or_else(|| Error::Parse(format!("empty vertex `{s}`")))?;
                let orbit = u8::try_from(orbit)
                    .map_err(|_| Error::Parse(format!("bad orbit in vertex `{s}`")))?;
                (all, orbit)
            }
        };
        if residues.is_empty() {
            return Err(Error::Parse(format!("vertex `{s}` has no group element")));
        }
        Ok(VertexLiteral {
            residues,
            orbit: Orbit::try_from(orbit)?,
        })
    }
}

/// The three connection sets, each stored sorted by group index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionSets {
    #[serde(rename = "R")]
    pub r: Vec<GroupElement>,
    #[serde(rename = "L")]
    pub l: Vec<GroupElement>,
    #[serde(rename = "S")]
    pub s: Vec<GroupElement>,
}

impl ConnectionSets {
    pub fn new(r: Vec<GroupElement>, l: Vec<GroupElement>, s: Vec<GroupElement>) -> Self {
        Self { r, l, s }
    }

    /// Builds sets from raw residue lists, reducing each element.
    pub fn from_residues(
        group: &FiniteAbelianGroup,
        r: &[Vec<i64>],
        l: &[Vec<i64>],
        s: &[Vec<i64>],
    ) -> Result<Self> {
        let conv = |field: &str, list: &[Vec<i64>]| -> Result<Vec<GroupElement>> {
            list.iter()
                .map(|x| {
                    group
                        .element(x)
                        .map_err(|e| Error::validation(field, e.to_string()))
                })
                .collect()
        };
        Ok(Self::new(conv("R", r)?, conv("L", l)?, conv("S", s)?))
    }

    fn validate(&mut self, group: &FiniteAbelianGroup) -> Result<()> {
        for (field, set, inverse_closed) in [
            ("R", &mut self.r, true),
            ("L", &mut self.l, true),
            ("S", &mut self.s, false),
        ] {
            validate_set(group, field, set, inverse_closed, inverse_closed)?;
        }
        Ok(())
    }
}

/// Sorts `set` by group index and checks membership, duplicates, and
/// optionally identity-freeness and inverse-closure.
pub(crate) fn validate_set(
    group: &FiniteAbelianGroup,
    field: &str,
    set: &mut [GroupElement],
    forbid_identity: bool,
    inverse_closed: bool,
) -> Result<()> {
    let mut present = vec![false; group.order()];
    for g in set.iter() {
        group
            .check(g)
            .map_err(|e| Error::validation(field, e.to_string()))?;
        let i = group.index_of(g);
        if present[i] {
            return Err(Error::validation(field, format!("duplicate element {g}")));
        }
        present[i] = true;
        if forbid_identity && g.is_identity() {
            return Err(Error::validation(
                field,
                format!("contains the identity {g}"),
            ));
        }
    }
    if inverse_closed {
        for g in set.iter() {
            let inv = group.inverse(g);
            if !present[group.index_of(&inv)] {
                return Err(Error::validation(
                    field,
                    format!("not inverse-closed: {g} present but its inverse {inv} is missing"),
                ));
            }
        }
    }
    set.sort_by_key(|g| group.index_of(g));
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemiCayleyGraph {
    group: FiniteAbelianGroup,
    sets: ConnectionSets,
    #[serde(skip)]
    in_r: Vec<bool>,
    #[serde(skip)]
    in_l: Vec<bool>,
    #[serde(skip)]
    in_s: Vec<bool>,
}

/// Adjacency blocks with `A = [[C, B], [Bᵀ, D]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyBlocks {
    /// `Cay(G, R)` on orbit 0.
    pub c: DMatrix<f64>,
    /// Spokes, rows orbit 0, columns orbit 1.
    pub b: DMatrix<f64>,
    /// `Cay(G, L)` on orbit 1.
    pub d: DMatrix<f64>,
}

impl AdjacencyBlocks {
    pub fn assemble(&self) -> DMatrix<f64> {
        let n = self.c.nrows();
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        a.view_mut((0, 0), (n, n)).copy_from(&self.c);
        a.view_mut((0, n), (n, n)).copy_from(&self.b);
        a.view_mut((n, 0), (n, n)).copy_from(&self.b.transpose());
        a.view_mut((n, n), (n, n)).copy_from(&self.d);
        a
    }
}

impl SemiCayleyGraph {
    pub fn build(group: FiniteAbelianGroup, mut sets: ConnectionSets) -> Result<Self> {
        sets.validate(&group)?;
        let mask = |set: &[GroupElement]| {
            let mut m = vec![false; group.order()];
            for g in set {
                m[group.index_of(g)] = true;
            }
            m
        };
        let (in_r, in_l, in_s) = (mask(&sets.r), mask(&sets.l), mask(&sets.s));
        Ok(Self {
            group,
            sets,
            in_r,
            in_l,
            in_s,
        })
    }

    /// Convenience constructor from residue lists.
    pub fn from_residues(
        factors: Vec<u32>,
        r: &[Vec<i64>],
        l: &[Vec<i64>],
        s: &[Vec<i64>],
    ) -> Result<Self> {
        let group = FiniteAbelianGroup::new(factors)?;
        let sets = ConnectionSets::from_residues(&group, r, l, s)?;
        Self::build(group, sets)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn sets(&self) -> &ConnectionSets {
        &self.sets
    }

    /// `n = |G|`; the graph has `2n` vertices.
    pub fn n(&self) -> usize {
        self.group.order()
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n()
    }

    pub fn r_equals_l(&self) -> bool {
        self.sets.r == self.sets.l
    }

    pub fn vertex_index(&self, v: &Vertex) -> usize {
        v.orbit.index() * self.n() + self.group.index_of(&v.element)
    }

    pub fn vertex_at(&self, index: usize) -> Vertex {
        let n = self.n();
        let orbit = if index < n { Orbit::Right } else { Orbit::Left };
        Vertex::new(self.group.element_at(index % n), orbit)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.vertex_count()).map(move |i| self.vertex_at(i))
    }

    pub fn check_vertex(&self, v: &Vertex) -> Result<()> {
        self.group.check(&v.element)
    }

    pub fn adjacent(&self, u: &Vertex, v: &Vertex) -> bool {
        let d = self
            .group
            .index_of(&self.group.difference(&u.element, &v.element));
        match (u.orbit, v.orbit) {
            (Orbit::Right, Orbit::Right) => self.in_r[d],
            (Orbit::Left, Orbit::Left) => self.in_l[d],
            (Orbit::Right, Orbit::Left) => self.in_s[d],
            (Orbit::Left, Orbit::Right) => {
                // (g,1) ~ (h,0) iff g - h ∈ S
                let back = self
                    .group
                    .index_of(&self.group.difference(&v.element, &u.element));
                self.in_s[back]
            }
        }
    }

    pub fn adjacency_blocks(&self) -> AdjacencyBlocks {
        let n = self.n();
        let g = &self.group;
        let block = |mask: &[bool]| {
            DMatrix::from_fn(n, n, |i, j| {
                let d = g.difference(&g.element_at(i), &g.element_at(j));
                if mask[g.index_of(&d)] {
                    1.0
                } else {
                    0.0
                }
            })
        };
        AdjacencyBlocks {
            c: block(&self.in_r),
            b: block(&self.in_s),
            d: block(&self.in_l),
        }
    }

    /// The full `2n × 2n` adjacency matrix, built vertex pair by vertex pair.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let verts: Vec<Vertex> = self.vertices().collect();
        let m = verts.len();
        DMatrix::from_fn(m, m, |i, j| {
            if self.adjacent(&verts[i], &verts[j]) {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn degree(&self, v: &Vertex) -> usize {
        self.vertices().filter(|w| self.adjacent(v, w)).count()
    }

    pub fn chi_r(&self, z: &GroupElement) -> f64 {
        self.sum_over(z, &self.sets.r).re
    }

    pub fn chi_l(&self, z: &GroupElement) -> f64 {
        self.sum_over(z, &self.sets.l).re
    }

    pub fn chi_s(&self, z: &GroupElement) -> Complex64 {
        self.sum_over(z, &self.sets.s)
    }

    fn sum_over(&self, z: &GroupElement, set: &[GroupElement]) -> Complex64 {
        set.iter().map(|x| self.group.chi(z, x)).sum()
    }

    /// `X = { z : |χ_z(S)| <= zero_tol }`.
    pub fn x_set(&self, zero_tol: f64) -> Vec<GroupElement> {
        self.group
            .elements()
            .filter(|z| self.chi_s(z).norm() <= zero_tol)
            .collect()
    }
}
