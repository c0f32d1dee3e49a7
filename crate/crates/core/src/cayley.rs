//! Cayley graphs over generalized dihedral and dicyclic groups, and their
//! conversion to semi-Cayley form.
//!
//! The ambient group is `H ∪ xH` with `x⁻¹hx = h⁻¹` and `x² = 1`
//! (dihedral) or `x² = y` for a fixed involution `y ∈ H` (dicyclic). A
//! Cayley graph `Cay(G, T)` with `T = T1 ∪ xT2` is isomorphic to
//! `SC(H, T1, T1, T2)` under `g ↦ (g,0)`, `xg ↦ (g,1)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{validate_set, ConnectionSets, Orbit, SemiCayleyGraph, Vertex};
use crate::group::{FiniteAbelianGroup, GroupElement};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionKind {
    Dihedral,
    Dicyclic,
}

/// `x^coset · h`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmbientElement {
    pub coset: u8,
    pub h: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyOverExtension {
    base: FiniteAbelianGroup,
    kind: ExtensionKind,
    /// `x²`; the identity for the dihedral extension.
    y: GroupElement,
    t1: Vec<GroupElement>,
    t2: Vec<GroupElement>,
}

/// Maps each ambient-group index (see
/// [`CayleyOverExtension::ambient_elements`]) to a semi-Cayley vertex index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling(pub Vec<usize>);

impl Relabeling {
    /// `P` with `P[i, ψ(i)] = 1`, so that `Pᵀ·A_Cayley·P = A_semiCayley`.
    pub fn permutation_matrix(&self) -> DMatrix<f64> {
        let m = self.0.len();
        let mut p = DMatrix::zeros(m, m);
        for (i, &j) in self.0.iter().enumerate() {
            p[(i, j)] = 1.0;
        }
        p
    }
}

impl CayleyOverExtension {
    pub fn new(
        base: FiniteAbelianGroup,
        kind: ExtensionKind,
        y: Option<GroupElement>,
        mut t1: Vec<GroupElement>,
        mut t2: Vec<GroupElement>,
    ) -> Result<Self> {
        let y = match (&kind, y) {
            (ExtensionKind::Dihedral, None) => base.identity(),
            (ExtensionKind::Dihedral, Some(y)) if y.is_identity() => y,
            (ExtensionKind::Dihedral, Some(y)) => {
                return Err(Error::validation(
                    "y",
                    format!("dihedral extension takes no y (got {y})"),
                ))
            }
            (ExtensionKind::Dicyclic, None) => {
                return Err(Error::validation("y", "dicyclic extension needs y"))
            }
            (ExtensionKind::Dicyclic, Some(y)) => {
                base.check(&y)
                    .map_err(|e| Error::validation("y", e.to_string()))?;
                if base.order_of(&y) != 2 {
                    return Err(Error::validation(
                        "y",
                        format!("{y} has order {}, expected 2", base.order_of(&y)),
                    ));
                }
                y
            }
        };
        validate_set(&base, "T1", &mut t1, true, true)?;
        validate_set(&base, "T2", &mut t2, false, false)?;
        let ext = Self {
            base,
            kind,
            y,
            t1,
            t2,
        };
        ext.check_connection_set()?;
        Ok(ext)
    }

    pub fn base(&self) -> &FiniteAbelianGroup {
        &self.base
    }

    pub fn kind(&self) -> &ExtensionKind {
        &self.kind
    }

    pub fn y(&self) -> &GroupElement {
        &self.y
    }

    pub fn t1(&self) -> &[GroupElement] {
        &self.t1
    }

    pub fn t2(&self) -> &[GroupElement] {
        &self.t2
    }

    pub fn order(&self) -> usize {
        2 * self.base.order()
    }

    pub fn identity(&self) -> AmbientElement {
        AmbientElement {
            coset: 0,
            h: self.base.identity(),
        }
    }

    /// Group law, using `hx = xh⁻¹` and `x² = y`.
    pub fn mul(&self, a: &AmbientElement, b: &AmbientElement) -> AmbientElement {
        let g = &self.base;
        match (a.coset, b.coset) {
            (e, 0) => AmbientElement {
                coset: e,
                h: g.add_unchecked(&a.h, &b.h),
            },
            (0, _) => AmbientElement {
                coset: 1,
                h: g.difference(&a.h, &b.h),
            },
            _ => AmbientElement {
                coset: 0,
                h: g.add_unchecked(&self.y, &g.difference(&a.h, &b.h)),
            },
        }
    }

    /// Ambient elements ordered `h`-major, coset-minor: index `2·idx(h) + coset`.
    pub fn ambient_elements(&self) -> Vec<AmbientElement> {
        self.base
            .elements()
            .flat_map(|h| {
                [0u8, 1].map(|coset| AmbientElement {
                    coset,
                    h: h.clone(),
                })
            })
            .collect()
    }

    pub fn ambient_index(&self, a: &AmbientElement) -> usize {
        2 * self.base.index_of(&a.h) + a.coset as usize
    }

    pub fn inverse(&self, a: &AmbientElement) -> AmbientElement {
        let id = self.identity();
        self.ambient_elements()
            .into_iter()
            .find(|b| self.mul(a, b) == id)
            .expect("every element of a finite group has an inverse")
    }

    /// `T = T1 ∪ xT2` as ambient elements.
    pub fn connection_set(&self) -> Vec<AmbientElement> {
        let lift = |coset: u8, set: &[GroupElement]| {
            set.iter()
                .map(|h| AmbientElement {
                    coset,
                    h: h.clone(),
                })
                .collect::<Vec<_>>()
        };
        let mut t = lift(0, &self.t1);
        t.extend(lift(1, &self.t2));
        t
    }

    fn check_connection_set(&self) -> Result<()> {
        let t = self.connection_set();
        for s in &t {
            let inv = self.inverse(s);
            if !t.contains(&inv) {
                let field = if s.coset == 0 { "T1" } else { "T2" };
                return Err(Error::validation(
                    field,
                    format!(
                        "T = T1 ∪ xT2 is not inverse-closed: inverse of x^{}·{} is x^{}·{}, which is missing",
                        s.coset, s.h, inv.coset, inv.h
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Adjacency of `Cay(G, T)` in ambient order; `g ~ s·g` for `s ∈ T`.
    pub fn cayley_adjacency(&self) -> DMatrix<f64> {
        let els = self.ambient_elements();
        let m = els.len();
        let mut a = DMatrix::zeros(m, m);
        for g in &els {
            for s in self.connection_set() {
                let sg = self.mul(&s, g);
                a[(self.ambient_index(g), self.ambient_index(&sg))] = 1.0;
            }
        }
        a
    }

    /// `SC(H, T1, T1, T2)` together with `ψ`.
    pub fn to_semi_cayley(&self) -> Result<(SemiCayleyGraph, Relabeling)> {
        let sets = ConnectionSets::new(self.t1.clone(), self.t1.clone(), self.t2.clone());
        let graph = SemiCayleyGraph::build(self.base.clone(), sets)?;
        let map = self
            .ambient_elements()
            .iter()
            .map(|a| {
                let orbit = if a.coset == 0 {
                    Orbit::Right
                } else {
                    Orbit::Left
                };
                graph.vertex_index(&Vertex::new(a.h.clone(), orbit))
            })
            .collect();
        Ok((graph, Relabeling(map)))
    }
}

/// Converts a Cayley graph over `Dih(H)` or `Dic(H, y)` to semi-Cayley form.
pub fn from_cayley(ext: &CayleyOverExtension) -> Result<(SemiCayleyGraph, Relabeling)> {
    ext.to_semi_cayley()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn els(g: &FiniteAbelianGroup, v: &[i64]) -> Vec<GroupElement> {
        v.iter().map(|&x| g.element(&[x]).unwrap()).collect()
    }

    #[test]
    fn ambient_group_axioms_hold() {
        let h = FiniteAbelianGroup::cyclic(4).unwrap();
        let y = h.element(&[2]).unwrap();
        for (kind, y) in [
            (ExtensionKind::Dihedral, None),
            (ExtensionKind::Dicyclic, Some(y)),
        ] {
            let ext = CayleyOverExtension::new(h.clone(), kind, y, vec![], vec![]).unwrap();
            let all = ext.ambient_elements();
            for a in &all {
                for b in &all {
                    for c in &all {
                        assert_eq!(ext.mul(&ext.mul(a, b), c), ext.mul(a, &ext.mul(b, c)));
                    }
                }
            }
            let x = AmbientElement {
                coset: 1,
                h: h.identity(),
            };
            assert_eq!(ext.mul(&x, &x).h, *ext.y());
        }
    }

    #[test]
    fn dicyclic_requires_t2_stable_under_y() {
        let h = FiniteAbelianGroup::cyclic(4).unwrap();
        let y = h.element(&[2]).unwrap();
        let ok = CayleyOverExtension::new(
            h.clone(),
            ExtensionKind::Dicyclic,
            Some(y.clone()),
            els(&h, &[2]),
            els(&h, &[0, 2]),
        );
        assert!(ok.is_ok());
        let bad = CayleyOverExtension::new(
            h.clone(),
            ExtensionKind::Dicyclic,
            Some(y),
            vec![],
            els(&h, &[1]),
        );
        match bad {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "T2"),
            other => panic!("unexpected {other:?}"),
        }
        // the same T2 is fine over the dihedral group
        assert!(CayleyOverExtension::new(
            h.clone(),
            ExtensionKind::Dihedral,
            None,
            vec![],
            els(&h, &[1])
        )
        .is_ok());
    }

    #[test]
    fn y_is_validated() {
        let h = FiniteAbelianGroup::cyclic(4).unwrap();
        let one = h.element(&[1]).unwrap();
        assert!(CayleyOverExtension::new(
            h.clone(),
            ExtensionKind::Dicyclic,
            Some(one),
            vec![],
            vec![]
        )
        .is_err());
        assert!(
            CayleyOverExtension::new(h.clone(), ExtensionKind::Dicyclic, None, vec![], vec![])
                .is_err()
        );
        assert!(CayleyOverExtension::new(
            h.clone(),
            ExtensionKind::Dihedral,
            Some(h.element(&[2]).unwrap()),
            vec![],
            vec![]
        )
        .is_err());
    }

    #[test]
    fn t1_must_be_identity_free_and_inverse_closed() {
        let h = FiniteAbelianGroup::cyclic(5).unwrap();
        assert!(CayleyOverExtension::new(
            h.clone(),
            ExtensionKind::Dihedral,
            None,
            els(&h, &[0]),
            vec![]
        )
        .is_err());
        assert!(CayleyOverExtension::new(
            h.clone(),
            ExtensionKind::Dihedral,
            None,
            els(&h, &[1]),
            vec![]
        )
        .is_err());
    }

    #[test]
    fn psi_is_an_isomorphism_on_small_examples() {
        type Case = (u32, ExtensionKind, Option<i64>, Vec<i64>, Vec<i64>);
        let cases: Vec<Case> = vec![
            (3, ExtensionKind::Dihedral, None, vec![], vec![0, 1, 2]),
            (6, ExtensionKind::Dihedral, None, vec![3], (0..6).collect()),
            (4, ExtensionKind::Dicyclic, Some(2), vec![2], vec![0, 2]),
            (5, ExtensionKind::Dihedral, None, vec![1, 4], vec![0, 3]),
        ];
        for (n, kind, y, t1, t2) in cases {
            let h = FiniteAbelianGroup::cyclic(n).unwrap();
            let y = y.map(|v| h.element(&[v]).unwrap());
            let ext =
                CayleyOverExtension::new(h.clone(), kind, y, els(&h, &t1), els(&h, &t2)).unwrap();
            let cay = ext.cayley_adjacency();
            assert_eq!(cay, cay.transpose());
            let (sc, psi) = from_cayley(&ext).unwrap();
            let p = psi.permutation_matrix();
            assert_eq!(p.transpose() * cay * &p, sc.adjacency());
            assert_eq!(sc.sets().s, els(&h, &t2));
            assert_eq!(sc.sets().r, els(&h, &t1));
        }
    }
}
