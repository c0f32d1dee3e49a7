//! Finite abelian groups given as a direct sum of cyclic factors, and their
//! characters.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::root_of_unity;

/// `Z_{n_1} ⊕ ... ⊕ Z_{n_r}` for an explicit, ordered factor list.
///
/// No normal form is computed: `[2, 3]` and `[6]` are different inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct FiniteAbelianGroup {
    factors: Vec<u32>,
    order: usize,
    /// lcm of the factors; every character value is an `exponent`-th root
    /// of unity.
    exponent: u64,
}

/// A residue vector, always reduced into `[0, n_s)` per factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<u32>);

/// A complex number of modulus one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitComplex(Complex64);

impl UnitComplex {
    pub fn new(value: Complex64, tol: f64) -> Result<Self> {
        if (value.norm() - 1.0).abs() > tol {
            return Err(Error::Precondition(format!(
                "{value} is not of modulus one (tolerance {tol:e})"
            )));
        }
        Ok(UnitComplex(value))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl From<UnitComplex> for Complex64 {
    fn from(u: UnitComplex) -> Complex64 {
        u.0
    }
}

impl GroupElement {
    pub fn residues(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Structural("group needs at least one factor".into()));
        }
        if let Some(&bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::Structural(format!(
                "cyclic factor {bad} is smaller than 2"
            )));
        }
        let mut order: usize = 1;
        let mut exponent: u64 = 1;
        for &n in &factors {
            order = order
                .checked_mul(n as usize)
                .ok_or_else(|| Error::Structural("group order overflows".into()))?;
            exponent = exponent / gcd(exponent, n as u64) * n as u64;
        }
        Ok(Self {
            factors,
            order,
            exponent,
        })
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: u32) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Builds an element from arbitrary integers, reducing each modulo its
    /// factor.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.rank() {
            return Err(Error::Structural(format!(
                "element has {} residues, group {:?} has {} factors",
                residues.len(),
                self.factors,
                self.rank()
            )));
        }
        Ok(GroupElement(
            residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &n)| r.rem_euclid(n as i64) as u32)
                .collect(),
        ))
    }

    /// Checks that an element was produced for this group.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if g.0.len() != self.rank() {
            return Err(Error::Structural(format!(
                "element {g} has {} residues, group {:?} has {} factors",
                g.0.len(),
                self.factors,
                self.rank()
            )));
        }
        if g.0.iter().zip(&self.factors).any(|(&r, &n)| r >= n) {
            return Err(Error::Structural(format!(
                "element {g} is not reduced for group {:?}",
                self.factors
            )));
        }
        Ok(())
    }

    /// Position of `g` in [`elements`](Self::elements) order (mixed radix,
    /// last factor varying fastest).
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.0.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&r, &n)| acc * n as usize + r as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut residues = vec![0u32; self.rank()];
        for (slot, &n) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = (index % n as usize) as u32;
            index /= n as usize;
        }
        GroupElement(residues)
    }

    /// All elements in lexicographic order of their residue vectors.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.add_unchecked(g, h))
    }

    pub(crate) fn add_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        GroupElement(
            g.0.iter()
                .zip(&h.0)
                .zip(&self.factors)
                .map(|((&a, &b), &n)| ((a as u64 + b as u64) % n as u64) as u32)
                .collect(),
        )
    }

    /// `h - g`, i.e. `g^{-1} h` in multiplicative notation.
    pub(crate) fn difference(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.add_unchecked(&self.inverse(g), h)
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        GroupElement(
            g.0.iter()
                .zip(&self.factors)
                .map(|(&a, &n)| (n - a) % n)
                .collect(),
        )
    }

    /// Least `k >= 1` with `k·g = 0`: the lcm of `n_s / gcd(g_s, n_s)`.
    pub fn order_of(&self, g: &GroupElement) -> u64 {
        g.0.iter().zip(&self.factors).fold(1u64, |acc, (&a, &n)| {
            let comp = n as u64 / gcd(a as u64, n as u64);
            acc / gcd(acc, comp) * comp
        })
    }

    /// Exponent `k` such that `χ_z(g) = exp(2πi·k/exponent)`.
    fn character_turns(&self, z: &GroupElement, g: &GroupElement) -> u64 {
        let e = self.exponent;
        z.0.iter()
            .zip(&g.0)
            .zip(&self.factors)
            .fold(0u64, |acc, ((&zs, &gs), &n)| {
                let n = n as u64;
                let k = (zs as u64 * gs as u64) % n;
                (acc + k * (e / n)) % e
            })
    }

    /// `χ_z(g) = Π_s exp(2πi·z_s g_s / n_s)`, with the combined phase reduced
    /// exactly before evaluation.
    pub fn character(&self, z: &GroupElement, g: &GroupElement) -> Result<UnitComplex> {
        self.check(z)?;
        self.check(g)?;
        Ok(UnitComplex(self.chi(z, g)))
    }

    pub(crate) fn chi(&self, z: &GroupElement, g: &GroupElement) -> Complex64 {
        root_of_unity(self.character_turns(z, g), self.exponent)
    }

    /// `χ_z(X) = Σ_{x ∈ X} χ_z(x)`. Duplicate members are rejected.
    pub fn character_sum(&self, z: &GroupElement, subset: &[GroupElement]) -> Result<Complex64> {
        self.check(z)?;
        let mut seen = vec![false; self.order];
        let mut sum = Complex64::new(0.0, 0.0);
        for x in subset {
            self.check(x)?;
            let i = self.index_of(x);
            if seen[i] {
                return Err(Error::validation(
                    "subset",
                    format!("duplicate element {x}"),
                ));
            }
            seen[i] = true;
            sum += self.chi(z, x);
        }
        Ok(sum)
    }

    /// Elements of order exactly two.
    pub fn involutions(&self) -> Vec<GroupElement> {
        self.elements().filter(|g| self.order_of(g) == 2).collect()
    }
}

impl TryFrom<Vec<u32>> for FiniteAbelianGroup {
    type Error = Error;

    fn try_from(factors: Vec<u32>) -> Result<Self> {
        Self::new(factors)
    }
}

impl From<FiniteAbelianGroup> for Vec<u32> {
    fn from(g: FiniteAbelianGroup) -> Vec<u32> {
        g.factors
    }
}
