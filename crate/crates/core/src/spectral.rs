//! Closed-form spectral data of `SC(G, R, L, S)` and the quantum-walk
//! transition matrix `H(t) = exp(itA)`.
//!
//! Every character `χ_z` contributes a two-dimensional invariant subspace
//! spanned by `(χ_z(-g))_g` on each orbit. On that subspace the adjacency
//! acts as the 2×2 matrix
//!
//! ```text
//! [ χ_z(R)        conj(χ_z(S)) ]
//! [ χ_z(S)        χ_z(L)       ]
//! ```
//!
//! whose eigenpairs give `λ_z^±` and the eigenvector weights `(a, b)`.
//! From those come the orbit weights `c = |a|²/N`, `d = |b|²/N` and the
//! coupling `e = a·conj(b)/N`, `N = |a|² + |b|²`.
//!
//! With the spoke rule `(g,0) ~ (g+s,1)` the coupling works out to
//! `e_z^± = ±conj(χ_z(S)) / sqrt(x_z² + 4|χ_z(S)|²)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Orbit, SemiCayleyGraph, Vertex};
use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::time::Time;
use crate::tolerance::Tolerances;

/// Default cap on `2n` for the dense exponential oracle.
pub const ORACLE_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn both() -> [Branch; 2] {
        [Branch::Plus, Branch::Minus]
    }
}

/// Spectral data attached to one character `χ_z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mode {
    pub z: GroupElement,
    pub chi_r: f64,
    pub chi_l: f64,
    #[serde(skip)]
    pub chi_s: Complex64,
    /// `χ_z(R) - χ_z(L)`.
    pub x: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub d_plus: f64,
    pub d_minus: f64,
    #[serde(skip)]
    pub e_plus: Complex64,
    #[serde(skip)]
    pub e_minus: Complex64,
    pub in_x: bool,
    #[serde(skip)]
    weights: [(Complex64, Complex64); 2],
}

impl Mode {
    fn new(z: GroupElement, chi_r: f64, chi_l: f64, chi_s: Complex64, zero_tol: f64) -> Self {
        let x = chi_r - chi_l;
        let s2 = chi_s.norm_sqr();
        let in_x = chi_s.norm() <= zero_tol;
        let (lambda_plus, lambda_minus, weights) = if in_x {
            // The two eigenvectors live on single orbits: (1,0) carries
            // χ_z(R), (0,1) carries χ_z(L).
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            (chi_r, chi_l, [(one, zero), (zero, one)])
        } else {
            let root = (x * x + 4.0 * s2).sqrt();
            // b^± = (-x ± root)/2, evaluated without cancellation.
            let b_plus = if x > 0.0 {
                2.0 * s2 / (root + x)
            } else {
                (root - x) / 2.0
            };
            let b_minus = if x < 0.0 {
                -2.0 * s2 / (root - x)
            } else {
                -(root + x) / 2.0
            };
            let a = chi_s.conj();
            (
                (chi_r + chi_l + root) / 2.0,
                (chi_r + chi_l - root) / 2.0,
                [
                    (a, Complex64::new(b_plus, 0.0)),
                    (a, Complex64::new(b_minus, 0.0)),
                ],
            )
        };
        let coeffs = |(a, b): (Complex64, Complex64)| {
            let norm = a.norm_sqr() + b.norm_sqr();
            (
                a.norm_sqr() / norm,
                b.norm_sqr() / norm,
                a * b.conj() / norm,
            )
        };
        let (c_plus, d_plus, e_plus) = coeffs(weights[0]);
        let (c_minus, d_minus, e_minus) = coeffs(weights[1]);
        Self {
            z,
            chi_r,
            chi_l,
            chi_s,
            x,
            lambda_plus,
            lambda_minus,
            c_plus,
            c_minus,
            d_plus,
            d_minus,
            e_plus,
            e_minus,
            in_x,
            weights,
        }
    }

    pub fn lambda(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.lambda_plus,
            Branch::Minus => self.lambda_minus,
        }
    }

    /// Eigenvector weights `(a, b)` on orbit 0 and orbit 1.
    pub fn weights(&self, branch: Branch) -> (Complex64, Complex64) {
        match branch {
            Branch::Plus => self.weights[0],
            Branch::Minus => self.weights[1],
        }
    }

    /// Weights entering `H(t)_{(g,r),(h,s)}` for the orbit pair `(r, s)`.
    fn block_weights(&self, r: Orbit, s: Orbit) -> (Complex64, Complex64) {
        let re = |x: f64| Complex64::new(x, 0.0);
        match (r, s) {
            (Orbit::Right, Orbit::Right) => (re(self.c_plus), re(self.c_minus)),
            (Orbit::Left, Orbit::Left) => (re(self.d_plus), re(self.d_minus)),
            (Orbit::Right, Orbit::Left) => (self.e_plus, self.e_minus),
            (Orbit::Left, Orbit::Right) => (self.e_plus.conj(), self.e_minus.conj()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    group: FiniteAbelianGroup,
    modes: Vec<Mode>,
    tol: Tolerances,
}

/// A rank-one projector `ξ ξ^H` labelled by `(z, ±)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenprojector {
    pub z: GroupElement,
    pub branch: Branch,
    pub matrix: DMatrix<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub time: Time,
    pub matrix: DMatrix<Complex64>,
}

impl TransitionMatrix {
    /// `max |H H^H - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let m = self.matrix.nrows();
        let prod = &self.matrix * self.matrix.adjoint();
        max_abs(&(prod - DMatrix::<Complex64>::identity(m, m)))
    }

    /// `max |H - Hᵀ|`.
    pub fn symmetry_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.transpose()))
    }

    pub fn max_abs_diff(&self, other: &TransitionMatrix) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Computes `λ_z^±`, `c`, `d`, `e` and X-membership for every `z ∈ G`.
pub fn compute_spectral_data(graph: &SemiCayleyGraph, tol: &Tolerances) -> SpectralData {
    let modes = graph
        .group()
        .elements()
        .map(|z| {
            let (r, l, s) = (graph.chi_r(&z), graph.chi_l(&z), graph.chi_s(&z));
            Mode::new(z, r, l, s, tol.zero)
        })
        .collect();
    SpectralData {
        group: graph.group().clone(),
        modes,
        tol: *tol,
    }
}

impl SpectralData {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Modes in group-enumeration order.
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode(&self, z: &GroupElement) -> &Mode {
        &self.modes[self.group.index_of(z)]
    }

    pub fn n(&self) -> usize {
        self.group.order()
    }

    /// All `2n` eigenvalues, sorted ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .modes
            .iter()
            .flat_map(|m| [m.lambda_plus, m.lambda_minus])
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn x_set(&self) -> Vec<GroupElement> {
        self.modes
            .iter()
            .filter(|m| m.in_x)
            .map(|m| m.z.clone())
            .collect()
    }

    /// `exp(i·t·λ)`, exact for rational times and integral `λ`.
    pub fn phase(&self, lambda: f64, time: &Time) -> Complex64 {
        time.phase(lambda, self.tol.integrality)
    }

    /// Unit eigenvector `ξ_z^±` in vertex-index order.
    pub fn eigenvector(&self, z: &GroupElement, branch: Branch) -> DVector<Complex64> {
        let mode = self.mode(z);
        let (a, b) = mode.weights(branch);
        let n = self.n();
        let scale = 1.0 / (n as f64 * (a.norm_sqr() + b.norm_sqr())).sqrt();
        let mut v = DVector::zeros(2 * n);
        for (i, g) in self.group.elements().enumerate() {
            let chi = self.group.chi(z, &self.group.inverse(&g));
            v[i] = a * chi * scale;
            v[n + i] = b * chi * scale;
        }
        v
    }

    pub fn eigenprojector(&self, z: &GroupElement, branch: Branch) -> Eigenprojector {
        let v = self.eigenvector(z, branch);
        Eigenprojector {
            z: z.clone(),
            branch,
            matrix: &v * v.adjoint(),
        }
    }

    /// All `2n` projectors, labelled by `(z, ±)`.
    pub fn eigenprojectors(&self) -> Vec<Eigenprojector> {
        self.modes
            .iter()
            .flat_map(|m| Branch::both().map(|b| self.eigenprojector(&m.z, b)))
            .collect()
    }

    /// One entry of `H(t)`, summed over characters without building any
    /// matrix.
    pub fn transition_entry(&self, u: &Vertex, v: &Vertex, time: &Time) -> Complex64 {
        let d = self.group.difference(&u.element, &v.element);
        self.kernel_entry(u.orbit, v.orbit, &d, time)
    }

    fn kernel_entry(&self, r: Orbit, s: Orbit, d: &GroupElement, time: &Time) -> Complex64 {
        let sum: Complex64 = self
            .modes
            .iter()
            .map(|m| {
                let (wp, wm) = m.block_weights(r, s);
                let mut acc = Complex64::new(0.0, 0.0);
                if wp != Complex64::new(0.0, 0.0) {
                    acc += wp * self.phase(m.lambda_plus, time);
                }
                if wm != Complex64::new(0.0, 0.0) {
                    acc += wm * self.phase(m.lambda_minus, time);
                }
                acc * self.group.chi(&m.z, d)
            })
            .sum();
        sum / self.n() as f64
    }

    /// The full row `H(t)_{u, ·}` in vertex-index order.
    pub fn transition_row(&self, u: &Vertex, time: &Time) -> Vec<Complex64> {
        Orbit::both()
            .into_iter()
            .flat_map(|o| {
                self.group
                    .elements()
                    .map(move |h| self.transition_entry(u, &Vertex::new(h, o), time))
            })
            .collect()
    }

    /// `H(t)`, using translation invariance: each of the four blocks is a
    /// function of `h - g` only.
    pub fn transition_matrix(&self, time: &Time) -> TransitionMatrix {
        let n = self.n();
        let diffs: Vec<GroupElement> = self.group.elements().collect();
        let mut kernels = [[vec![], vec![]], [vec![], vec![]]];
        for r in Orbit::both() {
            for s in Orbit::both() {
                kernels[r.index()][s.index()] = diffs
                    .iter()
                    .map(|d| self.kernel_entry(r, s, d, time))
                    .collect::<Vec<_>>();
            }
        }
        let elements: Vec<GroupElement> = self.group.elements().collect();
        let matrix = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let (r, s) = (i / n, j / n);
            let d = self.group.difference(&elements[i % n], &elements[j % n]);
            kernels[r][s][self.group.index_of(&d)]
        });
        TransitionMatrix {
            time: *time,
            matrix,
        }
    }

    /// `Σ_z Σ_± exp(itλ_z^±) E_z^±`, from materialized projectors.
    pub fn transition_from_projectors(&self, time: &Time) -> TransitionMatrix {
        let m = 2 * self.n();
        let mut h = DMatrix::zeros(m, m);
        for p in self.eigenprojectors() {
            let lambda = self.mode(&p.z).lambda(p.branch);
            h += p.matrix * self.phase(lambda, time);
        }
        TransitionMatrix {
            time: *time,
            matrix: h,
        }
    }
}

fn check_cap(graph: &SemiCayleyGraph, cap: usize) -> Result<()> {
    if graph.vertex_count() > cap {
        return Err(Error::SizeCap {
            what: "vertex count for the dense oracle",
            actual: graph.vertex_count(),
            cap,
        });
    }
    Ok(())
}

/// Eigenvalues of the adjacency matrix from a dense symmetric solver,
/// sorted ascending.
pub fn dense_eigenvalues(graph: &SemiCayleyGraph, cap: usize) -> Result<Vec<f64>> {
    check_cap(graph, cap)?;
    let eig = SymmetricEigen::new(graph.adjacency());
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `exp(itA)` via a dense eigendecomposition `A = V diag(λ) Vᵀ`.
/// Independent of the closed form: uses only the adjacency matrix.
pub fn transition_oracle(
    graph: &SemiCayleyGraph,
    time: &Time,
    cap: usize,
) -> Result<TransitionMatrix> {
    check_cap(graph, cap)?;
    let eig = SymmetricEigen::new(graph.adjacency());
    let t = time.t();
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, t * l)),
    ));
    Ok(TransitionMatrix {
        time: *time,
        matrix: &v * phases * v.transpose(),
    })
}
