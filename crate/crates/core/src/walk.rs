use crate::error::Result;
use crate::graph::{SemiCayleyGraph, Vertex};
use crate::spectral::{compute_spectral_data, transition_oracle, SpectralData, TransitionMatrix};
use crate::time::Time;
use crate::tolerance::Tolerances;

/// A semi-Cayley graph together with its closed-form spectral data.
#[derive(Debug, Clone)]
pub struct Walk {
    graph: SemiCayleyGraph,
    spectral: SpectralData,
    oracle_cap: usize,
}

impl Walk {
    pub fn new(graph: SemiCayleyGraph, tol: Tolerances) -> Self {
        let spectral = compute_spectral_data(&graph, &tol);
        Self {
            graph,
            spectral,
            oracle_cap: crate::spectral::ORACLE_CAP,
        }
    }

    pub fn with_oracle_cap(mut self, cap: usize) -> Self {
        self.oracle_cap = cap;
        self
    }

    pub fn graph(&self) -> &SemiCayleyGraph {
        &self.graph
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    pub fn tol(&self) -> &Tolerances {
        self.spectral.tolerances()
    }

    pub fn oracle_cap(&self) -> usize {
        self.oracle_cap
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn oracle(&self, time: &Time) -> Result<TransitionMatrix> {
        transition_oracle(&self.graph, time, self.oracle_cap)
    }

    /// The vertex `(0, orbit)` used as the source of every search; other
    /// sources follow by translation.
    pub fn base_vertex(&self, orbit: crate::graph::Orbit) -> Vertex {
        Vertex::new(self.graph.group().identity(), orbit)
    }
}
