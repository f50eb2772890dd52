//! End-to-end pipeline for an exactly overlapping IFS: overlaps, breakpoints,
//! Markov partition, S and S′, dim K and dim U.

use serde::Serialize;
use thiserror::Error;

use crate::dimension::{dimension_report, DimError, SpectralResult};
use crate::exactnum::FieldElement;
use crate::ifs_core::{detect_exact_overlaps, endpoint_orbits, Ifs, IfsError, OverlapReport, DEFAULT_MAX_STEPS, DEFAULT_OVERLAP_DEPTH};
use crate::markov::{
    adjacency, build_partition, check_osc, prune_switch, weighted_graph, AdjacencyMatrix, MapChoice, MarkovError, MarkovPartition,
    SwitchPruned,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Dim(#[from] DimError),
}

impl AnalysisError {
    /// Failures of a hypothesis rather than of the input.
    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(
            self,
            AnalysisError::Ifs(IfsError::OrbitNotPeriodic(..))
                | AnalysisError::Ifs(IfsError::UnresolvedOverlap(..))
                | AnalysisError::Ifs(IfsError::ExplosionGuard(..))
                | AnalysisError::Markov(_)
                | AnalysisError::Dim(DimError::NoSolution)
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IfsOptions {
    pub overlap_depth: usize,
    pub max_steps: usize,
}

impl Default for IfsOptions {
    fn default() -> Self {
        IfsOptions { overlap_depth: DEFAULT_OVERLAP_DEPTH, max_steps: DEFAULT_MAX_STEPS }
    }
}

#[derive(Debug, Clone)]
pub struct IfsAnalysis {
    pub overlaps: OverlapReport,
    pub breakpoints: Vec<FieldElement>,
    pub partition: MarkovPartition,
    pub s: AdjacencyMatrix,
    pub s_prime: SwitchPruned,
    pub osc: bool,
    pub dim_k: SpectralResult,
    pub dim_u: SpectralResult,
}

pub fn analyze_ifs(ifs: &Ifs, opts: &IfsOptions) -> Result<IfsAnalysis, AnalysisError> {
    let overlaps = detect_exact_overlaps(ifs, opts.overlap_depth)?;
    let (breakpoints, _) = endpoint_orbits(ifs, opts.max_steps)?;
    let partition = build_partition(ifs, &breakpoints, &overlaps.regions(), MapChoice::Lazy)?;
    let s = adjacency(&partition);
    let s_prime = prune_switch(&partition.switch_blocks, &s)?;
    let all: Vec<usize> = (0..s.size()).collect();
    let osc = check_osc(ifs, &partition, &s, &all);
    let k_graph = weighted_graph(ifs, &s);
    let u_graph = k_graph.restrict(&s_prime.principal_index);
    let (dim_k, dim_u) = dimension_report(&k_graph, &u_graph)?;
    Ok(IfsAnalysis { overlaps, breakpoints, partition, s, s_prime, osc, dim_k, dim_u })
}
