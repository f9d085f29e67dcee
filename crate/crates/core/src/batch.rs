//! Batch operations over many independent derivations. With the `parallel`
//! feature (on by default) the plain functions fan out over rayon's pool;
//! the `_seq` variants always run on the calling thread.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::analysis::{bars, AnalysisError, Bar};
use crate::calculus::CalculusSpec;
use crate::derivation::{check, CheckReport, Derivation};
use crate::rewrite::{normalize, Normalized, RewriteError};

pub type NormalizeResult = Result<Normalized, RewriteError>;

macro_rules! fan_out {
    ($items:expr, $f:expr) => {{
        #[cfg(feature = "parallel")]
        let out = $items.par_iter().map($f).collect();
        #[cfg(not(feature = "parallel"))]
        let out = $items.iter().map($f).collect();
        out
    }};
}

pub fn check_all(ds: &[Derivation], spec: &CalculusSpec) -> Vec<CheckReport> {
    fan_out!(ds, |d| check(d, spec))
}

pub fn check_all_seq(ds: &[Derivation], spec: &CalculusSpec) -> Vec<CheckReport> {
    ds.iter().map(|d| check(d, spec)).collect()
}

pub fn normalize_all(ds: &[Derivation], include_mediate: bool, budget: usize) -> Vec<NormalizeResult> {
    fan_out!(ds, |d| normalize(d, include_mediate, budget))
}

pub fn normalize_all_seq(ds: &[Derivation], include_mediate: bool, budget: usize) -> Vec<NormalizeResult> {
    ds.iter().map(|d| normalize(d, include_mediate, budget)).collect()
}

pub fn bars_all(ds: &[Derivation]) -> Vec<Result<Vec<Bar>, AnalysisError>> {
    fan_out!(ds, bars)
}

pub fn bars_all_seq(ds: &[Derivation]) -> Vec<Result<Vec<Bar>, AnalysisError>> {
    ds.iter().map(bars).collect()
}

/// Whether the parallel code path is compiled in.
pub const PARALLEL: bool = cfg!(feature = "parallel");
