//! Recorded solver output: norm histories at every node, fields on demand.

use spectral_core::{Scalar, SpectralField, SpectralGrid};

/// How much state a solver keeps while integrating.
///
/// The `V`- and `W`-norm histories are always recorded at every node; the
/// policy only governs which full spectral fields are retained.  Node `0`
/// and the final node are always kept when any fields are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordPolicy {
    /// Keep no fields except the final state.
    NormsOnly,
    /// Keep the field at node `0`, every `stride`-th node, and the final node.
    Stride(usize),
    /// Keep the field at every node (needed to freeze a base trajectory).
    EveryNode,
}

impl RecordPolicy {
    fn keeps(&self, node: usize, n_steps: usize) -> bool {
        match *self {
            RecordPolicy::NormsOnly => node == n_steps,
            RecordPolicy::Stride(s) => node == 0 || node == n_steps || (s > 0 && node % s == 0),
            RecordPolicy::EveryNode => true,
        }
    }
}

/// Which evolution equation produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationKind {
    /// The stochastic primal equation at intensity `epsilon` (deterministic
    /// limit when `epsilon = 0` and the path is zero).
    Primal,
    /// The deterministic limit integrated with the two-stage scheme.
    Deterministic,
    /// The linearized Gaussian fluctuation equation.
    CltLinearization,
    /// The moderate-deviation rescaled deviation equation.
    ModerateDeviation,
    /// The controlled moderate-deviation equation.
    ControlledModerate,
    /// The deterministic controlled limit (skeleton) equation.
    Skeleton,
}

impl EquationKind {
    /// Stable lowercase label used in file output.
    pub fn label(&self) -> &'static str {
        match self {
            EquationKind::Primal => "primal",
            EquationKind::Deterministic => "deterministic",
            EquationKind::CltLinearization => "clt-linearization",
            EquationKind::ModerateDeviation => "moderate-deviation",
            EquationKind::ControlledModerate => "controlled-moderate",
            EquationKind::Skeleton => "skeleton",
        }
    }
}

/// Provenance attached to a trajectory: the equation it solves and the
/// scalings and seed that parameterized the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMeta<T: Scalar> {
    pub equation: EquationKind,
    pub epsilon: Option<T>,
    pub lambda: Option<T>,
    pub seed: Option<u64>,
}

/// Time-indexed solver output.
///
/// `times`, `norm_v` and `norm_w` have one entry per node (`n_steps + 1`);
/// entry `0` describes the initial state.  `fields` holds the retained
/// spectral states as `(node, field)` pairs in increasing node order.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Scalar> {
    pub times: Vec<T>,
    pub norm_v: Vec<T>,
    pub norm_w: Vec<T>,
    pub fields: Vec<(usize, SpectralField<T>)>,
    pub meta: TrajectoryMeta<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub(crate) fn new(n_steps: usize, meta: TrajectoryMeta<T>) -> Self {
        Self {
            times: Vec::with_capacity(n_steps + 1),
            norm_v: Vec::with_capacity(n_steps + 1),
            norm_w: Vec::with_capacity(n_steps + 1),
            fields: Vec::new(),
            meta,
        }
    }

    pub(crate) fn record(
        &mut self,
        grid: &SpectralGrid<T>,
        node: usize,
        n_steps: usize,
        time: T,
        state: &SpectralField<T>,
        policy: RecordPolicy,
    ) {
        self.times.push(time);
        self.norm_v.push(grid.norm_v(state));
        self.norm_w.push(grid.norm_w(state));
        if policy.keeps(node, n_steps) {
            self.fields.push((node, state.clone()));
        }
    }

    /// Number of nodes recorded so far.
    pub fn n_nodes(&self) -> usize {
        self.times.len()
    }

    /// Largest `V`-norm over all nodes.
    pub fn sup_norm_v(&self) -> T {
        self.norm_v.iter().copied().fold(T::zero(), T::max)
    }

    /// Largest `W`-norm over all nodes.
    pub fn sup_norm_w(&self) -> T {
        self.norm_w.iter().copied().fold(T::zero(), T::max)
    }

    /// The retained field at `node`, if the recording policy kept it.
    pub fn field_at(&self, node: usize) -> Option<&SpectralField<T>> {
        self.fields
            .binary_search_by_key(&node, |(n, _)| *n)
            .ok()
            .map(|i| &self.fields[i].1)
    }

    /// The final state (always retained).
    pub fn final_field(&self) -> &SpectralField<T> {
        &self
            .fields
            .last()
            .expect("every completed trajectory retains its final state")
            .1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_keeps_endpoints() {
        assert!(RecordPolicy::NormsOnly.keeps(10, 10));
        assert!(!RecordPolicy::NormsOnly.keeps(0, 10));
        assert!(RecordPolicy::Stride(4).keeps(0, 10));
        assert!(RecordPolicy::Stride(4).keeps(4, 10));
        assert!(!RecordPolicy::Stride(4).keeps(5, 10));
        assert!(RecordPolicy::Stride(4).keeps(10, 10));
        assert!(RecordPolicy::EveryNode.keeps(3, 10));
    }
}
