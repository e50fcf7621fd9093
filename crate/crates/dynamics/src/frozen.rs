//! Per-node caches of a frozen base trajectory.
//!
//! The linearized, moderate-deviation and skeleton equations all transport
//! their unknown along a fixed base solution.  Evaluating that transport
//! needs the base state both spectrally (for the coefficient maps) and on
//! the collocation grid (for the convective products).  This cache computes
//! both once per node so that ensembles of linearized solves can share them
//! read-only across samples.

use crate::error::DynamicsError;
use crate::trajectory::Trajectory;
use spectral_core::{physical_cache, PhysicalCache, Scalar, SpectralField, SpectralGrid};

/// A base trajectory frozen for use as linearization data: the spectral
/// state and its collocation-grid cache at every time node.
pub struct FrozenBase<T: Scalar> {
    fields: Vec<SpectralField<T>>,
    caches: Vec<PhysicalCache<T>>,
}

impl<T: Scalar> FrozenBase<T> {
    /// Freezes a fully recorded trajectory.  Fails if the trajectory was not
    /// integrated with [`RecordPolicy::EveryNode`](crate::RecordPolicy).
    pub fn new(grid: &SpectralGrid<T>, base: &Trajectory<T>) -> Result<Self, DynamicsError> {
        let n_nodes = base.n_nodes();
        let mut fields = Vec::with_capacity(n_nodes);
        for node in 0..n_nodes {
            match base.field_at(node) {
                Some(f) => fields.push(f.clone()),
                None => return Err(DynamicsError::IncompleteRecording(node)),
            }
        }
        Ok(Self::from_fields(grid, fields))
    }

    /// Freezes an explicit sequence of per-node states.
    pub fn from_fields(grid: &SpectralGrid<T>, fields: Vec<SpectralField<T>>) -> Self {
        let caches = fields.iter().map(|f| physical_cache(grid, f)).collect();
        Self { fields, caches }
    }

    /// The identically-zero base with `n_nodes` nodes (linearization about
    /// the rest state, which reduces every transport term to zero).
    pub fn rest_state(grid: &SpectralGrid<T>, n_nodes: usize) -> Self {
        let fields = vec![grid.zero_field(); n_nodes];
        Self::from_fields(grid, fields)
    }

    /// Number of nodes.
    pub fn n_nodes(&self) -> usize {
        self.fields.len()
    }

    /// Spectral base state at node `n`.
    pub fn field(&self, n: usize) -> &SpectralField<T> {
        &self.fields[n]
    }

    /// Collocation-grid cache of the base state at node `n`.
    pub fn cache(&self, n: usize) -> &PhysicalCache<T> {
        &self.caches[n]
    }

    pub(crate) fn check_length(&self, n_steps: usize) -> Result<(), DynamicsError> {
        if self.n_nodes() < n_steps + 1 {
            return Err(DynamicsError::BaseTrajectoryLength {
                needed: n_steps + 1,
                got: self.n_nodes(),
            });
        }
        Ok(())
    }
}
