//! Test fixtures that deliberately step outside the model hypotheses.

use crate::NoiseMap;
use spectral_core::{Scalar, SpectralField, SpectralGrid};

/// State-independent noise: G_j(u) ≡ g_j.
///
/// This *violates* the vanishing-at-zero hypothesis on purpose — additive
/// noise turns the frozen-coefficient equations into per-mode
/// Ornstein–Uhlenbeck recursions with closed forms, which integration tests
/// use as independent oracles. Its Lipschitz constant is honestly 0 (the map
/// is constant), so it also exercises degenerate-bound paths. Not for
/// production configurations.
pub struct ConstantG<T: Scalar> {
    fields: Vec<SpectralField<T>>,
}

impl<T: Scalar> ConstantG<T> {
    pub fn new(fields: Vec<SpectralField<T>>) -> Self {
        assert!(!fields.is_empty(), "at least one noise channel");
        Self { fields }
    }
}

impl<T: Scalar> NoiseMap<T> for ConstantG<T> {
    fn channels(&self) -> usize {
        self.fields.len()
    }

    fn eval_g(
        &self,
        _grid: &SpectralGrid<T>,
        _u: &SpectralField<T>,
        _t: T,
    ) -> Vec<SpectralField<T>> {
        self.fields.clone()
    }

    fn lipschitz_c3(&self) -> T {
        T::zero()
    }

    fn name(&self) -> &'static str {
        "constant-test-noise"
    }
}
