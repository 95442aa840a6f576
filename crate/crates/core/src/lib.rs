//! Exact-arithmetic toolkit for finite-dimensional operator algebras and the
//! order-theoretic machinery around them: canonical *-subalgebra spans,
//! context posets with Galois adjoints, Alexandrov frames, Kan extensions,
//! discrete causal geometry, nets of algebras with locality checkers,
//! Gelfand spectrum bundles with Kochen-Specker search, and the descent
//! analysis that ties net locality to adjoint existence.
//!
//! Everything is computed over the Gaussian rationals, so every reported
//! verdict is a decision, not an approximation.

pub mod algebra;
pub mod bits;
pub mod descent;
pub mod error;
pub mod fragment;
pub mod frame;
pub mod geometry;
pub mod matrix;
pub mod net;
pub mod poset;
pub mod presheaf;
pub mod scalar;
pub mod span;
pub mod spectral;
pub mod spectrum;

pub use algebra::{span_close, Character, StarAlgebra};
pub use descent::{Classification, CoverInstance, DescentEngine, DescentReport};
pub use error::{Error, Result};
pub use fragment::{build_fragment, partition_contexts, ContextFragment};
pub use geometry::{Diamond, GridRegion, GridShape, Interval};
pub use matrix::ExactMatrix;
pub use net::{constant_net, majorana_chain, spin_chain, trivial_bulk_net, Net};
pub use poset::{
    fibered_product, is_order_embedding, left_adjoint, right_adjoint, unit_is_identity,
    FiberedProduct, FinitePoset, MonotoneMap,
};
pub use scalar::{ExactScalar, Rational};
pub use spectrum::{KsOutcome, QuantumState, SpectrumBundle};
