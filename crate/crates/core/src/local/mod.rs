//! p-adic and real invariants of quadratic spaces and lattices.

pub mod hilbert;
pub mod invariants;
pub mod jordan;
pub mod place;

pub use hilbert::{hasse_invariant, hilbert_symbol, is_local_square};
pub use invariants::{complement_invariants_at, is_isotropic, space_invariants, space_invariants_at, space_represents, SpaceInvariants};
pub use jordan::{jordan_decomposition, JordanComponent, JordanSplitting};
pub use place::Place;

pub use crate::arith::ord_p;
