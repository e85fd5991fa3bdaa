//! Exact computations for stacky tori, quasi-lattices, crossed-module
//! actions on finite groupoids, toric quasifolds and their moment polytopes.

pub mod crossedmod;
pub mod exact;
pub mod fingroupoid;
pub mod io;
pub mod polytope;
pub mod prato;
