//! Finite atomic lattices, LCM lattices of monomial ideals and their
//! coordinatizations, the lattice `L(n)` of atomic lattices on `n` atoms,
//! deformations, and Betti numbers via interval complexes.

pub mod atoms;
pub mod complexes;
pub mod coordinatization;
pub mod deformation;
pub mod field;
pub mod ideals;
pub mod lattice;
pub mod ln;
pub mod registry;
pub mod resolutions;
pub mod sample;

pub use atoms::AtomSet;
pub use complexes::{HomologyProfile, SimplicialComplex};
pub use field::FieldSpec;
pub use ideals::{LabeledLattice, Monomial, MonomialIdeal};
pub use lattice::{ElementRef, FiniteAtomicLattice, LatticeError};
pub use registry::{Named, Registry, UnknownStrategy};
