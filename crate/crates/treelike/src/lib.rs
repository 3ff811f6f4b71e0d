//! Exact computations on node-colored rooted binary tree structures.
//!
//! The crate enumerates these structures and their amalgamations, computes
//! the measures they carry (classified by n-codes / labeled directed trees,
//! all valued in Z[1/2]), classifies the subclasses closed under
//! substructure and amalgamation, and runs a small engine for the resulting
//! monoidal categories: hom bases, measure-weighted composition, tensor
//! products, traces, and Gram-form semisimplicity evidence.
//!
//! Everything is exact: scalars live in [`dyadic::Dyadic`] and all linear
//! algebra is fraction-free over big integers.

pub mod amalgam;
pub mod category;
pub mod dyadic;
pub mod measure;
pub mod ncode;
pub mod ring;
pub mod subclass;
pub mod tree;
pub mod verify;

pub use dyadic::Dyadic;
pub use tree::{enumerate_structures, Color, ColoredTree, Structure, TreeError};
