//! Arithmetic core for orbital-integral and lattice-counting computations over
//! unramified hermitian spaces of p-adic fields, with truncated relative Witt
//! vectors and Lubin-Tate frames.
#![no_std]
// `len` is a Witt length, never empty; index loops mirror the formulas
#![allow(clippy::len_without_is_empty, clippy::needless_range_loop)]

extern crate alloc;

pub mod error;
pub mod local_rings;
pub mod matrix;
pub mod lattices;
pub mod hermitian;
pub mod exact;
pub mod orbital;
pub mod reductions;
pub mod residue_poly;
pub mod witt_frames;

pub use error::{Error, Result};
