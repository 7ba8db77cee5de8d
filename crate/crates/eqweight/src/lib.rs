//! Equivariant weight spectral sequences over GF(2).
//!
//! The crate is layered bottom-up:
//!
//! - [`gf2`]: bit-packed matrices, subspaces in reduced echelon form, subquotients.
//! - [`complex`]: bounded (co)chain complexes, homology, duals, tensor products.
//! - [`group`]: finite groups by multiplication table, modules and G-complexes.
//! - [`resolution`]: bar, periodic and tensor resolutions, and lifting of chain maps.
//! - [`filtration`]: filtered complexes and the spectral-sequence engine.
//! - [`equivariant`]: the L-complex `Hom_G(F, K)` and its filtrations.
//! - [`products`]: Künneth, cup and cap products on pages, and identity checks.
//! - [`spaces`]: simplicial G-sets and the builtin models.
//!
//! Everything uses the row-vector convention: a matrix with `r` rows and `c`
//! columns is the map `GF(2)^r → GF(2)^c`, `v ↦ v·m`.

pub mod complex;
pub mod equivariant;
pub mod error;
pub mod filtration;
pub mod gf2;
pub mod group;
pub mod par;
pub mod products;
pub mod resolution;
pub mod spaces;

pub use error::{Error, Result};
