//! Exact-arithmetic library for constructing, enumerating and analysing
//! finite monoids generated by projections (idempotent linear maps of
//! nullity 1) on low-dimensional vector spaces.

pub mod analysis;
pub mod catalog;
pub mod classify;
pub mod cli;
pub mod descriptor;
pub mod error;
pub mod fields;
mod frames;
pub mod linalg;
pub mod monoid;
pub mod normalizer;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{make_field, order_of_unity, unity_subgroup_order, Field, FieldSpec, Scalar};
pub use linalg::{
    affine_kernel, classify_map, image_space, kernel_line, linear_part, prj, AffineMap, MapClass,
    Matrix, Subspace,
};
pub use monoid::{
    close, close_affine, dual, embeds, equivalent, units_and_projection_part, MonoidHandle,
};

