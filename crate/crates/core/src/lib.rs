//! Quasi-orthonormal (QOE) and spherical-code categorical encodings.
//!
//! - [`geometry`]: unit-vector sets, validation, generation, code/basis conversion.
//! - [`encoders`]: ordinal, one-hot, binary, baseN, hash, QOE and spherical encoders.
//! - [`qsoftmax`]: softmax/argmax over a vector set, with exact gradients.
//! - [`nn`]: a small MLP classifier trained through a qsoftmax head.
//! - [`dataio`]: MNIST IDX and CSV input/output.
//! - [`plane`]: the two-dimensional softmax pictures.
//!
//! ```
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! use qoc::geometry::{code_to_basis, packs};
//! use qoc::{qargmax, CategoryDictionary, CoordinateMatrix, Encoder, EncodingScheme};
//!
//! let basis = code_to_basis(&packs::four_dim_24())?; // 12 vectors in R^4, max |dot| 0.5
//! let dict = CategoryDictionary::fit(["red", "green", "blue"])?;
//! let enc = Encoder::new(dict, EncodingScheme::Qoe(basis.clone()))?;
//! let v = enc.encode("green")?;
//! assert_eq!(enc.decode(&v)?.label, "green");
//!
//! let q = CoordinateMatrix::from_set(&basis);
//! assert_eq!(qargmax(&v, &q)?, 1);
//! # Ok(())
//! # }
//! ```

#[cfg(feature = "cli")]
pub mod cli;
pub mod dataio;
pub mod encoders;
pub mod geometry;
pub mod nn;
pub mod plane;
pub mod qsoftmax;

pub use encoders::{CategoryDictionary, Encoder, EncodingScheme};
pub use geometry::{SetKind, UnitVectorSet};
pub use qsoftmax::{qargmax, qsoftmax, softmax, CoordinateMatrix, ProbabilityVector};
