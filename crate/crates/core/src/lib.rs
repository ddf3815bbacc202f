//! Lifting layers: activation functions that map a scalar (or a point) to a
//! sparse convex combination of knot indicators.
//!
//! A lifting followed by a linear map is a continuous piecewise linear
//! function, so fitting through a lifting layer is a convex least-squares
//! problem. The crate provides:
//!
//! - [`lifting`]: scalar, scaled and reduced liftings and their inverses
//! - [`simplex`]: vector-valued lifting through barycentric coordinates on
//!   simplicial meshes, Kuhn grid triangulations and mesh files
//! - [`spline`]: least-squares and least-absolute-deviation spline fits
//! - [`output_lifting`]: convex robust regression by lifting the output space
//! - [`nn`]: a small network engine with dense, ReLU, maxout and lifting layers
//! - [`experiments`] and [`cli`]: seeded synthetic experiments
//!
//! ```
//! use lifting_layers::lifting::{inverse_lift, lift, KnotSequence};
//!
//! let knots = KnotSequence::new(vec![0.0, 1.0, 2.0])?;
//! let z = lift(1.5, &knots)?;
//! assert_eq!(z.coeffs(), &[0.0, 0.5, 0.5]);
//! assert_eq!(inverse_lift(&z, &knots)?, 1.5);
//! # Ok::<(), lifting_layers::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod experiments;
pub mod lifting;
pub mod linalg;
pub mod loss;
pub mod nn;
pub mod output_lifting;
pub mod rng;
pub mod simplex;
pub mod spline;

pub use error::{Error, Result};
