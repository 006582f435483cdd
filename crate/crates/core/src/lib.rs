//! Numerical toolkit for Ulam floating bodies, weighted floating bodies, and
//! affine surface area limits of convex bodies.

pub mod asa;
pub mod bodies;
pub mod calculus;
pub mod caps;
pub mod error;
pub mod floating;
pub mod floatsim;
pub mod geometry;
pub mod quadrature;
pub mod special;
pub mod sphere;
pub mod weights;

pub use bodies::{BodyHandle, BodySpec, Direction, Point};
pub use error::{Error, Result};
