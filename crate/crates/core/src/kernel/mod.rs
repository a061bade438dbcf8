//! Exact and multiprecision arithmetic shared by every other module.

pub mod complex;
pub mod linalg;
pub mod modular;
pub mod mvpoly;
pub mod numfield;
pub mod poly;
pub mod rational;
pub mod roots;

pub use complex::BigComplex;
pub use poly::Poly;
pub use rug::{Float, Integer, Rational};
