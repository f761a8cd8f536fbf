//! Multiplication of very long polynomials over GF(2).
//!
//! The multiplier evaluates both operands at a small set of points in
//! GF(2^m) whose images under repeated squaring tile a full evaluation
//! domain, multiplies pointwise, and interpolates back. The pipeline is:
//!
//! 1. [`poly_basis::basis_cvt`]: monomial basis to the novel polynomial
//!    basis over a Cantor basis (XOR only).
//! 2. [`encode::encode`]: the first `log2(m)` butterfly layers, collapsed
//!    into `m x m` bit-matrix products and truncated to `n/m` outputs.
//! 3. [`fft::lch_butterfly`]: the remaining butterfly layers over GF(2^m).
//! 4. Pointwise products, then the inverse of every step.
//!
//! [`multiplier::fp_polymul`] ties these together; [`multiplier::karatsuba_mul`]
//! is the independent reference.

pub mod bench;
pub mod bitmat;
pub mod bitpoly;
pub mod cantor;
pub mod encode;
mod error;
pub mod fft;
pub mod field;
pub mod multiplier;
pub mod oracle;
pub mod poly_basis;
pub mod selftest;

pub use bitpoly::BitPoly;
pub use cantor::{CantorVec, FieldParams};
pub use encode::{EncodeMatrix, PartitionSpec};
pub use error::{Error, Result};
pub use fft::ButterflyPlan;
pub use field::{BinaryField, FieldWord, Gf128, Gf16, Gf64};
pub use multiplier::{fp_polymul, karatsuba_mul, naive_mul, FieldChoice, MulPlan, Multiplier};
