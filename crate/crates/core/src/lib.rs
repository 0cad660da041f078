//! Monotone traveling wavefronts of the nonlocal food-limited model
//!
//! ```text
//! u_t = d u_xx + u (1 - K∗u) / (1 + γ K∗u)
//! ```
//!
//! A front u(t, x) = φ(x + ct) solves the profile equation
//! `dφ'' - cφ' + φ(1 - N∗φ)/(1 + γN∗φ) = 0` with φ(-∞) = 0, φ(+∞) = 1.
//!
//! * [`kernel`]: the admissible delay kernels and their effective kernels N_c.
//! * [`spectral`]: characteristic roots and existence verdicts.
//! * [`profile`]: front profiles by monotone iteration and by Newton's method.
//! * [`pde`]: method-of-lines simulation of the linear-chain system.
//! * [`cli`]: the command-line front end.

pub mod cli;
pub mod error;
pub mod io;
pub mod kernel;
pub mod pde;
pub mod pool;
pub mod profile;
mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use kernel::{KernelFamily, KernelSpec, ModelParams};
