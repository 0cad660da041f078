//! Front profiles: grids and sampled profiles, the integral operator 𝒜, the
//! monotone iteration between lower and upper solutions, a direct Newton
//! solver, and verification.

mod banded;
pub mod csv;
pub mod green;
pub mod grid;
pub mod iterate;
pub mod newton;
pub mod operators;
pub mod verify;

pub use csv::{read_profile_csv, write_profile_csv};
pub use green::{green_kernel, GreenKernel, LatticeGreen};
pub use grid::{FrontMeta, Grid, Profile, TailExtension};
pub use iterate::{
    default_grid, lower_certificate, lower_solution, monotone_iterate, shift_align, solve_front,
    upper_solution, upper_solution_on, Alignment, FrontMethod, FrontOptions, FrontSolution,
    IterationReport, LowerSolution,
};
pub use newton::{left_rate, newton_bvp, newton_solve, NewtonOutcome};
pub use operators::{apply_a, apply_f, Equation, FrontProblem};
pub use verify::{fit_tails, uniqueness_test, verify_front, AlignmentReport, TailFit, VerificationReport};
