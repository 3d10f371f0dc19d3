//! Hartree-Fock phase diagram of the 2D Hubbard model on the square lattice:
//! density of states, mean-field solvers, free energies, phase boundaries and
//! their asymptotic expansions.

pub mod asymptotics;
pub mod boundary;
pub mod dos;
pub mod elliptic;
pub mod error;
pub mod free_energy;
pub mod meanfield;
pub mod quad;
pub mod roots;

pub use error::{Error, Result};
pub use meanfield::{AFBranch, AFSolution, FBranch, FSolution, MeanField, ModelPoint, PSolution, SolverConfig};
pub use quad::QuadratureConfig;
