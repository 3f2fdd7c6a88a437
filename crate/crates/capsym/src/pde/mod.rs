//! Variational solvers: the mixed anisotropic boundary value problem, the
//! symmetrized radial ODE, rearrangement upper bounds, and the first
//! eigenvalue of the gauge energy.

pub mod eigen;
pub mod energy;
pub mod radial;

pub use eigen::{first_eigenvalue, poincare_constant, EigenResult};
pub use energy::{huber_energy, solve_mixed_bvp, MixedProblem, SolveDiagnostics};
pub use radial::{solve_radial_ode, talenti_upper_profile, RadialSolution, TalentiProfile};
