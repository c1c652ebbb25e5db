//! Generic optimization engines: Dinkelbach's fractional-programming driver, a
//! log-det maximizer with trace constraints, and a concave maximizer under convex
//! quadratic constraints. Both convex solvers use a log-barrier interior-point method.

pub(crate) mod barrier;
mod dinkelbach;
mod maxdet;
mod options;
mod quadratic;

pub use dinkelbach::{dinkelbach, FractionalProgram};
pub use maxdet::{solve_maxdet, LmiLink, MaxDetProblem, MaxDetSolution, MaxDetTerm, TraceConstraint};
pub use options::{SolveReport, SolverOptions, Termination};
pub use quadratic::{quad_hessian, solve_concave_quadratic, ConcaveObjective, QuadConstraint};
pub(crate) use quadratic::pack;
