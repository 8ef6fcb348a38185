//! Proper interval graphs: endpoint orders, streaming reconstruction and static deletion.

pub mod order;
pub mod reconstruct;
pub mod recognition;
pub mod static_solver;

pub use order::{Endpoint, IntervalOrder, OrderError};
pub use reconstruct::{
    default_attempts, is_middle_vertex, pass_bound, reconstruct_piv, reconstruct_piv_with, verify_model, PartialOrder,
    PivError, PivReconstructor, PivRun,
};
pub use recognition::is_proper_interval;
pub use static_solver::static_pivd;
