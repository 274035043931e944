//! Exact reachability, coverability and state reachability for continuous
//! VASS and continuous pushdown VASS.

pub mod creach;
pub mod grammar;
pub mod lra;
pub mod machines;
pub mod numerics;
pub mod oracle;
pub mod pumps;
pub mod solver;
pub mod testkit;
