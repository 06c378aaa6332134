//! Online parcel allocation for crowdsourced last-mile delivery.
//!
//! Parcels wait at a pop-station; crowd workers with a parcel capacity and
//! a working-time budget arrive one by one and each receives an
//! irrevocable bundle. The crate provides
//!
//! * the problem model and feasibility checks ([`model`]),
//! * exact offline optima by min-cost flow and exhaustive search ([`offline`]),
//! * the greedy and primal-dual online algorithms ([`online`]),
//! * seeded instance generators and instance files ([`generator`]),
//! * an experiment harness measuring empirical competitive ratios ([`harness`]).
//!
//! Sweeps and ratio studies fan out over rayon when the default `parallel`
//! feature is on and run sequentially otherwise.

pub mod error;
pub mod generator;
pub mod harness;
pub mod model;
pub mod offline;
pub mod online;

pub use error::{Error, Result};
pub use model::{
    allocation_utility, check_feasible, compute_mu, Allocation, Instance, Pair, ParcelId, Worker,
    WorkerId, TOLERANCE,
};
