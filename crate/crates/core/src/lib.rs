//! Replica-exchange q-Gaussian swarm quantum particle optimization.
//!
//! The crate is organised bottom-up:
//!
//! * [`objective`]: the objective abstraction, search bounds and evaluation accounting.
//! * [`qsampler`]: reproducible random streams and q-Gaussian deviates.
//! * [`swarm`]: the single-swarm kernel (position update, contraction schedule, mean best, diversity).
//! * [`replica`]: the replica-exchange controller running one swarm per q level.
//! * [`benchmarks`]: Griewank, Rastrigin and Ackley test functions.
//! * [`gomodel`]: a Gō-type Cα model of a short helical peptide.
//! * [`analysis`]: χ² occupancy tests, diversity extremes and run aggregation.
//! * [`cli`]: configuration handling and the experiment drivers behind the `rexq` binary.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod benchmarks;
pub mod cli;
pub mod gomodel;
pub mod objective;
pub mod qsampler;
pub mod replica;
pub mod swarm;

mod error;

pub use error::{Error, Result};
pub use objective::{Bounds, Objective, ObjectiveHandle};
pub use qsampler::{QParam, RngStream, StreamId};
pub use replica::{QLadder, ReplicaSet, RexParams, RunResult, SingleParams};
pub use swarm::{Particle, ScheduleParams, SwarmState};
