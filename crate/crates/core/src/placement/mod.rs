//! Greedy blob placement under a density prior and a spacing distribution,
//! a random weighted baseline, and a prior-adherence score.

mod adherence;
mod availability;
mod greedy;
mod log;
mod sampler;

pub use adherence::prior_adherence;
pub use availability::{anchor, can_host, update_available, AvailabilityMask};
pub use greedy::{
    greedy_placement, greedy_placement_with, random_weighted_placement, Placement, Termination,
};
pub use log::{PlacementLog, PlacementRecord};
pub use sampler::{PixelSampler, WEIGHT_SCALE};

pub use crate::mask::InstanceMask;
