//! Representation-formula checks and log-log rate fits.

mod fit;
mod harness;
mod representation;

pub use fit::{fit_rate, RateFit, RateTable};
pub use harness::{
    boundary_data_registry, decreasing_with_noise, energy_bounds, flux_l1, rate_harness, DataFn, EnergyBounds,
    Quantity, Stage, Study, SweepRow, NOISE_INVERSIONS,
};
pub use representation::{leading_order, reciprocity_value, representation_check, RepresentationCheck};
