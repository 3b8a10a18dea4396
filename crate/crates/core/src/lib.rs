pub mod costsim;
pub mod decider;
pub mod frontend;
pub mod transformer;
