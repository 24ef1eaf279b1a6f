//! Finite models for dendroidal sets and weak 2-categories.

pub mod par;
pub mod trees;
pub mod omega;
pub mod operads;
pub mod fincat;
pub mod dsets;
pub mod nerve;
pub mod hcnerve;
pub mod groth;
pub mod bicat;
pub mod cli;
