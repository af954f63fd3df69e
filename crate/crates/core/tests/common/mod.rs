//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod dense;
pub mod reference;
pub mod trueskill_oracle;
