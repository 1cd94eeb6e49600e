//! Closure, axiom checks and reporting.

pub mod closure;
pub mod query;
pub mod registry;
pub mod report;
