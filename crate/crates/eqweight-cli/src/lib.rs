//! Scenario runner for the `eqweight` engine: parse a JSON scenario, run its
//! tasks, and render the report as JSON or text tables.

pub mod render;
pub mod run;
pub mod scenario;
