//! Safety-requirements traceability: a textual modeling language, a typed
//! trace graph, a validation rule catalog and change-impact analysis.
//!
//! ```no_run
//! use tracekit::{dsl, graph, rules};
//!
//! let src = std::fs::read_to_string("system.sreq").unwrap();
//! let model = dsl::parse_model(&src, "system.sreq").unwrap();
//! let g = graph::build_graph(&model);
//! for f in rules::validate(&model, &g, &rules::RuleConfig::default()) {
//!     println!("{} {}", f.rule, f.message);
//! }
//! ```

pub mod cli;
pub mod dsl;
pub mod graph;
pub mod impact;
pub mod model;
pub mod rules;

pub use graph::{build_graph, TraceGraph};
pub use impact::{default_propagation, impact, impact_report, ImpactResult, PropagationTable};
pub use model::{build_model, EntityId, Model, ModelError};
pub use rules::{coverage_stats, validate, CoverageStats, Finding, RuleConfig, RuleId};
