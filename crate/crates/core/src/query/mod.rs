//! Pattern evaluation, cell-mediated spatial operators, the area briefing
//! and metadata introspection.

mod briefing;
mod introspect;
mod pattern;
mod spatial;

pub use briefing::{briefing, briefing_capped, BriefingItem, BriefingReport, BriefingRequest};
pub use introspect::{introspect, IntrospectKind, Row};
pub use pattern::{eval, execute, parse_slot, parse_term, Binding, Filter, Query, QueryResult, Slot, TriplePattern};
pub use spatial::{area_matches, check_area, entities_in_area, spatially_related, stored_level_range, AreaMatch};

use crate::dgg::DggError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QueryError {
    #[error("malformed query: {0}")]
    Malformed(String),
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("filter variable ?{0} does not appear in any pattern")]
    UnboundFilterVariable(String),
    #[error("{0} has no spatial links")]
    NoSpatialLinks(String),
    #[error("invalid area: {0}")]
    InvalidArea(String),
    #[error("no dataset metadata in the store")]
    NoMetadata,
    #[error(transparent)]
    Grid(#[from] DggError),
}
