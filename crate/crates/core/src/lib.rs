//! Geospatial knowledge-graph engine.
//!
//! Features are parsed into spherical geometries, materialized as typed
//! triples and linked to a hierarchical grid so spatial questions become
//! joins over pre-computed geometry↔cell relations.

pub mod dgg;
pub mod geometry;
pub mod ingest;
pub mod materialize;
pub mod query;
pub mod sphere;
pub mod store;
pub mod temporal;
pub mod validate;
pub mod vocab;
