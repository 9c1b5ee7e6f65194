//! HTTP JSON API and command-line front door for the knowledge graph.

pub mod api;
pub mod config;
pub mod views;

pub use api::{router, serve, AppState};
pub use config::ServiceConfig;
