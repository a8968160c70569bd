//! Command-line front end and query service for the kgnav pipeline.

pub mod config;
pub mod render;
pub mod service;

pub use config::AppConfig;
