//! Command-line companion of `actorforge-core`: file formats, fixture
//! bundle, the four-way attack demonstration, and the CLI itself.

pub mod cli;
pub mod demo;
pub mod fixtures;
pub mod formats;
pub mod pipeline;
