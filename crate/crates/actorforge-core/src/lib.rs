//! Core of the actorforge toolchain: a frontend for a guarded-action actor
//! DSL, an atomic-firing dataflow engine, a sequential call VM for a
//! Solidity-like contract subset, a reentrancy analyzer and a source
//! generator that canonicalizes actions into lock-protected contract code.
//!
//! Everything in this crate is a pure transformation over in-memory values:
//! no files, no clocks, no threads. IO, file formats and the command line
//! live in the companion `actorforge` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analyzer;
pub mod codegen;
pub mod dataflow;
pub mod diag;
pub mod frontend;
pub mod lexer;
pub mod seqvm;
pub mod span;
pub mod value;

/// Toolchain version stamped into generated sources and JSON outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
