//! Command line and HTTP front ends over a [`hylos_core::workspace::Workspace`].

pub mod cli;
pub mod http;
