//! Library side of the `numrange` command: file formats, figures, reports
//! and the subcommand bodies.

pub mod commands;
pub mod example;
pub mod exit;
pub mod matrix_file;
pub mod report;
pub mod svg;
