//! Families, experiment configuration, suite runner and reports for the
//! `apha` command line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod family;
pub mod registry;
pub mod report;
pub mod suite;
