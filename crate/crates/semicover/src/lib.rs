//! Covering projections for graphs with semi-edges.
//!
//! A graph here may contain ordinary edges, loops, and *semi-edges*
//! (dangling half-edges).  A covering projection maps a guest graph onto a
//! host graph so that the neighbourhood of every guest vertex is carried
//! bijectively onto the neighbourhood of its image.  This crate provides:
//!
//! * the data model and a small text format ([`graph`], [`sgf`]);
//! * structural analysis and degree refinement ([`analysis`]);
//! * checkers for full and partial covers, path lifting, and related
//!   structural observations ([`cover`]);
//! * exhaustive solvers for cover existence, edge coloring, and graph
//!   homomorphism ([`solve`]);
//! * the gadget constructions used to transfer hardness between these
//!   problems ([`constructions`], [`corpus`]);
//! * polynomial-time reductions from cycle homomorphism, 4-coloring, and
//!   edge coloring to cover existence over small fixed hosts, with
//!   certificate extraction and end-to-end verification ([`reductions`]);
//! * DOT export ([`dot`]) and a command-line interface ([`cli`]).

pub mod analysis;
pub mod corpus;
pub mod cover;
pub mod graph;
pub mod sgf;
pub mod cli;
pub mod constructions;
pub mod solve;
