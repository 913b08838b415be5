//! Code-comment quality toolkit for C sources.
//!
//! The crate covers the whole corpus-to-report path: acquiring `.c` files
//! ([`ingest`]), lexing them into code-comment pairs ([`extractor`]),
//! storing and splitting labeled collections ([`dataset`]), the manual
//! labeling service ([`annotate`]), sparse text features ([`features`]),
//! natively implemented classifiers ([`models`]) and the evaluation harness
//! that compares seed data against seed plus generated data ([`eval`]).
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod annotate;
pub mod cli;
pub mod dataset;
pub mod eval;
pub mod extractor;
pub mod features;
pub mod fsutil;
pub mod ingest;
pub mod models;
pub mod par;
pub mod pipeline;

pub use dataset::{CodeCommentPair, Dataset, Label, Source};
pub use extractor::{CommentKind, RawComment};
