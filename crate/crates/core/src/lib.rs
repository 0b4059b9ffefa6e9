//! Core algorithms for hashtag recommendation over short social-media texts.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It covers:
//!
//! - [`ingest`]: raw-record normalization, tweet cleaning, hashtag extraction and
//!   corpus filtering.
//! - [`embedding`]: skip-gram with negative sampling, mean pooling, cosine and
//!   per-hashtag attribute vectors.
//! - [`numeric`]: dense matrices, activations, Xavier init, Adam, Cholesky solves
//!   and finite-difference gradient checks.
//! - [`supervised`]: the single-hidden-layer baseline classifier, which doubles as
//!   the tweet feature extractor.
//! - [`zsl`]: the ConSE, ESZSL and DEM zero-shot rankers, seen/unseen splits and
//!   few-shot augmentation.
//! - [`eval`]: classification metrics, Flat-Hit@K, stratified k-fold and the two
//!   experiment drivers.
//!
//! File formats, the CLI and anything touching the filesystem live in the `tagzero`
//! crate.
#![no_std]

extern crate alloc;

pub mod embedding;
mod error;
pub mod eval;
pub mod ingest;
pub mod numeric;
pub mod rng;
pub mod supervised;
pub mod synthetic;
pub mod zsl;

pub use error::{Error, Result};
