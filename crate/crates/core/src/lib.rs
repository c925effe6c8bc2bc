//! Span model, output-format codecs, scoring and error analysis for
//! generative named entity recognition.

pub mod analysis;
pub mod codecs;
pub mod io;
pub mod model;
pub mod promptgen;
pub mod scoring;
