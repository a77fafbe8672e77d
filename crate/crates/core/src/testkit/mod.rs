//! Synthetic data: emission lattices derived from reference transcripts and
//! a template-based Slovak sentence generator.

mod sentences;
mod synth;

pub use sentences::SentenceGenerator;
pub use synth::{synth_emissions, utterance_seed, SynthesisConfig, SynthesisError};
