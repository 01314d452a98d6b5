//! Building blocks for code-generator product lines.
//!
//! Feature models select generator components; components expose explicit
//! interfaces with local variability; the composition operator assembles
//! them into a generator variant; the generation engine runs the variant
//! over a class diagram and writes syntax-checked, traceable artifacts.

pub mod component;
pub mod composition;
pub mod feature_model;
pub mod formula;
pub mod generation;
pub mod input_language;
pub mod reference;
pub mod report;
pub mod text;
