//! ATL model checking over concurrent game models.
//!
//! Truth can be computed under the standard compositional semantics or the
//! game-theoretic ones (unbounded, ordinal-bounded, finitely bounded). Embedded
//! until/release games are solved into winning time labels, from which
//! canonical strategies are read off; [`engine`] plays evaluation games move by
//! move for machines and humans.

pub mod cgm;
pub mod difftest;
pub mod engine;
pub mod gen;
pub mod semantics;
pub mod solver;
mod player;

pub use player::Player;
pub mod formula;
pub mod ordinal;
