//! Explicit-state model checking for card tricks driven by audience choices.
//!
//! A trick is a [`trick::TrickProgram`]: a starting [`deck::Deck`], a set of
//! finite audience choices, and a list of card-handling instructions. Every
//! combination of choices is one path. The [`ctl`] module evaluates branching
//! temporal formulas over the tree of paths, [`oracle`] re-checks the same
//! formulas by plain flag counting, and [`automaton`] turns the paths' action
//! words into a finite automaton.

pub mod automaton;
pub mod ctl;
pub mod deck;
pub mod dsl;
pub mod oracle;
pub mod stats;
pub mod trick;

pub use deck::{CardSymbol, Deck};
pub use trick::{shousuigongcishi, ChoiceBinding, ExecConfig, PathRecord, SlotMode, TrickProgram};
