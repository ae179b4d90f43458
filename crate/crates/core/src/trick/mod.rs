//! Tricks as programs over decks with finite audience choices, and the
//! per-path executor.

mod builtin;
mod exec;
mod program;

pub use builtin::shousuigongcishi;
pub use exec::{
    enumerate_bindings, enumerate_paths, run_path, Action, Answer, CheckpointState, ChoiceRequest, Event,
    ExecConfig, ExecError, Execution, PathError, PathRecord, Progress, SlotMode,
};
pub use program::{
    ChoiceBinding, ChoiceDomain, ChoiceKind, ChoiceVar, Expr, Instruction, TrickProgram, ValidationError,
};
