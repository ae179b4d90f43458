//! Path counts and operation counts.

use std::fmt;

use serde::Serialize;

use crate::ctl::build_tree;
use crate::trick::{ExecConfig, PathError, SlotMode, TrickProgram};

/// Path count usually quoted for this trick. Neither slot reading below
/// reproduces it; it is reported for comparison only.
pub const QUOTED_PATH_COUNT: usize = 144;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathCountReport {
    pub internal_gaps: usize,
    pub exclude_adjacent: usize,
    pub quoted: usize,
}

pub fn path_counts(program: &TrickProgram) -> Result<PathCountReport, PathError> {
    let count = |slot_mode| build_tree(program, ExecConfig { slot_mode }).map(|t| t.m());
    Ok(PathCountReport {
        internal_gaps: count(SlotMode::InternalGaps)?,
        exclude_adjacent: count(SlotMode::ExcludeAdjacent)?,
        quoted: QUOTED_PATH_COUNT,
    })
}

impl fmt::Display for PathCountReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "m={} with slot mode internal_gaps", self.internal_gaps)?;
        writeln!(f, "m={} with slot mode exclude_adjacent", self.exclude_adjacent)?;
        let verdict = |m: usize| if m == self.quoted { "matches" } else { "differs from" };
        write!(
            f,
            "quoted count {}: internal_gaps {} it, exclude_adjacent {} it",
            self.quoted,
            verdict(self.internal_gaps),
            verdict(self.exclude_adjacent)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpStats {
    pub m: usize,
    pub max_path_ops: usize,
    pub total_primitive_ops: usize,
    /// Primitive operations plus one valuation per checkpoint.
    pub checker_ops: usize,
}

pub fn op_stats(program: &TrickProgram, config: ExecConfig) -> Result<OpStats, PathError> {
    let tree = build_tree(program, config)?;
    let ops = tree.branches().iter().map(|b| b.primitive_ops);
    Ok(OpStats {
        m: tree.m(),
        max_path_ops: ops.clone().max().unwrap_or(0),
        total_primitive_ops: ops.sum(),
        checker_ops: tree.checker_ops(),
    })
}
