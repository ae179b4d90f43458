//! Flag-counting oracle for the five standard properties.
//!
//! Each algorithm executes every path, counts flags per path and decides the
//! verdict from the totals. Nothing here looks at the checker's valuations:
//! `p` is recomputed from the raw deck snapshot at each checkpoint and the
//! hidden card. The counting rules are kept deliberately naive (no early
//! exit) since the per-path vectors are part of the report.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ctl::CtlFormula;
use crate::trick::{enumerate_paths, Answer, CheckpointState, ExecConfig, PathError, PathRecord, TrickProgram};
use crate::CardSymbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleFormula {
    AfPAndEmpty,
    AfP,
    AgP,
    EfP,
    EgP,
}

impl OracleFormula {
    pub const ALL: [OracleFormula; 5] =
        [OracleFormula::AfPAndEmpty, OracleFormula::AfP, OracleFormula::AgP, OracleFormula::EfP, OracleFormula::EgP];

    pub fn name(self) -> &'static str {
        match self {
            OracleFormula::AfPAndEmpty => "AF_p_and_empty",
            OracleFormula::AfP => "AFp",
            OracleFormula::AgP => "AGp",
            OracleFormula::EfP => "EFp",
            OracleFormula::EgP => "EGp",
        }
    }

    /// The checker formula this algorithm decides.
    pub fn formula(self) -> CtlFormula {
        let p = CtlFormula::p();
        match self {
            OracleFormula::AfPAndEmpty => p.and(CtlFormula::empty()).af(),
            OracleFormula::AfP => p.af(),
            OracleFormula::AgP => p.ag(),
            OracleFormula::EfP => p.ef(),
            OracleFormula::EgP => p.eg(),
        }
    }

    pub fn run(self, program: &TrickProgram, config: ExecConfig) -> Result<OracleReport, OracleError> {
        match self {
            OracleFormula::AfPAndEmpty => run_algorithm_2(program, config),
            OracleFormula::AfP => run_algorithm_3(program, config),
            OracleFormula::AgP => run_algorithm_4(program, config),
            OracleFormula::EfP => run_algorithm_5(program, config),
            OracleFormula::EgP => run_algorithm_6(program, config),
        }
    }
}

impl fmt::Display for OracleFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleFormula {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OracleFormula::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| format!("unknown oracle formula `{s}`"))
    }
}

impl Serialize for OracleFormula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub formula: OracleFormula,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag_total: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag2: Option<u8>,
    pub verdict: bool,
    pub per_path: Vec<usize>,
    /// Primitive card operations plus flag comparisons.
    #[serde(skip)]
    pub ops: usize,
}

impl OracleReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("oracle reports always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the program has no paths (m = 0); the flag-counting algorithms need m >= 1")]
    EmptyPathSet,
    #[error(transparent)]
    Path(#[from] PathError),
}

fn paths(program: &TrickProgram, config: ExecConfig) -> Result<Vec<PathRecord>, OracleError> {
    let paths = enumerate_paths(program, config)?;
    if paths.is_empty() {
        return Err(OracleError::EmptyPathSet);
    }
    Ok(paths)
}

fn matched(cp: &CheckpointState, hidden: CardSymbol) -> bool {
    cp.deck.last() == Some(hidden)
}

fn base_ops(paths: &[PathRecord]) -> usize {
    paths.iter().map(|r| r.actions.len()).sum()
}

fn report(formula: OracleFormula, m: usize, verdict: bool, per_path: Vec<usize>, ops: usize) -> OracleReport {
    OracleReport { formula, m, flag_total: None, flag: None, flag2: None, verdict, per_path, ops }
}

/// AF(p and empty): one flag per path whose final comparison succeeds;
/// true iff flag = m.
pub fn run_algorithm_2(program: &TrickProgram, config: ExecConfig) -> Result<OracleReport, OracleError> {
    let paths = paths(program, config)?;
    let m = paths.len();
    let mut flag = 0;
    let mut per_path = Vec::with_capacity(m);
    for r in &paths {
        let f = usize::from(r.final_answer == Answer::Yes);
        flag += f;
        per_path.push(f);
    }
    let mut rep = report(OracleFormula::AfPAndEmpty, m, flag == m, per_path, base_ops(&paths) + m);
    rep.flag_total = Some(flag);
    Ok(rep)
}

/// AFp. The written algorithm sets a single flag to 1 and compares it with
/// m, and bumps it once more after the loop; neither step can express "every
/// path". Implemented as intended: a per-path eventually-p flag, true iff
/// every path is flagged.
pub fn run_algorithm_3(program: &TrickProgram, config: ExecConfig) -> Result<OracleReport, OracleError> {
    let paths = paths(program, config)?;
    let mut ops = base_ops(&paths);
    let mut per_path = Vec::with_capacity(paths.len());
    for r in &paths {
        let mut f = 0;
        for cp in &r.checkpoints {
            ops += 1;
            if matched(cp, r.hidden) {
                f = 1;
            }
        }
        per_path.push(f);
    }
    let verdict = per_path.iter().all(|&f| f == 1);
    let mut rep = report(OracleFormula::AfP, paths.len(), verdict, per_path, ops);
    rep.flag = Some(u8::from(verdict));
    Ok(rep)
}

/// AGp: counts p-true checkpoints over all paths; true iff the count equals
/// the number of checkpoints visited (six per path for the builtin).
pub fn run_algorithm_4(program: &TrickProgram, config: ExecConfig) -> Result<OracleReport, OracleError> {
    let paths = paths(program, config)?;
    let mut ops = base_ops(&paths);
    let mut flag = 0;
    let mut expected = 0;
    let mut per_path = Vec::with_capacity(paths.len());
    for r in &paths {
        let mut f = 0;
        for cp in &r.checkpoints {
            ops += 1;
            expected += 1;
            if matched(cp, r.hidden) {
                f += 1;
            }
        }
        flag += f;
        per_path.push(f);
    }
    let mut rep = report(OracleFormula::AgP, paths.len(), flag == expected, per_path, ops);
    rep.flag_total = Some(flag);
    Ok(rep)
}

/// EFp: a single global flag raised by any p-true checkpoint; true iff
/// flag > 0. The stray increment after the loop is dropped.
pub fn run_algorithm_5(program: &TrickProgram, config: ExecConfig) -> Result<OracleReport, OracleError> {
    let paths = paths(program, config)?;
    let mut ops = base_ops(&paths);
    let mut flag = 0u8;
    let mut per_path = Vec::with_capacity(paths.len());
    for r in &paths {
        let mut f = 0;
        for cp in &r.checkpoints {
            ops += 1;
            if matched(cp, r.hidden) {
                f = 1;
                flag = 1;
            }
        }
        per_path.push(f);
    }
    let mut rep = report(OracleFormula::EfP, paths.len(), flag > 0, per_path, ops);
    rep.flag = Some(flag);
    Ok(rep)
}

/// EGp: flag1 counts p-true checkpoints on one path; flag2 is raised when
/// some path has p at every checkpoint. The increment of an undeclared
/// counter in the written version is ignored.
pub fn run_algorithm_6(program: &TrickProgram, config: ExecConfig) -> Result<OracleReport, OracleError> {
    let paths = paths(program, config)?;
    let mut ops = base_ops(&paths);
    let mut flag2 = 0u8;
    let mut per_path = Vec::with_capacity(paths.len());
    for r in &paths {
        let mut flag1 = 0;
        for cp in &r.checkpoints {
            ops += 1;
            if matched(cp, r.hidden) {
                flag1 += 1;
            }
        }
        if flag1 == r.checkpoints.len() {
            flag2 = 1;
        }
        per_path.push(flag1);
    }
    let mut rep = report(OracleFormula::EgP, paths.len(), flag2 == 1, per_path, ops);
    rep.flag2 = Some(flag2);
    Ok(rep)
}

pub fn run_all(program: &TrickProgram, config: ExecConfig) -> Result<Vec<OracleReport>, OracleError> {
    OracleFormula::ALL.into_iter().map(|f| f.run(program, config)).collect()
}

/// Programs with a known defect or a trivially known answer.
pub mod fixtures {
    use crate::trick::{shousuigongcishi, ChoiceDomain, Expr, Instruction, TrickProgram};
    use crate::Deck;

    /// The builtin trick without the gender-dependent discard: male paths
    /// finish with two cards.
    pub fn without_gender_discard() -> TrickProgram {
        let base = shousuigongcishi();
        let instrs = base.instructions().iter().filter(|i| !matches!(i, Instruction::IfMale(_))).cloned().collect();
        TrickProgram::new(base.initial_deck().clone(), base.declarations(), instrs).expect("mutant is valid")
    }

    /// The builtin trick with the first block move replaced by moving the
    /// block to the very end (`rotate 3`), so no audience slot is involved.
    pub fn block_to_end() -> TrickProgram {
        let base = shousuigongcishi();
        let mut instrs = base.instructions().to_vec();
        instrs[1] = Instruction::Rotate(Expr::Lit(3));
        let choices = base.declarations().into_iter().filter(|(name, _)| name != "slot2").collect();
        TrickProgram::new(base.initial_deck().clone(), choices, instrs).expect("mutant is valid")
    }

    /// Every card is the same symbol, so p holds at every checkpoint.
    pub fn constant_p() -> TrickProgram {
        use Instruction::*;
        let instrs = vec![
            TakeHidden,
            Checkpoint(4),
            MoveFirstToEnd,
            Checkpoint(5),
            Drop(Expr::Lit(1)),
            Checkpoint(6),
            FinalCheck,
        ];
        TrickProgram::new("a a a".parse::<Deck>().unwrap(), Vec::<(String, ChoiceDomain)>::new(), instrs)
            .expect("fixture is valid")
    }

    /// The hidden card never matches the remaining one.
    pub fn constant_false_p() -> TrickProgram {
        use Instruction::*;
        let instrs = vec![TakeHidden, Checkpoint(4), MoveFirstToEnd, Checkpoint(5), FinalCheck];
        TrickProgram::new("a b".parse::<Deck>().unwrap(), Vec::<(String, ChoiceDomain)>::new(), instrs)
            .expect("fixture is valid")
    }
}
