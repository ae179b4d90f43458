//! Checkpoint trees and bounded-path evaluation of branching-time formulas.
//!
//! The tree has a virtual root with one branch per choice binding; each
//! branch is the finite sequence of checkpoint observations along that path.
//! At the root, `A`/`E` quantify over branches. Below the root every node has
//! a single future (its own branch suffix), so `A` and `E` coincide there.
//! The root carries no valuation: atoms read at the root are false.

mod formula;

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

pub use formula::{CtlFormula, FormulaError, Prop};

use crate::deck::CardSymbol;
use crate::trick::{enumerate_paths, CheckpointState, ChoiceBinding, ExecConfig, PathError, PathRecord, TrickProgram};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub binding: ChoiceBinding,
    pub hidden: CardSymbol,
    pub nodes: Vec<CheckpointState>,
    pub primitive_ops: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointTree {
    branches: Vec<Branch>,
}

/// Branches of the program in enumeration order.
pub fn build_tree(program: &TrickProgram, config: ExecConfig) -> Result<CheckpointTree, PathError> {
    Ok(CheckpointTree::from_paths(enumerate_paths(program, config)?))
}

impl CheckpointTree {
    pub fn from_paths(paths: impl IntoIterator<Item = PathRecord>) -> Self {
        let branches = paths
            .into_iter()
            .map(|r| Branch { primitive_ops: r.primitive_ops(), binding: r.binding, hidden: r.hidden, nodes: r.checkpoints })
            .collect();
        CheckpointTree { branches }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Number of paths.
    pub fn m(&self) -> usize {
        self.branches.len()
    }

    /// Operations spent building the tree: primitive card operations plus one
    /// proposition valuation per checkpoint.
    pub fn checker_ops(&self) -> usize {
        self.branches.iter().map(|b| b.primitive_ops + b.nodes.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvidenceKind {
    Witness,
    Counterexample,
}

/// A branch backing a verdict. `checkpoint` is the index of the cited node,
/// absent when the whole branch is the evidence (AF counterexamples, EG
/// witnesses).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub kind: EvidenceKind,
    pub branch: usize,
    pub binding: ChoiceBinding,
    pub hidden: CardSymbol,
    pub checkpoint: Option<usize>,
    pub label: Option<u32>,
    pub trace: Vec<CheckpointState>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    #[serde(rename = "verdict")]
    pub value: bool,
    pub m: usize,
    #[serde(serialize_with = "serialize_display")]
    pub formula: CtlFormula,
    pub evidence: Option<Evidence>,
}

fn serialize_display<S: serde::Serializer>(f: &CtlFormula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

fn holds(nodes: &[CheckpointState], i: usize, f: &CtlFormula) -> bool {
    match f {
        CtlFormula::Atom(Prop::P) => nodes[i].p,
        CtlFormula::Atom(Prop::Empty) => nodes[i].empty,
        CtlFormula::Not(g) => !holds(nodes, i, g),
        CtlFormula::And(a, b) => holds(nodes, i, a) && holds(nodes, i, b),
        CtlFormula::Or(a, b) => holds(nodes, i, a) || holds(nodes, i, b),
        CtlFormula::AF(g) | CtlFormula::EF(g) => (i..nodes.len()).any(|j| holds(nodes, j, g)),
        CtlFormula::AG(g) | CtlFormula::EG(g) => (i..nodes.len()).all(|j| holds(nodes, j, g)),
    }
}

fn first_where(nodes: &[CheckpointState], f: &CtlFormula, want: bool) -> Option<usize> {
    (0..nodes.len()).find(|&j| holds(nodes, j, f) == want)
}

impl CheckpointTree {
    fn at_root(&self, f: &CtlFormula) -> bool {
        let bs = &self.branches;
        match f {
            CtlFormula::Atom(_) => false,
            CtlFormula::Not(g) => !self.at_root(g),
            CtlFormula::And(a, b) => self.at_root(a) && self.at_root(b),
            CtlFormula::Or(a, b) => self.at_root(a) || self.at_root(b),
            CtlFormula::AF(g) => bs.iter().all(|b| first_where(&b.nodes, g, true).is_some()),
            CtlFormula::AG(g) => bs.iter().all(|b| first_where(&b.nodes, g, false).is_none()),
            CtlFormula::EF(g) => bs.iter().any(|b| first_where(&b.nodes, g, true).is_some()),
            CtlFormula::EG(g) => bs.iter().any(|b| first_where(&b.nodes, g, false).is_none()),
        }
    }

    fn evidence(&self, kind: EvidenceKind, branch: usize, checkpoint: Option<usize>) -> Evidence {
        let b = &self.branches[branch];
        Evidence {
            kind,
            branch,
            binding: b.binding.clone(),
            hidden: b.hidden,
            checkpoint,
            label: checkpoint.map(|i| b.nodes[i].label),
            trace: b.nodes.clone(),
        }
    }

    /// Whether `formula` holds at checkpoint `index` of branch `branch`.
    pub fn holds_at(&self, branch: usize, index: usize, formula: &CtlFormula) -> bool {
        holds(&self.branches[branch].nodes, index, formula)
    }

    /// Evaluates `formula` at the root. Evidence is the lexicographically
    /// first qualifying branch, citing its earliest qualifying checkpoint.
    pub fn eval(&self, formula: &CtlFormula) -> Verdict {
        let value = self.at_root(formula);
        let find = |pred: &dyn Fn(&Branch) -> Option<Option<usize>>| {
            self.branches.iter().enumerate().find_map(|(i, b)| pred(b).map(|cp| (i, cp)))
        };
        let evidence = match (formula, value) {
            (CtlFormula::AF(g), false) => find(&|b| first_where(&b.nodes, g, true).is_none().then_some(None))
                .map(|(i, cp)| self.evidence(EvidenceKind::Counterexample, i, cp)),
            (CtlFormula::AG(g), false) => find(&|b| first_where(&b.nodes, g, false).map(Some))
                .map(|(i, cp)| self.evidence(EvidenceKind::Counterexample, i, cp)),
            (CtlFormula::EF(g), true) => find(&|b| first_where(&b.nodes, g, true).map(Some))
                .map(|(i, cp)| self.evidence(EvidenceKind::Witness, i, cp)),
            (CtlFormula::EG(g), true) => find(&|b| first_where(&b.nodes, g, false).is_none().then_some(None))
                .map(|(i, cp)| self.evidence(EvidenceKind::Witness, i, cp)),
            _ => None,
        };
        Verdict { formula: formula.clone(), value, m: self.m(), evidence }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("verdict `{0}` has no witness or counterexample to explain")]
    NoEvidence(String),
}

/// Rendered evidence trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    #[serde(skip)]
    pub text: String,
    pub formula: String,
    pub verdict: bool,
    pub evidence: Evidence,
}

impl Explanation {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("explanations always serialize")
    }
}

pub fn explain(verdict: &Verdict) -> Result<Explanation, ExplainError> {
    let evidence = verdict.evidence.clone().ok_or_else(|| ExplainError::NoEvidence(verdict.formula.to_string()))?;
    let kind = match evidence.kind {
        EvidenceKind::Witness => "witness",
        EvidenceKind::Counterexample => "counterexample",
    };
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{kind} for {} on path {} of {}: {}, hidden card {}",
        verdict.formula,
        evidence.branch + 1,
        verdict.m,
        evidence.binding,
        evidence.hidden
    );
    for (i, node) in evidence.trace.iter().enumerate() {
        let mut line = format!(
            "  checkpoint {:>2}  deck {:<15}  p={:<5} empty={:<5}",
            node.label,
            node.deck.to_string(),
            node.p,
            node.empty
        );
        if evidence.checkpoint == Some(i) {
            let _ = write!(line, "  <-- {kind}");
        }
        let _ = writeln!(text, "{}", line.trim_end());
    }
    if evidence.checkpoint.is_none() {
        let _ = writeln!(text, "  (the whole path is the {kind})");
    }
    Ok(Explanation { text, formula: verdict.formula.to_string(), verdict: verdict.value, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trick::{shousuigongcishi, ExecConfig};

    fn builtin_tree() -> CheckpointTree {
        build_tree(&shousuigongcishi(), ExecConfig::default()).unwrap()
    }

    fn eval(tree: &CheckpointTree, text: &str) -> Verdict {
        tree.eval(&text.parse().unwrap())
    }

    #[test]
    fn builtin_verdicts() {
        let tree = builtin_tree();
        assert_eq!(tree.m(), 192);
        assert!(tree.branches().iter().all(|b| b.nodes.len() == 6));
        assert!(eval(&tree, "AF (p & empty)").value);
        assert!(eval(&tree, "AF p").value);
        assert!(eval(&tree, "EF p").value);
        assert!(!eval(&tree, "AG p").value);
        assert!(!eval(&tree, "EG p").value);
    }

    #[test]
    fn empty_only_at_the_last_node() {
        for b in builtin_tree().branches() {
            let empties: Vec<bool> = b.nodes.iter().map(|n| n.empty).collect();
            assert_eq!(empties, vec![false, false, false, false, false, true]);
        }
    }

    #[test]
    fn ag_counterexample_at_checkpoint_six() {
        let v = eval(&builtin_tree(), "AG p");
        let ev = v.evidence.unwrap();
        assert_eq!(ev.kind, EvidenceKind::Counterexample);
        assert_eq!(ev.branch, 0);
        assert_eq!(ev.label, Some(6));
        assert!(!ev.trace[ev.checkpoint.unwrap()].p);
    }

    #[test]
    fn ef_witness_at_checkpoint_four() {
        let ev = eval(&builtin_tree(), "EF p").evidence.unwrap();
        assert_eq!(ev.kind, EvidenceKind::Witness);
        assert_eq!(ev.label, Some(4));
    }

    #[test]
    fn no_evidence_for_universal_truths() {
        let tree = builtin_tree();
        assert!(eval(&tree, "AF p").evidence.is_none());
        assert!(eval(&tree, "EG p").evidence.is_none());
        assert!(eval(&tree, "AG p & EF p").evidence.is_none());
        assert!(matches!(explain(&eval(&tree, "AF p")), Err(ExplainError::NoEvidence(_))));
    }

    #[test]
    fn explain_marks_cited_checkpoint() {
        let exp = explain(&eval(&builtin_tree(), "AG p")).unwrap();
        let marked: Vec<&str> = exp.text.lines().filter(|l| l.contains("<--")).collect();
        assert_eq!(marked.len(), 1);
        assert!(marked[0].contains("checkpoint  6"));
        assert!(marked[0].contains("p=false"));
        let json: serde_json::Value = serde_json::from_str(&exp.to_json()).unwrap();
        assert_eq!(json["evidence"]["label"], 6);
        assert_eq!(json["evidence"]["kind"], "counterexample");
    }

    #[test]
    fn single_node_tree() {
        let node = CheckpointState { label: 9, deck: "a".parse().unwrap(), p: true, empty: true };
        let tree = CheckpointTree {
            branches: vec![Branch { binding: ChoiceBinding::new(), hidden: CardSymbol::A, nodes: vec![node], primitive_ops: 0 }],
        };
        assert!(eval(&tree, "AF p").value);
        assert!(eval(&tree, "EG (p & empty)").value);
        assert!(!eval(&tree, "EF !p").value);
        // atoms at the virtual root carry no valuation
        assert!(!eval(&tree, "p").value);
    }

    #[test]
    fn verdict_json() {
        let json: serde_json::Value = serde_json::to_value(eval(&builtin_tree(), "AF (p & empty)")).unwrap();
        assert_eq!(json["verdict"], true);
        assert_eq!(json["m"], 192);
        assert_eq!(json["formula"], "AF (p & empty)");
        assert!(json["evidence"].is_null());
    }
}
