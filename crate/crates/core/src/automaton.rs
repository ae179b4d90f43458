//! Finite automata over action labels, and a small Turing machine.
//!
//! [`trick_to_automaton`] builds the trie of every path's action word, so the
//! accepted language is exactly the set of ways the trick can be performed.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trick::{enumerate_paths, ExecConfig, PathError, TrickProgram};

pub type State = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("edge {from} -> {to} references an undeclared state")]
    UnknownState { from: State, to: State },
    #[error("edge label `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("start state {0} is not declared")]
    UnknownStart(State),
    #[error("final state {0} is not declared")]
    UnknownFinal(State),
    #[error("invalid automaton JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: State,
    pub to: State,
    pub label: String,
}

/// Alphabet, states, start states and labelled transitions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransitionTable {
    pub alphabet: BTreeSet<String>,
    pub states: BTreeSet<State>,
    pub start: BTreeSet<State>,
    pub edges: Vec<Edge>,
}

impl TransitionTable {
    pub fn validate(&self) -> Result<(), AutomatonError> {
        for e in &self.edges {
            if !self.states.contains(&e.from) || !self.states.contains(&e.to) {
                return Err(AutomatonError::UnknownState { from: e.from, to: e.to });
            }
            if !self.alphabet.contains(&e.label) {
                return Err(AutomatonError::UnknownSymbol(e.label.clone()));
            }
        }
        match self.start.iter().find(|s| !self.states.contains(s)) {
            Some(&s) => Err(AutomatonError::UnknownStart(s)),
            None => Ok(()),
        }
    }

    pub fn has_edge(&self, from: State, to: State, label: &str) -> bool {
        self.edges.iter().any(|e| e.from == from && e.to == to && e.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagicAutomaton {
    table: TransitionTable,
    final_states: BTreeSet<State>,
    successors: HashMap<(State, String), Vec<State>>,
}

/// States visited while reading a word; one more state than letters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Run {
    pub states: Vec<State>,
    pub word: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("run has {states} states for a word of {letters} letters")]
    Length { states: usize, letters: usize },
    #[error("run does not begin in a start state")]
    NotStarted,
    #[error("step {index} ({from} -> {to} on `{label}`) is not a transition")]
    NoTransition { index: usize, from: State, to: State, label: String },
    #[error("run ends in non-final state {0}")]
    NotFinal(State),
}

impl Run {
    /// Checks the run against the automaton, including acceptance.
    pub fn validate(&self, automaton: &MagicAutomaton) -> Result<(), RunError> {
        if self.states.len() != self.word.len() + 1 {
            return Err(RunError::Length { states: self.states.len(), letters: self.word.len() });
        }
        if !automaton.table().start.contains(&self.states[0]) {
            return Err(RunError::NotStarted);
        }
        for (i, label) in self.word.iter().enumerate() {
            let (from, to) = (self.states[i], self.states[i + 1]);
            if !automaton.table().has_edge(from, to, label) {
                return Err(RunError::NoTransition { index: i, from, to, label: label.clone() });
            }
        }
        let last = *self.states.last().expect("runs are nonempty");
        if !automaton.final_states().contains(&last) {
            return Err(RunError::NotFinal(last));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct Exchange {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet: Option<BTreeSet<String>>,
    states: BTreeSet<State>,
    start: BTreeSet<State>,
    #[serde(rename = "final")]
    final_states: BTreeSet<State>,
    edges: Vec<Edge>,
}

impl MagicAutomaton {
    pub fn new(table: TransitionTable, final_states: BTreeSet<State>) -> Result<Self, AutomatonError> {
        table.validate()?;
        if let Some(&f) = final_states.iter().find(|f| !table.states.contains(f)) {
            return Err(AutomatonError::UnknownFinal(f));
        }
        let mut successors: HashMap<(State, String), Vec<State>> = HashMap::new();
        for e in &table.edges {
            successors.entry((e.from, e.label.clone())).or_default().push(e.to);
        }
        Ok(MagicAutomaton { table, final_states, successors })
    }

    pub fn table(&self) -> &TransitionTable {
        &self.table
    }

    pub fn final_states(&self) -> &BTreeSet<State> {
        &self.final_states
    }

    /// Nondeterministic acceptance. Returns an accepting run if one exists;
    /// letters outside the alphabet reject at once.
    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> Option<Run> {
        if word.iter().any(|a| !self.table.alphabet.contains(a.as_ref())) {
            return None;
        }
        // breadth-first over (position, state) with back pointers
        let mut parent: HashMap<(usize, State), State> = HashMap::new();
        let mut queue: VecDeque<(usize, State)> = VecDeque::new();
        let mut seen: BTreeSet<(usize, State)> = BTreeSet::new();
        for &s in &self.table.start {
            if seen.insert((0, s)) {
                queue.push_back((0, s));
            }
        }
        while let Some((pos, s)) = queue.pop_front() {
            if pos == word.len() {
                if self.final_states.contains(&s) {
                    let mut states = vec![s];
                    let mut cur = (pos, s);
                    while let Some(&prev) = parent.get(&cur) {
                        states.push(prev);
                        cur = (cur.0 - 1, prev);
                    }
                    states.reverse();
                    let word = word.iter().map(|a| a.as_ref().to_string()).collect();
                    return Some(Run { states, word });
                }
                continue;
            }
            let next = self.successors.get(&(s, word[pos].as_ref().to_string()));
            for &t in next.map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert((pos + 1, t)) {
                    parent.insert((pos + 1, t), s);
                    queue.push_back((pos + 1, t));
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> String {
        let ex = Exchange {
            alphabet: Some(self.table.alphabet.clone()),
            states: self.table.states.clone(),
            start: self.table.start.clone(),
            final_states: self.final_states.clone(),
            edges: self.table.edges.clone(),
        };
        serde_json::to_string(&ex).expect("automata always serialize")
    }

    /// Reads the exchange format. Without an explicit `alphabet` the edge
    /// labels are the alphabet.
    pub fn from_json(text: &str) -> Result<Self, AutomatonError> {
        let ex: Exchange = serde_json::from_str(text).map_err(|e| AutomatonError::Json(e.to_string()))?;
        let alphabet = ex.alphabet.unwrap_or_else(|| ex.edges.iter().map(|e| e.label.clone()).collect());
        let table = TransitionTable { alphabet, states: ex.states, start: ex.start, edges: ex.edges };
        MagicAutomaton::new(table, ex.final_states)
    }
}

/// Trie of all action words of the program; the end of every word is final.
pub fn trick_to_automaton(program: &TrickProgram, config: ExecConfig) -> Result<MagicAutomaton, PathError> {
    let paths = enumerate_paths(program, config)?;
    let mut table = TransitionTable::default();
    let mut children: BTreeMap<(State, String), State> = BTreeMap::new();
    let mut finals = BTreeSet::new();
    table.states.insert(0);
    table.start.insert(0);
    for record in &paths {
        let mut cur = 0;
        for action in record.action_word() {
            let label = action.to_string();
            let next = table.states.len() as State;
            cur = *children.entry((cur, label.clone())).or_insert_with(|| {
                table.states.insert(next);
                table.alphabet.insert(label.clone());
                table.edges.push(Edge { from: cur, to: next, label });
                next
            });
        }
        finals.insert(cur);
    }
    Ok(MagicAutomaton::new(table, finals).expect("trie is well formed"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

/// Deterministic single-tape machine. `delta` may be partial: the machine
/// halts when no rule matches. The tape is unbounded to the right and grows
/// with `blank`; a left move at cell 0 stays put.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagicTuringMachine {
    pub states: BTreeSet<String>,
    pub alphabet: BTreeSet<char>,
    pub blank: char,
    pub start: String,
    pub delta: BTreeMap<(String, char), (char, Move, String)>,
    pub tape: Vec<char>,
    pub head: usize,
    pub step_budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MtmOutcome {
    pub halted: bool,
    pub state: String,
    /// Tape contents with trailing blanks removed.
    pub tape: String,
    pub head: usize,
    pub steps: usize,
}

impl MagicTuringMachine {
    pub fn new(start: &str, blank: char, rules: &[(&str, char, char, Move, &str)]) -> Self {
        let mut states = BTreeSet::from([start.to_string()]);
        let mut alphabet = BTreeSet::from([blank]);
        let mut delta = BTreeMap::new();
        for &(q, read, write, mv, next) in rules {
            states.insert(q.to_string());
            states.insert(next.to_string());
            alphabet.insert(read);
            alphabet.insert(write);
            delta.insert((q.to_string(), read), (write, mv, next.to_string()));
        }
        MagicTuringMachine { states, alphabet, blank, start: start.to_string(), delta, tape: vec![], head: 0, step_budget: 1000 }
    }

    pub fn with_tape(mut self, tape: &str) -> Self {
        self.tape = tape.chars().collect();
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.step_budget = budget;
        self
    }
}

pub fn mtm_run(machine: &MagicTuringMachine) -> MtmOutcome {
    let mut tape = machine.tape.clone();
    let mut head = machine.head;
    let mut state = machine.start.clone();
    let mut steps = 0;
    let halted = loop {
        if head >= tape.len() {
            tape.resize(head + 1, machine.blank);
        }
        let Some((write, mv, next)) = machine.delta.get(&(state.clone(), tape[head])) else {
            break true;
        };
        if steps == machine.step_budget {
            break false;
        }
        tape[head] = *write;
        match mv {
            Move::L => head = head.saturating_sub(1),
            Move::R => head += 1,
        }
        state = next.clone();
        steps += 1;
    };
    let tape: String = tape.into_iter().collect();
    MtmOutcome { halted, state, tape: tape.trim_end_matches(machine.blank).to_string(), head, steps }
}
