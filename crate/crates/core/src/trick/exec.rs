use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::program::{ChoiceBinding, ChoiceDomain, ChoiceKind, Expr, Instruction, TrickProgram};
use crate::deck::{CardSymbol, Deck, DeckError};

/// How "anywhere except the begin and the end" is read for block insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotMode {
    /// Any gap strictly between two remaining cards.
    #[default]
    InternalGaps,
    /// Internal gaps, minus the gap after the first and before the last card.
    ExcludeAdjacent,
}

impl SlotMode {
    pub fn slot_range(self, remaining_len: usize) -> RangeInclusive<usize> {
        match self {
            SlotMode::InternalGaps => 1..=remaining_len.saturating_sub(1),
            SlotMode::ExcludeAdjacent => 2..=remaining_len.saturating_sub(2),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SlotMode::InternalGaps => "internal_gaps",
            SlotMode::ExcludeAdjacent => "exclude_adjacent",
        }
    }
}

impl fmt::Display for SlotMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SlotMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "internal_gaps" => Ok(SlotMode::InternalGaps),
            "exclude_adjacent" => Ok(SlotMode::ExcludeAdjacent),
            other => Err(format!("unknown slot mode `{other}` (expected internal_gaps or exclude_adjacent)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExecConfig {
    pub slot_mode: SlotMode,
}

/// One primitive card action; a path's action word is a sequence of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Rotate1,
    MoveBlock { len: usize, slot: usize },
    TakeHidden,
    Drop1,
    MoveFirstToEnd,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Rotate1 => f.write_str("rotate1"),
            Action::MoveBlock { len, slot } => write!(f, "moveblock({len},{slot})"),
            Action::TakeHidden => f.write_str("takehidden"),
            Action::Drop1 => f.write_str("drop1"),
            Action::MoveFirstToEnd => f.write_str("movefirsttoend"),
        }
    }
}

impl FromStr for Action {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rotate1" => Ok(Action::Rotate1),
            "takehidden" => Ok(Action::TakeHidden),
            "drop1" => Ok(Action::Drop1),
            "movefirsttoend" => Ok(Action::MoveFirstToEnd),
            _ => {
                let args = s
                    .strip_prefix("moveblock(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| format!("unknown action `{s}`"))?;
                let (len, slot) = args.split_once(',').ok_or_else(|| format!("unknown action `{s}`"))?;
                let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad action `{s}`: {e}"));
                Ok(Action::MoveBlock { len: parse(len)?, slot: parse(slot)? })
            }
        }
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
        })
    }
}

/// Observation at a checkpoint. `p`: the last card matches the hidden card.
/// `empty`: this is the path's final checkpoint and a single card is left.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckpointState {
    pub label: u32,
    pub deck: Deck,
    pub p: bool,
    pub empty: bool,
}

/// Complete record of one path through a trick.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathRecord {
    pub binding: ChoiceBinding,
    pub hidden: CardSymbol,
    pub checkpoints: Vec<CheckpointState>,
    #[serde(rename = "final")]
    pub final_answer: Answer,
    pub actions: Vec<Action>,
}

impl PathRecord {
    pub fn action_word(&self) -> &[Action] {
        &self.actions
    }

    /// Primitive card operations executed on this path.
    pub fn primitive_ops(&self) -> usize {
        self.actions.len()
    }

    pub fn p_sequence(&self) -> Vec<bool> {
        self.checkpoints.iter().map(|c| c.p).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("path records always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("binding names unknown choice `{0}`")]
    UnknownChoice(String),
    #[error("binding is missing choice `{0}`")]
    MissingChoice(String),
    #[error("value {value} is outside the domain of `{name}`")]
    OutOfDomain { name: String, value: u32 },
    #[error("malformed program: {0}")]
    Malformed(String),
    #[error(transparent)]
    Deck(#[from] DeckError),
    #[error("no choice is pending")]
    NothingPending,
    #[error("execution already finished")]
    Finished,
}

/// A choice the execution is waiting on, with its live domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChoiceRequest {
    pub name: String,
    pub kind: ChoiceKind,
    pub domain: Vec<u32>,
    #[serde(skip)]
    index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Action { action: Action, deck: Deck },
    Checkpoint(CheckpointState),
    Final(Answer),
}

#[derive(Debug, Clone)]
pub enum Progress {
    Pending(ChoiceRequest),
    Done(PathRecord),
}

#[derive(Debug, Clone)]
struct Frame<'a> {
    body: &'a [Instruction],
    pc: usize,
    reps_left: u32,
}

/// Resumable interpreter for one path. It stops whenever an instruction
/// needs a choice that is not bound yet, which is what enumeration and
/// interactive sessions branch on.
#[derive(Debug, Clone)]
pub struct Execution<'a> {
    program: &'a TrickProgram,
    config: ExecConfig,
    deck: Deck,
    hidden: Option<CardSymbol>,
    frames: Vec<Frame<'a>>,
    values: Vec<Option<u32>>,
    order: Vec<usize>,
    pending: Option<ChoiceRequest>,
    actions: Vec<Action>,
    checkpoints: Vec<CheckpointState>,
    events: Vec<Event>,
    final_answer: Option<Answer>,
    done: Option<PathRecord>,
}

enum Resolved<T> {
    Ready(T),
    Wait(ChoiceRequest),
}

impl<'a> Execution<'a> {
    pub fn new(program: &'a TrickProgram, config: ExecConfig) -> Self {
        Execution {
            program,
            config,
            deck: program.initial_deck().clone(),
            hidden: None,
            frames: vec![Frame { body: program.instructions(), pc: 0, reps_left: 0 }],
            values: vec![None; program.choices().len()],
            order: vec![0; program.choices().len()],
            pending: None,
            actions: Vec::new(),
            checkpoints: Vec::new(),
            events: Vec::new(),
            final_answer: None,
            done: None,
        }
    }

    /// Starts with every choice pre-bound. Explicit domains are checked up
    /// front, insertion slots when they are consumed.
    pub fn with_binding(program: &'a TrickProgram, config: ExecConfig, binding: &ChoiceBinding) -> Result<Self, ExecError> {
        let mut exec = Execution::new(program, config);
        for (name, value) in binding.iter() {
            let index = program.choice_index(name).ok_or_else(|| ExecError::UnknownChoice(name.to_string()))?;
            if let ChoiceDomain::Values(domain) = &program.choices()[index].domain {
                if !domain.contains(&value) {
                    return Err(ExecError::OutOfDomain { name: name.to_string(), value });
                }
            }
            exec.values[index] = Some(value);
        }
        if let Some(missing) = program.choices().iter().zip(&exec.values).find(|(_, v)| v.is_none()) {
            return Err(ExecError::MissingChoice(missing.0.name.clone()));
        }
        Ok(exec)
    }

    pub fn deck(&self) -> &Deck {
        &self.deck
    }

    pub fn hidden(&self) -> Option<CardSymbol> {
        self.hidden
    }

    /// Checkpoints so far. Whether a checkpoint is the path's last is only
    /// known at the end, so `empty` stays false until the path completes.
    pub fn checkpoints(&self) -> &[CheckpointState] {
        &self.checkpoints
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn pending(&self) -> Option<&ChoiceRequest> {
        self.pending.as_ref()
    }

    pub fn record(&self) -> Option<&PathRecord> {
        self.done.as_ref()
    }

    /// Values bound so far, in declaration order.
    pub fn binding(&self) -> ChoiceBinding {
        self.program
            .choices()
            .iter()
            .zip(&self.values)
            .filter_map(|(c, v)| v.map(|v| (c.name.clone(), v)))
            .collect()
    }

    /// Domain positions of the bound values in declaration order; sorting on
    /// this gives the lexicographic enumeration order.
    pub(crate) fn order_key(&self) -> &[usize] {
        &self.order
    }

    pub fn drain_events(&mut self) -> Vec<Event> {
        std::mem::take(&mut self.events)
    }

    /// Binds the pending choice.
    pub fn choose(&mut self, value: u32) -> Result<(), ExecError> {
        if self.done.is_some() {
            return Err(ExecError::Finished);
        }
        let request = self.pending.as_ref().ok_or(ExecError::NothingPending)?;
        let position = request
            .domain
            .iter()
            .position(|&v| v == value)
            .ok_or_else(|| ExecError::OutOfDomain { name: request.name.clone(), value })?;
        self.values[request.index] = Some(value);
        self.order[request.index] = position;
        self.pending = None;
        Ok(())
    }

    /// Runs until a choice is needed or the path is complete.
    pub fn resume(&mut self) -> Result<Progress, ExecError> {
        if let Some(record) = &self.done {
            return Ok(Progress::Done(record.clone()));
        }
        if let Some(request) = &self.pending {
            return Ok(Progress::Pending(request.clone()));
        }
        loop {
            let Some(frame) = self.frames.last_mut() else {
                return self.finish();
            };
            if frame.pc >= frame.body.len() {
                if frame.reps_left > 0 {
                    frame.reps_left -= 1;
                    frame.pc = 0;
                } else {
                    self.frames.pop();
                }
                continue;
            }
            let body = frame.body;
            let instr = &body[frame.pc];
            match self.execute(instr)? {
                Resolved::Ready(()) => {}
                Resolved::Wait(request) => {
                    self.pending = Some(request.clone());
                    return Ok(Progress::Pending(request));
                }
            }
        }
    }

    /// Runs to completion; fails if any choice is left unbound.
    pub fn run_to_end(mut self) -> Result<PathRecord, ExecError> {
        match self.resume()? {
            Progress::Done(record) => Ok(record),
            Progress::Pending(request) => Err(ExecError::MissingChoice(request.name)),
        }
    }

    fn request(&self, index: usize, domain: Vec<u32>) -> ChoiceRequest {
        let var = &self.program.choices()[index];
        ChoiceRequest { name: var.name.clone(), kind: var.kind, domain, index }
    }

    fn explicit_request(&self, index: usize) -> Result<ChoiceRequest, ExecError> {
        match &self.program.choices()[index].domain {
            ChoiceDomain::Values(values) => Ok(self.request(index, values.clone())),
            ChoiceDomain::Internal => Err(ExecError::Malformed(format!(
                "slot choice `{}` is never consumed",
                self.program.choices()[index].name
            ))),
        }
    }

    fn value(&self, expr: &Expr) -> Result<Resolved<u32>, ExecError> {
        match expr {
            Expr::Lit(n) => Ok(Resolved::Ready(*n)),
            Expr::Var(name) => {
                let index = self
                    .program
                    .choice_index(name)
                    .ok_or_else(|| ExecError::Malformed(format!("undeclared choice `{name}`")))?;
                match self.values[index] {
                    Some(v) => Ok(Resolved::Ready(v)),
                    None => Ok(Resolved::Wait(self.explicit_request(index)?)),
                }
            }
        }
    }

    fn slot_value(&self, expr: &Expr, remaining: usize) -> Result<Resolved<u32>, ExecError> {
        if let Expr::Var(name) = expr {
            if let Some(index) = self.program.choice_index(name) {
                if self.values[index].is_none() && self.program.choices()[index].domain == ChoiceDomain::Internal {
                    let domain = self.config.slot_mode.slot_range(remaining).map(|s| s as u32).collect();
                    return Ok(Resolved::Wait(self.request(index, domain)));
                }
            }
        }
        self.value(expr)
    }

    fn act(&mut self, action: Action, deck: Deck) {
        self.deck = deck;
        self.actions.push(action);
        self.events.push(Event::Action { action, deck: self.deck.clone() });
    }

    fn shrink(&mut self, action: Action) -> Result<(), ExecError> {
        let next = self.deck.tail()?;
        if next.is_empty() {
            return Err(ExecError::Malformed(format!("{action} would empty the deck before the final check")));
        }
        self.act(action, next);
        Ok(())
    }

    fn advance(&mut self) {
        if let Some(frame) = self.frames.last_mut() {
            frame.pc += 1;
        }
    }

    /// Executes `instr` if every value it needs is bound. Nothing is mutated
    /// when a choice is still missing, so the instruction can be retried.
    fn execute(&mut self, instr: &'a Instruction) -> Result<Resolved<()>, ExecError> {
        macro_rules! ready {
            ($e:expr) => {
                match $e? {
                    Resolved::Ready(v) => v,
                    Resolved::Wait(r) => return Ok(Resolved::Wait(r)),
                }
            };
        }
        match instr {
            Instruction::Rotate(count) => {
                let count = ready!(self.value(count));
                self.advance();
                for _ in 0..count {
                    let next = self.deck.rotate_left(1);
                    self.act(Action::Rotate1, next);
                }
            }
            Instruction::MoveBlock { block_len, slot } => {
                let len = ready!(self.value(block_len)) as usize;
                if len >= self.deck.len() {
                    return Err(DeckError::BlockTooLong { block_len: len, len: self.deck.len() }.into());
                }
                let remaining = self.deck.len() - len;
                let slot = ready!(self.slot_value(slot, remaining)) as usize;
                let range = self.config.slot_mode.slot_range(remaining);
                if !range.contains(&slot) {
                    return Err(DeckError::SlotOutOfRange { slot, remaining, max: *range.end() }.into());
                }
                self.advance();
                let next = self.deck.move_block_internal(len, slot)?;
                self.act(Action::MoveBlock { len, slot }, next);
            }
            Instruction::TakeHidden => {
                self.advance();
                self.hidden = self.deck.first();
                self.shrink(Action::TakeHidden)?;
            }
            Instruction::Drop(count) => {
                let count = ready!(self.value(count));
                self.advance();
                for _ in 0..count {
                    self.shrink(Action::Drop1)?;
                }
            }
            Instruction::MoveFirstToEnd => {
                self.advance();
                let next = self.deck.move_first_to_end()?;
                self.act(Action::MoveFirstToEnd, next);
            }
            Instruction::Repeat { times, body } => {
                self.advance();
                if *times > 0 {
                    self.frames.push(Frame { body, pc: 0, reps_left: times - 1 });
                }
            }
            Instruction::IfMale(body) => {
                let gender = self
                    .program
                    .gender_choice()
                    .ok_or_else(|| ExecError::Malformed("if_male without a gender choice".into()))?;
                let name = &self.program.choices()[gender].name;
                let value = ready!(self.value(&Expr::Var(name.clone())));
                self.advance();
                if value == 1 {
                    self.frames.push(Frame { body, pc: 0, reps_left: 0 });
                }
            }
            Instruction::Checkpoint(label) => {
                self.advance();
                let hidden = self.hidden.ok_or_else(|| ExecError::Malformed("checkpoint before take_hidden".into()))?;
                let state = CheckpointState {
                    label: *label,
                    deck: self.deck.clone(),
                    p: self.deck.last() == Some(hidden),
                    empty: false,
                };
                self.checkpoints.push(state.clone());
                self.events.push(Event::Checkpoint(state));
            }
            Instruction::FinalCheck => {
                self.advance();
                let hidden = self.hidden.ok_or_else(|| ExecError::Malformed("final check before take_hidden".into()))?;
                let answer = if self.deck.len() == 1 && self.deck.first() == Some(hidden) { Answer::Yes } else { Answer::No };
                self.final_answer = Some(answer);
                self.events.push(Event::Final(answer));
            }
        }
        Ok(Resolved::Ready(()))
    }

    fn finish(&mut self) -> Result<Progress, ExecError> {
        // choices never consumed on this path still need a value
        if let Some(index) = self.values.iter().position(Option::is_none) {
            let request = self.explicit_request(index)?;
            self.pending = Some(request.clone());
            return Ok(Progress::Pending(request));
        }
        let hidden = self.hidden.ok_or_else(|| ExecError::Malformed("no hidden card taken".into()))?;
        let final_answer = self.final_answer.ok_or_else(|| ExecError::Malformed("no final check".into()))?;
        if let Some(last) = self.checkpoints.last_mut() {
            last.empty = last.deck.len() == 1;
        }
        let record = PathRecord {
            binding: self.binding(),
            hidden,
            checkpoints: self.checkpoints.clone(),
            final_answer,
            actions: self.actions.clone(),
        };
        self.done = Some(record.clone());
        Ok(Progress::Done(record))
    }
}

/// Executes one complete path.
pub fn run_path(program: &TrickProgram, binding: &ChoiceBinding, config: ExecConfig) -> Result<PathRecord, ExecError> {
    Execution::with_binding(program, config, binding)?.run_to_end()
}

/// Error raised while enumerating, with the partial binding that hit it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("path {binding}: {source}")]
pub struct PathError {
    pub binding: ChoiceBinding,
    #[source]
    pub source: ExecError,
}

/// Every path of the program, in lexicographic order over (declaration order,
/// domain order). Slot domains are resolved against the live deck.
pub fn enumerate_paths(program: &TrickProgram, config: ExecConfig) -> Result<Vec<PathRecord>, PathError> {
    let mut found = Vec::new();
    let mut stack = vec![Execution::new(program, config)];
    while let Some(mut exec) = stack.pop() {
        let fail = |exec: &Execution, source| PathError { binding: exec.binding(), source };
        match exec.resume().map_err(|e| fail(&exec, e))? {
            Progress::Done(record) => found.push((exec.order_key().to_vec(), record)),
            Progress::Pending(request) => {
                for &value in request.domain.iter().rev() {
                    let mut branch = exec.clone();
                    branch.choose(value).map_err(|e| fail(&branch, e))?;
                    stack.push(branch);
                }
            }
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(found.into_iter().map(|(_, record)| record).collect())
}

pub fn enumerate_bindings(program: &TrickProgram, config: ExecConfig) -> Result<Vec<ChoiceBinding>, PathError> {
    Ok(enumerate_paths(program, config)?.into_iter().map(|r| r.binding).collect())
}
