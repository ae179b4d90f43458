use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::deck::Deck;

/// What an audience choice stands for. Drives prompts and value labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChoiceKind {
    NameLength,
    NativePlace,
    Gender,
    InsertSlot,
}

impl ChoiceKind {
    /// Reads a value typed by a spectator: a number, or a label for native
    /// place and gender.
    pub fn parse_value(self, text: &str) -> Option<u32> {
        let text = text.trim();
        if let Ok(n) = text.parse() {
            return Some(n);
        }
        let lower = text.to_ascii_lowercase();
        match (self, lower.as_str()) {
            (ChoiceKind::NativePlace, "southerner" | "south") => Some(1),
            (ChoiceKind::NativePlace, "northerner" | "north") => Some(2),
            (ChoiceKind::NativePlace, "unknown") => Some(3),
            (ChoiceKind::Gender, "male" | "m") => Some(1),
            (ChoiceKind::Gender, "female" | "f") => Some(2),
            _ => None,
        }
    }

    pub fn value_label(self, value: u32) -> Option<&'static str> {
        match (self, value) {
            (ChoiceKind::NativePlace, 1) => Some("southerner"),
            (ChoiceKind::NativePlace, 2) => Some("northerner"),
            (ChoiceKind::NativePlace, 3) => Some("unknown"),
            (ChoiceKind::Gender, 1) => Some("male"),
            (ChoiceKind::Gender, 2) => Some("female"),
            _ => None,
        }
    }

    pub fn prompt(self) -> &'static str {
        match self {
            ChoiceKind::NameLength => "how many words in your name?",
            ChoiceKind::NativePlace => "where are you from? (southerner, northerner, unknown)",
            ChoiceKind::Gender => "male or female?",
            ChoiceKind::InsertSlot => "after which card do you insert the block?",
        }
    }

    fn allowed_values(self) -> Option<std::ops::RangeInclusive<u32>> {
        match self {
            ChoiceKind::NativePlace => Some(1..=3),
            ChoiceKind::Gender => Some(1..=2),
            _ => None,
        }
    }
}

/// Values a choice ranges over. `Internal` is resolved at run time against the
/// live deck at the step that consumes the choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChoiceDomain {
    Values(Vec<u32>),
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceVar {
    pub name: String,
    pub domain: ChoiceDomain,
    pub kind: ChoiceKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(u32),
    Var(String),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(n) => write!(f, "{n}"),
            Expr::Var(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    Rotate(Expr),
    MoveBlock { block_len: Expr, slot: Expr },
    TakeHidden,
    Drop(Expr),
    MoveFirstToEnd,
    Repeat { times: u32, body: Vec<Instruction> },
    IfMale(Vec<Instruction>),
    Checkpoint(u32),
    FinalCheck,
}

impl Instruction {
    fn exprs(&self) -> Vec<&Expr> {
        match self {
            Instruction::Rotate(e) | Instruction::Drop(e) => vec![e],
            Instruction::MoveBlock { block_len, slot } => vec![block_len, slot],
            _ => Vec::new(),
        }
    }

    fn body(&self) -> Option<&[Instruction]> {
        match self {
            Instruction::Repeat { body, .. } | Instruction::IfMale(body) => Some(body),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("initial deck is empty")]
    EmptyDeck,
    #[error("choice `{0}` declared twice")]
    DuplicateChoice(String),
    #[error("choice `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("choice `{name}` value {value} is not a valid {kind:?} value")]
    DomainOutOfRange { name: String, kind: ChoiceKind, value: u32 },
    #[error("instruction {index}: choice `{name}` is not declared")]
    UndeclaredChoice { name: String, index: usize },
    #[error("choice `{name}` uses the `internal` domain but is not a move_block slot")]
    InternalNotSlot { name: String },
    #[error("choice `{name}` uses the `internal` domain and is never consumed")]
    UnusedInternal { name: String },
    #[error("instruction {index}: `internal` slot choice `{name}` must be used at top level")]
    NestedInternalSlot { name: String, index: usize },
    #[error("TakeHidden missing")]
    MissingTakeHidden,
    #[error("instruction {index}: TakeHidden appears more than once")]
    DuplicateTakeHidden { index: usize },
    #[error("instruction {index}: TakeHidden must be at top level")]
    NestedTakeHidden { index: usize },
    #[error("instruction {index}: Checkpoint before TakeHidden")]
    CheckpointBeforeTakeHidden { index: usize },
    #[error("FinalCheck missing")]
    MissingFinalCheck,
    #[error("instruction {index}: FinalCheck must be the last instruction")]
    FinalCheckNotLast { index: usize },
    #[error("instruction {index}: if_male needs exactly one gender choice (found {found})")]
    GenderChoice { index: usize, found: usize },
}

/// A trick: the starting deck, the audience choices it declares, and the
/// instructions to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrickProgram {
    initial_deck: Deck,
    choices: Vec<ChoiceVar>,
    instructions: Vec<Instruction>,
}

fn walk<'a>(instrs: &'a [Instruction], depth: usize, top: usize, f: &mut impl FnMut(&'a Instruction, usize, usize)) {
    for (i, instr) in instrs.iter().enumerate() {
        let top_index = if depth == 0 { i } else { top };
        f(instr, depth, top_index);
        if let Some(body) = instr.body() {
            walk(body, depth + 1, top_index, f);
        }
    }
}

impl TrickProgram {
    /// Builds and validates a program. Choice kinds are inferred: a choice
    /// with the `internal` domain or used as a move_block slot is an insertion
    /// slot, `n2` is the native place, `n3` the gender, anything else a count.
    pub fn new(
        initial_deck: Deck,
        choices: Vec<(String, ChoiceDomain)>,
        instructions: Vec<Instruction>,
    ) -> Result<Self, ValidationError> {
        let mut slot_names = HashSet::new();
        walk(&instructions, 0, 0, &mut |instr, _, _| {
            if let Instruction::MoveBlock { slot: Expr::Var(name), .. } = instr {
                slot_names.insert(name.clone());
            }
        });
        let choices = choices
            .into_iter()
            .map(|(name, domain)| {
                let kind = if domain == ChoiceDomain::Internal || slot_names.contains(&name) {
                    ChoiceKind::InsertSlot
                } else {
                    match name.as_str() {
                        "n2" => ChoiceKind::NativePlace,
                        "n3" => ChoiceKind::Gender,
                        _ => ChoiceKind::NameLength,
                    }
                };
                ChoiceVar { name, domain, kind }
            })
            .collect();
        let program = TrickProgram { initial_deck, choices, instructions };
        program.validate()?;
        Ok(program)
    }

    pub fn initial_deck(&self) -> &Deck {
        &self.initial_deck
    }

    pub fn choices(&self) -> &[ChoiceVar] {
        &self.choices
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn choice_index(&self, name: &str) -> Option<usize> {
        self.choices.iter().position(|c| c.name == name)
    }

    pub fn gender_choice(&self) -> Option<usize> {
        self.choices.iter().position(|c| c.kind == ChoiceKind::Gender)
    }

    /// Declarations in the form `new` accepts.
    pub fn declarations(&self) -> Vec<(String, ChoiceDomain)> {
        self.choices.iter().map(|c| (c.name.clone(), c.domain.clone())).collect()
    }

    /// Rebuilds the program with some pieces replaced.
    pub fn rebuild(
        &self,
        declarations: Vec<(String, ChoiceDomain)>,
        instructions: Vec<Instruction>,
    ) -> Result<Self, ValidationError> {
        TrickProgram::new(self.initial_deck.clone(), declarations, instructions)
    }

    /// Replaces the domain of the named choice.
    pub fn with_domain(&self, name: &str, domain: ChoiceDomain) -> Result<Self, ValidationError> {
        let decls = self
            .declarations()
            .into_iter()
            .map(|(n, d)| if n == name { (n, domain.clone()) } else { (n, d) })
            .collect();
        self.rebuild(decls, self.instructions.clone())
    }

    /// Replaces the domain of every choice of the given kind.
    pub fn with_kind_domain(&self, kind: ChoiceKind, values: Vec<u32>) -> Result<Self, ValidationError> {
        let decls = self
            .choices
            .iter()
            .map(|c| {
                let domain = if c.kind == kind { ChoiceDomain::Values(values.clone()) } else { c.domain.clone() };
                (c.name.clone(), domain)
            })
            .collect();
        self.rebuild(decls, self.instructions.clone())
    }

    fn validate(&self) -> Result<(), ValidationError> {
        if self.initial_deck.is_empty() {
            return Err(ValidationError::EmptyDeck);
        }
        let mut seen = HashSet::new();
        for c in &self.choices {
            if !seen.insert(c.name.as_str()) {
                return Err(ValidationError::DuplicateChoice(c.name.clone()));
            }
            if let ChoiceDomain::Values(values) = &c.domain {
                if values.is_empty() {
                    return Err(ValidationError::EmptyDomain(c.name.clone()));
                }
                if let Some(allowed) = c.kind.allowed_values() {
                    if let Some(&value) = values.iter().find(|v| !allowed.contains(v)) {
                        return Err(ValidationError::DomainOutOfRange { name: c.name.clone(), kind: c.kind, value });
                    }
                }
            }
        }

        let mut error = None;
        let mut hidden_at = None;
        let mut internal_used = HashSet::new();
        let genders = self.choices.iter().filter(|c| c.kind == ChoiceKind::Gender).count();
        walk(&self.instructions, 0, 0, &mut |instr, depth, index| {
            if error.is_some() {
                return;
            }
            for expr in instr.exprs() {
                if let Expr::Var(name) = expr {
                    match self.choices.iter().find(|c| &c.name == name) {
                        None => {
                            error = Some(ValidationError::UndeclaredChoice { name: name.clone(), index });
                            return;
                        }
                        Some(c) if c.domain == ChoiceDomain::Internal => {
                            let is_slot = matches!(instr, Instruction::MoveBlock { slot, .. } if slot == expr);
                            if !is_slot {
                                error = Some(ValidationError::InternalNotSlot { name: name.clone() });
                                return;
                            }
                            if depth > 0 {
                                error = Some(ValidationError::NestedInternalSlot { name: name.clone(), index });
                                return;
                            }
                            internal_used.insert(name.clone());
                        }
                        Some(_) => {}
                    }
                }
            }
            error = match instr {
                Instruction::TakeHidden if depth > 0 => Some(ValidationError::NestedTakeHidden { index }),
                Instruction::TakeHidden if hidden_at.is_some() => Some(ValidationError::DuplicateTakeHidden { index }),
                Instruction::TakeHidden => {
                    hidden_at = Some(index);
                    None
                }
                Instruction::Checkpoint(_) if hidden_at.is_none() => {
                    Some(ValidationError::CheckpointBeforeTakeHidden { index })
                }
                Instruction::FinalCheck if depth > 0 || index + 1 != self.instructions.len() => {
                    Some(ValidationError::FinalCheckNotLast { index })
                }
                Instruction::IfMale(_) if genders != 1 => Some(ValidationError::GenderChoice { index, found: genders }),
                _ => None,
            };
        });
        if let Some(e) = error {
            return Err(e);
        }
        if hidden_at.is_none() {
            return Err(ValidationError::MissingTakeHidden);
        }
        if self.instructions.last() != Some(&Instruction::FinalCheck) {
            return Err(ValidationError::MissingFinalCheck);
        }
        if let Some(c) = self
            .choices
            .iter()
            .find(|c| c.domain == ChoiceDomain::Internal && !internal_used.contains(&c.name))
        {
            return Err(ValidationError::UnusedInternal { name: c.name.clone() });
        }
        Ok(())
    }
}

/// Values chosen for a path, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChoiceBinding {
    assignments: Vec<(String, u32)>,
}

impl ChoiceBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.assignments.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn set(&mut self, name: impl Into<String>, value: u32) {
        let name = name.into();
        match self.assignments.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = value,
            None => self.assignments.push((name, value)),
        }
    }

    pub fn with(mut self, name: impl Into<String>, value: u32) -> Self {
        self.set(name, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.assignments.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, u32)> for ChoiceBinding {
    fn from_iter<I: IntoIterator<Item = (S, u32)>>(iter: I) -> Self {
        let mut binding = ChoiceBinding::new();
        for (n, v) in iter {
            binding.set(n, v);
        }
        binding
    }
}

impl fmt::Display for ChoiceBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (n, v)) in self.assignments.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for ChoiceBinding {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_map(self.assignments.iter().map(|(n, v)| (n, v)))
    }
}
