#![allow(dead_code)]

use proptest::prelude::*;
use trickcheck::ctl::CtlFormula;
use trickcheck::trick::{ChoiceDomain, Expr, Instruction, TrickProgram};
use trickcheck::{CardSymbol, Deck};

pub const SHIPPED_SCRIPT: &str = include_str!("../../../../tricks/shousuigongcishi.trick");

#[derive(Debug, Clone)]
pub struct ProgramSeed {
    pub cards: Vec<CardSymbol>,
    pub counts: Vec<u32>,
    pub genders: Vec<u32>,
    pub hide_after: usize,
    pub ops: Vec<(u8, u8)>,
}

fn seed() -> impl Strategy<Value = ProgramSeed> {
    (
        prop::collection::vec(prop::sample::select(CardSymbol::ALL.to_vec()), 4..=8),
        prop::sample::subsequence(vec![0u32, 1, 2, 3, 4], 1..=3),
        prop::sample::subsequence(vec![1u32, 2], 1..=2),
        0usize..4,
        prop::collection::vec((0u8..9, any::<u8>()), 0..10),
    )
        .prop_map(|(cards, counts, genders, hide_after, ops)| ProgramSeed { cards, counts, genders, hide_after, ops })
}

/// Turns a seed into a valid program that runs without errors on every path.
/// Lengths are tracked as the minimum over paths so drops never empty the
/// deck and every block move has at least one internal gap.
pub fn build(seed: &ProgramSeed) -> TrickProgram {
    let mut min_len = seed.cards.len();
    let mut instrs = Vec::new();
    let mut slots = 0;
    let mut uses_count = false;
    let mut uses_gender = false;
    let mut hidden = false;
    let mut label = 4;
    let hide_at = seed.hide_after.min(seed.ops.len());

    for (i, &(kind, arg)) in seed.ops.iter().enumerate() {
        if i == hide_at {
            instrs.push(Instruction::TakeHidden);
            min_len -= 1;
            hidden = true;
        }
        // cards that must survive: one for the hidden card until it is taken
        let floor = if hidden { 1 } else { 2 };
        match kind {
            0 => instrs.push(Instruction::Rotate(Expr::Lit(arg as u32 % 6))),
            1 => {
                uses_count = true;
                instrs.push(Instruction::Rotate(Expr::var("k")));
            }
            2 => instrs.push(Instruction::MoveFirstToEnd),
            3 if min_len >= 3 && slots < 2 => {
                let block = 1 + arg as usize % (min_len - 2);
                instrs.push(Instruction::MoveBlock {
                    block_len: Expr::Lit(block as u32),
                    slot: Expr::var(format!("s{slots}")),
                });
                slots += 1;
            }
            4 if min_len > floor => {
                instrs.push(Instruction::Drop(Expr::Lit(1)));
                min_len -= 1;
            }
            5 => {
                let body = if arg % 2 == 0 { vec![Instruction::MoveFirstToEnd] } else { vec![Instruction::Rotate(Expr::Lit(2))] };
                instrs.push(Instruction::Repeat { times: arg as u32 % 3, body });
            }
            6 => {
                uses_gender = true;
                let mut body = vec![Instruction::MoveFirstToEnd];
                if min_len > floor && arg % 2 == 0 {
                    body.push(Instruction::Drop(Expr::Lit(1)));
                    min_len -= 1;
                }
                instrs.push(Instruction::IfMale(body));
            }
            7 if min_len >= floor + 2 => {
                uses_gender = true;
                instrs.push(Instruction::Drop(Expr::var("n3")));
                min_len -= 2;
            }
            _ if hidden => {
                instrs.push(Instruction::Checkpoint(label));
                label += 1;
            }
            _ => {}
        }
    }
    if !hidden {
        instrs.push(Instruction::TakeHidden);
    }
    instrs.push(Instruction::Checkpoint(label));
    instrs.push(Instruction::FinalCheck);

    let mut choices = Vec::new();
    if uses_count {
        choices.push(("k".to_string(), ChoiceDomain::Values(seed.counts.clone())));
    }
    for s in 0..slots {
        choices.push((format!("s{s}"), ChoiceDomain::Internal));
    }
    if uses_gender {
        choices.push(("n3".to_string(), ChoiceDomain::Values(seed.genders.clone())));
    }
    TrickProgram::new(Deck::new(seed.cards.clone()), choices, instrs).expect("generated program is valid")
}

pub fn arb_program() -> impl Strategy<Value = TrickProgram> {
    seed().prop_map(|s| build(&s))
}

pub fn arb_formula() -> impl Strategy<Value = CtlFormula> {
    let leaf = prop_oneof![Just(CtlFormula::p()), Just(CtlFormula::empty())];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(CtlFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            inner.clone().prop_map(CtlFormula::af),
            inner.clone().prop_map(CtlFormula::ag),
            inner.clone().prop_map(CtlFormula::ef),
            inner.prop_map(CtlFormula::eg),
        ]
    })
}
