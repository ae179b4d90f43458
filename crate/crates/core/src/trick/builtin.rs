use super::program::{ChoiceDomain, Expr, Instruction, TrickProgram};
use crate::deck::Deck;

/// The torn-card trick: the spectator keeps one half card and, after a
/// sequence of audience-driven rearrangements, the last card left in the
/// magician's hand matches it.
///
/// Choices, in the order the audience makes them: `n1` words in the name,
/// `slot2` where the first three cards go, `n2` native place
/// (1 southerner, 2 northerner, 3 unknown), `slot4` where the first `n2` cards
/// go, `n3` gender (1 male, 2 female).
pub fn shousuigongcishi() -> TrickProgram {
    use Instruction::*;
    let choices = vec![
        ("n1".to_string(), ChoiceDomain::Values(vec![2, 3])),
        ("slot2".to_string(), ChoiceDomain::Internal),
        ("n2".to_string(), ChoiceDomain::Values(vec![1, 2, 3])),
        ("slot4".to_string(), ChoiceDomain::Internal),
        ("n3".to_string(), ChoiceDomain::Values(vec![1, 2])),
    ];
    let instructions = vec![
        Rotate(Expr::var("n1")),
        MoveBlock { block_len: Expr::Lit(3), slot: Expr::var("slot2") },
        TakeHidden,
        MoveBlock { block_len: Expr::var("n2"), slot: Expr::var("slot4") },
        Checkpoint(4),
        Drop(Expr::var("n3")),
        Checkpoint(5),
        Repeat { times: 7, body: vec![MoveFirstToEnd] },
        Checkpoint(6),
        Repeat { times: 4, body: vec![MoveFirstToEnd, Drop(Expr::Lit(1))] },
        Checkpoint(7),
        IfMale(vec![MoveFirstToEnd, Drop(Expr::Lit(1))]),
        Checkpoint(8),
        Checkpoint(9),
        FinalCheck,
    ];
    TrickProgram::new(Deck::canonical(), choices, instructions).expect("builtin trick is valid")
}
