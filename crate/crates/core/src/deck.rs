//! Card sequences and the primitive rearrangements every trick step is built from.
//!
//! Decks are immutable values: every operation borrows the input and returns a
//! fresh deck.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One half of a torn card. Two halves match when their symbols are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CardSymbol {
    A,
    B,
    C,
    D,
}

impl CardSymbol {
    pub const ALL: [CardSymbol; 4] = [CardSymbol::A, CardSymbol::B, CardSymbol::C, CardSymbol::D];

    pub fn as_char(self) -> char {
        match self {
            CardSymbol::A => 'a',
            CardSymbol::B => 'b',
            CardSymbol::C => 'c',
            CardSymbol::D => 'd',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a' => Some(CardSymbol::A),
            'b' => Some(CardSymbol::B),
            'c' => Some(CardSymbol::C),
            'd' => Some(CardSymbol::D),
            _ => None,
        }
    }
}

impl fmt::Display for CardSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for CardSymbol {
    type Err = DeckError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => CardSymbol::from_char(c).ok_or_else(|| DeckError::UnknownSymbol(s.to_string())),
            _ => Err(DeckError::UnknownSymbol(s.to_string())),
        }
    }
}

impl Serialize for CardSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut buf = [0u8; 4];
        serializer.serialize_str(self.as_char().encode_utf8(&mut buf))
    }
}

impl<'de> Deserialize<'de> for CardSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeckError {
    #[error("operation requires a nonempty deck")]
    EmptyDeck,
    #[error("block of {block_len} cards cannot be moved within a deck of {len}")]
    BlockTooLong { block_len: usize, len: usize },
    #[error("insertion slot {slot} out of range 1..={max} for {remaining} remaining cards")]
    SlotOutOfRange { slot: usize, remaining: usize, max: usize },
    #[error("unknown card symbol `{0}`")]
    UnknownSymbol(String),
}

/// Number of gaps strictly between `remaining_len` cards.
pub fn internal_slot_count(remaining_len: usize) -> usize {
    remaining_len.saturating_sub(1)
}

/// An ordered sequence of half cards, front of the deck first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Deck {
    cards: Vec<CardSymbol>,
}

impl Deck {
    pub fn new(cards: Vec<CardSymbol>) -> Self {
        Deck { cards }
    }

    /// The eight-card input `a b c d a b c d`.
    pub fn canonical() -> Self {
        let mut cards = CardSymbol::ALL.to_vec();
        cards.extend_from_slice(&CardSymbol::ALL);
        Deck { cards }
    }

    pub fn cards(&self) -> &[CardSymbol] {
        &self.cards
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }

    pub fn first(&self) -> Option<CardSymbol> {
        self.cards.first().copied()
    }

    pub fn last(&self) -> Option<CardSymbol> {
        self.cards.last().copied()
    }

    /// Count of each symbol, indexed in `CardSymbol::ALL` order.
    pub fn symbol_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for card in &self.cards {
            counts[*card as usize] += 1;
        }
        counts
    }

    /// Cyclic left shift by `k mod len`. The empty deck rotates to itself.
    pub fn rotate_left(&self, k: usize) -> Deck {
        let mut cards = self.cards.clone();
        if !cards.is_empty() {
            let shift = k % cards.len();
            cards.rotate_left(shift);
        }
        Deck { cards }
    }

    /// The deck without its first card.
    pub fn tail(&self) -> Result<Deck, DeckError> {
        match self.cards.split_first() {
            Some((_, rest)) => Ok(Deck { cards: rest.to_vec() }),
            None => Err(DeckError::EmptyDeck),
        }
    }

    pub fn move_first_to_end(&self) -> Result<Deck, DeckError> {
        if self.is_empty() {
            return Err(DeckError::EmptyDeck);
        }
        Ok(self.rotate_left(1))
    }

    /// Lifts the first `block_len` cards as one block and inserts it, in order,
    /// after the `slot`-th of the remaining cards. Only internal gaps are legal,
    /// so the block never ends up at the very front or the very back.
    pub fn move_block_internal(&self, block_len: usize, slot: usize) -> Result<Deck, DeckError> {
        if block_len >= self.len() {
            return Err(DeckError::BlockTooLong { block_len, len: self.len() });
        }
        let remaining = self.len() - block_len;
        let max = internal_slot_count(remaining);
        if slot < 1 || slot > max {
            return Err(DeckError::SlotOutOfRange { slot, remaining, max });
        }
        let (block, rest) = self.cards.split_at(block_len);
        let mut cards = Vec::with_capacity(self.len());
        cards.extend_from_slice(&rest[..slot]);
        cards.extend_from_slice(block);
        cards.extend_from_slice(&rest[slot..]);
        Ok(Deck { cards })
    }
}

impl From<Vec<CardSymbol>> for Deck {
    fn from(cards: Vec<CardSymbol>) -> Self {
        Deck::new(cards)
    }
}

impl fmt::Display for Deck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, card) in self.cards.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{card}")?;
        }
        Ok(())
    }
}

impl FromStr for Deck {
    type Err = DeckError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(Deck::new)
    }
}

impl Serialize for Deck {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Deck {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
