use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Atomic propositions observed at checkpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prop {
    /// The last card of the live deck matches the hidden card.
    P,
    /// Final checkpoint of the path with a single card left.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CtlFormula {
    Atom(Prop),
    Not(Box<CtlFormula>),
    And(Box<CtlFormula>, Box<CtlFormula>),
    Or(Box<CtlFormula>, Box<CtlFormula>),
    AF(Box<CtlFormula>),
    AG(Box<CtlFormula>),
    EF(Box<CtlFormula>),
    EG(Box<CtlFormula>),
}

impl CtlFormula {
    pub fn p() -> Self {
        CtlFormula::Atom(Prop::P)
    }

    pub fn empty() -> Self {
        CtlFormula::Atom(Prop::Empty)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        CtlFormula::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        CtlFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        CtlFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn af(self) -> Self {
        CtlFormula::AF(Box::new(self))
    }

    pub fn ag(self) -> Self {
        CtlFormula::AG(Box::new(self))
    }

    pub fn ef(self) -> Self {
        CtlFormula::EF(Box::new(self))
    }

    pub fn eg(self) -> Self {
        CtlFormula::EG(Box::new(self))
    }
}

impl fmt::Display for CtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtlFormula::Atom(Prop::P) => f.write_str("p"),
            CtlFormula::Atom(Prop::Empty) => f.write_str("empty"),
            CtlFormula::Not(g) => write!(f, "!{g}"),
            CtlFormula::And(a, b) => write!(f, "({a} & {b})"),
            CtlFormula::Or(a, b) => write!(f, "({a} | {b})"),
            CtlFormula::AF(g) => write!(f, "AF {g}"),
            CtlFormula::AG(g) => write!(f, "AG {g}"),
            CtlFormula::EF(g) => write!(f, "EF {g}"),
            CtlFormula::EG(g) => write!(f, "EG {g}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula error at column {column}: {message}")]
pub struct FormulaError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    P,
    Empty,
    Not,
    And,
    Or,
    LParen,
    RParen,
    Op(&'static str),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let column = i + 1;
        match chars[i] {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => out.push((Tok::Not, column)),
            '&' => out.push((Tok::And, column)),
            '|' => out.push((Tok::Or, column)),
            '(' => out.push((Tok::LParen, column)),
            ')' => out.push((Tok::RParen, column)),
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let mut word: String = chars[start..i].iter().collect();
                let mut col = column;
                // operators may be glued to their operand, as in `AFp`
                while let Some(op) = ["AF", "AG", "EF", "EG"].into_iter().find(|op| word.starts_with(op)) {
                    out.push((Tok::Op(op), col));
                    word.drain(..2);
                    col += 2;
                }
                match word.as_str() {
                    "" => {}
                    "p" => out.push((Tok::P, col)),
                    "empty" => out.push((Tok::Empty, col)),
                    other => {
                        return Err(FormulaError { column: col, message: format!("unknown name `{other}`") });
                    }
                }
                continue;
            }
            other => return Err(FormulaError { column, message: format!("unexpected character `{other}`") }),
        }
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> (Tok, usize) {
        self.tokens[self.pos]
    }

    fn bump(&mut self) {
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
    }

    fn fail<T>(&self, expected: &str) -> Result<T, FormulaError> {
        let (tok, column) = self.peek();
        let found = if tok == Tok::End { "end of input".to_string() } else { format!("{tok:?}") };
        Err(FormulaError { column, message: format!("expected {expected}, found {found}") })
    }

    fn or(&mut self) -> Result<CtlFormula, FormulaError> {
        let mut lhs = self.and()?;
        while self.peek().0 == Tok::Or {
            self.bump();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<CtlFormula, FormulaError> {
        let mut lhs = self.unary()?;
        while self.peek().0 == Tok::And {
            self.bump();
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<CtlFormula, FormulaError> {
        match self.peek().0 {
            Tok::Not => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Op(op) => {
                self.bump();
                let inner = self.unary()?;
                Ok(match op {
                    "AF" => inner.af(),
                    "AG" => inner.ag(),
                    "EF" => inner.ef(),
                    _ => inner.eg(),
                })
            }
            Tok::P => {
                self.bump();
                Ok(CtlFormula::p())
            }
            Tok::Empty => {
                self.bump();
                Ok(CtlFormula::empty())
            }
            Tok::LParen => {
                self.bump();
                let inner = self.or()?;
                if self.peek().0 != Tok::RParen {
                    return self.fail("`)`");
                }
                self.bump();
                Ok(inner)
            }
            _ => self.fail("`p`, `empty`, `!`, `(` or a temporal operator"),
        }
    }
}

impl FromStr for CtlFormula {
    type Err = FormulaError;

    /// Surface syntax: `p`, `empty`, `!f`, `f & g`, `f | g`, `AF f`, `AG f`,
    /// `EF f`, `EG f` and parentheses. Unary operators bind tightest, then
    /// `&`, then `|`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = Parser { tokens: lex(s)?, pos: 0 };
        let formula = parser.or()?;
        if parser.peek().0 != Tok::End {
            return parser.fail("end of input");
        }
        Ok(formula)
    }
}
