//! The `.trick` script format.
//!
//! ```text
//! script := line* ;  line := comment | stmt ;
//! stmt   := "deck" symbol+
//!         | "choice" ident "in" "{" ( int ("," int)* | "internal" ) "}"
//!         | "rotate" expr | "move_block" expr "slot" expr | "take_hidden"
//!         | "drop" expr | "move_first_to_end"
//!         | "repeat" int "{" stmt* "}" | "if_male" "{" stmt* "}"
//!         | "checkpoint" int | "final_check" ;
//! expr   := int | ident ;  comment := "#" any* .
//! ```
//!
//! Keywords are case-sensitive. Line breaks are plain whitespace; every
//! statement is self-delimiting, so one token of lookahead is enough.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::deck::{CardSymbol, Deck};
use crate::trick::{ChoiceDomain, Expr, Instruction, TrickProgram, ValidationError};

const KEYWORDS: &[&str] = &[
    "deck",
    "choice",
    "in",
    "internal",
    "rotate",
    "move_block",
    "slot",
    "take_hidden",
    "drop",
    "move_first_to_end",
    "repeat",
    "if_male",
    "checkpoint",
    "final_check",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("invalid trick: {0}")]
    Validation(#[from] ValidationError),
}

/// Script text plus where it came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptSource {
    pub text: String,
    pub origin: String,
}

impl ScriptSource {
    pub fn inline(text: impl Into<String>) -> Self {
        ScriptSource { text: text.into(), origin: "<inline>".into() }
    }

    pub fn load(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref();
        Ok(ScriptSource { text: fs::read_to_string(path)?, origin: path.display().to_string() })
    }

    pub fn parse(&self) -> Result<TrickProgram, DslError> {
        parse(&self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(u32),
    LBrace,
    RBrace,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut last_line = 1;
    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        last_line = line_no;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let at = |tok| Token { tok, line: line_no, column };
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '{' => {
                    tokens.push(at(Tok::LBrace));
                    i += 1;
                }
                '}' => {
                    tokens.push(at(Tok::RBrace));
                    i += 1;
                }
                ',' => {
                    tokens.push(at(Tok::Comma));
                    i += 1;
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[start..i].iter().collect();
                    let value = digits.parse().map_err(|_| ParseError {
                        line: line_no,
                        column,
                        message: format!("integer `{digits}` is too large"),
                        expected: vec![],
                    })?;
                    tokens.push(at(Tok::Int(value)));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    tokens.push(at(Tok::Word(chars[start..i].iter().collect())));
                }
                other => {
                    return Err(ParseError {
                        line: line_no,
                        column,
                        message: format!("unexpected character `{other}`"),
                        expected: vec![],
                    })
                }
            }
        }
    }
    let eof_column = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    tokens.push(Token { tok: Tok::Eof, line: last_line, column: eof_column });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

enum Stmt {
    Deck(Deck, Token),
    Choice(String, ChoiceDomain, Token),
    Instr(Instruction),
}

#[derive(Default)]
struct Script {
    deck: Option<Deck>,
    choices: Vec<(String, ChoiceDomain)>,
    instructions: Vec<Instruction>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn error_at(token: &Token, message: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError {
            line: token.line,
            column: token.column,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let token = self.peek();
        Self::error_at(token, format!("unexpected {}", token.tok.describe()), expected)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match &self.peek().tok {
            Tok::Word(w) if w == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&[kw])),
        }
    }

    fn punct(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn int(&mut self) -> Result<u32, ParseError> {
        match self.peek().tok {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Word(w) if !KEYWORDS.contains(&w.as_str()) => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match &self.peek().tok {
            Tok::Int(_) => self.int().map(Expr::Lit),
            Tok::Word(w) if !KEYWORDS.contains(&w.as_str()) => self.ident().map(Expr::Var),
            _ => Err(self.unexpected(&["integer", "identifier"])),
        }
    }

    fn block(&mut self) -> Result<Vec<Instruction>, ParseError> {
        self.punct(Tok::LBrace, "`{`")?;
        let mut body = Vec::new();
        loop {
            match self.peek().tok {
                Tok::RBrace => {
                    self.bump();
                    return Ok(body);
                }
                Tok::Eof => return Err(self.unexpected(&["`}`", "statement keyword"])),
                _ => match self.statement()? {
                    Stmt::Instr(instr) => body.push(instr),
                    Stmt::Deck(_, token) | Stmt::Choice(_, _, token) => {
                        return Err(Self::error_at(&token, "declarations are only allowed at top level", &[]));
                    }
                },
            }
        }
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        let token = self.peek().clone();
        let Tok::Word(word) = &token.tok else {
            return Err(self.unexpected(&["statement keyword"]));
        };
        let instr = match word.as_str() {
            "deck" => {
                self.bump();
                return Ok(Stmt::Deck(self.deck_symbols()?, token));
            }
            "choice" => {
                self.bump();
                let name = self.ident()?;
                let domain = self.domain()?;
                return Ok(Stmt::Choice(name, domain, token));
            }
            "rotate" => {
                self.bump();
                Instruction::Rotate(self.expr()?)
            }
            "move_block" => {
                self.bump();
                let block_len = self.expr()?;
                self.keyword("slot")?;
                let slot = self.expr()?;
                Instruction::MoveBlock { block_len, slot }
            }
            "take_hidden" => {
                self.bump();
                Instruction::TakeHidden
            }
            "drop" => {
                self.bump();
                Instruction::Drop(self.expr()?)
            }
            "move_first_to_end" => {
                self.bump();
                Instruction::MoveFirstToEnd
            }
            "repeat" => {
                self.bump();
                let times = self.int()?;
                let body = self.block()?;
                Instruction::Repeat { times, body }
            }
            "if_male" => {
                self.bump();
                Instruction::IfMale(self.block()?)
            }
            "checkpoint" => {
                self.bump();
                Instruction::Checkpoint(self.int()?)
            }
            "final_check" => {
                self.bump();
                Instruction::FinalCheck
            }
            _ => {
                return Err(Self::error_at(&token, format!("unknown statement `{word}`"), &["statement keyword"]));
            }
        };
        Ok(Stmt::Instr(instr))
    }

    fn deck_symbols(&mut self) -> Result<Deck, ParseError> {
        let mut cards = Vec::new();
        while let Tok::Word(w) = &self.peek().tok {
            let mut chars = w.chars();
            match (chars.next().and_then(CardSymbol::from_char), chars.next()) {
                (Some(card), None) => {
                    cards.push(card);
                    self.bump();
                }
                _ => break,
            }
        }
        if cards.is_empty() {
            return Err(self.unexpected(&["card symbol (a, b, c, d)"]));
        }
        Ok(Deck::new(cards))
    }

    fn domain(&mut self) -> Result<ChoiceDomain, ParseError> {
        self.keyword("in")?;
        self.punct(Tok::LBrace, "`{`")?;
        if matches!(&self.peek().tok, Tok::Word(w) if w == "internal") {
            self.bump();
            self.punct(Tok::RBrace, "`}`")?;
            return Ok(ChoiceDomain::Internal);
        }
        let mut values = vec![self.int().map_err(|_| self.unexpected(&["integer", "`internal`"]))?];
        loop {
            match self.peek().tok {
                Tok::Comma => {
                    self.bump();
                    values.push(self.int()?);
                }
                Tok::RBrace => {
                    self.bump();
                    return Ok(ChoiceDomain::Values(values));
                }
                _ => return Err(self.unexpected(&["`,`", "`}`"])),
            }
        }
    }
}

/// Parses and validates a trick script.
pub fn parse(text: &str) -> Result<TrickProgram, DslError> {
    let mut parser = Parser { tokens: lex(text)?, pos: 0 };
    let mut script = Script::default();
    while parser.peek().tok != Tok::Eof {
        if parser.peek().tok == Tok::RBrace {
            return Err(parser.unexpected(&["statement keyword"]).into());
        }
        match parser.statement()? {
            Stmt::Instr(instr) => script.instructions.push(instr),
            Stmt::Deck(deck, token) => {
                if script.deck.is_some() {
                    return Err(Parser::error_at(&token, "deck declared twice", &[]).into());
                }
                script.deck = Some(deck);
            }
            Stmt::Choice(name, domain, token) => {
                if script.choices.iter().any(|(n, _)| *n == name) {
                    return Err(Parser::error_at(&token, format!("choice `{name}` declared twice"), &[]).into());
                }
                script.choices.push((name, domain));
            }
        }
    }
    let deck = script.deck.unwrap_or_else(Deck::canonical);
    Ok(TrickProgram::new(deck, script.choices, script.instructions)?)
}

/// Canonical script text for a program; `parse` reads it back to an equal
/// program.
pub fn pretty_print(program: &TrickProgram) -> String {
    let mut out = String::from("# trick script\n");
    out.push_str(&format!("deck {}\n", program.initial_deck()));
    for choice in program.choices() {
        let domain = match &choice.domain {
            ChoiceDomain::Internal => "internal".to_string(),
            ChoiceDomain::Values(values) => values.iter().map(u32::to_string).collect::<Vec<_>>().join(", "),
        };
        out.push_str(&format!("choice {} in {{{}}}\n", choice.name, domain));
    }
    print_block(program.instructions(), 0, &mut out);
    out
}

fn print_block(instrs: &[Instruction], depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    for instr in instrs {
        out.push_str(&indent);
        match instr {
            Instruction::Rotate(e) => out.push_str(&format!("rotate {e}\n")),
            Instruction::MoveBlock { block_len, slot } => out.push_str(&format!("move_block {block_len} slot {slot}\n")),
            Instruction::TakeHidden => out.push_str("take_hidden\n"),
            Instruction::Drop(e) => out.push_str(&format!("drop {e}\n")),
            Instruction::MoveFirstToEnd => out.push_str("move_first_to_end\n"),
            Instruction::Repeat { times, body } => {
                out.push_str(&format!("repeat {times} {{\n"));
                print_block(body, depth + 1, out);
                out.push_str(&indent);
                out.push_str("}\n");
            }
            Instruction::IfMale(body) => {
                out.push_str("if_male {\n");
                print_block(body, depth + 1, out);
                out.push_str(&indent);
                out.push_str("}\n");
            }
            Instruction::Checkpoint(label) => out.push_str(&format!("checkpoint {label}\n")),
            Instruction::FinalCheck => out.push_str("final_check\n"),
        }
    }
}
