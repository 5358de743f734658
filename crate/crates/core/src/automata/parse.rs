//! Line-oriented text format for transducers and automata.
//!
//! ```text
//! transducer            # or `automaton`
//! in 0 1                # symbols are single characters; `in 01` is the same
//! out 0 1               # transducers only
//! states 1 2 3 4
//! initial 1
//! final 1
//! t 1 1 10 2            # src input output dst; `-` is the empty output
//! ```
//!
//! Automata use `t <src> <symbol> <dst>`. `#` starts a comment.

use std::collections::HashMap;

use thiserror::Error;

use super::alphabet::Alphabet;
use super::model::{Automaton, Edge, ModelError, Transducer, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown state {name:?}")]
    UnknownState { line: usize, name: String },
    #[error("line {line}: symbol {symbol:?} is not in the alphabet")]
    UnknownSymbol { line: usize, symbol: char },
    #[error("line {line}: duplicate transition")]
    DuplicateTransition { line: usize },
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Either kind of machine, as found in a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Machine {
    Transducer(Transducer),
    Automaton(Automaton),
}

impl Machine {
    /// The underlying automaton (the input automaton for a transducer).
    pub fn automaton(&self) -> Automaton {
        match self {
            Machine::Transducer(t) => t.input_automaton(),
            Machine::Automaton(a) => a.clone(),
        }
    }
}

#[derive(Default)]
struct Header {
    input: Option<Alphabet>,
    output: Option<Alphabet>,
    states: Option<Vec<String>>,
    index: HashMap<String, usize>,
    initial: Option<Vec<usize>>,
    finals: Option<Vec<usize>>,
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn alphabet(line: usize, tokens: &[&str]) -> Result<Alphabet, ParseError> {
    Alphabet::new(tokens.iter().flat_map(|t| t.chars()))
        .map_err(|c| syntax(line, format!("invalid or repeated symbol {c:?}")))
}

impl Header {
    fn resolve(&self, line: usize, name: &str) -> Result<usize, ParseError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::UnknownState {
                line,
                name: name.to_string(),
            })
    }

    fn states_line(&mut self, line: usize, names: &[&str]) -> Result<(), ParseError> {
        let mut states = Vec::new();
        for &name in names {
            if self.index.insert(name.to_string(), states.len()).is_some() {
                return Err(syntax(line, format!("state {name:?} declared twice")));
            }
            states.push(name.to_string());
        }
        self.states = Some(states);
        Ok(())
    }

    /// Handles a non-transition directive; returns false if the keyword is unknown.
    fn directive(
        &mut self,
        line: usize,
        key: &str,
        args: &[&str],
        with_output: bool,
    ) -> Result<bool, ParseError> {
        let slot_taken = |taken: bool| {
            if taken {
                Err(syntax(line, format!("`{key}` given twice")))
            } else {
                Ok(())
            }
        };
        match key {
            "in" => {
                slot_taken(self.input.is_some())?;
                self.input = Some(alphabet(line, args)?);
            }
            "out" if with_output => {
                slot_taken(self.output.is_some())?;
                self.output = Some(alphabet(line, args)?);
            }
            "states" => {
                slot_taken(self.states.is_some())?;
                self.states_line(line, args)?;
            }
            "initial" | "final" => {
                if self.states.is_none() {
                    return Err(syntax(line, format!("`{key}` before `states`")));
                }
                let ids = args
                    .iter()
                    .map(|n| self.resolve(line, n))
                    .collect::<Result<Vec<_>, _>>()?;
                let slot = if key == "initial" {
                    &mut self.initial
                } else {
                    &mut self.finals
                };
                slot_taken(slot.is_some())?;
                *slot = Some(ids);
            }
            _ => return Ok(false),
        }
        Ok(true)
    }
}

fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    kind: &'static str,
) -> Result<(), ParseError> {
    match lines.next() {
        Some((_, tokens)) if tokens == [kind] => Ok(()),
        Some((line, _)) => Err(syntax(line, format!("expected `{kind}` header"))),
        None => Err(ParseError::Missing(kind)),
    }
}

/// Parses the transducer text format.
pub fn parse_transducer(text: &str) -> Result<Transducer, ParseError> {
    let mut lines = significant_lines(text);
    expect_header(&mut lines, "transducer")?;
    let mut header = Header::default();
    let mut raw: Vec<(usize, Vec<&str>)> = Vec::new();
    for (line, tokens) in lines {
        if tokens[0] == "t" {
            raw.push((line, tokens));
        } else if !header.directive(line, tokens[0], &tokens[1..], true)? {
            return Err(syntax(line, format!("unknown directive `{}`", tokens[0])));
        }
    }
    let input = header.input.clone().ok_or(ParseError::Missing("in"))?;
    let output = header.output.clone().ok_or(ParseError::Missing("out"))?;
    if header.states.is_none() {
        return Err(ParseError::Missing("states"));
    }

    let mut transitions: Vec<Transition> = Vec::new();
    for (line, tokens) in raw {
        if tokens.len() != 5 {
            return Err(syntax(line, "expected `t <src> <input> <output|-> <dst>`"));
        }
        let src = header.resolve(line, tokens[1])?;
        let dst = header.resolve(line, tokens[4])?;
        let mut chars = tokens[2].chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(syntax(line, "input label must be exactly one symbol"));
        };
        let input_symbol = input
            .index_of(c)
            .ok_or(ParseError::UnknownSymbol { line, symbol: c })?;
        let out_word = if tokens[3] == "-" {
            Vec::new()
        } else {
            output
                .parse_word(tokens[3])
                .map_err(|symbol| ParseError::UnknownSymbol { line, symbol })?
        };
        let t = Transition {
            src,
            input: input_symbol,
            output: out_word,
            dst,
        };
        if transitions.contains(&t) {
            return Err(ParseError::DuplicateTransition { line });
        }
        transitions.push(t);
    }
    Ok(Transducer::new(
        header.states.unwrap_or_default(),
        input,
        output,
        transitions,
        header.initial.unwrap_or_default(),
        header.finals.unwrap_or_default(),
    )?)
}

/// Parses the automaton text format.
pub fn parse_automaton(text: &str) -> Result<Automaton, ParseError> {
    let mut lines = significant_lines(text);
    expect_header(&mut lines, "automaton")?;
    let mut header = Header::default();
    let mut raw: Vec<(usize, Vec<&str>)> = Vec::new();
    for (line, tokens) in lines {
        if tokens[0] == "t" {
            raw.push((line, tokens));
        } else if !header.directive(line, tokens[0], &tokens[1..], false)? {
            return Err(syntax(line, format!("unknown directive `{}`", tokens[0])));
        }
    }
    let alphabet = header.input.clone().ok_or(ParseError::Missing("in"))?;
    if header.states.is_none() {
        return Err(ParseError::Missing("states"));
    }
    let mut edges: Vec<Edge> = Vec::new();
    for (line, tokens) in raw {
        if tokens.len() != 4 {
            return Err(syntax(line, "expected `t <src> <symbol> <dst>`"));
        }
        let src = header.resolve(line, tokens[1])?;
        let dst = header.resolve(line, tokens[3])?;
        let mut chars = tokens[2].chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(syntax(line, "label must be exactly one symbol"));
        };
        let symbol = alphabet
            .index_of(c)
            .ok_or(ParseError::UnknownSymbol { line, symbol: c })?;
        let e = Edge { src, symbol, dst };
        if edges.contains(&e) {
            return Err(ParseError::DuplicateTransition { line });
        }
        edges.push(e);
    }
    Ok(Automaton::new(
        header.states.unwrap_or_default(),
        alphabet,
        edges,
        header.initial.unwrap_or_default(),
        header.finals.unwrap_or_default(),
    )?)
}

/// Dispatches on the header line.
pub fn parse_machine(text: &str) -> Result<Machine, ParseError> {
    match significant_lines(text).next() {
        Some((_, tokens)) if tokens == ["transducer"] => {
            parse_transducer(text).map(Machine::Transducer)
        }
        Some((_, tokens)) if tokens == ["automaton"] => {
            parse_automaton(text).map(Machine::Automaton)
        }
        Some((line, _)) => Err(syntax(line, "expected `transducer` or `automaton` header")),
        None => Err(ParseError::Missing("transducer")),
    }
}
