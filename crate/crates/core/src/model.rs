//! VASS data model, the textual input language and the update/incidence matrices.
//!
//! The input language is line oriented; `#` starts a comment:
//!
//! ```text
//! vass dim 2
//! state q1 q2
//! trans t1: q1 -> q2 [-1, 1]
//! trans t2: q2 -> q1 [0, 0]
//! trans t3: q2 -> q2 [0, -1]
//! ```

use std::collections::HashMap;
use std::fmt;

use num::{BigInt, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::rational::{RatMatrix, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(
        "line {line}: transition `{transition}` has {found} update entries, expected {expected}"
    )]
    DimensionMismatch {
        line: usize,
        transition: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unknown state `{name}`")]
    UnknownState { line: usize, name: String },
    #[error("state without outgoing transition: `{0}`")]
    NoOutgoing(String),
    #[error("line {line}: duplicate {what} `{name}`")]
    Duplicate {
        line: usize,
        what: &'static str,
        name: String,
    },
    #[error("missing `vass dim <d>` header")]
    MissingHeader,
    #[error("a VASS needs at least one state")]
    NoStates,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    /// Stable identifier, assigned in declaration order of the original input and
    /// preserved by every restriction to a sub-VASS.
    pub id: usize,
    pub label: String,
    /// Index into the owning [`Vass`]'s state list.
    pub source: usize,
    pub target: usize,
    pub update: Vec<BigInt>,
}

impl Transition {
    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }
}

/// A `dim`-dimensional VASS. Every state has at least one outgoing transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vass {
    dim: usize,
    states: Vec<String>,
    transitions: Vec<Transition>,
}

/// A configuration `p·v`: state index plus counter values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub state: usize,
    pub counters: Vec<u64>,
}

impl Config {
    pub fn uniform(state: usize, dim: usize, n: u64) -> Self {
        Config {
            state,
            counters: vec![n; dim],
        }
    }

    /// `|p·v|`, the largest counter.
    pub fn size(&self) -> u64 {
        self.counters.iter().copied().max().unwrap_or(0)
    }
}

impl Vass {
    /// Builds a VASS and checks well-formedness. Transition ids are kept as given.
    pub fn new(
        dim: usize,
        states: Vec<String>,
        transitions: Vec<Transition>,
    ) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        for t in &transitions {
            if t.update.len() != dim {
                return Err(ModelError::DimensionMismatch {
                    line: 0,
                    transition: t.label.clone(),
                    expected: dim,
                    found: t.update.len(),
                });
            }
            for s in [t.source, t.target] {
                if s >= states.len() {
                    return Err(ModelError::UnknownState {
                        line: 0,
                        name: format!("#{s}"),
                    });
                }
            }
        }
        let v = Vass {
            dim,
            states,
            transitions,
        };
        if let Some(p) = (0..v.states.len()).find(|&p| v.outgoing(p).next().is_none()) {
            return Err(ModelError::NoOutgoing(v.states[p].clone()));
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Position of the transition with the given stable id.
    pub fn position_of(&self, id: usize) -> Option<usize> {
        self.transitions.iter().position(|t| t.id == id)
    }

    pub fn transition_by_id(&self, id: usize) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.id == id)
    }

    pub fn transition_ids(&self) -> Vec<usize> {
        self.transitions.iter().map(|t| t.id).collect()
    }

    pub fn outgoing(&self, state: usize) -> impl Iterator<Item = &Transition> + '_ {
        self.transitions.iter().filter(move |t| t.source == state)
    }

    /// The sub-VASS over `states` (indices into `self`) keeping transitions with
    /// ids in `keep` whose endpoints both lie in `states`. Transition ids are preserved.
    pub fn restrict(&self, states: &[usize], keep: &[usize]) -> Result<Vass, ModelError> {
        let remap: HashMap<usize, usize> = states
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let transitions = self
            .transitions
            .iter()
            .filter(|t| keep.contains(&t.id))
            .filter_map(|t| {
                Some(Transition {
                    source: *remap.get(&t.source)?,
                    target: *remap.get(&t.target)?,
                    ..t.clone()
                })
            })
            .collect();
        Vass::new(
            self.dim,
            states.iter().map(|&s| self.states[s].clone()).collect(),
            transitions,
        )
    }

    /// Update matrix `U` (`dim × |T|`): column `t` is the update of transition `t`.
    pub fn update_matrix(&self) -> RatMatrix {
        let mut u = RatMatrix::zeros(
            (1..=self.dim).map(|i| format!("x{i}")).collect(),
            self.transitions.iter().map(|t| t.label.clone()).collect(),
        );
        for (j, t) in self.transitions.iter().enumerate() {
            for (i, x) in t.update.iter().enumerate() {
                u.set(i, j, Rational::from_integer(x.clone()));
            }
        }
        u
    }

    /// Oriented incidence matrix `F` (`|Q| × |T|`): `+1` at the source and `-1` at
    /// the target of every transition that is not a self-loop.
    pub fn incidence_matrix(&self) -> RatMatrix {
        let mut f = RatMatrix::zeros(
            self.states.clone(),
            self.transitions.iter().map(|t| t.label.clone()).collect(),
        );
        for (j, t) in self.transitions.iter().enumerate() {
            if !t.is_self_loop() {
                f.set(t.source, j, Rational::from_integer(1.into()));
                f.set(t.target, j, Rational::from_integer((-1).into()));
            }
        }
        f
    }

    /// Largest absolute value among all update entries.
    pub fn max_update(&self) -> BigInt {
        self.transitions
            .iter()
            .flat_map(|t| t.update.iter())
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Takes transition `t` from `c`, or `None` if `t` does not leave `c.state` or a
    /// counter would drop below zero.
    pub fn fire(&self, c: &Config, t: &Transition) -> Option<Config> {
        if t.source != c.state {
            return None;
        }
        let counters = c
            .counters
            .iter()
            .zip(&t.update)
            .map(|(&x, u)| (BigInt::from(x) + u).to_u64())
            .collect::<Option<Vec<u64>>>()?;
        Some(Config {
            state: t.target,
            counters,
        })
    }

    /// Updates narrowed to `i64`, for the explicit-state search.
    pub fn small_updates(&self) -> Option<Vec<Vec<i64>>> {
        self.transitions
            .iter()
            .map(|t| t.update.iter().map(|x| x.to_i64()).collect())
            .collect()
    }
}

impl fmt::Display for Vass {
    /// Canonical printer; `parse_vass` accepts its output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vass dim {}", self.dim)?;
        writeln!(f, "state {}", self.states.join(" "))?;
        for t in &self.transitions {
            let upd: Vec<String> = t.update.iter().map(|x| x.to_string()).collect();
            writeln!(
                f,
                "trans {}: {} -> {} [{}]",
                t.label,
                self.states[t.source],
                self.states[t.target],
                upd.join(", ")
            )?;
        }
        Ok(())
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '.')
}

/// Tokenizer over a single line, tracking 1-based columns.
struct Cursor<'a> {
    line_no: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> ModelError {
        ModelError::Syntax {
            line: self.line_no,
            column: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn ident(&mut self) -> Result<&'a str, ModelError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if is_ident_start(c) => self.pos += c.len_utf8(),
            _ => return Err(self.err("expected identifier")),
        }
        while let Some(c) = self.peek() {
            if is_ident_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        Ok(&self.text[start..self.pos])
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ModelError> {
        let save = self.pos;
        match self.ident() {
            Ok(w) if w == kw => Ok(()),
            _ => {
                self.pos = save;
                self.skip_ws();
                Err(self.err(format!("expected `{kw}`")))
            }
        }
    }

    fn symbol(&mut self, sym: &str) -> Result<(), ModelError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(sym) {
            self.pos += sym.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{sym}`")))
        }
    }

    fn integer(&mut self) -> Result<BigInt, ModelError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('-' | '+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return Err(self.err("expected integer"));
        }
        Ok(self.text[start..self.pos].parse().expect("digits"))
    }
}

/// Parses the VASS input language. Transitions get ids `0..|T|` in declaration order.
pub fn parse_vass(text: &str) -> Result<Vass, ModelError> {
    let mut dim: Option<usize> = None;
    let mut states: Vec<String> = Vec::new();
    let mut transitions: Vec<Transition> = Vec::new();
    // (line, src, dst) names kept so unknown states can be reported by line
    let mut pending: Vec<(usize, String, String, Vec<BigInt>, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor {
            line_no,
            text: line,
            pos: 0,
        };
        if cur.at_end() {
            continue;
        }
        let head = cur.ident()?;
        match head {
            "vass" => {
                if dim.is_some() {
                    return Err(cur.err("duplicate `vass dim` header"));
                }
                cur.keyword("dim")?;
                let d = cur.integer()?;
                let d = d
                    .to_usize()
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| cur.err("dimension must be a positive integer"))?;
                dim = Some(d);
            }
            "state" => {
                if dim.is_none() {
                    return Err(ModelError::MissingHeader);
                }
                let mut any = false;
                while !cur.at_end() {
                    let name = cur.ident()?;
                    if states.iter().any(|s| s == name) {
                        return Err(ModelError::Duplicate {
                            line: line_no,
                            what: "state",
                            name: name.to_string(),
                        });
                    }
                    states.push(name.to_string());
                    any = true;
                }
                if !any {
                    return Err(cur.err("expected at least one state name"));
                }
            }
            "trans" => {
                let d = dim.ok_or(ModelError::MissingHeader)?;
                let label = cur.ident()?.to_string();
                cur.symbol(":")?;
                let src = cur.ident()?.to_string();
                cur.symbol("->")?;
                let dst = cur.ident()?.to_string();
                cur.symbol("[")?;
                let mut update = Vec::new();
                cur.skip_ws();
                if cur.peek() != Some(']') {
                    loop {
                        update.push(cur.integer()?);
                        cur.skip_ws();
                        if cur.peek() == Some(',') {
                            cur.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                cur.symbol("]")?;
                if !cur.at_end() {
                    return Err(cur.err("unexpected trailing input"));
                }
                if update.len() != d {
                    return Err(ModelError::DimensionMismatch {
                        line: line_no,
                        transition: label,
                        expected: d,
                        found: update.len(),
                    });
                }
                if pending.iter().any(|p| p.4 == label) {
                    return Err(ModelError::Duplicate {
                        line: line_no,
                        what: "transition",
                        name: label,
                    });
                }
                pending.push((line_no, src, dst, update, label));
            }
            other => {
                cur.pos = 0;
                cur.skip_ws();
                return Err(cur.err(format!("unknown item `{other}`")));
            }
        }
        if !cur.at_end() {
            return Err(cur.err("unexpected trailing input"));
        }
    }

    let dim = dim.ok_or(ModelError::MissingHeader)?;
    let lookup = |line: usize, name: &str| {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| ModelError::UnknownState {
                line,
                name: name.to_string(),
            })
    };
    for (id, (line, src, dst, update, label)) in pending.into_iter().enumerate() {
        transitions.push(Transition {
            id,
            label,
            source: lookup(line, &src)?,
            target: lookup(line, &dst)?,
            update,
        });
    }
    Vass::new(dim, states, transitions)
}
