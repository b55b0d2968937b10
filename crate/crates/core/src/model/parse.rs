//! Text formats for nets and Büchi automata.
//!
//! Nets:
//!
//! ```text
//! system vas|vas0|vass|vass0
//! dim <d>
//! states q0 q1 ...            # vass/vass0 only
//! init [<state>] <vector>     # e.g. 0,3 ; `w` allowed
//! zerotest <name> <vector>    # vas0/vass0 only, exactly one
//! action <name> <vector>
//! trans <p> <name> <q>        # vass/vass0 only
//! label <p> <name> <q> <sym>  # a labeled transition
//! ```
//!
//! Automata: `buchi`, `alphabet …`, `states …`, `init s`, `accept s …`,
//! `trans s σ s′`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{Action, BuchiAutomaton, LabeledVassz, Transition, Vas, Vassz, Vasz};
use crate::omega::{Natural, OmegaVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Vas,
    Vas0,
    Vass,
    Vass0,
}

impl SystemKind {
    fn has_states(self) -> bool {
        matches!(self, SystemKind::Vass | SystemKind::Vass0)
    }

    fn has_test(self) -> bool {
        matches!(self, SystemKind::Vas0 | SystemKind::Vass0)
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::Vas => "vas",
            SystemKind::Vas0 => "vas0",
            SystemKind::Vass => "vass",
            SystemKind::Vass0 => "vass0",
        })
    }
}

/// A parsed net, tagged by its declared kind.
#[derive(Debug, Clone)]
pub enum Net<N> {
    Vas(Vas<N>),
    Vasz(Vasz<N>),
    /// A VASS, with an empty zero-test list for kind `vass`.
    Vassz {
        kind: SystemKind,
        system: Vassz<N>,
        labels: Option<Vec<String>>,
    },
}

impl<N: Natural> Net<N> {
    pub fn kind(&self) -> SystemKind {
        match self {
            Net::Vas(_) => SystemKind::Vas,
            Net::Vasz(_) => SystemKind::Vas0,
            Net::Vassz { kind, .. } => *kind,
        }
    }

    pub fn labeled(&self) -> Option<LabeledVassz<N>> {
        match self {
            Net::Vassz {
                system,
                labels: Some(labels),
                ..
            } => LabeledVassz::new(system.clone(), labels.clone()).ok(),
            _ => None,
        }
    }
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

/// Splits a line into whitespace-separated tokens, dropping a `#` comment
/// that starts a token.
fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, ch) in line.char_indices().chain([(line.len(), ' ')]) {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..k],
                    col: line[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            if ch == '#' {
                break;
            }
            start = Some(k);
        }
    }
    out
}

struct Cursor<'a> {
    line: usize,
    toks: Vec<Token<'a>>,
    pos: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, col: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, ParseError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.text)
            }
            None => Err(self.err(self.end_col, format!("expected {what}"))),
        }
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos.saturating_sub(1))
            .map_or(self.end_col, |t| t.col)
    }

    fn rest(&mut self) -> Vec<&'a str> {
        let out = self.toks[self.pos..].iter().map(|t| t.text).collect();
        self.pos = self.toks.len();
        out
    }

    fn done(&self) -> Result<(), ParseError> {
        match self.toks.get(self.pos) {
            Some(t) => Err(self.err(t.col, format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }
}

fn lines(text: &str) -> impl Iterator<Item = Cursor<'_>> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let toks = tokens(line);
        (!toks.is_empty()).then(|| Cursor {
            line: k + 1,
            toks,
            pos: 0,
            end_col: line.chars().count() + 1,
        })
    })
}

fn parse_delta(c: &Cursor<'_>, text: &str, dim: usize) -> Result<Vec<i64>, ParseError> {
    let col = c.col();
    let delta = text
        .split(',')
        .map(|e| {
            e.parse::<i64>().map_err(|_| {
                if e == "w" {
                    c.err(col, "`w` is not allowed in displacements")
                } else {
                    c.err(col, format!("bad integer `{e}`"))
                }
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if delta.len() != dim {
        return Err(c.err(col, format!("vector has dimension {}, expected {dim}", delta.len())));
    }
    Ok(delta)
}

pub fn parse_vector<N: Natural>(text: &str, dim: usize) -> Result<OmegaVec<N>, String> {
    let v = OmegaVec::<N>::from_str(text).map_err(|e| e.to_string())?;
    if v.dim() != dim {
        return Err(format!("vector has dimension {}, expected {dim}", v.dim()));
    }
    Ok(v)
}

struct Draft {
    kind: SystemKind,
    dim: usize,
}

pub fn parse_net<N: Natural>(text: &str) -> Result<Net<N>, ParseError> {
    let mut draft: Option<Draft> = None;
    let mut states: Option<Vec<String>> = None;
    let mut init: Option<(Option<String>, OmegaVec<N>, usize)> = None;
    let mut actions: Vec<Action> = Vec::new();
    let mut ztest: Option<Action> = None;
    let mut trans: Vec<(String, String, String, Option<String>, usize, usize)> = Vec::new();
    let mut last_line = 1;

    for mut c in lines(text) {
        last_line = c.line;
        let kw = c.next("keyword")?;
        let kw_col = c.col();
        if draft.is_none() && kw != "system" {
            return Err(c.err(kw_col, "the first line must be `system <kind>`"));
        }
        match kw {
            "system" => {
                if draft.is_some() {
                    return Err(c.err(kw_col, "duplicate `system` line"));
                }
                let kind = match c.next("system kind")? {
                    "vas" => SystemKind::Vas,
                    "vas0" => SystemKind::Vas0,
                    "vass" => SystemKind::Vass,
                    "vass0" => SystemKind::Vass0,
                    other => return Err(c.err(c.col(), format!("unknown system kind `{other}`"))),
                };
                draft = Some(Draft { kind, dim: 0 });
            }
            "dim" => {
                let d = draft.as_mut().unwrap();
                if d.dim != 0 {
                    return Err(c.err(kw_col, "duplicate `dim` line"));
                }
                let t = c.next("dimension")?;
                d.dim = t
                    .parse()
                    .ok()
                    .filter(|&n: &usize| n >= 1)
                    .ok_or_else(|| c.err(c.col(), format!("bad dimension `{t}`")))?;
            }
            "states" => {
                if !draft.as_ref().unwrap().kind.has_states() {
                    return Err(c.err(kw_col, "`states` is only allowed for vass and vass0"));
                }
                if states.is_some() {
                    return Err(c.err(kw_col, "duplicate `states` line"));
                }
                let names: Vec<String> = c.rest().into_iter().map(String::from).collect();
                if names.is_empty() {
                    return Err(c.err(c.end_col, "expected at least one state"));
                }
                states = Some(names);
            }
            "init" => {
                let d = draft.as_ref().unwrap();
                if d.dim == 0 {
                    return Err(c.err(kw_col, "`dim` must come before vectors"));
                }
                if init.is_some() {
                    return Err(c.err(kw_col, "duplicate `init` line"));
                }
                let state = if d.kind.has_states() {
                    Some(c.next("initial state")?.to_string())
                } else {
                    None
                };
                let t = c.next("initial vector")?;
                let v = parse_vector(t, d.dim).map_err(|m| c.err(c.col(), m))?;
                init = Some((state, v, c.line));
            }
            "zerotest" | "action" => {
                let d = draft.as_ref().unwrap();
                if d.dim == 0 {
                    return Err(c.err(kw_col, "`dim` must come before vectors"));
                }
                let name = c.next("action name")?.to_string();
                let name_col = c.col();
                let t = c.next("displacement")?;
                let delta = parse_delta(&c, t, d.dim)?;
                if actions.iter().any(|a| a.name == name) || ztest.as_ref().is_some_and(|z| z.name == name) {
                    return Err(c.err(name_col, format!("duplicate action `{name}`")));
                }
                if kw == "zerotest" {
                    if !d.kind.has_test() {
                        return Err(c.err(kw_col, format!("`zerotest` is not allowed for {}", d.kind)));
                    }
                    if ztest.is_some() {
                        return Err(c.err(kw_col, "a system has exactly one zero-test"));
                    }
                    ztest = Some(Action::new(name, delta));
                } else {
                    actions.push(Action::new(name, delta));
                }
            }
            "trans" | "label" => {
                if !draft.as_ref().unwrap().kind.has_states() {
                    return Err(c.err(kw_col, format!("`{kw}` is only allowed for vass and vass0")));
                }
                let p = c.next("source state")?.to_string();
                let a = c.next("action name")?.to_string();
                let q = c.next("target state")?.to_string();
                let sym = if kw == "label" {
                    Some(c.next("label symbol")?.to_string())
                } else {
                    None
                };
                trans.push((p, a, q, sym, c.line, kw_col));
            }
            other => return Err(c.err(kw_col, format!("unknown keyword `{other}`"))),
        }
        c.done()?;
    }

    let at = |line: usize, col: usize, message: String| ParseError { line, col, message };
    let draft = draft.ok_or_else(|| at(1, 1, "empty input".into()))?;
    if draft.dim == 0 {
        return Err(at(last_line, 1, "missing `dim` line".into()));
    }
    let (init_state, init, init_line) = init.ok_or_else(|| at(last_line, 1, "missing `init` line".into()))?;
    if draft.kind.has_test() && ztest.is_none() {
        return Err(at(last_line, 1, format!("{} requires a `zerotest` line", draft.kind)));
    }
    let base = Vas::new(init, actions).map_err(|e| at(init_line, 1, e.to_string()))?;
    let vz = match ztest {
        Some(z) => Vasz::new(base, vec![z]).map_err(|e| at(init_line, 1, e.to_string()))?,
        None => Vasz::without_test(base),
    };
    if !draft.kind.has_states() {
        return Ok(if draft.kind.has_test() {
            Net::Vasz(vz)
        } else {
            Net::Vas(vz.strip_zero_test())
        });
    }

    let states = states.ok_or_else(|| at(last_line, 1, "missing `states` line".into()))?;
    let lookup = |name: &str, line: usize| {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| at(line, 1, format!("undeclared state `{name}`")))
    };
    let init_state = lookup(init_state.as_deref().unwrap_or_default(), init_line)?;
    let mut ts = Vec::new();
    let mut labels = Vec::new();
    for (p, a, q, sym, line, col) in &trans {
        if vz.action(a).is_none() {
            return Err(at(*line, *col, format!("undeclared action `{a}`")));
        }
        ts.push(Transition {
            from: lookup(p, *line)?,
            action: a.clone(),
            to: lookup(q, *line)?,
        });
        labels.push(sym.clone());
    }
    let labeled = labels.iter().filter(|l| l.is_some()).count();
    let labels = if labeled == 0 {
        None
    } else if labeled == labels.len() {
        Some(labels.into_iter().map(Option::unwrap).collect())
    } else {
        let (_, _, _, _, line, col) = trans.iter().find(|t| t.3.is_none()).unwrap();
        return Err(at(
            *line,
            *col,
            "labeled systems need a label on every transition".into(),
        ));
    };
    let system = Vassz::new(vz, states, ts, init_state).map_err(|e| at(init_line, 1, e.to_string()))?;
    Ok(Net::Vassz {
        kind: draft.kind,
        system,
        labels,
    })
}

pub fn parse_buchi(text: &str) -> Result<BuchiAutomaton, ParseError> {
    let mut seen_header = false;
    let mut alphabet: Option<Vec<String>> = None;
    let mut states: Option<Vec<String>> = None;
    let mut init: Option<(String, usize)> = None;
    let mut accepting: Vec<(String, usize)> = Vec::new();
    let mut trans: Vec<(String, String, String, usize)> = Vec::new();
    let mut last_line = 1;
    for mut c in lines(text) {
        last_line = c.line;
        let kw = c.next("keyword")?;
        let col = c.col();
        if !seen_header && kw != "buchi" {
            return Err(c.err(col, "the first line must be `buchi`"));
        }
        match kw {
            "buchi" if !seen_header => seen_header = true,
            "alphabet" if alphabet.is_none() => alphabet = Some(c.rest().into_iter().map(String::from).collect()),
            "states" if states.is_none() => states = Some(c.rest().into_iter().map(String::from).collect()),
            "init" if init.is_none() => init = Some((c.next("initial state")?.to_string(), c.line)),
            "accept" => accepting.extend(c.rest().into_iter().map(|s| (s.to_string(), c.line))),
            "trans" => {
                let s = c.next("source state")?.to_string();
                let a = c.next("symbol")?.to_string();
                let t = c.next("target state")?.to_string();
                trans.push((s, a, t, c.line));
            }
            "buchi" | "alphabet" | "states" | "init" => return Err(c.err(col, format!("duplicate `{kw}` line"))),
            other => return Err(c.err(col, format!("unknown keyword `{other}`"))),
        }
        c.done()?;
    }
    let at = |line: usize, message: String| ParseError { line, col: 1, message };
    let alphabet = alphabet.ok_or_else(|| at(last_line, "missing `alphabet` line".into()))?;
    let states = states.ok_or_else(|| at(last_line, "missing `states` line".into()))?;
    let lookup = |name: &str, line: usize| {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| at(line, format!("undeclared state `{name}`")))
    };
    let (init_name, init_line) = init.ok_or_else(|| at(last_line, "missing `init` line".into()))?;
    let init = lookup(&init_name, init_line)?;
    let accepting = accepting
        .iter()
        .map(|(s, l)| lookup(s, *l))
        .collect::<Result<Vec<_>, _>>()?;
    let mut ts = Vec::new();
    for (s, a, t, line) in &trans {
        if !alphabet.contains(a) {
            return Err(at(*line, format!("symbol `{a}` is not in the alphabet")));
        }
        ts.push((lookup(s, *line)?, a.clone(), lookup(t, *line)?));
    }
    Ok(BuchiAutomaton {
        alphabet,
        states,
        init,
        accepting,
        trans: ts,
    })
}
