//! Line-oriented acceptor exchange format.
//!
//! ```text
//! state 0 initial
//! state 1 terminal
//! edge 0 ab 1
//! edge 1 - 0
//! ```
//!
//! Labels are written with the alphabet's letter names, `#` for the marker
//! and `-` for the empty word. Blank lines and lines starting with `;` are
//! ignored.

use std::sync::Arc;

use super::Fsa;
use crate::error::{Error, Result};
use crate::words::{Alphabet, Word};

pub(crate) fn parse_state(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse { line, message: format!("bad state id {tok:?}") })
}

pub(crate) fn render_label(alphabet: &Alphabet, w: &Word) -> String {
    if w.is_empty() {
        "-".into()
    } else {
        alphabet.render(w)
    }
}

pub(crate) fn parse_label(alphabet: &Alphabet, tok: &str, line: usize) -> Result<Word> {
    alphabet.parse(tok).map_err(|e| Error::Parse { line, message: e.to_string() })
}

pub fn parse_fsa(text: &str, alphabet: Arc<Alphabet>) -> Result<Fsa> {
    let mut states: Vec<(usize, bool, bool)> = Vec::new();
    let mut edges: Vec<(usize, Word, usize)> = Vec::new();
    let mut max_id = 0usize;
    let mut any = false;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "state" => {
                let Some(id) = toks.get(1) else {
                    return Err(Error::Parse { line: ln, message: "state needs an id".into() });
                };
                let id = parse_state(id, ln)?;
                let (mut ini, mut term) = (false, false);
                for t in &toks[2..] {
                    match *t {
                        "initial" => ini = true,
                        "terminal" => term = true,
                        other => return Err(Error::Parse { line: ln, message: format!("unknown state flag {other:?}") }),
                    }
                }
                max_id = max_id.max(id);
                any = true;
                states.push((id, ini, term));
            }
            "edge" => {
                let [_, from, label, to] = toks.as_slice() else {
                    return Err(Error::Parse { line: ln, message: "expected `edge <from> <label> <to>`".into() });
                };
                let from = parse_state(from, ln)?;
                let to = parse_state(to, ln)?;
                max_id = max_id.max(from).max(to);
                any = true;
                edges.push((from, parse_label(&alphabet, label, ln)?, to));
            }
            other => return Err(Error::Parse { line: ln, message: format!("unknown directive {other:?}") }),
        }
    }
    let n = if any { max_id + 1 } else { 0 };
    let mut a = Fsa::new(alphabet, n);
    for (id, ini, term) in states {
        if ini {
            a.set_initial(id);
        }
        if term {
            a.set_terminal(id, true);
        }
    }
    for (from, label, to) in edges {
        a.add_edge(from, label, to);
    }
    Ok(a)
}

pub fn render_fsa(a: &Fsa) -> String {
    let mut out = String::new();
    for q in 0..a.num_states() {
        out.push_str(&format!("state {q}"));
        if a.initial().contains(&q) {
            out.push_str(" initial");
        }
        if a.is_terminal(q) {
            out.push_str(" terminal");
        }
        out.push('\n');
    }
    for e in a.edges() {
        out.push_str(&format!("edge {} {} {}\n", e.from, render_label(a.alphabet(), &e.label), e.to));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::Limits;

    #[test]
    fn round_trip() {
        let al = Alphabet::standard(2);
        let text = "; a(b)*\nstate 0 initial\nstate 1 terminal\nedge 0 a 1\nedge 1 b 1\nedge 1 - 1\n";
        let a = parse_fsa(text, al.clone()).unwrap();
        assert!(a.accepts(&al.parse("abb").unwrap()));
        let b = parse_fsa(&render_fsa(&a), al).unwrap();
        assert!(a.equivalent(&b, &Limits::default()).unwrap());
    }

    #[test]
    fn errors_carry_lines() {
        let al = Alphabet::standard(1);
        let err = parse_fsa("state 0 initial\nedge 0 z 0\n", al).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
