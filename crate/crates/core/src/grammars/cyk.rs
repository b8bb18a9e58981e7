use std::collections::HashMap;

use super::{Cfg, GSym};
use crate::error::Result;
use crate::words::{Symbol, Word};

/// A derivation tree of a CNF grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseTree {
    Leaf { nt: usize, symbol: Symbol },
    Node { nt: usize, left: Box<ParseTree>, right: Box<ParseTree> },
}

impl ParseTree {
    pub fn nonterminal(&self) -> usize {
        match self {
            ParseTree::Leaf { nt, .. } | ParseTree::Node { nt, .. } => *nt,
        }
    }

    /// Length of the yield.
    pub fn len(&self) -> usize {
        match self {
            ParseTree::Leaf { .. } => 1,
            ParseTree::Node { left, right, .. } => left.len() + right.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn word(&self) -> Word {
        let mut v = Vec::new();
        self.collect(&mut v);
        Word::from(v)
    }

    fn collect(&self, out: &mut Vec<Symbol>) {
        match self {
            ParseTree::Leaf { symbol, .. } => out.push(*symbol),
            ParseTree::Node { left, right, .. } => {
                left.collect(out);
                right.collect(out);
            }
        }
    }
}

struct Table {
    n: usize,
    // cell (i, len) -> list of nonterminals, with a membership bitmap
    lists: Vec<Vec<u32>>,
    member: Vec<Vec<bool>>,
    // back pointers: (split length, left nt, right nt); u32::MAX for leaves
    back: Vec<HashMap<u32, (u32, u32, u32)>>,
}

impl Table {
    fn cell(&self, i: usize, len: usize) -> usize {
        i * (self.n + 1) + len
    }
}

fn fill(g: &Cfg, w: &Word, keep_back: bool) -> Result<Table> {
    g.check_cnf()?;
    let n = w.len();
    let width = g.num_nonterminals();
    let cells = n * (n + 1) + n + 1;
    let mut t = Table {
        n,
        lists: vec![Vec::new(); cells],
        member: vec![Vec::new(); cells],
        back: if keep_back { vec![HashMap::new(); cells] } else { Vec::new() },
    };
    let mut term: HashMap<Symbol, Vec<u32>> = HashMap::new();
    let mut by_first: Vec<Vec<(u32, u32)>> = vec![Vec::new(); width];
    for p in g.productions() {
        match p.rhs.as_slice() {
            [GSym::T(s)] => term.entry(*s).or_default().push(p.lhs as u32),
            [GSym::N(b), GSym::N(c)] => by_first[*b].push((*c as u32, p.lhs as u32)),
            _ => unreachable!("checked CNF"),
        }
    }
    for i in 0..n {
        let c = t.cell(i, 1);
        t.member[c] = vec![false; width];
        for &a in term.get(&w[i]).map(Vec::as_slice).unwrap_or(&[]) {
            if !t.member[c][a as usize] {
                t.member[c][a as usize] = true;
                t.lists[c].push(a);
                if keep_back {
                    t.back[c].insert(a, (u32::MAX, u32::MAX, u32::MAX));
                }
            }
        }
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let c = t.cell(i, len);
            let mut member = vec![false; width];
            let mut list = Vec::new();
            let mut back = HashMap::new();
            for split in 1..len {
                let l = t.cell(i, split);
                let r = t.cell(i + split, len - split);
                if t.lists[l].is_empty() || t.lists[r].is_empty() {
                    continue;
                }
                for &b in &t.lists[l] {
                    for &(cc, a) in &by_first[b as usize] {
                        if t.member[r][cc as usize] && !member[a as usize] {
                            member[a as usize] = true;
                            list.push(a);
                            if keep_back {
                                back.insert(a, (split as u32, b, cc));
                            }
                        }
                    }
                }
            }
            t.member[c] = member;
            t.lists[c] = list;
            if keep_back {
                t.back[c] = back;
            }
        }
    }
    Ok(t)
}

/// CYK membership for a grammar in Chomsky normal form.
pub fn cyk_member(g: &Cfg, w: &Word) -> Result<bool> {
    if w.is_empty() {
        g.check_cnf()?;
        return Ok(false);
    }
    let t = fill(g, w, false)?;
    let top = t.cell(0, w.len());
    Ok(t.member[top][g.start()])
}

/// A parse tree for `w`, if `w` is generated.
pub fn cyk_parse(g: &Cfg, w: &Word) -> Result<Option<ParseTree>> {
    if w.is_empty() {
        g.check_cnf()?;
        return Ok(None);
    }
    let t = fill(g, w, true)?;
    let top = t.cell(0, w.len());
    if !t.member[top][g.start()] {
        return Ok(None);
    }
    Ok(Some(build(&t, w, 0, w.len(), g.start() as u32)))
}

fn build(t: &Table, w: &Word, i: usize, len: usize, a: u32) -> ParseTree {
    let (split, b, c) = t.back[t.cell(i, len)][&a];
    if split == u32::MAX {
        return ParseTree::Leaf { nt: a as usize, symbol: w[i] };
    }
    let split = split as usize;
    ParseTree::Node {
        nt: a as usize,
        left: Box::new(build(t, w, i, split, b)),
        right: Box::new(build(t, w, i + split, len - split, c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::grammars::parse_cfg;
    use crate::words::Alphabet;

    #[test]
    fn single_rule() {
        let al = Alphabet::standard(2);
        let g = parse_cfg("S -> a\n", al.clone()).unwrap();
        assert!(cyk_member(&g, &al.parse("a").unwrap()).unwrap());
        assert!(!cyk_member(&g, &al.parse("b").unwrap()).unwrap());
    }

    #[test]
    fn rejects_non_cnf() {
        let al = Alphabet::standard(2);
        let g = parse_cfg("S -> a b\n", al.clone()).unwrap();
        assert!(matches!(cyk_member(&g, &al.parse("ab").unwrap()), Err(Error::NotCnf(_))));
    }

    #[test]
    fn parse_tree_yield() {
        let al = Alphabet::standard(1);
        let g = parse_cfg("S -> a S A | #\n", al.clone()).unwrap().to_cnf().unwrap();
        let w = al.parse("aa#AA").unwrap();
        let tree = cyk_parse(&g, &w).unwrap().unwrap();
        assert_eq!(tree.word(), w);
        assert_eq!(tree.nonterminal(), g.start());
        assert!(cyk_parse(&g, &al.parse("a#").unwrap()).unwrap().is_none());
    }
}
