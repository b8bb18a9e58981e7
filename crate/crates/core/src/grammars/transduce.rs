use std::collections::HashMap;

use super::{Cfg, GSym};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::transducers::Transducer;

/// Grammar for `ρ(L(G))`: nonterminals `(X, p, q)` derive the outputs of
/// runs from `p` to `q` reading a word derived from `X`; `E(p, q)` derives
/// the outputs of runs reading nothing.
pub(super) fn apply_transduction(g: &Cfg, t: &Transducer, limits: &Limits) -> Result<Cfg> {
    let t = t.letterize();
    let nq = t.num_states();
    let mut out = Cfg::new(g.alphabet().clone(), "S");
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut nt = |out: &mut Cfg, key: String| -> Result<usize> {
        if let Some(&i) = ids.get(&key) {
            return Ok(i);
        }
        let i = out.fresh_nonterminal(&key);
        ids.insert(key, i);
        if out.num_nonterminals() > limits.states {
            return Err(Error::StateBudgetExceeded(limits.states));
        }
        Ok(i)
    };

    // ε-input runs
    for p in 0..nq {
        for q in 0..nq {
            let e = nt(&mut out, format!("E({p},{q})"))?;
            if p == q {
                out.add_production(e, Vec::new());
            }
            for edge in t.edges().iter().filter(|e| e.from == p && e.input.is_empty()) {
                let rest = nt(&mut out, format!("E({},{q})", edge.to))?;
                let mut rhs: Vec<GSym> = edge.output.iter().map(|&s| GSym::T(s)).collect();
                rhs.push(GSym::N(rest));
                out.add_production(e, rhs);
            }
        }
    }
    // one input terminal
    let mut term: HashMap<(crate::words::Symbol, usize, usize), usize> = HashMap::new();
    for s in g.alphabet().symbols_with_hash() {
        for p in 0..nq {
            for q in 0..nq {
                let x = nt(&mut out, format!("T({},{p},{q})", g.alphabet().name(s)))?;
                term.insert((s, p, q), x);
                for edge in t.edges().iter().filter(|e| e.input.symbols() == [s]) {
                    let pre = nt(&mut out, format!("E({p},{})", edge.from))?;
                    let post = nt(&mut out, format!("E({},{q})", edge.to))?;
                    let mut rhs = vec![GSym::N(pre)];
                    rhs.extend(edge.output.iter().map(|&o| GSym::T(o)));
                    rhs.push(GSym::N(post));
                    out.add_production(x, rhs);
                }
            }
        }
    }
    // grammar symbols over state pairs; right-hand sides chained through
    // suffix helpers `[i,j](r,q)` = rhs of production i from position j
    let sym = |out: &mut Cfg, nt: &mut dyn FnMut(&mut Cfg, String) -> Result<usize>, s: GSym, p: usize, q: usize| -> Result<usize> {
        match s {
            GSym::T(x) => Ok(term[&(x, p, q)]),
            GSym::N(m) => nt(out, format!("({},{p},{q})", g.name(m))),
        }
    };
    for (i, prod) in g.productions().iter().enumerate() {
        for p in 0..nq {
            for q in 0..nq {
                let lhs = nt(&mut out, format!("({},{p},{q})", g.name(prod.lhs)))?;
                match prod.rhs.len() {
                    0 => {
                        let e = nt(&mut out, format!("E({p},{q})"))?;
                        out.add_production(lhs, vec![GSym::N(e)]);
                    }
                    1 => {
                        let x = sym(&mut out, &mut nt, prod.rhs[0], p, q)?;
                        out.add_production(lhs, vec![GSym::N(x)]);
                    }
                    len => {
                        for r in 0..nq {
                            let first = sym(&mut out, &mut nt, prod.rhs[0], p, r)?;
                            let rest = if len == 2 {
                                sym(&mut out, &mut nt, prod.rhs[1], r, q)?
                            } else {
                                nt(&mut out, format!("[{i},1]({r},{q})"))?
                            };
                            out.add_production(lhs, vec![GSym::N(first), GSym::N(rest)]);
                        }
                    }
                }
            }
        }
        for j in 1..prod.rhs.len().saturating_sub(1) {
            for p in 0..nq {
                for q in 0..nq {
                    let h = nt(&mut out, format!("[{i},{j}]({p},{q})"))?;
                    for r in 0..nq {
                        let first = sym(&mut out, &mut nt, prod.rhs[j], p, r)?;
                        let rest = if j + 2 == prod.rhs.len() {
                            sym(&mut out, &mut nt, prod.rhs[j + 1], r, q)?
                        } else {
                            nt(&mut out, format!("[{i},{}]({r},{q})", j + 1))?
                        };
                        out.add_production(h, vec![GSym::N(first), GSym::N(rest)]);
                    }
                }
            }
        }
    }
    let start = out.start();
    for &p in t.initial() {
        for f in t.terminal_states() {
            let s = nt(&mut out, format!("({},{p},{f})", g.name(g.start())))?;
            out.add_production(start, vec![GSym::N(s)]);
        }
    }
    Ok(out.prune())
}

#[cfg(test)]
mod tests {
    use crate::grammars::{enumerate_cfg, parse_cfg};
    use crate::groups::GroupSpec;
    use crate::limits::Limits;
    use crate::transducers::Transducer;
    use crate::words::{Alphabet, Word};

    #[test]
    fn diagonal_keeps_language() {
        let al = Alphabet::standard(1);
        let g = parse_cfg("S -> a S A | #\n", al.clone()).unwrap();
        let lim = Limits::default();
        let h = g.apply_transduction(&Transducer::diagonal_hash(al.clone()), &lim).unwrap();
        assert_eq!(enumerate_cfg(&h, 7, &lim).unwrap(), enumerate_cfg(&g, 7, &lim).unwrap());
    }

    #[test]
    fn single_pair() {
        let al = Alphabet::from_pairs(&[('a', 'A'), ('b', 'B'), ('c', 'C'), ('d', 'D')]).unwrap();
        let al = std::sync::Arc::new(al);
        let g = parse_cfg("S -> a b\n", al.clone()).unwrap();
        let t = Transducer::from_pairs(al.clone(), &[(al.parse("ab").unwrap(), al.parse("cd").unwrap())]);
        let lim = Limits::default();
        let h = g.apply_transduction(&t, &lim).unwrap();
        assert_eq!(enumerate_cfg(&h, 4, &lim).unwrap(), vec![al.parse("cd").unwrap()]);
    }

    #[test]
    fn word_problem_stays_trivial() {
        let z = GroupSpec::free(1);
        let al = z.alphabet().clone();
        let g = parse_cfg("S -> a S A S | A S a S | eps\n", al.clone()).unwrap();
        let t = Transducer::context_embed(al.clone(), &al.parse("aA").unwrap(), &Word::empty());
        let lim = Limits::default();
        let h = g.apply_transduction(&t, &lim).unwrap();
        let words = enumerate_cfg(&h, 6, &lim).unwrap();
        assert!(!words.is_empty());
        for w in words {
            assert!(z.is_identity(&z.evaluate(&w).unwrap()));
        }
    }
}
