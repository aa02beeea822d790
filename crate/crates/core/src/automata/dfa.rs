use std::collections::hash_map::Entry;
use std::collections::VecDeque;
use std::fmt::Write as _;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::machine::Letter;

pub type StateId = u32;

/// Marker for a missing transition.
pub const DEAD: StateId = StateId::MAX;

/// Deterministic automaton over `{ρ, λ, μ}` with a partial transition map.
///
/// A missing transition rejects; every live state accepts. States are
/// numbered in breadth-first discovery order from `start`, so all of them are
/// reachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    trans: Vec<[StateId; 3]>,
    start: StateId,
}

impl Dfa {
    /// Breadth-first construction from an implicit automaton. `step` returns
    /// `None` for a dead transition.
    pub fn explore<S, F>(start: S, mut step: F) -> Dfa
    where
        S: Clone + Eq + Hash,
        F: FnMut(&S, Letter) -> Option<S>,
    {
        let mut ids: FxHashMap<S, StateId> = FxHashMap::default();
        let mut queue = VecDeque::new();
        let mut trans: Vec<[StateId; 3]> = Vec::new();
        ids.insert(start.clone(), 0);
        trans.push([DEAD; 3]);
        queue.push_back(start);
        while let Some(s) = queue.pop_front() {
            let id = ids[&s];
            for l in Letter::ALL {
                let Some(t) = step(&s, l) else { continue };
                let next = trans.len() as StateId;
                let tid = match ids.entry(t) {
                    Entry::Occupied(e) => *e.get(),
                    Entry::Vacant(e) => {
                        queue.push_back(e.key().clone());
                        e.insert(next);
                        trans.push([DEAD; 3]);
                        next
                    }
                };
                trans[id as usize][l.index()] = tid;
            }
        }
        Dfa { trans, start: 0 }
    }

    /// Automaton accepting every word.
    pub fn universal() -> Dfa {
        Dfa {
            trans: vec![[0; 3]],
            start: 0,
        }
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans
            .iter()
            .map(|row| row.iter().filter(|&&t| t != DEAD).count())
            .sum()
    }

    #[inline]
    pub fn step(&self, state: StateId, l: Letter) -> Option<StateId> {
        let t = self.trans[state as usize][l.index()];
        (t != DEAD).then_some(t)
    }

    /// Transition rows indexed by state, `DEAD` marking a rejection.
    pub fn table(&self) -> &[[StateId; 3]] {
        &self.trans
    }

    /// State reached after reading `word`, if it survives.
    pub fn run(&self, word: &[Letter]) -> Option<StateId> {
        word.iter()
            .try_fold(self.start, |state, &l| self.step(state, l))
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.run(word).is_some()
    }

    /// Plain-text adjacency list, one `state letter state` triple per line
    /// with letters written as `r`, `l`, `m`.
    pub fn to_adjacency_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# start {}", self.start).unwrap();
        for (s, row) in self.trans.iter().enumerate() {
            for l in Letter::ALL {
                let t = row[l.index()];
                if t != DEAD {
                    writeln!(out, "{s} {} {t}", l.ascii()).unwrap();
                }
            }
        }
        out
    }
}

/// Automaton for the words that do not contain `u` as a contiguous subword.
///
/// State `k` means the longest suffix read so far that is a prefix of `u` has
/// length `k`; reaching `|u|` is the dead state.
pub fn build_avoiding_dfa(u: &[Letter]) -> Dfa {
    assert!(!u.is_empty(), "cannot avoid the empty word");
    let pattern = u.to_vec();
    Dfa::explore(0usize, move |&k, l| {
        let mut buf: Vec<Letter> = pattern[..k].to_vec();
        buf.push(l);
        let next = (0..=buf.len().min(pattern.len()))
            .rev()
            .find(|&len| buf[buf.len() - len..] == pattern[..len])
            .unwrap();
        (next < pattern.len()).then_some(next)
    })
}

/// Automaton for the words containing none of `patterns`.
///
/// Aho–Corasick goto/failure automaton with every node that completes a
/// pattern made dead. Language-equivalent to intersecting the single-pattern
/// automata, without materialising their product.
pub fn build_multi_avoiding_dfa<'a, I>(patterns: I) -> Dfa
where
    I: IntoIterator<Item = &'a [Letter]>,
{
    let mut children: Vec<[usize; 3]> = vec![[usize::MAX; 3]];
    let mut terminal = vec![false];
    for p in patterns {
        assert!(!p.is_empty(), "cannot avoid the empty word");
        let mut node = 0;
        for &l in p {
            if children[node][l.index()] == usize::MAX {
                children.push([usize::MAX; 3]);
                terminal.push(false);
                children[node][l.index()] = children.len() - 1;
            }
            node = children[node][l.index()];
        }
        terminal[node] = true;
    }

    let mut fail = vec![0usize; children.len()];
    let mut goto = vec![[0usize; 3]; children.len()];
    let mut queue = VecDeque::new();
    for l in 0..3 {
        match children[0][l] {
            usize::MAX => goto[0][l] = 0,
            c => {
                goto[0][l] = c;
                queue.push_back(c);
            }
        }
    }
    while let Some(node) = queue.pop_front() {
        terminal[node] |= terminal[fail[node]];
        for l in 0..3 {
            match children[node][l] {
                usize::MAX => goto[node][l] = goto[fail[node]][l],
                c => {
                    fail[c] = goto[fail[node]][l];
                    goto[node][l] = c;
                    queue.push_back(c);
                }
            }
        }
    }

    Dfa::explore(0usize, |&node, l| {
        let next = goto[node][l.index()];
        (!terminal[next]).then_some(next)
    })
}

/// Product automaton accepting the intersection of the languages, restricted
/// to reachable state tuples.
pub fn intersect(ds: &[&Dfa]) -> Dfa {
    assert!(!ds.is_empty(), "intersection of an empty list");
    if ds.len() == 1 {
        return ds[0].clone();
    }
    let start: Vec<StateId> = ds.iter().map(|d| d.start()).collect();
    Dfa::explore(start, |tuple, l| {
        tuple
            .iter()
            .zip(ds)
            .map(|(&s, d)| d.step(s, l))
            .collect::<Option<Vec<_>>>()
    })
}
