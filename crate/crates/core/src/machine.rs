//! The two-stacks-in-series sorting machine.
//!
//! Items enter from the input onto the first stack (`ρ`), move from the top
//! of the first stack onto the second (`λ`), and leave from the top of the
//! second stack to the output (`μ`). Words over these three moves drive the
//! machine; this module also carries the brute-force oracles that the faster
//! enumerator is checked against.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("illegal move {letter}: {container} is empty")]
    IllegalMove {
        letter: Letter,
        container: &'static str,
    },
    #[error("invalid letter {0:?}")]
    InvalidLetter(char),
    #[error("not a permutation of 1..{0}")]
    InvalidPermutation(usize),
}

/// One machine move. The derived order `Rho < Lambda < Mu` is the order used
/// to compare words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Rho,
    Lambda,
    Mu,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::Rho, Letter::Lambda, Letter::Mu];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Letter {
        Letter::ALL[i]
    }

    pub fn ascii(self) -> char {
        match self {
            Letter::Rho => 'r',
            Letter::Lambda => 'l',
            Letter::Mu => 'm',
        }
    }

    pub fn from_char(c: char) -> Result<Letter, MachineError> {
        match c {
            'ρ' | 'r' | 'R' => Ok(Letter::Rho),
            'λ' | 'l' | 'L' => Ok(Letter::Lambda),
            'μ' | 'µ' | 'm' | 'M' => Ok(Letter::Mu),
            other => Err(MachineError::InvalidLetter(other)),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Letter::Rho => 'ρ',
            Letter::Lambda => 'λ',
            Letter::Mu => 'μ',
        };
        write!(f, "{c}")
    }
}

/// A word over `{ρ, λ, μ}`.
///
/// Ordering is lexicographic by letter with a proper prefix comparing less,
/// which is exactly `Vec`'s ordering.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn count(&self, l: Letter) -> usize {
        self.0.iter().filter(|&&x| x == l).count()
    }

    /// True if `needle` occurs as a contiguous subword.
    pub fn contains(&self, needle: &[Letter]) -> bool {
        needle.is_empty() || self.0.windows(needle.len()).any(|w| w == needle)
    }

    /// All words of exactly `len` letters, in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = Word> {
        let total = 3usize.pow(len as u32);
        (0..total).map(move |mut code| {
            let mut letters = vec![Letter::Rho; len];
            for slot in letters.iter_mut().rev() {
                *slot = Letter::from_index(code % 3);
                code /= 3;
            }
            Word(letters)
        })
    }

    pub fn to_ascii(&self) -> String {
        self.0.iter().map(|l| l.ascii()).collect()
    }
}

impl From<&[Letter]> for Word {
    fn from(letters: &[Letter]) -> Word {
        Word(letters.to_vec())
    }
}

impl FromStr for Word {
    type Err = MachineError;

    /// Accepts Greek letters or the ASCII stand-ins `r`, `l`, `m`.
    fn from_str(s: &str) -> Result<Word, MachineError> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(Letter::from_char)
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Permutation of `1..=n` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn new(values: Vec<u8>) -> Result<Permutation, MachineError> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(MachineError::InvalidPermutation(n));
            }
            seen[v] = true;
        }
        Ok(Permutation(values))
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation((1..=n as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    /// Pattern of the entries left after deleting the value `v`.
    pub fn delete_value(&self, v: u8) -> Permutation {
        Permutation(
            self.0
                .iter()
                .filter(|&&x| x != v)
                .map(|&x| if x > v { x - 1 } else { x })
                .collect(),
        )
    }

    pub fn has_increment(&self) -> bool {
        self.0.windows(2).any(|w| w[1] == w[0] + 1)
    }

    /// Every permutation of `1..=n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (1..=n as u8).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next permutation
            let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Configuration of the machine. Stacks keep their top at the end of the
/// vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MachineState {
    pub input: VecDeque<u8>,
    pub stack1: Vec<u8>,
    pub stack2: Vec<u8>,
    pub output: Vec<u8>,
}

impl MachineState {
    /// Items `1..=n` waiting in the input in increasing order.
    pub fn initial(n: usize) -> MachineState {
        MachineState::with_input((1..=n as u8).collect())
    }

    pub fn with_input(input: Vec<u8>) -> MachineState {
        MachineState {
            input: input.into(),
            ..Default::default()
        }
    }

    pub fn can_apply(&self, l: Letter) -> bool {
        match l {
            Letter::Rho => !self.input.is_empty(),
            Letter::Lambda => !self.stack1.is_empty(),
            Letter::Mu => !self.stack2.is_empty(),
        }
    }

    pub fn apply_letter(&self, l: Letter) -> Result<MachineState, MachineError> {
        let mut next = self.clone();
        next.apply_in_place(l)?;
        Ok(next)
    }

    pub fn apply_in_place(&mut self, l: Letter) -> Result<(), MachineError> {
        let illegal = |container| MachineError::IllegalMove {
            letter: l,
            container,
        };
        match l {
            Letter::Rho => {
                let x = self.input.pop_front().ok_or_else(|| illegal("input"))?;
                self.stack1.push(x);
            }
            Letter::Lambda => {
                let x = self.stack1.pop().ok_or_else(|| illegal("first stack"))?;
                self.stack2.push(x);
            }
            Letter::Mu => {
                let x = self.stack2.pop().ok_or_else(|| illegal("second stack"))?;
                self.output.push(x);
            }
        }
        Ok(())
    }

    fn undo(&mut self, l: Letter) {
        match l {
            Letter::Rho => {
                let x = self.stack1.pop().unwrap();
                self.input.push_front(x);
            }
            Letter::Lambda => {
                let x = self.stack2.pop().unwrap();
                self.stack1.push(x);
            }
            Letter::Mu => {
                let x = self.output.pop().unwrap();
                self.stack2.push(x);
            }
        }
    }

    pub fn is_drained(&self) -> bool {
        self.input.is_empty() && self.stack1.is_empty() && self.stack2.is_empty()
    }

    /// Sorted list of every label held by the machine.
    pub fn labels(&self) -> Vec<u8> {
        let mut all: Vec<u8> = self
            .input
            .iter()
            .chain(&self.stack1)
            .chain(&self.stack2)
            .chain(&self.output)
            .copied()
            .collect();
        all.sort_unstable();
        all
    }
}

/// True iff `w` has length `3n`, `n` of each letter, and every prefix has
/// `#ρ ≥ #λ ≥ #μ`.
pub fn is_operation_sequence(w: &Word, n: usize) -> bool {
    if w.len() != 3 * n {
        return false;
    }
    let mut counts = [0usize; 3];
    for &l in w.letters() {
        counts[l.index()] += 1;
        if counts[0] < counts[1] || counts[1] < counts[2] {
            return false;
        }
    }
    counts == [n, n, n]
}

/// Output of the machine fed `1..=n` and driven by the operation sequence `w`.
pub fn run_sequence(n: usize, w: &Word) -> Result<Permutation, MachineError> {
    assert!(
        is_operation_sequence(w, n),
        "{w} is not an operation sequence of size {n}"
    );
    let mut state = MachineState::initial(n);
    for &l in w.letters() {
        state
            .apply_in_place(l)
            .expect("operation sequences never make an illegal move");
    }
    Ok(Permutation(state.output))
}

/// Every permutation the machine can output from input `1..=n`, found by
/// trying all legal moves from every reachable state.
pub fn achievable_brute(n: usize) -> BTreeSet<Permutation> {
    fn explore(state: &mut MachineState, n: usize, found: &mut BTreeSet<Permutation>) {
        if state.output.len() == n {
            found.insert(Permutation(state.output.clone()));
            return;
        }
        for l in Letter::ALL {
            if state.can_apply(l) {
                state.apply_in_place(l).unwrap();
                explore(state, n, found);
                state.undo(l);
            }
        }
    }
    let mut found = BTreeSet::new();
    explore(&mut MachineState::initial(n), n, &mut found);
    found
}

/// Can the machine turn input `p` into output `1, 2, …, n`?
///
/// Depth-first over legal moves, never emitting an item out of order, with
/// already visited states skipped. The output is always `1..=k` so a state
/// is keyed by the remaining input length and both stack contents.
pub fn sortable_brute(p: &Permutation) -> bool {
    let n = p.len();
    let mut visited: FxHashSet<Vec<u8>> = FxHashSet::default();
    let mut state = MachineState::with_input(p.values().to_vec());

    fn key(state: &MachineState) -> Vec<u8> {
        // Labels are >= 1, so 0 separates the two stacks unambiguously.
        let mut k = Vec::with_capacity(state.stack1.len() + state.stack2.len() + 2);
        k.push(state.input.len() as u8);
        k.extend_from_slice(&state.stack1);
        k.push(0);
        k.extend_from_slice(&state.stack2);
        k
    }

    fn search(state: &mut MachineState, n: usize, visited: &mut FxHashSet<Vec<u8>>) -> bool {
        if state.output.len() == n {
            return true;
        }
        if !visited.insert(key(state)) {
            return false;
        }
        let next = state.output.len() as u8 + 1;
        for l in Letter::ALL {
            if !state.can_apply(l) {
                continue;
            }
            if l == Letter::Mu && *state.stack2.last().unwrap() != next {
                continue;
            }
            state.apply_in_place(l).unwrap();
            let done = search(state, n, visited);
            state.undo(l);
            if done {
                return true;
            }
        }
        false
    }

    search(&mut state, n, &mut visited)
}
