//! Automata that prune operation sequences during enumeration.
//!
//! Any word with a lexicographically larger word of identical effect can be
//! rewritten upward, so the largest operation sequence producing a given
//! permutation contains no forbidden subword. Rejecting words that contain
//! one loses no permutation.

pub mod dfa;
pub mod effect;
pub mod gamma;

pub use dfa::{build_avoiding_dfa, build_multi_avoiding_dfa, intersect, Dfa, StateId, DEAD};
pub use effect::{effect_signature, find_forbidden_words, forbidden_words, EffectSignature, Item};
pub use gamma::{build_gamma, contains_structural_pattern, is_catalan_word, AutomataError};

/// Longest harvested forbidden words.
pub const FORBIDDEN_WORD_MAX_LEN: usize = 9;

/// The pruning automaton for permutations of length `n`: the truncated
/// structural automaton intersected with avoidance of every minimal forbidden
/// word up to `max_word_len` letters.
pub fn pruning_automaton_with(n: usize, max_word_len: usize) -> Dfa {
    let gamma = build_gamma(n.max(1));
    let words = find_forbidden_words(max_word_len);
    let avoid = build_multi_avoiding_dfa(words.iter().map(|w| w.letters()));
    intersect(&[&gamma, &avoid])
}

pub fn pruning_automaton(n: usize) -> Dfa {
    pruning_automaton_with(n, FORBIDDEN_WORD_MAX_LEN)
}
