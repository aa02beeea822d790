//! Symbolic machine effects and forbidden words.
//!
//! A word is run on a machine holding generic distinct items: `In(i)` is the
//! `i`-th item waiting in the input, `Stack1(i)` / `Stack2(i)` the `i`-th item
//! from the top of a stack before the word started. Items the word never
//! touches are left implicit, so the result describes the word's action on
//! every machine state deep enough to run it.

use std::collections::{BTreeSet, HashMap};

use rustc_hash::FxHashSet;

use crate::machine::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    In(u16),
    Stack1(u16),
    Stack2(u16),
}

/// Where the touched items end up. Stack contents are listed bottom to top
/// and sit on top of the untouched part of that stack.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rearrangement {
    pub stack1: Vec<Item>,
    pub stack2: Vec<Item>,
    pub output: Vec<Item>,
}

/// Action of a word on the machine.
///
/// The minimal depths are also the number of pre-existing items the word
/// pulls out of each container, so two words with equal signatures are legal
/// on exactly the same states and leave identical states behind.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EffectSignature {
    pub min_input: usize,
    pub min_stack1: usize,
    pub min_stack2: usize,
    pub rearrangement: Rearrangement,
}

pub fn effect_signature(w: &[Letter]) -> EffectSignature {
    let mut sig = EffectSignature::default();
    let r = &mut sig.rearrangement;
    for &l in w {
        match l {
            Letter::Rho => {
                sig.min_input += 1;
                r.stack1.push(Item::In(sig.min_input as u16));
            }
            Letter::Lambda => {
                let x = r.stack1.pop().unwrap_or_else(|| {
                    sig.min_stack1 += 1;
                    Item::Stack1(sig.min_stack1 as u16)
                });
                r.stack2.push(x);
            }
            Letter::Mu => {
                let x = r.stack2.pop().unwrap_or_else(|| {
                    sig.min_stack2 += 1;
                    Item::Stack2(sig.min_stack2 as u16)
                });
                r.output.push(x);
            }
        }
    }
    sig
}

/// Every word of length `1..=max_len` that has a lexicographically larger
/// word with the same effect.
///
/// Equal effects force equal letter counts, so only words of one length are
/// ever compared; within each class sharing a signature every word except
/// the largest is forbidden.
pub fn forbidden_words(max_len: usize) -> BTreeSet<Word> {
    let mut forbidden = BTreeSet::new();
    for len in 1..=max_len {
        let mut classes: HashMap<EffectSignature, Vec<Word>> = HashMap::new();
        for w in Word::all_of_length(len) {
            classes.entry(effect_signature(w.letters())).or_default().push(w);
        }
        for mut class in classes.into_values() {
            class.sort();
            class.pop();
            forbidden.extend(class);
        }
    }
    forbidden
}

/// Forbidden words of length at most `max_len` with no shorter forbidden word
/// as a contiguous subword.
pub fn find_forbidden_words(max_len: usize) -> BTreeSet<Word> {
    let all = forbidden_words(max_len);
    let lookup: FxHashSet<&[Letter]> = all.iter().map(|w| w.letters()).collect();
    all.iter()
        .filter(|w| {
            let letters = w.letters();
            let len = letters.len();
            !(1..len).any(|sub| letters.windows(sub).any(|f| lookup.contains(f)))
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::gamma::is_catalan_word;
    use crate::machine::MachineState;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn signature_examples() {
        assert_eq!(effect_signature(w("ρμ").letters()), effect_signature(w("μρ").letters()));
        assert_eq!(
            effect_signature(w("ρλμλ").letters()),
            effect_signature(w("λρλμ").letters())
        );
        assert_ne!(effect_signature(w("ρ").letters()), effect_signature(w("λ").letters()));
        assert_ne!(effect_signature(w("ρλ").letters()), effect_signature(w("λρ").letters()));
    }

    /// Runs `w` on a concrete deep state and returns the result, or `None` if
    /// the word is illegal there.
    fn concrete(w: &Word, depth: usize) -> Option<MachineState> {
        let mut s = MachineState {
            input: (100..100 + depth as u8).collect(),
            stack1: (50..50 + depth as u8).collect(),
            stack2: (1..1 + depth as u8).collect(),
            output: vec![],
        };
        for &l in w.letters() {
            s.apply_in_place(l).ok()?;
        }
        Some(s)
    }

    #[test]
    fn equal_signatures_mean_equal_concrete_action() {
        for len in 1..=5 {
            let words: Vec<Word> = Word::all_of_length(len).collect();
            for a in &words {
                for b in &words {
                    let same = effect_signature(a.letters()) == effect_signature(b.letters());
                    assert_eq!(same, concrete(a, 6) == concrete(b, 6), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn effect_equivalence_is_a_congruence() {
        let words: Vec<Word> = (1..=3).flat_map(Word::all_of_length).collect();
        let classes: Vec<(Word, Word)> = words
            .iter()
            .flat_map(|a| words.iter().map(move |b| (a.clone(), b.clone())))
            .filter(|(a, b)| a != b && effect_signature(a.letters()) == effect_signature(b.letters()))
            .collect();
        assert!(!classes.is_empty());
        for (a, b) in &classes {
            for ctx in ["", "ρ", "λ", "μ", "λμ"] {
                let c = w(ctx);
                let pre_a = [c.letters(), a.letters()].concat();
                let pre_b = [c.letters(), b.letters()].concat();
                assert_eq!(effect_signature(&pre_a), effect_signature(&pre_b));
                let suf_a = [a.letters(), c.letters()].concat();
                let suf_b = [b.letters(), c.letters()].concat();
                assert_eq!(effect_signature(&suf_a), effect_signature(&suf_b));
            }
        }
    }

    #[test]
    fn known_forbidden_words_are_found() {
        let two = find_forbidden_words(2);
        assert!(two.contains(&w("ρμ")));
        assert_eq!(two.len(), 1);
        let four = find_forbidden_words(4);
        assert!(four.contains(&w("ρλμλ")));
        assert!(four.contains(&w("ρλλμ")));
        assert!(!four.contains(&w("μρ")));
    }

    #[test]
    fn catalan_products_are_forbidden() {
        let max_len = 8;
        let all = forbidden_words(max_len);
        let minimal = find_forbidden_words(max_len);
        let mut checked = 0;
        for len in 4..=max_len {
            for word in Word::all_of_length(len) {
                let letters = word.letters();
                let splits = (2..len - 1).any(|cut| {
                    let (u, v) = letters.split_at(cut);
                    is_catalan_word(u, Letter::Rho, Letter::Lambda) == Ok(true)
                        && is_catalan_word(v, Letter::Lambda, Letter::Mu) == Ok(true)
                });
                if !splits {
                    continue;
                }
                checked += 1;
                assert!(all.contains(&word), "{word}");
                let has_minimal_factor = (1..=len)
                    .any(|sub| letters.windows(sub).any(|f| minimal.contains(&Word::from(f))));
                assert!(has_minimal_factor, "{word}");
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn minimal_words_contain_no_shorter_forbidden_word() {
        let all = forbidden_words(6);
        for m in find_forbidden_words(6) {
            for sub in 1..m.len() {
                for f in m.letters().windows(sub) {
                    assert!(!all.contains(&Word::from(f)), "{m} contains {}", Word::from(f));
                }
            }
        }
    }
}
