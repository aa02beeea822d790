//! The automaton rejecting the three structural families of forbidden words:
//! `ρμ`, `ρλμλ`, and `uv` with `u` a nonempty `ρ,λ`-Catalan word and `v` a
//! nonempty `λ,μ`-Catalan word.
//!
//! The `uv` family is not regular, so the automaton is built for a size `n`
//! and is exact on every word of length at most `3n`. It is produced by
//! subset construction over partial matches: a match of `uv` may always be
//! shrunk to one whose `u` and `v` are both prime (return to zero height only
//! at their last letter), so only prime factors are tracked.

use std::collections::BTreeSet;

use thiserror::Error;

use super::dfa::Dfa;
use crate::machine::Letter;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("letter {0} is outside the two-letter alphabet")]
    InvalidAlphabet(Letter),
}

/// Is `w` balanced in `x` and `y` with no prefix holding more `y` than `x`?
pub fn is_catalan_word(w: &[Letter], x: Letter, y: Letter) -> Result<bool, AutomataError> {
    assert_ne!(x, y);
    let mut height: i64 = 0;
    let mut ok = true;
    for &l in w {
        if l == x {
            height += 1;
        } else if l == y {
            height -= 1;
        } else {
            return Err(AutomataError::InvalidAlphabet(l));
        }
        ok &= height >= 0;
    }
    Ok(ok && height == 0)
}

const LITERALS: [&[Letter]; 2] = [
    &[Letter::Rho, Letter::Mu],
    &[Letter::Rho, Letter::Lambda, Letter::Mu, Letter::Lambda],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Partial {
    /// Prefix of length `pos` of `LITERALS[pat]`.
    Literal { pat: u8, pos: u8 },
    /// Inside `u` at height `h ≥ 1`.
    Up(u16),
    /// `u` complete; `v` must start next.
    Turn,
    /// Inside `v` at height `k ≥ 1`.
    Down(u16),
}

/// Heights beyond this can't finish a match within `3n` letters.
fn height_cap(n: usize) -> u16 {
    (3 * n / 2).max(1) as u16
}

fn advance(p: Partial, l: Letter, cap: u16, out: &mut BTreeSet<Partial>) -> bool {
    use Partial::*;
    match p {
        Literal { pat, pos } => {
            let lit = LITERALS[pat as usize];
            if lit[pos as usize] == l {
                if pos as usize + 1 == lit.len() {
                    return false;
                }
                out.insert(Literal { pat, pos: pos + 1 });
            }
        }
        Up(h) => match l {
            Letter::Rho if h < cap => {
                out.insert(Up(h + 1));
            }
            Letter::Lambda if h == 1 => {
                out.insert(Turn);
            }
            Letter::Lambda => {
                out.insert(Up(h - 1));
            }
            _ => {}
        },
        Turn => {
            if l == Letter::Lambda {
                out.insert(Down(1));
            }
        }
        Down(k) => match l {
            Letter::Lambda if k < cap => {
                out.insert(Down(k + 1));
            }
            Letter::Mu if k == 1 => return false,
            Letter::Mu => {
                out.insert(Down(k - 1));
            }
            _ => {}
        },
    }
    true
}

/// Truncated automaton for words of length at most `3n`.
pub fn build_gamma(n: usize) -> Dfa {
    assert!(n >= 1);
    let cap = height_cap(n);
    let fresh: Vec<Partial> = vec![
        Partial::Literal { pat: 0, pos: 0 },
        Partial::Literal { pat: 1, pos: 0 },
        Partial::Up(0),
    ];
    Dfa::explore(BTreeSet::<Partial>::new(), move |set, l| {
        let mut next = BTreeSet::new();
        for &p in set {
            if !advance(p, l, cap, &mut next) {
                return None;
            }
        }
        // A new match may begin at this letter.
        for &p in &fresh {
            let alive = match p {
                Partial::Up(0) => {
                    if l == Letter::Rho {
                        next.insert(Partial::Up(1));
                    }
                    true
                }
                other => advance(other, l, cap, &mut next),
            };
            if !alive {
                return None;
            }
        }
        Some(next)
    })
}

/// Direct check of whether `w` contains one of the structural forbidden
/// patterns. Cubic in the word length; used to validate [`build_gamma`].
pub fn contains_structural_pattern(w: &[Letter]) -> bool {
    if LITERALS.iter().any(|lit| w.windows(lit.len()).any(|f| f == *lit)) {
        return true;
    }
    let is = |s: &[Letter], x, y| is_catalan_word(s, x, y).unwrap_or(false);
    (0..w.len()).any(|start| {
        (start + 2..w.len()).any(|cut| {
            is(&w[start..cut], Letter::Rho, Letter::Lambda)
                && (cut + 2..=w.len()).any(|end| is(&w[cut..end], Letter::Lambda, Letter::Mu))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::effect::find_forbidden_words;
    use crate::machine::Word;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn catalan_examples() {
        use Letter::*;
        assert_eq!(is_catalan_word(w("ρλ").letters(), Rho, Lambda), Ok(true));
        assert_eq!(is_catalan_word(w("ρλλρ").letters(), Rho, Lambda), Ok(false));
        assert_eq!(is_catalan_word(w("λμλμ").letters(), Lambda, Mu), Ok(true));
        assert_eq!(is_catalan_word(w("λλμμ").letters(), Lambda, Mu), Ok(true));
        assert_eq!(is_catalan_word(w("ρρλ").letters(), Rho, Lambda), Ok(false));
        assert_eq!(
            is_catalan_word(w("ρμ").letters(), Rho, Lambda),
            Err(AutomataError::InvalidAlphabet(Mu))
        );
        assert_eq!(is_catalan_word(&[], Rho, Lambda), Ok(true));
    }

    #[test]
    fn gamma_examples() {
        let g = build_gamma(4);
        assert!(g.accepts(w("ρλρλμμ").letters()));
        // Contains ρλλμ.
        assert!(!g.accepts(w("ρρλλμμ").letters()));
        assert!(!g.accepts(w("ρμλ").letters()));
        assert!(!g.accepts(w("ρλλμ").letters()));
        assert!(!g.accepts(w("ρρλμλλ").letters()));
        assert!(g.accepts(w("λλμμ").letters()));
    }

    #[test]
    fn gamma_matches_pattern_scan() {
        // Words up to length 12 need n = 4.
        let g = build_gamma(4);
        for len in 0..=12 {
            for word in Word::all_of_length(len) {
                assert_eq!(
                    g.accepts(word.letters()),
                    !contains_structural_pattern(word.letters()),
                    "{word}"
                );
            }
        }
    }

    #[test]
    fn truncations_agree_on_short_words() {
        for n in 1..=3 {
            let a = build_gamma(n);
            let b = build_gamma(n + 1);
            for len in 0..=3 * n {
                for word in Word::all_of_length(len) {
                    assert_eq!(a.accepts(word.letters()), b.accepts(word.letters()), "{n} {word}");
                }
            }
        }
    }

    #[test]
    fn rejects_short_forbidden_words() {
        let g = build_gamma(6);
        for word in find_forbidden_words(6) {
            assert!(!g.accepts(word.letters()), "{word} accepted");
        }
    }
}
