//! The lamplighter group `L = Z ≀ Z/2Z` and the amalgam `L(A) = L *_H L̂`
//! obtained by identifying the lamp `u_i` with its hatted copy `û_i` for
//! every `i` in a set `A ⊆ Z`.
//!
//! Words use the ASCII aliases `a`/`A` for `a^{±1}`, `e` for `ε`, and
//! `b`/`B`/`f` for the hatted generators. An element of `L` is a pair
//! `(S, t)` meaning `(∏_{i∈S} u_i)·a^t`, multiplied by
//! `(S₁, t₁)(S₂, t₂) = (S₁ Δ (S₂ + t₁), t₁ + t₂)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::halting_set::HaltingSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unexpected character {ch:?} at position {position}")]
    Lexical { position: usize, ch: char },
    #[error("word mixes generators of both factors")]
    MixedFactors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    L,
    LHat,
}

impl Factor {
    pub fn opposite(self) -> Factor {
        match self {
            Factor::L => Factor::LHat,
            Factor::LHat => Factor::L,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::L => write!(f, "L"),
            Factor::LHat => write!(f, "Lhat"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    A,
    AInv,
    Eps,
    HatA,
    HatAInv,
    HatEps,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::A,
        Generator::AInv,
        Generator::Eps,
        Generator::HatA,
        Generator::HatAInv,
        Generator::HatEps,
    ];

    pub fn factor(self) -> Factor {
        match self {
            Generator::A | Generator::AInv | Generator::Eps => Factor::L,
            _ => Factor::LHat,
        }
    }

    pub fn inverse(self) -> Generator {
        match self {
            Generator::A => Generator::AInv,
            Generator::AInv => Generator::A,
            Generator::HatA => Generator::HatAInv,
            Generator::HatAInv => Generator::HatA,
            g => g,
        }
    }

    fn alias(self) -> char {
        match self {
            Generator::A => 'a',
            Generator::AInv => 'A',
            Generator::Eps => 'e',
            Generator::HatA => 'b',
            Generator::HatAInv => 'B',
            Generator::HatEps => 'f',
        }
    }

    fn from_alias(c: char) -> Option<Generator> {
        Generator::ALL.into_iter().find(|g| g.alias() == c)
    }

    fn as_element(self) -> LampElement {
        match self {
            Generator::A | Generator::HatA => LampElement::shift(1),
            Generator::AInv | Generator::HatAInv => LampElement::shift(-1),
            Generator::Eps | Generator::HatEps => LampElement::lamp(0),
        }
    }
}

/// A word over the six generators of `L(A)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(pub Vec<Generator>);

impl Word {
    /// `a^i ε a^{-i}` (or the hatted version), length `2|i| + 1`.
    pub fn lamp(factor: Factor, i: i64) -> Word {
        let (up, down, eps) = match factor {
            Factor::L => (Generator::A, Generator::AInv, Generator::Eps),
            Factor::LHat => (Generator::HatA, Generator::HatAInv, Generator::HatEps),
        };
        let (fwd, back) = if i >= 0 { (up, down) } else { (down, up) };
        let n = i.unsigned_abs() as usize;
        let mut w = vec![fwd; n];
        w.push(eps);
        w.extend(std::iter::repeat_n(back, n));
        Word(w)
    }

    pub fn u(i: i64) -> Word {
        Word::lamp(Factor::L, i)
    }

    pub fn u_hat(i: i64) -> Word {
        Word::lamp(Factor::LHat, i)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Commutator `x y x⁻¹ y⁻¹`.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.0 {
            write!(f, "{}", g.alias())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

/// Parses a word written with the aliases `a A e b B f`; whitespace is
/// ignored. Positions in errors are character offsets.
pub fn parse_word(text: &str) -> Result<Word, WordError> {
    text.chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(position, ch)| Generator::from_alias(ch).ok_or(WordError::Lexical { position, ch }))
        .collect::<Result<Vec<_>, _>>()
        .map(Word)
}

/// `(lamps, shift)`: the lamps lit, then the cursor shift.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LampElement {
    pub lamps: BTreeSet<i64>,
    pub shift: i64,
}

impl LampElement {
    pub fn identity() -> Self {
        LampElement::default()
    }

    pub fn shift(t: i64) -> Self {
        LampElement {
            lamps: BTreeSet::new(),
            shift: t,
        }
    }

    /// `u_i`.
    pub fn lamp(i: i64) -> Self {
        LampElement {
            lamps: BTreeSet::from([i]),
            shift: 0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.lamps.is_empty()
    }

    pub fn mul(&self, other: &LampElement) -> LampElement {
        let moved: BTreeSet<i64> = other.lamps.iter().map(|i| i + self.shift).collect();
        LampElement {
            lamps: self.lamps.symmetric_difference(&moved).copied().collect(),
            shift: self.shift + other.shift,
        }
    }

    pub fn inverse(&self) -> LampElement {
        LampElement {
            lamps: self.lamps.iter().map(|i| i - self.shift).collect(),
            shift: -self.shift,
        }
    }
}

impl fmt::Display for LampElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lamps: Vec<String> = self.lamps.iter().map(|i| i.to_string()).collect();
        write!(f, "({{{}}}, {})", lamps.join(", "), self.shift)
    }
}

/// Evaluates a word whose generators all come from one factor.
/// The empty word evaluates to the identity of `L`.
pub fn eval_factor(tokens: &[Generator]) -> Result<(Factor, LampElement), WordError> {
    let factor = tokens.first().map_or(Factor::L, |g| g.factor());
    if tokens.iter().any(|g| g.factor() != factor) {
        return Err(WordError::MixedFactors);
    }
    let element = tokens
        .iter()
        .fold(LampElement::identity(), |acc, g| acc.mul(&g.as_element()));
    Ok((factor, element))
}

/// The subset `A` along which the two factors are glued.
pub trait AmalgamSet {
    fn contains(&self, i: i64) -> bool;
}

impl<F: Fn(i64) -> bool> AmalgamSet for F {
    fn contains(&self, i: i64) -> bool {
        self(i)
    }
}

/// `A` is the complement of the halting set.
impl AmalgamSet for HaltingSet {
    fn contains(&self, i: i64) -> bool {
        // |i| < 2^63, so every simulated step count fits in u64
        self.member_a(&BigInt::from(i)).expect("i64 inputs never overflow the step counter")
    }
}

/// `x ∈ H = {(S, 0) : S ⊆ A finite}`.
pub fn in_amalgamated_subgroup<S: AmalgamSet + ?Sized>(x: &LampElement, set: &S) -> bool {
    x.shift == 0 && x.lamps.iter().all(|&i| set.contains(i))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllable {
    pub factor: Factor,
    pub element: LampElement,
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.factor, self.element)
    }
}

/// Which subgroup syllable is moved across first during reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    LeftmostFirst,
    RightmostFirst,
}

fn syllables_of(w: &Word) -> Vec<Syllable> {
    w.0.chunk_by(|x, y| x.factor() == y.factor())
        .map(|run| {
            let (factor, element) = eval_factor(run).expect("runs are single-factor");
            Syllable { factor, element }
        })
        .collect()
}

/// Drops identity syllables and multiplies equal-factor neighbours.
fn compact(syllables: Vec<Syllable>) -> Vec<Syllable> {
    let mut out: Vec<Syllable> = Vec::with_capacity(syllables.len());
    for s in syllables {
        match out.last_mut() {
            Some(top) if top.factor == s.factor => {
                top.element = top.element.mul(&s.element);
                if top.element.is_identity() {
                    out.pop();
                }
            }
            _ if s.element.is_identity() => {}
            _ => out.push(s),
        }
    }
    out
}

pub fn normal_form<S: AmalgamSet + ?Sized>(w: &Word, set: &S) -> Vec<Syllable> {
    normal_form_with(w, set, Strategy::LeftmostFirst)
}

/// Reduced alternating form of `w`: no identity syllables, adjacent
/// syllables in different factors, and no syllable in `H` unless it is the
/// only one (then it is reported in factor `L`).
pub fn normal_form_with<S: AmalgamSet + ?Sized>(w: &Word, set: &S, strategy: Strategy) -> Vec<Syllable> {
    let mut syllables = compact(syllables_of(w));
    loop {
        if syllables.len() < 2 {
            break;
        }
        let in_h = |s: &Syllable| in_amalgamated_subgroup(&s.element, set);
        let pick = match strategy {
            Strategy::LeftmostFirst => syllables.iter().position(in_h),
            Strategy::RightmostFirst => syllables.iter().rposition(in_h),
        };
        let Some(i) = pick else { break };
        syllables[i].factor = syllables[i].factor.opposite();
        syllables = compact(syllables);
    }
    if let [only] = syllables.as_mut_slice() {
        if in_amalgamated_subgroup(&only.element, set) {
            only.factor = Factor::L;
        }
    }
    syllables
}

/// Word problem for `L(A)`.
pub fn is_trivial<S: AmalgamSet + ?Sized>(w: &Word, set: &S) -> bool {
    normal_form(w, set).is_empty()
}

pub fn is_trivial_with<S: AmalgamSet + ?Sized>(w: &Word, set: &S, strategy: Strategy) -> bool {
    normal_form_with(w, set, strategy).is_empty()
}

/// Every defining relator of `L(A)` with lamp index `|i| <= bound`, and the
/// identification relators `u_j û_j⁻¹` for the `j` in that range lying in
/// `A`.
pub fn relators<S: AmalgamSet + ?Sized>(bound: i64, set: &S) -> Vec<Word> {
    let mut out = vec![
        Word(vec![Generator::Eps, Generator::Eps]),
        Word(vec![Generator::HatEps, Generator::HatEps]),
    ];
    let eps = Word(vec![Generator::Eps]);
    let eps_hat = Word(vec![Generator::HatEps]);
    for i in -bound..=bound {
        out.push(Word::commutator(&eps, &Word::u(i)));
        out.push(Word::commutator(&eps_hat, &Word::u_hat(i)));
        if set.contains(i) {
            out.push(identification(i));
        }
    }
    out
}

/// `u_j û_j⁻¹`.
pub fn identification(j: i64) -> Word {
    Word::u(j).concat(&Word::u_hat(j).inverse())
}
