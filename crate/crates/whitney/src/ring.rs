//! Finite integer combinations over the group, its square, and the
//! Δ-quotient of its cube.
//!
//! Basis terms come in four variants: single words (self-intersection
//! counts), pairs (the two-variable group ring), Δ-cosets of triples, and
//! sphere-index-tagged component terms for the n-sphere invariant.
//! Triple-flavored terms are stored with the third coordinate normalized
//! to the identity, which makes the reduction map to pairs read directly
//! off the stored words.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::group::{parse_word, GroupSpec, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Single,
    Pair,
    Triple,
    Component,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::Single => "single",
            Variant::Pair => "pair",
            Variant::Triple => "triple",
            Variant::Component => "component",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisTerm {
    Single(Word),
    Pair(Word, Word),
    /// Δ-coset representative with third coordinate 1.
    Triple(Word, Word, Word),
    /// Λ-component term: sphere indices sorted ascending, words Δ-canonical.
    Component { spheres: [usize; 3], words: [Word; 3] },
}

impl BasisTerm {
    pub fn single(a: Word) -> Self {
        BasisTerm::Single(a)
    }

    pub fn pair(a: Word, b: Word) -> Self {
        debug_assert_eq!(a.spec(), b.spec());
        BasisTerm::Pair(a, b)
    }

    /// The Δ-coset representative `(a c^-1, b c^-1, 1)`.
    pub fn triple(a: Word, b: Word, c: Word) -> Self {
        let (a, b, c) = delta_canonical_words(a, b, c);
        BasisTerm::Triple(a, b, c)
    }

    /// A component term; `spheres` must be sorted ascending.
    pub fn component(spheres: [usize; 3], words: [Word; 3]) -> Self {
        assert!(spheres[0] <= spheres[1] && spheres[1] <= spheres[2]);
        let [a, b, c] = words;
        let (a, b, c) = delta_canonical_words(a, b, c);
        BasisTerm::Component { spheres, words: [a, b, c] }
    }

    pub fn variant(&self) -> Variant {
        match self {
            BasisTerm::Single(_) => Variant::Single,
            BasisTerm::Pair(..) => Variant::Pair,
            BasisTerm::Triple(..) => Variant::Triple,
            BasisTerm::Component { .. } => Variant::Component,
        }
    }

    pub fn words(&self) -> Vec<&Word> {
        match self {
            BasisTerm::Single(a) => vec![a],
            BasisTerm::Pair(a, b) => vec![a, b],
            BasisTerm::Triple(a, b, c) => vec![a, b, c],
            BasisTerm::Component { words, .. } => words.iter().collect(),
        }
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        self.words()[0].spec()
    }
}

fn delta_canonical_words(a: Word, b: Word, c: Word) -> (Word, Word, Word) {
    let cinv = c.inverse();
    let one = Word::identity(a.spec());
    (a.mul(&cinv).unwrap(), b.mul(&cinv).unwrap(), one)
}

/// The coset-invariant image `(a,b,c) -> (b a^-1, c a^-1)`.
fn triple_words_to_pair(a: &Word, b: &Word, c: &Word) -> (Word, Word) {
    let ainv = a.inverse();
    (b.mul(&ainv).unwrap(), c.mul(&ainv).unwrap())
}

impl fmt::Display for BasisTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisTerm::Single(a) => write!(f, "({a})"),
            BasisTerm::Pair(a, b) => write!(f, "({a},{b})"),
            BasisTerm::Triple(a, b, c) => write!(f, "({a},{b},{c})"),
            BasisTerm::Component { spheres, words } => write!(
                f,
                "({},{},{})_({},{},{})",
                words[0], words[1], words[2], spheres[0], spheres[1], spheres[2]
            ),
        }
    }
}

/// A permutation of three coordinates, acting on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Perm3(pub [usize; 3]);

impl Perm3 {
    pub const IDENTITY: Perm3 = Perm3([0, 1, 2]);

    pub fn all() -> [Perm3; 6] {
        [
            Perm3([0, 1, 2]),
            Perm3([0, 2, 1]),
            Perm3([1, 0, 2]),
            Perm3([1, 2, 0]),
            Perm3([2, 0, 1]),
            Perm3([2, 1, 0]),
        ]
    }

    pub fn sign(&self) -> i8 {
        let p = self.0;
        let mut inv = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm3) -> Perm3 {
        Perm3([self.0[other.0[0]], self.0[other.0[1]], self.0[other.0[2]]])
    }

    fn apply<T: Clone>(&self, items: [T; 3]) -> [T; 3] {
        let mut out = items.clone();
        for i in 0..3 {
            out[self.0[i]] = items[i].clone();
        }
        out
    }
}

/// A finite integer combination of basis terms.  Zero coefficients are
/// never stored; term variants are homogeneous except that component
/// terms with different sphere tags may mix (direct-sum elements).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    spec: Arc<GroupSpec>,
    terms: BTreeMap<BasisTerm, BigInt>,
}

impl RingElement {
    pub fn zero(spec: &Arc<GroupSpec>) -> Self {
        RingElement { spec: Arc::clone(spec), terms: BTreeMap::new() }
    }

    pub fn from_term(term: BasisTerm, coeff: impl Into<BigInt>) -> Self {
        let spec = Arc::clone(term.spec());
        let mut el = RingElement::zero(&spec);
        el.add_term(term, &coeff.into());
        el
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisTerm, &BigInt)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &BasisTerm> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, term: &BasisTerm) -> BigInt {
        self.terms.get(term).cloned().unwrap_or_else(BigInt::zero)
    }

    /// The common variant of all stored terms, if any term is present.
    pub fn variant(&self) -> Option<Variant> {
        self.terms.keys().next().map(|t| t.variant())
    }

    pub fn add_term(&mut self, term: BasisTerm, coeff: &BigInt) {
        if coeff.is_zero() {
            return;
        }
        debug_assert_eq!(term.spec(), &self.spec);
        if let Some(v) = self.variant() {
            debug_assert_eq!(v, term.variant(), "mixed term variants in one element");
        }
        let entry = self.terms.entry(term.clone()).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&term);
        }
    }

    pub fn negate(&self) -> RingElement {
        let terms = self.terms.iter().map(|(t, c)| (t.clone(), -c)).collect();
        RingElement { spec: Arc::clone(&self.spec), terms }
    }

    /// `self + scalar * other`, with zero coefficients pruned.
    pub fn combine(&self, other: &RingElement, scalar: impl Into<BigInt>) -> Result<RingElement, Error> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        if let (Some(a), Some(b)) = (self.variant(), other.variant()) {
            let compatible = a == b;
            if !compatible {
                return Err(Error::VariantMismatch { expected: a.to_string(), got: b.to_string() });
            }
        }
        let scalar = scalar.into();
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), &(c * &scalar));
        }
        Ok(out)
    }

    /// Term-wise image of triple-cosets under `(a,b,c) -> (b a^-1, c a^-1)`.
    /// Component terms lose their sphere tags.
    pub fn triple_to_pair(&self) -> Result<RingElement, Error> {
        let mut out = RingElement::zero(&self.spec);
        for (t, c) in &self.terms {
            let (a, b, cc) = match t {
                BasisTerm::Triple(a, b, c) => (a, b, c),
                BasisTerm::Component { words, .. } => (&words[0], &words[1], &words[2]),
                _ => {
                    return Err(Error::VariantMismatch {
                        expected: "triple".into(),
                        got: t.variant().to_string(),
                    })
                }
            };
            let (x, y) = triple_words_to_pair(a, b, cc);
            out.add_term(BasisTerm::pair(x, y), c);
        }
        Ok(out)
    }

    /// Term-wise lift of pairs to triple-cosets, `(x,y) -> (1,x,y)`;
    /// a section of `triple_to_pair`.
    pub fn pair_to_triple(&self) -> Result<RingElement, Error> {
        let one = Word::identity(&self.spec);
        let mut out = RingElement::zero(&self.spec);
        for (t, c) in &self.terms {
            let BasisTerm::Pair(x, y) = t else {
                return Err(Error::VariantMismatch {
                    expected: "pair".into(),
                    got: t.variant().to_string(),
                });
            };
            out.add_term(BasisTerm::triple(one.clone(), x.clone(), y.clone()), c);
        }
        Ok(out)
    }

    /// Coordinates of each coset representative permuted by `perm`, then
    /// Δ-recanonicalized; signed variant multiplies by sign(perm).
    pub fn permute_triple(&self, perm: &Perm3, signed: bool) -> Result<RingElement, Error> {
        let mut out = RingElement::zero(&self.spec);
        let s = if signed { BigInt::from(perm.sign()) } else { BigInt::one() };
        for (t, c) in &self.terms {
            let BasisTerm::Triple(a, b, cc) = t else {
                return Err(Error::VariantMismatch {
                    expected: "triple".into(),
                    got: t.variant().to_string(),
                });
            };
            let [x, y, z] = perm.apply([a.clone(), b.clone(), cc.clone()]);
            out.add_term(BasisTerm::triple(x, y, z), &(c * &s));
        }
        Ok(out)
    }

    /// Each coordinate left-multiplied by its multiplier, recanonicalized.
    pub fn left_translate(&self, multipliers: &[Word]) -> Result<RingElement, Error> {
        let mut out = RingElement::zero(&self.spec);
        for (t, c) in &self.terms {
            let words = t.words();
            if words.len() != multipliers.len() {
                return Err(Error::ArityMismatch { expected: words.len(), got: multipliers.len() });
            }
            let moved: Vec<Word> = multipliers
                .iter()
                .zip(&words)
                .map(|(m, w)| m.mul(w).unwrap())
                .collect();
            let term = match t {
                BasisTerm::Single(_) => BasisTerm::single(moved[0].clone()),
                BasisTerm::Pair(..) => BasisTerm::pair(moved[0].clone(), moved[1].clone()),
                BasisTerm::Triple(..) => {
                    BasisTerm::triple(moved[0].clone(), moved[1].clone(), moved[2].clone())
                }
                BasisTerm::Component { spheres, .. } => BasisTerm::component(
                    *spheres,
                    [moved[0].clone(), moved[1].clone(), moved[2].clone()],
                ),
            };
            out.add_term(term, c);
        }
        Ok(out)
    }

    /// Sum of all coefficients (the augmentation over the basis).
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }
}

/// `x + scalar * y` (the spec's combining operation).
pub fn ring_combine(x: &RingElement, y: &RingElement, scalar: i64) -> Result<RingElement, Error> {
    x.combine(y, scalar)
}

pub fn delta_canonicalize(a: Word, b: Word, c: Word) -> BasisTerm {
    BasisTerm::triple(a, b, c)
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, c) in &self.terms {
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "{t}")?;
            } else {
                write!(f, "{mag}*{t}")?;
            }
        }
        Ok(())
    }
}

/// Parses element text: signed integer coefficients times parenthesized
/// tuples, e.g. `2*(t^3,t^4) - (1,t)`.  Bare words are single-variant
/// terms; `0` is the zero element.  Component terms carry a sphere-index
/// suffix, e.g. `(a,b,c)_(1,1,2)`.
pub fn parse_element(spec: &Arc<GroupSpec>, text: &str) -> Result<RingElement, Error> {
    let text = text.trim();
    let mut out = RingElement::zero(spec);
    if text == "0" {
        return Ok(out);
    }
    for (sign, chunk) in split_signed_terms(text)? {
        let chunk = chunk.trim();
        let (coeff_text, atom) = match chunk.split_once('*') {
            Some((c, rest)) if c.trim().chars().all(|ch| ch.is_ascii_digit()) && !c.trim().is_empty() => {
                (Some(c.trim()), rest.trim())
            }
            _ => (None, chunk),
        };
        let coeff: BigInt = match coeff_text {
            Some(c) => c.parse().map_err(|_| Error::Parse(format!("bad coefficient `{c}`")))?,
            None => BigInt::one(),
        };
        let coeff = coeff * sign;
        let term = parse_basis_term(spec, atom)?;
        out.add_term(term, &coeff);
    }
    Ok(out)
}

fn parse_basis_term(spec: &Arc<GroupSpec>, atom: &str) -> Result<BasisTerm, Error> {
    let atom = atom.trim();
    if !atom.starts_with('(') {
        // bare word: single variant
        return Ok(BasisTerm::single(parse_word(spec, atom)?));
    }
    let close = atom
        .find(')')
        .ok_or_else(|| Error::Parse(format!("unclosed tuple in `{atom}`")))?;
    let inner = &atom[1..close];
    let rest = atom[close + 1..].trim();
    let words: Vec<Word> = inner
        .split(',')
        .map(|w| parse_word(spec, w))
        .collect::<Result<_, _>>()?;
    if !rest.is_empty() {
        let tag = rest
            .strip_prefix("_(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("bad component tag in `{atom}`")))?;
        let spheres: Vec<usize> = tag
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad sphere index `{s}`"))))
            .collect::<Result<_, _>>()?;
        if spheres.len() != 3 || words.len() != 3 {
            return Err(Error::Parse(format!("component term needs 3 words and 3 indices: `{atom}`")));
        }
        if !(spheres[0] <= spheres[1] && spheres[1] <= spheres[2]) {
            return Err(Error::Parse(format!("sphere indices must be sorted: `{atom}`")));
        }
        return Ok(BasisTerm::component(
            [spheres[0], spheres[1], spheres[2]],
            [words[0].clone(), words[1].clone(), words[2].clone()],
        ));
    }
    match words.len() {
        1 => Ok(BasisTerm::single(words[0].clone())),
        2 => Ok(BasisTerm::pair(words[0].clone(), words[1].clone())),
        3 => Ok(BasisTerm::triple(words[0].clone(), words[1].clone(), words[2].clone())),
        n => Err(Error::Parse(format!("tuples have 1 to 3 coordinates, got {n}"))),
    }
}

/// Splits `a - b + c` into signed chunks at top level (outside parens).
fn split_signed_terms(text: &str) -> Result<Vec<(i64, String)>, Error> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    let mut sign = 1i64;
    let mut expecting_term = true;
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::Parse("unbalanced parentheses".into()))?;
                current.push(ch);
            }
            '+' | '-' if depth == 0 && !expecting_term && !ends_with_operator(&current) => {
                out.push((sign, std::mem::take(&mut current)));
                sign = if ch == '+' { 1 } else { -1 };
                expecting_term = true;
            }
            '-' if depth == 0 && expecting_term && current.trim().is_empty() => {
                sign = -sign;
            }
            _ => {
                if !ch.is_whitespace() {
                    expecting_term = false;
                }
                current.push(ch);
            }
        }
    }
    if !current.trim().is_empty() {
        out.push((sign, current));
    }
    Ok(out)
}

// `t^-1` style exponents: a trailing `^` means the next `-` is not an operator.
fn ends_with_operator(s: &str) -> bool {
    s.trim_end().ends_with('^')
}
