//! Fundamental-group elements with decidable normal forms.
//!
//! Three group classes are supported: free, free-abelian, and cyclic
//! (modulus 0 encodes the infinite cyclic group).  Every `Word` is stored
//! in normal form, so equality of group elements is structural equality.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupClass {
    Free,
    FreeAbelian,
    Cyclic { modulus: u64 },
}

/// A group presentation from one of the decidable classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    class: GroupClass,
    generators: Vec<String>,
}

impl GroupSpec {
    pub fn new(class: GroupClass, generators: Vec<String>) -> Result<Self, Error> {
        for (i, g) in generators.iter().enumerate() {
            if g.is_empty() || g == "1" || !g.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::BadGeneratorName(g.clone()));
            }
            if g.chars().next().unwrap().is_ascii_digit() {
                return Err(Error::BadGeneratorName(g.clone()));
            }
            if generators[..i].contains(g) {
                return Err(Error::DuplicateGenerator(g.clone()));
            }
        }
        if let GroupClass::Cyclic { .. } = class {
            if generators.len() != 1 {
                return Err(Error::BadGeneratorName(
                    "cyclic group takes exactly one generator".into(),
                ));
            }
        }
        Ok(GroupSpec { class, generators })
    }

    pub fn free(names: &[&str]) -> Arc<Self> {
        Arc::new(Self::new(GroupClass::Free, names.iter().map(|s| s.to_string()).collect()).unwrap())
    }

    pub fn free_abelian(names: &[&str]) -> Arc<Self> {
        Arc::new(
            Self::new(
                GroupClass::FreeAbelian,
                names.iter().map(|s| s.to_string()).collect(),
            )
            .unwrap(),
        )
    }

    pub fn cyclic(name: &str, modulus: u64) -> Arc<Self> {
        Arc::new(Self::new(GroupClass::Cyclic { modulus }, vec![name.to_string()]).unwrap())
    }

    pub fn class(&self) -> &GroupClass {
        &self.class
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Freely reduced syllables (generator index, nonzero exponent),
    /// adjacent indices distinct.
    Free(Vec<(usize, i64)>),
    /// Exponent vector; cyclic entries reduced into [0, m) for m > 0.
    Vector(Vec<i64>),
}

/// A group element in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    spec: Arc<GroupSpec>,
    repr: Repr,
}

impl Word {
    pub fn identity(spec: &Arc<GroupSpec>) -> Self {
        let repr = match spec.class {
            GroupClass::Free => Repr::Free(vec![]),
            _ => Repr::Vector(vec![0; spec.rank()]),
        };
        Word { spec: Arc::clone(spec), repr }
    }

    /// Builds the normal form of `gen^exp`.
    pub fn generator(spec: &Arc<GroupSpec>, index: usize, exp: i64) -> Self {
        assert!(index < spec.rank(), "generator index out of range");
        Self::from_symbols(spec, &[(index, exp)])
    }

    /// Normalizes a raw symbol sequence (indices with exponents).
    pub fn from_symbols(spec: &Arc<GroupSpec>, symbols: &[(usize, i64)]) -> Self {
        match spec.class {
            GroupClass::Free => {
                let mut syllables: Vec<(usize, i64)> = Vec::new();
                for &(i, e) in symbols {
                    push_syllable(&mut syllables, i, e);
                }
                Word { spec: Arc::clone(spec), repr: Repr::Free(syllables) }
            }
            GroupClass::FreeAbelian => {
                let mut v = vec![0i64; spec.rank()];
                for &(i, e) in symbols {
                    v[i] += e;
                }
                Word { spec: Arc::clone(spec), repr: Repr::Vector(v) }
            }
            GroupClass::Cyclic { modulus } => {
                let mut e: i64 = symbols.iter().map(|&(_, e)| e).sum();
                if modulus > 0 {
                    e = e.rem_euclid(modulus as i64);
                }
                Word { spec: Arc::clone(spec), repr: Repr::Vector(vec![e]) }
            }
        }
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn is_identity(&self) -> bool {
        match &self.repr {
            Repr::Free(s) => s.is_empty(),
            Repr::Vector(v) => v.iter().all(|&e| e == 0),
        }
    }

    /// Reduced word length (free), or the sum of geodesic exponent norms.
    pub fn norm(&self) -> u64 {
        match (&self.repr, &self.spec.class) {
            (Repr::Free(s), _) => s.iter().map(|&(_, e)| e.unsigned_abs()).sum(),
            (Repr::Vector(v), GroupClass::Cyclic { modulus: m }) if *m > 0 => {
                let e = v[0] as u64;
                e.min(m - e)
            }
            (Repr::Vector(v), _) => v.iter().map(|&e| e.unsigned_abs()).sum(),
        }
    }

    pub fn inverse(&self) -> Word {
        let repr = match &self.repr {
            Repr::Free(s) => Repr::Free(s.iter().rev().map(|&(i, e)| (i, -e)).collect()),
            Repr::Vector(v) => match self.spec.class {
                GroupClass::Cyclic { modulus: m } if m > 0 => {
                    Repr::Vector(vec![(-v[0]).rem_euclid(m as i64)])
                }
                _ => Repr::Vector(v.iter().map(|&e| -e).collect()),
            },
        };
        Word { spec: Arc::clone(&self.spec), repr }
    }

    pub fn mul(&self, other: &Word) -> Result<Word, Error> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let repr = match (&self.repr, &other.repr) {
            (Repr::Free(a), Repr::Free(b)) => {
                let mut syllables = a.clone();
                for &(i, e) in b {
                    push_syllable(&mut syllables, i, e);
                }
                Repr::Free(syllables)
            }
            (Repr::Vector(a), Repr::Vector(b)) => match self.spec.class {
                GroupClass::Cyclic { modulus: m } if m > 0 => {
                    Repr::Vector(vec![(a[0] + b[0]).rem_euclid(m as i64)])
                }
                _ => Repr::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            },
            _ => unreachable!("repr kind is determined by the spec"),
        };
        Ok(Word { spec: Arc::clone(&self.spec), repr })
    }

    /// True iff `self != 1` and `self^2 = 1`.
    pub fn is_order_two(&self) -> bool {
        if self.is_identity() {
            return false;
        }
        match self.spec.class {
            // Free and free-abelian groups are torsion-free.
            GroupClass::Free | GroupClass::FreeAbelian => false,
            GroupClass::Cyclic { modulus: m } => {
                let Repr::Vector(v) = &self.repr else { unreachable!() };
                m > 0 && m % 2 == 0 && v[0] as u64 == m / 2
            }
        }
    }

    fn syllables(&self) -> Vec<(usize, i64)> {
        match &self.repr {
            Repr::Free(s) => s.clone(),
            Repr::Vector(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| (i, e))
                .collect(),
        }
    }
}

fn push_syllable(syllables: &mut Vec<(usize, i64)>, i: usize, e: i64) {
    if e == 0 {
        return;
    }
    match syllables.last_mut() {
        Some(last) if last.0 == i => {
            last.1 += e;
            if last.1 == 0 {
                syllables.pop();
            }
        }
        _ => syllables.push((i, e)),
    }
}

/// Total order: by norm, then lexicographic on (index, exponent) pairs.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm()
            .cmp(&other.norm())
            .then_with(|| self.syllables().cmp(&other.syllables()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let syllables = self.syllables();
        if syllables.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = syllables
            .iter()
            .map(|&(i, e)| {
                let name = &self.spec.generators()[i];
                if e == 1 {
                    name.clone()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Normalizes a word from its text form: generator names, `^` integer
/// exponents, `*` concatenation, `1` for the identity (e.g. `t^3`, `a*b^-1`).
pub fn parse_word(spec: &Arc<GroupSpec>, text: &str) -> Result<Word, Error> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty word".into()));
    }
    let mut symbols: Vec<(usize, i64)> = Vec::new();
    for factor in text.split('*') {
        let factor = factor.trim();
        if factor == "1" {
            continue;
        }
        let (name, exp) = match factor.split_once('^') {
            Some((n, e)) => {
                let exp: i64 = e
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?;
                (n.trim(), exp)
            }
            None => (factor, 1),
        };
        let idx = spec
            .generator_index(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        symbols.push((idx, exp));
    }
    Ok(Word::from_symbols(spec, &symbols))
}

/// Normalized product `x * y` or `x * y^-1`.
pub fn group_multiply(x: &Word, y: &Word, invert_y: bool) -> Result<Word, Error> {
    if invert_y {
        x.mul(&y.inverse())
    } else {
        x.mul(y)
    }
}

/// All distinct normal-form words of norm <= `radius`, in the canonical
/// word order (norm, then lexicographic).  Always contains the identity.
pub fn enumerate_ball(spec: &Arc<GroupSpec>, radius: u64) -> Vec<Word> {
    let mut out = match spec.class {
        GroupClass::Free => {
            let mut words = vec![Word::identity(spec)];
            // letters: (index, +1/-1); extend reduced letter strings.
            let mut frontier: Vec<Vec<(usize, i64)>> = vec![vec![]];
            for _ in 0..radius {
                let mut next = Vec::new();
                for w in &frontier {
                    for i in 0..spec.rank() {
                        for s in [1i64, -1] {
                            if let Some(&(j, e)) = w.last() {
                                if j == i && e == -s {
                                    continue;
                                }
                            }
                            let mut v = w.clone();
                            v.push((i, s));
                            words.push(Word::from_symbols(spec, &v));
                            next.push(v);
                        }
                    }
                }
                frontier = next;
            }
            words
        }
        GroupClass::FreeAbelian => {
            let mut words = Vec::new();
            let mut v = vec![0i64; spec.rank()];
            enumerate_vectors(spec, &mut v, 0, radius as i64, &mut words);
            words
        }
        GroupClass::Cyclic { modulus: m } => {
            let mut words = Vec::new();
            if m == 0 {
                for e in -(radius as i64)..=(radius as i64) {
                    words.push(Word::from_symbols(spec, &[(0, e)]));
                }
            } else {
                for e in 0..m as i64 {
                    let w = Word::from_symbols(spec, &[(0, e)]);
                    if w.norm() <= radius {
                        words.push(w);
                    }
                }
            }
            words
        }
    };
    out.sort();
    out.dedup();
    out
}

fn enumerate_vectors(
    spec: &Arc<GroupSpec>,
    v: &mut Vec<i64>,
    pos: usize,
    budget: i64,
    out: &mut Vec<Word>,
) {
    if pos == v.len() {
        let symbols: Vec<(usize, i64)> = v.iter().enumerate().map(|(i, &e)| (i, e)).collect();
        out.push(Word::from_symbols(spec, &symbols));
        return;
    }
    for e in -budget..=budget {
        v[pos] = e;
        enumerate_vectors(spec, v, pos + 1, budget - e.abs(), out);
    }
    v[pos] = 0;
}
