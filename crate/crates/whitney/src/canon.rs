//! Canonical forms modulo the local relations via signed orbit closure.
//!
//! Pair terms are closed under the boundary-crossing, sheet-change, and
//! framing moves; component terms under their local relations including
//! the cross-component identification.  A class whose closure reaches
//! some term with both signs is 2-torsion and its coefficient lives in
//! {0,1}.  In the unframed pair mode, terms with an identity coordinate
//! generate zero classes instead of being framing-identified.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::ring::{BasisTerm, RingElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CanonMode {
    /// BC, SC, FR on pair terms.
    PairFramed,
    /// BC, SC on pair terms; identity-coordinate classes are zero.
    PairUnframed,
    /// The component-term local relations (two signed swaps plus the
    /// cross-component boundary-twist identification).
    Component,
    /// Plain Δ-coset triples carry no local relations.
    Triple,
}

/// The signed relation-orbit of a basis term.
#[derive(Debug, Clone)]
pub struct SignedClass {
    /// Order-minimal member term.
    pub representative: BasisTerm,
    /// Sign transported from the seed term to each member.
    pub members: BTreeMap<BasisTerm, i8>,
    /// True iff some member is reachable with both signs.
    pub torsion2: bool,
    /// True iff the class is identified with zero (unframed mode).
    pub killed: bool,
}

impl SignedClass {
    /// Sign carried by `term`'s canonical image on the representative:
    /// `term = sign_to_rep(term) * representative` in the quotient.
    pub fn sign_to_rep(&self, term: &BasisTerm) -> i8 {
        self.members[&self.representative] * self.members[term]
    }
}

const CLOSURE_CAP: usize = 8192;

fn closure_moves(mode: CanonMode, t: &BasisTerm) -> Vec<(i8, BasisTerm)> {
    match (mode, t) {
        (CanonMode::PairFramed | CanonMode::PairUnframed, BasisTerm::Pair(a, b)) => {
            let mut out = vec![
                // BC: (a,b) = -(b,a)
                (-1, BasisTerm::pair(b.clone(), a.clone())),
                // SC: (a,b) = -(a^-1, b a^-1)
                (-1, BasisTerm::pair(a.inverse(), b.mul(&a.inverse()).unwrap())),
            ];
            if mode == CanonMode::PairFramed {
                // FR: (a,1) = (a,a), both directions
                if b.is_identity() {
                    out.push((1, BasisTerm::pair(a.clone(), a.clone())));
                }
                if a == b && !a.is_identity() {
                    out.push((1, BasisTerm::pair(a.clone(), crate::group::Word::identity(a.spec()))));
                }
            }
            out
        }
        (CanonMode::Component, BasisTerm::Component { spheres, words }) => {
            let [i, j, k] = *spheres;
            let [a, b, c] = words.clone();
            let mut out = Vec::new();
            if i == j {
                // (a,b,c)_{iij} = -(b,a,c)_{iij}
                out.push((-1, BasisTerm::component(*spheres, [b.clone(), a.clone(), c.clone()])));
            }
            if j == k {
                // (a,b,c)_{ijj} = -(a,c,b)_{ijj}
                out.push((-1, BasisTerm::component(*spheres, [a.clone(), c.clone(), b.clone()])));
            }
            // (a,a,b)_{iij} = (a,b,b)_{ijj}: note the stored representatives
            // are Δ-canonical so the equal-coordinate patterns are coset
            // properties.
            if i == j && a == b {
                out.push((1, BasisTerm::component([i, k, k], [a.clone(), c.clone(), c.clone()])));
            }
            if j == k && b == c {
                out.push((1, BasisTerm::component([i, i, j], [a.clone(), a.clone(), b.clone()])));
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Breadth-first signed closure of `{(+1, seed)}` under the mode's moves.
pub fn signed_class_closure(seed: &BasisTerm, mode: CanonMode) -> SignedClass {
    let mut members: BTreeMap<BasisTerm, i8> = BTreeMap::new();
    let mut torsion2 = false;
    let mut queue: VecDeque<(i8, BasisTerm)> = VecDeque::new();
    members.insert(seed.clone(), 1);
    queue.push_back((1, seed.clone()));
    while let Some((sign, term)) = queue.pop_front() {
        for (move_sign, image) in closure_moves(mode, &term) {
            let s = sign * move_sign;
            match members.get(&image) {
                Some(&prev) => {
                    if prev != s {
                        torsion2 = true;
                    }
                }
                None => {
                    assert!(members.len() < CLOSURE_CAP, "relation closure did not terminate");
                    members.insert(image.clone(), s);
                    queue.push_back((s, image));
                }
            }
        }
    }
    let representative = members.keys().min().unwrap().clone();
    let killed = mode == CanonMode::PairUnframed
        && members
            .keys()
            .any(|t| t.words().iter().any(|w| w.is_identity()));
    SignedClass { representative, members, torsion2, killed }
}

/// Memoizing canonicalizer for one relation mode.  The closure cache is
/// shared across readers; inserts take the write lock briefly.
pub struct Canonicalizer {
    mode: CanonMode,
    cache: RwLock<HashMap<BasisTerm, Arc<SignedClass>>>,
}

impl Canonicalizer {
    pub fn new(mode: CanonMode) -> Self {
        Canonicalizer { mode, cache: RwLock::new(HashMap::new()) }
    }

    pub fn mode(&self) -> CanonMode {
        self.mode
    }

    pub fn class(&self, term: &BasisTerm) -> Arc<SignedClass> {
        if let Some(c) = self.cache.read().unwrap().get(term) {
            return Arc::clone(c);
        }
        let class = Arc::new(signed_class_closure(term, self.mode));
        let mut cache = self.cache.write().unwrap();
        for member in class.members.keys() {
            cache.entry(member.clone()).or_insert_with(|| Arc::clone(&class));
        }
        Arc::clone(cache.get(term).unwrap())
    }

    pub fn is_torsion2(&self, term: &BasisTerm) -> bool {
        self.class(term).torsion2
    }

    /// Replaces every term by its signed representative; torsion-2
    /// coefficients are reduced into {0,1}; zero classes are dropped.
    /// Idempotent, and constant on residue classes.
    pub fn canonicalize(&self, x: &RingElement) -> RingElement {
        let mut out = RingElement::zero(x.spec());
        let mut torsion_reps: Vec<BasisTerm> = Vec::new();
        for (term, coeff) in x.terms() {
            let class = self.class(term);
            if class.killed {
                continue;
            }
            let sign = BigInt::from(class.sign_to_rep(term));
            if class.torsion2 && !torsion_reps.contains(&class.representative) {
                torsion_reps.push(class.representative.clone());
            }
            out.add_term(class.representative.clone(), &(coeff * sign));
        }
        for rep in torsion_reps {
            let c = out.coeff(&rep);
            if c.is_zero() {
                continue;
            }
            let reduced = ((c.clone() % 2) + 2) % 2;
            out.add_term(rep, &(reduced - c));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{parse_word, GroupSpec};
    use crate::ring::{parse_element, BasisTerm, Perm3};
    use std::sync::Arc as StdArc;

    fn free2() -> StdArc<GroupSpec> {
        GroupSpec::free(&["a", "b"])
    }

    fn pair(spec: &StdArc<GroupSpec>, a: &str, b: &str) -> BasisTerm {
        BasisTerm::pair(parse_word(spec, a).unwrap(), parse_word(spec, b).unwrap())
    }

    #[test]
    fn identity_class_is_torsion() {
        let spec = free2();
        let class = signed_class_closure(&pair(&spec, "1", "1"), CanonMode::PairFramed);
        assert!(class.torsion2);
        assert!(class.members.contains_key(&pair(&spec, "1", "1")));
    }

    #[test]
    fn framing_orbit() {
        let spec = free2();
        let class = signed_class_closure(&pair(&spec, "a", "1"), CanonMode::PairFramed);
        assert!(class.members.contains_key(&pair(&spec, "a", "a")));
        assert!(class.torsion2);
    }

    #[test]
    fn generic_orbit_has_six_members() {
        let spec = free2();
        let class = signed_class_closure(&pair(&spec, "a", "b"), CanonMode::PairFramed);
        assert_eq!(class.members.len(), 6);
        assert!(!class.torsion2);
        // cross-check the six images against the signed coordinate
        // permutations of the Δ-coset lift (1, a, b)
        let lift = parse_element(&spec, "(1,a,b)").unwrap();
        for perm in Perm3::all() {
            let image = lift.permute_triple(&perm, true).unwrap().triple_to_pair().unwrap();
            let (term, coeff) = image.terms().next().unwrap();
            let stored = class.members.get(term).copied().expect("image missing from closure");
            assert_eq!(coeff, &BigInt::from(stored));
        }
    }

    #[test]
    fn canonicalize_kills_relations() {
        let spec = free2();
        let canon = Canonicalizer::new(CanonMode::PairFramed);
        for text in [
            "(a,b) + (b,a)",
            "(a,b) + (a^-1,b*a^-1)",
            "(a,1) - (a,a)",
            "2*(a,1)",
        ] {
            let x = parse_element(&spec, text).unwrap();
            assert!(canon.canonicalize(&x).is_zero(), "{text} should canonicalize to 0");
        }
    }

    #[test]
    fn canonicalize_idempotent() {
        let spec = free2();
        let canon = Canonicalizer::new(CanonMode::PairFramed);
        let x = parse_element(&spec, "3*(a,b) - 2*(b^-1,a) + (a,1)").unwrap();
        let c1 = canon.canonicalize(&x);
        let c2 = canon.canonicalize(&c1);
        assert_eq!(c1, c2);
    }

    #[test]
    fn unframed_kills_identity_classes() {
        let spec = free2();
        let canon = Canonicalizer::new(CanonMode::PairUnframed);
        let x = parse_element(&spec, "(a,1) + 5*(1,b)").unwrap();
        assert!(canon.canonicalize(&x).is_zero());
        // (a,a) reaches (a^-1, 1) by SC, so it dies too
        let z = parse_element(&spec, "(a,a)").unwrap();
        assert!(canon.canonicalize(&z).is_zero());
        // a generic pair survives
        let y = parse_element(&spec, "(a,b)").unwrap();
        assert!(!canon.canonicalize(&y).is_zero());
    }

    #[test]
    fn component_relations() {
        let spec = free2();
        let w = |s| parse_word(&spec, s).unwrap();
        let canon = Canonicalizer::new(CanonMode::Component);
        // (a,b,c)_{iij} = -(b,a,c)_{iij}
        let t = BasisTerm::component([1, 1, 2], [w("a"), w("b"), w("1")]);
        let u = BasisTerm::component([1, 1, 2], [w("b"), w("a"), w("1")]);
        let mut x = RingElement::from_term(t, 1);
        x.add_term(u, &BigInt::from(1));
        assert!(canon.canonicalize(&x).is_zero());
        // (a,a,b)_{iij} = (a,b,b)_{ijj}
        let t = BasisTerm::component([1, 1, 2], [w("a"), w("a"), w("b")]);
        let u = BasisTerm::component([1, 2, 2], [w("a"), w("b"), w("b")]);
        let mut x = RingElement::from_term(t, 1);
        x.add_term(u, &BigInt::from(-1));
        assert!(canon.canonicalize(&x).is_zero());
    }

    #[test]
    fn distinct_component_is_rigid() {
        let spec = free2();
        let w = |s| parse_word(&spec, s).unwrap();
        let t = BasisTerm::component([1, 2, 3], [w("a"), w("b"), w("1")]);
        let class = signed_class_closure(&t, CanonMode::Component);
        assert_eq!(class.members.len(), 1);
    }
}
