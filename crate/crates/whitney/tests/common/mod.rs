//! Shared randomized diagram generators for the integration suites.
//! All generators produce valid diagrams with vanishing
//! self-intersection invariant: every double-point pair shares one
//! group element with opposite signs.

use std::sync::Arc;

use rand::Rng;

use whitney::diagram::{
    ArcRef, ArcSide, BoundaryCrossing, DoublePoint, InteriorPoint, WhitneyDiagram, WhitneyDisk,
};
use whitney::group::{GroupSpec, Word};
use whitney::multi::{MultiDiagram, MultiDisk, MultiInteriorPoint, MultiPoint};
use whitney::relations::{Pi2Class, Pi2Kind};
use whitney::ring::RingElement;

pub fn free2() -> Arc<GroupSpec> {
    GroupSpec::free(&["a", "b"])
}

pub fn random_word(rng: &mut impl Rng, spec: &Arc<GroupSpec>, max_len: u64) -> Word {
    let len = rng.gen_range(0..=max_len);
    let mut out = Word::identity(spec);
    for _ in 0..len {
        let idx = rng.gen_range(0..spec.rank().max(1));
        let exp = if rng.gen_bool(0.5) { 1 } else { -1 };
        out = out.mul(&Word::generator(spec, idx, exp)).unwrap();
    }
    out
}

fn random_side(rng: &mut impl Rng) -> ArcSide {
    if rng.gen_bool(0.5) {
        ArcSide::Positive
    } else {
        ArcSide::Negative
    }
}

pub struct DiagramOptions {
    pub max_word_len: u64,
    pub crossings: bool,
    pub with_pi2: bool,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        DiagramOptions { max_word_len: 2, crossings: true, with_pi2: false }
    }
}

/// A valid single-sphere diagram over the free group of rank two with
/// up to five disks, up to three interior intersections per disk, and
/// optionally boundary crossings and pairing data.
pub fn random_diagram(rng: &mut impl Rng, opts: &DiagramOptions) -> WhitneyDiagram {
    let spec = free2();
    let mut d = WhitneyDiagram::empty(&spec);
    let disks = rng.gen_range(1..=5);
    for k in 0..disks {
        let g = random_word(rng, &spec, opts.max_word_len);
        let point_g = random_word(rng, &spec, opts.max_word_len);
        d.double_points.push(DoublePoint {
            id: format!("p{k}+"),
            sign: 1,
            g: point_g.clone(),
        });
        d.double_points.push(DoublePoint { id: format!("p{k}-"), sign: -1, g: point_g });
        let interior = (0..rng.gen_range(0..=3))
            .map(|_| InteriorPoint {
                sign: if rng.gen_bool(0.5) { 1 } else { -1 },
                h: random_word(rng, &spec, opts.max_word_len),
            })
            .collect();
        d.disks.push(WhitneyDisk {
            id: format!("W{k}"),
            positive: format!("p{k}+"),
            negative: format!("p{k}-"),
            g,
            framing: 0,
            interior,
        });
    }
    if opts.crossings {
        for _ in 0..rng.gen_range(0..=2) {
            let i = rng.gen_range(0..disks);
            let j = rng.gen_range(0..disks);
            let a = ArcRef { disk: format!("W{i}"), arc: random_side(rng) };
            let b = ArcRef { disk: format!("W{j}"), arc: random_side(rng) };
            if a == b {
                continue;
            }
            d.crossings.push(BoundaryCrossing { a, b, agree: rng.gen_bool(0.5) });
        }
    }
    if opts.with_pi2 {
        d.pi2.push(random_pi2_class(rng, &spec));
    }
    d
}

/// A pairing-data class with small word norms so default enumeration
/// horizons stay cheap.
pub fn random_pi2_class(rng: &mut impl Rng, spec: &Arc<GroupSpec>) -> Pi2Class {
    let mut lambda = RingElement::zero(spec);
    for _ in 0..rng.gen_range(0..=2) {
        let w = random_word(rng, spec, 1);
        let coeff = if rng.gen_bool(0.5) { 1 } else { -1 };
        lambda = lambda
            .combine(&RingElement::from_term(whitney::ring::BasisTerm::single(w), coeff), 1)
            .unwrap();
    }
    Pi2Class {
        name: "A".into(),
        kind: Pi2Kind::Sphere,
        lambda: vec![lambda],
        omega2: rng.gen_range(0..=1),
    }
}

/// A valid three-sphere configuration with no self-intersection data:
/// cross disks between random sphere pairs carrying interior
/// intersections on random sheets.
pub fn random_triple(rng: &mut impl Rng, max_word_len: u64) -> MultiDiagram {
    let spec = free2();
    let mut d = MultiDiagram::empty(&spec, 3);
    let pairs = [(1, 2), (1, 3), (2, 3)];
    for k in 0..rng.gen_range(1..=3) {
        let spheres = pairs[rng.gen_range(0..pairs.len())];
        d.double_points.push(MultiPoint { id: format!("q{k}+"), spheres, sign: 1 });
        d.double_points.push(MultiPoint { id: format!("q{k}-"), spheres, sign: -1 });
        let interior = (0..rng.gen_range(0..=2))
            .map(|_| MultiInteriorPoint {
                sign: if rng.gen_bool(0.5) { 1 } else { -1 },
                sheet: rng.gen_range(1..=3),
                h: random_word(rng, &spec, max_word_len),
            })
            .collect();
        d.disks.push(MultiDisk {
            id: format!("V{k}"),
            spheres,
            positive: format!("q{k}+"),
            negative: format!("q{k}-"),
            g_plus: random_word(rng, &spec, max_word_len),
            g_minus: random_word(rng, &spec, max_word_len),
            framing: 0,
            interior,
        });
    }
    d
}
