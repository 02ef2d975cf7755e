//! The n-sphere secondary invariant and the triple intersection
//! invariant, over based Whitney disks with disjointly embedded
//! boundaries.
//!
//! Every interior intersection determines three (sphere, role) sheets —
//! the disk's positive arc, its negative arc, and the intersecting
//! sphere — each carrying a based group element.  Sorting the sheets by
//! sphere index with role order positive < negative < interior routes
//! the intersection to its component with the sign of the sorting
//! permutation, which reproduces each of the displayed per-sort
//! contribution formulas uniformly.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::canon::{CanonMode, Canonicalizer};
use crate::diagram::{GroupManifest, Pi2Manifest, WhitneyDiagram};
use crate::error::Error;
use crate::group::{parse_word, GroupSpec, Word};
use crate::moves::resolve_all_crossings;
use crate::relations::{
    all_lambda_zero, build_relation_instances, default_horizon, lattice_reduce, InstanceContext,
    Pi2Class, QuotientElement,
};
use crate::ring::{BasisTerm, Perm3, RingElement};

/// An intersection or self-intersection point between spheres `i <= j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoint {
    pub id: String,
    /// Sphere pair, smaller index first.
    pub spheres: (usize, usize),
    pub sign: i8,
}

/// An intersection of sphere `sheet` with a disk interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiInteriorPoint {
    pub sign: i8,
    pub sheet: usize,
    pub h: Word,
}

/// A based framed Whitney disk pairing two opposite-sign points between
/// spheres `i <= j`; its positive arc lies on sphere `i`.  `g_plus` and
/// `g_minus` are the based elements of the positive and negative
/// sheets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiDisk {
    pub id: String,
    pub spheres: (usize, usize),
    pub positive: String,
    pub negative: String,
    pub g_plus: Word,
    pub g_minus: Word,
    pub framing: i64,
    pub interior: Vec<MultiInteriorPoint>,
}

/// A configuration of `n` immersed spheres with all double points
/// paired by based disks.  Boundary arcs are required to be disjointly
/// embedded, so there is no crossing data.
#[derive(Debug, Clone)]
pub struct MultiDiagram {
    pub spec: Arc<GroupSpec>,
    pub n: usize,
    pub double_points: Vec<MultiPoint>,
    pub disks: Vec<MultiDisk>,
    pub pi2: Vec<Pi2Class>,
    /// Per-sphere flag, index `k - 1` for sphere `k`.
    pub normal_bundle_trivial: Vec<bool>,
}

impl MultiDiagram {
    pub fn empty(spec: &Arc<GroupSpec>, n: usize) -> Self {
        MultiDiagram {
            spec: Arc::clone(spec),
            n,
            double_points: Vec::new(),
            disks: Vec::new(),
            pi2: Vec::new(),
            normal_bundle_trivial: vec![false; n],
        }
    }

    pub fn point(&self, id: &str) -> Result<&MultiPoint, Error> {
        self.double_points
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn validate(&self) -> crate::diagram::ValidationReport {
        let mut report = crate::diagram::ValidationReport::default();
        if self.n == 0 {
            report.violations.push("sphere count must be positive".into());
        }
        let mut seen: Vec<&str> = Vec::new();
        for p in &self.double_points {
            if seen.contains(&p.id.as_str()) {
                report.violations.push(format!("duplicate point id `{}`", p.id));
            }
            seen.push(&p.id);
            if p.spheres.0 > p.spheres.1 || p.spheres.0 < 1 || p.spheres.1 > self.n {
                report
                    .violations
                    .push(format!("point `{}` has bad sphere pair {:?}", p.id, p.spheres));
            }
            if p.sign != 1 && p.sign != -1 {
                report.violations.push(format!("point `{}` has sign {}", p.id, p.sign));
            }
        }
        let mut used: std::collections::BTreeMap<&str, usize> = Default::default();
        for w in &self.disks {
            if w.spheres.0 > w.spheres.1 || w.spheres.0 < 1 || w.spheres.1 > self.n {
                report
                    .violations
                    .push(format!("disk `{}` has bad sphere pair {:?}", w.id, w.spheres));
            }
            if w.framing != 0 {
                report
                    .violations
                    .push(format!("unframed disk `{}` (framing {})", w.id, w.framing));
            }
            match (self.point(&w.positive), self.point(&w.negative)) {
                (Ok(p), Ok(q)) => {
                    if p.sign + q.sign != 0 {
                        report.violations.push(format!(
                            "disk `{}` pairs points of equal sign",
                            w.id
                        ));
                    }
                    if p.spheres != w.spheres || q.spheres != w.spheres {
                        report.violations.push(format!(
                            "disk `{}` pairs points of another sphere pair",
                            w.id
                        ));
                    }
                }
                _ => report
                    .violations
                    .push(format!("disk `{}` references a missing point", w.id)),
            }
            *used.entry(w.positive.as_str()).or_default() += 1;
            *used.entry(w.negative.as_str()).or_default() += 1;
            for pt in &w.interior {
                if pt.sheet < 1 || pt.sheet > self.n {
                    report
                        .violations
                        .push(format!("disk `{}` interior sheet {} out of range", w.id, pt.sheet));
                }
                if pt.sign != 1 && pt.sign != -1 {
                    report
                        .violations
                        .push(format!("disk `{}` interior point has sign {}", w.id, pt.sign));
                }
            }
        }
        for p in &self.double_points {
            match used.get(p.id.as_str()).copied().unwrap_or(0) {
                1 => {}
                0 => report.violations.push(format!("unpaired point `{}`", p.id)),
                k => report
                    .violations
                    .push(format!("point `{}` belongs to {k} disks", p.id)),
            }
        }
        if self.normal_bundle_trivial.len() != self.n {
            report.violations.push(format!(
                "normal-bundle flags cover {} spheres, expected {}",
                self.normal_bundle_trivial.len(),
                self.n
            ));
        }
        for class in &self.pi2 {
            if let Err(e) = class.validate() {
                report.violations.push(e.to_string());
            }
        }
        report
    }

    /// The uncanonicalized component sum over all interior points.
    pub fn raw_tau(&self) -> Result<RingElement, Error> {
        let mut out = RingElement::zero(&self.spec);
        for disk in &self.disks {
            for pt in &disk.interior {
                let (term, sign) = route_interior_point(disk, pt);
                out.add_term(term, &BigInt::from(sign * pt.sign as i64));
            }
        }
        Ok(out)
    }

    /// The n-sphere invariant: the routed sum reduced by the component
    /// local relations and the enumerated tubing relation family.
    pub fn compute_tau_n(&self, horizon: Option<u64>) -> Result<QuotientElement, Error> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(Error::InvalidDiagram(report.to_string()));
        }
        let raw = self.raw_tau()?;
        let canon = Canonicalizer::new(CanonMode::Component);
        let horizon = horizon.unwrap_or_else(|| default_horizon(&raw, &self.pi2));
        let generators = build_relation_instances(
            &self.spec,
            &self.pi2,
            horizon,
            InstanceContext::NSphere { n: self.n },
            &canon,
        )?;
        lattice_reduce(&raw, &generators, &canon, horizon, all_lambda_zero(&self.pi2))
    }

    /// The triple invariant: the distinct-sphere component of the
    /// routed sum, reduced by the distinct-component relation family.
    /// Requires three spheres and no self-intersection data.
    pub fn compute_triple_lambda(&self, horizon: Option<u64>) -> Result<QuotientElement, Error> {
        if self.n != 3 {
            return Err(Error::InvalidDiagram(format!(
                "triple invariant needs 3 spheres, got {}",
                self.n
            )));
        }
        if self.double_points.iter().any(|p| p.spheres.0 == p.spheres.1) {
            return Err(Error::InvalidDiagram(
                "triple invariant requires no self-intersection data".into(),
            ));
        }
        let report = self.validate();
        if !report.is_valid() {
            return Err(Error::InvalidDiagram(report.to_string()));
        }
        let raw = distinct_component(&self.raw_tau()?);
        let canon = Canonicalizer::new(CanonMode::Component);
        let horizon = horizon.unwrap_or_else(|| default_horizon(&raw, &self.pi2));
        let generators = build_relation_instances(
            &self.spec,
            &self.pi2,
            horizon,
            InstanceContext::Triple,
            &canon,
        )?;
        lattice_reduce(&raw, &generators, &canon, horizon, all_lambda_zero(&self.pi2))
    }
}

/// Routes one interior intersection to its component term and routing
/// sign (excluding the point's own sign): the three (sphere, role)
/// sheets are sorted by sphere with positive < negative < interior, and
/// the sign is the parity of that sort.
pub fn route_interior_point(disk: &MultiDisk, pt: &MultiInteriorPoint) -> (BasisTerm, i64) {
    let mut sheets = [
        (disk.spheres.0, 0u8, disk.g_plus.clone()),
        (disk.spheres.1, 1u8, disk.g_minus.clone()),
        (pt.sheet, 2u8, pt.h.clone()),
    ];
    let mut sign = 1i64;
    // three-element bubble sort, counting transpositions
    for i in 0..2 {
        for j in 0..2 - i {
            if (sheets[j].0, sheets[j].1) > (sheets[j + 1].0, sheets[j + 1].1) {
                sheets.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    let spheres = [sheets[0].0, sheets[1].0, sheets[2].0];
    let words = [sheets[0].2.clone(), sheets[1].2.clone(), sheets[2].2.clone()];
    (BasisTerm::component(spheres, words), sign)
}

/// Restriction to terms whose three sphere indices are pairwise
/// distinct.
pub fn distinct_component(x: &RingElement) -> RingElement {
    let mut out = RingElement::zero(x.spec());
    for (term, coeff) in x.terms() {
        if let BasisTerm::Component { spheres, .. } = term {
            if spheres[0] != spheres[1] && spheres[1] != spheres[2] {
                out.add_term(term.clone(), coeff);
            }
        }
    }
    out
}

/// Changes the whisker of sphere `i` by `a`: every based element whose
/// defining loop starts on that sphere's sheet is left-multiplied.
pub fn translate_sphere(d: &MultiDiagram, i: usize, a: &Word) -> Result<MultiDiagram, Error> {
    if i < 1 || i > d.n {
        return Err(Error::UnknownId(format!("sphere {i}")));
    }
    let mut out = d.clone();
    for disk in &mut out.disks {
        if disk.spheres.0 == i {
            disk.g_plus = a.mul(&disk.g_plus)?;
        }
        if disk.spheres.1 == i {
            disk.g_minus = a.mul(&disk.g_minus)?;
        }
        for pt in &mut disk.interior {
            if pt.sheet == i {
                pt.h = a.mul(&pt.h)?;
            }
        }
    }
    Ok(out)
}

/// Relabels the spheres by `sigma` (1-based images; `sigma[k-1]` is the
/// new label of sphere `k`).  Disks whose sphere order flips under the
/// relabeling exchange their arcs: based elements swap and interior
/// signs flip.
pub fn permute_spheres(d: &MultiDiagram, sigma: &[usize]) -> Result<MultiDiagram, Error> {
    if sigma.len() != d.n {
        return Err(Error::ArityMismatch { expected: d.n, got: sigma.len() });
    }
    let mut hit = vec![false; d.n];
    for &v in sigma {
        if v < 1 || v > d.n || hit[v - 1] {
            return Err(Error::Parse(format!("not a permutation of 1..{}", d.n)));
        }
        hit[v - 1] = true;
    }
    let image = |k: usize| sigma[k - 1];
    let mut out = d.clone();
    for p in &mut out.double_points {
        let (a, b) = (image(p.spheres.0), image(p.spheres.1));
        p.spheres = (a.min(b), a.max(b));
    }
    for disk in &mut out.disks {
        let (a, b) = (image(disk.spheres.0), image(disk.spheres.1));
        if a > b {
            disk.spheres = (b, a);
            std::mem::swap(&mut disk.g_plus, &mut disk.g_minus);
            std::mem::swap(&mut disk.positive, &mut disk.negative);
            for pt in &mut disk.interior {
                pt.sign = -pt.sign;
            }
        } else {
            disk.spheres = (a, b);
        }
        for pt in &mut disk.interior {
            pt.sheet = image(pt.sheet);
        }
    }
    let mut flags = vec![false; d.n];
    for (k, &flag) in d.normal_bundle_trivial.iter().enumerate() {
        flags[image(k + 1) - 1] = flag;
    }
    out.normal_bundle_trivial = flags;
    for class in &mut out.pi2 {
        let mut lambda = vec![RingElement::zero(&d.spec); d.n];
        for (k, l) in class.lambda.iter().enumerate() {
            if k < d.n {
                lambda[image(k + 1) - 1] = l.clone();
            }
        }
        class.lambda = lambda;
    }
    Ok(out)
}

/// The coordinate action on distinct-component terms: permutes the
/// three words of every `(1,2,3)`-component term.  The signed variant
/// is the one selected by the parallel-copies identity.
pub fn permute_distinct_component(
    x: &RingElement,
    perm: &Perm3,
    signed: bool,
) -> Result<RingElement, Error> {
    let mut triple = RingElement::zero(x.spec());
    for (term, coeff) in x.terms() {
        let BasisTerm::Component { spheres: [1, 2, 3], words } = term else {
            return Err(Error::VariantMismatch {
                expected: "component (1,2,3)".into(),
                got: term.to_string(),
            });
        };
        triple.add_term(
            BasisTerm::triple(words[0].clone(), words[1].clone(), words[2].clone()),
            coeff,
        );
    }
    let permuted = triple.permute_triple(perm, signed)?;
    let mut out = RingElement::zero(x.spec());
    for (term, coeff) in permuted.terms() {
        let BasisTerm::Triple(a, b, c) = term else { unreachable!() };
        out.add_term(
            BasisTerm::component([1, 2, 3], [a.clone(), b.clone(), c.clone()]),
            coeff,
        );
    }
    Ok(out)
}

/// Lifts a single-sphere diagram into the one-sphere multi model.  Any
/// boundary crossings are resolved first; each disk becomes a based
/// disk with trivial positive element.
pub fn single_to_multi(d: &WhitneyDiagram) -> Result<MultiDiagram, Error> {
    let d = resolve_all_crossings(d)?;
    let mut out = MultiDiagram::empty(&d.spec, 1);
    out.pi2 = d.pi2.clone();
    for p in &d.double_points {
        out.double_points.push(MultiPoint { id: p.id.clone(), spheres: (1, 1), sign: p.sign });
    }
    let one = Word::identity(&d.spec);
    for w in &d.disks {
        out.disks.push(MultiDisk {
            id: w.id.clone(),
            spheres: (1, 1),
            positive: w.positive.clone(),
            negative: w.negative.clone(),
            g_plus: one.clone(),
            g_minus: w.g.clone(),
            framing: w.framing,
            interior: w
                .interior
                .iter()
                .map(|pt| MultiInteriorPoint { sign: pt.sign, sheet: 1, h: pt.h.clone() })
                .collect(),
        });
    }
    Ok(out)
}

/// Three parallel copies of one sphere with trivial normal bundle.
/// Each disk spawns one copy for every ordered pair of distinct copy
/// indices; each interior intersection lands on the remaining copy.
/// Copies of the self-intersections themselves are omitted: the output
/// carries exactly the distinct-sphere data of the triple invariant.
pub fn parallel_copies(
    d: &WhitneyDiagram,
    normal_bundle_trivial: bool,
) -> Result<MultiDiagram, Error> {
    if !normal_bundle_trivial {
        return Err(Error::MovePrecondition(
            "parallel copies require a trivial normal bundle".into(),
        ));
    }
    let d = resolve_all_crossings(d)?;
    let mut out = MultiDiagram::empty(&d.spec, 3);
    out.normal_bundle_trivial = vec![true; 3];
    for class in &d.pi2 {
        let mut copy = class.clone();
        let l = copy.lambda.first().cloned().unwrap_or_else(|| RingElement::zero(&d.spec));
        copy.lambda = vec![l.clone(), l.clone(), l];
        out.pi2.push(copy);
    }
    let one = Word::identity(&d.spec);
    for w in &d.disks {
        for i in 1..=3usize {
            for j in 1..=3usize {
                if i == j {
                    continue;
                }
                let k = 6 - i - j;
                let flip = i > j;
                let spheres = (i.min(j), i.max(j));
                let disk_id = format!("{}_{}{}", w.id, i, j);
                let pos_id = format!("{disk_id}+");
                let neg_id = format!("{disk_id}-");
                out.double_points.push(MultiPoint { id: pos_id.clone(), spheres, sign: 1 });
                out.double_points.push(MultiPoint { id: neg_id.clone(), spheres, sign: -1 });
                let (g_plus, g_minus) = if flip {
                    (w.g.clone(), one.clone())
                } else {
                    (one.clone(), w.g.clone())
                };
                out.disks.push(MultiDisk {
                    id: disk_id,
                    spheres,
                    positive: pos_id,
                    negative: neg_id,
                    g_plus,
                    g_minus,
                    framing: w.framing,
                    interior: w
                        .interior
                        .iter()
                        .map(|pt| MultiInteriorPoint {
                            sign: if flip { -pt.sign } else { pt.sign },
                            sheet: k,
                            h: pt.h.clone(),
                        })
                        .collect(),
                });
            }
        }
    }
    Ok(out)
}

// --- JSON manifests ---------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiPointManifest {
    pub id: String,
    pub spheres: [usize; 2],
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiInteriorManifest {
    pub sign: i8,
    pub sheet: usize,
    pub h: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiDiskManifest {
    pub id: String,
    pub spheres: [usize; 2],
    pub positive: String,
    pub negative: String,
    pub g_plus: String,
    pub g_minus: String,
    #[serde(default)]
    pub framing: i64,
    #[serde(default)]
    pub interior: Vec<MultiInteriorManifest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiManifest {
    pub group: GroupManifest,
    pub n: usize,
    #[serde(default)]
    pub double_points: Vec<MultiPointManifest>,
    #[serde(default)]
    pub disks: Vec<MultiDiskManifest>,
    #[serde(default)]
    pub pi2: Vec<Pi2Manifest>,
    #[serde(default)]
    pub normal_bundle_trivial: Vec<bool>,
}

impl MultiManifest {
    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serialization");
        out.push('\n');
        out
    }

    pub fn to_diagram(&self) -> Result<MultiDiagram, Error> {
        let spec = self.group.to_spec()?;
        let mut out = MultiDiagram::empty(&spec, self.n);
        out.normal_bundle_trivial = if self.normal_bundle_trivial.is_empty() {
            vec![false; self.n]
        } else {
            self.normal_bundle_trivial.clone()
        };
        for p in &self.double_points {
            out.double_points.push(MultiPoint {
                id: p.id.clone(),
                spheres: (p.spheres[0], p.spheres[1]),
                sign: p.sign,
            });
        }
        for w in &self.disks {
            out.disks.push(MultiDisk {
                id: w.id.clone(),
                spheres: (w.spheres[0], w.spheres[1]),
                positive: w.positive.clone(),
                negative: w.negative.clone(),
                g_plus: parse_word(&spec, &w.g_plus)?,
                g_minus: parse_word(&spec, &w.g_minus)?,
                framing: w.framing,
                interior: w
                    .interior
                    .iter()
                    .map(|pt| {
                        Ok(MultiInteriorPoint {
                            sign: pt.sign,
                            sheet: pt.sheet,
                            h: parse_word(&spec, &pt.h)?,
                        })
                    })
                    .collect::<Result<_, Error>>()?,
            });
        }
        out.pi2 = self
            .pi2
            .iter()
            .map(|m| crate::diagram::pi2_from_manifest(&spec, m))
            .collect::<Result<_, _>>()?;
        Ok(out)
    }

    pub fn from_diagram(d: &MultiDiagram) -> Self {
        MultiManifest {
            group: GroupManifest::from_spec(&d.spec),
            n: d.n,
            double_points: d
                .double_points
                .iter()
                .map(|p| MultiPointManifest {
                    id: p.id.clone(),
                    spheres: [p.spheres.0, p.spheres.1],
                    sign: p.sign,
                })
                .collect(),
            disks: d
                .disks
                .iter()
                .map(|w| MultiDiskManifest {
                    id: w.id.clone(),
                    spheres: [w.spheres.0, w.spheres.1],
                    positive: w.positive.clone(),
                    negative: w.negative.clone(),
                    g_plus: w.g_plus.to_string(),
                    g_minus: w.g_minus.to_string(),
                    framing: w.framing,
                    interior: w
                        .interior
                        .iter()
                        .map(|pt| MultiInteriorManifest {
                            sign: pt.sign,
                            sheet: pt.sheet,
                            h: pt.h.to_string(),
                        })
                        .collect(),
                })
                .collect(),
            pi2: d.pi2.iter().map(crate::diagram::pi2_to_manifest).collect(),
            normal_bundle_trivial: d.normal_bundle_trivial.clone(),
        }
    }
}

impl fmt::Display for MultiDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", MultiManifest::from_diagram(self).to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::example_family;
    use crate::ring::parse_element;

    fn free2() -> Arc<GroupSpec> {
        GroupSpec::free(&["a", "b"])
    }

    /// One cross disk between spheres 1 and 2 with a single sphere-3
    /// intersection.
    fn one_disk_triple(spec: &Arc<GroupSpec>, g_plus: &str, g_minus: &str, h: &str) -> MultiDiagram {
        let w = |s| parse_word(spec, s).unwrap();
        let mut d = MultiDiagram::empty(spec, 3);
        d.double_points = vec![
            MultiPoint { id: "q+".into(), spheres: (1, 2), sign: 1 },
            MultiPoint { id: "q-".into(), spheres: (1, 2), sign: -1 },
        ];
        d.disks = vec![MultiDisk {
            id: "W".into(),
            spheres: (1, 2),
            positive: "q+".into(),
            negative: "q-".into(),
            g_plus: w(g_plus),
            g_minus: w(g_minus),
            framing: 0,
            interior: vec![MultiInteriorPoint { sign: 1, sheet: 3, h: w(h) }],
        }];
        d
    }

    #[test]
    fn routing_matches_component_table() {
        let spec = free2();
        let w = |s: &str| parse_word(&spec, s).unwrap();
        let disk = |spheres, gp: &str, gm: &str| MultiDisk {
            id: "W".into(),
            spheres,
            positive: "x".into(),
            negative: "y".into(),
            g_plus: w(gp),
            g_minus: w(gm),
            framing: 0,
            interior: vec![],
        };
        let pt = |sheet, h: &str| MultiInteriorPoint { sign: 1, sheet, h: w(h) };
        // same-sphere disk, intersecting sphere of larger index
        let (term, sign) = route_interior_point(&disk((1, 1), "a", "b"), &pt(2, "a*b"));
        assert_eq!(sign, 1);
        assert_eq!(term, BasisTerm::component([1, 1, 2], [w("a"), w("b"), w("a*b")]));
        // mixed disk intersected by its own smaller sphere: odd sort
        let (term, sign) = route_interior_point(&disk((1, 2), "a", "b"), &pt(1, "a*b"));
        assert_eq!(sign, -1);
        assert_eq!(term, BasisTerm::component([1, 1, 2], [w("a"), w("a*b"), w("b")]));
        // mixed disk intersected by its own larger sphere
        let (term, sign) = route_interior_point(&disk((1, 2), "a", "b"), &pt(2, "a*b"));
        assert_eq!(sign, 1);
        assert_eq!(term, BasisTerm::component([1, 2, 2], [w("a"), w("b"), w("a*b")]));
        // same-sphere disk intersected by a smaller sphere: even rotation
        let (term, sign) = route_interior_point(&disk((2, 2), "a", "b"), &pt(1, "a*b"));
        assert_eq!(sign, 1);
        assert_eq!(term, BasisTerm::component([1, 2, 2], [w("a*b"), w("a"), w("b")]));
        // all distinct, middle sheet: odd sort
        let (term, sign) = route_interior_point(&disk((1, 3), "a", "b"), &pt(2, "a*b"));
        assert_eq!(sign, -1);
        assert_eq!(term, BasisTerm::component([1, 2, 3], [w("a"), w("a*b"), w("b")]));
        // all distinct, smallest sheet: even rotation
        let (term, sign) = route_interior_point(&disk((2, 3), "a", "b"), &pt(1, "a*b"));
        assert_eq!(sign, 1);
        assert_eq!(term, BasisTerm::component([1, 2, 3], [w("a*b"), w("a"), w("b")]));
    }

    #[test]
    fn one_point_triple_value() {
        let spec = free2();
        let d = one_disk_triple(&spec, "a", "b", "a*b");
        assert!(d.validate().is_valid());
        let q = d.compute_triple_lambda(None).unwrap();
        let w = |s| parse_word(&spec, s).unwrap();
        let expected = RingElement::from_term(
            BasisTerm::component([1, 2, 3], [w("a"), w("b"), w("a*b")]),
            1,
        );
        assert_eq!(q.canonical, expected);
        assert!(!q.certified_zero);
    }

    #[test]
    fn cancelling_pair_gives_zero_lambda() {
        let spec = free2();
        let mut d = one_disk_triple(&spec, "a", "b", "a*b");
        d.disks[0]
            .interior
            .push(MultiInteriorPoint { sign: -1, sheet: 3, h: parse_word(&spec, "a*b").unwrap() });
        let q = d.compute_triple_lambda(None).unwrap();
        assert!(q.certified_zero);
    }

    #[test]
    fn n1_matches_single_sphere() {
        for (l, m, n) in [(2, 4, 3), (1, 1, 1), (-2, 3, 5), (0, 0, 2)] {
            let single = example_family(l, m, n);
            let multi = single_to_multi(&single).unwrap();
            assert!(multi.validate().is_valid());
            let horizon = default_horizon(&single.raw_tau().unwrap(), &single.pi2);
            let qs = single.compute_tau(Some(horizon)).unwrap();
            let qm = multi.compute_tau_n(Some(horizon)).unwrap();
            let canon = Canonicalizer::new(CanonMode::PairFramed);
            let projected = canon.canonicalize(&qm.canonical.triple_to_pair().unwrap());
            assert_eq!(projected, qs.canonical, "(l,m,n)=({l},{m},{n})");
            assert_eq!(qm.certified_zero, qs.certified_zero);
        }
    }

    #[test]
    fn translate_sphere_is_linear_on_lambda() {
        let spec = free2();
        let d = one_disk_triple(&spec, "a", "b^-1", "b");
        let a = parse_word(&spec, "a*b").unwrap();
        let one = Word::identity(&spec);
        let before = d.compute_triple_lambda(None).unwrap().canonical;
        let after = translate_sphere(&d, 1, &a)
            .unwrap()
            .compute_triple_lambda(None)
            .unwrap()
            .canonical;
        // left translation by (a, 1, 1) on the distinct component
        let mut expected = RingElement::zero(&spec);
        for (term, coeff) in before.terms() {
            let BasisTerm::Component { words, .. } = term else { panic!() };
            let moved = [
                a.mul(&words[0]).unwrap(),
                one.mul(&words[1]).unwrap(),
                one.mul(&words[2]).unwrap(),
            ];
            expected.add_term(BasisTerm::component([1, 2, 3], moved), coeff);
        }
        assert_eq!(after, expected);
    }

    #[test]
    fn permute_spheres_identity_and_involution() {
        let spec = free2();
        let d = one_disk_triple(&spec, "a", "b", "1");
        let id = permute_spheres(&d, &[1, 2, 3]).unwrap();
        assert_eq!(id.raw_tau().unwrap(), d.raw_tau().unwrap());
        let swapped = permute_spheres(&d, &[2, 1, 3]).unwrap();
        let back = permute_spheres(&swapped, &[2, 1, 3]).unwrap();
        assert_eq!(back.raw_tau().unwrap(), d.raw_tau().unwrap());
        assert!(permute_spheres(&d, &[1, 1, 3]).is_err());
    }

    #[test]
    fn permute_spheres_is_signed_equivariant() {
        let spec = free2();
        let d = one_disk_triple(&spec, "a", "b", "a*b^-1");
        let sigmas: [([usize; 3], Perm3); 3] = [
            ([2, 1, 3], Perm3([1, 0, 2])),
            ([1, 3, 2], Perm3([0, 2, 1])),
            ([2, 3, 1], Perm3([1, 2, 0])),
        ];
        for (sigma, perm) in sigmas {
            let permuted = permute_spheres(&d, &sigma).unwrap();
            let lhs = permuted.compute_triple_lambda(None).unwrap().canonical;
            let rhs = permute_distinct_component(
                &d.compute_triple_lambda(None).unwrap().canonical,
                &perm,
                true,
            )
            .unwrap();
            assert_eq!(lhs, rhs, "sigma {sigma:?}");
        }
    }

    #[test]
    fn parallel_copies_realize_signed_symmetrization() {
        let spec = free2();
        let mut single = crate::diagram::WhitneyDiagram::empty(&spec);
        let w = |s| parse_word(&spec, s).unwrap();
        single.double_points = vec![
            crate::diagram::DoublePoint { id: "p+".into(), sign: 1, g: w("a") },
            crate::diagram::DoublePoint { id: "p-".into(), sign: -1, g: w("a") },
        ];
        single.disks = vec![crate::diagram::WhitneyDisk {
            id: "W".into(),
            positive: "p+".into(),
            negative: "p-".into(),
            g: w("a"),
            framing: 0,
            interior: vec![crate::diagram::InteriorPoint { sign: 1, h: w("b") }],
        }];
        let copies = parallel_copies(&single, true).unwrap();
        assert!(copies.validate().is_valid());
        let lambda = copies.compute_triple_lambda(None).unwrap().canonical;
        // signed symmetrization of the lifted contribution (1, a, b)
        let lift = parse_element(&spec, "(1,a,b)").unwrap();
        let mut expected = RingElement::zero(&spec);
        for perm in Perm3::all() {
            let image = lift.permute_triple(&perm, true).unwrap();
            for (term, coeff) in image.terms() {
                let BasisTerm::Triple(x, y, z) = term else { panic!() };
                expected.add_term(
                    BasisTerm::component([1, 2, 3], [x.clone(), y.clone(), z.clone()]),
                    coeff,
                );
            }
        }
        assert_eq!(lambda, expected);
        assert!(parallel_copies(&single, false).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let spec = free2();
        let d = one_disk_triple(&spec, "a", "b", "a*b");
        let m = MultiManifest::from_diagram(&d);
        let json = m.to_json();
        let parsed = MultiManifest::parse(&json).unwrap();
        assert_eq!(parsed, m);
        assert_eq!(parsed.to_json(), json);
        let d2 = parsed.to_diagram().unwrap();
        assert_eq!(d2.raw_tau().unwrap(), d.raw_tau().unwrap());
    }
}
