//! Combinatorial single-sphere Whitney-disk diagrams: validation, the
//! primary self-intersection count, and the secondary invariant.
//!
//! A diagram records the double points of one immersed sphere, the
//! Whitney disks pairing them, intersections of the sphere with disk
//! interiors, crossings between disk boundary arcs, and the available
//! tubing classes.  No geometric data is kept: every ingredient of the
//! invariant is a sign or a group element.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::group::{parse_word, GroupClass, GroupSpec, Word};
use crate::relations::{
    reduce_in_quotient, InstanceContext, Pi2Class, Pi2Kind, QuotientElement,
};
use crate::ring::{BasisTerm, RingElement};

/// A transverse self-intersection point, with the loop element oriented
/// from the negative sheet to the positive sheet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoublePoint {
    pub id: String,
    pub sign: i8,
    pub g: Word,
}

/// An intersection of the sphere with a disk's interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteriorPoint {
    pub sign: i8,
    pub h: Word,
}

/// A framed disk pairing two opposite-sign double points.  The group
/// element `g` is the one attached to the disk's positive arc; the
/// stored value is authoritative (sheet changes rewrite it).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhitneyDisk {
    pub id: String,
    pub positive: String,
    pub negative: String,
    pub g: Word,
    /// Relative Euler number; must be zero for invariant evaluation
    /// unless the diagram is in unframed mode.
    pub framing: i64,
    pub interior: Vec<InteriorPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcSide {
    Positive,
    Negative,
}

impl ArcSide {
    pub fn epsilon(self) -> i64 {
        match self {
            ArcSide::Positive => 1,
            ArcSide::Negative => -1,
        }
    }

    pub fn flipped(self) -> ArcSide {
        match self {
            ArcSide::Positive => ArcSide::Negative,
            ArcSide::Negative => ArcSide::Positive,
        }
    }
}

/// One end of a boundary crossing: a disk and one of its two arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcRef {
    pub disk: String,
    pub arc: ArcSide,
}

/// A transverse crossing between two disk boundary arcs.  `agree` is
/// true iff the ordered basis (direction along arc a, direction along
/// arc b) agrees with the sphere's orientation at the crossing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCrossing {
    pub a: ArcRef,
    pub b: ArcRef,
    pub agree: bool,
}

/// A complete single-sphere diagram.
#[derive(Debug, Clone)]
pub struct WhitneyDiagram {
    pub spec: Arc<GroupSpec>,
    pub double_points: Vec<DoublePoint>,
    pub disks: Vec<WhitneyDisk>,
    pub crossings: Vec<BoundaryCrossing>,
    pub pi2: Vec<Pi2Class>,
    pub unframed: bool,
}

/// Outcome of structural validation; an empty list means valid.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")
        } else {
            write!(f, "{}", self.violations.join("\n"))
        }
    }
}

impl WhitneyDiagram {
    pub fn empty(spec: &Arc<GroupSpec>) -> Self {
        WhitneyDiagram {
            spec: Arc::clone(spec),
            double_points: Vec::new(),
            disks: Vec::new(),
            crossings: Vec::new(),
            pi2: Vec::new(),
            unframed: false,
        }
    }

    pub fn point(&self, id: &str) -> Result<&DoublePoint, Error> {
        self.double_points
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn disk(&self, id: &str) -> Result<&WhitneyDisk, Error> {
        self.disks
            .iter()
            .find(|w| w.id == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn disk_mut(&mut self, id: &str) -> Result<&mut WhitneyDisk, Error> {
        self.disks
            .iter_mut()
            .find(|w| w.id == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn pi2_class(&self, name: &str) -> Result<&Pi2Class, Error> {
        self.pi2
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownClass(name.to_string()))
    }

    /// An id of the form `prefix<k>` not used by any point or disk.
    pub fn fresh_id(&self, prefix: &str) -> String {
        let mut k = self.double_points.len() + self.disks.len();
        loop {
            let candidate = format!("{prefix}{k}");
            let taken = self.double_points.iter().any(|p| p.id == candidate)
                || self.disks.iter().any(|w| w.id == candidate);
            if !taken {
                return candidate;
            }
            k += 1;
        }
    }

    /// Structural checks: complete opposite-sign pairing of the double
    /// points by the disks, zero framings (outside unframed mode),
    /// order-two elements on projective-plane classes, and resolvable
    /// crossing references.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut seen_points: Vec<&str> = Vec::new();
        for p in &self.double_points {
            if seen_points.contains(&p.id.as_str()) {
                report.violations.push(format!("duplicate double point id `{}`", p.id));
            }
            seen_points.push(&p.id);
            if p.sign != 1 && p.sign != -1 {
                report.violations.push(format!("double point `{}` has sign {}", p.id, p.sign));
            }
        }
        let mut used: BTreeMap<&str, usize> = BTreeMap::new();
        let mut seen_disks: Vec<&str> = Vec::new();
        for w in &self.disks {
            if seen_disks.contains(&w.id.as_str()) {
                report.violations.push(format!("duplicate disk id `{}`", w.id));
            }
            seen_disks.push(&w.id);
            match (self.point(&w.positive), self.point(&w.negative)) {
                (Ok(p), Ok(q)) => {
                    if p.sign + q.sign != 0 {
                        report.violations.push(format!(
                            "disk `{}` pairs points `{}`, `{}` of equal sign",
                            w.id, w.positive, w.negative
                        ));
                    }
                }
                _ => report.violations.push(format!(
                    "disk `{}` references a missing double point",
                    w.id
                )),
            }
            *used.entry(w.positive.as_str()).or_default() += 1;
            *used.entry(w.negative.as_str()).or_default() += 1;
            if w.framing != 0 && !self.unframed {
                report
                    .violations
                    .push(format!("unframed disk `{}` (framing {})", w.id, w.framing));
            }
            for pt in &w.interior {
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
                0 => report.violations.push(format!("unpaired double point `{}`", p.id)),
                n => report
                    .violations
                    .push(format!("double point `{}` belongs to {n} disks", p.id)),
            }
        }
        for (k, y) in self.crossings.iter().enumerate() {
            for end in [&y.a, &y.b] {
                if self.disk(&end.disk).is_err() {
                    report
                        .violations
                        .push(format!("crossing {k} references missing disk `{}`", end.disk));
                }
            }
            if y.a == y.b {
                report.violations.push(format!("crossing {k} pairs an arc with itself"));
            }
        }
        for class in &self.pi2 {
            if let Err(e) = class.validate() {
                report.violations.push(e.to_string());
            }
        }
        report
    }

    /// Signed group-ring count of the double points, in the quotient
    /// identifying each element with its inverse and discarding the
    /// identity coefficient.  Must vanish before the secondary
    /// invariant is defined.
    pub fn mu(&self) -> RingElement {
        self_intersection_mu(&self.double_points)
    }

    /// The uncanonicalized sum of all disk and crossing contributions.
    pub fn raw_tau(&self) -> Result<RingElement, Error> {
        let mut total = RingElement::zero(&self.spec);
        for w in &self.disks {
            total = total.combine(&disk_contribution_i(w, self.unframed)?, 1)?;
        }
        for y in &self.crossings {
            total = total.combine(&crossing_contribution_j(y, &self.disks)?, 1)?;
        }
        Ok(total)
    }

    pub fn context(&self) -> InstanceContext {
        InstanceContext::SinglePair { unframed: self.unframed }
    }

    /// The secondary invariant: the raw sum reduced modulo the local
    /// relations and the enumerated tubing relations.
    pub fn compute_tau(&self, horizon: Option<u64>) -> Result<QuotientElement, Error> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(Error::InvalidDiagram(report.to_string()));
        }
        let mu = self.mu();
        if !mu.is_zero() {
            return Err(Error::MuNonzero(mu.to_string()));
        }
        let raw = self.raw_tau()?;
        reduce_in_quotient(&raw, &self.pi2, self.context(), horizon)
    }
}

/// `sum sign(p) * [g_p]` with `g` and `g^-1` merged onto the smaller of
/// the two and the identity class dropped.
pub fn self_intersection_mu(points: &[DoublePoint]) -> RingElement {
    let spec = match points.first() {
        Some(p) => Arc::clone(p.g.spec()),
        None => return RingElement::zero(&GroupSpec::free(&[])),
    };
    let mut out = RingElement::zero(&spec);
    for p in points {
        if p.g.is_identity() {
            continue;
        }
        let inv = p.g.inverse();
        let rep = if inv < p.g { inv } else { p.g.clone() };
        out.add_term(BasisTerm::single(rep), &BigInt::from(p.sign));
    }
    out
}

/// `I(W) = sum_x sign(x) * (g, h_x)` over the disk's interior points.
pub fn disk_contribution_i(w: &WhitneyDisk, unframed: bool) -> Result<RingElement, Error> {
    if w.framing != 0 && !unframed {
        return Err(Error::InvalidDiagram(format!(
            "disk `{}` has framing {}",
            w.id, w.framing
        )));
    }
    let mut out = RingElement::zero(w.g.spec());
    for pt in &w.interior {
        out.add_term(BasisTerm::pair(w.g.clone(), pt.h.clone()), &BigInt::from(pt.sign));
    }
    Ok(out)
}

/// `J(y) = e_1 e_2 * (g_1^{e_1}, g_2^{e_2})` in the arc order matching
/// the sphere's orientation: the stored order when `agree`, the swapped
/// order otherwise.
pub fn crossing_contribution_j(
    y: &BoundaryCrossing,
    disks: &[WhitneyDisk],
) -> Result<RingElement, Error> {
    let find = |id: &str| {
        disks
            .iter()
            .find(|w| w.id == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    };
    let (first, second) = if y.agree { (&y.a, &y.b) } else { (&y.b, &y.a) };
    let (d1, d2) = (find(&first.disk)?, find(&second.disk)?);
    let (e1, e2) = (first.arc.epsilon(), second.arc.epsilon());
    let signed = |g: &Word, e: i64| if e == 1 { g.clone() } else { g.inverse() };
    Ok(RingElement::from_term(
        BasisTerm::pair(signed(&d1.g, e1), signed(&d2.g, e2)),
        BigInt::from(e1 * e2),
    ))
}

/// The one-disk family over the infinite cyclic group: a cancelling
/// pair with element `t^n`, `|l|` interior points of sign `sgn(l)` with
/// element `t^m`, and one trivially-pairing tubing class.  Its raw
/// invariant is exactly `l * (t^n, t^m)`.
pub fn example_family(l: i64, m: i64, n: i64) -> WhitneyDiagram {
    let spec = GroupSpec::cyclic("t", 0);
    let tn = Word::generator(&spec, 0, n);
    let tm = Word::generator(&spec, 0, m);
    let sign = if l < 0 { -1 } else { 1 };
    let interior = (0..l.unsigned_abs())
        .map(|_| InteriorPoint { sign, h: tm.clone() })
        .collect();
    WhitneyDiagram {
        spec: Arc::clone(&spec),
        double_points: vec![
            DoublePoint { id: "p+".into(), sign: 1, g: tn.clone() },
            DoublePoint { id: "p-".into(), sign: -1, g: tn.clone() },
        ],
        disks: vec![WhitneyDisk {
            id: "W".into(),
            positive: "p+".into(),
            negative: "p-".into(),
            g: tn,
            framing: 0,
            interior,
        }],
        crossings: Vec::new(),
        pi2: vec![Pi2Class {
            name: "f".into(),
            kind: Pi2Kind::Sphere,
            lambda: vec![RingElement::zero(&spec)],
            omega2: 0,
        }],
        unframed: false,
    }
}

// --- JSON manifests ---------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupManifest {
    /// `free`, `free-abelian`, or `cyclic`.
    pub class: String,
    /// Cyclic modulus; 0 encodes the infinite cyclic group.
    #[serde(default, skip_serializing_if = "is_zero_u64")]
    pub modulus: u64,
    pub generators: Vec<String>,
}

fn is_zero_u64(v: &u64) -> bool {
    *v == 0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointManifest {
    pub id: String,
    pub sign: i8,
    pub g: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteriorManifest {
    pub sign: i8,
    pub h: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskManifest {
    pub id: String,
    pub positive: String,
    pub negative: String,
    pub g: String,
    #[serde(default)]
    pub framing: i64,
    #[serde(default)]
    pub interior: Vec<InteriorManifest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcRefManifest {
    pub disk: String,
    pub arc: ArcSide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingManifest {
    pub a: ArcRefManifest,
    pub b: ArcRefManifest,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pi2Manifest {
    pub name: String,
    /// `sphere` or `rp2`.
    pub kind: String,
    /// Required for `rp2` kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    /// One pairing-form expression per sphere index.
    #[serde(default)]
    pub lambda: Vec<String>,
    #[serde(default)]
    pub omega2: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramManifest {
    pub group: GroupManifest,
    #[serde(default)]
    pub double_points: Vec<PointManifest>,
    #[serde(default)]
    pub disks: Vec<DiskManifest>,
    #[serde(default)]
    pub crossings: Vec<CrossingManifest>,
    #[serde(default)]
    pub pi2: Vec<Pi2Manifest>,
    #[serde(default)]
    pub unframed: bool,
}

impl GroupManifest {
    pub fn to_spec(&self) -> Result<Arc<GroupSpec>, Error> {
        let class = match self.class.as_str() {
            "free" => GroupClass::Free,
            "free-abelian" => GroupClass::FreeAbelian,
            "cyclic" => GroupClass::Cyclic { modulus: self.modulus },
            other => return Err(Error::Manifest(format!("unknown group class `{other}`"))),
        };
        Ok(Arc::new(GroupSpec::new(class, self.generators.clone())?))
    }

    pub fn from_spec(spec: &GroupSpec) -> Self {
        let (class, modulus) = match spec.class() {
            GroupClass::Free => ("free", 0),
            GroupClass::FreeAbelian => ("free-abelian", 0),
            GroupClass::Cyclic { modulus } => ("cyclic", *modulus),
        };
        GroupManifest {
            class: class.to_string(),
            modulus,
            generators: spec.generators().to_vec(),
        }
    }
}

pub fn pi2_from_manifest(spec: &Arc<GroupSpec>, m: &Pi2Manifest) -> Result<Pi2Class, Error> {
    let kind = match m.kind.as_str() {
        "sphere" => Pi2Kind::Sphere,
        "rp2" => {
            let text = m
                .element
                .as_deref()
                .ok_or_else(|| Error::Manifest(format!("rp2 class `{}` needs `element`", m.name)))?;
            Pi2Kind::Rp2 { element: parse_word(spec, text)? }
        }
        other => return Err(Error::Manifest(format!("unknown pi2 kind `{other}`"))),
    };
    let lambda = m
        .lambda
        .iter()
        .map(|l| crate::ring::parse_element(spec, l))
        .collect::<Result<_, _>>()?;
    let class = Pi2Class { name: m.name.clone(), kind, lambda, omega2: m.omega2 % 2 };
    class.validate()?;
    Ok(class)
}

pub fn pi2_to_manifest(class: &Pi2Class) -> Pi2Manifest {
    let (kind, element) = match &class.kind {
        Pi2Kind::Sphere => ("sphere".to_string(), None),
        Pi2Kind::Rp2 { element } => ("rp2".to_string(), Some(element.to_string())),
    };
    Pi2Manifest {
        name: class.name.clone(),
        kind,
        element,
        lambda: class.lambda.iter().map(|l| l.to_string()).collect(),
        omega2: class.omega2,
    }
}

impl DiagramManifest {
    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serialization");
        out.push('\n');
        out
    }

    pub fn to_diagram(&self) -> Result<WhitneyDiagram, Error> {
        let spec = self.group.to_spec()?;
        let double_points = self
            .double_points
            .iter()
            .map(|p| {
                Ok(DoublePoint { id: p.id.clone(), sign: p.sign, g: parse_word(&spec, &p.g)? })
            })
            .collect::<Result<_, Error>>()?;
        let disks = self
            .disks
            .iter()
            .map(|w| {
                Ok(WhitneyDisk {
                    id: w.id.clone(),
                    positive: w.positive.clone(),
                    negative: w.negative.clone(),
                    g: parse_word(&spec, &w.g)?,
                    framing: w.framing,
                    interior: w
                        .interior
                        .iter()
                        .map(|pt| Ok(InteriorPoint { sign: pt.sign, h: parse_word(&spec, &pt.h)? }))
                        .collect::<Result<_, Error>>()?,
                })
            })
            .collect::<Result<_, Error>>()?;
        let crossings = self
            .crossings
            .iter()
            .map(|y| BoundaryCrossing {
                a: ArcRef { disk: y.a.disk.clone(), arc: y.a.arc },
                b: ArcRef { disk: y.b.disk.clone(), arc: y.b.arc },
                agree: y.agree,
            })
            .collect();
        let pi2 = self
            .pi2
            .iter()
            .map(|m| pi2_from_manifest(&spec, m))
            .collect::<Result<_, _>>()?;
        Ok(WhitneyDiagram { spec, double_points, disks, crossings, pi2, unframed: self.unframed })
    }

    pub fn from_diagram(d: &WhitneyDiagram) -> Self {
        DiagramManifest {
            group: GroupManifest::from_spec(&d.spec),
            double_points: d
                .double_points
                .iter()
                .map(|p| PointManifest { id: p.id.clone(), sign: p.sign, g: p.g.to_string() })
                .collect(),
            disks: d
                .disks
                .iter()
                .map(|w| DiskManifest {
                    id: w.id.clone(),
                    positive: w.positive.clone(),
                    negative: w.negative.clone(),
                    g: w.g.to_string(),
                    framing: w.framing,
                    interior: w
                        .interior
                        .iter()
                        .map(|pt| InteriorManifest { sign: pt.sign, h: pt.h.to_string() })
                        .collect(),
                })
                .collect(),
            crossings: d
                .crossings
                .iter()
                .map(|y| CrossingManifest {
                    a: ArcRefManifest { disk: y.a.disk.clone(), arc: y.a.arc },
                    b: ArcRefManifest { disk: y.b.disk.clone(), arc: y.b.arc },
                    agree: y.agree,
                })
                .collect(),
            pi2: d.pi2.iter().map(pi2_to_manifest).collect(),
            unframed: d.unframed,
        }
    }
}
