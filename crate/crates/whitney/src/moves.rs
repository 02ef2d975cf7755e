//! Diagram rewrites that preserve the secondary invariant.
//!
//! Each operation is a pure function from diagram to diagram.  The raw
//! contribution sum may change, but always by an element of the local
//! relations or the enumerated tubing relations, so the canonical
//! invariant is unchanged.  This makes the moves the principal
//! property-test surface of the crate.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::diagram::{
    ArcRef, ArcSide, BoundaryCrossing, DoublePoint, InteriorPoint, WhitneyDiagram, WhitneyDisk,
};
use crate::error::Error;
use crate::group::{parse_word, Word};
use crate::relations::{default_horizon, Pi2Kind};
use crate::ring::{BasisTerm, RingElement};

/// Which stored end of a crossing absorbs it when resolving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingEnd {
    A,
    B,
}

/// Reverses the roles of a disk's two arcs.  The disk element inverts,
/// interior contributions are rewritten by the sheet-change relation,
/// and every crossing end on the disk flips its arc together with the
/// orientation-agreement flag.
pub fn sheet_change(d: &WhitneyDiagram, disk_id: &str) -> Result<WhitneyDiagram, Error> {
    let mut out = d.clone();
    let g_old = out.disk(disk_id)?.g.clone();
    let g_inv = g_old.inverse();
    {
        let disk = out.disk_mut(disk_id)?;
        disk.g = g_inv.clone();
        std::mem::swap(&mut disk.positive, &mut disk.negative);
        for pt in &mut disk.interior {
            pt.sign = -pt.sign;
            pt.h = pt.h.mul(&g_inv)?;
        }
    }
    // reversing the arcs reverses the double-point loops of the pair
    let (pos, neg) = {
        let disk = out.disk(disk_id)?;
        (disk.positive.clone(), disk.negative.clone())
    };
    for p in &mut out.double_points {
        if p.id == pos || p.id == neg {
            p.g = p.g.inverse();
        }
    }
    for y in &mut out.crossings {
        for end in [&mut y.a, &mut y.b] {
            if end.disk == disk_id {
                end.arc = end.arc.flipped();
                y.agree = !y.agree;
            }
        }
    }
    Ok(out)
}

/// Twists a disk's boundary `n` times on the positive arc and `m` times
/// on the negative arc, restoring the framing with interior twists.
/// Each positive-arc twist creates an interior point with trivial
/// element; each negative-arc twist creates one carrying the disk
/// element.
pub fn reframe(
    d: &WhitneyDiagram,
    disk_id: &str,
    n: i64,
    m: i64,
    interior_twists: i64,
) -> Result<WhitneyDiagram, Error> {
    if n + m + 2 * interior_twists != 0 {
        return Err(Error::MovePrecondition(format!(
            "boundary twists {n}+{m} and interior twists {interior_twists} do not restore the framing"
        )));
    }
    let mut out = d.clone();
    let disk = out.disk_mut(disk_id)?;
    let g = disk.g.clone();
    let one = Word::identity(g.spec());
    for _ in 0..n.unsigned_abs() {
        disk.interior.push(InteriorPoint { sign: n.signum() as i8, h: one.clone() });
    }
    for _ in 0..m.unsigned_abs() {
        disk.interior.push(InteriorPoint { sign: m.signum() as i8, h: g.clone() });
    }
    Ok(out)
}

/// Changes a disk's homotopy class by tubing into one of the diagram's
/// available classes, adding the interior intersections that the new
/// representative has with the sphere.
pub fn tube_into_class(
    d: &WhitneyDiagram,
    disk_id: &str,
    class_name: &str,
) -> Result<WhitneyDiagram, Error> {
    let class = d.pi2_class(class_name)?.clone();
    let g = d.disk(disk_id)?.g.clone();
    if let Pi2Kind::Rp2 { element } = &class.kind {
        if &g != element {
            return Err(Error::MovePrecondition(format!(
                "projective-plane class `{class_name}` represents {element}, disk `{disk_id}` has element {g}"
            )));
        }
    }
    let mut out = d.clone();
    let spec = Arc::clone(&out.spec);
    let lambda = class.lambda_for(&spec, 1);
    let disk = out.disk_mut(disk_id)?;
    for (term, coeff) in lambda.terms() {
        let BasisTerm::Single(b) = term else {
            return Err(Error::VariantMismatch {
                expected: "single".into(),
                got: term.variant().to_string(),
            });
        };
        let sign = if coeff.is_negative() { -1 } else { 1 };
        let count: u64 = coeff.abs().try_into().map_err(|_| {
            Error::MovePrecondition("pairing coefficient too large to realize".into())
        })?;
        for _ in 0..count {
            disk.interior.push(InteriorPoint { sign, h: b.clone() });
        }
    }
    if class.omega2 % 2 == 1 {
        disk.interior.push(InteriorPoint { sign: 1, h: Word::identity(&spec) });
    }
    Ok(out)
}

/// The interior point replacing a crossing when it is pushed off the
/// chosen end's disk.  Returns the disk id and the point.
fn resolution_point(
    d: &WhitneyDiagram,
    y: &BoundaryCrossing,
    onto: CrossingEnd,
) -> Result<(String, InteriorPoint), Error> {
    let (chosen, other) = match onto {
        CrossingEnd::A => (&y.a, &y.b),
        CrossingEnd::B => (&y.b, &y.a),
    };
    let chosen_first = match onto {
        CrossingEnd::A => y.agree,
        CrossingEnd::B => !y.agree,
    };
    let g_chosen = d.disk(&chosen.disk)?.g.clone();
    let g_other = d.disk(&other.disk)?.g.clone();
    let e_chosen = chosen.arc.epsilon();
    let e_other = other.arc.epsilon();
    let sign = (if chosen_first { 1 } else { -1 }) * e_other;
    let mut h = if e_other == 1 { g_other } else { g_other.inverse() };
    if e_chosen == -1 {
        // the point lies on the negative arc's sheet; transport by the
        // sheet-change rewrite
        h = h.mul(&g_chosen)?;
    }
    Ok((chosen.disk.clone(), InteriorPoint { sign: sign as i8, h }))
}

/// Removes a boundary crossing by pushing one arc off the other's disk,
/// trading the crossing contribution for an equivalent interior one.
pub fn resolve_crossing(
    d: &WhitneyDiagram,
    index: usize,
    onto: CrossingEnd,
) -> Result<WhitneyDiagram, Error> {
    let y = d
        .crossings
        .get(index)
        .ok_or_else(|| Error::UnknownId(format!("crossing {index}")))?
        .clone();
    let (disk_id, point) = resolution_point(d, &y, onto)?;
    let mut out = d.clone();
    out.crossings.remove(index);
    out.disk_mut(&disk_id)?.interior.push(point);
    Ok(out)
}

/// Resolves every crossing onto its first-stored end.
pub fn resolve_all_crossings(d: &WhitneyDiagram) -> Result<WhitneyDiagram, Error> {
    let mut out = d.clone();
    while !out.crossings.is_empty() {
        out = resolve_crossing(&out, 0, CrossingEnd::A)?;
    }
    Ok(out)
}

/// Pushes a boundary arc of one disk across a double point paired by
/// another, creating one interior point and one boundary crossing whose
/// contributions cancel.
pub fn push_across_double_point(
    d: &WhitneyDiagram,
    disk_id: &str,
    target_id: &str,
    arc_on_disk: ArcSide,
    arc_on_target: ArcSide,
    agree: bool,
) -> Result<WhitneyDiagram, Error> {
    d.disk(disk_id)?;
    d.disk(target_id)?;
    let crossing = BoundaryCrossing {
        a: ArcRef { disk: disk_id.to_string(), arc: arc_on_disk },
        b: ArcRef { disk: target_id.to_string(), arc: arc_on_target },
        agree,
    };
    let (on_disk, point) = resolution_point(d, &crossing, CrossingEnd::A)?;
    let mut out = d.clone();
    out.disk_mut(&on_disk)?
        .interior
        .push(InteriorPoint { sign: -point.sign, h: point.h });
    out.crossings.push(crossing);
    Ok(out)
}

/// Introduces a cancelling pair of double points with element `a`,
/// paired by a clean Whitney disk.
pub fn finger_move(d: &WhitneyDiagram, a: &Word) -> Result<WhitneyDiagram, Error> {
    let mut out = d.clone();
    let pos = out.fresh_id("p");
    out.double_points.push(DoublePoint { id: pos.clone(), sign: 1, g: a.clone() });
    let neg = out.fresh_id("p");
    out.double_points.push(DoublePoint { id: neg.clone(), sign: -1, g: a.clone() });
    let disk = out.fresh_id("W");
    out.disks.push(WhitneyDisk {
        id: disk,
        positive: pos,
        negative: neg,
        g: a.clone(),
        framing: 0,
        interior: Vec::new(),
    });
    Ok(out)
}

/// Cancels a double-point pair along a clean disk.  Pushing the sheets
/// across each intersecting disk leaves a cancelling interior pair on
/// it, declared by the caller as `(other disk id, element)` transfers.
pub fn whitney_move(
    d: &WhitneyDiagram,
    disk_id: &str,
    transfers: &[(String, Word)],
) -> Result<WhitneyDiagram, Error> {
    let disk = d.disk(disk_id)?.clone();
    let touched = d
        .crossings
        .iter()
        .any(|y| y.a.disk == disk_id || y.b.disk == disk_id);
    if !disk.interior.is_empty() || touched {
        return Err(Error::MovePrecondition(format!(
            "disk `{disk_id}` is not clean"
        )));
    }
    let mut out = d.clone();
    out.disks.retain(|w| w.id != disk_id);
    out.double_points
        .retain(|p| p.id != disk.positive && p.id != disk.negative);
    for (other, h) in transfers {
        let w = out.disk_mut(other)?;
        w.interior.push(InteriorPoint { sign: 1, h: h.clone() });
        w.interior.push(InteriorPoint { sign: -1, h: h.clone() });
    }
    Ok(out)
}

/// Removes one matched pair of opposite-sign interior points with equal
/// element from a disk.
pub fn cancel_pair(d: &WhitneyDiagram, disk_id: &str, h: &Word) -> Result<WhitneyDiagram, Error> {
    let mut out = d.clone();
    let disk = out.disk_mut(disk_id)?;
    let find = |interior: &[InteriorPoint], sign: i8| {
        interior
            .iter()
            .position(|pt| pt.sign == sign && &pt.h == h)
    };
    let Some(i) = find(&disk.interior, 1) else {
        return Err(Error::MovePrecondition(format!(
            "no positive interior point with element {h} on disk `{disk_id}`"
        )));
    };
    disk.interior.remove(i);
    let Some(j) = find(&disk.interior, -1) else {
        return Err(Error::MovePrecondition(format!(
            "no negative interior point with element {h} on disk `{disk_id}`"
        )));
    };
    disk.interior.remove(j);
    Ok(out)
}

fn interior_sum(points: &[InteriorPoint], spec: &Arc<crate::group::GroupSpec>) -> RingElement {
    let mut out = RingElement::zero(spec);
    for pt in points {
        out.add_term(BasisTerm::single(pt.h.clone()), &BigInt::from(pt.sign));
    }
    out
}

/// When two disks share their group element, their intersection arcs
/// can be re-paired crosswise and the interiors redistributed, as long
/// as the combined signed contribution is unchanged.
pub fn repair_swap(
    d: &WhitneyDiagram,
    disk_i: &str,
    disk_j: &str,
    new_interior_i: Vec<InteriorPoint>,
    new_interior_j: Vec<InteriorPoint>,
) -> Result<WhitneyDiagram, Error> {
    let wi = d.disk(disk_i)?.clone();
    let wj = d.disk(disk_j)?.clone();
    if wi.g != wj.g {
        return Err(Error::MovePrecondition(format!(
            "disks `{disk_i}` and `{disk_j}` carry different group elements"
        )));
    }
    let spec = Arc::clone(&d.spec);
    let old = interior_sum(&wi.interior, &spec).combine(&interior_sum(&wj.interior, &spec), 1)?;
    let new =
        interior_sum(&new_interior_i, &spec).combine(&interior_sum(&new_interior_j, &spec), 1)?;
    if old != new {
        return Err(Error::MovePrecondition(
            "redistribution changes the combined signed contribution".into(),
        ));
    }
    let mut out = d.clone();
    {
        let w = out.disk_mut(disk_i)?;
        w.negative = wj.negative.clone();
        w.interior = new_interior_i;
    }
    {
        let w = out.disk_mut(disk_j)?;
        w.negative = wi.negative.clone();
        w.interior = new_interior_j;
    }
    Ok(out)
}

/// Moves an interior point from one disk to another sharing (through
/// the positive arc) or inverting (through the negative arc) its group
/// element.  A cancelling double-point pair and an auxiliary disk with
/// two cancelling interior points record the exchange.
pub fn trade_intersection(
    d: &WhitneyDiagram,
    source_id: &str,
    target_id: &str,
    sign: i8,
    h: &Word,
    through: ArcSide,
) -> Result<WhitneyDiagram, Error> {
    let g_s = d.disk(source_id)?.g.clone();
    let g_t = d.disk(target_id)?.g.clone();
    let expected = match through {
        ArcSide::Positive => g_s.clone(),
        ArcSide::Negative => g_s.inverse(),
    };
    if g_t != expected {
        return Err(Error::MovePrecondition(format!(
            "target disk element {g_t} does not match {expected} for the chosen arc"
        )));
    }
    let mut out = d.clone();
    {
        let src = out.disk_mut(source_id)?;
        let Some(k) = src.interior.iter().position(|pt| pt.sign == sign && &pt.h == h) else {
            return Err(Error::MovePrecondition(format!(
                "no interior point ({sign}, {h}) on disk `{source_id}`"
            )));
        };
        src.interior.remove(k);
    }
    let (moved, aux_h, aux_a) = match through {
        ArcSide::Positive => (
            InteriorPoint { sign, h: h.clone() },
            h.clone(),
            g_s.clone(),
        ),
        ArcSide::Negative => {
            let transported = h.mul(&g_s.inverse())?;
            (
                InteriorPoint { sign: -sign, h: transported.clone() },
                transported,
                g_s.inverse(),
            )
        }
    };
    out.disk_mut(target_id)?.interior.push(moved);
    let pos = out.fresh_id("p");
    out.double_points.push(DoublePoint { id: pos.clone(), sign: 1, g: aux_h.clone() });
    let neg = out.fresh_id("p");
    out.double_points.push(DoublePoint { id: neg.clone(), sign: -1, g: aux_h.clone() });
    let disk = out.fresh_id("W");
    out.disks.push(WhitneyDisk {
        id: disk,
        positive: pos,
        negative: neg,
        g: aux_h,
        framing: 0,
        interior: vec![
            InteriorPoint { sign: 1, h: aux_a.clone() },
            InteriorPoint { sign: -1, h: aux_a },
        ],
    });
    Ok(out)
}

// --- move scripts -----------------------------------------------------

/// One parsed script step.
#[derive(Debug, Clone, PartialEq)]
pub enum ScriptStep {
    SheetChange { disk: String },
    Reframe { disk: String, n: i64, m: i64, interior_twists: i64 },
    Tube { disk: String, class: String },
    Resolve { index: usize, onto: CrossingEnd },
    Push { disk: String, target: String, arc_on_disk: ArcSide, arc_on_target: ArcSide, agree: bool },
    Finger { element: String },
    Whitney { disk: String, transfers: Vec<(String, String)> },
    Cancel { disk: String, h: String },
    /// Wholesale interior swap between two equal-element disks.
    Repair { disk_i: String, disk_j: String },
    Trade { source: String, target: String, sign: i8, h: String, through: ArcSide },
}

fn parse_arc(token: &str) -> Result<ArcSide, Error> {
    match token {
        "positive" | "+" => Ok(ArcSide::Positive),
        "negative" | "-" => Ok(ArcSide::Negative),
        other => Err(Error::Parse(format!("expected arc side, got `{other}`"))),
    }
}

fn parse_int<T: std::str::FromStr>(token: &str) -> Result<T, Error> {
    token
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer `{token}`")))
}

/// Parses a newline-separated script of `move <name> <args>` commands.
/// Blank lines and `#` comments are ignored.
pub fn parse_script(text: &str) -> Result<Vec<ScriptStep>, Error> {
    let mut steps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let bad = |msg: &str| Error::Parse(format!("line {}: {msg}: `{line}`", lineno + 1));
        if tokens.next() != Some("move") {
            return Err(bad("scripts consist of `move <name> <args>` lines"));
        }
        let name = tokens.next().ok_or_else(|| bad("missing move name"))?;
        let rest: Vec<&str> = tokens.collect();
        let arg = |k: usize| -> Result<&str, Error> {
            rest.get(k).copied().ok_or_else(|| bad("missing argument"))
        };
        let step = match name {
            "sheet_change" => ScriptStep::SheetChange { disk: arg(0)?.into() },
            "reframe" => ScriptStep::Reframe {
                disk: arg(0)?.into(),
                n: parse_int(arg(1)?)?,
                m: parse_int(arg(2)?)?,
                interior_twists: parse_int(arg(3)?)?,
            },
            "tube" => ScriptStep::Tube { disk: arg(0)?.into(), class: arg(1)?.into() },
            "resolve" => ScriptStep::Resolve {
                index: parse_int(arg(0)?)?,
                onto: match arg(1)? {
                    "a" => CrossingEnd::A,
                    "b" => CrossingEnd::B,
                    other => return Err(bad(&format!("expected `a` or `b`, got `{other}`"))),
                },
            },
            "push" => ScriptStep::Push {
                disk: arg(0)?.into(),
                target: arg(1)?.into(),
                arc_on_disk: parse_arc(arg(2)?)?,
                arc_on_target: parse_arc(arg(3)?)?,
                agree: match arg(4)? {
                    "agree" => true,
                    "disagree" => false,
                    other => return Err(bad(&format!("expected agree|disagree, got `{other}`"))),
                },
            },
            "finger" => ScriptStep::Finger { element: arg(0)?.into() },
            "whitney" => ScriptStep::Whitney {
                disk: arg(0)?.into(),
                transfers: rest[1..]
                    .iter()
                    .map(|t| {
                        t.split_once(':')
                            .map(|(d, h)| (d.to_string(), h.to_string()))
                            .ok_or_else(|| bad("transfers are `disk:element` tokens"))
                    })
                    .collect::<Result<_, _>>()?,
            },
            "cancel" => ScriptStep::Cancel { disk: arg(0)?.into(), h: arg(1)?.into() },
            "repair" => ScriptStep::Repair { disk_i: arg(0)?.into(), disk_j: arg(1)?.into() },
            "trade" => ScriptStep::Trade {
                source: arg(0)?.into(),
                target: arg(1)?.into(),
                sign: match arg(2)? {
                    "+" => 1,
                    "-" => -1,
                    other => return Err(bad(&format!("expected point sign, got `{other}`"))),
                },
                h: arg(3)?.into(),
                through: parse_arc(arg(4)?)?,
            },
            other => return Err(bad(&format!("unknown move `{other}`"))),
        };
        steps.push(step);
    }
    Ok(steps)
}

/// Applies one parsed step.
pub fn apply_step(d: &WhitneyDiagram, step: &ScriptStep) -> Result<WhitneyDiagram, Error> {
    match step {
        ScriptStep::SheetChange { disk } => sheet_change(d, disk),
        ScriptStep::Reframe { disk, n, m, interior_twists } => {
            reframe(d, disk, *n, *m, *interior_twists)
        }
        ScriptStep::Tube { disk, class } => tube_into_class(d, disk, class),
        ScriptStep::Resolve { index, onto } => resolve_crossing(d, *index, *onto),
        ScriptStep::Push { disk, target, arc_on_disk, arc_on_target, agree } => {
            push_across_double_point(d, disk, target, *arc_on_disk, *arc_on_target, *agree)
        }
        ScriptStep::Finger { element } => finger_move(d, &parse_word(&d.spec, element)?),
        ScriptStep::Whitney { disk, transfers } => {
            let transfers = transfers
                .iter()
                .map(|(other, h)| Ok((other.clone(), parse_word(&d.spec, h)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            whitney_move(d, disk, &transfers)
        }
        ScriptStep::Cancel { disk, h } => cancel_pair(d, disk, &parse_word(&d.spec, h)?),
        ScriptStep::Repair { disk_i, disk_j } => {
            let ni = d.disk(disk_j)?.interior.clone();
            let nj = d.disk(disk_i)?.interior.clone();
            repair_swap(d, disk_i, disk_j, ni, nj)
        }
        ScriptStep::Trade { source, target, sign, h, through } => {
            trade_intersection(d, source, target, *sign, &parse_word(&d.spec, h)?, *through)
        }
    }
}

/// Whether two diagrams carry the same invariant: both are evaluated
/// at one common enumeration horizon and the difference of their
/// residues is tested for membership in the relation span (membership
/// is independent of the embedding basis, unlike the printed residue
/// representative).
pub fn tau_agrees(before: &WhitneyDiagram, after: &WhitneyDiagram) -> Result<bool, Error> {
    let horizon = default_horizon(&before.raw_tau()?, &before.pi2)
        .max(default_horizon(&after.raw_tau()?, &after.pi2));
    let qb = before.compute_tau(Some(horizon))?;
    let qa = after.compute_tau(Some(horizon))?;
    if qb.canonical == qa.canonical {
        return Ok(true);
    }
    let difference = qb.canonical.combine(&qa.canonical, -1)?;
    let q = crate::relations::reduce_in_quotient(
        &difference,
        &before.pi2,
        before.context(),
        Some(horizon),
    )?;
    Ok(q.certified_zero)
}

/// Runs a script, optionally checking after every step that the
/// canonical invariant is unchanged.
pub fn apply_script(
    d: &WhitneyDiagram,
    steps: &[ScriptStep],
    assert_invariance: bool,
) -> Result<WhitneyDiagram, Error> {
    let mut current = d.clone();
    for (k, step) in steps.iter().enumerate() {
        let next = apply_step(&current, step)?;
        if assert_invariance && !tau_agrees(&current, &next)? {
            return Err(Error::AssertionFailed(format!(
                "step {} ({step:?}) changed the invariant",
                k + 1
            )));
        }
        current = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::example_family;
    use crate::group::GroupSpec;
    use crate::ring::parse_element;

    fn assert_tau_invariant(before: &WhitneyDiagram, after: &WhitneyDiagram) {
        assert!(tau_agrees(before, after).unwrap(), "invariant changed");
    }

    #[test]
    fn sheet_change_is_involution_and_invariant() {
        let d = example_family(2, 4, 3);
        let once = sheet_change(&d, "W").unwrap();
        assert_eq!(
            once.raw_tau().unwrap(),
            parse_element(&d.spec, "-2*(t^-3,t)").unwrap()
        );
        assert_tau_invariant(&d, &once);
        let twice = sheet_change(&once, "W").unwrap();
        assert_eq!(twice.raw_tau().unwrap(), d.raw_tau().unwrap());
        assert_eq!(twice.disks[0], d.disks[0]);
    }

    #[test]
    fn reframe_changes_raw_by_torsion() {
        let d = example_family(1, 2, 1);
        let r = reframe(&d, "W", 1, 1, -1).unwrap();
        assert_tau_invariant(&d, &r);
        let r2 = reframe(&d, "W", 2, 0, -1).unwrap();
        assert_tau_invariant(&d, &r2);
        assert!(reframe(&d, "W", 1, 0, 0).is_err());
    }

    #[test]
    fn tube_into_trivial_class_is_raw_identity() {
        let d = example_family(2, 4, 3);
        let t = tube_into_class(&d, "W", "f").unwrap();
        assert_eq!(t.raw_tau().unwrap(), d.raw_tau().unwrap());
        assert!(tube_into_class(&d, "W", "missing").is_err());
    }

    #[test]
    fn tube_into_lambda_class_is_invariant() {
        use crate::relations::{Pi2Class, Pi2Kind};
        let mut d = example_family(1, 2, 1);
        d.pi2.push(Pi2Class {
            name: "A".into(),
            kind: Pi2Kind::Sphere,
            lambda: vec![parse_element(&d.spec, "t - 2*t^-1").unwrap()],
            omega2: 1,
        });
        let t = tube_into_class(&d, "W", "A").unwrap();
        assert_ne!(t.raw_tau().unwrap(), d.raw_tau().unwrap());
        assert_tau_invariant(&d, &t);
    }

    fn crossing_diagram() -> WhitneyDiagram {
        let spec = GroupSpec::free(&["a", "b"]);
        let w = |s| parse_word(&spec, s).unwrap();
        let mut d = WhitneyDiagram::empty(&spec);
        d = finger_move(&d, &w("a")).unwrap();
        d = finger_move(&d, &w("b^-1*a")).unwrap();
        let ids: Vec<String> = d.disks.iter().map(|x| x.id.clone()).collect();
        d.crossings.push(BoundaryCrossing {
            a: ArcRef { disk: ids[0].clone(), arc: ArcSide::Positive },
            b: ArcRef { disk: ids[1].clone(), arc: ArcSide::Negative },
            agree: false,
        });
        d
    }

    #[test]
    fn resolve_crossing_both_choices() {
        let d = crossing_diagram();
        for onto in [CrossingEnd::A, CrossingEnd::B] {
            let r = resolve_crossing(&d, 0, onto).unwrap();
            assert!(r.crossings.is_empty());
            assert_tau_invariant(&d, &r);
        }
        // resolving onto the basis-first end with a positive arc
        // reproduces the crossing contribution exactly
        let mut raw_exact = d.clone();
        raw_exact.crossings[0].agree = true;
        let r = resolve_crossing(&raw_exact, 0, CrossingEnd::A).unwrap();
        assert_eq!(r.raw_tau().unwrap(), raw_exact.raw_tau().unwrap());
    }

    #[test]
    fn push_across_double_point_all_cases() {
        let spec = GroupSpec::free(&["a", "b"]);
        let w = |s| parse_word(&spec, s).unwrap();
        let mut d = WhitneyDiagram::empty(&spec);
        d = finger_move(&d, &w("a*b")).unwrap();
        d = finger_move(&d, &w("b")).unwrap();
        let ids: Vec<String> = d.disks.iter().map(|x| x.id.clone()).collect();
        for arc_i in [ArcSide::Positive, ArcSide::Negative] {
            for arc_j in [ArcSide::Positive, ArcSide::Negative] {
                for agree in [true, false] {
                    let p =
                        push_across_double_point(&d, &ids[0], &ids[1], arc_i, arc_j, agree).unwrap();
                    assert_tau_invariant(&d, &p);
                    if arc_i == ArcSide::Positive && agree {
                        // in this case the cancellation is raw-exact
                        assert_eq!(p.raw_tau().unwrap(), d.raw_tau().unwrap());
                    }
                    let undone = resolve_crossing(&p, p.crossings.len() - 1, CrossingEnd::A).unwrap();
                    assert_tau_invariant(&d, &undone);
                }
            }
        }
    }

    #[test]
    fn finger_then_whitney_restores() {
        let d = example_family(1, 1, 2);
        let spec = Arc::clone(&d.spec);
        let f = finger_move(&d, &parse_word(&spec, "t^5").unwrap()).unwrap();
        assert!(f.validate().is_valid());
        assert!(f.mu().is_zero());
        assert_tau_invariant(&d, &f);
        let new_disk = f.disks.last().unwrap().id.clone();
        let undone = whitney_move(&f, &new_disk, &[]).unwrap();
        assert_eq!(undone.raw_tau().unwrap(), d.raw_tau().unwrap());
        assert_eq!(undone.double_points.len(), d.double_points.len());
    }

    #[test]
    fn whitney_transfer_and_cancel() {
        let d = example_family(1, 1, 2);
        let spec = Arc::clone(&d.spec);
        let h = parse_word(&spec, "t^3").unwrap();
        let f = finger_move(&d, &parse_word(&spec, "t").unwrap()).unwrap();
        let new_disk = f.disks.last().unwrap().id.clone();
        let moved = whitney_move(&f, &new_disk, &[("W".to_string(), h.clone())]).unwrap();
        assert_eq!(moved.raw_tau().unwrap(), d.raw_tau().unwrap());
        let cancelled = cancel_pair(&moved, "W", &h).unwrap();
        assert_eq!(cancelled.disks[0].interior, d.disks[0].interior);
        assert!(cancel_pair(&cancelled, "W", &h).is_err());
    }

    #[test]
    fn whitney_move_requires_clean_disk() {
        let d = example_family(1, 1, 2);
        assert!(matches!(
            whitney_move(&d, "W", &[]),
            Err(Error::MovePrecondition(_))
        ));
    }

    #[test]
    fn repair_swap_preserves_combined_sum() {
        let spec = GroupSpec::free(&["a", "b"]);
        let w = |s| parse_word(&spec, s).unwrap();
        let mut d = WhitneyDiagram::empty(&spec);
        d = finger_move(&d, &w("a")).unwrap();
        d = finger_move(&d, &w("a")).unwrap();
        let ids: Vec<String> = d.disks.iter().map(|x| x.id.clone()).collect();
        d.disk_mut(&ids[0]).unwrap().interior = vec![
            InteriorPoint { sign: 1, h: w("b") },
            InteriorPoint { sign: -1, h: w("a*b") },
        ];
        d.disk_mut(&ids[1]).unwrap().interior = vec![InteriorPoint { sign: 1, h: w("1") }];
        // redistribute with an extra cancelling element on each side
        let ni = vec![
            InteriorPoint { sign: 1, h: w("1") },
            InteriorPoint { sign: 1, h: w("b^2") },
        ];
        let nj = vec![
            InteriorPoint { sign: 1, h: w("b") },
            InteriorPoint { sign: -1, h: w("a*b") },
            InteriorPoint { sign: -1, h: w("b^2") },
        ];
        let r = repair_swap(&d, &ids[0], &ids[1], ni, nj).unwrap();
        assert!(r.validate().is_valid());
        assert_eq!(r.raw_tau().unwrap(), d.raw_tau().unwrap());
        assert_tau_invariant(&d, &r);
        // unbalanced redistribution is rejected
        assert!(repair_swap(&d, &ids[0], &ids[1], vec![], vec![]).is_err());
    }

    #[test]
    fn trade_through_both_arcs() {
        let spec = GroupSpec::free(&["a", "b"]);
        let w = |s| parse_word(&spec, s).unwrap();
        let mut d = WhitneyDiagram::empty(&spec);
        d = finger_move(&d, &w("a")).unwrap();
        d = finger_move(&d, &w("a")).unwrap();
        d = finger_move(&d, &w("a^-1")).unwrap();
        let ids: Vec<String> = d.disks.iter().map(|x| x.id.clone()).collect();
        d.disk_mut(&ids[0]).unwrap().interior = vec![InteriorPoint { sign: 1, h: w("b") }];

        let pos = trade_intersection(&d, &ids[0], &ids[1], 1, &w("b"), ArcSide::Positive).unwrap();
        assert_eq!(pos.raw_tau().unwrap(), d.raw_tau().unwrap());
        assert!(pos.validate().is_valid());

        let neg = trade_intersection(&d, &ids[0], &ids[2], 1, &w("b"), ArcSide::Negative).unwrap();
        assert!(neg.validate().is_valid());
        assert!(neg.mu().is_zero());
        assert_tau_invariant(&d, &neg);

        // arc/element mismatch rejected
        assert!(trade_intersection(&d, &ids[0], &ids[2], 1, &w("b"), ArcSide::Positive).is_err());
    }

    #[test]
    fn script_round_trip() {
        let text = "\
# comment
move sheet_change W

move reframe W 1 1 -1
move tube W f
move finger t^2
move trade W W3 + 1 positive
";
        let steps = parse_script(text).unwrap();
        assert_eq!(steps.len(), 5);
        let d = example_family(2, 4, 3);
        let out = apply_script(&d, &steps[..4], true).unwrap();
        assert!(tau_agrees(&d, &out).unwrap());
        assert!(parse_script("move bogus x").is_err());
        assert!(parse_script("sheet_change W").is_err());
    }
}
