//! Straight rays from singular points through a cut presentation, alignments
//! between them, and the seam census of doubled bases.
//!
//! A ray travels along an eigen-direction of its origin's monodromy. Crossing
//! a cut transports the direction by that cut's linear map. On a doubled base
//! a ray reaching the seam continues on the other sheet, reflected in the seam
//! edge.
//!
//! ```
//! use syz::affine_base::{AffineBase, SingularPoint, Structure};
//! use syz::rational::Pt;
//! use syz::tropical::{rays_for_base, detect_alignments};
//! let square = vec![Pt::ints(0, 0), Pt::ints(4, 0), Pt::ints(4, 4), Pt::ints(0, 4)];
//! let pts = vec![
//!     SingularPoint::new(Pt::ints(1, 2), [1, 0], Pt::ints(0, 2)),
//!     SingularPoint::new(Pt::ints(3, 2), [1, 0], Pt::ints(4, 2)),
//! ];
//! let base = AffineBase::disc(Structure::Symplectic, square, pts, 0);
//! let rays = rays_for_base(&base, None).unwrap();
//! assert_eq!(detect_alignments(&rays).len(), 1);
//! ```

use num::{Signed, Zero};
use serde::Serialize;

use crate::affine_base::{edge_reflection, AffineBase, DoubledBase, Mat2, PointId, Sheet, Structure};
use crate::error::{Error, Result};
use crate::geom;
use crate::rational::{Pt, Q};

const MAX_STEPS: usize = 2_000;
/// Rays whose direction grows past this are cut off like an exhausted budget.
const MAX_ENTRY: i64 = 1 << 12;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentKind {
    LagrangianSphere,
    Minus2Curve,
}

impl AlignmentKind {
    pub fn of(s: Structure) -> Self {
        match s {
            Structure::Symplectic => AlignmentKind::LagrangianSphere,
            Structure::Complex => AlignmentKind::Minus2Curve,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TracePoint {
    pub sheet: Sheet,
    pub point: Pt,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CutCrossing {
    pub cut: PointId,
    pub at: Pt,
    pub map: Mat2,
    pub before: [i64; 2],
    pub after: [i64; 2],
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum RayEnd {
    Boundary {
        edge: usize,
        /// Lattice distance from the origin to the line of the edge reached.
        #[serde(serialize_with = "crate::rational::serde_q::serialize")]
        distance: Q,
    },
    Corner { vertex: usize },
    HeadOn { target: PointId },
    SeamCut { cut: PointId },
    Budget,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Ray {
    pub origin: PointId,
    pub sign: i8,
    pub direction: [i64; 2],
    pub structure: Structure,
    pub trace: Vec<TracePoint>,
    pub crossings: Vec<CutCrossing>,
    pub seam_crossings: usize,
    #[serde(serialize_with = "crate::rational::serde_q::serialize")]
    pub length: Q,
    pub end: RayEnd,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Alignment {
    pub ray_a: (PointId, i8),
    pub ray_b: (PointId, i8),
    pub segment: Vec<TracePoint>,
    pub kind: AlignmentKind,
    /// Fiber translations are not modelled; existence is not claimed.
    pub translation_caveat: bool,
}

#[derive(Clone, Copy)]
enum Surface<'a> {
    Disc(&'a AffineBase),
    Doubled(&'a DoubledBase),
}

impl<'a> Surface<'a> {
    fn chart(&self) -> &'a AffineBase {
        match self {
            Surface::Disc(b) => b,
            Surface::Doubled(d) => &d.half,
        }
    }

    fn ids(&self) -> Vec<PointId> {
        match self {
            Surface::Disc(b) => (0..b.singularities.len()).map(PointId::first).collect(),
            Surface::Doubled(d) => d.point_ids(),
        }
    }

    fn position(&self, id: PointId) -> Result<&'a Pt> {
        match (self, id.sheet) {
            (Surface::Disc(b), Sheet::First) => {
                b.singularities.get(id.index).map(|s| &s.position).ok_or_else(|| Error::NotFound(format!("point {id}")))
            }
            (Surface::Disc(_), _) => Err(Error::NotFound(format!("point {id} on an undoubled base"))),
            (Surface::Doubled(d), _) => Ok(&d.point(id)?.position),
        }
    }

    fn eigen(&self, id: PointId) -> Result<[i64; 2]> {
        match self {
            Surface::Disc(b) => {
                self.position(id)?;
                b.eigen_direction(id.index)
            }
            Surface::Doubled(d) => {
                let v = d.point(id)?.vanishing_cycle;
                Ok(if d.half.transposed { crate::affine_base::perp(v) } else { v })
            }
        }
    }

    fn seam_points(&self) -> Vec<PointId> {
        match self {
            Surface::Disc(_) => vec![],
            Surface::Doubled(d) => (0..d.seam_singularities.len()).map(|i| PointId { sheet: Sheet::Seam, index: i }).collect(),
        }
    }
}

pub fn default_budget(base: &AffineBase) -> Q {
    geom::sup_diameter(&base.polygon) * Q::from_integer(4.into())
}

pub fn trace_ray(base: &AffineBase, origin: usize, sign: i8, budget: Option<Q>) -> Result<Ray> {
    base.require_disc()?;
    trace(Surface::Disc(base), PointId::first(origin), sign, budget)
}

pub fn trace_ray_doubled(d: &DoubledBase, origin: PointId, sign: i8, budget: Option<Q>) -> Result<Ray> {
    d.half.require_disc()?;
    trace(Surface::Doubled(d), origin, sign, budget)
}

/// Both rays of every singular point.
pub fn rays_for_base(base: &AffineBase, budget: Option<Q>) -> Result<Vec<Ray>> {
    base.require_disc()?;
    all_rays(Surface::Disc(base), budget)
}

pub fn rays_for_doubled(d: &DoubledBase, budget: Option<Q>) -> Result<Vec<Ray>> {
    d.half.require_disc()?;
    all_rays(Surface::Doubled(d), budget)
}

fn all_rays(s: Surface, budget: Option<Q>) -> Result<Vec<Ray>> {
    let mut out = vec![];
    for id in s.ids() {
        for sign in [1, -1] {
            out.push(trace(s, id, sign, budget.clone())?);
        }
    }
    Ok(out)
}

fn edge_dir(poly: &[Pt], e: usize) -> [i64; 2] {
    poly[(e + 1) % poly.len()].sub(&poly[e]).primitive_direction().expect("nondegenerate edge")
}

fn on_boundary(poly: &[Pt], p: &Pt) -> bool {
    geom::boundary_key(poly, p).is_some()
}

enum Event {
    Hit(PointId),
    Cross(usize),
    CutEnd(usize),
    Exit(usize),
}

impl Event {
    fn rank(&self) -> u8 {
        match self {
            Event::Hit(_) => 0,
            Event::Cross(_) | Event::CutEnd(_) => 1,
            Event::Exit(_) => 2,
        }
    }
}

fn trace(s: Surface, origin: PointId, sign: i8, budget: Option<Q>) -> Result<Ray> {
    let chart = s.chart();
    let poly = &chart.polygon;
    let budget = budget.unwrap_or_else(|| default_budget(chart));
    if !budget.is_positive() {
        return Err(Error::Domain("ray length budget must be positive".into()));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Domain(format!("ray sign {sign} is not ±1")));
    }
    let start = s.position(origin)?.clone();
    let e0 = s.eigen(origin)?;
    let dir0 = [e0[0] * sign as i64, e0[1] * sign as i64];
    let mut d = dir0;
    let mut sheet = match origin.sheet {
        Sheet::Seam => Sheet::First,
        sh => sh,
    };
    if origin.sheet == Sheet::Seam {
        let (e, _) = geom::boundary_key(poly, &start).expect("validated seam point");
        let t = Pt::from_int_vec(edge_dir(poly, e));
        if t.cross(&Pt::from_int_vec(d)).is_negative() {
            sheet = Sheet::Second;
            d = edge_reflection(edge_dir(poly, e)).expect("validated").apply(d);
        }
    }
    let label = |sh: Sheet, p: &Pt| TracePoint { sheet: if on_boundary(poly, p) { Sheet::Seam } else { sh }, point: p.clone() };
    let mut p = start.clone();
    let mut trace = vec![label(sheet, &p)];
    let mut crossings = vec![];
    let mut seam_crossings = 0;
    let mut length = Q::zero();
    let n = chart.singularities.len();

    for _ in 0..MAX_STEPS {
        let dq = Pt::from_int_vec(d);
        let mut best: Option<(Q, Event)> = None;
        let offer = |t: Q, ev: Event, best: &mut Option<(Q, Event)>| {
            let better = match best {
                None => true,
                Some((bt, bev)) => t < *bt || (t == *bt && ev.rank() < bev.rank()),
            };
            if better {
                *best = Some((t, ev));
            }
        };
        if let Some((t, e)) = geom::exit_param(poly, &p, &dq) {
            offer(t, Event::Exit(e), &mut best);
        }
        let mut targets: Vec<PointId> = match s {
            Surface::Disc(_) => s.ids(),
            Surface::Doubled(_) => (0..n).map(|j| PointId { sheet, index: j }).collect(),
        };
        targets.extend(s.seam_points());
        for id in targets {
            let w = s.position(id)?.sub(&p);
            if dq.cross(&w).is_zero() {
                let t = w.dot(&dq) / dq.dot(&dq);
                if t.is_positive() {
                    offer(t, Event::Hit(id), &mut best);
                }
            }
        }
        for (j, c) in chart.singularities.iter().enumerate() {
            if let Some((t, u)) = geom::crossing_param(&p, &dq, &c.position, &c.cut_to) {
                if !t.is_positive() || !u.is_positive() || u > Q::from_integer(1.into()) {
                    continue;
                }
                if u < Q::from_integer(1.into()) {
                    offer(t, Event::Cross(j), &mut best);
                } else if on_boundary(poly, &p) && on_boundary(poly, &p.add(&dq.scale(&(&t / Q::from_integer(2.into()))))) {
                    // running along the seam into a cut end; from the interior this is an exit
                    offer(t, Event::CutEnd(j), &mut best);
                }
            }
        }
        let Some((t, ev)) = best else {
            return Err(Error::Geometry(format!("ray from {origin} leaves the chart at {p}")));
        };
        let remaining = &budget - &length;
        if t > remaining {
            p = p.add(&dq.scale(&remaining));
            length = budget.clone();
            trace.push(label(sheet, &p));
            return Ok(finish(s, origin, sign, dir0, trace, crossings, seam_crossings, length, RayEnd::Budget));
        }
        p = p.add(&dq.scale(&t));
        length += &t;
        trace.push(label(sheet, &p));
        let here = PointId { sheet, index: 0 };
        match ev {
            Event::Hit(target) => {
                return Ok(finish(s, origin, sign, dir0, trace, crossings, seam_crossings, length, RayEnd::HeadOn { target }));
            }
            Event::CutEnd(j) => {
                let cut = PointId { index: j, ..here };
                return Ok(finish(s, origin, sign, dir0, trace, crossings, seam_crossings, length, RayEnd::SeamCut { cut }));
            }
            Event::Cross(j) => {
                let c = &chart.singularities[j];
                let m = chart.monodromy_matrix(j)?;
                let ccw = c.cut_direction().cross(&dq).is_positive();
                let inv = m.inverse().expect("det 1");
                let map = if ccw != chart.transposed { inv } else { m };
                let Some(after) = map.checked_apply(d).filter(|v| v[0].abs().max(v[1].abs()) <= MAX_ENTRY) else {
                    return Ok(finish(s, origin, sign, dir0, trace, crossings, seam_crossings, length, RayEnd::Budget));
                };
                crossings.push(CutCrossing { cut: PointId { index: j, ..here }, at: p.clone(), map, before: d, after });
                d = after;
            }
            Event::Exit(edge) => {
                if let Some(v) = poly.iter().position(|x| *x == p) {
                    return Ok(finish(s, origin, sign, dir0, trace, crossings, seam_crossings, length, RayEnd::Corner { vertex: v }));
                }
                let Surface::Doubled(_) = s else {
                    let distance = Pt::from_int_vec(edge_dir(poly, edge)).cross(&start.sub(&poly[edge])).abs();
                    return Ok(finish(s, origin, sign, dir0, trace, crossings, seam_crossings, length, RayEnd::Boundary { edge, distance }));
                };
                for (j, c) in chart.singularities.iter().enumerate() {
                    if c.cut_to == p && !c.cut_direction().cross(&dq).is_zero() {
                        let cut = PointId { index: j, ..here };
                        return Ok(finish(s, origin, sign, dir0, trace, crossings, seam_crossings, length, RayEnd::SeamCut { cut }));
                    }
                }
                sheet = sheet.flip();
                d = edge_reflection(edge_dir(poly, edge)).expect("validated").apply(d);
                seam_crossings += 1;
            }
        }
    }
    Ok(finish(s, origin, sign, dir0, trace, crossings, seam_crossings, length, RayEnd::Budget))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    s: Surface,
    origin: PointId,
    sign: i8,
    direction: [i64; 2],
    trace: Vec<TracePoint>,
    crossings: Vec<CutCrossing>,
    seam_crossings: usize,
    length: Q,
    end: RayEnd,
) -> Ray {
    Ray { origin, sign, direction, structure: s.chart().structure, trace, crossings, seam_crossings, length, end }
}

/// Pairs of rays that hit each other's origins along the same trace, reversed.
pub fn detect_alignments(rays: &[Ray]) -> Vec<Alignment> {
    let mut out = vec![];
    for a in rays {
        let RayEnd::HeadOn { target } = a.end else { continue };
        if target == a.origin {
            continue;
        }
        for b in rays.iter().filter(|b| b.origin == target && b.end == RayEnd::HeadOn { target: a.origin }) {
            if (a.origin, a.sign) >= (b.origin, b.sign) {
                continue;
            }
            if a.trace.iter().rev().eq(b.trace.iter()) {
                out.push(Alignment {
                    ray_a: (a.origin, a.sign),
                    ray_b: (b.origin, b.sign),
                    segment: a.trace.clone(),
                    kind: AlignmentKind::of(a.structure),
                    translation_caveat: true,
                });
            }
        }
    }
    out.sort_by_key(|x| (x.ray_a, x.ray_b));
    out
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SeamCensus {
    pub structure: Structure,
    pub kind: AlignmentKind,
    pub singularities: usize,
    pub interior_singularities: usize,
    pub seam_singularities: usize,
    /// Seam points of multiplicity 2 that split into a pair.
    pub resolvable_seam_points: usize,
    pub symmetric_interior_pairs: usize,
    /// Alignments between an interior point and its mirror image.
    pub matched_mirror_pairs: usize,
    /// Alignments between the two seam points of a resolved pair.
    pub seam_alignments: usize,
    /// Other head-on alignments between seam points.
    pub chain_alignments: usize,
    pub alignments: Vec<Alignment>,
    pub rays: Vec<Ray>,
}

pub fn seam_census(d: &DoubledBase, budget: Option<Q>) -> Result<SeamCensus> {
    d.validate()?;
    let rays = rays_for_doubled(d, budget)?;
    let alignments = detect_alignments(&rays);
    let partner = |a: PointId, b: PointId| {
        a.sheet == Sheet::Seam
            && b.sheet == Sheet::Seam
            && d.seam_pairs.iter().any(|p| (p[0] == a.index && p[1] == b.index) || (p[1] == a.index && p[0] == b.index))
    };
    let (mut mirror, mut seam, mut chain) = (0, 0, 0);
    for al in &alignments {
        let (a, b) = (al.ray_a.0, al.ray_b.0);
        if a.sheet != Sheet::Seam && b == a.mirror() {
            mirror += 1;
        } else if partner(a, b) {
            seam += 1;
        } else if a.sheet == Sheet::Seam && b.sheet == Sheet::Seam {
            chain += 1;
        }
    }
    Ok(SeamCensus {
        structure: d.half.structure,
        kind: AlignmentKind::of(d.half.structure),
        singularities: d.singular_count(),
        interior_singularities: 2 * d.interior_count(),
        seam_singularities: d.seam_singularities.len(),
        resolvable_seam_points: d.seam_singularities.iter().filter(|s| s.multiplicity == 2).count(),
        symmetric_interior_pairs: d.interior_count(),
        matched_mirror_pairs: mirror,
        seam_alignments: seam,
        chain_alignments: chain,
        alignments,
        rays,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine_base::SingularPoint;
    use crate::rational::q;

    fn square() -> Vec<Pt> {
        vec![Pt::ints(0, 0), Pt::ints(4, 0), Pt::ints(4, 4), Pt::ints(0, 4)]
    }

    #[test]
    fn lone_point_ray_goes_straight_to_boundary() {
        let b = AffineBase::disc(Structure::Symplectic, square(), vec![SingularPoint::new(Pt::ints(1, 1), [1, 2], Pt::new(q(1, 2), Q::zero()))], 0);
        let r = trace_ray(&b, 0, 1, None).unwrap();
        assert_eq!(r.trace.last().unwrap().point, Pt::new(q(5, 2), crate::rational::qi(4)));
        assert!(r.crossings.is_empty());
        assert!(matches!(r.end, RayEnd::Boundary { edge: 2, .. }));
        assert!(detect_alignments(&rays_for_base(&b, None).unwrap()).is_empty());
    }

    #[test]
    fn crossing_applies_cut_map() {
        // ray from p0 heading up crosses the horizontal cut of p1
        let pts = vec![SingularPoint::new(Pt::ints(2, 1), [0, 1], Pt::ints(2, 0)), SingularPoint::new(Pt::ints(1, 2), [1, 0], Pt::ints(4, 2))];
        let b = AffineBase::disc(Structure::Symplectic, square(), pts, 0);
        b.validate().unwrap();
        let r = trace_ray(&b, 0, 1, None).unwrap();
        assert_eq!(r.crossings.len(), 1);
        let c = &r.crossings[0];
        assert_eq!(c.map.apply(c.before), c.after);
        assert_eq!(c.before, [0, 1]);
        assert_ne!(c.after, c.before);
    }

    #[test]
    fn zero_budget_is_a_domain_error() {
        let b = AffineBase::disc(Structure::Symplectic, square(), vec![SingularPoint::new(Pt::ints(1, 1), [1, 0], Pt::ints(0, 1))], 0);
        assert!(matches!(trace_ray(&b, 0, 1, Some(Q::zero())), Err(Error::Domain(_))));
        let r = trace_ray(&b, 0, 1, Some(q(1, 2))).unwrap();
        assert_eq!(r.end, RayEnd::Budget);
        assert_eq!(r.length, q(1, 2));
    }
}
