//! Exact planar predicates over rational points.

use num::{Signed, Zero};

use crate::rational::{Pt, Q};

pub fn orient(a: &Pt, b: &Pt, c: &Pt) -> Q {
    b.sub(a).cross(&c.sub(a))
}

pub fn on_segment(p: &Pt, a: &Pt, b: &Pt) -> bool {
    if !orient(a, b, p).is_zero() {
        return false;
    }
    let d = b.sub(a);
    let t = p.sub(a).dot(&d);
    !t.is_negative() && t <= d.dot(&d)
}

/// Closed segments share at least one point.
pub fn segments_meet(a: &Pt, b: &Pt, c: &Pt, d: &Pt) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1.is_zero() && on_segment(c, a, b)
        || o2.is_zero() && on_segment(d, a, b)
        || o3.is_zero() && on_segment(a, c, d)
        || o4.is_zero() && on_segment(b, c, d)
    {
        return true;
    }
    o1.signum() * o2.signum() < Q::zero() && o3.signum() * o4.signum() < Q::zero()
}

pub fn is_strictly_convex_ccw(poly: &[Pt]) -> bool {
    let n = poly.len();
    n >= 3 && (0..n).all(|i| orient(&poly[i], &poly[(i + 1) % n], &poly[(i + 2) % n]).is_positive())
}

pub fn strictly_inside(poly: &[Pt], p: &Pt) -> bool {
    let n = poly.len();
    (0..n).all(|i| orient(&poly[i], &poly[(i + 1) % n], p).is_positive())
}

pub fn inside_closed(poly: &[Pt], p: &Pt) -> bool {
    let n = poly.len();
    (0..n).all(|i| !orient(&poly[i], &poly[(i + 1) % n], p).is_negative())
}

/// Position on the boundary as (edge index, fraction along edge in [0,1)).
pub fn boundary_key(poly: &[Pt], p: &Pt) -> Option<(usize, Q)> {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        if on_segment(p, a, b) {
            let d = b.sub(a);
            let t = p.sub(a).dot(&d) / d.dot(&d);
            if t == Q::from_integer(1.into()) {
                return Some(((i + 1) % n, Q::zero()));
            }
            return Some((i, t));
        }
    }
    None
}

pub fn is_vertex(poly: &[Pt], p: &Pt) -> bool {
    poly.iter().any(|v| v == p)
}

/// First exit of the ray p + t d (t > 0) from a convex polygon containing p.
/// Returns the parameter and the edge whose line is reached.
pub fn exit_param(poly: &[Pt], p: &Pt, d: &Pt) -> Option<(Q, usize)> {
    let n = poly.len();
    let mut best: Option<(Q, usize)> = None;
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        let e = b.sub(a);
        // inward side has positive cross(e, x - a); moving outward means cross(e, d) < 0
        let rate = e.cross(d);
        if !rate.is_negative() {
            continue;
        }
        let t = e.cross(&p.sub(a)) / -rate;
        if t.is_positive() && best.as_ref().is_none_or(|(bt, _)| &t < bt) {
            best = Some((t, i));
        }
    }
    best
}

/// Parameter t > 0 with p + t d on the open segment (a, b), for transversal meetings.
pub fn crossing_param(p: &Pt, d: &Pt, a: &Pt, b: &Pt) -> Option<(Q, Q)> {
    let e = b.sub(a);
    let den = d.cross(&e);
    if den.is_zero() {
        return None;
    }
    let w = a.sub(p);
    let t = w.cross(&e) / &den;
    let u = w.cross(d) / &den;
    Some((t, u))
}

pub fn sup_diameter(poly: &[Pt]) -> Q {
    let mut best = Q::zero();
    for a in poly {
        for b in poly {
            let s = a.sub(b).sup_norm();
            if s > best {
                best = s;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> Vec<Pt> {
        vec![Pt::ints(0, 0), Pt::ints(3, 0), Pt::ints(0, 3)]
    }

    #[test]
    fn convexity_and_containment() {
        let t = tri();
        assert!(is_strictly_convex_ccw(&t));
        let mut cw = t.clone();
        cw.reverse();
        assert!(!is_strictly_convex_ccw(&cw));
        assert!(strictly_inside(&t, &Pt::ints(1, 1)));
        assert!(!strictly_inside(&t, &Pt::ints(0, 1)));
        assert!(inside_closed(&t, &Pt::ints(0, 1)));
    }

    #[test]
    fn boundary_keys_run_counterclockwise() {
        let t = tri();
        assert_eq!(boundary_key(&t, &Pt::ints(0, 0)), Some((0, Q::zero())));
        assert_eq!(boundary_key(&t, &Pt::ints(3, 0)), Some((1, Q::zero())));
        let (e, f) = boundary_key(&t, &Pt::ints(0, 1)).unwrap();
        assert_eq!(e, 2);
        assert_eq!(f, crate::rational::q(2, 3));
        assert_eq!(boundary_key(&t, &Pt::ints(1, 1)), None);
    }

    #[test]
    fn exit_from_interior() {
        let (t, e) = exit_param(&tri(), &Pt::ints(1, 1), &Pt::ints(0, -1)).unwrap();
        assert_eq!(t, crate::rational::qi(1));
        assert_eq!(e, 0);
    }

    #[test]
    fn segment_meeting() {
        let a = Pt::ints(0, 0);
        let b = Pt::ints(2, 2);
        assert!(segments_meet(&a, &b, &Pt::ints(0, 2), &Pt::ints(2, 0)));
        assert!(!segments_meet(&a, &b, &Pt::ints(3, 0), &Pt::ints(4, 0)));
        assert!(segments_meet(&a, &b, &Pt::ints(1, 1), &Pt::ints(5, 0)));
    }
}
