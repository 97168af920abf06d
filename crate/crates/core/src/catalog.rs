//! Built-in named examples.
//!
//! Cut layouts are one valid presentation each; other layouts differ by
//! moving cuts and are equally valid.

use serde::{Deserialize, Serialize};

use crate::affine_base::{double, double_with, AffineBase, BasePair, DoubledBase, Mat2, SingularPoint, Structure, Topology};
use crate::error::{Error, Result};
use crate::rational::{q, qi, Pt, Q};
use crate::superpotential::MomentPolytope;
use crate::wallcross::{blowup_scenario, WallScenario};

pub const NAMES: [&str; 9] =
    ["cp1", "elliptic", "toric-cp2", "cp2-cubic", "res-e1", "k3-double", "sextic-double", "odp-k3", "blowup-wall"];

/// Triangle size used by the two-dimensional examples.
pub const LAMBDA: i64 = 3;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    Toric { polytope: MomentPolytope, base: Option<AffineBase> },
    Pair(BasePair),
    Doubled(DoubledBase),
    DoubledPair(BasePair<DoubledBase>),
    Scenario(WallScenario),
}

impl Example {
    pub fn kind(&self) -> &'static str {
        match self {
            Example::Toric { .. } => "toric",
            Example::Pair(_) => "pair",
            Example::Doubled(_) => "doubled",
            Example::DoubledPair(_) => "doubled_pair",
            Example::Scenario(_) => "scenario",
        }
    }

    /// Runs the invariant checks of whatever the entry holds.
    pub fn validate(&self) -> Result<()> {
        match self {
            Example::Toric { polytope, base } => {
                polytope.validate()?;
                if let Some(b) = base {
                    b.validate()?;
                }
                Ok(())
            }
            Example::Pair(p) => {
                p.symplectic_base.validate()?;
                p.complex_base.validate()?;
                p.check_consistency()
            }
            Example::Doubled(d) => d.validate(),
            Example::DoubledPair(p) => {
                p.symplectic_base.validate()?;
                p.complex_base.validate()?;
                p.check_consistency()
            }
            Example::Scenario(s) => s.validate(),
        }
    }
}

pub fn load(name: &str) -> Result<Example> {
    let e = match name {
        "cp1" => Example::Toric { polytope: MomentPolytope::interval(qi(1)), base: Some(AffineBase::interval(qi(1), qi(1))) },
        "elliptic" => Example::Pair(elliptic(qi(2), qi(3))),
        "toric-cp2" => Example::Toric { polytope: MomentPolytope::triangle(qi(LAMBDA)), base: None },
        "cp2-cubic" => Example::Pair(cp2_cubic()),
        "res-e1" => Example::Pair(res_e1()),
        "k3-double" => {
            let p = res_e1();
            Example::DoubledPair(BasePair::new(double(&p.symplectic_base, vec![])?, double(&p.complex_base, vec![])?))
        }
        "sextic-double" => Example::Doubled(odp_k3()?.split_seam_points(&q(1, 20))?),
        "odp-k3" => Example::Doubled(odp_k3()?),
        "blowup-wall" => Example::Scenario(blowup_scenario(&qi(1))?),
        other => return Err(Error::NotFound(format!("no built-in example {other:?}; known: {}", NAMES.join(", ")))),
    };
    e.validate()?;
    Ok(e)
}

fn triangle() -> Vec<Pt> {
    vec![Pt::ints(0, 0), Pt::ints(LAMBDA, 0), Pt::ints(0, LAMBDA)]
}

fn pt(a: (i64, i64), b: (i64, i64)) -> Pt {
    Pt::new(q(a.0, a.1), q(b.0, b.1))
}

fn node(pos: Pt, v: [i64; 2], cut_to: Pt) -> SingularPoint {
    SingularPoint::new(pos, v, cut_to)
}

/// Flat circles of the given affine lengths, one per role.
pub fn elliptic(lambda: Q, gamma: Q) -> BasePair {
    let circle = |s: Structure| {
        let mut b = AffineBase::interval(lambda.clone(), gamma.clone());
        b.topology = Topology::Circle;
        b.structure = s;
        b
    };
    BasePair::new(circle(Structure::Symplectic), circle(Structure::Complex))
}

const C0: [i64; 2] = [1, 1];
const C1: [i64; 2] = [-2, 1];
const C2: [i64; 2] = [1, -2];

fn corner_nodes_symplectic() -> Vec<SingularPoint> {
    vec![
        node(pt((1, 4), (1, 4)), C0, Pt::ints(0, 0)),
        node(pt((5, 2), (1, 4)), C1, Pt::ints(3, 0)),
        node(pt((1, 4), (5, 2)), C2, Pt::ints(0, 3)),
    ]
}

fn corner_nodes_complex() -> Vec<SingularPoint> {
    vec![
        node(pt((1, 4), (1, 4)), C0, pt((1, 2), (0, 1))),
        node(pt((5, 2), (1, 4)), C1, pt((19, 8), (0, 1))),
        node(pt((1, 4), (5, 2)), C2, pt((0, 1), (19, 8))),
    ]
}

/// Cubic-curve complement in CP²: three nodes near the corners,
/// boundary of self-intersection 9.
pub fn cp2_cubic() -> BasePair {
    let s = AffineBase::disc(Structure::Symplectic, triangle(), corner_nodes_symplectic(), 9).with_frame(Mat2::SWAP);
    let c = AffineBase::disc(Structure::Complex, triangle(), corner_nodes_complex(), 9);
    BasePair::new(s, c)
}

/// Nine further nodes, three per edge, making the boundary monodromy trivial.
/// Index order in both charts: corners 0..3, then edges y = 0, slant, x = 0.
pub fn res_e1() -> BasePair {
    const Y: [i64; 2] = [1, 0];
    const S: [i64; 2] = [-1, 1];
    const X: [i64; 2] = [0, 1];
    let mut cplx = corner_nodes_complex();
    for k in [(1, 1), (3, 2), (2, 1)] {
        cplx.push(node(pt(k, (1, 4)), Y, pt(k, (0, 1))));
    }
    for (p, c) in [(((3, 2), (5, 4)), ((13, 8), (11, 8))), (((5, 4), (3, 2)), ((11, 8), (13, 8))), (((3, 4), (2, 1)), ((7, 8), (17, 8)))] {
        cplx.push(node(pt(p.0, p.1), S, pt(c.0, c.1)));
    }
    for k in [(1, 1), (3, 2), (2, 1)] {
        cplx.push(node(pt((1, 4), k), X, pt((0, 1), k)));
    }

    let mut sym = vec![
        node(pt((1, 20), (1, 20)), C0, pt((3, 2), (3, 2))),
        node(pt((1, 2), (2, 1)), C1, pt((0, 1), (9, 4))),
        node(pt((1, 10), (14, 5)), C2, Pt::ints(0, 3)),
    ];
    for (h, x_end) in [((1, 5), (14, 5)), ((1, 4), (11, 4)), ((1, 3), (8, 3))] {
        sym.push(node(pt((1, 1), h), Y, pt(x_end, h)));
    }
    for (x, x_end) in [((1, 2), (3, 5)), ((3, 5), (7, 10)), ((7, 10), (4, 5))] {
        sym.push(node(pt(x, (1, 10)), S, pt(x_end, (0, 1))));
    }
    for (x, y_end) in [((8, 5), (7, 5)), ((17, 10), (13, 10)), ((9, 5), (6, 5))] {
        sym.push(node(pt(x, (1, 1)), X, pt(x, y_end)));
    }
    BasePair::new(
        AffineBase::disc(Structure::Symplectic, triangle(), sym, 0),
        AffineBase::disc(Structure::Complex, triangle(), cplx, 0),
    )
}

/// Double of the cubic chart along the edge `x = 0` with nine
/// multiplicity-two seam points.
pub fn odp_k3() -> Result<DoubledBase> {
    let half = cp2_cubic().symplectic_base;
    let seam = (1..=9)
        .map(|k| {
            let p = Pt::new(Q::from_integer(0.into()), q(3 * k, 10));
            SingularPoint { position: p.clone(), vanishing_cycle: [0, 1], cut_to: p, multiplicity: 2 }
        })
        .collect();
    double_with(&half, seam, vec![], Mat2::new(-1, 0, 0, 1))
}
