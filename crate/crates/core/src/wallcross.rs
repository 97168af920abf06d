//! Walls, wall-crossing automorphisms and instanton-corrected gluing relations.
//!
//! ```
//! use syz::rational::qi;
//! use syz::wallcross::{corrected_gluing_double, corrected_gluing_single, involution_compatible};
//! assert!(involution_compatible(&corrected_gluing_double(&qi(1)).unwrap()));
//! assert!(!involution_compatible(&corrected_gluing_single(&qi(1)).unwrap()));
//! ```

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, serde_q, Pt, Q};
use crate::superpotential::{EnergyScalar, LaurentElement};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    Ray { origin: Pt, direction: Pt },
    Segment { from: Pt, to: Pt },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Wall {
    pub support: Support,
    pub normal: Vec<i64>,
    pub function: LaurentElement,
}

impl Wall {
    pub fn new(support: Support, normal: Vec<i64>, function: LaurentElement) -> Result<Self> {
        let w = Wall { support, normal, function };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.normal.len() != self.function.nvars() {
            return Err(Error::Domain("wall normal and function live in different lattices".into()));
        }
        if self.normal.iter().fold(0i64, |g, x| num::integer::gcd(g, *x)) != 1 {
            return Err(Error::Domain(format!("wall normal {:?} is not primitive", self.normal)));
        }
        if !self.function.constant_term().is_one() {
            return Err(Error::Domain("wall function must have constant term 1".into()));
        }
        match &self.support {
            Support::Ray { direction, .. } if direction.is_zero() => Err(Error::Domain("wall ray has zero direction".into())),
            Support::Segment { from, to } if from == to => Err(Error::Domain("wall segment is degenerate".into())),
            _ => Ok(()),
        }
    }

    /// `f - 1`
    fn correction(&self) -> LaurentElement {
        self.function.sub(&LaurentElement::one(self.function.nvars()))
    }

    /// Smallest energy of a non-constant term of `f`.
    pub fn min_energy(&self) -> Option<Q> {
        self.correction().terms().filter_map(|(_, s)| s.min_exponent().cloned()).min()
    }

    /// `10 · min ε`
    pub fn default_truncation(&self) -> Option<Q> {
        self.min_energy().map(|e| e * Q::from_integer(10.into()))
    }

    fn pairing(&self, m: &[i64]) -> Result<i64> {
        if m.len() != self.normal.len() {
            return Err(Error::Domain("exponent vector has the wrong rank".into()));
        }
        Ok(m.iter().zip(&self.normal).map(|(a, b)| a * b).sum())
    }

    /// `f^{-1}` modulo `q^order`.
    pub fn inverse_function(&self, order: &Q) -> Result<LaurentElement> {
        let g = self.correction();
        if g.terms().any(|(_, s)| s.min_exponent().is_some_and(|a| !a.is_positive())) {
            return Err(Error::Domain("wall function is not invertible by energy truncation".into()));
        }
        let n = g.nvars();
        let minus_g = g.neg();
        let mut out = LaurentElement::one(n);
        let mut power = LaurentElement::one(n);
        loop {
            power = power.mul(&minus_g).truncate(order);
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        Ok(out)
    }
}

/// `z^m ↦ z^m f^{⟨m,n₀⟩}`. Negative pairings need a truncation order.
pub fn cross_wall(w: &Wall, m: &[i64], truncation: Option<&Q>) -> Result<LaurentElement> {
    cross_monomial(w, m, 1, truncation)
}

fn cross_monomial(w: &Wall, m: &[i64], sign: i64, truncation: Option<&Q>) -> Result<LaurentElement> {
    let k = sign * w.pairing(m)?;
    let base = LaurentElement::monomial(m.to_vec(), EnergyScalar::one());
    let out = if k >= 0 {
        base.mul(&w.function.pow(k as u32))
    } else {
        let n = truncation.ok_or_else(|| {
            Error::TruncationRequired(format!("pairing {k} needs f^-1; supply an energy order"))
        })?;
        base.mul(&w.inverse_function(n)?.pow((-k) as u32))
    };
    Ok(match truncation {
        Some(n) => out.truncate(n),
        None => out,
    })
}

/// Multiplicative extension to Laurent elements; `sign = -1` applies the inverse automorphism.
pub fn cross_wall_element(w: &Wall, e: &LaurentElement, sign: i64, truncation: Option<&Q>) -> Result<LaurentElement> {
    let mut out = LaurentElement::zero(e.nvars());
    for (m, s) in e.terms() {
        out = out.add(&cross_monomial(w, m, sign, truncation)?.scale(s));
    }
    Ok(match truncation {
        Some(n) => out.truncate(n),
        None => out,
    })
}

/// `left[0]·left[1] = right`, the right side a Laurent element in one variable `z`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GluingRelation {
    pub left: Vec<String>,
    pub right: LaurentElement,
}

impl GluingRelation {
    pub fn validate(&self) -> Result<()> {
        if !self.right.constant_term().is_one() {
            return Err(Error::Domain("gluing right side must have constant term 1".into()));
        }
        Ok(())
    }
}

impl std::fmt::Display for GluingRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = {}", self.left.join(" "), self.right)
    }
}

fn check_eps(eps: &Q) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::Domain(format!("ε = {} must be positive", format_q(eps))));
    }
    Ok(())
}

fn uv() -> Vec<String> {
    vec!["u".into(), "v".into()]
}

/// `1 + q^ε z^{-1}`
pub fn exceptional_factor(eps: &Q, sign: i64) -> LaurentElement {
    LaurentElement::one(1).add(&LaurentElement::q_monomial(vec![sign], eps.clone()))
}

pub fn naive_gluing() -> GluingRelation {
    GluingRelation { left: uv(), right: LaurentElement::one(1) }
}

pub fn corrected_gluing_single(eps: &Q) -> Result<GluingRelation> {
    check_eps(eps)?;
    Ok(GluingRelation { left: uv(), right: exceptional_factor(eps, -1) })
}

pub fn corrected_gluing_double(eps: &Q) -> Result<GluingRelation> {
    check_eps(eps)?;
    Ok(GluingRelation { left: uv(), right: exceptional_factor(eps, -1).mul(&exceptional_factor(eps, 1)) })
}

pub fn involution_compatible(r: &GluingRelation) -> bool {
    r.right.invert_variables() == r.right
}

/// In `Q[v^±, z^±]`: `u := v^{-1}(1 + q^ε z^{-1})`, then `u·v` against the single relation.
pub fn substitution_reproduces_single(eps: &Q) -> Result<bool> {
    let rel = corrected_gluing_single(eps)?;
    let v = LaurentElement::var(0, 2);
    let v_inv = LaurentElement::monomial(vec![-1, 0], EnergyScalar::one());
    let u = v_inv.mul(&embed_z(&exceptional_factor(eps, -1)));
    Ok(u.mul(&v) == embed_z(&rel.right))
}

/// `z`-polynomial into the `(v, z)` ring.
fn embed_z(e: &LaurentElement) -> LaurentElement {
    e.map_exponents(&[vec![0], vec![1]])
}

/// Drop the terms divisible by `q^ε z` in the monoid generated by
/// `q^ε z`, `q^ε z^{-1}` and nonnegative powers of `q`.
pub fn reduce_mod_second_disc(e: &LaurentElement, eps: &Q) -> LaurentElement {
    assert_eq!(e.nvars(), 1);
    LaurentElement::from_terms(
        1,
        e.terms().map(|(m, s)| {
            let k = m[0];
            let need = eps * Q::from_integer((2 * k.max(1) - k).into());
            let kept: Vec<(Q, Q)> = s.terms().iter().filter(|(_, a)| a < &need).cloned().collect();
            (m.clone(), EnergyScalar::from_terms(kept))
        }),
    )
}

pub fn double_specializes_to_single(eps: &Q) -> Result<bool> {
    let d = corrected_gluing_double(eps)?;
    let s = corrected_gluing_single(eps)?;
    Ok(reduce_mod_second_disc(&d.right, eps) == s.right)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PathStep {
    pub wall: usize,
    /// +1 forward, -1 backward, 0 tangential
    pub sign: i64,
    /// Exponent map into the next chamber's variables, rows = new variables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rename: Option<Vec<Vec<i64>>>,
}

pub fn continue_superpotential(
    w: &LaurentElement,
    walls: &[Wall],
    path: &[PathStep],
    truncation: Option<&Q>,
) -> Result<LaurentElement> {
    let mut cur = w.clone();
    for (i, step) in path.iter().enumerate() {
        let wall = walls.get(step.wall).ok_or_else(|| Error::Path(format!("step {i} names missing wall {}", step.wall)))?;
        if step.sign == 0 {
            return Err(Error::Path(format!("step {i} crosses wall {} tangentially", step.wall)));
        }
        if step.sign.abs() != 1 {
            return Err(Error::Path(format!("step {i} has sign {}", step.sign)));
        }
        cur = cross_wall_element(wall, &cur, step.sign, truncation)?;
        if let Some(a) = &step.rename {
            cur = cur.map_exponents(a);
        }
    }
    Ok(cur)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Chamber {
    pub name: String,
    pub variables: Vec<String>,
    pub label_at: Pt,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Continuation {
    pub superpotential: LaurentElement,
    pub path: Vec<PathStep>,
}

/// Walls, chambers and gluings in one chart, with enough geometry to draw them.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WallScenario {
    #[serde(with = "serde_q")]
    pub epsilon: Q,
    /// Drawing region, counterclockwise, first edge on the boundary of the base.
    pub region: Vec<Pt>,
    pub singular_points: Vec<Pt>,
    pub cuts: Vec<[Pt; 2]>,
    pub walls: Vec<Wall>,
    pub chambers: Vec<Chamber>,
    pub relations: Vec<GluingRelation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuation: Option<Continuation>,
}

impl WallScenario {
    pub fn validate(&self) -> Result<()> {
        for w in &self.walls {
            w.validate()?;
        }
        for r in &self.relations {
            r.validate()?;
        }
        if let Some(c) = &self.continuation {
            for s in &c.path {
                if s.wall >= self.walls.len() {
                    return Err(Error::Path(format!("path names missing wall {}", s.wall)));
                }
            }
        }
        Ok(())
    }

    pub fn truncation(&self, supplied: Option<&Q>) -> Option<Q> {
        supplied.cloned().or_else(|| self.walls.iter().filter_map(|w| w.default_truncation()).min())
    }

    /// One identity per entry, each exact.
    pub fn verify(&self, truncation: Option<&Q>) -> Result<Vec<Identity>> {
        let eps = &self.epsilon;
        let order = self.truncation(truncation);
        let mut out = vec![
            Identity::new("substitution u = v^-1 (1 + q^eps z^-1) gives u v = 1 + q^eps z^-1", true, substitution_reproduces_single(eps)?),
            Identity::new("single gluing compatible with z -> z^-1", false, involution_compatible(&corrected_gluing_single(eps)?)),
            Identity::new("double gluing compatible with z -> z^-1", true, involution_compatible(&corrected_gluing_double(eps)?)),
            Identity::new("double gluing modulo q^eps z is the single gluing", true, double_specializes_to_single(eps)?),
        ];
        let z1 = LaurentElement::one(1);
        let expected_double = z1
            .add(&LaurentElement::q_monomial(vec![1], eps.clone()))
            .add(&LaurentElement::q_monomial(vec![-1], eps.clone()))
            .add(&LaurentElement::scalar(1, EnergyScalar::q_pow(eps * Q::from_integer(2.into()))));
        out.push(Identity::new("double gluing expands to 1 + q^eps z + q^eps z^-1 + q^2eps", true, corrected_gluing_double(eps)?.right == expected_double));
        for (i, r) in self.relations.iter().enumerate() {
            out.push(Identity::new(&format!("relation {i} has unit constant term"), true, r.validate().is_ok()));
        }
        if let (Some(c), Some(n)) = (&self.continuation, order.as_ref()) {
            let there = continue_superpotential(&c.superpotential, &self.walls, &c.path, Some(n))?;
            let back: Vec<PathStep> = c.path.iter().rev().map(|s| PathStep { wall: s.wall, sign: -s.sign, rename: s.rename.as_ref().map(|a| inverse_rename(a)) }).collect();
            // renames are undone before the inverse crossing
            let mut cur = there.clone();
            for (orig, step) in c.path.iter().rev().zip(&back) {
                if let Some(a) = &step.rename {
                    cur = cur.map_exponents(a);
                }
                cur = cross_wall_element(&self.walls[orig.wall], &cur, step.sign, Some(n))?;
            }
            out.push(Identity::new("crossing forward then back returns the superpotential", true, cur == c.superpotential.truncate(n)));
        }
        Ok(out)
    }
}

/// Inverse of a unimodular exponent map (2x2 or diagonal ±1 maps).
fn inverse_rename(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if a.len() == 2 && a[0].len() == 2 {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        return vec![vec![a[1][1] * det, -a[0][1] * det], vec![-a[1][0] * det, a[0][0] * det]];
    }
    // diagonal ±1
    (0..a.len()).map(|i| (0..a.len()).map(|j| if i == j { a[i][i] } else { 0 }).collect()).collect()
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Identity {
    pub name: String,
    pub expected: bool,
    pub observed: bool,
    pub pass: bool,
}

impl Identity {
    fn new(name: &str, expected: bool, observed: bool) -> Self {
        Identity { name: name.into(), expected, observed, pass: expected == observed }
    }
}

/// Half-plane chart of the blow-up: node at height ε, cut upward, wall down to the boundary.
pub fn blowup_scenario(eps: &Q) -> Result<WallScenario> {
    check_eps(eps)?;
    let h = |k: i64| Q::from_integer(k.into());
    let top = eps * h(2);
    let node = Pt::new(Q::zero(), eps.clone());
    let wall_fn = LaurentElement::one(2).add(&LaurentElement::q_monomial(vec![0, -1], eps.clone()));
    let walls = vec![
        Wall::new(Support::Segment { from: Pt::zero(), to: node.clone() }, vec![1, 0], wall_fn.clone())?,
        Wall::new(Support::Ray { origin: node.clone(), direction: Pt::ints(0, 1) }, vec![1, 0], wall_fn)?,
    ];
    let rename = vec![vec![-1, 0], vec![0, 1]];
    let sc = WallScenario {
        epsilon: eps.clone(),
        region: vec![
            Pt::new(-&top, Q::zero()),
            Pt::new(top.clone(), Q::zero()),
            Pt::new(top.clone(), top.clone()),
            Pt::new(-&top, top.clone()),
        ],
        singular_points: vec![node.clone()],
        cuts: vec![[node.clone(), Pt::new(Q::zero(), top.clone())]],
        walls,
        chambers: vec![
            Chamber { name: "left".into(), variables: vec!["u".into(), "z".into()], label_at: Pt::new(-eps.clone(), eps * crate::rational::q(6, 5)) },
            Chamber { name: "right".into(), variables: vec!["v".into(), "z".into()], label_at: Pt::new(eps.clone(), eps * crate::rational::q(6, 5)) },
        ],
        relations: vec![corrected_gluing_single(eps)?],
        continuation: Some(Continuation {
            superpotential: LaurentElement::var(0, 2),
            path: vec![PathStep { wall: 0, sign: 1, rename: Some(rename) }],
        }),
    };
    sc.validate()?;
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn blowup_wall(eps: &Q) -> Wall {
        blowup_scenario(eps).unwrap().walls[0].clone()
    }

    #[test]
    fn crossing_dresses_u() {
        let eps = q(1, 2);
        let w = blowup_wall(&eps);
        let got = cross_wall(&w, &[1, 0], None).unwrap();
        let want = LaurentElement::var(0, 2).add(&LaurentElement::q_monomial(vec![1, -1], eps));
        assert_eq!(got, want);
        assert_eq!(cross_wall(&w, &[0, 3], None).unwrap(), LaurentElement::monomial(vec![0, 3], EnergyScalar::one()));
    }

    #[test]
    fn negative_pairing_requires_truncation() {
        let w = blowup_wall(&qi(1));
        assert!(matches!(cross_wall(&w, &[-1, 0], None), Err(Error::TruncationRequired(_))));
        assert!(cross_wall(&w, &[-1, 0], Some(&qi(10))).is_ok());
    }

    #[test]
    fn inverse_series_is_inverse_mod_order() {
        let eps = q(1, 3);
        let w = blowup_wall(&eps);
        let n = w.default_truncation().unwrap();
        let prod = w.function.mul(&w.inverse_function(&n).unwrap()).truncate(&n);
        assert_eq!(prod, LaurentElement::one(2));
    }

    #[test]
    fn continuation_of_u() {
        let eps = qi(1);
        let sc = blowup_scenario(&eps).unwrap();
        let c = sc.continuation.as_ref().unwrap();
        let got = continue_superpotential(&c.superpotential, &sc.walls, &c.path, None).unwrap();
        let want = LaurentElement::monomial(vec![-1, 0], EnergyScalar::one()).add(&LaurentElement::q_monomial(vec![-1, -1], eps));
        assert_eq!(got, want);
        assert_eq!(got.display_with(&["v", "z"]), "v^-1 + q v^-1 z^-1");
        assert_eq!(continue_superpotential(&c.superpotential, &[], &[], None).unwrap(), c.superpotential);
    }

    #[test]
    fn tangential_path_is_rejected() {
        let sc = blowup_scenario(&qi(1)).unwrap();
        let bad = [PathStep { wall: 0, sign: 0, rename: None }];
        assert!(matches!(continue_superpotential(&LaurentElement::var(0, 2), &sc.walls, &bad, None), Err(Error::Path(_))));
    }

    #[test]
    fn gluing_domain_errors() {
        assert!(corrected_gluing_single(&qi(0)).is_err());
        assert!(corrected_gluing_double(&q(-1, 2)).is_err());
        assert!(involution_compatible(&naive_gluing()));
    }

    #[test]
    fn scenario_identities_hold() {
        for id in blowup_scenario(&q(1, 4)).unwrap().verify(None).unwrap() {
            assert!(id.pass, "{}", id.name);
        }
    }
}
