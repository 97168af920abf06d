//! Laurent polynomials over a formal energy parameter `q` (standing for `e⁻¹`),
//! disc weights, and toric Landau-Ginzburg superpotentials.
//!
//! ```
//! use syz::rational::qi;
//! use syz::superpotential::{toric_superpotential, MomentPolytope};
//! let w = toric_superpotential(&MomentPolytope::interval(qi(2))).unwrap();
//! assert_eq!(w.to_string(), "z + q^2 z^-1");
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num::complex::Complex64;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, serde_q, to_f64, Q};

/// `Σ c·q^a`, exponents strictly increasing, coefficients nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct EnergyScalar {
    terms: Vec<(Q, Q)>,
}

impl EnergyScalar {
    pub fn zero() -> Self {
        EnergyScalar { terms: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, Q::zero())
    }

    pub fn q_pow(a: Q) -> Self {
        Self::monomial(Q::one(), a)
    }

    pub fn monomial(c: Q, a: Q) -> Self {
        Self::from_terms(vec![(c, a)])
    }

    /// Collect like exponents and drop zeros.
    pub fn from_terms(raw: Vec<(Q, Q)>) -> Self {
        let mut acc: BTreeMap<Q, Q> = BTreeMap::new();
        for (c, a) in raw {
            *acc.entry(a).or_insert_with(Q::zero) += c;
        }
        EnergyScalar { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(a, c)| (c, a)).collect() }
    }

    /// `(coefficient, exponent)` pairs in increasing exponent order.
    pub fn terms(&self) -> &[(Q, Q)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_zero()
    }

    pub fn min_exponent(&self) -> Option<&Q> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(&o.terms).cloned().collect())
    }

    pub fn neg(&self) -> Self {
        EnergyScalar { terms: self.terms.iter().map(|(c, a)| (-c, a.clone())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut raw = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (c1, a1) in &self.terms {
            for (c2, a2) in &o.terms {
                raw.push((c1 * c2, a1 + a2));
            }
        }
        Self::from_terms(raw)
    }

    /// Drop every term with exponent `≥ order`.
    pub fn truncate(&self, order: &Q) -> Self {
        EnergyScalar { terms: self.terms.iter().filter(|(_, a)| a < order).cloned().collect() }
    }

    /// Numeric value with `q` replaced by `q_value`.
    pub fn eval(&self, q_value: f64) -> f64 {
        let lq = q_value.ln();
        self.terms.iter().map(|(c, a)| to_f64(c) * (to_f64(a) * lq).exp()).sum()
    }

    /// Value at `q = e⁻¹`.
    pub fn eval_e(&self) -> f64 {
        self.terms.iter().map(|(c, a)| to_f64(c) * (-to_f64(a)).exp()).sum()
    }
}

impl fmt::Display for EnergyScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, a)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let qpart = if a.is_zero() {
                String::new()
            } else if a.is_one() {
                "q".to_string()
            } else {
                format!("q^{}", show_q(a))
            };
            match (mag.is_one(), qpart.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{qpart}")?,
                (false, true) => write!(f, "{}", show_q(&mag))?,
                (false, false) => write!(f, "{}{qpart}", show_q(&mag))?,
            }
        }
        Ok(())
    }
}

fn show_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("({}/{})", x.numer(), x.denom())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    #[serde(with = "serde_q")]
    c: Q,
    #[serde(with = "serde_q")]
    a: Q,
}

impl Serialize for EnergyScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<TermJson> = self.terms.iter().map(|(c, a)| TermJson { c: c.clone(), a: a.clone() }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EnergyScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<TermJson>::deserialize(d)?;
        Ok(Self::from_terms(v.into_iter().map(|t| (t.c, t.a)).collect()))
    }
}

/// Finite Laurent polynomial in `nvars` torus variables over [`EnergyScalar`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentElement {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, EnergyScalar>,
}

impl LaurentElement {
    pub fn zero(nvars: usize) -> Self {
        LaurentElement { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::scalar(nvars, EnergyScalar::one())
    }

    pub fn scalar(nvars: usize, s: EnergyScalar) -> Self {
        Self::monomial(vec![0; nvars], s)
    }

    pub fn monomial(exps: Vec<i64>, s: EnergyScalar) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(exps, s);
        }
        LaurentElement { nvars, terms }
    }

    /// `q^a · z^exps`
    pub fn q_monomial(exps: Vec<i64>, a: Q) -> Self {
        Self::monomial(exps, EnergyScalar::q_pow(a))
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, EnergyScalar::one())
    }

    pub fn from_terms(nvars: usize, raw: impl IntoIterator<Item = (Vec<i64>, EnergyScalar)>) -> Self {
        let mut out = Self::zero(nvars);
        for (e, s) in raw {
            assert_eq!(e.len(), nvars, "exponent length");
            out.add_term(e, s);
        }
        out
    }

    fn add_term(&mut self, e: Vec<i64>, s: EnergyScalar) {
        let entry = self.terms.entry(e.clone()).or_default();
        let sum = entry.add(&s);
        if sum.is_zero() {
            self.terms.remove(&e);
        } else {
            *self.terms.get_mut(&e).unwrap() = sum;
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &EnergyScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[i64]) -> EnergyScalar {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> EnergyScalar {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_ring(&self, o: &Self) {
        assert_eq!(self.nvars, o.nvars, "mixing Laurent rings of different rank");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_ring(o);
        let mut out = self.clone();
        for (e, s) in &o.terms {
            out.add_term(e.clone(), s.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentElement { nvars: self.nvars, terms: self.terms.iter().map(|(e, s)| (e.clone(), s.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_ring(o);
        let mut out = Self::zero(self.nvars);
        for (e1, s1) in &self.terms {
            for (e2, s2) in &o.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, s1.mul(s2));
            }
        }
        out
    }

    pub fn scale(&self, s: &EnergyScalar) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c.mul(s))))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.nvars), |acc, _| acc.mul(self))
    }

    /// Drop energy terms of order `≥ order`.
    pub fn truncate(&self, order: &Q) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, s)| (e.clone(), s.truncate(order))))
    }

    /// Image under the monomial map `z^m ↦ z^(A m)` for an integer matrix `A` (rows = new variables).
    pub fn map_exponents(&self, a: &[Vec<i64>]) -> Self {
        let n = a.len();
        Self::from_terms(
            n,
            self.terms.iter().map(|(e, s)| {
                let img = a.iter().map(|row| row.iter().zip(e).map(|(x, y)| x * y).sum()).collect();
                (img, s.clone())
            }),
        )
    }

    /// `z ↦ z⁻¹` in every variable.
    pub fn invert_variables(&self) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, s)| (e.iter().map(|x| -x).collect(), s.clone())))
    }

    pub fn evaluate(&self, point: &[Complex64], q_value: f64) -> Result<Complex64> {
        if point.len() != self.nvars {
            return Err(Error::Domain(format!("expected {} coordinates, got {}", self.nvars, point.len())));
        }
        if !(q_value > 0.0 && q_value < 1.0) && !self.is_energy_free() {
            return Err(Error::Domain(format!("q value {q_value} outside (0, 1)")));
        }
        if point.iter().any(|z| z.norm() == 0.0) {
            return Err(Error::Domain("zero coordinate".into()));
        }
        Ok(self.eval_unchecked(point, q_value))
    }

    fn is_energy_free(&self) -> bool {
        self.terms.values().all(|s| s.terms().iter().all(|(_, a)| a.is_zero()))
    }

    fn eval_unchecked(&self, point: &[Complex64], q_value: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, s) in &self.terms {
            let mut m = Complex64::new(s.eval(q_value), 0.0);
            for (z, k) in point.iter().zip(e) {
                m *= z.powi(*k as i32);
            }
            acc += m;
        }
        acc
    }

    /// `∂W/∂log z_i` evaluated numerically.
    pub fn log_gradient(&self, point: &[Complex64], q_value: f64) -> Vec<Complex64> {
        (0..self.nvars)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (e, s) in &self.terms {
                    if e[i] == 0 {
                        continue;
                    }
                    let mut m = Complex64::new(s.eval(q_value) * e[i] as f64, 0.0);
                    for (z, k) in point.iter().zip(e) {
                        m *= z.powi(*k as i32);
                    }
                    acc += m;
                }
                acc
            })
            .collect()
    }

    fn log_hessian(&self, point: &[Complex64], q_value: f64) -> Vec<Vec<Complex64>> {
        let n = self.nvars;
        let mut h = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for (e, s) in &self.terms {
            let mut m = Complex64::new(s.eval(q_value), 0.0);
            for (z, k) in point.iter().zip(e) {
                m *= z.powi(*k as i32);
            }
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += m * (e[i] * e[j]) as f64;
                }
            }
        }
        h
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        // constant first, then by total degree descending, then lexicographically descending
        ordered.sort_by(|(a, _), (b, _)| {
            let key = |e: &Vec<i64>| (e.iter().any(|x| *x != 0), -e.iter().sum::<i64>(), e.iter().map(|x| -x).collect::<Vec<_>>());
            key(a).cmp(&key(b))
        });
        let mut out = String::new();
        for (i, (e, s)) in ordered.into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(k, _)| **k != 0)
                .map(|(k, n)| if *k == 1 { n.to_string() } else { format!("{n}^{k}") })
                .collect();
            let mono = mono.join(" ");
            let single = s.terms().len() == 1;
            let (coef, neg) = if single {
                let (c, a) = &s.terms()[0];
                let one = EnergyScalar::monomial(c.abs(), a.clone());
                (one.to_string(), c.is_negative())
            } else {
                (format!("({s})"), false)
            };
            let body = match (coef.as_str(), mono.is_empty()) {
                ("1", false) => mono,
                (_, true) => coef,
                _ => format!("{coef} {mono}"),
            };
            if i == 0 {
                out.push_str(&format!("{}{body}", if neg { "-" } else { "" }));
            } else {
                out.push_str(&format!(" {} {body}", if neg { "-" } else { "+" }));
            }
        }
        out
    }

    pub fn default_names(nvars: usize) -> Vec<&'static str> {
        match nvars {
            1 => vec!["z"],
            2 => vec!["x", "y"],
            3 => vec!["x", "y", "z"],
            _ => ["z1", "z2", "z3", "z4", "z5", "z6", "z7", "z8"].into_iter().take(nvars).collect(),
        }
    }
}

impl fmt::Display for LaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&Self::default_names(self.nvars)))
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentJson {
    nvars: usize,
    terms: Vec<LaurentTermJson>,
}

#[derive(Serialize, Deserialize)]
struct LaurentTermJson {
    exponents: Vec<i64>,
    coefficient_terms: EnergyScalar,
}

impl Serialize for LaurentElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LaurentJson {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| LaurentTermJson { exponents: e.clone(), coefficient_terms: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LaurentJson::deserialize(d)?;
        if let Some(t) = j.terms.iter().find(|t| t.exponents.len() != j.nvars) {
            return Err(serde::de::Error::custom(format!("exponent vector {:?} has wrong length", t.exponents)));
        }
        Ok(Self::from_terms(j.nvars, j.terms.into_iter().map(|t| (t.exponents, t.coefficient_terms))))
    }
}

/// A relative class `β` of a disc bounded by a fiber.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DiscClass {
    pub boundary_class: Vec<i64>,
    #[serde(with = "serde_q")]
    pub area: Q,
    #[serde(default = "one_i64")]
    pub count: i64,
    #[serde(default)]
    pub intersection_with_divisor: u32,
}

fn one_i64() -> i64 {
    1
}

impl DiscClass {
    pub fn new(boundary_class: Vec<i64>, area: Q, intersection_with_divisor: u32) -> Self {
        DiscClass { boundary_class, area, count: 1, intersection_with_divisor }
    }

    pub fn maslov_index(&self) -> u32 {
        maslov_index(self)
    }
}

pub fn maslov_index(beta: &DiscClass) -> u32 {
    2 * beta.intersection_with_divisor
}

/// `z_β = q^{area} z^{∂β}`; holonomy is absorbed in the torus coordinates.
pub fn weight(beta: &DiscClass) -> Result<LaurentElement> {
    if !beta.area.is_positive() {
        return Err(Error::Domain(format!("disc area {} must be positive", format_q(&beta.area))));
    }
    Ok(LaurentElement::q_monomial(beta.boundary_class.clone(), beta.area.clone()))
}

/// `Σ n_β z_β` over the Maslov index 2 classes of the list.
pub fn superpotential_from_discs(nvars: usize, discs: &[DiscClass]) -> Result<LaurentElement> {
    let mut w = LaurentElement::zero(nvars);
    for b in discs.iter().filter(|b| b.maslov_index() == 2) {
        if b.boundary_class.len() != nvars {
            return Err(Error::Domain("boundary class has the wrong rank".into()));
        }
        w = w.add(&weight(b)?.scale(&EnergyScalar::constant(Q::from_integer(b.count.into()))));
    }
    Ok(w)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    #[serde(with = "serde_q")]
    pub offset: Q,
}

/// `{ x : ⟨ν_F, x⟩ + c_F ≥ 0 for every facet F }`
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MomentPolytope {
    pub facets: Vec<Facet>,
}

impl MomentPolytope {
    pub fn interval(lambda: Q) -> Self {
        MomentPolytope {
            facets: vec![Facet { normal: vec![1], offset: Q::zero() }, Facet { normal: vec![-1], offset: lambda }],
        }
    }

    /// `{x ≥ 0, y ≥ 0, x + y ≤ Λ}`
    pub fn triangle(lambda: Q) -> Self {
        MomentPolytope {
            facets: vec![
                Facet { normal: vec![1, 0], offset: Q::zero() },
                Facet { normal: vec![0, 1], offset: Q::zero() },
                Facet { normal: vec![-1, -1], offset: lambda },
            ],
        }
    }

    pub fn rectangle(l1: Q, l2: Q) -> Self {
        MomentPolytope {
            facets: vec![
                Facet { normal: vec![1, 0], offset: Q::zero() },
                Facet { normal: vec![0, 1], offset: Q::zero() },
                Facet { normal: vec![-1, 0], offset: l1 },
                Facet { normal: vec![0, -1], offset: l2 },
            ],
        }
    }

    pub fn dimension(&self) -> usize {
        self.facets.first().map_or(0, |f| f.normal.len())
    }

    /// Bounded and full-dimensional with primitive normals. Exact up to dimension 2.
    pub fn validate(&self) -> Result<()> {
        let n = self.dimension();
        if n == 0 || self.facets.iter().any(|f| f.normal.len() != n) {
            return Err(Error::Geometry("facet normals must share a positive dimension".into()));
        }
        for f in &self.facets {
            let g = f.normal.iter().fold(0i64, |g, x| num::integer::gcd(g, *x));
            if g != 1 {
                return Err(Error::Geometry(format!("normal {:?} is not primitive", f.normal)));
            }
        }
        match n {
            1 => {
                let lo = self.facets.iter().filter(|f| f.normal[0] == 1).map(|f| -f.offset.clone()).max();
                let hi = self.facets.iter().filter(|f| f.normal[0] == -1).map(|f| f.offset.clone()).min();
                match (lo, hi) {
                    (Some(lo), Some(hi)) if lo < hi => Ok(()),
                    (Some(_), Some(_)) => Err(Error::Geometry("empty or degenerate interval".into())),
                    _ => Err(Error::Geometry("unbounded interval".into())),
                }
            }
            2 => {
                if self.vertices_2d().len() < 3 {
                    return Err(Error::Geometry("degenerate polygon".into()));
                }
                if !self.normals_positively_span_2d() {
                    return Err(Error::Geometry("unbounded polygon".into()));
                }
                Ok(())
            }
            _ => {
                if self.facets.len() <= n {
                    return Err(Error::Geometry("a bounded polytope needs more than n facets".into()));
                }
                Ok(())
            }
        }
    }

    fn normals_positively_span_2d(&self) -> bool {
        // every open half-plane through the origin must contain a normal
        let ns: Vec<[i64; 2]> = self.facets.iter().map(|f| [f.normal[0], f.normal[1]]).collect();
        ns.iter().all(|u| {
            // test directions perpendicular to each normal on both sides, plus the normal itself
            let probes = [[-u[1], u[0]], [u[1], -u[0]], *u, [-u[0], -u[1]]];
            probes.iter().all(|p| ns.iter().any(|w| p[0] * w[0] + p[1] * w[1] > 0))
        })
    }

    /// Feasible pairwise facet intersections.
    pub fn vertices_2d(&self) -> Vec<(Q, Q)> {
        let mut out: Vec<(Q, Q)> = vec![];
        let fs = &self.facets;
        let z = |x: i64| Q::from_integer(x.into());
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                let (a, b) = (&fs[i], &fs[j]);
                let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
                if det == 0 {
                    continue;
                }
                // solve ⟨a,x⟩ = -c_a, ⟨b,x⟩ = -c_b
                let d = z(det);
                let x = (-&a.offset * z(b.normal[1]) + &b.offset * z(a.normal[1])) / &d;
                let y = (-&b.offset * z(a.normal[0]) + &a.offset * z(b.normal[0])) / &d;
                let ok = fs.iter().all(|f| !(z(f.normal[0]) * &x + z(f.normal[1]) * &y + &f.offset).is_negative());
                if ok && !out.contains(&(x.clone(), y.clone())) {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

pub fn toric_superpotential(p: &MomentPolytope) -> Result<LaurentElement> {
    p.validate()?;
    let n = p.dimension();
    Ok(LaurentElement::from_terms(
        n,
        p.facets.iter().map(|f| (f.normal.clone(), EnergyScalar::q_pow(f.offset.clone()))),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub point: Vec<[f64; 2]>,
    pub value: [f64; 2],
    pub residual: f64,
}

impl CriticalPoint {
    pub fn coords(&self) -> Vec<Complex64> {
        self.point.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    }

    pub fn value_c(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalReport {
    pub points: Vec<CriticalPoint>,
    pub warning: Option<String>,
}

pub const CRITICAL_RESIDUAL: f64 = 1e-10;
const DEDUP: f64 = 1e-8;

/// Multi-start damped Newton on the logarithmic gradient.
pub fn critical_points(w: &LaurentElement, q_value: f64) -> Result<CriticalReport> {
    let n = w.nvars();
    if n == 0 || n > 2 {
        return Err(Error::Domain(format!("critical points need 1 or 2 variables, got {n}")));
    }
    if !(q_value > 0.0 && q_value < 1.0) {
        return Err(Error::Domain(format!("q value {q_value} outside (0, 1)")));
    }
    if w.terms().all(|(e, _)| e.iter().all(|k| *k == 0)) {
        return Ok(CriticalReport { points: vec![], warning: Some("gradient vanishes identically: every point is critical".into()) });
    }
    let starts = start_grid(n);
    let mut found: Vec<Vec<Complex64>> = vec![];
    for s in starts {
        if let Some(z) = newton(w, q_value, s) {
            if !found.iter().any(|f| f.iter().zip(&z).all(|(a, b)| (a - b).norm() < DEDUP)) {
                found.push(z);
            }
        }
    }
    found.sort_by(|a, b| {
        let key = |v: &Vec<Complex64>| v.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>();
        key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
    });
    let points: Vec<CriticalPoint> = found
        .into_iter()
        .map(|z| {
            let r = residual(w, &z, q_value);
            let v = w.eval_unchecked(&z, q_value);
            CriticalPoint { point: z.iter().map(|c| [c.re, c.im]).collect(), value: [v.re, v.im], residual: r }
        })
        .collect();
    let warning = points.is_empty().then(|| "no start converged".to_string());
    Ok(CriticalReport { points, warning })
}

pub fn residual(w: &LaurentElement, z: &[Complex64], q_value: f64) -> f64 {
    w.log_gradient(z, q_value).iter().map(|g| g.norm()).fold(0.0, f64::max)
}

fn start_grid(n: usize) -> Vec<Vec<Complex64>> {
    let radii: Vec<f64> = (-6..=6).map(|k| (0.5 * k as f64).exp()).collect();
    let angles: Vec<f64> = (0..12).map(|j| 0.1 + std::f64::consts::TAU * j as f64 / 12.0).collect();
    let one: Vec<Complex64> = radii.iter().flat_map(|r| angles.iter().map(move |a| Complex64::from_polar(*r, *a))).collect();
    if n == 1 {
        return one.into_iter().map(|z| vec![z]).collect();
    }
    let coarse: Vec<Complex64> = (-4..=4)
        .step_by(2)
        .flat_map(|k| (0..8).map(move |j| Complex64::from_polar((0.5 * k as f64).exp(), 0.2 + std::f64::consts::TAU * j as f64 / 8.0)))
        .collect();
    coarse.iter().flat_map(|a| coarse.iter().map(move |b| vec![*a, *b])).collect()
}

/// Newton in logarithmic coordinates `y = log z` with backtracking.
fn newton(w: &LaurentElement, q_value: f64, start: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let mut z = start;
    let mut r = residual(w, &z, q_value);
    for _ in 0..200 {
        if r < CRITICAL_RESIDUAL * 1e-2 {
            break;
        }
        let g = w.log_gradient(&z, q_value);
        let h = w.log_hessian(&z, q_value);
        let step = solve(&h, &g)?;
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand: Vec<Complex64> = z.iter().zip(&step).map(|(zi, si)| zi * (-si * t).exp()).collect();
            if cand.iter().any(|c| !c.re.is_finite() || !c.im.is_finite() || c.norm() == 0.0) {
                t *= 0.5;
                continue;
            }
            let rc = residual(w, &cand, q_value);
            if rc < r {
                z = cand;
                r = rc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (r < CRITICAL_RESIDUAL).then_some(z)
}

fn solve(h: &[Vec<Complex64>], g: &[Complex64]) -> Option<Vec<Complex64>> {
    match g.len() {
        1 => (h[0][0].norm() > 1e-300).then(|| vec![g[0] / h[0][0]]),
        2 => {
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if det.norm() < 1e-300 {
                return None;
            }
            Some(vec![(g[0] * h[1][1] - h[0][1] * g[1]) / det, (h[0][0] * g[1] - h[1][0] * g[0]) / det])
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn scalar_normal_form() {
        let s = EnergyScalar::from_terms(vec![(qi(1), qi(2)), (qi(3), qi(0)), (qi(-1), qi(2))]);
        assert_eq!(s.terms(), &[(qi(3), qi(0))]);
        assert!(EnergyScalar::from_terms(vec![(qi(1), q(1, 2)), (qi(-1), q(1, 2))]).is_zero());
    }

    #[test]
    fn scalar_eval_matches_terms() {
        let s = EnergyScalar::from_terms(vec![(q(3, 2), q(1, 3)), (qi(-2), qi(4))]);
        let direct = 1.5 * (-1.0f64 / 3.0).exp() - 2.0 * (-4.0f64).exp();
        assert!((s.eval_e() - direct).abs() <= 1e-12 * direct.abs());
        assert!((s.eval((-1.0f64).exp()) - direct).abs() <= 1e-12 * direct.abs());
    }

    #[test]
    fn display_forms() {
        let w = toric_superpotential(&MomentPolytope::triangle(qi(1))).unwrap();
        assert_eq!(w.to_string(), "x + y + q x^-1 y^-1");
        let s = EnergyScalar::from_terms(vec![(qi(1), qi(0)), (qi(-2), q(1, 2))]);
        assert_eq!(s.to_string(), "1 - 2q^(1/2)");
    }

    #[test]
    fn polytope_validation() {
        assert!(MomentPolytope::triangle(qi(1)).validate().is_ok());
        let open = MomentPolytope { facets: MomentPolytope::triangle(qi(1)).facets[..2].to_vec() };
        assert!(matches!(open.validate(), Err(Error::Geometry(_))));
        assert!(MomentPolytope::interval(qi(0)).validate().is_err());
        let bad = MomentPolytope { facets: vec![Facet { normal: vec![2], offset: qi(0) }, Facet { normal: vec![-1], offset: qi(1) }] };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn weight_rejects_nonpositive_area() {
        assert!(weight(&DiscClass::new(vec![1], qi(0), 1)).is_err());
    }

    #[test]
    fn maslov_is_twice_intersection() {
        for k in 0..5 {
            assert_eq!(DiscClass::new(vec![0], qi(1), k).maslov_index(), 2 * k);
        }
    }

    #[test]
    fn constant_has_everywhere_critical_warning() {
        let c = LaurentElement::scalar(1, EnergyScalar::q_pow(qi(2)));
        let r = critical_points(&c, 0.3).unwrap();
        assert!(r.points.is_empty());
        assert!(r.warning.is_some());
    }

    #[test]
    fn evaluate_rejects_zero_coordinate() {
        let w = toric_superpotential(&MomentPolytope::interval(qi(1))).unwrap();
        assert!(w.evaluate(&[Complex64::new(0.0, 0.0)], 0.5).is_err());
    }
}
