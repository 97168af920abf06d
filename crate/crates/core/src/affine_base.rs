//! Singular integral affine bases in cut presentation.
//!
//! A 2D base is a single convex polygon chart. Each singular point carries a
//! primitive vanishing cycle `v` and a straight cut to the boundary; the gluing
//! map across the cut is the focus-focus monodromy `I + v v⊥ᵀ` (or its
//! transpose, in a transposed chart), fixing the singular point.
//!
//! ```
//! use syz::affine_base::{focus_focus, Mat2};
//! assert_eq!(focus_focus([0, 1], 1), Mat2::new(1, 0, -1, 1));
//! ```

use std::fmt;

use num::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom;
use crate::rational::{format_q, is_primitive, serde_q, Pt, Q};

/// Integer 2×2 matrix, row major.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };
    /// Coordinate swap; the (meridian, longitude) frame of the toric CP² chart.
    pub const SWAP: Mat2 = Mat2 { a: 0, b: 1, c: 1, d: 0 };

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    /// Inverse of a matrix with determinant ±1.
    pub fn inverse(&self) -> Option<Mat2> {
        match self.det() {
            1 => Some(Mat2::new(self.d, -self.b, -self.c, self.a)),
            -1 => Some(Mat2::new(-self.d, self.b, self.c, -self.a)),
            _ => None,
        }
    }

    pub fn pow(&self, k: u32) -> Mat2 {
        (0..k).fold(Mat2::IDENTITY, |acc, _| acc.mul(self))
    }

    pub fn apply(&self, v: [i64; 2]) -> [i64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn checked_apply(&self, v: [i64; 2]) -> Option<[i64; 2]> {
        let x = self.a.checked_mul(v[0])?.checked_add(self.b.checked_mul(v[1])?)?;
        let y = self.c.checked_mul(v[0])?.checked_add(self.d.checked_mul(v[1])?)?;
        Some([x, y])
    }

    pub fn apply_pt(&self, p: &Pt) -> Pt {
        let f = |x: i64| Q::from_integer(x.into());
        Pt::new(f(self.a) * &p.x + f(self.b) * &p.y, f(self.c) * &p.x + f(self.d) * &p.y)
    }

    /// `F⁻¹ · self · F`
    pub fn conjugate_by(&self, f: &Mat2) -> Option<Mat2> {
        Some(f.inverse()?.mul(self).mul(f))
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = <[[i64; 2]; 2]>::deserialize(d)?;
        Ok(Mat2::new(r[0][0], r[0][1], r[1][0], r[1][1]))
    }
}

/// `v⊥`, the quarter turn of `v`.
pub fn perp(v: [i64; 2]) -> [i64; 2] {
    [-v[1], v[0]]
}

/// `I + k·v·v⊥ᵀ`, i.e. `w ↦ w + k·det(v, w)·v`.
pub fn focus_focus(v: [i64; 2], k: u32) -> Mat2 {
    let (p, q, k) = (v[0], v[1], k as i64);
    Mat2::new(1 - k * p * q, k * p * p, -k * q * q, 1 + k * p * q)
}

/// `[[1, d], [0, 1]]`
pub fn normal_degree_to_monodromy(d: i64) -> UnimodularMap {
    UnimodularMap::linear(Mat2::new(1, d, 0, 1)).expect("unit upper triangular")
}

/// Some `C` with `|entries| ≤ bound`, `det C = 1` and `C⁻¹ a C = b`.
pub fn find_conjugator(a: &Mat2, b: &Mat2, bound: i64) -> Option<Mat2> {
    let r = -bound..=bound;
    for p in r.clone() {
        for q in r.clone() {
            for s in r.clone() {
                for t in r.clone() {
                    let c = Mat2::new(p, q, s, t);
                    if c.det() == 1 && a.mul(&c) == c.mul(b) {
                        return Some(c);
                    }
                }
            }
        }
    }
    None
}

/// Affine map `x ↦ A x + t` with `A ∈ SL(2,ℤ)` and rational `t`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct UnimodularMap {
    pub linear: Mat2,
    pub translation: Pt,
}

impl UnimodularMap {
    pub fn new(linear: Mat2, translation: Pt) -> Result<Self> {
        if linear.det() != 1 {
            return Err(Error::InvariantViolation(format!("det {linear} != 1")));
        }
        Ok(UnimodularMap { linear, translation })
    }

    pub fn linear(linear: Mat2) -> Result<Self> {
        Self::new(linear, Pt::zero())
    }

    pub fn identity() -> Self {
        UnimodularMap { linear: Mat2::IDENTITY, translation: Pt::zero() }
    }

    /// The map fixing `center` with linear part `linear`.
    pub fn about(linear: Mat2, center: &Pt) -> Result<Self> {
        Self::new(linear, center.sub(&linear.apply_pt(center)))
    }

    pub fn apply(&self, p: &Pt) -> Pt {
        self.linear.apply_pt(p).add(&self.translation)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &UnimodularMap) -> UnimodularMap {
        UnimodularMap {
            linear: self.linear.mul(&other.linear),
            translation: self.linear.apply_pt(&other.translation).add(&self.translation),
        }
    }

    pub fn inverse(&self) -> UnimodularMap {
        let inv = self.linear.inverse().expect("det 1");
        UnimodularMap { linear: inv, translation: inv.apply_pt(&self.translation).neg() }
    }

    pub fn is_identity(&self) -> bool {
        self.linear == Mat2::IDENTITY && self.translation.is_zero()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Symplectic,
    Complex,
}

impl Structure {
    pub fn other(self) -> Structure {
        match self {
            Structure::Symplectic => Structure::Complex,
            Structure::Complex => Structure::Symplectic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Interval,
    Disc,
    Circle,
    Sphere,
}

fn one_u32() -> u32 {
    1
}

fn is_one(k: &u32) -> bool {
    *k == 1
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SingularPoint {
    pub position: Pt,
    pub vanishing_cycle: [i64; 2],
    pub cut_to: Pt,
    /// Number of coalesced focus-focus points; monodromy is the `k`-th power.
    #[serde(default = "one_u32", skip_serializing_if = "is_one")]
    pub multiplicity: u32,
}

impl SingularPoint {
    pub fn new(position: Pt, vanishing_cycle: [i64; 2], cut_to: Pt) -> Self {
        SingularPoint { position, vanishing_cycle, cut_to, multiplicity: 1 }
    }

    pub fn cut_direction(&self) -> Pt {
        self.cut_to.sub(&self.position)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Lengths {
    #[serde(with = "serde_q")]
    pub symplectic: Q,
    #[serde(with = "serde_q")]
    pub complex: Q,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cut {
    pub point: usize,
    pub polyline: Vec<Pt>,
    pub map: UnimodularMap,
}

fn identity_frame() -> Mat2 {
    Mat2::IDENTITY
}

/// One chart of a singular integral affine base.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AffineBase {
    pub dimension: u8,
    pub topology: Topology,
    pub structure: Structure,
    /// Convex counterclockwise polygon (2D) or the two endpoints `(x, 0)` (1D).
    pub polygon: Vec<Pt>,
    #[serde(default)]
    pub singularities: Vec<SingularPoint>,
    #[serde(default)]
    pub boundary_normal_degree: i64,
    /// Columns are the meridian and longitude in chart coordinates.
    #[serde(default = "identity_frame")]
    pub boundary_frame: Mat2,
    /// Monodromies are transposes of the focus-focus form (dual lattice chart).
    #[serde(default)]
    pub transposed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Lengths>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct MonodromyReport {
    pub holds: bool,
    /// `(point id, factor)` in composition order.
    pub factors: Vec<(String, Mat2)>,
    pub product: Mat2,
    pub frame: Mat2,
    pub normalized: Mat2,
    pub target: Mat2,
}

impl AffineBase {
    pub fn disc(structure: Structure, polygon: Vec<Pt>, singularities: Vec<SingularPoint>, d: i64) -> Self {
        AffineBase {
            dimension: 2,
            topology: Topology::Disc,
            transposed: structure == Structure::Complex,
            structure,
            polygon,
            singularities,
            boundary_normal_degree: d,
            boundary_frame: Mat2::IDENTITY,
            lengths: None,
        }
    }

    pub fn interval(symplectic: Q, complex: Q) -> Self {
        AffineBase {
            dimension: 1,
            topology: Topology::Interval,
            structure: Structure::Symplectic,
            polygon: vec![Pt::zero(), Pt::new(symplectic.clone(), Q::zero())],
            singularities: vec![],
            boundary_normal_degree: 0,
            boundary_frame: Mat2::IDENTITY,
            transposed: false,
            lengths: Some(Lengths { symplectic, complex }),
        }
    }

    pub fn with_frame(mut self, frame: Mat2) -> Self {
        self.boundary_frame = frame;
        self
    }

    fn point(&self, id: usize) -> Result<&SingularPoint> {
        self.singularities
            .get(id)
            .ok_or_else(|| Error::NotFound(format!("singular point {id} (base has {})", self.singularities.len())))
    }

    /// Chart-coordinate monodromy of the point, as used for gluing across its cut.
    pub fn monodromy_matrix(&self, id: usize) -> Result<Mat2> {
        let p = self.point(id)?;
        let m = focus_focus(p.vanishing_cycle, p.multiplicity);
        Ok(if self.transposed { m.transpose() } else { m })
    }

    pub fn monodromy_around(&self, id: usize) -> Result<UnimodularMap> {
        let m = self.monodromy_matrix(id)?;
        UnimodularMap::about(m, &self.point(id)?.position)
    }

    /// Primitive direction fixed by the monodromy of the point.
    pub fn eigen_direction(&self, id: usize) -> Result<[i64; 2]> {
        let v = self.point(id)?.vanishing_cycle;
        Ok(if self.transposed { perp(v) } else { v })
    }

    pub fn cuts(&self) -> Result<Vec<Cut>> {
        (0..self.singularities.len())
            .map(|i| {
                let p = &self.singularities[i];
                Ok(Cut {
                    point: i,
                    polyline: vec![p.position.clone(), p.cut_to.clone()],
                    map: self.monodromy_around(i)?,
                })
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        match (self.dimension, self.topology) {
            (1, Topology::Interval) | (1, Topology::Circle) => return self.validate_1d(),
            (2, Topology::Disc) => {}
            (2, t) => return Err(Error::Topology(format!("a single 2D chart must be a disc, got {t:?}"))),
            (d, t) => return Err(Error::Topology(format!("dimension {d} with topology {t:?}"))),
        }
        if self.boundary_frame.det().abs() != 1 {
            return Err(Error::InvariantViolation(format!("boundary frame {} not in GL(2,Z)", self.boundary_frame)));
        }
        if !geom::is_strictly_convex_ccw(&self.polygon) {
            return Err(Error::Geometry("polygon must be strictly convex and counterclockwise".into()));
        }
        for (i, s) in self.singularities.iter().enumerate() {
            if !is_primitive(s.vanishing_cycle) {
                return Err(Error::InvariantViolation(format!("vanishing cycle {:?} of point {i} not primitive", s.vanishing_cycle)));
            }
            if s.multiplicity == 0 {
                return Err(Error::InvariantViolation(format!("point {i} has multiplicity 0")));
            }
            if !geom::strictly_inside(&self.polygon, &s.position) {
                return Err(Error::Placement(format!("point {i} at {} is not interior", s.position)));
            }
            if geom::boundary_key(&self.polygon, &s.cut_to).is_none() {
                return Err(Error::Presentation(format!("cut of point {i} ends at {}, off the boundary", s.cut_to)));
            }
            let e = Pt::from_int_vec(self.eigen_direction(i)?);
            if !s.cut_direction().cross(&e).is_zero() {
                return Err(Error::Presentation(format!("cut of point {i} is not along its invariant line")));
            }
        }
        let n = self.singularities.len();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (a, b) = (&self.singularities[i], &self.singularities[j]);
                if a.position == b.position {
                    return Err(Error::Placement(format!("points {i} and {j} coincide")));
                }
                if geom::on_segment(&b.position, &a.position, &a.cut_to) {
                    return Err(Error::Presentation(format!("cut of point {i} meets point {j}")));
                }
                if i < j && geom::segments_meet(&a.position, &a.cut_to, &b.position, &b.cut_to) {
                    return Err(Error::Presentation(format!("cuts of points {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }

    fn validate_1d(&self) -> Result<()> {
        let l = self
            .lengths
            .as_ref()
            .ok_or_else(|| Error::InvariantViolation("1D base needs lengths".into()))?;
        if !l.symplectic.is_positive() || !l.complex.is_positive() {
            return Err(Error::Domain("lengths must be positive".into()));
        }
        if !self.singularities.is_empty() {
            return Err(Error::InvariantViolation("1D bases carry no singular points".into()));
        }
        Ok(())
    }

    pub fn require_disc(&self) -> Result<()> {
        if self.dimension != 2 || self.topology != Topology::Disc {
            return Err(Error::Topology(format!("expected a 2D disc, got {:?}", self.topology)));
        }
        Ok(())
    }

    pub fn boundary_monodromy(&self) -> Result<UnimodularMap> {
        self.require_disc()?;
        Ok(normal_degree_to_monodromy(self.boundary_normal_degree))
    }

    /// Point ids sorted by the counterclockwise position of their cut endpoint,
    /// starting at polygon vertex 0.
    pub fn ccw_order(&self) -> Result<Vec<usize>> {
        let mut keyed = Vec::new();
        for (i, s) in self.singularities.iter().enumerate() {
            let k = geom::boundary_key(&self.polygon, &s.cut_to)
                .ok_or_else(|| Error::Presentation(format!("cut of point {i} does not reach the boundary")))?;
            keyed.push((k, i));
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        for w in keyed.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Presentation(format!("cuts of points {} and {} share an endpoint", w[0].1, w[1].1)));
            }
        }
        Ok(keyed.into_iter().map(|(_, i)| i).collect())
    }

    /// Untransposed focus-focus factors in counterclockwise order.
    fn standard_factors(&self) -> Result<Vec<(String, Mat2)>> {
        Ok(self
            .ccw_order()?
            .into_iter()
            .map(|i| {
                let s = &self.singularities[i];
                (format!("{i}"), focus_focus(s.vanishing_cycle, s.multiplicity))
            })
            .collect())
    }

    pub fn check_total_monodromy(&self) -> Result<MonodromyReport> {
        self.require_disc()?;
        self.validate()?;
        let target = self.boundary_monodromy()?.linear;
        Ok(assemble_report(self.standard_factors()?, self.transposed, self.boundary_frame, target))
    }

    pub fn retag(&self, structure: Structure) -> AffineBase {
        AffineBase { structure, ..self.clone() }
    }
}

fn assemble_report(standard: Vec<(String, Mat2)>, transposed: bool, frame: Mat2, target: Mat2) -> MonodromyReport {
    let std_product = standard.iter().fold(Mat2::IDENTITY, |acc, (_, m)| acc.mul(m));
    let (factors, product) = if transposed {
        let f: Vec<_> = standard.into_iter().rev().map(|(id, m)| (id, m.transpose())).collect();
        (f, std_product.transpose())
    } else {
        (standard, std_product)
    };
    debug_assert_eq!(factors.iter().fold(Mat2::IDENTITY, |acc, (_, m)| acc.mul(m)), product);
    let normalized = product.conjugate_by(&frame).unwrap_or(product);
    MonodromyReport { holds: normalized == target, factors, product, frame, normalized, target }
}

/// Symplectic and complex charts over one topological base; points matched by index.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BasePair<B = AffineBase> {
    pub symplectic_base: B,
    pub complex_base: B,
}

/// Anything carrying a symplectic/complex role and per-point monodromies.
pub trait Tagged: Clone {
    fn structure(&self) -> Structure;
    fn retagged(&self, s: Structure) -> Self;
    fn point_monodromies(&self) -> Result<Vec<Mat2>>;
    fn swap_lengths(&mut self) {}
}

impl Tagged for AffineBase {
    fn structure(&self) -> Structure {
        self.structure
    }

    fn retagged(&self, s: Structure) -> Self {
        self.retag(s)
    }

    fn point_monodromies(&self) -> Result<Vec<Mat2>> {
        (0..self.singularities.len()).map(|i| self.monodromy_matrix(i)).collect()
    }

    fn swap_lengths(&mut self) {
        if let Some(l) = self.lengths.as_mut() {
            std::mem::swap(&mut l.symplectic, &mut l.complex);
            if self.dimension == 1 {
                let end = Pt::new(l.symplectic.clone(), Q::zero());
                self.polygon = vec![Pt::zero(), end];
            }
        }
    }
}

impl<B: Tagged> BasePair<B> {
    pub fn new(symplectic_base: B, complex_base: B) -> Self {
        BasePair { symplectic_base, complex_base }
    }

    /// Roles are right and matched monodromies are transposes of each other.
    pub fn check_consistency(&self) -> Result<()> {
        if self.symplectic_base.structure() != Structure::Symplectic || self.complex_base.structure() != Structure::Complex {
            return Err(Error::InvariantViolation("pair roles are not (symplectic, complex)".into()));
        }
        let a = self.symplectic_base.point_monodromies()?;
        let b = self.complex_base.point_monodromies()?;
        if a.len() != b.len() {
            return Err(Error::InvariantViolation(format!("{} vs {} singular points", a.len(), b.len())));
        }
        for (i, (x, y)) in a.iter().zip(&b).enumerate() {
            if x.transpose() != *y {
                return Err(Error::InvariantViolation(format!("point {i}: {x} and {y} are not transposes")));
            }
        }
        Ok(())
    }
}

/// Swap the two affine structures. Each chart keeps its data and changes role.
pub fn exchange_structures<B: Tagged>(pair: &BasePair<B>) -> Result<BasePair<B>> {
    pair.check_consistency()?;
    let mut s = pair.complex_base.retagged(Structure::Symplectic);
    let mut c = pair.symplectic_base.retagged(Structure::Complex);
    s.swap_lengths();
    c.swap_lengths();
    Ok(BasePair::new(s, c))
}

/// Which copy of the half a point lives on.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    First,
    Second,
    Seam,
}

impl Sheet {
    pub fn flip(self) -> Sheet {
        match self {
            Sheet::First => Sheet::Second,
            Sheet::Second => Sheet::First,
            Sheet::Seam => Sheet::Seam,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointId {
    pub sheet: Sheet,
    pub index: usize,
}

impl PointId {
    pub fn first(index: usize) -> Self {
        PointId { sheet: Sheet::First, index }
    }

    pub fn mirror(self) -> Self {
        PointId { sheet: self.sheet.flip(), index: self.index }
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sheet {
            Sheet::First => "a",
            Sheet::Second => "b",
            Sheet::Seam => "s",
        };
        write!(f, "{s}{}", self.index)
    }
}

/// Two copies of a half glued along its boundary. Only the half is stored;
/// the second copy is its image under the involution.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DoubledBase {
    pub half: AffineBase,
    #[serde(default)]
    pub seam_singularities: Vec<SingularPoint>,
    /// Seam points that arose from resolving one point into two.
    #[serde(default)]
    pub seam_pairs: Vec<[usize; 2]>,
    /// Reflection expressing the second copy in first-copy coordinates.
    #[serde(default = "default_reflection")]
    pub seam_reflection: Mat2,
}

fn default_reflection() -> Mat2 {
    Mat2::new(1, 0, 0, -1)
}

/// Integral reflection fixing the edge direction `t`, reversing its orthogonal.
pub fn edge_reflection(t: [i64; 2]) -> Option<Mat2> {
    let (p, q) = (t[0], t[1]);
    let n2 = p * p + q * q;
    // I - 2 n nᵀ / |n|² with n = (-q, p)
    let (a, b, d) = (n2 - 2 * q * q, 2 * p * q, n2 - 2 * p * p);
    if a % n2 != 0 || b % n2 != 0 || d % n2 != 0 {
        return None;
    }
    Some(Mat2::new(a / n2, b / n2, b / n2, d / n2))
}

fn edge_direction(poly: &[Pt], e: usize) -> [i64; 2] {
    let n = poly.len();
    poly[(e + 1) % n].sub(&poly[e]).primitive_direction().expect("nondegenerate edge")
}

pub fn double(base: &AffineBase, seam_singularities: Vec<SingularPoint>) -> Result<DoubledBase> {
    double_with(base, seam_singularities, vec![], default_reflection())
}

pub fn double_with(
    base: &AffineBase,
    seam_singularities: Vec<SingularPoint>,
    seam_pairs: Vec<[usize; 2]>,
    seam_reflection: Mat2,
) -> Result<DoubledBase> {
    let d = DoubledBase { half: base.clone(), seam_singularities, seam_pairs, seam_reflection };
    d.validate()?;
    Ok(d)
}

impl DoubledBase {
    pub fn validate(&self) -> Result<()> {
        self.half.validate()?;
        match self.half.topology {
            Topology::Interval => {
                if !self.seam_singularities.is_empty() {
                    return Err(Error::Placement("a doubled interval has no seam points".into()));
                }
                return Ok(());
            }
            Topology::Disc => {}
            t => return Err(Error::Topology(format!("can only double a disc or interval, got {t:?}"))),
        }
        let r = self.seam_reflection;
        if r.det() != -1 || r.mul(&r) != Mat2::IDENTITY {
            return Err(Error::InvariantViolation(format!("seam reflection {r} is not an involution of det -1")));
        }
        let poly = &self.half.polygon;
        for e in 0..poly.len() {
            if edge_reflection(edge_direction(poly, e)).is_none() {
                return Err(Error::Geometry(format!("seam edge {e} has no integral reflection")));
            }
        }
        for (j, s) in self.seam_singularities.iter().enumerate() {
            if !is_primitive(s.vanishing_cycle) || s.multiplicity == 0 {
                return Err(Error::InvariantViolation(format!("seam point {j} has a bad vanishing cycle")));
            }
            let (e, f) = geom::boundary_key(poly, &s.position)
                .ok_or_else(|| Error::Placement(format!("seam point {j} at {} is off the seam", s.position)))?;
            if f.is_zero() {
                return Err(Error::Placement(format!("seam point {j} sits on a corner")));
            }
            let t = edge_direction(poly, e);
            let refl = edge_reflection(t).expect("checked");
            let v = self.eigen_of(s.vanishing_cycle);
            let rv = refl.apply(v);
            if rv != v && rv != [-v[0], -v[1]] {
                return Err(Error::Placement(format!("seam point {j}: invariant line neither along nor across the seam")));
            }
            if self.half.singularities.iter().any(|h| geom::on_segment(&s.position, &h.position, &h.cut_to)) {
                return Err(Error::Presentation(format!("seam point {j} lies on a cut")));
            }
        }
        for (a, b) in self.seam_singularities.iter().enumerate().flat_map(|(i, a)| {
            self.seam_singularities.iter().skip(i + 1).map(move |b| (a, b))
        }) {
            if a.position == b.position {
                return Err(Error::Placement("two seam points coincide".into()));
            }
        }
        for p in &self.seam_pairs {
            if p[0] >= self.seam_singularities.len() || p[1] >= self.seam_singularities.len() || p[0] == p[1] {
                return Err(Error::NotFound(format!("seam pair {p:?}")));
            }
        }
        Ok(())
    }

    fn eigen_of(&self, v: [i64; 2]) -> [i64; 2] {
        if self.half.transposed {
            perp(v)
        } else {
            v
        }
    }

    pub fn topology(&self) -> Topology {
        if self.half.dimension == 1 {
            Topology::Circle
        } else {
            Topology::Sphere
        }
    }

    pub fn interior_count(&self) -> usize {
        self.half.singularities.len()
    }

    pub fn singular_count(&self) -> usize {
        2 * self.interior_count() + self.seam_singularities.len()
    }

    /// Lengths of the doubled circle (1D only).
    pub fn lengths(&self) -> Option<Lengths> {
        let l = self.half.lengths.as_ref()?;
        let two = Q::from_integer(2.into());
        Some(Lengths { symplectic: &l.symplectic * &two, complex: &l.complex * &two })
    }

    pub fn point_ids(&self) -> Vec<PointId> {
        let n = self.interior_count();
        let mut ids: Vec<_> = (0..n).map(PointId::first).collect();
        ids.extend((0..n).map(|i| PointId { sheet: Sheet::Second, index: i }));
        ids.extend((0..self.seam_singularities.len()).map(|i| PointId { sheet: Sheet::Seam, index: i }));
        ids
    }

    pub fn involution(&self, id: PointId) -> PointId {
        id.mirror()
    }

    pub fn point(&self, id: PointId) -> Result<&SingularPoint> {
        let list = match id.sheet {
            Sheet::Seam => &self.seam_singularities,
            _ => &self.half.singularities,
        };
        list.get(id.index).ok_or_else(|| Error::NotFound(format!("point {id}")))
    }

    /// Monodromy in first-copy coordinates, oriented by the sphere.
    pub fn monodromy_matrix(&self, id: PointId) -> Result<Mat2> {
        let p = self.point(id)?;
        let m = focus_focus(p.vanishing_cycle, p.multiplicity);
        let m = match id.sheet {
            Sheet::Second => {
                let r = self.seam_reflection;
                r.mul(&m.inverse().expect("det 1")).mul(&r)
            }
            _ => m,
        };
        Ok(if self.half.transposed { m.transpose() } else { m })
    }

    pub fn check_total_monodromy(&self) -> Result<MonodromyReport> {
        if self.topology() != Topology::Sphere {
            return Err(Error::Topology("total monodromy needs a doubled disc".into()));
        }
        self.validate()?;
        let mut std_factors = self.half.standard_factors()?;
        let first = std_factors.clone();
        let poly = &self.half.polygon;
        let mut seam: Vec<_> = self
            .seam_singularities
            .iter()
            .enumerate()
            .map(|(j, s)| (geom::boundary_key(poly, &s.position).expect("validated"), j))
            .collect();
        seam.sort_by(|a, b| a.0.cmp(&b.0));
        for (_, j) in seam {
            let s = &self.seam_singularities[j];
            std_factors.push((format!("s{j}"), focus_focus(s.vanishing_cycle, s.multiplicity)));
        }
        let r = self.seam_reflection;
        for (id, m) in first.into_iter().rev() {
            std_factors.push((format!("b{id}"), r.mul(&m.inverse().expect("det 1")).mul(&r)));
        }
        for f in std_factors.iter_mut().take(self.interior_count()) {
            f.0 = format!("a{}", f.0);
        }
        Ok(assemble_report(std_factors, self.half.transposed, Mat2::IDENTITY, Mat2::IDENTITY))
    }

    /// Split every seam point of multiplicity 2 into two simple points at
    /// distance `delta` on either side along the seam.
    pub fn split_seam_points(&self, delta: &Q) -> Result<DoubledBase> {
        if !delta.is_positive() {
            return Err(Error::Domain("splitting distance must be positive".into()));
        }
        let poly = &self.half.polygon;
        let mut pts = Vec::new();
        let mut pairs = Vec::new();
        for (j, s) in self.seam_singularities.iter().enumerate() {
            match s.multiplicity {
                1 => pts.push(s.clone()),
                2 => {
                    let (e, _) = geom::boundary_key(poly, &s.position)
                        .ok_or_else(|| Error::Placement(format!("seam point {j} is off the seam")))?;
                    let t = Pt::from_int_vec(edge_direction(poly, e)).scale(delta);
                    let k = pts.len();
                    for p in [s.position.sub(&t), s.position.add(&t)] {
                        pts.push(SingularPoint { position: p.clone(), vanishing_cycle: s.vanishing_cycle, cut_to: p, multiplicity: 1 });
                    }
                    pairs.push([k, k + 1]);
                }
                m => return Err(Error::Domain(format!("seam point {j} has multiplicity {m}; only 1 or 2 split"))),
            }
        }
        let d = DoubledBase { half: self.half.clone(), seam_singularities: pts, seam_pairs: pairs, seam_reflection: self.seam_reflection };
        d.validate()?;
        Ok(d)
    }

    pub fn retag(&self, s: Structure) -> DoubledBase {
        DoubledBase { half: self.half.retag(s), ..self.clone() }
    }
}

impl Tagged for DoubledBase {
    fn structure(&self) -> Structure {
        self.half.structure
    }

    fn retagged(&self, s: Structure) -> Self {
        self.retag(s)
    }

    fn point_monodromies(&self) -> Result<Vec<Mat2>> {
        self.point_ids().into_iter().map(|id| self.monodromy_matrix(id)).collect()
    }

    fn swap_lengths(&mut self) {
        self.half.swap_lengths()
    }
}

pub fn describe(m: &UnimodularMap) -> String {
    format!("{} + ({}, {})", m.linear, format_q(&m.translation.x), format_q(&m.translation.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn focus_focus_standard_cases() {
        assert_eq!(focus_focus([1, 0], 1), Mat2::new(1, 1, 0, 1));
        assert_eq!(focus_focus([0, 1], 1), Mat2::new(1, 0, -1, 1));
        let m = focus_focus([1, 1], 1);
        assert_eq!(m.apply([1, 1]), [1, 1]);
        assert_eq!(m.trace(), 2);
        assert_eq!(m.det(), 1);
    }

    #[test]
    fn affine_map_algebra() {
        let m = UnimodularMap::about(focus_focus([2, 1], 1), &Pt::new(q(1, 2), q(1, 3))).unwrap();
        assert!(m.compose(&m.inverse()).is_identity());
        assert_eq!(m.apply(&Pt::new(q(1, 2), q(1, 3))), Pt::new(q(1, 2), q(1, 3)));
        assert!(UnimodularMap::linear(Mat2::new(2, 0, 0, 1)).is_err());
    }

    #[test]
    fn edge_reflections() {
        assert_eq!(edge_reflection([1, 0]), Some(Mat2::new(1, 0, 0, -1)));
        assert_eq!(edge_reflection([0, 1]), Some(Mat2::new(-1, 0, 0, 1)));
        assert_eq!(edge_reflection([-1, 1]), Some(Mat2::new(0, -1, -1, 0)));
        assert_eq!(edge_reflection([2, 1]), None);
    }

    #[test]
    fn single_point_disc_fails_total_check() {
        let poly = vec![Pt::ints(0, 0), Pt::ints(2, 0), Pt::ints(2, 2), Pt::ints(0, 2)];
        let p = SingularPoint::new(Pt::ints(1, 1), [1, 0], Pt::ints(2, 1));
        let b = AffineBase::disc(Structure::Symplectic, poly, vec![p], 0);
        let r = b.check_total_monodromy().unwrap();
        assert!(!r.holds);
        assert_eq!(r.product, Mat2::new(1, 1, 0, 1));
    }

    #[test]
    fn cut_off_eigenline_rejected() {
        let poly = vec![Pt::ints(0, 0), Pt::ints(2, 0), Pt::ints(2, 2), Pt::ints(0, 2)];
        let p = SingularPoint::new(Pt::ints(1, 1), [1, 0], Pt::ints(1, 0));
        let b = AffineBase::disc(Structure::Symplectic, poly, vec![p], 0);
        assert!(matches!(b.validate(), Err(Error::Presentation(_))));
    }

    #[test]
    fn unknown_point_is_not_found() {
        let b = AffineBase::interval(qi(1), qi(2));
        assert!(matches!(b.monodromy_around(0), Err(Error::NotFound(_))));
    }
}
