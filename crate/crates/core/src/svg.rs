//! Static SVG figures of bases, cuts, walls and rays.
//!
//! ```
//! use syz::{catalog, svg::Scene};
//! let catalog::Example::Scenario(s) = catalog::load("blowup-wall").unwrap() else { unreachable!() };
//! let doc = Scene::from_scenario(&s).render();
//! assert!(doc.warnings.is_empty());
//! assert!(doc.svg.contains(r#"<g id="walls">"#));
//! ```

use std::fmt::Write;

use crate::affine_base::{AffineBase, DoubledBase, Mat2, Sheet};
use crate::rational::Pt;
use crate::tropical::Ray;
use crate::wallcross::{Support, WallScenario};

type P = (f64, f64);

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scene {
    pub polygons: Vec<Vec<P>>,
    pub seam: Vec<[P; 2]>,
    pub cuts: Vec<[P; 2]>,
    pub walls: Vec<[P; 2]>,
    pub rays: Vec<Vec<[P; 2]>>,
    pub markers: Vec<P>,
    pub labels: Vec<(P, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub svg: String,
    pub warnings: Vec<String>,
}

fn f(p: &Pt) -> P {
    p.to_f64()
}

fn reflect(r: &Mat2, p: P) -> P {
    (r.a as f64 * p.0 + r.b as f64 * p.1, r.c as f64 * p.0 + r.d as f64 * p.1)
}

impl Scene {
    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
            && self.seam.is_empty()
            && self.cuts.is_empty()
            && self.walls.is_empty()
            && self.rays.is_empty()
            && self.markers.is_empty()
            && self.labels.is_empty()
    }

    pub fn from_base(base: &AffineBase, rays: &[Ray]) -> Scene {
        let mut s = Scene { polygons: vec![base.polygon.iter().map(f).collect()], ..Scene::default() };
        for p in &base.singularities {
            s.markers.push(f(&p.position));
            if p.cut_to != p.position {
                s.cuts.push([f(&p.position), f(&p.cut_to)]);
            }
        }
        for r in rays {
            s.rays.push(r.trace.windows(2).map(|w| [f(&w[0].point), f(&w[1].point)]).collect());
        }
        s
    }

    /// Second sheet drawn as the mirror image of the first across the seam
    /// reflection, so the figure is symmetric about the fixed line.
    pub fn from_doubled(d: &DoubledBase, rays: &[Ray]) -> Scene {
        let r = d.seam_reflection;
        let half: Vec<P> = d.half.polygon.iter().map(f).collect();
        let mut s = Scene { polygons: vec![half.clone(), half.iter().map(|p| reflect(&r, *p)).collect()], ..Scene::default() };
        let n = half.len();
        for e in 0..n {
            let (a, b) = (half[e], half[(e + 1) % n]);
            if reflect(&r, a) == a && reflect(&r, b) == b {
                s.seam.push([a, b]);
            }
        }
        for p in &d.half.singularities {
            for m in [Mat2::IDENTITY, r] {
                s.markers.push(reflect(&m, f(&p.position)));
                if p.cut_to != p.position {
                    s.cuts.push([reflect(&m, f(&p.position)), reflect(&m, f(&p.cut_to))]);
                }
            }
        }
        for p in &d.seam_singularities {
            s.markers.push(f(&p.position));
        }
        for ray in rays {
            let t = &ray.trace;
            let mut current = Sheet::First;
            let mut segs = vec![];
            for w in t.windows(2) {
                if w[0].sheet != Sheet::Seam {
                    current = w[0].sheet;
                } else if w[1].sheet != Sheet::Seam {
                    current = w[1].sheet;
                }
                let m = if current == Sheet::Second { r } else { Mat2::IDENTITY };
                segs.push([reflect(&m, f(&w[0].point)), reflect(&m, f(&w[1].point))]);
            }
            s.rays.push(segs);
        }
        s
    }

    pub fn from_scenario(sc: &WallScenario) -> Scene {
        let region: Vec<P> = sc.region.iter().map(f).collect();
        let (lo, hi) = bbox(region.iter().copied()).unwrap_or(((0.0, 0.0), (1.0, 1.0)));
        let mut s = Scene { polygons: vec![region], ..Scene::default() };
        s.markers = sc.singular_points.iter().map(f).collect();
        s.cuts = sc.cuts.iter().map(|[a, b]| [f(a), f(b)]).collect();
        for w in &sc.walls {
            s.walls.push(match &w.support {
                Support::Segment { from, to } => [f(from), f(to)],
                Support::Ray { origin, direction } => {
                    let o = f(origin);
                    let d = direction.to_f64();
                    // run to the edge of the drawing box
                    let mut t = f64::INFINITY;
                    for (c, dc, l, h) in [(o.0, d.0, lo.0, hi.0), (o.1, d.1, lo.1, hi.1)] {
                        if dc > 0.0 {
                            t = t.min((h - c) / dc);
                        } else if dc < 0.0 {
                            t = t.min((l - c) / dc);
                        }
                    }
                    [o, (o.0 + t * d.0, o.1 + t * d.1)]
                }
            });
        }
        s.labels = sc.chambers.iter().map(|c| (f(&c.label_at), c.name.clone())).collect();
        s
    }

    fn points(&self) -> Vec<P> {
        let mut v: Vec<P> = self.polygons.iter().flatten().copied().collect();
        v.extend(self.seam.iter().chain(&self.cuts).chain(&self.walls).flatten());
        v.extend(self.rays.iter().flatten().flatten());
        v.extend(&self.markers);
        v.extend(self.labels.iter().map(|l| l.0));
        v
    }

    pub fn render(&self) -> Document {
        const SIZE: f64 = 480.0;
        const PAD: f64 = 24.0;
        let mut out = String::new();
        let Some((lo, hi)) = bbox(self.points().into_iter()) else {
            let _ = write!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}"></svg>"#);
            out.push('\n');
            return Document { svg: out, warnings: vec!["empty scene".into()] };
        };
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
        let k = (SIZE - 2.0 * PAD) / span;
        let tx = |p: P| (PAD + (p.0 - lo.0) * k, SIZE - PAD - (p.1 - lo.1) * k);
        let pt = |p: P| {
            let (x, y) = tx(p);
            format!("{x:.3},{y:.3}")
        };
        let line = |o: &mut String, a: P, b: P, attrs: &str| {
            let ((x1, y1), (x2, y2)) = (tx(a), tx(b));
            let _ = writeln!(o, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" {attrs}/>"#);
        };

        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
        out.push_str("<g id=\"polygon\">\n");
        for poly in &self.polygons {
            let pts: Vec<String> = poly.iter().map(|p| pt(*p)).collect();
            let _ = writeln!(out, r#"<polygon points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#, pts.join(" "));
        }
        out.push_str("</g>\n<g id=\"seam\">\n");
        for [a, b] in &self.seam {
            line(&mut out, *a, *b, r#"stroke="purple" stroke-width="3""#);
        }
        out.push_str("</g>\n<g id=\"cuts\">\n");
        for [a, b] in &self.cuts {
            line(&mut out, *a, *b, r#"stroke="gray" stroke-dasharray="6 4""#);
        }
        out.push_str("</g>\n<g id=\"walls\">\n");
        for [a, b] in &self.walls {
            line(&mut out, *a, *b, r#"stroke="red" stroke-width="2""#);
        }
        out.push_str("</g>\n<g id=\"rays\">\n");
        for ray in &self.rays {
            out.push_str("<g class=\"ray\">\n");
            for [a, b] in ray {
                line(&mut out, *a, *b, r#"stroke="blue""#);
            }
            out.push_str("</g>\n");
        }
        out.push_str("</g>\n<g id=\"singular-points\">\n");
        for m in &self.markers {
            let (x, y) = tx(*m);
            let _ = writeln!(
                out,
                r#"<path class="marker" d="M{:.3},{:.3}L{:.3},{:.3}M{:.3},{:.3}L{:.3},{:.3}" stroke="black" stroke-width="2"/>"#,
                x - 4.0, y - 4.0, x + 4.0, y + 4.0, x - 4.0, y + 4.0, x + 4.0, y - 4.0
            );
        }
        out.push_str("</g>\n<g id=\"labels\">\n");
        for (p, text) in &self.labels {
            let (x, y) = tx(*p);
            let _ = writeln!(out, r#"<text x="{x:.3}" y="{y:.3}" font-size="14">{}</text>"#, escape(text));
        }
        out.push_str("</g>\n</svg>\n");
        Document { svg: out, warnings: vec![] }
    }
}

fn bbox(pts: impl Iterator<Item = P>) -> Option<(P, P)> {
    pts.fold(None, |acc, p| match acc {
        None => Some((p, p)),
        Some((lo, hi)) => Some(((lo.0.min(p.0), lo.1.min(p.1)), (hi.0.max(p.0), hi.1.max(p.1)))),
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
