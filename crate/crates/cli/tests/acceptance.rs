//! The twelve acceptance criteria, one PASS/FAIL line each.

use std::f64::consts::{E, FRAC_PI_2};
use std::process::Command;
use std::time::{Duration, Instant};

use num::complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use syz::affine_base::{double, exchange_structures, AffineBase, BasePair, Mat2};
use syz::catalog::{self, Example};
use syz::rational::{q, qi};
use syz::slag_numeric::{self as slag, Density, Jacobian, PeriodConfig, QuadDifferential};
use syz::superpotential::{critical_points, toric_superpotential, weight, DiscClass, EnergyScalar, LaurentElement, MomentPolytope};
use syz::tropical::seam_census;
use syz::wallcross::{corrected_gluing_double, corrected_gluing_single, involution_compatible, substitution_reproduces_single};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn pair(name: &str) -> BasePair {
    match catalog::load(name).unwrap() {
        Example::Pair(p) => p,
        _ => panic!("{name} is not a pair"),
    }
}

fn c1() -> Check {
    for l in [qi(1), q(5, 2), qi(3)] {
        let w = toric_superpotential(&MomentPolytope::interval(l.clone())).map_err(|e| e.to_string())?;
        let expect = LaurentElement::var(0, 1).add(&LaurentElement::q_monomial(vec![-1], l.clone()));
        ensure(w == expect, format!("interval: {w}"))?;
        let w = toric_superpotential(&MomentPolytope::triangle(l.clone())).map_err(|e| e.to_string())?;
        let expect = LaurentElement::var(0, 2).add(&LaurentElement::var(1, 2)).add(&LaurentElement::q_monomial(vec![-1, -1], l));
        ensure(w == expect, format!("triangle: {w}"))?;
    }
    Ok("z + q^L z^-1 and x + y + q^L x^-1 y^-1 for L in {1, 5/2, 3}".into())
}

fn c2() -> Check {
    let lambda = qi(1);
    for t in [q(1, 7), q(1, 2), q(5, 6)] {
        let b1 = DiscClass::new(vec![1], t.clone(), 1);
        let b2 = DiscClass::new(vec![-1], &lambda - &t, 1);
        ensure(b1.maslov_index() == 2 && b2.maslov_index() == 2, "maslov")?;
        let prod = weight(&b1).unwrap().mul(&weight(&b2).unwrap());
        ensure(prod == LaurentElement::scalar(1, EnergyScalar::q_pow(lambda.clone())), format!("product {prod}"))?;
    }
    Ok("z_b1 z_b2 = q^1 at three fibers".into())
}

fn c3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let eps = q(rng.gen_range(1..200), rng.gen_range(1..50));
        ensure(substitution_reproduces_single(&eps).unwrap(), format!("substitution at {eps}"))?;
        ensure(!involution_compatible(&corrected_gluing_single(&eps).unwrap()), format!("single compatible at {eps}"))?;
        ensure(involution_compatible(&corrected_gluing_double(&eps).unwrap()), format!("double incompatible at {eps}"))?;
    }
    Ok("20 random eps".into())
}

fn c4() -> Check {
    let p = pair("cp2-cubic");
    for b in [&p.symplectic_base, &p.complex_base] {
        let r = b.check_total_monodromy().unwrap();
        ensure(r.holds && r.normalized == Mat2::new(1, 9, 0, 1), format!("cp2 {:?}: {}", b.structure, r.normalized))?;
    }
    let p = pair("res-e1");
    for b in [&p.symplectic_base, &p.complex_base] {
        let r = b.check_total_monodromy().unwrap();
        ensure(r.holds && r.product == Mat2::IDENTITY, "res-e1 product")?;
        ensure(b.boundary_monodromy().unwrap().is_identity(), "res-e1 boundary")?;
    }
    for b in [&p.symplectic_base, &p.complex_base] {
        let r = double(b, vec![]).unwrap().check_total_monodromy().unwrap();
        ensure(r.holds && r.factors.len() == 24 && r.product == Mat2::IDENTITY, format!("sphere: {} factors, {}", r.factors.len(), r.product))?;
    }
    Ok("[[1,9],[0,1]], identity, 24-factor sphere product".into())
}

fn c5() -> Check {
    let p = pair("res-e1");
    let d = double(&p.complex_base, vec![]).unwrap();
    ensure(d.singular_count() == 24, format!("res-e1 double: {}", d.singular_count()))?;
    let Example::Doubled(s) = catalog::load("sextic-double").unwrap() else { return Err("sextic".into()) };
    ensure(s.interior_count() == 3 && s.seam_singularities.len() == 18 && s.singular_count() == 24, "sextic counts")?;
    let base = AffineBase::interval(qi(2), qi(3));
    let l = double(&base, vec![]).unwrap().lengths().unwrap();
    ensure(l.symplectic == qi(4) && l.complex == qi(6), "interval lengths")?;
    Ok("24; 3+3+18 = 24; (2,3) -> (4,6)".into())
}

fn c6() -> Check {
    let p = pair("elliptic");
    let lens = |p: &BasePair| {
        let l = p.symplectic_base.lengths.clone().unwrap();
        (l.symplectic, l.complex)
    };
    ensure(lens(&p) == (qi(2), qi(3)), "input lengths")?;
    let x = exchange_structures(&p).unwrap();
    ensure(lens(&x) == (qi(3), qi(2)), format!("exchanged {:?}", lens(&x)))?;
    ensure(exchange_structures(&x).unwrap() == p, "not an involution")?;
    Ok("(2,3) -> (3,2) -> (2,3)".into())
}

fn c7() -> Check {
    let p = pair("res-e1");
    let c = seam_census(&double(&p.complex_base, vec![]).unwrap(), None).unwrap();
    ensure(c.singularities == 24 && c.matched_mirror_pairs >= 9, format!("mirror pairs {}", c.matched_mirror_pairs))?;
    let Example::Doubled(s) = catalog::load("sextic-double").unwrap() else { return Err("sextic".into()) };
    let cs = seam_census(&s, None).unwrap();
    ensure(cs.seam_singularities == 18 && cs.seam_alignments == 9, format!("seam alignments {}", cs.seam_alignments))?;
    Ok(format!("{} mirror pairs; {} seam alignments from {} seam points", c.matched_mirror_pairs, cs.seam_alignments, cs.seam_singularities))
}

fn c8() -> Check {
    let q = QuadDifferential::ellipse(1.0, FRAC_PI_2);
    let t = slag::trace_leaf(&q, [2.0, 0.0], 0.005, 100_000).unwrap();
    let (_, sd) = slag::focal_sum_stats(&t, 1.0);
    ensure(t.closed && t.closure_gap < 1e-6 && sd < 1e-6, format!("ellipse gap {} sd {sd}", t.closure_gap))?;
    let q0 = QuadDifferential::log_circle(FRAC_PI_2);
    let c = slag::trace_leaf(&q0, [2.0, 0.0], 0.005, 100_000).unwrap();
    let rad = slag::max_radial_deviation(&c, 2.0);
    ensure(c.closed && rad < 1e-6, format!("circle deviation {rad}"))?;
    let gaps: Vec<f64> = [0.1, 0.05].iter().map(|h| slag::trace_leaf(&q, [3.0, 0.0], *h, 100_000).unwrap().closure_gap).collect();
    ensure(gaps[0] / gaps[1] >= 8.0, format!("gap ratio {}", gaps[0] / gaps[1]))?;
    Ok(format!("gap {:.1e}, focal sd {sd:.1e}, radial {rad:.1e}, halving ratio {:.1}", t.closure_gap, gaps[0] / gaps[1]))
}

fn c9() -> Check {
    let q0 = QuadDifferential::log_circle(FRAC_PI_2);
    let inner = slag::trace_leaf(&q0, [1.0, 0.0], 0.002, 100_000).unwrap();
    let outer = slag::trace_leaf(&q0, [E, 0.0], 0.002, 100_000).unwrap();
    let cfg = PeriodConfig { density: Density::FubiniStudy { total_area: 1.0 }, normalization: 1.0 };
    let p = slag::period_pair(&q0, &cfg, &inner, &outer).unwrap();
    let oracle = (E / 1.0f64).ln();
    ensure((p.complex_length - oracle).abs() < 1e-8, format!("complex length {}", p.complex_length))?;
    let d = p.doubled();
    ensure(d.complex_length == 2.0 * p.complex_length && d.symplectic_length == 2.0 * p.symplectic_length, "doubling")?;
    Ok(format!("|complex - 1| = {:.1e}", (p.complex_length - oracle).abs()))
}

fn c10() -> Check {
    let r = slag::local_model_check(0.1, &[C::new(1.0, 0.0)], 0.0, 0.3, 100, 10, Jacobian::Analytic).unwrap();
    ensure(r.samples == 100 && r.max_omega < 1e-8 && r.max_im_omega < 1e-8 && r.pass, format!("omega {} im {}", r.max_omega, r.max_im_omega))?;
    let s = slag::local_model_check(0.1, &[C::new(0.0, 0.0), C::new(1.0, 0.0)], 0.0, 0.0, 10, 10, Jacobian::Analytic).unwrap();
    ensure(s.singular_samples == 1 && s.checks.iter().any(|c| c.singular), "node not flagged")?;
    Ok(format!("max omega {:.1e}, max Im Omega {:.1e}, node flagged", r.max_omega, r.max_im_omega))
}

/// Independent route: bisection on `W'(z) = 1 − q/z²` over the reals.
fn oracle_roots(qv: f64) -> [f64; 2] {
    let d = |z: f64| 1.0 - qv / (z * z);
    let bisect = |mut lo: f64, mut hi: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (d(mid) > 0.0) == (d(hi) > 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    [-bisect(0.01, 10.0), bisect(0.01, 10.0)]
}

fn c11() -> Check {
    let qv = (-1.0f64).exp();
    let w = toric_superpotential(&MomentPolytope::interval(qi(1))).unwrap();
    let r = critical_points(&w, qv).unwrap();
    ensure(r.points.len() == 2, format!("{} points", r.points.len()))?;
    let roots = oracle_roots(qv);
    for (p, z) in r.points.iter().zip(roots) {
        let c = p.coords()[0];
        let v = z + qv / z;
        ensure((c - C::new(z, 0.0)).norm() < 1e-10, format!("point {c} vs {z}"))?;
        ensure((p.value_c() - C::new(v, 0.0)).norm() < 1e-10, format!("value {} vs {v}", p.value_c()))?;
        ensure((z.abs() - (-0.5f64).exp()).abs() < 1e-12 && (v.abs() - 2.0 * (-0.5f64).exp()).abs() < 1e-12, "oracle")?;
    }
    Ok("+-e^-1/2 with values +-2e^-1/2".into())
}

fn syz(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_syz")).args(args).output().expect("run syz");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c12() -> Check {
    for n in catalog::NAMES {
        let e = catalog::load(n).unwrap();
        let text = serde_json::to_string(&e).unwrap();
        let back: Example = serde_json::from_str(&text).map_err(|x| format!("{n}: {x}"))?;
        ensure(back == e, format!("{n} did not round-trip"))?;
    }
    for args in [&["build", "res-e1"][..], &["census", "sextic-double"], &["superpotential", "toric-cp2"], &["render", "res-e1"], &["localmodel"]] {
        let (a, b) = (syz(args), syz(args));
        ensure(a.0 == 0 && a == b, format!("{args:?} differs between runs or failed ({})", a.0))?;
    }
    Ok(format!("{} examples round-trip; 5 commands byte-identical", catalog::NAMES.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("1 toric superpotentials", c1, Duration::from_secs(1)),
        ("2 CP1 weight relation", c2, Duration::from_secs(1)),
        ("3 gluing identities", c3, Duration::from_secs(1)),
        ("4 monodromy bookkeeping", c4, Duration::from_secs(1)),
        ("5 doubling counts", c5, Duration::from_secs(1)),
        ("6 structure exchange", c6, Duration::from_secs(1)),
        ("7 seam census", c7, Duration::from_secs(5)),
        ("8 trajectory numerics", c8, Duration::from_secs(10)),
        ("9 period oracle", c9, Duration::from_secs(5)),
        ("10 local model", c10, Duration::from_secs(5)),
        ("11 critical points", c11, Duration::from_secs(1)),
        ("12 determinism and round-trip", c12, Duration::from_secs(5)),
    ];
    let mut failed = vec![];
    for (name, f, limit) in criteria {
        let t = Instant::now();
        let r = f();
        let dt = t.elapsed();
        let r = r.and_then(|m| if dt <= limit { Ok(m) } else { Err(format!("took {dt:?}, limit {limit:?}")) });
        match r {
            Ok(m) => println!("PASS {name}: {m} ({dt:.2?})"),
            Err(m) => {
                println!("FAIL {name}: {m} ({dt:.2?})");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
