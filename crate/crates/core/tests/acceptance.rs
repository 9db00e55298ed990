//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value as Json;

use cyglue::certificates::{oguiso_ample_certificate, oguiso_l_prime, oguiso_minus_two_classes, wehler_no_minus_two_certificate};
use cyglue::lattice::{apply_isometry, compose, DivisorClass, Isometry};
use cyglue::linalg::{int, integer_kernel, integer_rank, Int, IntMatrix};
use cyglue::models::{hlm_lattice, oguiso_from_hlm, oguiso_lattice, oguiso_translation, wehler_lattice};
use cyglue::projectivity::{classify, AlgDim, Classification};
use cyglue::scenario::{build, presets::preset, run, Stage};
use cyglue::snc::{
    d_semistability_check, solve_center_class, AmbientSpace, CenterSlot, Component, ComponentDescriptor,
    GluingDescriptor,
};
use cyglue::wehler::{involution_pullback, iota, order_and_growth, power_closed_form, Growth};

type Outcome = Result<String, String>;

fn params(kv: &[(&str, i64)]) -> BTreeMap<String, i64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn main_family() -> Outcome {
    let start = Instant::now();
    let stages = [Stage::Hypotheses, Stage::Invariants, Stage::Ample];
    for a in 1..=50i64 {
        let s = preset("main", &params(&[("a", a)])).map_err(|e| e.to_string())?;
        let r = run(&s, &stages).map_err(|e| e.to_string())?;
        let h = r.hypotheses.as_ref().unwrap();
        ensure(h.d_semistable.satisfied, || format!("a={a}: not d-semistable"))?;
        let inv = r.invariants.as_ref().unwrap();
        ensure(inv.b2_x == (a + 3) as usize, || format!("a={a}: b2 = {}", inv.b2_x))?;
        let ex = Int::from(-256 * a * a + 32 * a - 224);
        ensure(inv.e_x == ex, || format!("a={a}: e = {}", inv.e_x))?;
        let expected = vec![int(16 * a * a - a + 4), int(4 - 8 * a), int(4 + 8 * a)];
        let built = build(&s).map_err(|e| e.to_string())?;
        let slot = CenterSlot { component: Component::X1, index: a as usize };
        let solved = solve_center_class(&built.gluing, slot).map_err(|e| e.to_string())?;
        ensure(solved.coords() == expected.as_slice(), || format!("a={a}: solved center {:?}", solved.coords()))?;
        ensure(built.gluing.x1.centers[a as usize].coords() == expected.as_slice(), || format!("a={a}: preset center"))?;
        ensure(!r.certificates.is_empty() && r.certificates.iter().all(|c| c.holds()), || {
            format!("a={a}: ample/free certificate failed")
        })?;
        ensure(r.passed, || format!("a={a}: expectation failed"))?;
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("a=1..50 in {:?}", start.elapsed()))
}

fn arbitrary_b2() -> Outcome {
    let start = Instant::now();
    let stages = [Stage::Hypotheses, Stage::Invariants];
    let mut runs = 0;
    for a in 1..=10i64 {
        let top = 8 * a * a + 5;
        let cs: Vec<i64> = (0..10).map(|i| 1 + i * (top - 1) / 9).collect();
        for c in cs {
            let s = preset("arbitrary_b2", &params(&[("a", a), ("c", c)])).map_err(|e| e.to_string())?;
            let r = run(&s, &stages).map_err(|e| e.to_string())?;
            let inv = r.invariants.as_ref().unwrap();
            ensure(r.hypotheses.as_ref().unwrap().d_semistable.satisfied, || format!("a={a} c={c}: not d-semistable"))?;
            ensure(inv.b2_x == (c + 3) as usize, || format!("a={a} c={c}: b2 = {}", inv.b2_x))?;
            let ex = Int::from(-224 - 32 * (8 * a * a - c));
            ensure(inv.e_x == ex, || format!("a={a} c={c}: e = {}", inv.e_x))?;
            runs += 1;
        }
        let bad = preset("arbitrary_b2", &params(&[("a", a), ("c", top + 1)]));
        ensure(bad.is_err(), || format!("a={a}: c = 8a^2+6 accepted"))?;
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("{runs} runs in {:?}", start.elapsed()))
}

fn wehler_suite() -> Outcome {
    let s = wehler_lattice();
    let step = iota(&s);
    let mut acc = Isometry::identity(&s);
    let mut compared = 0;
    for a in 0..=10i64 {
        let closed = power_closed_form(&s, a);
        for i in 0..3 {
            for j in 0..3 {
                ensure(closed.matrix().get(i, j) == acc.matrix().get(i, j), || format!("a={a}: entry ({i},{j})"))?;
                compared += 1;
            }
        }
        acc = compose(&acc, &step).map_err(|e| e.to_string())?;
    }
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        let inv = involution_pullback(&s, i, j).map_err(|e| e.to_string())?;
        let sq = compose(&inv, &inv).map_err(|e| e.to_string())?;
        ensure(sq.is_identity(), || format!("iota_{i}{j} does not square to 1"))?;
        let m = inv.matrix();
        let g = m.transpose().mul(s.gram()).and_then(|x| x.mul(m)).map_err(|e| e.to_string())?;
        ensure(&g == s.gram(), || format!("iota_{i}{j} does not preserve the form"))?;
    }
    let growth = order_and_growth(&step, 12).map_err(|e| e.to_string())?;
    ensure(growth == Growth::InfiniteWithGrowthDegree(2), || format!("growth {growth:?}"))?;
    Ok(format!("{compared} entries, involutions, growth degree 2"))
}

fn oguiso_suite() -> Outcome {
    let start = Instant::now();
    let hlm = hlm_lattice();
    let g = |i, j| hlm.gram().get(i, j).clone();
    ensure(
        g(0, 0) == int(4) && g(0, 1) == int(1) && g(0, 2) == int(1) && g(1, 1) == int(-2) && g(2, 2) == int(-2) && g(1, 2).is_zero(),
        || "H, L, M intersection data".into(),
    )?;
    let (derived, coords) = oguiso_from_hlm().map_err(|e| e.to_string())?;
    let l = oguiso_lattice();
    ensure(derived.gram() == l.gram(), || "derived (f, e, v) Gram differs".into())?;
    let h_fev = coords.mul_vec(&[int(1), int(0), int(0)]).map_err(|e| e.to_string())?;
    ensure(h_fev == vec![int(4), int(3), int(1)], || format!("h = {h_fev:?}"))?;
    let h = DivisorClass::from_i64(&l, &[4, 3, 1]).unwrap();
    for a in 1..=10i64 {
        let img = apply_isometry(&oguiso_translation(&l, a), &h).map_err(|e| e.to_string())?;
        let want = vec![int(30 * a * a + 20 * a + 4), int(3), int(3 * a + 1)];
        ensure(img.coords() == want.as_slice(), || format!("a={a}: image {:?}", img.coords()))?;
    }
    let roots = oguiso_minus_two_classes(50).map_err(|e| e.to_string())?;
    // Brute force: d = x f + y e + z v with d² = 2xy − 20z² = −2, y ≥ 1, |z| ≤ 50.
    let mut brute: Vec<[i64; 3]> = Vec::new();
    for z in -50i64..=50 {
        let n = 10 * z * z - 1;
        for y in 1..=n.abs() {
            if n % y == 0 {
                brute.push([n / y, y, z]);
            }
        }
    }
    ensure(brute.len() == roots.len(), || format!("{} classes, library found {}", brute.len(), roots.len()))?;
    for a in 1..=20i64 {
        let c = oguiso_ample_certificate(a, a, 50).map_err(|e| e.to_string())?;
        ensure(c.ample && c.is_consistent(), || format!("a={a}: ample certificate fails"))?;
        let [p, q, r] = [30 * a * a + 20 * a + 8 - a, 6, 3 * a + 2];
        let lp = oguiso_l_prime(a, a);
        ensure(lp.coords() == [int(p), int(q), int(r)].as_slice(), || format!("a={a}: l' = {:?}", lp.coords()))?;
        for [x, y, z] in &brute {
            let dot = p * y + q * x - 20 * r * z;
            ensure(dot > 0, || format!("a={a}: l'.d = {dot} for d = ({x}, {y}, {z})"))?;
        }
    }
    for a in 1..=20i64 {
        let s = preset("oguiso", &params(&[("a", a)])).map_err(|e| e.to_string())?;
        let r = run(&s, &Stage::ALL).map_err(|e| e.to_string())?;
        let inv = r.invariants.as_ref().unwrap();
        ensure(inv.b2_x == (a - 1) as usize, || format!("a={a}: b2 = {}", inv.b2_x))?;
        let v = r.projectivity.as_ref().unwrap();
        ensure(v.classification == Classification::TrivialOnly, || format!("a={a}: {:?}", v.classification))?;
        ensure(r.algdim.as_ref().unwrap().value == AlgDim::Zero, || format!("a={a}: algdim"))?;
        ensure(r.passed, || format!("a={a}: expectation failed"))?;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{} (-2)-classes, a=1..20 in {:?}", roots.len(), start.elapsed()))
}

fn dichotomy() -> Outcome {
    for a in 1..=20i64 {
        let built = build(&preset("main", &params(&[("a", a)])).unwrap()).map_err(|e| e.to_string())?;
        let v = classify(&built.gluing).map_err(|e| e.to_string())?;
        ensure(v.classification == Classification::FiberRayOnly, || format!("main a={a}: {:?}", v.classification))?;
        let w = v.witness.as_ref().ok_or_else(|| format!("main a={a}: no witness"))?;
        let shape = w.l2.len() == 3 && w.l2[0] > Int::zero() && w.l2[1].is_zero() && w.l2[2].is_zero();
        ensure(shape, || format!("main a={a}: L2 = {:?}", w.l2))?;
    }
    let built = build(&preset("identity_control", &BTreeMap::new()).unwrap()).map_err(|e| e.to_string())?;
    let v = classify(&built.gluing).map_err(|e| e.to_string())?;
    ensure(v.classification == Classification::BigPairExists, || format!("control: {:?}", v.classification))?;
    for a in 1..=5i64 {
        let built = build(&preset("oguiso", &params(&[("a", a)])).unwrap()).map_err(|e| e.to_string())?;
        let v = classify(&built.gluing).map_err(|e| e.to_string())?;
        ensure(v.classification == Classification::TrivialOnly, || format!("oguiso a={a}: {:?}", v.classification))?;
    }
    Ok("main FiberRayOnly with L2 = O(n,0,0), control big, oguiso trivial".into())
}

/// Entries of (ι^a)* written out directly.
fn iota_power(a: i64) -> [[i64; 3]; 3] {
    [[1, 4 * a * a - 2 * a, 4 * a * a + 2 * a], [0, 1 - 2 * a, -2 * a], [0, 2 * a, 1 + 2 * a]]
}

fn apply(m: &[[i64; 3]; 3], v: [i64; 3]) -> [i64; 3] {
    let mut out = [0; 3];
    for i in 0..3 {
        out[i] = (0..3).map(|j| m[i][j] * v[j]).sum();
    }
    out
}

fn double_blowup() -> Outcome {
    for a in 1..=10i64 {
        let c1 = [4 * a * a + 2, 2 - 4 * a, 2 + 4 * a];
        let c2 = apply(&iota_power(-a), c1);
        let rest = apply(&iota_power(a), [2 - c2[0], 2 - c2[1], 2 - c2[2]]);
        let total = [-12 * a * a + rest[0], 4 * a + rest[1], -4 * a + rest[2]];
        ensure(total == [0, 0, 0], || format!("a={a}: direct sum {total:?}"))?;

        let built = build(&preset("double_blowup", &params(&[("a", a)])).unwrap()).map_err(|e| e.to_string())?;
        let ds = d_semistability_check(&built.gluing);
        let n1 = vec![int(-12 * a * a), int(4 * a), int(-4 * a)];
        ensure(ds.normal_x1.coords() == n1.as_slice(), || format!("a={a}: N1 = {:?}", ds.normal_x1.coords()))?;
        ensure(ds.obstruction.is_zero() && ds.semistable, || format!("a={a}: obstruction {:?}", ds.obstruction.coords()))?;
        let c2_lib: Vec<Int> = c2.iter().map(|&x| int(x)).collect();
        ensure(built.gluing.x2.centers[0].coords() == c2_lib.as_slice(), || format!("a={a}: C2"))?;
    }
    Ok("obstruction zero for a=1..10".into())
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, r: i64) -> Vec<Int> {
    (0..n).map(|_| int(rng.gen_range(-r..=r))).collect()
}

fn random_gluing(rng: &mut ChaCha8Rng) -> GluingDescriptor {
    let s = wehler_lattice();
    let centers = |count: usize, rng: &mut ChaCha8Rng| -> Vec<DivisorClass> {
        (0..count).map(|_| DivisorClass::new(&s, random_vec(rng, 3, 6)).unwrap()).collect()
    };
    let c1 = centers(rng.gen_range(1..=4), rng);
    let c2 = centers(rng.gen_range(0..=3), rng);
    let x1 = ComponentDescriptor::new("X1", AmbientSpace::p1p1p1(&s).unwrap(), c1).unwrap();
    let x2 = ComponentDescriptor::new("X2", AmbientSpace::p1p1p1(&s).unwrap(), c2).unwrap();
    let twist = match rng.gen_range(0..3) {
        0 => power_closed_form(&s, rng.gen_range(-6..=6)),
        1 => involution_pullback(&s, 1, 1 + rng.gen_range(1..=2)).unwrap(),
        _ => Isometry::identity(&s),
    };
    GluingDescriptor::new(x1, x2, twist).unwrap()
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    // Form preservation under the registered isometries.
    let w = wehler_lattice();
    let o = oguiso_lattice();
    for case in 0..10_000 {
        let (lat, m) = match case % 4 {
            0 => (&w, power_closed_form(&w, rng.gen_range(-20..=20))),
            1 => {
                let (i, j) = [(1, 2), (1, 3), (2, 3)][rng.gen_range(0..3)];
                (&w, involution_pullback(&w, i, j).unwrap())
            }
            2 => (&w, iota(&w).power(rng.gen_range(-10..=10))),
            _ => (&o, oguiso_translation(&o, rng.gen_range(-20..=20))),
        };
        let x = random_vec(&mut rng, 3, 50);
        let y = random_vec(&mut rng, 3, 50);
        let mx = m.matrix().mul_vec(&x).unwrap();
        let my = m.matrix().mul_vec(&y).unwrap();
        ensure(lat.bilinear(&mx, &my) == lat.bilinear(&x, &y), || format!("case {case}: form not preserved"))?;
    }
    // Divisibility of squares against exhaustive enumeration.
    let cert = wehler_no_minus_two_certificate(10);
    ensure(cert.excludes_minus_two && cert.minus_two_classes_found.is_empty(), || "certificate".into())?;
    ensure(cert.classes_enumerated == 21 * 21 * 21, || "enumeration size".into())?;
    for x in -10..=10i64 {
        for y in -10..=10i64 {
            for z in -10..=10i64 {
                let sq = 4 * (x * y + y * z + z * x);
                ensure(sq != -2 && sq % 4 == 0, || format!("({x},{y},{z})"))?;
                ensure(int(sq) == w.bilinear(&[int(x), int(y), int(z)], &[int(x), int(y), int(z)]), || "square".into())?;
            }
        }
    }
    // Kernels annihilate and have the right size.
    for _ in 0..1000 {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=8);
        let m = IntMatrix::from_rows((0..rows).map(|_| random_vec(&mut rng, cols, 5)).collect()).unwrap();
        let k = integer_kernel(&m);
        ensure(k.len() == cols - integer_rank(&m), || "kernel size".into())?;
        for v in &k {
            ensure(m.mul_vec(v).unwrap().iter().all(Zero::is_zero), || format!("kernel vector {v:?}"))?;
        }
    }
    // Solve, substitute, re-check.
    for case in 0..1000 {
        let mut g = random_gluing(&mut rng);
        let component = if g.x2.centers.is_empty() || rng.gen_bool(0.5) { Component::X1 } else { Component::X2 };
        let index = rng.gen_range(0..g.component(component).centers.len());
        let slot = CenterSlot { component, index };
        let c = solve_center_class(&g, slot).map_err(|e| e.to_string())?;
        g.component_mut(component).centers[index] = c.clone();
        ensure(d_semistability_check(&g).semistable, || format!("case {case}: not semistable after solve"))?;
        let again = solve_center_class(&g, slot).map_err(|e| e.to_string())?;
        ensure(again == c, || format!("case {case}: solve not idempotent"))?;
    }
    Ok("10^4 isometry cases, |coords| <= 10 enumeration, 10^3 kernels, 10^3 solves".into())
}

fn cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_cyglue");
    let out = Command::new(bin).args(["verify", "main", "--param", "a=1"]).output().map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || format!("main a=1 exit {:?}", out.status.code()))?;
    let j: Json = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    for f in ["scenario", "parameters", "hypotheses", "invariants", "certificates", "projectivity", "algdim", "expectations"] {
        ensure(j.get(f).is_some(), || format!("missing field {f}"))?;
    }
    for f in ["b2_x0", "b2_x", "e_x1", "e_x2", "e_x0", "e_x"] {
        ensure(j["invariants"].get(f).is_some(), || format!("missing invariants.{f}"))?;
    }
    for f in ["classification", "kodaira_bound"] {
        ensure(j["projectivity"].get(f).is_some(), || format!("missing projectivity.{f}"))?;
    }
    let exps = j["expectations"].as_array().ok_or("expectations not a list")?;
    for x in exps {
        for f in ["name", "expected", "actual", "pass"] {
            ensure(x.get(f).is_some(), || format!("expectation missing {f}"))?;
        }
    }
    ensure(j["invariants"]["e_x"] == Json::from(-448), || "e_x".into())?;

    let out = Command::new(bin)
        .args(["verify", "main", "--param", "a=1", "--center", "x1:1=2,2,2"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(1), || format!("perturbed exit {:?}", out.status.code()))?;
    let j: Json = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(j["hypotheses"]["d_semistable"]["satisfied"] == Json::Bool(false), || "d-semistable flag".into())?;
    let failed = j["expectations"]
        .as_array()
        .ok_or("expectations not a list")?
        .iter()
        .any(|x| x["name"] == "d_semistable" && x["pass"] == Json::Bool(false));
    ensure(failed, || "no d-semistability failure record".into())?;

    let out = Command::new(bin)
        .args(["verify", "arbitrary_b2", "--param", "a=1", "c=14"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(2), || format!("c=14 exit {:?}", out.status.code()))?;
    Ok("exit codes 0 / 1 / 2 and report schema".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 main family", main_family),
        ("2 arbitrary b2", arbitrary_b2),
        ("3 wehler automorphisms", wehler_suite),
        ("4 oguiso", oguiso_suite),
        ("5 projectivity dichotomy", dichotomy),
        ("6 double blowup", double_blowup),
        ("7 property suites", property_suites),
        ("8 cli contract", cli),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("PASS  criterion {name}: {msg} [{:.2?}]", t.elapsed()),
            Err(msg) => {
                failures += 1;
                println!("FAIL  criterion {name}: {msg} [{:.2?}]", t.elapsed());
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
