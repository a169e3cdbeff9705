//! End-to-end acceptance suite. Each test prints one `PASS`/`FAIL` line for
//! its criterion (straight to stdout, so it shows without `--nocapture`).

use std::io::Write;
use std::sync::OnceLock;

use kleinhyp::analysis::{
    classify_sweep, kernel_span, orbit_count_trace_zero, plane_disjointness_check, recover_ovoid,
    recover_ovoid_auto, verify_hyperoval, ScanLevel,
};
use kleinhyp::constructions::{
    eq1_point_set, h_eq1, h_from_ovoid, h_lambda, h_q2_complement, sc_decompose, sc_hyperoval, ovoid_sc_set,
    PointSet, Setting,
};
use kleinhyp::gf2h::Gf2h;
use kleinhyp::ovoids::{all_parameters, Ovoid};
use kleinhyp::projspace::{Frame, Subspace};
use kleinhyp::quadrics::{oval_nucleus, plane_section_coeffs, ternary_nucleus};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const QS: [usize; 4] = [2, 4, 8, 16];

fn setting(q: usize) -> &'static Setting {
    static S: [OnceLock<Setting>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    S[q.trailing_zeros() as usize - 1].get_or_init(|| Setting::new(q).expect("supported q"))
}

fn outcome(criterion: usize, title: &str, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {criterion} [{status}] {title}");
    for f in failures.iter().take(10) {
        let _ = writeln!(out, "    {f}");
    }
    assert!(failures.is_empty(), "criterion {criterion} failed: {failures:?}");
}

/// Classical ovoids used for the per-ovoid criteria: every parameter for
/// `q <= 8`; at `q = 16` the first parameter of each class plus 24 seeded
/// random parameters.
fn classical_ovoids(s: &Setting) -> Vec<Ovoid> {
    let q = s.q();
    if q <= 8 {
        return all_parameters(q).filter_map(|b| s.solid.classical_ovoid(b).ok()).collect();
    }
    let sweep = classify_sweep(&s.solid).unwrap();
    let f = s.field();
    let mut out: Vec<Ovoid> = sweep
        .classes
        .values()
        .map(|e| {
            let b: Vec<u8> = e.first_b.iter().map(|x| f.parse_hex(x).unwrap()).collect();
            s.solid.classical_ovoid([b[0], b[1], b[2], b[3]]).unwrap()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    while out.len() < sweep.classes.len() + 24 {
        let b: [u8; 4] = std::array::from_fn(|_| rng.gen_range(0..q as u8));
        if let Ok(o) = s.solid.classical_ovoid(b) {
            out.push(o);
        }
    }
    out
}

fn failed(report: &kleinhyp::analysis::VerificationReport) -> Option<String> {
    report.failures().next().map(|c| format!("{} {:?}", c.name, c.witness))
}

#[test]
fn criterion_1_sizes() {
    let mut fails = Vec::new();
    let s2 = setting(2);
    let h = h_q2_complement(s2).unwrap();
    if h.points.len() != 16 || !verify_hyperoval(s2, &h.points).passed() {
        fails.push(format!("q=2 complement: {} points", h.points.len()));
    }
    for q in QS {
        let s = setting(q);
        let ovoids = classical_ovoids(s);
        for i in [1, q + 1] {
            let Some(o) = ovoids.iter().find(|o| o.intersection_size() == i) else {
                if !(q == 2 && i == 3) {
                    fails.push(format!("q={q}: no classical ovoid with intersection {i}"));
                }
                continue;
            };
            let want = (q * q + 1 - i) * (q + 2);
            let h = h_from_ovoid(s, o).unwrap();
            let r = verify_hyperoval(s, &h.points);
            if h.points.len() != want || !r.passed() {
                fails.push(format!("q={q} i={i}: {} points, want {want}, {:?}", h.points.len(), failed(&r)));
            }
        }
    }
    let sizes: Vec<(usize, usize)> = [(4, 96), (4, 72), (8, 640), (8, 560), (16, 4608), (16, 4320)].to_vec();
    for (q, n) in sizes {
        let i = if n == q * q * (q + 2) { 1 } else { q + 1 };
        if (q * q + 1 - i) * (q + 2) != n {
            fails.push(format!("size formula at q={q} does not give {n}"));
        }
    }
    outcome(1, "hyperoval sizes 16; 96/72; 640/560; 4608/4320 with full line scans", &fails);
}

#[test]
fn criterion_2_every_line_meets_in_0_or_2() {
    let mut fails = Vec::new();
    let mut checked = 0;
    for q in QS {
        let s = setting(q);
        let mut sets: Vec<(String, PointSet)> = Vec::new();
        if q == 2 {
            sets.push(("q=2 complement".into(), h_q2_complement(s).unwrap().points));
        } else {
            for l in s.field().nonzero() {
                sets.push((format!("q={q} H_lambda({l:x})"), h_lambda(s, l).unwrap().points));
            }
        }
        for o in classical_ovoids(s) {
            sets.push((format!("q={q} H_O {:?}", o.kind()), h_from_ovoid(s, &o).unwrap().points));
        }
        if q == 8 {
            sets.push(("q=8 H_O tits".into(), h_from_ovoid(s, &s.solid.tits_ovoid().unwrap()).unwrap().points));
        }
        for (name, h) in sets {
            checked += 1;
            let r = verify_hyperoval(s, &h);
            if let Some(f) = failed(&r) {
                fails.push(format!("{name}: {f}"));
            }
        }
    }
    let _ = writeln!(std::io::stdout().lock(), "    {checked} hyperovals scanned line by line");
    outcome(2, "every line of Q+(5,q) meets each H_lambda and H_O in 0 or 2 points", &fails);
}

#[test]
fn criterion_3_disjoint_planes() {
    let mut fails = Vec::new();
    for q in QS {
        let s = setting(q);
        let mut ovoids = classical_ovoids(s);
        if q == 8 {
            ovoids.push(s.solid.tits_ovoid().unwrap());
        }
        for o in ovoids {
            let h = h_from_ovoid(s, &o).unwrap();
            let c = plane_disjointness_check(s, &h.points, &o);
            if !c.pass {
                fails.push(format!("q={q} {:?}: {:?}", o.kind(), c.witness));
            }
        }
    }
    outcome(3, "planes disjoint from H_O are exactly the planes through O ∩ Q-(3,q)", &fails);
}

#[test]
fn criterion_4_classification_counts() {
    let mut fails = Vec::new();
    for (q, classes, n) in [(2, 1, 0), (4, 2, 1), (8, 2, 1), (16, 4, 3)] {
        let f = Gf2h::with_order(q).unwrap();
        let orbits = orbit_count_trace_zero(f);
        if orbits.count != n {
            fails.push(format!("q={q}: {} trace-zero orbits, want {n}", orbits.count));
        }
        let sweep = classify_sweep(&setting(q).solid).unwrap();
        if sweep.classes.len() != classes || sweep.classes.len() != orbits.count + 1 {
            fails.push(format!("q={q}: {} classes {:?}", sweep.classes.len(), sweep.classes.keys()));
        }
    }
    outcome(4, "classes 1/2/2/4 and trace-zero orbit counts 0/1/1/3 for q = 2/4/8/16", &fails);
}

#[test]
fn criterion_5_construction_routes_agree() {
    let mut fails = Vec::new();
    for q in [4, 8] {
        let s = setting(q);
        for l in s.field().nonzero() {
            let hl = h_lambda(s, l).unwrap().points;
            let x = eq1_point_set(s, l).unwrap();
            let dec = sc_decompose(s, &x).unwrap();
            let he = sc_hyperoval(s, &dec, &x).unwrap();
            let (o, route) = recover_ovoid_auto(s, &hl, None).unwrap();
            let ho = h_from_ovoid(s, &o).unwrap().points;
            if he.indices() != hl.indices() || ho.indices() != hl.indices() {
                fails.push(format!(
                    "q={q} λ={l:x}: eq1 {} / h_lambda {} / recovered ({route:?}) {}",
                    he.len(),
                    hl.len(),
                    ho.len()
                ));
            }
        }
    }
    outcome(5, "sc_hyperoval(eq1) = h_lambda = h_from_ovoid(recovered O) for q in {4,8}, all λ", &fails);
}

#[test]
fn criterion_6_tits_ovoid() {
    let mut fails = Vec::new();
    let s = setting(8);
    let q = 8;
    let o = s.solid.tits_ovoid().unwrap();
    if let Some(f) = failed(&s.solid.validate_ovoid(&o)) {
        fails.push(format!("W(8) ovoid: {f}"));
    }
    let i = o.intersection_size();
    if i > (q * q - q) / 2 {
        fails.push(format!("|O ∩ Q-| = {i} exceeds {}", (q * q - q) / 2));
    }
    let h = h_from_ovoid(s, &o).unwrap();
    if h.points.len() != (q * q + 1 - i) * (q + 2) {
        fails.push(format!("|H| = {} for i = {i}", h.points.len()));
    }
    if let Some(f) = failed(&verify_hyperoval(s, &h.points)) {
        fails.push(f);
    }
    let c = plane_disjointness_check(s, &h.points, &o);
    if !c.pass {
        fails.push(format!("plane disjointness {:?}", c.witness));
    }
    let span = kernel_span(s, &h.points, ScanLevel::Sample, 100_000, 0);
    if span.k != *s.solid.subspace() {
        fails.push(format!("K has projective dimension {} and is not Π", span.projdim()));
    }
    let _ = writeln!(
        std::io::stdout().lock(),
        "    |O ∩ Q-| = {i}, |H| = {}, planes scanned {}, U planes {}",
        h.points.len(),
        span.planes_scanned,
        span.u_planes
    );
    match recover_ovoid(s, &h.points, &span) {
        Ok(back) if back.same_points(&o) => {}
        Ok(_) => fails.push("recovered ovoid differs".into()),
        Err(e) => fails.push(format!("recovery: {e}")),
    }
    outcome(6, "Tits ovoid at q=8: W(8) ovoid, H_O checks, size formula, K = Π, recovery", &fails);
}

fn run_property<S: Strategy>(
    runner: &mut TestRunner,
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
    fails: &mut Vec<String>,
) {
    if let Err(e) = runner.run(&strategy, test) {
        fails.push(format!("{name}: {e}"));
    }
}

#[test]
fn criterion_7_property_suites() {
    let mut fails = Vec::new();
    let mut runner = TestRunner::new(Config { cases: 512, failure_persistence: None, ..Config::default() });
    let fields: Vec<&'static Gf2h> = (1..=5).map(|h| Gf2h::get(h).unwrap()).collect();
    let field = move |i: usize| fields[i % 5];
    let elems = (0usize..5, any::<u8>(), any::<u8>(), any::<u8>());

    run_property(
        &mut runner,
        "field axioms",
        elems.clone(),
        |(i, a, b, c)| {
            let f = field(i);
            let m = (f.q() - 1) as u8;
            let (a, b, c) = (a & m, b & m, c & m);
            prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, a), 0);
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            prop_assert_eq!(f.square(f.add(a, b)), f.add(f.square(a), f.square(b)));
            Ok(())
        },
        &mut fails,
    );

    for h in 1..=5 {
        let f = Gf2h::get(h).unwrap();
        let zero = f.elements().filter(|&x| f.trace(x) == 0).count();
        if zero != f.q() / 2 {
            fails.push(format!("q={}: {zero} elements of trace 0", f.q()));
        }
    }

    run_property(
        &mut runner,
        "Artin–Schreier criterion",
        (0usize..5, any::<u8>()),
        |(i, d)| {
            let f = field(i);
            let d = d & (f.q() - 1) as u8;
            let solvable = f.elements().any(|x| f.square(x) ^ x == d);
            prop_assert_eq!(solvable, f.trace(d) == 0);
            prop_assert_eq!(f.artin_schreier_root(d).is_some(), solvable);
            Ok(())
        },
        &mut fails,
    );

    let plane_rows = (0usize..3, prop::array::uniform3(prop::array::uniform6(any::<u8>())));
    run_property(
        &mut runner,
        "nucleus concurrency",
        plane_rows.clone(),
        |(i, rows)| {
            let s = setting([2, 4, 8][i]);
            let f = s.field();
            let m = (f.q() - 1) as u8;
            let rows = rows.map(|r| r.map(|x| x & m));
            let plane = Subspace::span(f, rows);
            prop_assume!(plane.rank() == 3);
            let c = plane_section_coeffs(s.model.form(), f, plane.basis());
            let Some(n) = ternary_nucleus(f, &c) else { return Ok(()) };
            let frame = Frame::<6, 3>::new(&plane).unwrap();
            let nv = frame.vector(&n);
            let conic: Vec<[u8; 6]> =
                plane.point_vectors().into_iter().filter(|v| s.model.form().evaluate(f, v) == 0).collect();
            prop_assert_eq!(conic.len(), f.q() + 1);
            for p in &conic {
                prop_assert_eq!(s.model.form().bilinear(f, p, &nv), 0, "tangent at {:?} misses the nucleus", p);
            }
            let local: Vec<[u8; 3]> = conic.iter().map(|v| frame.coords(v)).collect();
            let by_tangents = oval_nucleus(f, &local).map(|x| kleinhyp::projspace::normalize(f, &x));
            prop_assert_eq!(by_tangents, Some(kleinhyp::projspace::normalize(f, &n)));
            Ok(())
        },
        &mut fails,
    );

    let two_spans = (0usize..5, prop::collection::vec(prop::array::uniform6(any::<u8>()), 0..5), prop::collection::vec(prop::array::uniform6(any::<u8>()), 0..5));
    run_property(
        &mut runner,
        "modular dimension law",
        two_spans,
        |(i, a, b)| {
            let f = field(i);
            let m = (f.q() - 1) as u8;
            let u = Subspace::span(f, a.into_iter().map(|r| r.map(|x| x & m)));
            let w = Subspace::span(f, b.into_iter().map(|r| r.map(|x| x & m)));
            prop_assert_eq!(u.rank() + w.rank(), u.join(&w).rank() + u.meet(&w).rank());
            Ok(())
        },
        &mut fails,
    );

    let mut identities = 0;
    for q in [2, 4, 8] {
        let s = setting(q);
        let mut xs: Vec<PointSet> = Vec::new();
        if q >= 4 {
            xs.extend(s.field().nonzero().map(|l| eq1_point_set(s, l).unwrap()));
        }
        xs.extend(classical_ovoids(s).iter().map(|o| ovoid_sc_set(s, o)));
        if q == 8 {
            xs.push(ovoid_sc_set(s, &s.solid.tits_ovoid().unwrap()));
        }
        for x in xs {
            let dec = sc_decompose(s, &x).unwrap();
            let h = sc_hyperoval(s, &dec, &x).unwrap();
            for (k, (got, want)) in dec.size_identities(q, &x, &h).into_iter().enumerate() {
                identities += 1;
                if got != want {
                    fails.push(format!("q={q}: size identity {k}: {got} != {want}"));
                }
            }
        }
    }
    let (_, dec) = h_eq1(setting(4), 1).unwrap();
    if dec.planes_c.is_empty() || dec.planes_s.is_empty() {
        fails.push("eq1 set at q=4 lacks one of the plane types".into());
    }
    let _ = writeln!(std::io::stdout().lock(), "    {identities} (SC) size identities checked");
    outcome(7, "field axioms, trace counts, Artin–Schreier, nucleus concurrency, dimension law, (SC) sizes", &fails);
}
