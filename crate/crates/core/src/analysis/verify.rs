use rayon::prelude::*;
use serde_json::json;

use super::report::{Check, VerificationReport};
use crate::constructions::{conic_c_x, pi_x, PointSet, Setting};
use crate::error::{Error, Result};
use crate::ovoids::{Ovoid, OvoidKind};
use crate::projspace::{Frame, ProjPoint};
use crate::quadrics::{conic_of_plane_section, fits_conic, is_arc, PlaneSection};

fn line_counts(setting: &Setting, sets: &[&PointSet]) -> Vec<Vec<u8>> {
    let m = &setting.model;
    m.lines()
        .par_iter()
        .map_init(Vec::new, |buf, &l| {
            m.line_points(l, buf);
            sets.iter().map(|s| s.count_in(buf) as u8).collect()
        })
        .collect()
}

fn line_witness(setting: &Setting, line: usize, meets: u8) -> serde_json::Value {
    let m = &setting.model;
    let mut buf = Vec::new();
    m.line_points(m.lines()[line], &mut buf);
    json!({ "line": line, "points": buf, "meets": meets })
}

/// Nonempty, every line of the quadric meets `H` in 0 or 2 points, and every
/// generator plane meets it in 0 or `q+2` points.
pub fn verify_hyperoval(setting: &Setting, h: &PointSet) -> VerificationReport {
    let q = setting.q();
    let m = &setting.model;
    let mut report = VerificationReport::new(format!("hyperoval/q={q}"));
    report.fact("size", h.len());
    report.push(Check::from_witness("nonempty", h.is_empty().then(|| json!({ "size": 0 }))));

    let counts = line_counts(setting, &[h]);
    let bad = counts.iter().position(|c| !matches!(c[0], 0 | 2));
    let secant = counts.iter().filter(|c| c[0] == 2).count();
    report.push(
        Check::from_witness("lines-meet-0-or-2", bad.map(|i| line_witness(setting, i, counts[i][0])))
            .count("lines", counts.len())
            .count("secant-lines", secant)
            .count("external-lines", counts.len() - secant),
    );

    let plane_hits: Vec<usize> = m.planes().par_iter().map(|p| h.count_in(&p.points)).collect();
    let bad = plane_hits.iter().position(|&c| c != 0 && c != q + 2);
    let disjoint = plane_hits.iter().filter(|&&c| c == 0).count();
    report.push(
        Check::from_witness("planes-meet-0-or-q+2", bad.map(|i| json!({ "plane": i, "meets": plane_hits[i] })))
            .count("disjoint-planes", disjoint)
            .count("hyperoval-planes", plane_hits.len() - disjoint),
    );
    report
}

/// The planes disjoint from `H` are exactly the planes through a point of
/// `O ∩ Q-(3,q)`.
pub fn plane_disjointness_check(setting: &Setting, h: &PointSet, o: &Ovoid) -> Check {
    let m = &setting.model;
    let on: Vec<u32> = setting.solid.intersection_with_base(o).iter().filter_map(|p| setting.index(p)).collect();
    let mut expected = vec![false; m.planes().len()];
    for &x in &on {
        for &p in m.planes_through(x) {
            expected[p as usize] = true;
        }
    }
    let disjoint: Vec<bool> = m.planes().par_iter().map(|p| h.count_in(&p.points) == 0).collect();
    let bad = (0..disjoint.len()).find(|&i| disjoint[i] != expected[i]);
    Check::from_witness(
        "disjoint-planes-are-planes-through-O∩Q-",
        bad.map(|i| json!({ "plane": i, "disjoint": disjoint[i], "through-O∩Q-": expected[i] })),
    )
    .count("planes", disjoint.len())
    .count("disjoint", disjoint.iter().filter(|&&d| d).count())
}

/// `|H| >= (q+2)(q^2+q+2)/2`.
pub fn min_size_check(q: usize, h: &PointSet) -> Check {
    let bound = (q + 2) * (q * q + q + 2) / 2;
    let c = if h.len() >= bound {
        Check::pass("size-lower-bound")
    } else {
        Check::fail("size-lower-bound", json!({ "size": h.len(), "bound": bound }))
    };
    c.count("size", h.len()).count("bound", bound)
}

/// Runtime checks of the structural steps behind `H_O`.
pub fn h_o_steps(setting: &Setting, o: &Ovoid, h: &PointSet) -> Result<VerificationReport> {
    let q = setting.q();
    let m = &setting.model;
    let f = setting.field();
    let solid = &setting.solid;
    let pol = m.polarity();
    let mut report = VerificationReport::new(format!("h-o-steps/{}/q={q}", o.kind().tag()));
    let off: Vec<ProjPoint<6>> = o.points().iter().filter(|x| !solid.on_base(x)).copied().collect();
    let on_o: Vec<u32> = solid.intersection_with_base(o).iter().filter_map(|p| setting.index(p)).collect();

    struct PerX {
        conic: Vec<u32>,
        polar_ok: bool,
        step1: Option<u32>,
        step3: Option<u32>,
    }
    let per_x: Vec<PerX> = off
        .par_iter()
        .map(|x| -> Result<PerX> {
            let conic = conic_c_x(setting, x);
            let px = pi_x(setting, x)?;
            let polar_ok = pol.perp(&px) == solid.l_star().join_vector(x.coords());
            let mut step1 = None;
            let mut step3 = None;
            for &y in &conic {
                let ay = m.tangent_hyperplane(&m.points()[y as usize])?.meet(solid.subspace());
                if ay != px && step1.is_none() {
                    step1 = Some(y);
                }
                let ok = matches!(conic_of_plane_section(m.form(), &ay)?, PlaneSection::Conic(c) if c.nucleus == *x);
                if !ok && step3.is_none() {
                    step3 = Some(y);
                }
            }
            Ok(PerX { conic, polar_ok, step1, step3 })
        })
        .collect::<Result<_>>()?;

    let bad = per_x.iter().position(|r| !r.polar_ok || r.conic.len() != q + 1);
    report.push(Check::from_witness(
        "c-x-is-polar-plane-section",
        bad.map(|i| json!({ "x": off[i], "size": per_x[i].conic.len() })),
    ));
    let bad = per_x.iter().position(|r| r.step1.is_some());
    report.push(Check::from_witness(
        "step1-tangent-hyperplane-meets-pi-in-pi-x",
        bad.map(|i| json!({ "x": off[i], "y": per_x[i].step1 })),
    ));
    let bad = per_x.iter().position(|r| r.conic.iter().any(|&y| setting.base().contains(y)));
    report.push(Check::from_witness("step2-c-x-avoids-q-", bad.map(|i| json!({ "x": off[i] }))));
    let bad = per_x.iter().position(|r| r.step3.is_some());
    report.push(Check::from_witness(
        "step3-a-y-secant-with-nucleus-x",
        bad.map(|i| json!({ "x": off[i], "y": per_x[i].step3 })),
    ));
    let conic_union = setting.set_of(per_x.iter().flat_map(|r| r.conic.iter().copied()));
    let total: usize = per_x.iter().map(|r| r.conic.len()).sum();
    report.push(Check::expect_eq("step4-c-x-pairwise-disjoint", conic_union.len(), total));
    report.push(Check::expect_eq("step5-size", h.len(), (q * q + 1 - o.intersection_size()) * (q + 2)));

    let bad = on_o
        .iter()
        .flat_map(|&x| m.planes_through(x).iter().map(move |&p| (x, p)))
        .find(|&(_, p)| h.count_in(&m.planes()[p as usize].points) != 0);
    report.push(Check::from_witness(
        "step6-planes-through-o∩q-are-disjoint",
        bad.map(|(x, p)| json!({ "point": x, "plane": p })),
    ));

    let base_minus_o = setting.base().difference(&setting.set_of(on_o.iter().copied()));
    let counts = line_counts(setting, &[setting.base(), h, &conic_union, &base_minus_o]);
    let bad = counts.iter().position(|c| c[0] == 0 && c[1] > 2);
    report.push(Check::from_witness(
        "step7-lines-off-q-meet-at-most-2",
        bad.map(|i| line_witness(setting, i, counts[i][1])),
    ));
    let bad = counts.iter().position(|c| c[3] == 1 && c[2] != 1);
    report.push(
        Check::from_witness("step8-lines-through-q-minus-o", bad.map(|i| line_witness(setting, i, counts[i][2])))
            .count("lines", counts.iter().filter(|c| c[3] == 1).count()),
    );

    let bad = base_minus_o
        .indices()
        .iter()
        .flat_map(|&x| m.planes_through(x).iter().copied())
        .find(|&p| {
            let gp = &m.planes()[p as usize];
            let hits: Vec<u32> = gp.points.iter().copied().filter(|&i| h.contains(i)).collect();
            if hits.len() != q + 2 {
                return true;
            }
            let frame = Frame::<6, 3>::new(&gp.subspace).expect("plane");
            let local: Vec<[u8; 3]> = hits.iter().map(|&i| frame.coords(m.point(i))).collect();
            !is_arc(f, &local)
        });
    report.push(Check::from_witness("step9-planes-through-q-minus-o-meet-in-hyperovals", bad.map(|p| json!({ "plane": p }))));
    Ok(report)
}

/// For `q >= 8` and classical `O`: each `(q+2)`-section of `H_O` is a conic
/// plus its nucleus, the nucleus is the unique point whose removal leaves a
/// conic, and these special points are exactly `Q-(3,q) \ O`.
pub fn regular_sections_check(setting: &Setting, h: &PointSet, o: &Ovoid) -> Result<VerificationReport> {
    let q = setting.q();
    if q < 8 {
        return Err(Error::Usage("regular sections need q >= 8".into()));
    }
    if !matches!(o.kind(), OvoidKind::Classical(_)) && setting.solid.fit_classical(o).is_none() {
        return Err(Error::Usage("regular sections need a classical ovoid".into()));
    }
    let m = &setting.model;
    let f = setting.field();
    let results: Vec<(usize, Vec<u32>)> = m
        .planes()
        .par_iter()
        .enumerate()
        .filter_map(|(pi, gp)| {
            let hits: Vec<u32> = gp.points.iter().copied().filter(|&i| h.contains(i)).collect();
            if hits.len() != q + 2 {
                return None;
            }
            let frame = Frame::<6, 3>::new(&gp.subspace).expect("plane");
            let local: Vec<[u8; 3]> = hits.iter().map(|&i| frame.coords(m.point(i))).collect();
            let special: Vec<u32> = (0..hits.len())
                .filter(|&k| {
                    let rest: Vec<[u8; 3]> =
                        local.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, x)| *x).collect();
                    fits_conic(f, &rest)
                })
                .map(|k| hits[k])
                .collect();
            Some((pi, special))
        })
        .collect();
    let mut report = VerificationReport::new(format!("regular-sections/q={q}"));
    let bad = results.iter().find(|(_, s)| s.len() != 1);
    report.push(
        Check::from_witness("unique-special-point", bad.map(|(p, s)| json!({ "plane": p, "special": s })))
            .count("planes", results.len()),
    );
    let on_o = setting.set_of(setting.solid.intersection_with_base(o).iter().filter_map(|p| setting.index(p)));
    let want = setting.base().difference(&on_o);
    let got = setting.set_of(results.iter().flat_map(|(_, s)| s.iter().copied()));
    let bad = got.indices().iter().find(|&&x| !want.contains(x));
    report.push(Check::from_witness("special-points-in-q-minus-o", bad.map(|x| json!({ "point": x }))));
    report.push(Check::expect_eq("special-points-are-q-minus-o", got.indices().to_vec(), want.indices().to_vec()));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{h_from_ovoid, h_lambda, h_q2_complement};
    use crate::ovoids::all_parameters;
    use std::sync::OnceLock;

    fn setting(q: usize) -> &'static Setting {
        static S: [OnceLock<Setting>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
        S[q.trailing_zeros() as usize - 1].get_or_init(|| Setting::new(q).unwrap())
    }

    fn classical(s: &Setting, i: usize) -> Ovoid {
        all_parameters(s.q())
            .filter_map(|b| s.solid.classical_ovoid(b).ok())
            .find(|o| o.intersection_size() == i)
            .unwrap()
    }

    #[test]
    fn q2_complement_verifies() {
        let s = setting(2);
        let h = h_q2_complement(s).unwrap();
        let r = verify_hyperoval(s, &h.points);
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(h.points.len(), 16);
        assert!(min_size_check(2, &h.points).pass);
        assert_eq!(min_size_check(2, &h.points).counts["bound"], 16);
    }

    #[test]
    fn removing_a_point_is_caught_with_a_witness() {
        let s = setting(4);
        let h = h_lambda(s, 1).unwrap();
        let broken = h.points.difference(&s.set_of([h.points.indices()[0]]));
        let r = verify_hyperoval(s, &broken);
        assert!(!r.passed());
        let c = r.check("lines-meet-0-or-2").unwrap();
        assert!(!c.pass);
        assert_eq!(c.witness.as_ref().unwrap()["meets"], 1);
    }

    #[test]
    fn h_o_passes_every_step_at_q4_and_q8() {
        for q in [4, 8] {
            let s = setting(q);
            for i in [1, q + 1] {
                let o = classical(s, i);
                let h = h_from_ovoid(s, &o).unwrap();
                assert!(verify_hyperoval(s, &h.points).passed());
                assert!(plane_disjointness_check(s, &h.points, &o).pass);
                let r = h_o_steps(s, &o, &h.points).unwrap();
                assert!(r.passed(), "{}", r.to_json());
                assert!(min_size_check(q, &h.points).pass);
            }
        }
    }

    #[test]
    fn disjointness_check_fails_for_the_wrong_ovoid() {
        let s = setting(4);
        let o1 = classical(s, 1);
        let o5 = classical(s, 5);
        let h = h_from_ovoid(s, &o1).unwrap();
        assert!(!plane_disjointness_check(s, &h.points, &o5).pass);
    }

    #[test]
    fn regular_sections_at_q8() {
        let s = setting(8);
        for i in [1, 9] {
            let o = classical(s, i);
            let h = h_from_ovoid(s, &o).unwrap();
            let r = regular_sections_check(s, &h.points, &o).unwrap();
            assert!(r.passed(), "{}", r.to_json());
        }
        let o = classical(setting(4), 1);
        let h = h_from_ovoid(setting(4), &o).unwrap();
        assert!(regular_sections_check(setting(4), &h.points, &o).is_err());
    }

    #[test]
    fn tits_sections_are_not_all_conics() {
        let s = setting(8);
        let f = s.field();
        let o = s.solid.tits_ovoid().unwrap();
        let mut non_conic = 0;
        for plane in crate::projspace::Subspace::<4>::empty(f).subspaces_through(2) {
            let pts: Vec<[u8; 4]> = plane
                .point_vectors()
                .into_iter()
                .filter(|x| o.contains_local(crate::projspace::point_rank(8, x)))
                .collect();
            if pts.len() == 9 {
                let fr = Frame::<4, 3>::new(&plane).unwrap();
                let local: Vec<[u8; 3]> = pts.iter().map(|x| fr.coords(x)).collect();
                assert!(is_arc(f, &local));
                non_conic += !fits_conic(f, &local) as usize;
            }
        }
        assert!(non_conic > 0);
    }
}
