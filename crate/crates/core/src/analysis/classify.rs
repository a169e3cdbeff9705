//! Classification of the classical ovoids `Q(X) + (b·X)^2 = 0` of `W(q)`.
//!
//! Writing `L = b·X` and `n` for the point with `B(n, X) = L(X)`, the plane
//! `L = 0` is `n^ζ`. It is tangent to `Q-(3,q)` when `Q(n) = 0`; otherwise
//! `c = sqrt(Q(n))` and in an orthogonal frame `(e1, e2, n/c, e4)` the ovoid
//! reads `X1X2 + X3^2 + X3X4 + (δ + c^2)X4^2 = 0`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{consistency, Error, Result};
use crate::gf2h::{hex, Gf2h};
use crate::ovoids::{EllipticSolid, Ovoid, OvoidKind};
use crate::projspace::{add_scaled, point_unrank, rref, scale, Subspace};
use crate::quadrics::QuadraticForm;

/// Vectors `(e1, e2, n, e4)` of `PG(3,q)` in which a form reads
/// `X1X2 + X3^2 + X3X4 + δX4^2`.
pub type OrthoFrame = [[u8; 4]; 4];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceZeroOrbits {
    pub count: usize,
    pub representatives: Vec<u8>,
    pub orbits: Vec<Vec<u8>>,
}

/// Orbits of `x -> x^2` on the nonzero elements of trace 0.
pub fn orbit_count_trace_zero(f: &Gf2h) -> TraceZeroOrbits {
    let mut seen = vec![false; f.q()];
    let mut orbits = Vec::new();
    for x in f.nonzero().filter(|&x| f.trace(x) == 0) {
        if seen[x as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut y = x;
        while !seen[y as usize] {
            seen[y as usize] = true;
            orbit.push(y);
            y = f.square(y);
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    let representatives = orbits.iter().map(|o| o[0]).collect();
    TraceZeroOrbits { count: orbits.len(), representatives, orbits }
}

pub fn frobenius_orbit_min(f: &Gf2h, x: u8) -> u8 {
    (0..f.h()).map(|k| f.frobenius(x, k)).min().unwrap_or(x)
}

/// `(q, |O ∩ Q-(3,q)|, orbit representative)`; the representative is
/// `"tangent"` or the hex Frobenius-orbit minimum of `c^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassInvariant {
    pub q: usize,
    pub intersection: usize,
    pub orbit_rep: String,
}

impl std::fmt::Display for ClassInvariant {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "(q={}, i={}, {})", self.q, self.intersection, self.orbit_rep)
    }
}

fn tangent_class(q: usize) -> ClassInvariant {
    ClassInvariant { q, intersection: 1, orbit_rep: "tangent".into() }
}

fn secant_class(f: &Gf2h, c2: u8) -> ClassInvariant {
    ClassInvariant { q: f.q(), intersection: f.q() + 1, orbit_rep: hex(frobenius_orbit_min(f, c2)) }
}

/// `x` with `x G = v` for an invertible symmetric `G`.
fn solve4(f: &Gf2h, g: &[[u8; 4]; 4], v: &[u8; 4]) -> Option<[u8; 4]> {
    let rows: Vec<[u8; 5]> = (0..4).map(|i| [g[0][i], g[1][i], g[2][i], g[3][i], v[i]]).collect();
    let red = rref(f, rows);
    if red.len() != 4 || red.iter().any(|r| r[..4] == [0; 4]) {
        return None;
    }
    Some([red[0][4], red[1][4], red[2][4], red[3][4]])
}

/// The vector `n` with `B(n, X) = b·X`.
pub fn pole_of(solid: &EllipticSolid, b: &[u8; 4]) -> Result<[u8; 4]> {
    let f = solid.field();
    let g = *solid.local_form().polarity(f).gram();
    solve4(f, &g, b).ok_or_else(|| Error::Consistency("polar form on Π is degenerate".into()))
}

/// The class of the quadric `Q(X) + (b·X)^2 = 0` read off the pole of
/// `b·X = 0`; [`Error::NotOvoid`] when the quadric is hyperbolic.
pub fn classical_invariant(solid: &EllipticSolid, b: &[u8; 4]) -> Result<ClassInvariant> {
    let f = solid.field();
    if *b == [0; 4] {
        return Err(Error::Usage("classical ovoid parameter b must be nonzero".into()));
    }
    let n = pole_of(solid, b)?;
    let qn = solid.local_form().evaluate(f, &n);
    if qn == 0 {
        return Ok(tangent_class(f.q()));
    }
    let c = f.sqrt(qn);
    if f.trace(c) == 1 {
        return Err(Error::NotOvoid(format!("b = {b:?} gives a hyperbolic quadric")));
    }
    Ok(secant_class(f, f.square(c)))
}

/// Completions `e4 = u + t·n` of `(e1, e2, n)` to an [`OrthoFrame`], with
/// `u` the first basis vector of `<e1,e2>^ζ` not orthogonal to `n`.
pub(crate) fn frame_completions(
    f: &'static Gf2h,
    form: &QuadraticForm<4>,
    delta: u8,
    line: &Subspace<4>,
    n: &[u8; 4],
) -> Option<[[u8; 4]; 2]> {
    let u = line.basis().iter().find(|u| form.bilinear(f, u, n) != 0)?;
    let u = scale(f, f.inv(form.bilinear(f, u, n)).ok()?, u);
    let t = f.artin_schreier_root(delta ^ form.evaluate(f, &u))?;
    Some([0, 1].map(|s| {
        let mut e4 = u;
        add_scaled(f, &mut e4, t ^ s, n);
        e4
    }))
}

/// Every [`OrthoFrame`] of an elliptic form, in a fixed order.
pub fn orthogonal_frames(f: &'static Gf2h, form: &QuadraticForm<4>, delta: u8) -> Vec<OrthoFrame> {
    let q = f.q();
    let pol = form.polarity(f);
    let singular: Vec<[u8; 4]> =
        (0..q * q * q + q * q + q + 1).map(|r| point_unrank::<4>(q, r)).filter(|x| form.evaluate(f, x) == 0).collect();
    let mut out = Vec::new();
    for p1 in &singular {
        for s in f.nonzero() {
            let e1 = scale(f, s, p1);
            for p2 in &singular {
                let bb = form.bilinear(f, &e1, p2);
                if bb == 0 {
                    continue;
                }
                let e2 = scale(f, f.inv(bb).expect("nonzero"), p2);
                let line = pol.perp(&Subspace::span(f, [e1, e2]));
                for n in line.point_vectors() {
                    let qn = form.evaluate(f, &n);
                    let n = scale(f, f.inv(f.sqrt(qn)).expect("anisotropic line"), &n);
                    if let Some(e4s) = frame_completions(f, form, delta, &line, &n) {
                        out.extend(e4s.map(|e4| [e1, e2, n, e4]));
                    }
                }
            }
        }
    }
    out
}

/// The frame of the module doc for a secant plane `b·X = 0`: `e1`, `e2` the
/// first two points of the conic in rank order, `e2` scaled to `B(e1,e2) = 1`,
/// `n` the pole scaled to `Q(n) = 1`, `e4` with the smaller Artin–Schreier
/// root.
pub fn canonical_frame(solid: &EllipticSolid, b: &[u8; 4]) -> Result<OrthoFrame> {
    let f = solid.field();
    let form = solid.local_form();
    let n = pole_of(solid, b)?;
    let qn = form.evaluate(f, &n);
    if qn == 0 {
        return Err(Error::Precondition("b·X = 0 is a tangent plane".into()));
    }
    let n = scale(f, f.inv(f.sqrt(qn))?, &n);
    let conic: Vec<[u8; 4]> = solid
        .base_points()
        .iter()
        .map(|p| solid.local(p.coords()))
        .filter(|x| crate::projspace::dot(f, b, x) == 0)
        .collect();
    let mut conic = conic;
    conic.sort_by_key(|x| crate::projspace::point_rank(f.q(), x));
    consistency!(conic.len() == f.q() + 1, "secant plane meets Q- in {} points", conic.len());
    let e1 = conic[0];
    let e2 = scale(f, f.inv(form.bilinear(f, &e1, &conic[1]))?, &conic[1]);
    let line = form.polarity(f).perp(&Subspace::span(f, [e1, e2]));
    let delta = f.pick_delta_trace_one();
    let [e4, _] = frame_completions(f, form, delta, &line, &n)
        .ok_or_else(|| Error::Consistency("no frame completion for the secant plane".into()))?;
    Ok([e1, e2, n, e4])
}

/// Coefficients of a form in the coordinates of `frame`, as the upper
/// triangular array of [`QuadraticForm`].
pub fn form_in_frame(f: &Gf2h, form: &QuadraticForm<4>, frame: &OrthoFrame) -> [[u8; 4]; 4] {
    let mut c = [[0u8; 4]; 4];
    for i in 0..4 {
        c[i][i] = form.evaluate(f, &frame[i]);
        for j in i + 1..4 {
            c[i][j] = form.bilinear(f, &frame[i], &frame[j]);
        }
    }
    c
}

/// Invariant of a classical ovoid, computed by carrying it into the
/// canonical frame and reading the `X4^2` coefficient.
pub fn classify_classical(solid: &EllipticSolid, o: &Ovoid) -> Result<ClassInvariant> {
    let f = solid.field();
    let b = match o.kind() {
        OvoidKind::Classical(b) => Some(b),
        OvoidKind::Base => None,
        _ => solid.fit_classical(o).filter(|b| *b != [0; 4]),
    }
    .ok_or_else(|| Error::Usage(format!("{} ovoid is not classical with b != 0", o.kind().tag())))?;
    if o.intersection_size() == 1 {
        return Ok(tangent_class(f.q()));
    }
    let frame = canonical_frame(solid, &b)?;
    let mut shifted = *solid.local_form().coeffs();
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] ^= f.square(b[i]);
    }
    let ovoid_form = QuadraticForm::new(shifted);
    let c = form_in_frame(f, &ovoid_form, &frame);
    let delta = f.pick_delta_trace_one();
    let expect = |k: [[u8; 4]; 4]| {
        (0..4).all(|i| (0..4).all(|j| i == 3 && j == 3 || i > j || c[i][j] == k[i][j]))
    };
    consistency!(
        expect([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 1, 1], [0, 0, 0, 0]]),
        "ovoid form is not canonical in its frame: {c:?}"
    );
    Ok(secant_class(f, c[3][3] ^ delta))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSweep {
    pub q: usize,
    pub parameters: usize,
    pub ovoid_parameters: usize,
    /// Each class with its parameter count and first `b` in sweep order.
    pub classes: BTreeMap<String, ClassEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub invariant: ClassInvariant,
    pub parameters: usize,
    pub first_b: Vec<String>,
}

/// Classes over every nonzero `b`.
pub fn classify_sweep(solid: &EllipticSolid) -> Result<ClassSweep> {
    let f = solid.field();
    let q = f.q();
    let mut classes: BTreeMap<String, ClassEntry> = BTreeMap::new();
    let mut parameters = 0;
    let mut ovoid_parameters = 0;
    for b in crate::ovoids::all_parameters(q) {
        parameters += 1;
        let inv = match classical_invariant(solid, &b) {
            Ok(inv) => inv,
            Err(Error::NotOvoid(_)) => continue,
            Err(e) => return Err(e),
        };
        ovoid_parameters += 1;
        classes
            .entry(inv.to_string())
            .or_insert_with(|| ClassEntry {
                invariant: inv,
                parameters: 0,
                first_b: b.iter().map(|&x| hex(x)).collect(),
            })
            .parameters += 1;
    }
    Ok(ClassSweep { q, parameters, ovoid_parameters, classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ovoids::all_parameters;

    fn solid(q: usize) -> EllipticSolid {
        EllipticSolid::new(Gf2h::with_order(q).unwrap()).unwrap()
    }

    #[test]
    fn trace_zero_orbits() {
        for (q, n) in [(2, 0), (4, 1), (8, 1), (16, 3), (32, 3)] {
            let f = Gf2h::with_order(q).unwrap();
            let o = orbit_count_trace_zero(f);
            assert_eq!(o.count, n, "q={q}");
            assert_eq!(o.orbits.iter().map(Vec::len).sum::<usize>(), q / 2 - 1);
            assert!(o.orbits.iter().all(|orb| f.h() as usize % orb.len() == 0));
        }
    }

    #[test]
    fn invariant_agrees_with_constructed_ovoids() {
        for q in [2, 4, 8] {
            let s = solid(q);
            let mut parameters = 0;
            for b in all_parameters(q) {
                match (classical_invariant(&s, &b), s.classical_ovoid(b)) {
                    (Ok(inv), Ok(o)) => {
                        parameters += 1;
                        assert_eq!(inv.intersection, o.intersection_size());
                        assert_eq!(classify_classical(&s, &o).unwrap(), inv);
                    }
                    (Err(Error::NotOvoid(_)), Err(Error::NotOvoid(_))) => {}
                    (a, b) => panic!("q={q}: {a:?} vs {:?}", b.map(|o| o.len())),
                }
            }
            assert!(parameters > 0);
        }
    }

    #[test]
    fn frames_have_canonical_gram_and_values() {
        let s = solid(4);
        let f = s.field();
        let delta = f.pick_delta_trace_one();
        let frames = orthogonal_frames(f, s.local_form(), delta);
        assert_eq!(frames.len(), 2 * 16 * 17 * 15);
        for fr in frames.iter().step_by(97) {
            let c = form_in_frame(f, s.local_form(), fr);
            assert_eq!(c, [[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 1, 1], [0, 0, 0, delta]]);
        }
    }

    #[test]
    fn sweep_counts() {
        for (q, classes) in [(2, 1), (4, 2), (8, 2)] {
            let sw = classify_sweep(&solid(q)).unwrap();
            assert_eq!(sw.classes.len(), classes, "q={q}");
        }
    }
}
