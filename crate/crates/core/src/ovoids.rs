//! Ovoids of `W(q)` inside the elliptic solid `Π` of the Klein quadric.
//!
//! `Π` is the solid `X5 = X6, X3 + X4 + ωX5 = 0` with `ω` the smallest element
//! making `X^2 + ωX + 1` irreducible. Points of `Π` are handled in the local
//! coordinates of the echelon frame of `Π`; `W(q)` is the symplectic
//! quadrangle of the polar form of the Klein quadric restricted to `Π`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::report::{Check, VerificationReport};
use crate::error::{consistency, Error, Result};
use crate::gf2h::{hex, FieldSpec, Gf2h};
use crate::projspace::{add_scaled, count_points, point_rank, point_unrank, rref, Frame, ProjPoint, Subspace};
use crate::quadrics::{QuadraticForm, SolidSection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OvoidKind {
    /// `Π ∩ Q+(5,q)` itself.
    Base,
    /// `Q(v) + (b·X)^2 = 0` in the frame coordinates `X` of `Π`.
    Classical([u8; 4]),
    /// Carried into `Π` from a Suzuki–Tits ovoid; may be untagged classical
    /// when a loaded point set turns out to be a quadric.
    Tits,
    /// Loaded from a file without a recognised family.
    Unknown,
}

impl OvoidKind {
    pub fn tag(&self) -> &'static str {
        match self {
            OvoidKind::Base => "base",
            OvoidKind::Classical(_) => "classical",
            OvoidKind::Tits => "tits",
            OvoidKind::Unknown => "unknown",
        }
    }
}

/// `q^2 + 1` points of `Π`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ovoid {
    field: &'static Gf2h,
    kind: OvoidKind,
    points: Vec<ProjPoint<6>>,
    mask: Vec<bool>,
    intersection: usize,
}

impl Ovoid {
    pub fn field(&self) -> &'static Gf2h {
        self.field
    }

    pub fn kind(&self) -> OvoidKind {
        self.kind
    }

    pub fn points(&self) -> &[ProjPoint<6>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &ProjPoint<6>) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// Membership by local rank in `Π`.
    #[inline]
    pub fn contains_local(&self, rank: usize) -> bool {
        self.mask[rank]
    }

    /// `|O ∩ Q-(3,q)|`.
    pub fn intersection_size(&self) -> usize {
        self.intersection
    }

    pub fn same_points(&self, other: &Ovoid) -> bool {
        self.points == other.points
    }
}

/// The solid `Π` with everything derived from it: frame, restricted form,
/// `L* = Π^ζ`, `p*`, and the lines of `PG(3,q)` split into `W(q)` lines and
/// hyperbolic lines (as local point ranks).
pub struct EllipticSolid {
    field: &'static Gf2h,
    omega: u8,
    frame: Frame<6, 4>,
    form: QuadraticForm<4>,
    klein: QuadraticForm<6>,
    base_mask: Vec<bool>,
    base_points: Vec<ProjPoint<6>>,
    l_star: Subspace<6>,
    p_star: ProjPoint<6>,
    wq_lines: Vec<Vec<u32>>,
    hyperbolic_lines: Vec<Vec<u32>>,
}

impl std::fmt::Debug for EllipticSolid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EllipticSolid(q={}, ω={})", self.field.q(), hex(self.omega))
    }
}

impl EllipticSolid {
    pub fn new(field: &'static Gf2h) -> Result<Self> {
        let f = field;
        let q = f.q();
        let omega = f.pick_omega_irreducible();
        let pi = Subspace::kernel_of(f, [[0, 0, 0, 0, 1, 1], [0, 0, 1, 1, omega, 0]]);
        let frame = Frame::<6, 4>::new(&pi)?;
        let klein = QuadraticForm::klein();
        let form = klein.restrict(f, &frame);
        let n = count_points(q, 4);
        let mut base_mask = vec![false; n];
        let mut base_points = Vec::with_capacity(q * q + 1);
        for (r, m) in base_mask.iter_mut().enumerate() {
            let x = point_unrank::<4>(q, r);
            if form.evaluate(f, &x) == 0 {
                *m = true;
                base_points.push(ProjPoint::new(f, frame.vector(&x))?);
            }
        }
        base_points.sort_unstable();
        consistency!(base_points.len() == q * q + 1, "Π meets the quadric in {} points", base_points.len());
        let l_star = klein.polarity(f).perp(&pi);
        consistency!(l_star.rank() == 2 && l_star.meet(&pi).is_empty(), "L* is not a line disjoint from Π");
        let p_star = ProjPoint::new(f, [1, 0, 0, 0, 0, 0])?;
        consistency!(base_points.binary_search(&p_star).is_ok(), "p* is not on Q-(3,q)");
        let mut wq_lines = Vec::with_capacity((q + 1) * (q * q + 1));
        let mut hyperbolic_lines = Vec::new();
        for line in Subspace::<4>::empty(f).subspaces_through(1) {
            let ranks: Vec<u32> = line.point_vectors().iter().map(|x| point_rank(q, x) as u32).collect();
            if form.bilinear(f, &line.basis()[0], &line.basis()[1]) == 0 {
                wq_lines.push(ranks);
            } else {
                hyperbolic_lines.push(ranks);
            }
        }
        consistency!(
            wq_lines.len() == (q + 1) * (q * q + 1),
            "W({q}) has {} lines",
            wq_lines.len()
        );
        Ok(Self {
            field,
            omega,
            frame,
            form,
            klein,
            base_mask,
            base_points,
            l_star,
            p_star,
            wq_lines,
            hyperbolic_lines,
        })
    }

    #[inline]
    pub fn field(&self) -> &'static Gf2h {
        self.field
    }

    pub fn omega(&self) -> u8 {
        self.omega
    }

    pub fn subspace(&self) -> &Subspace<6> {
        self.frame.subspace()
    }

    pub fn frame(&self) -> &Frame<6, 4> {
        &self.frame
    }

    /// The Klein form written in the frame coordinates of `Π`.
    pub fn local_form(&self) -> &QuadraticForm<4> {
        &self.form
    }

    pub fn l_star(&self) -> &Subspace<6> {
        &self.l_star
    }

    pub fn p_star(&self) -> &ProjPoint<6> {
        &self.p_star
    }

    /// `Q-(3,q)` as sorted points.
    pub fn base_points(&self) -> &[ProjPoint<6>] {
        &self.base_points
    }

    #[inline]
    pub fn on_base(&self, p: &ProjPoint<6>) -> bool {
        self.base_points.binary_search(p).is_ok()
    }

    pub fn wq_lines(&self) -> &[Vec<u32>] {
        &self.wq_lines
    }

    pub fn hyperbolic_lines(&self) -> &[Vec<u32>] {
        &self.hyperbolic_lines
    }

    #[inline]
    pub fn local(&self, v: &[u8; 6]) -> [u8; 4] {
        self.frame.coords(v)
    }

    /// Local rank of a point known to lie in `Π`.
    #[inline]
    pub fn local_rank(&self, p: &ProjPoint<6>) -> usize {
        point_rank(self.field.q(), &self.local(p.coords()))
    }

    pub fn lift(&self, x: &[u8; 4]) -> Result<ProjPoint<6>> {
        ProjPoint::new(self.field, self.frame.vector(x))
    }

    pub fn section_type(&self) -> Result<SolidSection> {
        crate::quadrics::classify_solid_section(&self.klein, self.subspace())
    }

    fn ovoid_from_mask(&self, kind: OvoidKind, mask: Vec<bool>) -> Result<Ovoid> {
        let q = self.field.q();
        let mut points = Vec::with_capacity(q * q + 1);
        let mut intersection = 0;
        for (r, &m) in mask.iter().enumerate() {
            if m {
                points.push(self.lift(&point_unrank::<4>(q, r))?);
                intersection += self.base_mask[r] as usize;
            }
        }
        points.sort_unstable();
        Ok(Ovoid { field: self.field, kind, points, mask, intersection })
    }

    /// Builds an ovoid record from arbitrary points of `Π`; no validation.
    pub fn ovoid_from_points(&self, kind: OvoidKind, points: &[ProjPoint<6>]) -> Result<Ovoid> {
        let mut mask = vec![false; self.base_mask.len()];
        for p in points {
            if !self.subspace().contains(p) {
                return Err(Error::Domain(format!("{p:?} is not a point of Π")));
            }
            mask[self.local_rank(p)] = true;
        }
        self.ovoid_from_mask(kind, mask)
    }

    pub fn base_ovoid(&self) -> Result<Ovoid> {
        self.ovoid_from_mask(OvoidKind::Base, self.base_mask.clone())
    }

    /// The quadric `Q(v) + (b·X)^2 = 0` of `Π`. It shares its polar form with
    /// the base quadric; when it is hyperbolic rather than elliptic the
    /// result is [`Error::NotOvoid`].
    pub fn classical_ovoid(&self, b: [u8; 4]) -> Result<Ovoid> {
        let f = self.field;
        let q = f.q();
        if b == [0; 4] {
            return Err(Error::Usage("classical ovoid parameter b must be nonzero".into()));
        }
        if b.iter().any(|&x| x as usize >= q) {
            return Err(Error::Usage(format!("parameter {b:?} is not over GF({q})")));
        }
        let mask: Vec<bool> = (0..self.base_mask.len())
            .map(|r| {
                let x = point_unrank::<4>(q, r);
                let l = crate::projspace::dot(f, &b, &x);
                self.form.evaluate(f, &x) == f.square(l)
            })
            .collect();
        let n = mask.iter().filter(|&&m| m).count();
        if n != q * q + 1 {
            return Err(Error::NotOvoid(format!(
                "b = [{}] gives a quadric with {n} points",
                b.iter().map(|&x| hex(x)).collect::<Vec<_>>().join(",")
            )));
        }
        self.ovoid_from_mask(OvoidKind::Classical(b), mask)
    }

    /// Recovers `b` with `O = {Q(v) + (b·X)^2 = 0}` if `O` is such a quadric;
    /// the base quadric gives `b = 0`.
    pub fn fit_classical(&self, o: &Ovoid) -> Option<[u8; 4]> {
        let f = self.field;
        let q = f.q();
        let rows: Vec<[u8; 5]> = o
            .points
            .iter()
            .map(|p| {
                let x = self.local(p.coords());
                let s = f.sqrt(self.form.evaluate(f, &x));
                [x[0], x[1], x[2], x[3], s]
            })
            .collect();
        let red = rref(f, rows);
        if red.iter().any(|r| r[..4] == [0; 4]) {
            return None;
        }
        let matches = |b: [u8; 4]| {
            if b == [0; 4] {
                o.points == self.base_points
            } else {
                self.classical_ovoid(b).map(|c| c.points == o.points).unwrap_or(false)
            }
        };
        if red.len() == 4 {
            let b = [red[0][4], red[1][4], red[2][4], red[3][4]];
            return matches(b).then_some(b);
        }
        // underdetermined: only possible for very small q
        (0..q.pow(4)).map(|i| std::array::from_fn(|k| ((i / q.pow(k as u32)) % q) as u8)).find(|&b| matches(b))
    }

    /// The Suzuki–Tits ovoid `{(0,1,0,0)} ∪ {(1, xy + x^(σ+2) + y^σ, x, y)}`,
    /// `σ = 2^((h+1)/2)`, carried into `Π` by a map taking the symplectic
    /// frame of `X0Y1 + X1Y0 + X2Y3 + X3Y2` to a symplectic frame of `Π`.
    pub fn tits_ovoid(&self) -> Result<Ovoid> {
        let f = self.field;
        let h = f.h();
        if h < 3 || h % 2 == 0 {
            return Err(Error::Usage(format!("Tits ovoids need odd h >= 3, got q = {}", f.q())));
        }
        let s = (h + 1) / 2;
        let frame = self.symplectic_frame()?;
        let map = |a: [u8; 4]| {
            let mut v = [0u8; 4];
            for (c, e) in a.iter().zip(&frame) {
                add_scaled(f, &mut v, *c, e);
            }
            v
        };
        let q = f.q();
        let mut mask = vec![false; self.base_mask.len()];
        let mut put = |a: [u8; 4]| -> Result<()> {
            let v = crate::projspace::normalize(f, &map(a))
                .ok_or_else(|| Error::Consistency("symplectic frame is singular".into()))?;
            mask[point_rank(q, &v)] = true;
            Ok(())
        };
        put([0, 1, 0, 0])?;
        for x in f.elements() {
            let x_s2 = f.mul(f.frobenius(x, s), f.square(x));
            for y in f.elements() {
                put([1, f.mul(x, y) ^ x_s2 ^ f.frobenius(y, s), x, y])?;
            }
        }
        let n = mask.iter().filter(|&&m| m).count();
        consistency!(n == q * q + 1, "Tits ovoid has {n} points after alignment");
        self.ovoid_from_mask(OvoidKind::Tits, mask)
    }

    /// `e1, f1, e2, f2` with `B(e_i, f_i) = 1` and all other pairs orthogonal.
    pub fn symplectic_frame(&self) -> Result<[[u8; 4]; 4]> {
        let f = self.field;
        let b = |u: &[u8; 4], v: &[u8; 4]| self.form.bilinear(f, u, v);
        let unit = |i: usize| -> [u8; 4] { std::array::from_fn(|k| (k == i) as u8) };
        let mut pool: Vec<[u8; 4]> = (0..4).map(unit).collect();
        let mut out = Vec::with_capacity(4);
        while let Some(e) = pool.first().copied() {
            pool.remove(0);
            let j = pool
                .iter()
                .position(|v| b(&e, v) != 0)
                .ok_or_else(|| Error::Consistency("degenerate polar form on Π".into()))?;
            let g = pool.remove(j);
            let g = crate::projspace::scale(f, f.inv_nz(b(&e, &g)), &g);
            for v in pool.iter_mut() {
                let (cf, ce) = (b(v, &g), b(v, &e));
                add_scaled(f, v, cf, &e);
                add_scaled(f, v, ce, &g);
            }
            out.push(e);
            out.push(g);
        }
        consistency!(out.len() == 4, "symplectic frame has {} vectors", out.len());
        Ok([out[0], out[1], out[2], out[3]])
    }

    /// An ovoid from points of `Π`, tagged base, classical with its fitted
    /// `b`, or unknown.
    pub fn ovoid_fitted(&self, points: &[ProjPoint<6>]) -> Result<Ovoid> {
        let o = self.ovoid_from_points(OvoidKind::Unknown, points)?;
        let kind = match self.fit_classical(&o) {
            Some([0, 0, 0, 0]) => OvoidKind::Base,
            Some(b) => OvoidKind::Classical(b),
            None => return Ok(o),
        };
        Ok(Ovoid { kind, ..o })
    }

    /// `O ∩ Q-(3,q)`.
    pub fn intersection_with_base(&self, o: &Ovoid) -> Vec<ProjPoint<6>> {
        o.points.iter().filter(|p| self.on_base(p)).copied().collect()
    }

    /// Size `q^2+1`, every `W(q)` line meets `O` once, every other line of
    /// `Π` meets it in 0 or 2 points.
    pub fn validate_ovoid(&self, o: &Ovoid) -> VerificationReport {
        let q = self.field.q();
        let mut report = VerificationReport::new(format!("ovoid/{}/q={q}", o.kind.tag()));
        report.push(Check::expect_eq("size", o.len(), q * q + 1));
        let meets = |l: &Vec<u32>| l.iter().filter(|&&r| o.mask[r as usize]).count();
        let bad_wq = self.wq_lines.par_iter().enumerate().find_first(|(_, l)| meets(l) != 1);
        report.push(
            Check::from_witness(
                "wq-lines-meet-once",
                bad_wq.map(|(i, l)| json!({ "line": i, "meets": meets(l) })),
            )
            .count("lines", self.wq_lines.len()),
        );
        let bad_hyp = self
            .hyperbolic_lines
            .par_iter()
            .enumerate()
            .find_first(|(_, l)| !matches!(meets(l), 0 | 2));
        report.push(
            Check::from_witness(
                "hyperbolic-lines-meet-0-or-2",
                bad_hyp.map(|(i, l)| json!({ "line": i, "meets": meets(l) })),
            )
            .count("lines", self.hyperbolic_lines.len()),
        );
        report.fact("intersection-with-base", o.intersection);
        report
    }
}

/// Ovoid file contents.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OvoidFile {
    pub field: FieldSpec,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
    pub points: Vec<ProjPoint<6>>,
}

impl OvoidFile {
    pub fn from_ovoid(o: &Ovoid) -> Self {
        let b = match o.kind {
            OvoidKind::Classical(b) => Some(b.iter().map(|&x| hex(x)).collect()),
            _ => None,
        };
        Self { field: o.field.spec(), kind: o.kind.tag().to_string(), b, points: o.points.clone() }
    }

    pub fn into_ovoid(self, solid: &EllipticSolid) -> Result<Ovoid> {
        if self.field != solid.field().spec() {
            return Err(Error::Usage(format!("ovoid file is over {:?}", self.field)));
        }
        let kind = match (self.kind.as_str(), &self.b) {
            ("base", _) => OvoidKind::Base,
            ("tits", _) => OvoidKind::Tits,
            ("classical", Some(b)) if b.len() == 4 => {
                let mut out = [0u8; 4];
                for (o, s) in out.iter_mut().zip(b) {
                    *o = solid.field().parse_hex(s)?;
                }
                OvoidKind::Classical(out)
            }
            _ => OvoidKind::Unknown,
        };
        solid.ovoid_from_points(kind, &self.points)
    }
}

/// Every nonzero `b` over `GF(q)` in increasing base-`q` order.
pub fn all_parameters(q: usize) -> impl Iterator<Item = [u8; 4]> {
    (1..q.pow(4)).map(move |i| std::array::from_fn(|k| ((i / q.pow(k as u32)) % q) as u8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn solid(q: usize) -> EllipticSolid {
        EllipticSolid::new(Gf2h::with_order(q).unwrap()).unwrap()
    }

    #[test]
    fn base_ovoid_shapes() {
        for q in [2, 4, 8, 16] {
            let s = solid(q);
            assert_eq!(s.section_type().unwrap(), SolidSection::Elliptic);
            let o = s.base_ovoid().unwrap();
            assert_eq!(o.len(), q * q + 1);
            assert!(o.contains(s.p_star()));
            assert!(s.validate_ovoid(&o).passed());
            assert_eq!(s.wq_lines().len(), (q + 1) * (q * q + 1));
            assert_eq!(s.intersection_with_base(&o).len(), q * q + 1);
            assert!(s.l_star().meet(s.subspace()).is_empty());
        }
    }

    #[test]
    fn wq_is_a_generalized_quadrangle_of_order_q() {
        for q in [2, 4] {
            let s = solid(q);
            let mut on = vec![0; count_points(q, 4)];
            for l in s.wq_lines() {
                assert_eq!(l.len(), q + 1);
                let base_hits = l.iter().filter(|&&r| s.base_mask[r as usize]).count();
                assert_eq!(base_hits, 1);
                for &r in l {
                    on[r as usize] += 1;
                }
            }
            assert!(on.iter().all(|&c| c == q + 1));
        }
    }

    #[test]
    fn deleting_a_point_breaks_validation() {
        let s = solid(4);
        let o = s.base_ovoid().unwrap();
        let broken = s.ovoid_from_points(OvoidKind::Unknown, &o.points()[1..]).unwrap();
        let r = s.validate_ovoid(&broken);
        assert!(!r.passed());
        assert!(r.failures().all(|c| c.witness.is_some()));
    }

    #[test]
    fn classical_intersections_are_one_or_q_plus_one() {
        for q in [2, 4, 8] {
            let s = solid(q);
            let mut sizes = HashSet::new();
            let mut rejected = 0;
            for b in all_parameters(q) {
                match s.classical_ovoid(b) {
                    Ok(o) => {
                        sizes.insert(o.intersection_size());
                        if q <= 4 {
                            assert!(s.validate_ovoid(&o).passed());
                        }
                    }
                    Err(Error::NotOvoid(_)) => rejected += 1,
                    Err(e) => panic!("{e}"),
                }
            }
            assert!(rejected > 0);
            let want: HashSet<usize> = if q == 2 { [1].into() } else { [1, q + 1].into() };
            assert_eq!(sizes, want, "q={q}");
        }
    }

    #[test]
    fn classical_intersection_is_the_plane_section() {
        let s = solid(8);
        let f = s.field();
        for b in all_parameters(8).step_by(37).take(60) {
            let Ok(o) = s.classical_ovoid(b) else { continue };
            let on_plane: Vec<ProjPoint<6>> = s
                .base_points()
                .iter()
                .filter(|p| crate::projspace::dot(f, &b, &s.local(p.coords())) == 0)
                .copied()
                .collect();
            assert_eq!(s.intersection_with_base(&o), on_plane);
        }
    }

    #[test]
    fn classical_ovoids_validate_at_q8_and_fit_back() {
        let s = solid(8);
        for b in all_parameters(8).step_by(101) {
            if let Ok(o) = s.classical_ovoid(b) {
                assert!(s.validate_ovoid(&o).passed());
                assert_eq!(s.fit_classical(&o), Some(b));
            }
        }
        assert_eq!(s.fit_classical(&s.base_ovoid().unwrap()), Some([0; 4]));
    }

    #[test]
    fn scaling_b_keeps_the_plane_but_changes_the_ovoid() {
        let s = solid(4);
        let f = s.field();
        let mut checked = 0;
        for b in all_parameters(4) {
            let Ok(o) = s.classical_ovoid(b) else { continue };
            for mu in 2..4u8 {
                let mb = b.map(|x| f.mul(mu, x));
                if let Ok(o2) = s.classical_ovoid(mb) {
                    assert_eq!(s.intersection_with_base(&o), s.intersection_with_base(&o2));
                    assert!(!o.same_points(&o2));
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = solid(4);
        assert!(matches!(s.classical_ovoid([0; 4]), Err(Error::Usage(_))));
        assert!(matches!(s.classical_ovoid([9, 0, 0, 0]), Err(Error::Usage(_))));
        assert!(matches!(s.tits_ovoid(), Err(Error::Usage(_))));
        assert!(matches!(solid(2).tits_ovoid(), Err(Error::Usage(_))));
    }

    #[test]
    fn symplectic_frame_is_symplectic() {
        for q in [2, 4, 8, 16] {
            let s = solid(q);
            let f = s.field();
            let fr = s.symplectic_frame().unwrap();
            let b = |i: usize, j: usize| s.local_form().bilinear(f, &fr[i], &fr[j]);
            assert_eq!((b(0, 1), b(2, 3)), (1, 1));
            assert_eq!((b(0, 2), b(0, 3), b(1, 2), b(1, 3)), (0, 0, 0, 0));
        }
    }

    #[test]
    fn tits_ovoid_at_q8() {
        let s = solid(8);
        let o = s.tits_ovoid().unwrap();
        assert_eq!(o.len(), 65);
        assert!(s.validate_ovoid(&o).passed());
        assert!(s.fit_classical(&o).is_none());
        assert!(o.intersection_size() <= 28);
        // no three collinear, by brute force over triples
        let f = s.field();
        let pts = o.points();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let line = Subspace::span(f, [*pts[i].coords(), *pts[j].coords()]);
                assert_eq!(pts[j + 1..].iter().filter(|p| line.contains(p)).count(), 0);
            }
        }
    }

    #[test]
    fn ovoid_file_roundtrip() {
        let s = solid(4);
        let b = all_parameters(4).find(|&b| s.classical_ovoid(b).is_ok()).unwrap();
        let o = s.classical_ovoid(b).unwrap();
        let text = serde_json::to_string(&OvoidFile::from_ovoid(&o)).unwrap();
        let back: OvoidFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_ovoid(&s).unwrap(), o);
    }
}
