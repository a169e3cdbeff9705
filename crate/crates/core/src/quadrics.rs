//! Quadratic forms over GF(2^h), their alternating bilinear forms, plane and
//! solid sections, and the enumerated Klein quadric Q+(5,q).

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{consistency, Error, Result};
use crate::gf2h::Gf2h;
use crate::projspace::{count_points, point_rank, Frame, ProjPoint, Subspace};

/// A quadratic form `sum_{i<=j} a_ij X_i X_j`, stored upper-triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm<const N: usize> {
    coeffs: [[u8; N]; N],
    terms: Vec<(usize, usize, u8)>,
    cross: Vec<(usize, usize, u8)>,
}

impl<const N: usize> QuadraticForm<N> {
    /// Builds a form from an upper-triangular coefficient matrix; entries
    /// below the diagonal are ignored.
    pub fn new(coeffs: [[u8; N]; N]) -> Self {
        let mut c = coeffs;
        for i in 0..N {
            for j in 0..i {
                c[i][j] = 0;
            }
        }
        let mut terms = Vec::new();
        let mut cross = Vec::new();
        for i in 0..N {
            for j in i..N {
                if c[i][j] != 0 {
                    terms.push((i, j, c[i][j]));
                    if i != j {
                        cross.push((i, j, c[i][j]));
                    }
                }
            }
        }
        Self { coeffs: c, terms, cross }
    }

    pub fn coeffs(&self) -> &[[u8; N]; N] {
        &self.coeffs
    }

    #[inline]
    pub fn evaluate(&self, f: &Gf2h, v: &[u8; N]) -> u8 {
        let mut acc = 0;
        for &(i, j, a) in &self.terms {
            acc ^= f.mul(a, f.mul(v[i], v[j]));
        }
        acc
    }

    /// `B(u,v) = Q(u+v) + Q(u) + Q(v)`.
    #[inline]
    pub fn bilinear(&self, f: &Gf2h, u: &[u8; N], v: &[u8; N]) -> u8 {
        let mut acc = 0;
        for &(i, j, a) in &self.cross {
            acc ^= f.mul(a, f.mul(u[i], v[j]) ^ f.mul(u[j], v[i]));
        }
        acc
    }

    /// Coefficients of the linear form `v -> B(u, v)`.
    #[inline]
    pub fn polar_form(&self, f: &Gf2h, u: &[u8; N]) -> [u8; N] {
        let mut c = [0u8; N];
        for &(i, j, a) in &self.cross {
            c[j] ^= f.mul(a, u[i]);
            c[i] ^= f.mul(a, u[j]);
        }
        c
    }

    pub fn polarity(&self, f: &Gf2h) -> Polarity<N> {
        let mut gram = [[0u8; N]; N];
        for &(i, j, a) in &self.cross {
            gram[i][j] = a;
            gram[j][i] = a;
        }
        let _ = f;
        Polarity { gram }
    }

    /// The same form written in the coordinates of a frame on a subspace.
    pub fn restrict<const K: usize>(&self, f: &Gf2h, frame: &Frame<N, K>) -> QuadraticForm<K> {
        let rows = frame.rows();
        let mut c = [[0u8; K]; K];
        for i in 0..K {
            c[i][i] = self.evaluate(f, &rows[i]);
            for j in i + 1..K {
                c[i][j] = self.bilinear(f, &rows[i], &rows[j]);
            }
        }
        QuadraticForm::new(c)
    }
}

impl QuadraticForm<6> {
    /// `X1X2 + X3X4 + X5X6`.
    pub fn klein() -> Self {
        let mut c = [[0u8; 6]; 6];
        c[0][1] = 1;
        c[2][3] = 1;
        c[4][5] = 1;
        Self::new(c)
    }
}

/// The alternating form of a quadratic form in characteristic 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarity<const N: usize> {
    gram: [[u8; N]; N],
}

impl<const N: usize> Polarity<N> {
    pub fn gram(&self) -> &[[u8; N]; N] {
        &self.gram
    }

    pub fn is_alternating(&self) -> bool {
        (0..N).all(|i| self.gram[i][i] == 0 && (0..N).all(|j| self.gram[i][j] == self.gram[j][i]))
    }

    pub fn rank(&self, f: &Gf2h) -> usize {
        crate::projspace::rref(f, self.gram).len()
    }

    /// `U^ζ`: all vectors orthogonal to every vector of `U`.
    pub fn perp(&self, u: &Subspace<N>) -> Subspace<N> {
        let f = u.field();
        let forms: Vec<[u8; N]> = u
            .basis()
            .iter()
            .map(|r| {
                let mut c = [0u8; N];
                for (j, cj) in c.iter_mut().enumerate() {
                    *cj = (0..N).fold(0, |acc, i| acc ^ f.mul(r[i], self.gram[i][j]));
                }
                c
            })
            .collect();
        if forms.is_empty() {
            return Subspace::whole(f);
        }
        Subspace::kernel_of(f, forms)
    }
}

/// Coefficients `(a, b, c, d, e, f)` of the restriction of a form to a
/// plane with basis `r0, r1, r2`:
/// `aX^2 + bY^2 + cZ^2 + dXY + eXZ + fYZ`.
#[inline]
pub fn plane_section_coeffs<const N: usize>(
    form: &QuadraticForm<N>,
    f: &Gf2h,
    rows: &[[u8; N]],
) -> [u8; 6] {
    [
        form.evaluate(f, &rows[0]),
        form.evaluate(f, &rows[1]),
        form.evaluate(f, &rows[2]),
        form.bilinear(f, &rows[0], &rows[1]),
        form.bilinear(f, &rows[0], &rows[2]),
        form.bilinear(f, &rows[1], &rows[2]),
    ]
}

#[inline]
fn eval_ternary(f: &Gf2h, c: &[u8; 6], x: &[u8; 3]) -> u8 {
    f.mul(c[0], f.square(x[0]))
        ^ f.mul(c[1], f.square(x[1]))
        ^ f.mul(c[2], f.square(x[2]))
        ^ f.mul(c[3], f.mul(x[0], x[1]))
        ^ f.mul(c[4], f.mul(x[0], x[2]))
        ^ f.mul(c[5], f.mul(x[1], x[2]))
}

/// Nucleus `(f : e : d)` of a ternary form when it is a nonsingular conic.
#[inline]
pub fn ternary_nucleus(f: &Gf2h, c: &[u8; 6]) -> Option<[u8; 3]> {
    let n = [c[5], c[4], c[3]];
    if n == [0, 0, 0] || eval_ternary(f, c, &n) == 0 {
        return None;
    }
    Some(n)
}

/// An irreducible conic of a plane together with its nucleus.
#[derive(Clone, Debug, Serialize)]
pub struct Conic<const N: usize> {
    pub plane: Subspace<N>,
    pub points: Vec<ProjPoint<N>>,
    pub nucleus: ProjPoint<N>,
}

/// Shape of the intersection of a plane with a quadric.
#[derive(Clone, Debug)]
pub enum PlaneSection<const N: usize> {
    PlaneInQuadric,
    Singleton(ProjPoint<N>),
    LinePair,
    FullLine,
    Conic(Conic<N>),
}

impl<const N: usize> PlaneSection<N> {
    pub fn tag(&self) -> &'static str {
        match self {
            PlaneSection::PlaneInQuadric => "plane-in-quadric",
            PlaneSection::Singleton(_) => "singleton",
            PlaneSection::LinePair => "line-pair",
            PlaneSection::FullLine => "full-line",
            PlaneSection::Conic(_) => "conic",
        }
    }
}

/// Classifies `plane ∩ {form = 0}` by point count; for an irreducible conic
/// the nucleus is the radical of the restricted alternating form.
pub fn conic_of_plane_section<const N: usize>(
    form: &QuadraticForm<N>,
    plane: &Subspace<N>,
) -> Result<PlaneSection<N>> {
    if plane.rank() != 3 {
        return Err(Error::Usage(format!("expected a plane, got dimension {}", plane.projdim())));
    }
    let f = plane.field();
    let q = f.q();
    let rows = plane.basis();
    let c = plane_section_coeffs(form, f, rows);
    let mut zeros: Vec<ProjPoint<N>> = plane
        .point_vectors()
        .into_iter()
        .filter(|v| form.evaluate(f, v) == 0)
        .map(ProjPoint::from_normalized)
        .collect();
    zeros.sort_unstable();
    let n = zeros.len();
    Ok(if n == q * q + q + 1 {
        PlaneSection::PlaneInQuadric
    } else if n == 1 {
        PlaneSection::Singleton(zeros[0])
    } else if n == 2 * q + 1 {
        PlaneSection::LinePair
    } else if n == q + 1 {
        match ternary_nucleus(f, &c) {
            None => PlaneSection::FullLine,
            Some(nc) => {
                let mut v = [0u8; N];
                for (x, r) in nc.iter().zip(rows) {
                    crate::projspace::add_scaled(f, &mut v, *x, r);
                }
                PlaneSection::Conic(Conic {
                    plane: plane.clone(),
                    points: zeros,
                    nucleus: ProjPoint::new(f, v)?,
                })
            }
        }
    } else {
        return Err(Error::Consistency(format!("plane section with {n} points over GF({q})")));
    })
}

/// Shape of the intersection of a solid with a quadric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolidSection {
    Elliptic,
    Hyperbolic,
    Cone,
    Degenerate,
}

pub fn classify_solid_section<const N: usize>(
    form: &QuadraticForm<N>,
    solid: &Subspace<N>,
) -> Result<SolidSection> {
    if solid.rank() != 4 {
        return Err(Error::Usage(format!("expected a solid, got dimension {}", solid.projdim())));
    }
    let f = solid.field();
    let q = f.q();
    let n = solid.point_vectors().iter().filter(|v| form.evaluate(f, v) == 0).count();
    Ok(if n == q * q + 1 {
        SolidSection::Elliptic
    } else if n == (q + 1) * (q + 1) {
        SolidSection::Hyperbolic
    } else if n == q * q + q + 1 {
        SolidSection::Cone
    } else {
        SolidSection::Degenerate
    })
}

/// Totally isotropic lines of `PG(N-1,q)` for the polar form of `form`.
/// For the form of an elliptic quadric of `PG(3,q)` these are the lines of
/// `W(q)`, equivalently the tangent lines of the quadric.
pub fn isotropic_lines<const N: usize>(form: &QuadraticForm<N>, f: &'static Gf2h) -> Vec<Subspace<N>> {
    Subspace::<N>::empty(f)
        .subspaces_through(1)
        .filter(|l| form.bilinear(f, &l.basis()[0], &l.basis()[1]) == 0)
        .collect()
}

/// Line of `PG(2,q)` through two points, or point on two lines.
#[inline]
pub fn cross(f: &Gf2h, a: &[u8; 3], b: &[u8; 3]) -> [u8; 3] {
    [
        f.mul(a[1], b[2]) ^ f.mul(a[2], b[1]),
        f.mul(a[2], b[0]) ^ f.mul(a[0], b[2]),
        f.mul(a[0], b[1]) ^ f.mul(a[1], b[0]),
    ]
}

/// True when no three of the points are collinear.
pub fn is_arc(f: &Gf2h, pts: &[[u8; 3]]) -> bool {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let l = cross(f, &pts[i], &pts[j]);
            if pts[j + 1..].iter().any(|x| crate::projspace::dot(f, &l, x) == 0) {
                return false;
            }
        }
    }
    true
}

/// Nucleus of an oval (`q+1` points, no three collinear) of `PG(2,q)`, `q`
/// even: the common point of all tangent lines. `None` if the points do not
/// form an oval.
pub fn oval_nucleus(f: &'static Gf2h, pts: &[[u8; 3]]) -> Option<[u8; 3]> {
    let q = f.q();
    if pts.len() != q + 1 || !is_arc(f, pts) {
        return None;
    }
    let tangent = |p: &[u8; 3]| -> Option<[u8; 3]> {
        let k = p.iter().position(|&x| x != 0)?;
        // lines through p correspond to points of the line X_k = 0
        Subspace::<3>::kernel_of(f, [std::array::from_fn(|i| (i == k) as u8)])
            .point_vectors()
            .into_iter()
            .map(|z| cross(f, p, &z))
            .find(|l| pts.iter().filter(|x| crate::projspace::dot(f, l, x) == 0).count() == 1)
    };
    let t0 = tangent(&pts[0])?;
    let t1 = tangent(&pts[1])?;
    let n = crate::projspace::normalize(f, &cross(f, &t0, &t1))?;
    let all_tangent = pts.iter().all(|p| {
        let l = cross(f, &n, p);
        pts.iter().filter(|x| crate::projspace::dot(f, &l, x) == 0).count() == 1
    });
    all_tangent.then_some(n)
}

/// True when the points are exactly the points of an irreducible conic of
/// `PG(2,q)`. Solves for the six coefficients through all points.
pub fn fits_conic(f: &'static Gf2h, pts: &[[u8; 3]]) -> bool {
    let q = f.q();
    if pts.len() != q + 1 || !is_arc(f, pts) {
        return false;
    }
    let rows = pts.iter().map(|x| {
        [
            f.square(x[0]),
            f.square(x[1]),
            f.square(x[2]),
            f.mul(x[0], x[1]),
            f.mul(x[0], x[2]),
            f.mul(x[1], x[2]),
        ]
    });
    let sols = crate::projspace::nullspace::<6>(f, rows);
    // three points of PG(2,2) lie on several conics; any oval there is a conic
    if sols.len() > 1 {
        return q == 2;
    }
    let Some(c) = sols.first() else { return false };
    if ternary_nucleus(f, c).is_none() {
        return false;
    }
    Subspace::<3>::whole(f).point_vectors().iter().filter(|x| eval_ternary(f, c, x) == 0).count() == q + 1
}

enum PointIndex {
    Dense(Vec<u32>),
    Sparse(HashMap<[u8; 6], u32>),
}

const DENSE_LIMIT: usize = 1 << 22;

/// A generator plane of the Klein quadric with its point indices.
#[derive(Clone, Debug)]
pub struct GeneratorPlane {
    pub subspace: Subspace<6>,
    pub points: Vec<u32>,
    /// 0 or 1; planes of the same family meet in a point or coincide.
    pub family: u8,
}

/// The Klein quadric `X1X2 + X3X4 + X5X6 = 0` with all its points and
/// generator planes enumerated. Lines are produced on first use.
pub struct QuadricModel {
    field: &'static Gf2h,
    form: QuadraticForm<6>,
    points: Vec<ProjPoint<6>>,
    index: PointIndex,
    planes: Vec<GeneratorPlane>,
    point_planes: Vec<Vec<u32>>,
    lines: OnceLock<Vec<[u32; 2]>>,
}

impl std::fmt::Debug for QuadricModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "QuadricModel(q={}, {} points, {} planes)",
            self.field.q(),
            self.points.len(),
            self.planes.len()
        )
    }
}

/// Summary counts for reports.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ModelSummary {
    pub q: usize,
    pub points: usize,
    pub planes: usize,
    pub lines: usize,
}

/// `T_x`: the hyperplane orthogonal to a singular point.
pub fn tangent_hyperplane<const N: usize>(
    form: &QuadraticForm<N>,
    f: &'static Gf2h,
    x: &ProjPoint<N>,
) -> Result<Subspace<N>> {
    if form.evaluate(f, x.coords()) != 0 {
        return Err(Error::Domain(format!("{x:?} is not a singular point")));
    }
    Subspace::hyperplane_from_linear_form(f, form.polar_form(f, x.coords()))
        .map_err(|_| Error::Domain(format!("{x:?} lies in the radical")))
}

impl QuadricModel {
    pub fn build_klein(field: &'static Gf2h) -> Result<Self> {
        let q = field.q();
        let form = QuadraticForm::klein();
        let total = count_points(q, 6);
        let all: Vec<[u8; 6]> = (0..total)
            .into_par_iter()
            .map(|r| crate::projspace::point_unrank::<6>(q, r))
            .filter(|v| form.evaluate(field, v) == 0)
            .collect();
        let points: Vec<ProjPoint<6>> = all.into_iter().map(ProjPoint::from_normalized).collect();
        let expected_points = (q * q + 1) * (q * q + q + 1);
        consistency!(
            points.len() == expected_points,
            "Klein quadric over GF({q}) has {} points, expected {expected_points}",
            points.len()
        );
        let index = if total <= DENSE_LIMIT {
            let mut dense = vec![u32::MAX; total];
            for (i, p) in points.iter().enumerate() {
                dense[point_rank(q, p.coords())] = i as u32;
            }
            PointIndex::Dense(dense)
        } else {
            PointIndex::Sparse(points.iter().enumerate().map(|(i, p)| (*p.coords(), i as u32)).collect())
        };
        let mut model = Self {
            field,
            form,
            points,
            index,
            planes: Vec::new(),
            point_planes: Vec::new(),
            lines: OnceLock::new(),
        };
        model.enumerate_planes()?;
        Ok(model)
    }

    /// Greedy extension point -> singular line -> singular plane. A point is
    /// skipped once all of its 2(q+1) planes are known.
    fn enumerate_planes(&mut self) -> Result<()> {
        let f = self.field;
        let q = f.q();
        let per_point = 2 * (q + 1);
        let target = 2 * (q + 1) * (q * q + 1);
        let mut found: BTreeMap<Vec<[u8; 6]>, Vec<u32>> = BTreeMap::new();
        let mut through = vec![0usize; self.points.len()];
        for x in 0..self.points.len() {
            if found.len() == target {
                break;
            }
            if through[x] == per_point {
                continue;
            }
            let xv = *self.points[x].coords();
            let tangent = Subspace::hyperplane_from_linear_form(f, self.form.polar_form(f, &xv))?;
            let tb = tangent.basis();
            let drop = tangent
                .pivots()
                .iter()
                .position(|&p| xv[p] != 0)
                .ok_or_else(|| Error::Consistency("point outside its tangent hyperplane".into()))?;
            let base_solid = Subspace::span(
                f,
                tb.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, r)| *r),
            );
            let base: Vec<[u8; 6]> = base_solid
                .point_vectors()
                .into_iter()
                .filter(|v| self.form.evaluate(f, v) == 0)
                .collect();
            for (i, y) in base.iter().enumerate() {
                for z in &base[i + 1..] {
                    if self.form.bilinear(f, y, z) != 0 {
                        continue;
                    }
                    let plane = Subspace::span(f, [xv, *y, *z]);
                    if plane.rank() != 3 || found.contains_key(plane.basis()) {
                        continue;
                    }
                    let mut idx: Vec<u32> = plane
                        .point_vectors()
                        .iter()
                        .map(|v| self.index_of(v).ok_or_else(|| Error::Consistency("plane leaves quadric".into())))
                        .collect::<Result<_>>()?;
                    idx.sort_unstable();
                    for &p in &idx {
                        through[p as usize] += 1;
                    }
                    found.insert(plane.basis().to_vec(), idx);
                }
            }
        }
        consistency!(found.len() == target, "found {} generator planes, expected {target}", found.len());
        let reference = Subspace::span(f, [[1, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 1, 0]]);
        let mut point_planes = vec![Vec::with_capacity(per_point); self.points.len()];
        let mut planes = Vec::with_capacity(target);
        for (pi, (basis, idx)) in found.into_iter().enumerate() {
            let subspace = Subspace::span(f, basis);
            let family = if reference.meet(&subspace).projdim() % 2 == 0 { 0 } else { 1 };
            for &p in &idx {
                point_planes[p as usize].push(pi as u32);
            }
            planes.push(GeneratorPlane { subspace, points: idx, family });
        }
        for (p, pp) in point_planes.iter().enumerate() {
            consistency!(pp.len() == per_point, "point {p} lies on {} planes, expected {per_point}", pp.len());
        }
        let fam0 = planes.iter().filter(|p| p.family == 0).count();
        consistency!(fam0 * 2 == target, "unbalanced plane families: {fam0} of {target}");
        self.planes = planes;
        self.point_planes = point_planes;
        Ok(())
    }

    #[inline]
    pub fn field(&self) -> &'static Gf2h {
        self.field
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.field.q()
    }

    pub fn form(&self) -> &QuadraticForm<6> {
        &self.form
    }

    pub fn polarity(&self) -> Polarity<6> {
        self.form.polarity(self.field)
    }

    pub fn points(&self) -> &[ProjPoint<6>] {
        &self.points
    }

    #[inline]
    pub fn point(&self, i: u32) -> &[u8; 6] {
        self.points[i as usize].coords()
    }

    /// Index of a normalized vector, if it lies on the quadric.
    #[inline]
    pub fn index_of(&self, v: &[u8; 6]) -> Option<u32> {
        match &self.index {
            PointIndex::Dense(d) => {
                let i = d[point_rank(self.field.q(), v)];
                (i != u32::MAX).then_some(i)
            }
            PointIndex::Sparse(m) => m.get(v).copied(),
        }
    }

    /// Index of an arbitrary nonzero vector, normalizing first.
    pub fn index_of_vector(&self, v: &[u8; 6]) -> Option<u32> {
        crate::projspace::normalize(self.field, v).and_then(|n| self.index_of(&n))
    }

    pub fn planes(&self) -> &[GeneratorPlane] {
        &self.planes
    }

    pub fn planes_through(&self, point: u32) -> &[u32] {
        &self.point_planes[point as usize]
    }

    pub fn tangent_hyperplane(&self, x: &ProjPoint<6>) -> Result<Subspace<6>> {
        tangent_hyperplane(&self.form, self.field, x)
    }

    /// All lines of the quadric, each as the two echelon rows of its span.
    /// Every line lies on exactly one plane of each family, so the lines of
    /// the family-0 planes list each line once.
    pub fn lines(&self) -> &[[u32; 2]] {
        self.lines.get_or_init(|| {
            let f = self.field;
            let plane_lines: Vec<Subspace<3>> = Subspace::<3>::empty(f).subspaces_through(1).collect();
            let mut lines: Vec<[u32; 2]> = self
                .planes
                .par_iter()
                .filter(|p| p.family == 0)
                .flat_map_iter(|p| {
                    let frame = Frame::<6, 3>::new(&p.subspace).expect("planes have rank 3");
                    plane_lines
                        .iter()
                        .map(|l| {
                            let rows = Subspace::span(f, l.basis().iter().map(|r| frame.vector(r)));
                            let b = rows.basis();
                            [
                                self.index_of(&b[0]).expect("line on quadric"),
                                self.index_of(&b[1]).expect("line on quadric"),
                            ]
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            lines.sort_unstable();
            lines
        })
    }

    /// Points of a line given by its two echelon rows.
    #[inline]
    pub fn line_points(&self, line: [u32; 2], out: &mut Vec<u32>) {
        out.clear();
        let f = self.field;
        let r0 = self.point(line[0]);
        let r1 = self.point(line[1]);
        out.push(line[1]);
        for t in f.elements() {
            let mut v = *r0;
            crate::projspace::add_scaled(f, &mut v, t, r1);
            out.push(self.index_of(&v).expect("line on quadric"));
        }
    }

    pub fn summary(&self) -> ModelSummary {
        let q = self.q();
        ModelSummary {
            q,
            points: self.points.len(),
            planes: self.planes.len(),
            lines: (q * q * q + q * q + q + 1) * (q * q + q + 1),
        }
    }
}
