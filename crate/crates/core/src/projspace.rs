//! Points and subspaces of PG(N-1, q).
//!
//! Vectors are plain `[u8; N]` arrays of field elements. A [`Subspace`] keeps
//! its basis in reduced row-echelon form, which makes equal subspaces compare
//! equal and gives every stored point a canonical representative.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2h::Gf2h;

#[inline]
pub fn dot<const N: usize>(f: &Gf2h, a: &[u8; N], b: &[u8; N]) -> u8 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| acc ^ f.mul(x, y))
}

#[inline]
pub fn add_scaled<const N: usize>(f: &Gf2h, acc: &mut [u8; N], c: u8, v: &[u8; N]) {
    if c == 0 {
        return;
    }
    for (a, &x) in acc.iter_mut().zip(v) {
        *a ^= f.mul(c, x);
    }
}

#[inline]
pub fn scale<const N: usize>(f: &Gf2h, c: u8, v: &[u8; N]) -> [u8; N] {
    v.map(|x| f.mul(c, x))
}

/// Scales `v` so its first nonzero coordinate is 1. `None` for the zero vector.
#[inline]
pub fn normalize<const N: usize>(f: &Gf2h, v: &[u8; N]) -> Option<[u8; N]> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    if lead == 1 {
        return Some(*v);
    }
    Some(scale(f, f.inv_nz(lead), v))
}

/// Reduced row-echelon form; zero rows are dropped.
pub fn rref<const N: usize>(f: &Gf2h, rows: impl IntoIterator<Item = [u8; N]>) -> Vec<[u8; N]> {
    let mut m: Vec<[u8; N]> = rows.into_iter().collect();
    let mut rank = 0;
    for col in 0..N {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let s = f.inv_nz(m[rank][col]);
        m[rank] = scale(f, s, &m[rank]);
        let pivot_row = m[rank];
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let c = m[r][col];
                add_scaled(f, &mut m[r], c, &pivot_row);
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    m.truncate(rank);
    m
}

fn pivot_of<const N: usize>(row: &[u8; N]) -> usize {
    row.iter().position(|&x| x != 0).expect("echelon rows are nonzero")
}

/// Basis of `{x : r . x = 0 for every row r}`.
pub fn nullspace<const N: usize>(f: &Gf2h, rows: impl IntoIterator<Item = [u8; N]>) -> Vec<[u8; N]> {
    let e = rref(f, rows);
    let pivots: Vec<usize> = e.iter().map(pivot_of).collect();
    (0..N)
        .filter(|j| !pivots.contains(j))
        .map(|j| {
            let mut x = [0u8; N];
            x[j] = 1;
            for (row, &p) in e.iter().zip(&pivots) {
                // char 2: -a = a
                x[p] = row[j];
            }
            x
        })
        .collect()
}

/// Number of points of a projective space of vector dimension `rank`.
pub fn count_points(q: usize, rank: usize) -> usize {
    (0..rank).map(|i| q.pow(i as u32)).sum()
}

/// Position of a normalized vector in the lexicographic list of all points.
#[inline]
pub fn point_rank<const N: usize>(q: usize, v: &[u8; N]) -> usize {
    let lead = v.iter().position(|&x| x != 0).expect("nonzero point");
    let tail_len = N - 1 - lead;
    let mut r = count_points(q, tail_len);
    let mut t = 0usize;
    for &x in &v[lead + 1..] {
        t = t * q + x as usize;
    }
    r += t;
    r
}

/// Inverse of [`point_rank`].
pub fn point_unrank<const N: usize>(q: usize, mut r: usize) -> [u8; N] {
    let mut tail_len = 0;
    while r >= q.pow(tail_len as u32) {
        r -= q.pow(tail_len as u32);
        tail_len += 1;
    }
    let lead = N - 1 - tail_len;
    let mut v = [0u8; N];
    v[lead] = 1;
    for i in (lead + 1..N).rev() {
        v[i] = (r % q) as u8;
        r /= q;
    }
    v
}

/// A point of PG(N-1, q) stored with its first nonzero coordinate equal to 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint<const N: usize>([u8; N]);

impl<const N: usize> ProjPoint<N> {
    pub fn new(f: &Gf2h, v: [u8; N]) -> Result<Self> {
        if v.iter().any(|&x| x as usize >= f.q()) {
            return Err(Error::Usage(format!("{v:?} has entries outside GF({})", f.q())));
        }
        normalize(f, &v)
            .map(Self)
            .ok_or_else(|| Error::Domain("the zero vector is not a point".into()))
    }

    /// Wraps a vector already known to be normalized.
    pub(crate) fn from_normalized(v: [u8; N]) -> Self {
        debug_assert!(v.iter().find(|&&x| x != 0) == Some(&1));
        Self(v)
    }

    #[inline]
    pub fn coords(&self) -> &[u8; N] {
        &self.0
    }
}

impl<const N: usize> fmt::Debug for ProjPoint<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x:x}")?;
        }
        write!(f, ")")
    }
}

impl<const N: usize> Serialize for ProjPoint<N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::gf2h::hex_serde::vec::serialize(&self.0, s)
    }
}

impl<'de, const N: usize> Deserialize<'de> for ProjPoint<N> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = crate::gf2h::hex_serde::vec::deserialize(d)?;
        let arr: [u8; N] = v
            .try_into()
            .map_err(|_| serde::de::Error::custom(format!("expected {N} coordinates")))?;
        // normalization is re-checked against a field by the caller
        Ok(ProjPoint(arr))
    }
}

/// A projective subspace, stored as a reduced row-echelon basis.
#[derive(Clone)]
pub struct Subspace<const N: usize> {
    field: &'static Gf2h,
    basis: Vec<[u8; N]>,
}

impl<const N: usize> PartialEq for Subspace<N> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.basis == other.basis
    }
}
impl<const N: usize> Eq for Subspace<N> {}

impl<const N: usize> std::hash::Hash for Subspace<N> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.basis.hash(state);
    }
}

impl<const N: usize> fmt::Debug for Subspace<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {}; ", self.projdim())?;
        for r in &self.basis {
            write!(f, "{:?}", ProjPoint(*r))?;
        }
        write!(f, ")")
    }
}

impl<const N: usize> Serialize for Subspace<N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<ProjPoint<N>> = self.basis.iter().map(|r| ProjPoint(*r)).collect();
        rows.serialize(s)
    }
}

impl<const N: usize> Subspace<N> {
    pub fn empty(field: &'static Gf2h) -> Self {
        Self { field, basis: Vec::new() }
    }

    pub fn whole(field: &'static Gf2h) -> Self {
        let basis = (0..N)
            .map(|i| {
                let mut v = [0u8; N];
                v[i] = 1;
                v
            })
            .collect();
        Self { field, basis }
    }

    /// Smallest subspace containing all the given vectors.
    pub fn span(field: &'static Gf2h, vectors: impl IntoIterator<Item = [u8; N]>) -> Self {
        Self { field, basis: rref(field, vectors) }
    }

    pub fn from_point(field: &'static Gf2h, p: &ProjPoint<N>) -> Self {
        Self { field, basis: vec![p.0] }
    }

    /// Common zero set of the given linear forms.
    pub fn kernel_of(field: &'static Gf2h, forms: impl IntoIterator<Item = [u8; N]>) -> Self {
        Self::span(field, nullspace(field, forms))
    }

    /// The hyperplane `sum coeffs[i] X_i = 0`.
    pub fn hyperplane_from_linear_form(field: &'static Gf2h, coeffs: [u8; N]) -> Result<Self> {
        if coeffs.iter().all(|&c| c == 0) {
            return Err(Error::Domain("the zero form has no hyperplane".into()));
        }
        Ok(Self::kernel_of(field, [coeffs]))
    }

    #[inline]
    pub fn field(&self) -> &'static Gf2h {
        self.field
    }

    #[inline]
    pub fn basis(&self) -> &[[u8; N]] {
        &self.basis
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Projective dimension; -1 for the empty subspace.
    #[inline]
    pub fn projdim(&self) -> isize {
        self.basis.len() as isize - 1
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(pivot_of).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Residue of `v` after reduction against the echelon basis.
    fn reduce(&self, v: &[u8; N]) -> [u8; N] {
        let mut r = *v;
        for row in &self.basis {
            let c = r[pivot_of(row)];
            add_scaled(self.field, &mut r, c, row);
        }
        r
    }

    #[inline]
    pub fn contains_vector(&self, v: &[u8; N]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn contains(&self, p: &ProjPoint<N>) -> bool {
        self.contains_vector(&p.0)
    }

    pub fn contains_subspace(&self, other: &Subspace<N>) -> bool {
        other.basis.iter().all(|r| self.contains_vector(r))
    }

    pub fn join(&self, other: &Subspace<N>) -> Self {
        Self::span(self.field, self.basis.iter().chain(&other.basis).copied())
    }

    pub fn join_vector(&self, v: &[u8; N]) -> Self {
        Self::span(self.field, self.basis.iter().copied().chain([*v]))
    }

    /// Linear forms vanishing on this subspace.
    pub fn annihilator(&self) -> Vec<[u8; N]> {
        nullspace(self.field, self.basis.iter().copied())
    }

    pub fn meet(&self, other: &Subspace<N>) -> Self {
        let forms: Vec<[u8; N]> = self.annihilator().into_iter().chain(other.annihilator()).collect();
        Self::kernel_of(self.field, forms)
    }

    /// All points, in lexicographic order of their normalized coordinates.
    pub fn points(&self) -> Vec<ProjPoint<N>> {
        let mut out = self.point_vectors();
        out.sort_unstable();
        out.into_iter().map(ProjPoint).collect()
    }

    /// Normalized vectors of all points, in no particular order.
    pub fn point_vectors(&self) -> Vec<[u8; N]> {
        let f = self.field;
        let q = f.q();
        let k = self.basis.len();
        let mut out = Vec::with_capacity(count_points(q, k));
        // leading coefficient 1 on row `lead`, free coefficients on later rows;
        // echelon form makes the resulting vectors normalized
        for lead in 0..k {
            let free = k - lead - 1;
            let total = q.pow(free as u32);
            for code in 0..total {
                let mut v = self.basis[lead];
                let mut c = code;
                for row in self.basis[lead + 1..].iter().rev() {
                    add_scaled(f, &mut v, (c % q) as u8, row);
                    c /= q;
                }
                out.push(v);
            }
        }
        out
    }

    pub fn num_points(&self) -> usize {
        count_points(self.field.q(), self.rank())
    }

    /// Every subspace of projective dimension `projdim` containing `self`,
    /// each exactly once.
    pub fn subspaces_through(&self, projdim: isize) -> SubspacesThrough<N> {
        SubspacesThrough::new(self.clone(), projdim)
    }
}

/// The unique point of `target` on the join of `centre` and `p`.
pub fn project_from<const N: usize>(
    centre: &Subspace<N>,
    p: &ProjPoint<N>,
    target: &Subspace<N>,
) -> Result<ProjPoint<N>> {
    if centre.contains(p) {
        return Err(Error::Domain(format!("{p:?} lies in the projection centre")));
    }
    if !centre.meet(target).is_empty() || centre.rank() + target.rank() != N {
        return Err(Error::Domain("centre and target are not complementary".into()));
    }
    let m = centre.join_vector(p.coords()).meet(target);
    if m.rank() != 1 {
        return Err(Error::Consistency(format!("projection meets target in rank {}", m.rank())));
    }
    Ok(ProjPoint(m.basis[0]))
}

/// Iterator over subspaces of a fixed dimension through a given subspace.
///
/// Subspaces `W ⊇ U` correspond to subspaces of a coordinate complement of
/// `U`; the latter are enumerated as reduced row-echelon matrices.
pub struct SubspacesThrough<const N: usize> {
    base: Subspace<N>,
    complement_cols: Vec<usize>,
    k: usize,
    combos: Vec<Vec<usize>>,
    combo_idx: usize,
    free: Vec<(usize, usize)>,
    counter: Vec<u8>,
    fresh: bool,
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

impl<const N: usize> SubspacesThrough<N> {
    fn new(base: Subspace<N>, projdim: isize) -> Self {
        let pivots = base.pivots();
        let complement_cols: Vec<usize> = (0..N).filter(|j| !pivots.contains(j)).collect();
        let target_rank = projdim + 1;
        let valid = target_rank >= base.rank() as isize && target_rank <= N as isize;
        let k = if valid { target_rank as usize - base.rank() } else { 0 };
        let combos = if valid { combinations(complement_cols.len(), k) } else { Vec::new() };
        let mut it = Self {
            base,
            complement_cols,
            k,
            combos,
            combo_idx: 0,
            free: Vec::new(),
            counter: Vec::new(),
            fresh: true,
        };
        it.load_combo();
        it
    }

    fn load_combo(&mut self) {
        self.free.clear();
        if let Some(piv) = self.combos.get(self.combo_idx) {
            let m = self.complement_cols.len();
            for (row, &p) in piv.iter().enumerate() {
                for col in p + 1..m {
                    if !piv.contains(&col) {
                        self.free.push((row, col));
                    }
                }
            }
        }
        self.counter = vec![0; self.free.len()];
        self.fresh = true;
    }

    /// Advances the free-entry odometer; false when it wraps around.
    fn step(&mut self) -> bool {
        let q = self.base.field.q() as u8;
        for c in self.counter.iter_mut().rev() {
            *c += 1;
            if *c < q {
                return true;
            }
            *c = 0;
        }
        false
    }

    fn current(&self) -> Subspace<N> {
        let piv = &self.combos[self.combo_idx];
        let mut rows = vec![[0u8; N]; self.k];
        for (row, &p) in piv.iter().enumerate() {
            rows[row][self.complement_cols[p]] = 1;
        }
        for (&(row, col), &v) in self.free.iter().zip(&self.counter) {
            rows[row][self.complement_cols[col]] = v;
        }
        Subspace::span(self.base.field, self.base.basis.iter().copied().chain(rows))
    }
}

impl<const N: usize> Iterator for SubspacesThrough<N> {
    type Item = Subspace<N>;

    fn next(&mut self) -> Option<Subspace<N>> {
        loop {
            if self.combo_idx >= self.combos.len() {
                return None;
            }
            if self.fresh {
                self.fresh = false;
                return Some(self.current());
            }
            if self.step() {
                return Some(self.current());
            }
            self.combo_idx += 1;
            self.load_combo();
        }
    }
}

/// Frame coordinates on a subspace of rank `K`: the echelon basis rows serve
/// as the coordinate vectors, so the coordinates of a member are its entries
/// at the pivot columns.
#[derive(Clone, Debug)]
pub struct Frame<const N: usize, const K: usize> {
    subspace: Subspace<N>,
    rows: [[u8; N]; K],
    pivots: [usize; K],
}

impl<const N: usize, const K: usize> Frame<N, K> {
    pub fn new(subspace: &Subspace<N>) -> Result<Self> {
        if subspace.rank() != K {
            return Err(Error::Usage(format!(
                "frame of rank {K} requested for a subspace of rank {}",
                subspace.rank()
            )));
        }
        let rows: [[u8; N]; K] = subspace.basis.clone().try_into().expect("rank checked");
        let pivots = rows.map(|r| pivot_of(&r));
        Ok(Self { subspace: subspace.clone(), rows, pivots })
    }

    pub fn subspace(&self) -> &Subspace<N> {
        &self.subspace
    }

    pub fn rows(&self) -> &[[u8; N]; K] {
        &self.rows
    }

    /// Coordinates of a vector of the subspace.
    #[inline]
    pub fn coords(&self, v: &[u8; N]) -> [u8; K] {
        debug_assert!(self.subspace.contains_vector(v));
        self.pivots.map(|p| v[p])
    }

    #[inline]
    pub fn vector(&self, x: &[u8; K]) -> [u8; N] {
        let f = self.subspace.field;
        let mut v = [0u8; N];
        for (c, row) in x.iter().zip(&self.rows) {
            add_scaled(f, &mut v, *c, row);
        }
        v
    }

    /// Rank of a point of the subspace in the lexicographic order of its
    /// frame coordinates; normalized members have normalized coordinates.
    #[inline]
    pub fn local_rank(&self, v: &[u8; N]) -> usize {
        point_rank(self.subspace.field.q(), &self.coords(v))
    }

    pub fn num_points(&self) -> usize {
        count_points(self.subspace.field.q(), K)
    }

    /// Points of the subspace indexed by local rank.
    pub fn points_by_rank(&self) -> Vec<[u8; N]> {
        let q = self.subspace.field.q();
        (0..self.num_points())
            .map(|r| self.vector(&point_unrank::<K>(q, r)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(q: usize) -> &'static Gf2h {
        Gf2h::with_order(q).unwrap()
    }

    fn random_subspace<const N: usize>(f: &'static Gf2h, rng: &mut ChaCha8Rng) -> Subspace<N> {
        let k = rng.gen_range(0..=N);
        Subspace::span(
            f,
            (0..k).map(|_| std::array::from_fn(|_| rng.gen_range(0..f.q()) as u8)),
        )
    }

    #[test]
    fn rank_unrank_roundtrip_and_order() {
        for q in [2, 4] {
            let all = Subspace::<6>::whole(gf(q)).points();
            for (i, p) in all.iter().enumerate() {
                assert_eq!(point_rank(q, p.coords()), i);
                assert_eq!(&point_unrank::<6>(q, i), p.coords());
            }
        }
    }

    #[test]
    fn point_counts() {
        assert_eq!(Subspace::<4>::whole(gf(2)).points().len(), 15);
        assert_eq!(Subspace::<6>::whole(gf(16)).num_points(), 1_118_481);
        assert_eq!((16usize.pow(6) - 1) / 15, 1_118_481);
        let f = gf(4);
        let line = Subspace::<6>::span(f, [[1, 0, 0, 0, 0, 0], [0, 1, 2, 0, 0, 3]]);
        assert_eq!(line.points().len(), 5);
        let h = Subspace::hyperplane_from_linear_form(f, [1, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(h.points().len(), (4usize.pow(5) - 1) / 3);
        assert!(matches!(
            Subspace::<6>::hyperplane_from_linear_form(f, [0; 6]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn span_basics() {
        let f = gf(4);
        let p = ProjPoint::new(f, [0, 2, 1, 0, 0, 0]).unwrap();
        assert_eq!(p.coords(), &[0, 1, f.inv(2).unwrap(), 0, 0, 0]);
        let s = Subspace::from_point(f, &p);
        assert_eq!(s.projdim(), 0);
        assert_eq!(s.points(), vec![p]);
    }

    #[test]
    fn meet_of_distinct_hyperplanes() {
        let f = gf(4);
        let h1 = Subspace::<6>::hyperplane_from_linear_form(f, [1, 0, 0, 0, 0, 0]).unwrap();
        let h2 = Subspace::<6>::hyperplane_from_linear_form(f, [0, 1, 0, 3, 0, 0]).unwrap();
        assert_eq!(h1.meet(&h2).projdim(), 3);
        assert_eq!(h1.meet(&h1), h1);
    }

    #[test]
    fn canonical_forms_and_modular_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [2, 4, 8] {
            let f = gf(q);
            for _ in 0..1000 {
                let u: Subspace<6> = random_subspace(f, &mut rng);
                let w: Subspace<6> = random_subspace(f, &mut rng);
                let m = u.meet(&w);
                let j = u.join(&w);
                assert_eq!(m.projdim() + j.projdim(), u.projdim() + w.projdim());
                assert!(u.contains_subspace(&m) && w.contains_subspace(&m));
                assert!(j.contains_subspace(&u) && j.contains_subspace(&w));
            }
            for _ in 0..50 {
                let u: Subspace<6> = random_subspace(f, &mut rng);
                if u.rank() <= 4 {
                    let pts: Vec<[u8; 6]> = u.points().iter().map(|p| *p.coords()).collect();
                    assert_eq!(Subspace::span(f, pts), u);
                }
            }
        }
    }

    #[test]
    fn subspaces_through_counts() {
        let f = gf(2);
        let lstar = Subspace::<6>::span(f, [[1, 0, 0, 0, 0, 0], [0, 0, 1, 1, 0, 0]]);
        let planes: Vec<_> = lstar.subspaces_through(2).collect();
        assert_eq!(planes.len(), 15);
        let mut uniq = std::collections::HashSet::new();
        for p in &planes {
            assert_eq!(p.projdim(), 2);
            assert!(p.contains_subspace(&lstar));
            assert!(uniq.insert(p.clone()));
        }
        let f4 = gf(4);
        let l4 = Subspace::<6>::span(f4, [[1, 0, 0, 0, 0, 0], [0, 0, 1, 1, 0, 0]]);
        assert_eq!(l4.subspaces_through(2).count(), 4 * 4 * 4 + 4 * 4 + 4 + 1);
        let plane = Subspace::<6>::span(f4, [[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]]);
        let only: Vec<_> = plane.subspaces_through(2).collect();
        assert_eq!(only, vec![plane]);
        // Gaussian binomial [6 choose 3]_2
        assert_eq!(Subspace::<6>::empty(f).subspaces_through(2).count(), 1395);
    }

    #[test]
    fn projection_behaviour() {
        let f = gf(4);
        let centre = Subspace::<4>::span(f, [[1, 0, 0, 0], [0, 1, 0, 0]]);
        let target = Subspace::<4>::span(f, [[0, 0, 1, 0], [0, 0, 0, 1]]);
        let p = ProjPoint::new(f, [0, 0, 1, 3]).unwrap();
        assert_eq!(project_from(&centre, &p, &target).unwrap(), p);
        let r = ProjPoint::new(f, [2, 1, 1, 3]).unwrap();
        assert_eq!(project_from(&centre, &r, &target).unwrap(), p);
        let c = ProjPoint::new(f, [1, 1, 0, 0]).unwrap();
        assert!(matches!(project_from(&centre, &c, &target), Err(Error::Domain(_))));
        // basis order of the centre does not matter
        let centre2 = Subspace::<4>::span(f, [[1, 1, 0, 0], [1, 0, 0, 0]]);
        assert_eq!(centre, centre2);
        assert_eq!(project_from(&centre2, &r, &target).unwrap(), p);
    }

    #[test]
    fn frame_coordinates() {
        let f = gf(8);
        let s = Subspace::<6>::span(f, [[1, 0, 0, 0, 0, 0], [0, 0, 1, 1, 0, 0], [0, 0, 0, 0, 1, 1], [0, 1, 0, 0, 0, 0]]);
        let fr = Frame::<6, 4>::new(&s).unwrap();
        let pts = fr.points_by_rank();
        assert_eq!(pts.len(), 585);
        for (i, v) in pts.iter().enumerate() {
            assert!(s.contains_vector(v));
            assert_eq!(fr.local_rank(v), i);
            assert_eq!(normalize(f, v), Some(*v));
        }
    }

    proptest::proptest! {
        #[test]
        fn perp_free_subspace_laws(
            h in 1u32..=4,
            a in proptest::collection::vec(proptest::array::uniform5(proptest::num::u8::ANY), 0..5),
            b in proptest::collection::vec(proptest::array::uniform5(proptest::num::u8::ANY), 0..5),
        ) {
            let f = Gf2h::get(h).unwrap();
            let m = (f.q() - 1) as u8;
            let u = Subspace::span(f, a.into_iter().map(|r| r.map(|x| x & m)));
            let w = Subspace::span(f, b.into_iter().map(|r| r.map(|x| x & m)));
            let join = u.join(&w);
            let meet = u.meet(&w);
            proptest::prop_assert_eq!(u.rank() + w.rank(), join.rank() + meet.rank());
            proptest::prop_assert!(join.contains_subspace(&u) && join.contains_subspace(&w));
            proptest::prop_assert!(u.contains_subspace(&meet) && w.contains_subspace(&meet));
            proptest::prop_assert_eq!(Subspace::kernel_of(f, u.annihilator()), u.clone());
            proptest::prop_assert_eq!(u.num_points(), count_points(f.q(), u.rank()));
        }
    }
}
