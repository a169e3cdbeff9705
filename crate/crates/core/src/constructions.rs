//! Hyperovals of the Klein quadric: the (SC)-set construction, the `H_λ`
//! family with its algebraic description, and `H_O` from an ovoid of `W(q)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{consistency, Error, Result};
use crate::gf2h::{hex_serde, FieldSpec, Gf2h};
use crate::ovoids::{EllipticSolid, Ovoid, OvoidKind};
use crate::projspace::{Frame, ProjPoint, Subspace};
use crate::quadrics::{fits_conic, oval_nucleus, plane_section_coeffs, ternary_nucleus, QuadricModel};

/// The Klein quadric with the elliptic solid `Π` and the derived data shared
/// by all constructions.
pub struct Setting {
    pub model: QuadricModel,
    pub solid: EllipticSolid,
    base: PointSet,
    p_star: u32,
}

impl std::fmt::Debug for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Setting({:?}, {:?})", self.model, self.solid)
    }
}

impl Setting {
    pub fn new(q: usize) -> Result<Self> {
        Self::for_field(Gf2h::with_order(q)?)
    }

    pub fn for_field(field: &'static Gf2h) -> Result<Self> {
        let model = QuadricModel::build_klein(field)?;
        let solid = EllipticSolid::new(field)?;
        let idx: Vec<u32> = solid
            .base_points()
            .iter()
            .map(|p| model.index_of(p.coords()).ok_or_else(|| Error::Consistency("Q- point off the quadric".into())))
            .collect::<Result<_>>()?;
        let base = PointSet::from_indices(model.points().len(), idx);
        let p_star = model
            .index_of(solid.p_star().coords())
            .ok_or_else(|| Error::Consistency("p* off the quadric".into()))?;
        Ok(Self { model, solid, base, p_star })
    }

    #[inline]
    pub fn field(&self) -> &'static Gf2h {
        self.model.field()
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.model.q()
    }

    /// `Q-(3,q)` as a point set of the model.
    pub fn base(&self) -> &PointSet {
        &self.base
    }

    pub fn p_star(&self) -> u32 {
        self.p_star
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::from_indices(self.model.points().len(), Vec::new())
    }

    pub fn set_of(&self, idx: impl IntoIterator<Item = u32>) -> PointSet {
        PointSet::from_indices(self.model.points().len(), idx)
    }

    /// Model index of an arbitrary point, if it is on the quadric.
    pub fn index(&self, p: &ProjPoint<6>) -> Option<u32> {
        self.model.index_of(p.coords())
    }
}

/// A set of points of the quadric, by model index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    indices: Vec<u32>,
    mask: Vec<bool>,
}

impl PointSet {
    pub fn from_indices(universe: usize, idx: impl IntoIterator<Item = u32>) -> Self {
        let mut mask = vec![false; universe];
        for i in idx {
            mask[i as usize] = true;
        }
        let indices = mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i as u32).collect();
        Self { indices, mask }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let indices = mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i as u32).collect();
        Self { indices, mask }
    }

    #[inline]
    pub fn contains(&self, i: u32) -> bool {
        self.mask[i as usize]
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect())
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a && !*b).collect())
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect())
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.indices.iter().all(|&i| !other.contains(i))
    }

    /// Number of members among `idx`.
    #[inline]
    pub fn count_in(&self, idx: &[u32]) -> usize {
        idx.iter().filter(|&&i| self.mask[i as usize]).count()
    }
}

/// How a hyperoval was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Construction {
    Q2Complement,
    Lambda {
        #[serde(with = "hex_serde")]
        lambda: u8,
    },
    Eq1 {
        #[serde(with = "hex_serde")]
        lambda: u8,
    },
    Ovoid {
        kind: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vec<String>>,
        intersection: usize,
    },
    Loaded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperoval {
    pub construction: Construction,
    pub points: PointSet,
}

/// Hyperoval file contents.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperovalFile {
    pub field: FieldSpec,
    pub construction: Construction,
    pub size: usize,
    pub indices: Vec<u32>,
    pub points: Vec<ProjPoint<6>>,
}

impl HyperovalFile {
    pub fn new(setting: &Setting, h: &Hyperoval) -> Self {
        Self {
            field: setting.field().spec(),
            construction: h.construction.clone(),
            size: h.points.len(),
            indices: h.points.indices().to_vec(),
            points: h.points.indices().iter().map(|&i| setting.model.points()[i as usize]).collect(),
        }
    }

    /// Rebuilds the point set from the coordinates; indices must agree.
    pub fn into_hyperoval(self, setting: &Setting) -> Result<Hyperoval> {
        if self.field != setting.field().spec() {
            return Err(Error::Usage(format!("hyperoval file is over {:?}", self.field)));
        }
        let idx: Vec<u32> = self
            .points
            .iter()
            .map(|p| setting.index(p).ok_or_else(|| Error::Usage(format!("{p:?} is not on the quadric"))))
            .collect::<Result<_>>()?;
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        if sorted != self.indices || self.size != idx.len() {
            return Err(Error::Usage("hyperoval file indices disagree with its coordinates".into()));
        }
        Ok(Hyperoval { construction: self.construction, points: setting.set_of(idx) })
    }
}

/// Classification of every generator plane by its section with an (SC)-set.
#[derive(Clone, Debug)]
pub struct ScDecomposition {
    pub a1: PointSet,
    pub a2: PointSet,
    /// Planes meeting `X` in one point.
    pub planes_s: Vec<u32>,
    /// Planes meeting `X` in an oval: (plane, nucleus, oval is a conic).
    pub planes_c: Vec<(u32, u32, bool)>,
}

enum PlaneType {
    S(u32),
    C(u32, bool),
}

fn classify_plane(setting: &Setting, x: &PointSet, plane: usize) -> Result<PlaneType> {
    let m = &setting.model;
    let f = m.field();
    let q = f.q();
    let gp = &m.planes()[plane];
    let hits: Vec<u32> = gp.points.iter().copied().filter(|&i| x.contains(i)).collect();
    if hits.len() == 1 {
        return Ok(PlaneType::S(hits[0]));
    }
    if hits.len() != q + 1 {
        return Err(Error::Classification { plane, detail: format!("{} points of X", hits.len()) });
    }
    let frame = Frame::<6, 3>::new(&gp.subspace)?;
    let local: Vec<[u8; 3]> = hits.iter().map(|&i| frame.coords(m.point(i))).collect();
    let n = oval_nucleus(f, &local)
        .ok_or_else(|| Error::Classification { plane, detail: "section is not an oval".into() })?;
    let nucleus = m
        .index_of_vector(&frame.vector(&n))
        .ok_or_else(|| Error::Consistency("nucleus of a generator plane off the quadric".into()))?;
    Ok(PlaneType::C(nucleus, fits_conic(f, &local)))
}

/// Splits the planes of the quadric into type (S) and type (C) for `X`.
pub fn sc_decompose(setting: &Setting, x: &PointSet) -> Result<ScDecomposition> {
    if x.is_empty() {
        return Err(Error::Usage("(SC) decomposition of an empty set".into()));
    }
    let types: Vec<PlaneType> = (0..setting.model.planes().len())
        .into_par_iter()
        .map(|p| classify_plane(setting, x, p))
        .collect::<Result<_>>()?;
    let mut a1 = Vec::new();
    let mut a2 = Vec::new();
    let mut planes_s = Vec::new();
    let mut planes_c = Vec::new();
    for (p, t) in types.into_iter().enumerate() {
        match t {
            PlaneType::S(i) => {
                a1.push(i);
                planes_s.push(p as u32);
            }
            PlaneType::C(n, conic) => {
                a2.push(n);
                planes_c.push((p as u32, n, conic));
            }
        }
    }
    if planes_s.is_empty() || planes_c.is_empty() {
        return Err(Error::Precondition(format!(
            "X has {} planes of type (S) and {} of type (C); both must occur",
            planes_s.len(),
            planes_c.len()
        )));
    }
    Ok(ScDecomposition { a1: setting.set_of(a1), a2: setting.set_of(a2), planes_s, planes_c })
}

impl ScDecomposition {
    /// Every plane through a point of `A1` has type (S), and every plane
    /// through a point `x` of `A2` has type (C) with nucleus `x`.
    pub fn check_properties(&self, setting: &Setting) -> Result<()> {
        let m = &setting.model;
        let mut nucleus_of = vec![None; m.planes().len()];
        for &(p, n, _) in &self.planes_c {
            nucleus_of[p as usize] = Some(n);
        }
        for &x in self.a1.indices() {
            if let Some(&p) = m.planes_through(x).iter().find(|&&p| nucleus_of[p as usize].is_some()) {
                return Err(Error::Precondition(format!("plane {p} through A1 point {x} has type (C)")));
            }
        }
        for &x in self.a2.indices() {
            if let Some(&p) = m.planes_through(x).iter().find(|&&p| nucleus_of[p as usize] != Some(x)) {
                return Err(Error::Precondition(format!(
                    "plane {p} through A2 point {x} is not of type (C) with nucleus {x}"
                )));
            }
        }
        Ok(())
    }

    /// `|A2| = q^2+1-|A1|`, `|X| = (q^2+1)(q+1) - q|A1|`,
    /// `|(X \ A1) ∪ A2| = (q^2+1-|A1|)(q+2)`, as (got, expected) pairs.
    pub fn size_identities(&self, q: usize, x: &PointSet, h: &PointSet) -> [(usize, usize); 3] {
        let a1 = self.a1.len();
        [
            (self.a2.len(), q * q + 1 - a1),
            (x.len(), (q * q + 1) * (q + 1) - q * a1),
            (h.len(), (q * q + 1 - a1) * (q + 2)),
        ]
    }
}

/// `(X \ A1) ∪ A2`, after checking both properties and `A2 ∩ X = ∅`.
pub fn sc_hyperoval(setting: &Setting, dec: &ScDecomposition, x: &PointSet) -> Result<PointSet> {
    dec.check_properties(setting)?;
    if !dec.a1.is_subset(x) || !dec.a2.is_disjoint(x) {
        return Err(Error::Precondition("A1 must lie in X and A2 must avoid X".into()));
    }
    let h = x.difference(&dec.a1).union(&dec.a2);
    for (got, want) in dec.size_identities(setting.q(), x, &h) {
        consistency!(got == want, "(SC) size identity failed: {got} != {want}");
    }
    Ok(h)
}

/// `A(v) = B(v*, v)^(q-3) Q(v)`, zero on `T_p*`.
#[inline]
pub fn a_value(setting: &Setting, v: &[u8; 6]) -> u8 {
    let f = setting.field();
    let q = f.q() as u64;
    let m = &setting.model;
    let bv = m.form().bilinear(f, setting.solid.p_star().coords(), v);
    if bv == 0 {
        return 0;
    }
    f.mul(f.pow(bv, q - 3), m.form().evaluate(f, v))
}

/// `k_p`: nucleus of the conic `T_p ∩ α ∩ Q-(3,q)`, computed from the
/// restriction of the form to the plane `T_p ∩ α`.
pub fn k_p(setting: &Setting, p: u32) -> Result<ProjPoint<6>> {
    let m = &setting.model;
    let f = m.field();
    let pv = m.point(p);
    let pt = ProjPoint::new(f, *pv)?;
    if setting.base().contains(p) {
        return Ok(pt);
    }
    let beta = m.tangent_hyperplane(&pt)?.meet(setting.solid.subspace());
    consistency!(beta.rank() == 3, "T_p ∩ α is not a plane");
    let c = plane_section_coeffs(m.form(), f, beta.basis());
    let n = ternary_nucleus(f, &c).ok_or_else(|| Error::Consistency("T_p ∩ α is not a secant plane".into()))?;
    let mut v = [0u8; 6];
    for (x, r) in n.iter().zip(beta.basis()) {
        crate::projspace::add_scaled(f, &mut v, *x, r);
    }
    ProjPoint::new(f, v)
}

/// Closed formula `p' = (ωy1, ωy2, y5+y6+ωy3, y5+y6+ωy4, y3+y4, y3+y4)`.
pub fn k_p_direct(setting: &Setting, p: u32) -> Result<ProjPoint<6>> {
    let f = setting.field();
    let w = setting.solid.omega();
    let y = setting.model.point(p);
    if setting.base().contains(p) || y[1] == 0 {
        return Err(Error::Domain(format!("point {p} lies on Q-(3,q) or on T_p*")));
    }
    let s = y[4] ^ y[5];
    let t = y[2] ^ y[3];
    ProjPoint::new(f, [f.mul(w, y[0]), f.mul(w, y[1]), s ^ f.mul(w, y[2]), s ^ f.mul(w, y[3]), t, t])
}

/// `B(p) = A(k_p)` for every quadric point off `Q-(3,q)`; `None` on `Q-(3,q)`.
pub fn b_values(setting: &Setting) -> Result<Vec<Option<u8>>> {
    (0..setting.model.points().len() as u32)
        .into_par_iter()
        .map(|p| {
            if setting.base().contains(p) {
                Ok(None)
            } else {
                Ok(Some(a_value(setting, k_p(setting, p)?.coords())))
            }
        })
        .collect()
}

/// `H_λ = (Q-(3,q) \ {p*}) ∪ G_λ` from a precomputed `B` table.
pub fn h_lambda_from_table(setting: &Setting, table: &[Option<u8>], lambda: u8) -> Result<Hyperoval> {
    check_lambda(setting, lambda)?;
    let g = table.iter().enumerate().filter(|(_, b)| **b == Some(lambda)).map(|(i, _)| i as u32);
    let base = setting.base().indices().iter().copied().filter(|&i| i != setting.p_star());
    Ok(Hyperoval { construction: Construction::Lambda { lambda }, points: setting.set_of(base.chain(g)) })
}

pub fn h_lambda(setting: &Setting, lambda: u8) -> Result<Hyperoval> {
    check_lambda(setting, lambda)?;
    h_lambda_from_table(setting, &b_values(setting)?, lambda)
}

fn check_lambda(setting: &Setting, lambda: u8) -> Result<()> {
    let q = setting.q();
    if q == 2 {
        return Err(Error::Usage("the H_λ family needs q >= 4; use the q = 2 complement".into()));
    }
    if lambda == 0 || lambda as usize >= q {
        return Err(Error::Usage(format!("λ must be a nonzero element of GF({q})")));
    }
    Ok(())
}

/// Points of the quadric on
/// `λω²X2² + X3² + X4² + X5² + X6² + ω²X5X6 + ω(X3+X4)(X5+X6) = 0`.
pub fn eq1_point_set(setting: &Setting, lambda: u8) -> Result<PointSet> {
    check_lambda(setting, lambda)?;
    let f = setting.field();
    let w = setting.solid.omega();
    let w2 = f.square(w);
    let lw2 = f.mul(lambda, w2);
    let mask = setting
        .model
        .points()
        .iter()
        .map(|p| {
            let x = p.coords();
            let v = f.mul(lw2, f.square(x[1]))
                ^ f.square(x[2])
                ^ f.square(x[3])
                ^ f.square(x[4])
                ^ f.square(x[5])
                ^ f.mul(w2, f.mul(x[4], x[5]))
                ^ f.mul(w, f.mul(x[2] ^ x[3], x[4] ^ x[5]));
            v == 0
        })
        .collect();
    Ok(PointSet::from_mask(mask))
}

/// The hyperoval obtained from the equation above through the (SC) route.
pub fn h_eq1(setting: &Setting, lambda: u8) -> Result<(Hyperoval, ScDecomposition)> {
    let x = eq1_point_set(setting, lambda)?;
    let dec = sc_decompose(setting, &x)?;
    let h = sc_hyperoval(setting, &dec, &x)?;
    Ok((Hyperoval { construction: Construction::Eq1 { lambda }, points: h }, dec))
}

/// `Q+(5,2) \ T_p*`.
pub fn h_q2_complement(setting: &Setting) -> Result<Hyperoval> {
    if setting.q() != 2 {
        return Err(Error::Usage("the tangent-complement hyperoval is defined for q = 2".into()));
    }
    let pts = setting.model.points();
    let idx = (0..pts.len() as u32).filter(|&i| pts[i as usize].coords()[1] != 0);
    Ok(Hyperoval { construction: Construction::Q2Complement, points: setting.set_of(idx) })
}

/// `C_x = <L*, x> ∩ Q+(5,q)` as model indices.
pub fn conic_c_x(setting: &Setting, x: &ProjPoint<6>) -> Vec<u32> {
    let plane = setting.solid.l_star().join_vector(x.coords());
    let mut out: Vec<u32> = plane.point_vectors().iter().filter_map(|v| setting.model.index_of(v)).collect();
    out.sort_unstable();
    out
}

/// The set `X = (∪ C_x) ∪ (O ∩ Q-)` whose (SC) hyperoval is `H_O`.
pub fn ovoid_sc_set(setting: &Setting, o: &Ovoid) -> PointSet {
    let idx: Vec<u32> = o
        .points()
        .par_iter()
        .flat_map_iter(|x| {
            if setting.solid.on_base(x) {
                vec![setting.index(x).expect("base point on quadric")]
            } else {
                conic_c_x(setting, x)
            }
        })
        .collect();
    setting.set_of(idx)
}

/// `H_O = (∪_{x ∈ O \ Q-} C_x) ∪ (Q-(3,q) \ O)`.
pub fn h_from_ovoid(setting: &Setting, o: &Ovoid) -> Result<Hyperoval> {
    if o.kind() == OvoidKind::Base || o.points() == setting.solid.base_points() {
        return Err(Error::Usage("H_O needs an ovoid distinct from Q-(3,q)".into()));
    }
    if o.field().spec() != setting.field().spec() {
        return Err(Error::Usage("ovoid over a different field".into()));
    }
    let off: Vec<&ProjPoint<6>> = o.points().iter().filter(|x| !setting.solid.on_base(x)).collect();
    let conics: Vec<Vec<u32>> = off.par_iter().map(|x| conic_c_x(setting, x)).collect();
    let conic_points: usize = conics.iter().map(Vec::len).sum();
    let rest = setting.base().indices().iter().copied().filter(|&i| !o.contains(&setting.model.points()[i as usize]));
    let points = setting.set_of(conics.into_iter().flatten().chain(rest));
    consistency!(
        points.len() == conic_points + setting.base().len() - o.intersection_size(),
        "conics C_x overlap"
    );
    let (kind, b) = match o.kind() {
        OvoidKind::Classical(b) => ("classical".to_string(), Some(b.iter().map(|&x| crate::gf2h::hex(x)).collect())),
        k => (k.tag().to_string(), None),
    };
    Ok(Hyperoval {
        construction: Construction::Ovoid { kind, b, intersection: o.intersection_size() },
        points,
    })
}

/// The planes of `Π` through a point: `π_x = x^ζ ∩ Π`.
pub fn pi_x(setting: &Setting, x: &ProjPoint<6>) -> Result<Subspace<6>> {
    let f = setting.field();
    let form = setting.model.form();
    Ok(Subspace::hyperplane_from_linear_form(f, form.polar_form(f, x.coords()))?.meet(setting.solid.subspace()))
}
