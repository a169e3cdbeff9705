//! Isomorphism of ovoids of `W(q)` under the collineations of `Π` fixing
//! `Q-(3,q)`.
//!
//! Every such collineation is `v -> σ^k(v) G_k^-1 F` for a field power
//! `σ^k`, the first orthogonal frame `G_k` of the conjugate form `Q^(σ^k)`,
//! and an orthogonal frame `F` of `Q`.

use rayon::prelude::*;

use crate::analysis::classify::{classify_classical, orthogonal_frames, OrthoFrame};
use crate::error::{consistency, Error, Result};
use crate::gf2h::Gf2h;
use crate::ovoids::{EllipticSolid, Ovoid, OvoidKind};
use crate::projspace::{normalize, point_rank, rref};
use crate::quadrics::QuadraticForm;

/// `v -> σ^k(v) M` on row vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Collineation {
    pub frobenius: u32,
    pub matrix: [[u8; 4]; 4],
}

impl Collineation {
    #[inline]
    pub fn apply(&self, f: &Gf2h, v: &[u8; 4]) -> [u8; 4] {
        let mut out = [0u8; 4];
        for (i, &x) in v.iter().enumerate() {
            let x = f.frobenius(x, self.frobenius);
            if x == 0 {
                continue;
            }
            for (o, m) in out.iter_mut().zip(&self.matrix[i]) {
                *o ^= f.mul(x, *m);
            }
        }
        out
    }

    pub fn is_linear(&self) -> bool {
        self.frobenius == 0
    }
}

fn mat_mul(f: &Gf2h, a: &[[u8; 4]; 4], b: &[[u8; 4]; 4]) -> [[u8; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).fold(0, |acc, k| acc ^ f.mul(a[i][k], b[k][j]))))
}

fn invert(f: &Gf2h, a: &[[u8; 4]; 4]) -> Option<[[u8; 4]; 4]> {
    let rows: Vec<[u8; 8]> =
        (0..4).map(|i| std::array::from_fn(|j| if j < 4 { a[i][j] } else { (j - 4 == i) as u8 })).collect();
    let red = rref(f, rows);
    if red.len() != 4 || red.iter().any(|r| r[..4] == [0; 4]) {
        return None;
    }
    Some(std::array::from_fn(|i| std::array::from_fn(|j| red[i][4 + j])))
}

fn conjugate_form(f: &Gf2h, form: &QuadraticForm<4>, k: u32) -> QuadraticForm<4> {
    QuadraticForm::new(form.coeffs().map(|row| row.map(|x| f.frobenius(x, k))))
}

/// The stabilizer of `Q-(3,q)` in `PΓL(4,q)`, enumerated through frames.
pub struct Stabilizer {
    field: &'static Gf2h,
    frames: Vec<OrthoFrame>,
    inverses: Vec<[[u8; 4]; 4]>,
}

impl Stabilizer {
    pub fn new(solid: &EllipticSolid) -> Result<Self> {
        let f = solid.field();
        let delta = f.pick_delta_trace_one();
        let frames = orthogonal_frames(f, solid.local_form(), delta);
        let q = f.q();
        consistency!(
            frames.len() == 2 * q * q * (q * q + 1) * (q * q - 1),
            "Q- has {} orthogonal frames",
            frames.len()
        );
        let mut inverses = Vec::with_capacity(f.h() as usize);
        for k in 0..f.h() {
            let conj = conjugate_form(f, solid.local_form(), k);
            let g = orthogonal_frames(f, &conj, delta)
                .into_iter()
                .next()
                .ok_or_else(|| Error::Consistency("conjugate form has no frame".into()))?;
            inverses.push(invert(f, &g).ok_or_else(|| Error::Consistency("singular frame".into()))?);
        }
        Ok(Self { field: f, frames, inverses })
    }

    pub fn order(&self) -> usize {
        self.frames.len() * self.inverses.len()
    }

    pub fn element(&self, index: usize) -> Collineation {
        let k = index / self.frames.len();
        let frame = &self.frames[index % self.frames.len()];
        Collineation { frobenius: k as u32, matrix: mat_mul(self.field, &self.inverses[k], frame) }
    }

    /// First element in enumeration order mapping `O1` onto `O2`.
    pub fn find_mapping(&self, solid: &EllipticSolid, o1: &Ovoid, o2: &Ovoid) -> Option<Collineation> {
        let f = self.field;
        let q = f.q();
        let pts: Vec<[u8; 4]> = o1.points().iter().map(|p| solid.local(p.coords())).collect();
        (0..self.order()).into_par_iter().find_first(|&i| {
            let g = self.element(i);
            pts.iter().all(|v| {
                let w = normalize(f, &g.apply(f, v)).expect("collineation is invertible");
                o2.contains_local(point_rank(q, &w))
            })
        })
        .map(|i| self.element(i))
    }
}

/// The image of `O` under `g`, with its kind refitted.
pub fn image_of(solid: &EllipticSolid, g: &Collineation, o: &Ovoid) -> Result<Ovoid> {
    let f = solid.field();
    let pts = o
        .points()
        .iter()
        .map(|p| solid.lift(&g.apply(f, &solid.local(p.coords()))))
        .collect::<Result<Vec<_>>>()?;
    let image = solid.ovoid_fitted(&pts)?;
    if o.kind() == OvoidKind::Tits && image.kind() == OvoidKind::Unknown {
        return solid.ovoid_from_points(OvoidKind::Tits, &pts);
    }
    Ok(image)
}

/// Largest `q` for which two nonclassical ovoids are compared by search.
pub const SEARCH_LIMIT_Q: usize = 8;

/// Whether a collineation of `Π` fixing `Q-(3,q)` maps `O1` to `O2`.
/// Classical pairs compare invariants; nonclassical pairs are searched for
/// `q <= 8` and give `None` above that.
pub fn are_isomorphic(solid: &EllipticSolid, o1: &Ovoid, o2: &Ovoid) -> Result<Option<bool>> {
    let fit = |o: &Ovoid| match o.kind() {
        OvoidKind::Classical(b) => Some(b),
        _ => solid.fit_classical(o),
    };
    let (b1, b2) = (fit(o1), fit(o2));
    if b1 == Some([0; 4]) || b2 == Some([0; 4]) {
        return Err(Error::Usage("isomorphism is only defined between ovoids other than Q-(3,q)".into()));
    }
    if o1.same_points(o2) {
        return Ok(Some(true));
    }
    match (b1, b2) {
        (Some(_), Some(_)) => Ok(Some(classify_classical(solid, o1)? == classify_classical(solid, o2)?)),
        (Some(_), None) | (None, Some(_)) => Ok(Some(false)),
        (None, None) => {
            if o1.intersection_size() != o2.intersection_size() {
                return Ok(Some(false));
            }
            if solid.field().q() > SEARCH_LIMIT_Q {
                return Ok(None);
            }
            Ok(Some(Stabilizer::new(solid)?.find_mapping(solid, o1, o2).is_some()))
        }
    }
}
