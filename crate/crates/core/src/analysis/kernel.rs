use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{PointSet, Setting};
use crate::error::{Error, Result};
use crate::ovoids::Ovoid;
use crate::projspace::{add_scaled, project_from, Frame, ProjPoint, Subspace};
use crate::quadrics::{plane_section_coeffs, ternary_nucleus};

/// How many planes of `PG(5,q)` a kernel-span scan looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanLevel {
    /// Every plane of `PG(5,q)`.
    Exhaustive,
    /// Planes through `L*` and planes inside `Π`.
    Classes,
    /// The two classes plus uniformly random planes.
    Sample,
}

impl ScanLevel {
    pub fn default_for(q: usize) -> Self {
        match q {
            0..=4 => ScanLevel::Exhaustive,
            8 => ScanLevel::Sample,
            _ => ScanLevel::Classes,
        }
    }
}

pub const DEFAULT_SAMPLES: usize = 100_000;

/// Planes `π` with `π ∩ Q+ = π ∩ H` an irreducible conic, their nuclei, and
/// the span `K` of the nuclei.
#[derive(Clone, Debug)]
pub struct KernelSpan {
    pub level: ScanLevel,
    pub planes_scanned: u64,
    pub u_planes: u64,
    pub nuclei: Vec<ProjPoint<6>>,
    pub k: Subspace<6>,
}

impl KernelSpan {
    pub fn projdim(&self) -> isize {
        self.k.projdim()
    }

    /// True when the scan covered every plane of `PG(5,q)`.
    pub fn is_exhaustive(&self) -> bool {
        self.level == ScanLevel::Exhaustive
    }
}

/// The nucleus of `π ∩ Q+` if `π` is in `U` for `H`.
fn u_nucleus(setting: &Setting, h: &PointSet, plane: &Subspace<6>) -> Option<[u8; 6]> {
    let m = &setting.model;
    let f = m.field();
    let rows = plane.basis();
    let c = plane_section_coeffs(m.form(), f, rows);
    let n = ternary_nucleus(f, &c)?;
    for v in plane.point_vectors() {
        if let Some(i) = m.index_of(&v) {
            if !h.contains(i) {
                return None;
            }
        }
    }
    let mut v = [0u8; 6];
    for (x, r) in n.iter().zip(rows) {
        add_scaled(f, &mut v, *x, r);
    }
    Some(v)
}

fn class_planes(setting: &Setting) -> Vec<Subspace<6>> {
    let f = setting.field();
    let solid = &setting.solid;
    let through_l: Vec<Subspace<6>> =
        solid.subspace().point_vectors().iter().map(|x| solid.l_star().join_vector(x)).collect();
    let frame: &Frame<6, 4> = solid.frame();
    let inside: Vec<Subspace<6>> = Subspace::<4>::empty(f)
        .subspaces_through(2)
        .map(|p| Subspace::span(f, p.basis().iter().map(|r| frame.vector(r))))
        .collect();
    through_l.into_iter().chain(inside).collect()
}

fn random_planes(setting: &Setting, n: usize, seed: u64) -> Vec<Subspace<6>> {
    let f = setting.field();
    let q = f.q();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let rows: [[u8; 6]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..q) as u8));
        let s = Subspace::span(f, rows);
        if s.rank() == 3 {
            out.push(s);
        }
    }
    out
}

/// Scans candidate planes for `U` and spans their nuclei.
pub fn kernel_span(setting: &Setting, h: &PointSet, level: ScanLevel, samples: usize, seed: u64) -> KernelSpan {
    let f = setting.field();
    let collect = |found: Vec<[u8; 6]>| -> BTreeSet<ProjPoint<6>> {
        found.into_iter().map(|v| ProjPoint::new(f, v).expect("nucleus is nonzero")).collect()
    };
    let (scanned, u, nuclei) = match level {
        ScanLevel::Exhaustive => {
            let found: Vec<Option<[u8; 6]>> = Subspace::<6>::empty(f)
                .subspaces_through(2)
                .par_bridge()
                .map(|p| u_nucleus(setting, h, &p))
                .collect();
            let scanned = found.len() as u64;
            let hits: Vec<[u8; 6]> = found.into_iter().flatten().collect();
            (scanned, hits.len() as u64, collect(hits))
        }
        ScanLevel::Classes | ScanLevel::Sample => {
            let mut planes = class_planes(setting);
            if level == ScanLevel::Sample {
                planes.extend(random_planes(setting, samples, seed));
            }
            let hits: Vec<[u8; 6]> = planes.par_iter().filter_map(|p| u_nucleus(setting, h, p)).collect();
            (planes.len() as u64, hits.len() as u64, collect(hits))
        }
    };
    let nuclei: Vec<ProjPoint<6>> = nuclei.into_iter().collect();
    let k = Subspace::span(f, nuclei.iter().map(|p| *p.coords()));
    KernelSpan { level, planes_scanned: scanned, u_planes: u, nuclei, k }
}

/// `O = (Q- \ X1) ∪ X2` for a known solid `S` meeting the quadric in `Q-`:
/// `X1 = S ∩ H` and `X2` the projection of `H \ S` from `S^ζ` onto `S`.
pub fn recover_ovoid_in(setting: &Setting, h: &PointSet, solid: &Subspace<6>) -> Result<Ovoid> {
    if solid.rank() != 4 {
        return Err(Error::NotRecoverable(solid.projdim()));
    }
    if solid != setting.solid.subspace() {
        return Err(Error::Precondition("recovery solid differs from the model's Π".into()));
    }
    let m = &setting.model;
    let centre = m.polarity().perp(solid);
    let pts = m.points();
    let x1: BTreeSet<ProjPoint<6>> =
        h.indices().iter().map(|&i| pts[i as usize]).filter(|p| solid.contains(p)).collect();
    let x2: BTreeSet<ProjPoint<6>> = h
        .indices()
        .par_iter()
        .map(|&i| pts[i as usize])
        .filter(|p| !solid.contains(p))
        .map(|p| project_from(&centre, &p, solid))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let points: Vec<ProjPoint<6>> = setting
        .solid
        .base_points()
        .iter()
        .filter(|p| !x1.contains(p))
        .copied()
        .chain(x2)
        .collect();
    setting.solid.ovoid_fitted(&points)
}

/// Recovery through the kernel span; requires `dim K = 3`.
pub fn recover_ovoid(setting: &Setting, h: &PointSet, span: &KernelSpan) -> Result<Ovoid> {
    if span.k.projdim() != 3 {
        return Err(Error::NotRecoverable(span.k.projdim()));
    }
    recover_ovoid_in(setting, h, &span.k)
}

/// Which argument identified the solid used for recovery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryRoute {
    /// The kernel span is a solid.
    KernelSpan,
    /// The special points of the regular hyperoval sections span a solid
    /// (`q >= 8`).
    SpecialPoints,
    /// The solid of the construction, used when neither route applies.
    KnownSolid,
}

/// For every generator plane meeting `H` in `q+2` points, the points whose
/// removal leaves an irreducible conic.
pub fn special_points(setting: &Setting, h: &PointSet) -> Vec<(u32, Vec<u32>)> {
    let m = &setting.model;
    let f = setting.field();
    let q = setting.q();
    m.planes()
        .par_iter()
        .enumerate()
        .filter_map(|(pi, gp)| {
            let hits: Vec<u32> = gp.points.iter().copied().filter(|&i| h.contains(i)).collect();
            if hits.len() != q + 2 {
                return None;
            }
            let frame = Frame::<6, 3>::new(&gp.subspace).expect("plane");
            let local: Vec<[u8; 3]> = hits.iter().map(|&i| frame.coords(m.point(i))).collect();
            let special = (0..hits.len())
                .filter(|&k| {
                    let rest: Vec<[u8; 3]> =
                        local.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, x)| *x).collect();
                    crate::quadrics::fits_conic(f, &rest)
                })
                .map(|k| hits[k])
                .collect();
            Some((pi as u32, special))
        })
        .collect()
}

/// Recovers `O` from `H_O`: through `K` when it is a solid, else through
/// the span of the special points when every `(q+2)`-section has exactly one
/// (only for `q >= 8`), else inside the known `Π`.
pub fn recover_ovoid_auto(setting: &Setting, h: &PointSet, span: Option<&KernelSpan>) -> Result<(Ovoid, RecoveryRoute)> {
    if let Some(span) = span {
        if span.k.projdim() == 3 {
            return Ok((recover_ovoid(setting, h, span)?, RecoveryRoute::KernelSpan));
        }
    }
    if setting.q() >= 8 {
        let sp = special_points(setting, h);
        if !sp.is_empty() && sp.iter().all(|(_, s)| s.len() == 1) {
            let f = setting.field();
            let solid = Subspace::span(f, sp.iter().map(|(_, s)| *setting.model.point(s[0])));
            if solid.rank() == 4 {
                return Ok((recover_ovoid_in(setting, h, &solid)?, RecoveryRoute::SpecialPoints));
            }
        }
    }
    Ok((recover_ovoid_in(setting, h, setting.solid.subspace())?, RecoveryRoute::KnownSolid))
}
