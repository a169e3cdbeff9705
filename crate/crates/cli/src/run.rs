use std::fs;
use std::path::Path;

use kleinhyp::analysis::{
    classify_classical, classify_sweep, h_o_steps, kernel_span, min_size_check, orbit_count_trace_zero,
    plane_disjointness_check, recover_ovoid_auto, regular_sections_check, verify_hyperoval, Check, ScanLevel,
    VerificationReport,
};
use kleinhyp::constructions::{
    h_eq1, h_from_ovoid, h_lambda, h_q2_complement, Hyperoval, HyperovalFile, Setting,
};
use kleinhyp::gf2h::{hex, Gf2h};
use kleinhyp::ovoids::{EllipticSolid, Ovoid, OvoidFile, OvoidKind};
use kleinhyp::{Error, Result};
use serde::Serialize;
use serde_json::json;

use crate::{ClassifyArgs, ConstructArgs, CrosscheckArgs, Family, OvoidChoice, VerifyArgs};

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

fn parse_lambda(f: &Gf2h, s: Option<&str>) -> Result<u8> {
    let s = s.ok_or_else(|| Error::Usage("--lambda is required for this family".into()))?;
    let l = f.parse_hex(s)?;
    if l == 0 {
        return Err(Error::Usage("λ must be nonzero".into()));
    }
    Ok(l)
}

fn parse_b(f: &Gf2h, s: &str) -> Result<[u8; 4]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::Usage(format!("--b needs 4 comma separated elements, got {s:?}")));
    }
    let mut b = [0u8; 4];
    for (x, p) in b.iter_mut().zip(parts) {
        *x = f.parse_hex(p)?;
    }
    Ok(b)
}

fn load_ovoid(solid: &EllipticSolid, path: &Path) -> Result<Ovoid> {
    read_json::<OvoidFile>(path)?.into_ovoid(solid)
}

pub fn construct(a: ConstructArgs) -> Result<bool> {
    let setting = Setting::new(a.q)?;
    let f = setting.field();
    let family = a.family.unwrap_or(if a.q == 2 { Family::Q2 } else { Family::Lambda });
    let (h, ovoid): (Hyperoval, Option<Ovoid>) = match family {
        Family::Q2 => (h_q2_complement(&setting)?, None),
        Family::Lambda => (h_lambda(&setting, parse_lambda(f, a.lambda.as_deref())?)?, None),
        Family::Eq1 => (h_eq1(&setting, parse_lambda(f, a.lambda.as_deref())?)?.0, None),
        Family::Ovoid => {
            let o = match (&a.input, a.ovoid) {
                (Some(p), _) => load_ovoid(&setting.solid, p)?,
                (None, OvoidChoice::Tits) => setting.solid.tits_ovoid()?,
                (None, OvoidChoice::Classical) => {
                    let b = a.b.as_deref().ok_or_else(|| Error::Usage("--b is required for classical ovoids".into()))?;
                    setting.solid.classical_ovoid(parse_b(f, b)?)?
                }
            };
            (h_from_ovoid(&setting, &o)?, Some(o))
        }
    };
    let file = HyperovalFile::new(&setting, &h);
    if let Some(p) = &a.out {
        write_json(Some(p), &file)?;
    }
    if let (Some(p), Some(o)) = (&a.ovoid_out, &ovoid) {
        write_json(Some(p), &OvoidFile::from_ovoid(o))?;
    }
    let mut summary = json!({ "q": a.q, "construction": file.construction, "size": file.size });
    if let Some(o) = &ovoid {
        summary["ovoid-intersection"] = json!(o.intersection_size());
    }
    write_json(None, &summary)?;
    Ok(true)
}

/// Checks relating `H` to an ovoid `O`.
fn ovoid_checks(setting: &Setting, h: &Hyperoval, o: &Ovoid, report: &mut VerificationReport) -> Result<()> {
    report.absorb("ovoid", setting.solid.validate_ovoid(o));
    report.push(plane_disjointness_check(setting, &h.points, o));
    report.absorb("h-o", h_o_steps(setting, o, &h.points)?);
    if setting.q() >= 8 && matches!(o.kind(), OvoidKind::Classical(_)) {
        report.absorb("regular-sections", regular_sections_check(setting, &h.points, o)?);
    }
    Ok(())
}

pub fn verify(a: VerifyArgs) -> Result<bool> {
    let file: HyperovalFile = read_json(&a.input)?;
    let setting = Setting::for_field(Gf2h::from_spec(file.field)?)?;
    let h = file.into_hyperoval(&setting)?;
    let q = setting.q();
    let mut report = verify_hyperoval(&setting, &h.points);
    report.subject = format!("{}", a.input.file_name().and_then(|s| s.to_str()).unwrap_or("hyperoval"));
    report.fact("construction", &h.construction);
    report.push(min_size_check(q, &h.points));
    if let Some(p) = &a.ovoid_in {
        let o = load_ovoid(&setting.solid, p)?;
        ovoid_checks(&setting, &h, &o, &mut report)?;
    }
    if a.recover {
        let level: ScanLevel = a.scan.map(Into::into).unwrap_or(ScanLevel::default_for(q));
        let span = kernel_span(&setting, &h.points, level, a.samples, a.seed);
        report.fact("kernel-scan", level);
        report.fact("kernel-planes-scanned", span.planes_scanned);
        report.fact("kernel-u-planes", span.u_planes);
        report.fact("kernel-projdim", span.projdim());
        report.push(Check::from_witness(
            "kernel-contains-pi",
            (!span.k.contains_subspace(setting.solid.subspace())).then(|| json!({ "projdim": span.projdim() })),
        ));
        match recover_ovoid_auto(&setting, &h.points, Some(&span)) {
            Ok((o, route)) => {
                report.fact("recovery-route", route);
                report.fact("recovered-kind", o.kind().tag());
                report.fact("recovered-intersection", o.intersection_size());
                let back = h_from_ovoid(&setting, &o)?;
                report.push(Check::from_witness(
                    "recovery-round-trip",
                    (back.points != h.points).then(|| json!({ "size": back.points.len() })),
                ));
                let mut sub = VerificationReport::new("recovered");
                ovoid_checks(&setting, &h, &o, &mut sub)?;
                report.absorb("recovered", sub);
            }
            Err(e @ (Error::NotOvoid(_) | Error::NotRecoverable(_) | Error::Precondition(_))) => {
                report.push(Check::fail("recovery", json!({ "error": e.to_string() })));
            }
            Err(e) => return Err(e),
        }
    }
    write_json(a.out.as_deref(), &report)?;
    Ok(report.passed())
}

pub fn classify(a: ClassifyArgs) -> Result<bool> {
    let field = Gf2h::with_order(a.q)?;
    let solid = EllipticSolid::new(field)?;
    let mut report = VerificationReport::new(format!("classify/q={}", a.q));
    if let Some(p) = &a.input {
        let o = load_ovoid(&solid, p)?;
        report.absorb("ovoid", solid.validate_ovoid(&o));
        report.fact("intersection", o.intersection_size());
        match solid.fit_classical(&o) {
            Some(b) if b != [0; 4] => {
                report.fact("invariant", classify_classical(&solid, &o)?);
            }
            Some(_) => return Err(Error::Usage("the base quadric has no class".into())),
            None => {
                report.fact("invariant", "nonclassical");
            }
        }
        write_json(a.out.as_deref(), &report)?;
        return Ok(report.passed());
    }
    let orbits = orbit_count_trace_zero(field);
    let sweep = classify_sweep(&solid)?;
    report.fact("orbits", &orbits);
    report.fact("sweep", &sweep);
    report.push(Check::expect_eq("classes-are-orbits-plus-one", sweep.classes.len(), orbits.count + 1));
    for (name, entry) in &sweep.classes {
        let b: Vec<u8> = entry.first_b.iter().map(|s| field.parse_hex(s)).collect::<Result<_>>()?;
        let o = solid.classical_ovoid([b[0], b[1], b[2], b[3]])?;
        let mut c = solid.validate_ovoid(&o);
        c.push(Check::expect_eq("invariant", classify_classical(&solid, &o)?, entry.invariant.clone()));
        report.absorb(&format!("class {name}"), c);
    }
    write_json(a.out.as_deref(), &report)?;
    Ok(report.passed())
}

pub fn crosscheck(a: CrosscheckArgs) -> Result<bool> {
    let setting = Setting::new(a.q)?;
    let f = setting.field();
    let lambdas: Vec<u8> = if a.lambda == "all" {
        f.nonzero().collect()
    } else {
        vec![parse_lambda(f, Some(&a.lambda))?]
    };
    let mut report = VerificationReport::new(format!("crosscheck/q={}", a.q));
    for l in lambdas {
        let prefix = format!("lambda={}", hex(l));
        let hl = h_lambda(&setting, l)?;
        let (he, dec) = h_eq1(&setting, l)?;
        report.push(Check::expect_eq(
            format!("{prefix}.eq1-route-equals-h-lambda"),
            he.points.indices(),
            hl.points.indices(),
        ));
        report.push(Check::from_witness(
            format!("{prefix}.sc-decomposition"),
            dec.check_properties(&setting).err().map(|e| json!({ "error": e.to_string() })),
        ));
        let (o, route) = recover_ovoid_auto(&setting, &hl.points, None)?;
        report.fact(&format!("{prefix}.recovery-route"), route);
        report.fact(&format!("{prefix}.recovered-intersection"), o.intersection_size());
        let ho = h_from_ovoid(&setting, &o)?;
        report.push(Check::expect_eq(
            format!("{prefix}.recovered-h-o-equals-h-lambda"),
            ho.points.indices(),
            hl.points.indices(),
        ));
    }
    write_json(a.out.as_deref(), &report)?;
    Ok(report.passed())
}
