//! Built-in scenarios. Center classes and expected values are closed forms in
//! the parameters.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{apply_isometry, DivisorClass};
use crate::linalg::{int, ints, Int};
use crate::models::{oguiso_hyperplane, oguiso_lattice, oguiso_translation, wehler_lattice};
use crate::snc::AmbientKind;
use crate::wehler::power_closed_form;

use super::{CertificateRequest, ComponentSpec, Expectation, IntOrParam, LatticeSpec, Scenario, TwistSpec, Value};

pub const PRESETS: [&str; 6] = ["main", "arbitrary_b2", "double_blowup", "oguiso", "quartic_rho3", "identity_control"];

/// Default enumeration bound for (−2)-classes in Oguiso certificates.
pub const DEFAULT_Z_BOUND: i64 = 50;

struct Params<'a> {
    preset: &'a str,
    given: &'a BTreeMap<String, i64>,
    allowed: &'a [&'a str],
}

impl Params<'_> {
    fn check_names(&self) -> Result<()> {
        for k in self.given.keys() {
            if !self.allowed.contains(&k.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "preset `{}` takes parameters {:?}, got `{k}`",
                    self.preset, self.allowed
                )));
            }
        }
        Ok(())
    }

    fn required(&self, name: &str) -> Result<i64> {
        self.given.get(name).copied().ok_or_else(|| Error::UnboundParameter(name.into()))
    }

    fn optional(&self, name: &str, default: i64) -> i64 {
        self.given.get(name).copied().unwrap_or(default)
    }
}

fn expect(name: &str, v: Value) -> Expectation {
    Expectation { name: name.into(), expected: v }
}

fn positive(preset: &str, name: &str, v: i64) -> Result<()> {
    if v < 1 {
        return Err(Error::Scenario(format!("{preset}: {name} must be a positive integer, got {v}")));
    }
    Ok(())
}

fn p1p1p1(centers: Vec<Vec<Int>>) -> ComponentSpec {
    ComponentSpec { ambient: AmbientKind::P1P1P1, hyperplane: None, centers }
}

fn p3(centers: Vec<Vec<Int>>) -> ComponentSpec {
    ComponentSpec { ambient: AmbientKind::P3, hyperplane: None, centers }
}

fn fibers(count: i64) -> Vec<Vec<Int>> {
    (0..count).map(|_| ints(&[1, 0, 0])).collect()
}

pub fn preset(name: &str, given: &BTreeMap<String, i64>) -> Result<Scenario> {
    let s = match name {
        "main" => main(&Params { preset: name, given, allowed: &["a"] })?,
        "arbitrary_b2" => arbitrary_b2(&Params { preset: name, given, allowed: &["a", "c"] })?,
        "double_blowup" => double_blowup(&Params { preset: name, given, allowed: &["a"] })?,
        "oguiso" => oguiso(&Params { preset: name, given, allowed: &["a", "k", "z_bound"] })?,
        "quartic_rho3" => quartic_rho3(&Params { preset: name, given, allowed: &[] })?,
        "identity_control" => identity_control(&Params { preset: name, given, allowed: &[] })?,
        _ => return Err(Error::UnknownPreset(name.into())),
    };
    s.validate()?;
    Ok(s)
}

/// P(3) blown up along a fibers of class e₁ and a curve of class
/// (16a²−a+4, 4−8a, 4+8a), glued to P(3) by (ι^a)*.
fn main(p: &Params<'_>) -> Result<Scenario> {
    p.check_names()?;
    let a = p.required("a")?;
    positive(p.preset, "a", a)?;
    let center = vec![int(16) * a * a - a + 4, int(4) - int(8) * a, int(4) + int(8) * a];
    let mut centers = fibers(a);
    centers.push(center.clone());
    let a2 = int(a) * a;
    Ok(Scenario {
        name: "main".into(),
        parameters: p.given.clone(),
        lattice: LatticeSpec::Wehler,
        twist: TwistSpec::WehlerIotaPower { power: IntOrParam::Param("a".into()) },
        x1: p1p1p1(centers),
        x2: p1p1p1(vec![]),
        certificates: vec![CertificateRequest::WehlerAmpleFree { class: center }],
        expectations: vec![
            expect("d_semistable", Value::text("true")),
            expect("b2_x0", Value::int(a + 4)),
            expect("b2_x", Value::int(a + 3)),
            expect("e_x", Value::Int(int(-256) * &a2 + 32 * a - 224)),
            expect("certificates_pass", Value::text("true")),
            expect("classification", Value::text("FiberRayOnly")),
            expect("kodaira_bound", Value::int(1)),
            expect("algdim", Value::int(1)),
        ],
        notes: vec![],
    })
}

/// As `main` with c fibers instead of a, and the last center adjusted.
fn arbitrary_b2(p: &Params<'_>) -> Result<Scenario> {
    p.check_names()?;
    let a = p.required("a")?;
    let c = p.required("c")?;
    positive(p.preset, "a", a)?;
    positive(p.preset, "c", c)?;
    let bound = int(8) * a * a + 6;
    if int(c) >= bound {
        return Err(Error::Scenario(format!("arbitrary_b2: need c < 8a^2 + 6 = {bound}, got c = {c}")));
    }
    let center = vec![int(16) * a * a + 4 - c, int(4) - int(8) * a, int(4) + int(8) * a];
    let mut centers = fibers(c);
    centers.push(center.clone());
    Ok(Scenario {
        name: "arbitrary_b2".into(),
        parameters: p.given.clone(),
        lattice: LatticeSpec::Wehler,
        twist: TwistSpec::WehlerIotaPower { power: IntOrParam::Param("a".into()) },
        x1: p1p1p1(centers),
        x2: p1p1p1(vec![]),
        certificates: vec![CertificateRequest::WehlerAmpleFree { class: center }],
        expectations: vec![
            expect("d_semistable", Value::text("true")),
            expect("b2_x", Value::int(c + 3)),
            expect("e_x", Value::Int(int(-224) - int(32) * (int(8) * a * a - c))),
            expect("certificates_pass", Value::text("true")),
        ],
        notes: vec![],
    })
}

/// Both components blown up: 8a² fibers and C₁ = (4a²+2, 2−4a, 2+4a) on X₁,
/// C₂ = (ι^{−a})*C₁ on X₂.
fn double_blowup(p: &Params<'_>) -> Result<Scenario> {
    p.check_names()?;
    let a = p.required("a")?;
    positive(p.preset, "a", a)?;
    let s = wehler_lattice();
    let c1 = vec![int(4) * a * a + 2, int(2) - int(4) * a, int(2) + int(4) * a];
    let c2 = apply_isometry(&power_closed_form(&s, -a), &DivisorClass::new(&s, c1.clone())?)?.into_coords();
    let mut centers = fibers(8 * a * a);
    centers.push(c1.clone());
    Ok(Scenario {
        name: "double_blowup".into(),
        parameters: p.given.clone(),
        lattice: LatticeSpec::Wehler,
        twist: TwistSpec::WehlerIotaPower { power: IntOrParam::Param("a".into()) },
        x1: p1p1p1(centers),
        x2: p1p1p1(vec![c2.clone()]),
        certificates: vec![
            CertificateRequest::WehlerAmpleFree { class: c1 },
            CertificateRequest::WehlerAmpleFree { class: c2 },
        ],
        expectations: vec![
            expect("d_semistable", Value::text("true")),
            expect("certificates_pass", Value::text("true")),
            expect("nonprojective", Value::text("true")),
        ],
        notes: vec![],
    })
}

/// P³ blown up along a fibers f and a member of |4l − a f| with
/// l = h + (ι^a)*h, glued to P³ by the translation (ι^a)*.
fn oguiso(p: &Params<'_>) -> Result<Scenario> {
    p.check_names()?;
    let a = p.required("a")?;
    positive(p.preset, "a", a)?;
    let k = p.optional("k", a);
    let z_bound = p.optional("z_bound", DEFAULT_Z_BOUND);
    let s = oguiso_lattice();
    let h = oguiso_hyperplane(&s);
    let l = h.add(&apply_isometry(&oguiso_translation(&s, a), &h)?)?;
    let f = DivisorClass::basis(&s, 0);
    let center = l.scale(&int(4)).sub(&f.scale(&int(a)))?.into_coords();
    let mut centers = fibers(a);
    centers.push(center.clone());
    Ok(Scenario {
        name: "oguiso".into(),
        parameters: p.given.clone(),
        lattice: LatticeSpec::Oguiso,
        twist: TwistSpec::OguisoTranslation { power: IntOrParam::Param("a".into()) },
        x1: p3(centers),
        x2: p3(vec![]),
        certificates: vec![
            CertificateRequest::OguisoAmple { a, k, z_bound },
            CertificateRequest::OguisoCenterFree { a, k, z_bound, class: center },
        ],
        expectations: vec![
            expect("d_semistable", Value::text("true")),
            expect("b2_x0", Value::int(a)),
            expect("b2_x", Value::int(a - 1)),
            expect("certificates_pass", Value::text("true")),
            expect("classification", Value::text("TrivialOnly")),
            expect("algdim", Value::int(0)),
        ],
        notes: vec![],
    })
}

/// Quartic with two centers in |O_S(2)| on each side. The automorphism g is
/// not specified by the construction; this preset uses the translation of the
/// elliptic quartic above (a = 1) as sample data.
fn quartic_rho3(p: &Params<'_>) -> Result<Scenario> {
    p.check_names()?;
    let s = oguiso_lattice();
    let two_h = oguiso_hyperplane(&s).scale(&int(2)).into_coords();
    Ok(Scenario {
        name: "quartic_rho3".into(),
        parameters: p.given.clone(),
        lattice: LatticeSpec::Oguiso,
        twist: TwistSpec::OguisoTranslation { power: IntOrParam::Int(1) },
        x1: p3(vec![two_h.clone(), two_h.clone()]),
        x2: p3(vec![two_h.clone(), two_h]),
        certificates: vec![],
        expectations: vec![
            expect("d_semistable", Value::text("true")),
            expect("b2_x0", Value::int(4)),
            expect("b2_x", Value::int(3)),
            expect("algdim", Value::int(1)),
        ],
        notes: vec![
            "sample restriction data: g* is the translation matrix of the elliptic quartic (a = 1); any g with g*h not proportional to h gives the same ranks".into(),
        ],
    })
}

/// Untwisted gluing of two unblown P(3); projective, used as a control.
fn identity_control(p: &Params<'_>) -> Result<Scenario> {
    p.check_names()?;
    Ok(Scenario {
        name: "identity_control".into(),
        parameters: p.given.clone(),
        lattice: LatticeSpec::Wehler,
        twist: TwistSpec::Identity,
        x1: p1p1p1(vec![]),
        x2: p1p1p1(vec![]),
        certificates: vec![],
        expectations: vec![
            expect("b2_x0", Value::int(3)),
            expect("classification", Value::text("BigPairExists")),
            expect("nonprojective", Value::text("false")),
        ],
        notes: vec!["not d-semistable: N1 + N2 = (4, 4, 4); used only for the projectivity classifier".into()],
    })
}
