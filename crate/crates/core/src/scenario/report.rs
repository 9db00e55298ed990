//! Pipeline execution, reports and sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::{
    free_system_certificate, oguiso_ample_certificate, oguiso_l_prime, wehler_is_ample, AmpleCertificate,
    FreeCertificate, FreeDecomposition,
};
use crate::error::{Error, Result};
use crate::invariants::{invariant_report, InvariantReport};
use crate::lattice::DivisorClass;
use crate::models::K3Model;
use crate::projectivity::{
    algdim_evidence, classify, nonprojectivity_report, AlgDim, AlgDimEvidence, KodairaBound, NonProjectivityReport,
    ProjectivityVerdict,
};
use crate::snc::{hypothesis_report, HypothesisReport};

use super::{build, presets, CertificateRequest, Scenario, Stage, Value};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateRecord {
    Ample(AmpleCertificate),
    Free(FreeCertificate),
}

impl CertificateRecord {
    pub fn holds(&self) -> bool {
        match self {
            CertificateRecord::Ample(c) => c.ample,
            CertificateRecord::Free(c) => c.free,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationResult {
    pub name: String,
    pub expected: Value,
    pub actual: Option<Value>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: Scenario,
    pub parameters: BTreeMap<String, i64>,
    pub checks: Vec<Stage>,
    pub hypotheses: Option<HypothesisReport>,
    pub invariants: Option<InvariantReport>,
    pub certificates: Vec<CertificateRecord>,
    pub projectivity: Option<ProjectivityVerdict>,
    pub nonprojectivity: Option<NonProjectivityReport>,
    pub algdim: Option<AlgDimEvidence>,
    pub expectations: Vec<ExpectationResult>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Observed value of an expectation metric, if its stage ran.
    pub fn metric(&self, name: &str) -> Option<Value> {
        let inv = self.invariants.as_ref();
        match name {
            "d_semistable" => self.hypotheses.as_ref().map(|h| Value::text(h.d_semistable.satisfied.to_string())),
            "hypotheses_hold" => self.hypotheses.as_ref().map(|h| Value::text(h.all_satisfied().to_string())),
            "b2_x0" => inv.map(|r| Value::int(r.b2_x0 as i64)),
            "b2_x" => inv.map(|r| Value::int(r.b2_x as i64)),
            "e_x1" => inv.map(|r| Value::Int(r.e_x1.clone())),
            "e_x2" => inv.map(|r| Value::Int(r.e_x2.clone())),
            "e_x0" => inv.map(|r| Value::Int(r.e_x0.clone())),
            "e_x" => inv.map(|r| Value::Int(r.e_x.clone())),
            "certificates_pass" => self
                .checks
                .contains(&Stage::Ample)
                .then(|| Value::text(self.certificates.iter().all(CertificateRecord::holds).to_string())),
            "classification" => self.projectivity.as_ref().map(|p| Value::text(format!("{:?}", p.classification))),
            "kodaira_bound" => self.projectivity.as_ref().map(|p| match p.kodaira_bound {
                KodairaBound::Bounded(k) => Value::int(k as i64),
                KodairaBound::Unbounded => Value::text("unbounded"),
            }),
            "compatible_rank" => self.projectivity.as_ref().map(|p| Value::int(p.compatible_rank as i64)),
            "nonprojective" => self.nonprojectivity.as_ref().map(|n| Value::text(n.obstructed.to_string())),
            "algdim" => self.algdim.as_ref().map(|a| match a.value {
                AlgDim::Zero => Value::int(0),
                AlgDim::One => Value::int(1),
                AlgDim::Inconclusive => Value::text("inconclusive"),
            }),
            _ => None,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "scenario {} [{}]", self.scenario.name, params.join(", "));
        for n in &self.scenario.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        if let Some(h) = &self.hypotheses {
            let _ = writeln!(out, "hypotheses");
            let _ = writeln!(out, "  d-semistable: {} ({})", h.d_semistable.satisfied, h.d_semistable.detail);
            let _ = writeln!(out, "  omega trivial: {} [{}]", h.omega_trivial.satisfied, h.omega_trivial.basis);
            let _ = writeln!(out, "  cohomology vanishing: {} [{}]", h.cohomology_vanishing.satisfied, h.cohomology_vanishing.basis);
        }
        if let Some(r) = &self.invariants {
            let _ = writeln!(out, "invariants");
            let _ = writeln!(out, "  e(X1) = {}, e(X2) = {}, e(X0) = {}, e(X) = {}", r.e_x1, r.e_x2, r.e_x0, r.e_x);
            let lb = if r.b2_x_is_lower_bound { " (lower bound)" } else { "" };
            let _ = writeln!(out, "  b2(X0) = {}, b2(X) = {}{lb}", r.b2_x0, r.b2_x);
            for w in &r.warnings {
                let _ = writeln!(out, "  warning: {w}");
            }
        }
        if self.checks.contains(&Stage::Ample) {
            let _ = writeln!(out, "certificates");
            for c in &self.certificates {
                match c {
                    CertificateRecord::Ample(a) => {
                        let _ = writeln!(out, "  ample {:?} on {}: {}", a.class, a.lattice, a.ample);
                        for ch in &a.checks {
                            let _ = writeln!(out, "    {}: {} [{}]", ch.description, ch.value, if ch.satisfied { "ok" } else { "FAIL" });
                        }
                    }
                    CertificateRecord::Free(f) => {
                        let _ = writeln!(out, "  free {:?} on {}: {} ({:?})", f.class, f.lattice, f.free, f.rule);
                    }
                }
            }
        }
        if let Some(p) = &self.projectivity {
            let _ = writeln!(out, "projectivity");
            let kb = match p.kodaira_bound {
                KodairaBound::Bounded(k) => k.to_string(),
                KodairaBound::Unbounded => "unbounded".into(),
            };
            let _ = writeln!(out, "  classification: {:?}, kodaira bound {kb}", p.classification);
            if let Some(w) = &p.witness {
                let _ = writeln!(out, "  witness: L1 = {:?}, L2 = {:?}, restriction {:?} (square {})", w.l1, w.l2, w.restriction, w.restriction_square);
            }
            for line in &p.certificate {
                let _ = writeln!(out, "    {line}");
            }
        }
        if let Some(n) = &self.nonprojectivity {
            let _ = writeln!(out, "  {}", n.statement);
        }
        if let Some(a) = &self.algdim {
            let _ = writeln!(out, "algebraic dimension evidence: {:?} ({})", a.value, a.label);
        }
        if !self.expectations.is_empty() {
            let _ = writeln!(out, "expectations");
            for e in &self.expectations {
                let actual = e.actual.as_ref().map_or("-".to_string(), ToString::to_string);
                let _ = writeln!(out, "  {:<18} expected {:<14} actual {:<14} {}", e.name, e.expected.to_string(), actual, if e.pass { "pass" } else { "FAIL" });
            }
        }
        let _ = writeln!(out, "result: {}", if self.passed { "pass" } else { "FAIL" });
        out
    }
}

/// Stage whose output a metric reads.
pub fn metric_stage(name: &str) -> Option<Stage> {
    Some(match name {
        "d_semistable" | "hypotheses_hold" => Stage::Hypotheses,
        "b2_x0" | "b2_x" | "e_x1" | "e_x2" | "e_x0" | "e_x" => Stage::Invariants,
        "certificates_pass" => Stage::Ample,
        "classification" | "kodaira_bound" | "compatible_rank" | "nonprojective" | "algdim" => Stage::Projectivity,
        _ => return None,
    })
}

fn in_stage<T>(stage: Stage, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Resource(m) => Error::Resource(format!("{}: {m}", stage.name())),
        other => Error::Scenario(format!("{}: {other}", stage.name())),
    })
}

fn certificate(model: &K3Model, req: &CertificateRequest) -> Result<Vec<CertificateRecord>> {
    Ok(match req {
        CertificateRequest::WehlerAmpleFree { class } => {
            let d = DivisorClass::new(&model.lattice, class.clone())?;
            vec![
                CertificateRecord::Ample(wehler_is_ample(&d)?),
                CertificateRecord::Free(free_system_certificate(model, &d, None)?),
            ]
        }
        CertificateRequest::OguisoAmple { a, k, z_bound } => {
            vec![CertificateRecord::Ample(oguiso_ample_certificate(*a, *k, *z_bound)?)]
        }
        CertificateRequest::OguisoCenterFree { a, k, z_bound, class } => {
            let d = DivisorClass::new(&model.lattice, class.clone())?;
            let ample = oguiso_ample_certificate(*a, *k, *z_bound)?;
            debug_assert_eq!(ample.class, oguiso_l_prime(*a, *k).into_coords());
            let dec = FreeDecomposition {
                multiple: 4,
                ample,
                fiber: DivisorClass::basis(&model.lattice, 0),
                fiber_multiple: 4 * k - a,
            };
            vec![CertificateRecord::Free(free_system_certificate(model, &d, Some(&dec))?)]
        }
    })
}

/// Runs the requested stages and evaluates the expectations whose stage ran.
pub fn run(s: &Scenario, checks: &[Stage]) -> Result<Report> {
    let mut checks: Vec<Stage> = checks.to_vec();
    checks.sort();
    checks.dedup();
    let built = build(s)?;
    let g = &built.gluing;
    let has = |st: Stage| checks.contains(&st);

    let hypotheses = has(Stage::Hypotheses).then(|| hypothesis_report(g));
    let mut certificates = Vec::new();
    if has(Stage::Ample) {
        for req in &s.certificates {
            certificates.extend(in_stage(Stage::Ample, certificate(&built.model, req))?);
        }
    }
    let invariants = has(Stage::Invariants).then(|| invariant_report(g));
    let (projectivity, nonprojectivity, algdim) = if has(Stage::Projectivity) {
        let v = in_stage(Stage::Projectivity, classify(g))?;
        let n = nonprojectivity_report(&v);
        let a = algdim_evidence(&v);
        (Some(v), Some(n), Some(a))
    } else {
        (None, None, None)
    };

    let mut report = Report {
        scenario: s.clone(),
        parameters: s.parameters.clone(),
        checks,
        hypotheses,
        invariants,
        certificates,
        projectivity,
        nonprojectivity,
        algdim,
        expectations: Vec::new(),
        passed: true,
    };
    for e in &s.expectations {
        let stage = metric_stage(&e.name).ok_or_else(|| Error::Scenario(format!("unknown metric `{}`", e.name)))?;
        if !report.checks.contains(&stage) {
            continue;
        }
        let actual = report.metric(&e.name);
        let pass = actual.as_ref() == Some(&e.expected);
        report.expectations.push(ExpectationResult { name: e.name.clone(), expected: e.expected.clone(), actual, pass });
    }
    report.passed = report.expectations.iter().all(|e| e.pass);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

impl ErrorRecord {
    fn from_error(e: &Error) -> Self {
        let kind = match e {
            Error::Resource(_) => "resource",
            _ => "input",
        };
        ErrorRecord { kind: kind.into(), message: e.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepItem {
    pub parameters: BTreeMap<String, i64>,
    pub status: String,
    pub b2_x: Option<usize>,
    #[serde(default, with = "crate::serde_int::opt_int")]
    pub e_x: Option<crate::linalg::Int>,
    pub classification: Option<String>,
    /// Closed-form comparisons from the preset's expectations.
    pub expectations: Vec<ExpectationResult>,
    pub error: Option<ErrorRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<Box<Report>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepResult {
    pub preset: String,
    pub parameter: String,
    pub items: Vec<SweepItem>,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

impl SweepResult {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sweep {} over {}: {} pass, {} fail, {} error", self.preset, self.parameter, self.passed, self.failed, self.errors);
        for it in &self.items {
            let params: Vec<String> = it.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let cmp: Vec<String> = it
                .expectations
                .iter()
                .map(|e| format!("{}={}{}", e.name, e.expected, if e.pass { "" } else { "(!)" }))
                .collect();
            let _ = write!(out, "  {:<16} {:<5}", params.join(","), it.status);
            if let Some(err) = &it.error {
                let _ = writeln!(out, " {}", err.message);
            } else {
                let _ = writeln!(out, " {}", cmp.join(" "));
            }
        }
        out
    }
}

/// One run per value of `parameter` in `lo..=hi`, in parallel, reported in
/// parameter order. Item errors are recorded and the sweep continues.
pub fn sweep(
    preset: &str,
    fixed: &BTreeMap<String, i64>,
    parameter: &str,
    lo: i64,
    hi: i64,
    checks: &[Stage],
    keep_reports: bool,
) -> Result<SweepResult> {
    if !presets::PRESETS.contains(&preset) {
        return Err(Error::UnknownPreset(preset.into()));
    }
    let values: Vec<i64> = if lo <= hi { (lo..=hi).collect() } else { Vec::new() };
    let items: Vec<SweepItem> = values
        .par_iter()
        .map(|&v| {
            let mut params = fixed.clone();
            params.insert(parameter.to_string(), v);
            let outcome = presets::preset(preset, &params).and_then(|s| run(&s, checks));
            match outcome {
                Ok(r) => SweepItem {
                    parameters: params,
                    status: if r.passed { "pass" } else { "fail" }.into(),
                    b2_x: r.invariants.as_ref().map(|i| i.b2_x),
                    e_x: r.invariants.as_ref().map(|i| i.e_x.clone()),
                    classification: r.projectivity.as_ref().map(|p| format!("{:?}", p.classification)),
                    expectations: r.expectations.clone(),
                    error: None,
                    report: keep_reports.then(|| Box::new(r)),
                },
                Err(e) => SweepItem {
                    parameters: params,
                    status: "error".into(),
                    b2_x: None,
                    e_x: None,
                    classification: None,
                    expectations: Vec::new(),
                    error: Some(ErrorRecord::from_error(&e)),
                    report: None,
                },
            }
        })
        .collect();
    let count = |s: &str| items.iter().filter(|i| i.status == s).count();
    Ok(SweepResult {
        preset: preset.into(),
        parameter: parameter.into(),
        passed: count("pass"),
        failed: count("fail"),
        errors: count("error"),
        items,
    })
}

/// A stand-alone check outside any scenario, for `certify-ample`.
pub fn oguiso_ample_report(a: i64, k: i64, z_bound: i64) -> Result<AmpleCertificate> {
    if z_bound < 0 {
        return Err(Error::InvalidArgument("z_bound must be nonnegative".into()));
    }
    oguiso_ample_certificate(a, k, z_bound)
}

pub fn wehler_ample_report(class: &[i64]) -> Result<(AmpleCertificate, FreeCertificate)> {
    let model = K3Model::wehler();
    let d = DivisorClass::from_i64(&model.lattice, class)?;
    Ok((wehler_is_ample(&d)?, free_system_certificate(&model, &d, None)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kv: &[(&str, i64)]) -> BTreeMap<String, i64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn main_a1_full_run() {
        let s = presets::preset("main", &params(&[("a", 1)])).unwrap();
        let r = run(&s, &Stage::ALL).unwrap();
        assert!(r.passed, "{}", r.render_text());
        assert_eq!(r.metric("e_x"), Some(Value::int(-448)));
        assert_eq!(r.metric("b2_x"), Some(Value::int(4)));
    }

    #[test]
    fn oguiso_a2_full_run() {
        let s = presets::preset("oguiso", &params(&[("a", 2)])).unwrap();
        let r = run(&s, &Stage::ALL).unwrap();
        assert!(r.passed, "{}", r.render_text());
        assert_eq!(r.metric("b2_x"), Some(Value::int(1)));
    }

    #[test]
    fn perturbed_center_fails() {
        let mut s = presets::preset("main", &params(&[("a", 1)])).unwrap();
        s.override_center(crate::snc::Component::X1, 1, crate::linalg::ints(&[2, 2, 2])).unwrap();
        let r = run(&s, &Stage::ALL).unwrap();
        assert!(!r.passed);
        let ds = r.expectations.iter().find(|e| e.name == "d_semistable").unwrap();
        assert!(!ds.pass);
    }

    #[test]
    fn stage_subset_skips_expectations() {
        let s = presets::preset("main", &params(&[("a", 1)])).unwrap();
        let r = run(&s, &[Stage::Invariants]).unwrap();
        assert!(r.hypotheses.is_none() && r.projectivity.is_none());
        assert!(r.expectations.iter().all(|e| metric_stage(&e.name) == Some(Stage::Invariants)));
        assert!(r.passed);
    }

    #[test]
    fn report_round_trip() {
        let s = presets::preset("main", &params(&[("a", 2)])).unwrap();
        let r = run(&s, &Stage::ALL).unwrap();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn every_preset_passes() {
        for (name, p) in [
            ("main", params(&[("a", 3)])),
            ("arbitrary_b2", params(&[("a", 2), ("c", 7)])),
            ("double_blowup", params(&[("a", 1)])),
            ("oguiso", params(&[("a", 3)])),
            ("quartic_rho3", params(&[])),
            ("identity_control", params(&[])),
        ] {
            let r = run(&presets::preset(name, &p).unwrap(), &Stage::ALL).unwrap();
            assert!(r.passed, "{name}:\n{}", r.render_text());
        }
    }

    #[test]
    fn sweep_order_and_empty() {
        let r = sweep("main", &BTreeMap::new(), "a", 1, 4, &[Stage::Invariants], false).unwrap();
        let a: Vec<i64> = r.items.iter().map(|i| i.parameters["a"]).collect();
        assert_eq!(a, vec![1, 2, 3, 4]);
        assert_eq!(r.passed, 4);
        let e = sweep("main", &BTreeMap::new(), "a", 3, 2, &Stage::ALL, false).unwrap();
        assert!(e.items.is_empty());
    }

    #[test]
    fn sweep_collects_item_errors() {
        let r = sweep("arbitrary_b2", &params(&[("a", 1)]), "c", 12, 15, &[Stage::Invariants], false).unwrap();
        assert_eq!((r.passed, r.errors), (2, 2));
        assert_eq!(r.items[2].error.as_ref().unwrap().kind, "input");
    }
}
