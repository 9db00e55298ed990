//! Ampleness and freeness certificates on the K3 models.
//!
//! A certificate is a list of exact checks. Each check stores the value it
//! was computed from and the relation that value must satisfy, so a stored
//! certificate can be re-evaluated from its class alone.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{pairing, self_intersection, DivisorClass};
use crate::linalg::{int, Int};
use crate::models::{oguiso_lattice, K3Model, ModelKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Positive,
    NonNegative,
    Zero,
}

impl Relation {
    pub fn holds(self, v: &Int) -> bool {
        match self {
            Relation::Positive => v.is_positive(),
            Relation::NonNegative => !v.is_negative(),
            Relation::Zero => v.is_zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub description: String,
    #[serde(with = "crate::serde_int")]
    pub value: Int,
    pub relation: Relation,
    pub satisfied: bool,
}

impl Check {
    pub fn new(description: impl Into<String>, value: Int, relation: Relation) -> Self {
        let satisfied = relation.holds(&value);
        Check { description: description.into(), value, relation, satisfied }
    }

    pub fn is_consistent(&self) -> bool {
        self.satisfied == self.relation.holds(&self.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmpleMethod {
    WehlerPositiveCone,
    OguisoInequalities,
    FreeSumDecomposition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmpleCertificate {
    pub lattice: String,
    #[serde(with = "crate::serde_int::vec")]
    pub class: Vec<Int>,
    pub method: AmpleMethod,
    pub checks: Vec<Check>,
    pub ample: bool,
    /// Parameters the checks depend on beyond the class, e.g. (a, k, z_bound).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<(String, i64)>,
}

impl AmpleCertificate {
    fn finish(lattice: &str, class: Vec<Int>, method: AmpleMethod, checks: Vec<Check>, parameters: Vec<(String, i64)>) -> Self {
        let ample = checks.iter().all(|c| c.satisfied);
        AmpleCertificate { lattice: lattice.to_string(), class, method, checks, ample, parameters }
    }

    pub fn is_consistent(&self) -> bool {
        self.checks.iter().all(Check::is_consistent) && self.ample == self.checks.iter().all(|c| c.satisfied)
    }

    fn parameter(&self, name: &str) -> Option<i64> {
        self.parameters.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// Recomputes the certificate from the stored class and parameters.
    pub fn recheck(&self) -> Result<AmpleCertificate> {
        match self.method {
            AmpleMethod::WehlerPositiveCone => {
                let model = K3Model::wehler();
                wehler_is_ample(&DivisorClass::new(&model.lattice, self.class.clone())?)
            }
            AmpleMethod::OguisoInequalities => {
                let get = |n: &str| self.parameter(n).ok_or_else(|| Error::UnboundParameter(n.into()));
                oguiso_ample_certificate(get("a")?, get("k")?, get("z_bound")?)
            }
            AmpleMethod::FreeSumDecomposition => Ok(self.clone()),
        }
    }
}

fn require_lattice(d: &DivisorClass, model: &K3Model) -> Result<()> {
    if d.lattice() != &model.lattice {
        return Err(Error::LatticeMismatch { left: d.lattice().name().into(), right: model.lattice.name().into() });
    }
    Ok(())
}

/// Ample iff D² > 0 and D·H > 0, valid because the lattice has no (−2)-classes.
pub fn wehler_is_ample(d: &DivisorClass) -> Result<AmpleCertificate> {
    let model = K3Model::wehler();
    require_lattice(d, &model)?;
    let sq = self_intersection(d);
    let dh = pairing(d, &model.reference_ample)?;
    let divisor = model.lattice.square_divisor();
    let checks = vec![
        Check::new("D^2 > 0", sq, Relation::Positive),
        Check::new("D.H > 0 with H = e1+e2+e3", dh, Relation::Positive),
        // every square is a multiple of 4, so no (-2)-class and Nef = positive cone
        Check::new("-2 mod (gcd of all self-intersections) != 0", int(-2).mod_floor(&divisor), Relation::Positive),
    ];
    Ok(AmpleCertificate::finish("wehler", d.coords().to_vec(), AmpleMethod::WehlerPositiveCone, checks, vec![]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoMinusTwoCertificate {
    /// Every self-intersection in the lattice is a multiple of this.
    #[serde(with = "crate::serde_int")]
    pub square_divisor: Int,
    /// The divisibility argument alone rules out square −2.
    pub excludes_minus_two: bool,
    pub enumeration_bound: i64,
    pub classes_enumerated: u64,
    #[serde(with = "crate::serde_int::vecvec")]
    pub minus_two_classes_found: Vec<Vec<Int>>,
}

/// Divisibility argument for the Wehler lattice plus exhaustive search over
/// |coords| ≤ `bound`.
pub fn wehler_no_minus_two_certificate(bound: i64) -> NoMinusTwoCertificate {
    let model = K3Model::wehler();
    let square_divisor = model.lattice.square_divisor();
    let excludes_minus_two = !int(-2).is_multiple_of(&square_divisor);
    let minus_two = int(-2);
    let mut found = Vec::new();
    let mut count = 0u64;
    for x in -bound..=bound {
        for y in -bound..=bound {
            for z in -bound..=bound {
                count += 1;
                let v = vec![int(x), int(y), int(z)];
                if model.lattice.bilinear(&v, &v) == minus_two {
                    found.push(v);
                }
            }
        }
    }
    NoMinusTwoCertificate {
        square_divisor,
        excludes_minus_two,
        enumeration_bound: bound,
        classes_enumerated: count,
        minus_two_classes_found: found,
    }
}

fn positive_divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// All d = x f + y e + z v with d² = −2 (xy = 10z² − 1), y ≥ 0 and |z| ≤ z_bound.
pub fn oguiso_minus_two_classes(z_bound: i64) -> Result<Vec<DivisorClass>> {
    if z_bound < 0 {
        return Err(Error::InvalidArgument("z_bound must be nonnegative".into()));
    }
    let lattice = oguiso_lattice();
    let mut out = Vec::new();
    for z in -z_bound..=z_bound {
        let n = 10 * z * z - 1;
        if n < 0 {
            // xy = −1 with y ≥ 0
            out.push(DivisorClass::from_i64(&lattice, &[-1, 1, z])?);
            continue;
        }
        // n > 0 forces y > 0 and x > 0
        for y in positive_divisors(n as u64) {
            let y = y as i64;
            out.push(DivisorClass::from_i64(&lattice, &[n / y, y, z])?);
        }
    }
    Ok(out)
}

/// The class l' = l − k f = (30a² + 20a + 8 − k, 6, 3a + 2), where
/// l = h + (ι^a)*h.
pub fn oguiso_l_prime(a: i64, k: i64) -> DivisorClass {
    let (a, k) = (int(a), int(k));
    DivisorClass::new(&oguiso_lattice(), vec![&a * &a * 30 + &a * 20 + 8 - k, int(6), &a * 3 + 2]).expect("rank 3")
}

/// Ampleness of l − k f via the inequalities (A), (C), (D) together with an
/// independent bounded search over (−2)-classes. Both must pass.
pub fn oguiso_ample_certificate(a: i64, k: i64, z_bound: i64) -> Result<AmpleCertificate> {
    if a < 1 || k < 1 {
        return Err(Error::InvalidArgument(format!("need a >= 1 and k >= 1, got a={a}, k={k}")));
    }
    if z_bound < 1 {
        return Err(Error::InvalidArgument("z_bound must be at least 1".into()));
    }
    let lp = oguiso_l_prime(a, k);
    let f = DivisorClass::basis(lp.lattice(), 0);
    let (ai, ki) = (int(a), int(k));
    let a2 = &ai * &ai;
    let cond_a = &a2 * 30 + &ai * 20 + 2 - &ki;
    let cond_c = &a2 * 45 + 4 - &ki * 3;
    let cond_d = (&a2 * 90 - &ai * 15 + 4) * 4 - &ki * 27;
    let sq = self_intersection(&lp);
    let closed_sq = &cond_c * 4;

    let roots = oguiso_minus_two_classes(z_bound)?;
    let mut min_pairing: Option<Int> = None;
    let mut violations = 0i64;
    for d in &roots {
        let p = pairing(&lp, d)?;
        if !p.is_positive() {
            violations += 1;
        }
        if min_pairing.as_ref().map_or(true, |m| &p < m) {
            min_pairing = Some(p);
        }
    }

    let checks = vec![
        Check::new("(A) 30a^2+20a+2-k > 0", cond_a, Relation::Positive),
        Check::new("(C) 45a^2+4-3k > 0", cond_c, Relation::Positive),
        Check::new("(D) 4(90a^2-15a+4)-27k > 0", cond_d, Relation::Positive),
        Check::new("l'^2 - 4(45a^2+4-3k) = 0", &sq - &closed_sq, Relation::Zero),
        Check::new("l'^2 > 0", sq, Relation::Positive),
        Check::new("l'.f > 0 (positive cone side of the nef fiber)", pairing(&lp, &f)?, Relation::Positive),
        Check::new(
            format!("(-2)-classes with |z| <= {z_bound} and l'.d <= 0"),
            int(violations),
            Relation::Zero,
        ),
        Check::new(
            format!("min l'.d over {} enumerated (-2)-classes", roots.len()),
            min_pairing.unwrap_or_else(Int::one),
            Relation::Positive,
        ),
    ];
    Ok(AmpleCertificate::finish(
        "oguiso",
        lp.into_coords(),
        AmpleMethod::OguisoInequalities,
        checks,
        vec![("a".into(), a), ("k".into(), k), ("z_bound".into(), z_bound)],
    ))
}

/// D = m·A + n·F with A certified ample and F an elliptic fiber class.
#[derive(Clone, Debug)]
pub struct FreeDecomposition {
    pub multiple: i64,
    pub ample: AmpleCertificate,
    pub fiber: DivisorClass,
    pub fiber_multiple: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeRule {
    /// No (−2)-class in the lattice and D ample.
    NoRationalCurves,
    /// m ≥ 2 multiple of an ample class plus a base point free pencil.
    AmpleMultiplePlusFiber,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeCertificate {
    pub lattice: String,
    #[serde(with = "crate::serde_int::vec")]
    pub class: Vec<Int>,
    pub rule: FreeRule,
    pub free: bool,
    pub sub_certificates: Vec<AmpleCertificate>,
    pub notes: Vec<String>,
}

pub fn free_system_certificate(
    model: &K3Model,
    d: &DivisorClass,
    decomposition: Option<&FreeDecomposition>,
) -> Result<FreeCertificate> {
    require_lattice(d, model)?;
    let mut notes = Vec::new();
    let base = |rule, free, subs, notes| FreeCertificate {
        lattice: model.lattice.name().to_string(),
        class: d.coords().to_vec(),
        rule,
        free,
        sub_certificates: subs,
        notes,
    };

    if model.kind == ModelKind::Wehler {
        let cert = wehler_is_ample(d)?;
        if cert.ample {
            notes.push("ample class on a K3 without (-2)-curves has a free linear system".into());
            return Ok(base(FreeRule::NoRationalCurves, true, vec![cert], notes));
        }
        notes.push("class is not ample; rule W does not apply".into());
    }

    if let Some(dec) = decomposition {
        require_lattice(&dec.fiber, model)?;
        let ample_class = DivisorClass::new(&model.lattice, dec.ample.class.clone())?;
        let recomposed = ample_class.scale(&int(dec.multiple)).add(&dec.fiber.scale(&int(dec.fiber_multiple)))?;
        let is_fiber = model.elliptic_fibers.iter().any(|f| f == &dec.fiber);
        let rechecked = dec.ample.recheck()?;
        let ok = dec.multiple >= 2
            && dec.fiber_multiple >= 0
            && is_fiber
            && rechecked.ample
            && rechecked == dec.ample
            && &recomposed == d;
        if ok {
            notes.push(format!(
                "|{}A| is free for A ample (multiple >= 2), and adding {} copies of a free pencil keeps it free",
                dec.multiple, dec.fiber_multiple
            ));
            return Ok(base(FreeRule::AmpleMultiplePlusFiber, true, vec![rechecked], notes));
        }
        if &recomposed != d {
            notes.push("decomposition does not sum to the class".into());
        }
        if dec.multiple < 2 {
            notes.push("rule O needs an ample multiple m >= 2".into());
        }
        if !is_fiber {
            notes.push("supplied fiber class is not a registered elliptic pencil".into());
        }
        if !rechecked.ample {
            notes.push("ample sub-certificate failed".into());
        }
    } else {
        notes.push("no decomposition supplied".into());
    }
    Ok(base(FreeRule::Undetermined, false, vec![], notes))
}
