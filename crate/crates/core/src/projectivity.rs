//! Gluing-compatible line-bundle pairs and the non-projectivity classifier.
//!
//! A pair (L₁, L₂) glues to a line bundle on X₀ iff r₁(L₁) = φ*·r₂(L₂) in
//! Pic S. Effectivity is modeled only by the necessary condition that the
//! ambient pullback coordinates are nonnegative (pushforward of an effective
//! divisor is effective). A pair counts as big when its restriction to S has
//! positive square and, on at least one component, so does the restriction
//! of its ambient part: positive multiples of exceptional divisors over
//! curves are fixed components and add no sections. Verdicts are sound in one direction: TrivialOnly and FiberRayOnly
//! rule out a big compatible pair under this cone; BigPairExists does not
//! prove projectivity.

use serde::{Deserialize, Serialize};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::invariants::difference_map;
use crate::linalg::{dot, int, integer_kernel, integer_rank, primitive, Int, IntMatrix};
use crate::polyhedral::{cone_rays, Projector};
use crate::snc::{restriction_matrix, ComponentDescriptor, GluingDescriptor};

/// Above this compatible rank the elimination is refused.
pub const MAX_COMPATIBLE_RANK: usize = 1024;
const FM_ROW_LIMIT: usize = 50_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatiblePairLattice {
    pub n1: usize,
    pub n2: usize,
    /// Each vector is (L₁ coords | L₂ coords).
    #[serde(with = "crate::serde_int::vecvec")]
    pub basis: Vec<Vec<Int>>,
}

impl CompatiblePairLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn split<'a>(&self, v: &'a [Int]) -> (&'a [Int], &'a [Int]) {
        v.split_at(self.n1)
    }
}

pub fn compatible_pairs(g: &GluingDescriptor) -> CompatiblePairLattice {
    CompatiblePairLattice { n1: g.x1.picard_rank(), n2: g.x2.picard_rank(), basis: integer_kernel(&difference_map(g)) }
}

/// Whether r₁(L₁) = φ*·r₂(L₂), recomputed from the descriptors.
pub fn is_compatible(g: &GluingDescriptor, l1: &[Int], l2: &[Int]) -> bool {
    let lhs = restriction_matrix(&g.x1).mul_vec(l1);
    let rhs = restriction_matrix(&g.x2).mul_vec(l2).and_then(|v| g.twist.matrix().mul_vec(&v));
    matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
}

/// Rows a with a·L ≥ 0: every ambient coordinate nonnegative. Exceptional
/// coordinates are unconstrained. Necessary, not sufficient, for effectivity.
pub fn effectivity_cone(c: &ComponentDescriptor) -> Vec<Vec<Int>> {
    let n = c.picard_rank();
    (0..c.ambient.picard_rank())
        .map(|i| {
            let mut row = vec![Int::zero(); n];
            row[i] = int(1);
            row
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    TrivialOnly,
    FiberRayOnly,
    BigPairExists,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KodairaBound {
    Bounded(u32),
    Unbounded,
}

impl Serialize for KodairaBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KodairaBound::Bounded(k) => s.serialize_u32(*k),
            KodairaBound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for KodairaBound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(u32),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(k) => Ok(KodairaBound::Bounded(k)),
            Repr::S(s) if s == "unbounded" => Ok(KodairaBound::Unbounded),
            Repr::S(s) => Err(serde::de::Error::custom(format!("bad kodaira bound `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPair {
    #[serde(with = "crate::serde_int::vec")]
    pub l1: Vec<Int>,
    #[serde(with = "crate::serde_int::vec")]
    pub l2: Vec<Int>,
    #[serde(with = "crate::serde_int::vec")]
    pub restriction: Vec<Int>,
    #[serde(with = "crate::serde_int")]
    pub restriction_square: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectivityVerdict {
    pub classification: Classification,
    pub kodaira_bound: KodairaBound,
    pub witness: Option<WitnessPair>,
    pub compatible_rank: usize,
    /// Extreme rays of the solution cone modulo its lineality, in pair
    /// coordinates.
    #[serde(with = "crate::serde_int::vecvec")]
    pub rays: Vec<Vec<Int>>,
    pub lineality_dim: usize,
    pub certificate: Vec<String>,
}

fn fmt_vec(v: &[Int]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Copy)]
enum Side {
    X1,
    X2,
}

struct Context<'a> {
    g: &'a GluingDescriptor,
    n1: usize,
    p1: usize,
    p2: usize,
    r1: IntMatrix,
    /// Ambient restrictions in S₁ coordinates: r₁ on X₁, φ*·r₂ on X₂.
    amb1: IntMatrix,
    amb2: IntMatrix,
}

impl Context<'_> {
    fn restriction(&self, v: &[Int]) -> Vec<Int> {
        self.r1.mul_vec(&v[..self.n1]).expect("dimensions")
    }

    fn square(&self, w: &[Int]) -> Int {
        self.g.s_lattice.bilinear(w, w)
    }

    fn ambient_matrix(&self, side: Side) -> &IntMatrix {
        match side {
            Side::X1 => &self.amb1,
            Side::X2 => &self.amb2,
        }
    }

    /// Restriction to S₁ of the ambient part of one side of the pair.
    fn ambient_restriction(&self, side: Side, v: &[Int]) -> Vec<Int> {
        let part = match side {
            Side::X1 => &v[..self.p1],
            Side::X2 => &v[self.n1..self.n1 + self.p2],
        };
        self.ambient_matrix(side).mul_vec(part).expect("dimensions")
    }

    fn ambient_pairings_nonnegative(&self, side: Side) -> bool {
        let m = self.ambient_matrix(side);
        (0..m.cols()).all(|i| (0..m.cols()).all(|j| !self.g.s_lattice.bilinear(&m.column(i), &m.column(j)).is_negative()))
    }

    fn x1_ambient_nonzero(&self, v: &[Int]) -> bool {
        v[..self.p1].iter().any(|x| !x.is_zero())
    }

    fn witness(&self, v: &[Int]) -> WitnessPair {
        let w = self.restriction(v);
        WitnessPair {
            l1: v[..self.n1].to_vec(),
            l2: v[self.n1..].to_vec(),
            restriction_square: self.square(&w),
            restriction: w,
        }
    }
}

/// Deterministic preference among fiber-type candidates: isotropic
/// restriction, exceptional part nonpositive (μ*A − Σ b_j E_j with b_j ≥ 0),
/// nonzero restriction to S, ambient part on X₁, smallest ℓ¹ norm, then
/// lexicographically largest.
type WitnessKey = (bool, bool, bool, bool, Int, std::cmp::Reverse<Vec<Int>>);

fn witness_key(ctx: &Context<'_>, v: &[Int]) -> WitnessKey {
    let mut exc = v[ctx.p1..ctx.n1].iter().chain(&v[ctx.n1 + ctx.p2..]);
    let exc_nonpositive = exc.all(|x| !x.is_positive());
    let w = ctx.restriction(v);
    let isotropic = ctx.square(&w).is_zero();
    let restricts = w.iter().any(|x| !x.is_zero());
    let a1 = ctx.x1_ambient_nonzero(v);
    let norm: Int = v.iter().map(|x| x.abs()).sum();
    (!isotropic, !exc_nonpositive, !restricts, !a1, norm, std::cmp::Reverse(v.to_vec()))
}

fn same_ray(a: &[Int], b: &[Int]) -> bool {
    primitive(a) == primitive(b) && a.iter().zip(b).all(|(x, y)| x.sign() == y.sign())
}

pub fn classify(g: &GluingDescriptor) -> Result<ProjectivityVerdict> {
    let pairs = compatible_pairs(g);
    classify_with_basis(g, &pairs.basis)
}

/// As `classify`, for an explicitly supplied basis of the compatible lattice.
pub fn classify_with_basis(g: &GluingDescriptor, basis: &[Vec<Int>]) -> Result<ProjectivityVerdict> {
    let ctx = Context {
        g,
        n1: g.x1.picard_rank(),
        p1: g.x1.ambient.picard_rank(),
        p2: g.x2.ambient.picard_rank(),
        r1: restriction_matrix(&g.x1),
        amb1: g.x1.ambient.restriction.clone(),
        amb2: g.twist.matrix().mul(&g.x2.ambient.restriction)?,
    };
    let n = ctx.n1 + g.x2.picard_rank();
    let k = basis.len();
    let mut trace = vec![format!("compatible pair lattice: rank {k}")];
    for b in basis {
        if b.len() != n || !is_compatible(g, &b[..ctx.n1], &b[ctx.n1..]) {
            return Err(Error::InvalidArgument(format!("{} is not a compatible pair", fmt_vec(b))));
        }
    }
    if k == 0 {
        trace.push("no nonzero compatible pair".into());
        return Ok(finish(Classification::TrivialOnly, None, 0, Vec::new(), 0, trace));
    }
    if k > MAX_COMPATIBLE_RANK {
        return Err(Error::Resource(format!("compatible rank {k} exceeds {MAX_COMPATIBLE_RANK}")));
    }

    // Effectivity rows in pair coordinates, then in kernel coordinates t.
    let mut pair_rows: Vec<Vec<Int>> = Vec::new();
    for row in effectivity_cone(&g.x1) {
        let mut r = row;
        r.resize(n, Int::zero());
        pair_rows.push(r);
    }
    for row in effectivity_cone(&g.x2) {
        let mut r = vec![Int::zero(); ctx.n1];
        r.extend(row);
        pair_rows.push(r);
    }
    let to_t = |rows: &[Vec<Int>]| -> Vec<Vec<Int>> { rows.iter().map(|r| basis.iter().map(|b| dot(r, b)).collect()).collect() };
    let gt = to_t(&pair_rows);
    for (i, row) in gt.iter().enumerate() {
        let side = if i < ctx.p1 { "X1" } else { "X2" };
        let idx = if i < ctx.p1 { i } else { i - ctx.p1 };
        trace.push(format!("ambient coordinate {idx} on {side} in kernel coordinates: {} >= 0", fmt_vec(row)));
    }
    let (t_rays, lineality_dim) = cone_rays(&gt, k, FM_ROW_LIMIT)?;
    let to_pair = |t: &[Int]| -> Vec<Int> {
        (0..n).map(|c| basis.iter().zip(t).map(|(b, x)| &b[c] * x).sum()).collect()
    };
    // The lineality L is the set of compatible pairs with zero ambient parts,
    // so L^⊥ is spanned by the compatibility and effectivity rows.
    let diff = difference_map(g);
    if k != n - integer_rank(&diff) {
        return Err(Error::InvalidArgument("basis does not span the compatible pairs".into()));
    }
    let mut perp_rows = diff.to_rows();
    perp_rows.extend(pair_rows.iter().cloned());
    let perp = Projector::new(&perp_rows);
    let extreme: Vec<Vec<Int>> = t_rays.iter().map(|t| perp.onto(&to_pair(t))).collect();
    trace.push(format!("solution cone: {} extreme rays, lineality dimension {}", extreme.len(), lineality_dim));
    for r in &extreme {
        let w = ctx.restriction(r);
        trace.push(format!("ray {} restricts to {} with square {}", fmt_vec(r), fmt_vec(&w), ctx.square(&w)));
    }
    // Lineality directions whose restrictions span r(L): project each
    // restriction row, read in kernel coordinates, onto ker G.
    let ker_g = Projector::new(&gt);
    let lineality: Vec<Vec<Int>> = (0..ctx.r1.rows())
        .map(|j| {
            let mut row = ctx.r1.row(j).to_vec();
            row.resize(n, Int::zero());
            to_pair(&ker_g.project(&to_t(&[row])[0]))
        })
        .filter(|l| l.iter().any(|x| !x.is_zero()))
        .collect();
    let lin_images: Vec<Vec<Int>> = lineality.iter().map(|v| ctx.restriction(v)).collect();
    let lin_restricts_trivially = lin_images.iter().all(|w| w.iter().all(Zero::is_zero));

    if extreme.is_empty() {
        // Every solution has zero ambient part. Check that no nonzero one is
        // also exceptional-effective.
        let mut refined = pair_rows.clone();
        for side in [(ctx.p1, ctx.n1), (ctx.n1 + ctx.p2, n)] {
            for c in side.0..side.1 {
                let mut r = vec![Int::zero(); n];
                r[c] = int(1);
                refined.push(r);
            }
        }
        let (refined_rays, refined_lin) = cone_rays(&to_t(&refined), k, FM_ROW_LIMIT)?;
        if lin_restricts_trivially && refined_rays.is_empty() && refined_lin == 0 {
            trace.push("every solution has zero ambient part and trivial restriction to S; the only one with effective exceptional part is 0".into());
            return Ok(finish(Classification::TrivialOnly, None, k, extreme, lineality_dim, trace));
        }
    }

    let images: Vec<Vec<Int>> = extreme.iter().map(|r| ctx.restriction(r)).collect();
    let nonzero: Vec<&Vec<Int>> = images.iter().filter(|w| w.iter().any(|x| !x.is_zero())).collect();
    let single_isotropic_ray = lin_restricts_trivially
        && match nonzero.first() {
            None => true,
            Some(w0) => ctx.square(w0).is_zero() && nonzero.iter().all(|w| same_ray(w, w0)),
        };
    // Ambient parts on the cone are nonnegative combinations of the ray
    // ambient parts (lineality has none), so with nonnegative pairings among
    // ambient generators the total is the extreme case.
    let ambient_big_possible: Vec<bool> = [Side::X1, Side::X2]
        .iter()
        .map(|&side| {
            if !ctx.ambient_pairings_nonnegative(side) {
                return true;
            }
            let total: Vec<Int> = (0..ctx.g.s_lattice.rank())
                .map(|c| extreme.iter().map(|r| ctx.ambient_restriction(side, r)[c].clone()).sum())
                .collect();
            ctx.square(&total).is_positive()
        })
        .collect();
    let fiber_reason = if single_isotropic_ray {
        Some(match nonzero.first() {
            Some(w0) => format!("all restrictions lie on the isotropic ray through {}", fmt_vec(w0)),
            None => "all restrictions to S vanish".into(),
        })
    } else if ambient_big_possible.iter().all(|b| !b) {
        Some("on both components every solution has its ambient part on a single fiber direction; positive exceptional multiples are fixed components".into())
    } else {
        None
    };
    if let (false, Some(reason)) = (extreme.is_empty(), fiber_reason) {
        let mut pool: Vec<Vec<Int>> = extreme.clone();
        for i in 0..extreme.len() {
            for j in i + 1..extreme.len() {
                pool.push(primitive(&extreme[i].iter().zip(&extreme[j]).map(|(x, y)| x + y).collect::<Vec<_>>()));
            }
        }
        let best = pool.iter().min_by_key(|v| witness_key(&ctx, v)).expect("non-empty");
        trace.push(reason);
        return Ok(finish(Classification::FiberRayOnly, Some(ctx.witness(best)), k, extreme, lineality_dim, trace));
    }

    // Search for a big pair: positive restricted square, and an ambient part
    // of positive restricted square on some component.
    let mut candidates: Vec<Vec<Int>> = Vec::new();
    if !extreme.is_empty() {
        candidates.push((0..n).map(|c| extreme.iter().map(|r| &r[c]).sum()).collect());
    }
    candidates.extend(extreme.iter().cloned());
    for i in 0..extreme.len() {
        for j in i + 1..extreme.len() {
            candidates.push(extreme[i].iter().zip(&extreme[j]).map(|(x, y)| x + y).collect());
        }
    }
    let base = candidates.first().cloned();
    if let Some(base) = base {
        for l in &lineality {
            for s in [1i64, -1] {
                candidates.push(base.iter().zip(l).map(|(x, y)| x + y * s).collect());
            }
        }
    }
    for v in candidates {
        let v = primitive(&v);
        let w = ctx.restriction(&v);
        let ambient_big = [Side::X1, Side::X2]
            .iter()
            .any(|&side| ctx.square(&ctx.ambient_restriction(side, &v)).is_positive());
        if ctx.square(&w).is_positive() && ambient_big {
            trace.push(format!("pair {} restricts to {} with positive square", fmt_vec(&v), fmt_vec(&w)));
            return Ok(finish(Classification::BigPairExists, Some(ctx.witness(&v)), k, extreme, lineality_dim, trace));
        }
    }
    trace.push("no certificate either way".into());
    Ok(finish(Classification::Undetermined, None, k, extreme, lineality_dim, trace))
}

fn finish(
    classification: Classification,
    witness: Option<WitnessPair>,
    compatible_rank: usize,
    rays: Vec<Vec<Int>>,
    lineality_dim: usize,
    certificate: Vec<String>,
) -> ProjectivityVerdict {
    let kodaira_bound = match classification {
        Classification::TrivialOnly => KodairaBound::Bounded(0),
        Classification::FiberRayOnly => KodairaBound::Bounded(1),
        Classification::BigPairExists | Classification::Undetermined => KodairaBound::Unbounded,
    };
    ProjectivityVerdict { classification, kodaira_bound, witness, compatible_rank, rays, lineality_dim, certificate }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonProjectivityReport {
    pub obstructed: bool,
    pub statement: String,
    pub citations: Vec<String>,
}

pub fn nonprojectivity_report(v: &ProjectivityVerdict) -> NonProjectivityReport {
    let model = "effectivity modeled by nonnegative ambient pullback coordinates; big modeled by positive square of the restriction to S".to_string();
    match v.classification {
        Classification::TrivialOnly | Classification::FiberRayOnly => {
            let mut statement = "no compatible pair is big, so X0 carries no big line bundle effective on both components; X0 and its smoothing X are not projective".to_string();
            if v.classification == Classification::TrivialOnly {
                statement.push_str(" (stronger: every such pair is trivial)");
            }
            NonProjectivityReport {
                obstructed: true,
                statement,
                citations: vec![
                    model,
                    "a smoothing that is projective forces a big line bundle on X0 with sections on each component".into(),
                    "non-Kahler: a Kahler smoothing with h^2(O) = 0 would be projective".into(),
                ],
            }
        }
        Classification::BigPairExists | Classification::Undetermined => NonProjectivityReport {
            obstructed: false,
            statement: "no obstruction found by this method".into(),
            citations: vec![model],
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgDim {
    Zero,
    One,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgDimEvidence {
    pub value: AlgDim,
    pub witness: Option<WitnessPair>,
    pub label: String,
    pub citations: Vec<String>,
}

pub fn algdim_evidence(v: &ProjectivityVerdict) -> AlgDimEvidence {
    let label = "lattice-level evidence only; the full statement needs deformation arguments".to_string();
    match v.classification {
        Classification::TrivialOnly => AlgDimEvidence { value: AlgDim::Zero, witness: None, label, citations: vec![] },
        Classification::FiberRayOnly => AlgDimEvidence {
            value: AlgDim::One,
            witness: v.witness.clone(),
            label,
            citations: vec!["witness pair glues to a line bundle whose sections grow at most linearly (h0 <= m*b + 1)".into()],
        },
        _ => AlgDimEvidence { value: AlgDim::Inconclusive, witness: None, label, citations: vec![] },
    }
}
