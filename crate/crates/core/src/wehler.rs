//! Automorphisms of the (2,2,2) surface at lattice level.
//!
//! The covering involution ι_ij of the double cover S → P_i × P_j fixes e_i,
//! e_j and sends e_k to 2e_i + 2e_j − e_k. The composite ι = ι₁₂ ∘ ι₁₃ is
//! parabolic: every eigenvalue of ι* is 1, but (ι^a)* has entries quadratic in a.

use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{apply_isometry, compose, DivisorClass, Isometry, Lattice};
use crate::linalg::{int, Int, IntMatrix};
use crate::models::wehler_lattice;

/// Pullback ι_ij* for 1 ≤ i < j ≤ 3 (1-based, as the fiber classes are named).
pub fn involution_pullback(lattice: &Arc<Lattice>, i: usize, j: usize) -> Result<Isometry> {
    if !(1..=3).contains(&i) || !(1..=3).contains(&j) || i >= j || lattice.rank() != 3 {
        return Err(Error::InvolutionIndex(i, j));
    }
    let k = 6 - i - j;
    let (i, j, k) = (i - 1, j - 1, k - 1);
    let mut m = IntMatrix::identity(3);
    m.set(i, k, int(2));
    m.set(j, k, int(2));
    m.set(k, k, int(-1));
    Isometry::new(lattice, m)
}

/// ι* = (ι₁₂ ∘ ι₁₃)*.
pub fn iota(lattice: &Arc<Lattice>) -> Isometry {
    let i12 = involution_pullback(lattice, 1, 2).expect("valid indices");
    let i13 = involution_pullback(lattice, 1, 3).expect("valid indices");
    compose(&i12, &i13).expect("same lattice")
}

/// (ι^a)* = [[1, 4a²−2a, 4a²+2a], [0, 1−2a, −2a], [0, 2a, 1+2a]].
pub fn power_closed_form(lattice: &Arc<Lattice>, a: i64) -> Isometry {
    let a = int(a);
    let a2 = &a * &a * 4;
    let m = IntMatrix::from_rows(vec![
        vec![int(1), &a2 - &a * 2, &a2 + &a * 2],
        vec![int(0), int(1) - &a * 2, int(0) - &a * 2],
        vec![int(0), &a * 2, int(1) + &a * 2],
    ])
    .expect("3x3");
    Isometry::new(lattice, m).expect("closed form preserves the Wehler form")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Growth {
    /// Mⁿ = 1 for this minimal n.
    Finite(u64),
    /// Infinite order (within the tested range) with entries of Mᵃ polynomial
    /// of this degree in a.
    InfiniteWithGrowthDegree(usize),
    /// No polynomial fit within the tested range.
    Exponential,
}

/// Fewest consecutive vanishing values of the top difference before a
/// polynomial degree is accepted.
const DIFFERENCE_CONFIRMATIONS: usize = 3;

/// Degree of the polynomial through `seq` (values at 0, 1, 2, …), if the
/// sequence is long enough to confirm it.
fn polynomial_degree(seq: &[Int]) -> Option<usize> {
    let mut cur = seq.to_vec();
    let mut d = 0usize;
    loop {
        if cur.len() < DIFFERENCE_CONFIRMATIONS {
            return None;
        }
        if cur.iter().all(Zero::is_zero) {
            return Some(d.saturating_sub(1));
        }
        cur = cur.windows(2).map(|w| &w[1] - &w[0]).collect();
        d += 1;
    }
}

pub fn order_and_growth(m: &Isometry, max_test: u64) -> Result<Growth> {
    if max_test == 0 {
        return Err(Error::InvalidArgument("max_test must be at least 1".into()));
    }
    let n = m.matrix().rows();
    let mut powers = vec![IntMatrix::identity(n)];
    for e in 1..=max_test {
        let next = powers.last().expect("non-empty").mul(m.matrix())?;
        if next.is_identity() {
            return Ok(Growth::Finite(e));
        }
        powers.push(next);
    }
    let mut degree = 0usize;
    for i in 0..n {
        for j in 0..n {
            let seq: Vec<Int> = powers.iter().map(|p| p.get(i, j).clone()).collect();
            match polynomial_degree(&seq) {
                Some(d) => degree = degree.max(d),
                None => return Ok(Growth::Exponential),
            }
        }
    }
    Ok(Growth::InfiniteWithGrowthDegree(degree))
}

/// The two pullbacks of the family involution on the special and the very
/// general fiber, and their difference on e₃.
///
/// On the special surface (U₀²F₁ + U₁²F₂ = 0) the involution [U₀:U₁] ↦
/// [U₀:−U₁] fixes every e_i; on the very general member of the family the
/// same birational involution of the total space (u ↦ −u − λf₃/f₂ on the
/// function field) restricts to ι₁₂. The nonzero difference is the lattice
/// trace of the indeterminacy along the eight contracted (−2)-curves.
#[derive(Clone, Debug)]
pub struct PullbackDiscrepancy {
    pub special: Isometry,
    pub generic: Isometry,
    pub difference_on_e3: DivisorClass,
}

impl PullbackDiscrepancy {
    /// (generic − special) applied to an arbitrary class.
    pub fn difference_on(&self, d: &DivisorClass) -> Result<DivisorClass> {
        apply_isometry(&self.generic, d)?.sub(&apply_isometry(&self.special, d)?)
    }
}

pub fn family_pullback_discrepancy() -> PullbackDiscrepancy {
    let lattice = wehler_lattice();
    let special = Isometry::identity(&lattice);
    let generic = involution_pullback(&lattice, 1, 2).expect("valid indices");
    let e3 = DivisorClass::basis(&lattice, 2);
    let difference_on_e3 = apply_isometry(&generic, &e3)
        .and_then(|g| g.sub(&apply_isometry(&special, &e3)?))
        .expect("same lattice");
    PullbackDiscrepancy { special, generic, difference_on_e3 }
}
