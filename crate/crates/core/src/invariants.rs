//! Topological invariants of the components, of X₀ and of the smoothing.
//!
//! e(blow-up along a curve C on a K3) = e(ambient) + e(C), and for a smooth
//! curve on a K3, e(C) = 2 − 2g = −C². Gluing along S removes one copy of
//! e(S) = 24, and smoothing removes another.

use serde::{Deserialize, Serialize};

use crate::lattice::self_intersection;
use crate::linalg::{int, integer_kernel, integer_rank, Int, IntMatrix};
use crate::snc::{restriction_matrix, ComponentDescriptor, GluingDescriptor};

pub const EULER_K3: i64 = 24;

pub fn euler_of_component(c: &ComponentDescriptor) -> Int {
    c.centers
        .iter()
        .fold(int(c.ambient.euler_number()), |acc, d| acc - self_intersection(d))
}

/// e(X) = e(X₁) + e(X₂) − 2·e(S).
pub fn euler_of_smoothing(e1: &Int, e2: &Int) -> Int {
    e1 + e2 - int(2 * EULER_K3)
}

/// [r₁ | −φ*·r₂]: Pic X₁ ⊕ Pic X₂ → Pic S₁. Its kernel is Pic X₀.
pub fn difference_map(g: &GluingDescriptor) -> IntMatrix {
    let r1 = restriction_matrix(&g.x1);
    let r2 = g
        .twist
        .matrix()
        .mul(&restriction_matrix(&g.x2))
        .expect("twist is square on Pic S")
        .scale(&int(-1));
    r1.hstack(&r2).expect("same row count")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct B2Computation {
    pub b2: usize,
    pub domain_rank: usize,
    pub image_rank: usize,
    /// Whether the difference map hits all of Pic S ⊗ Q.
    pub surjective_over_q: bool,
}

impl B2Computation {
    /// b₂ of the smoothing is b₂(X₀) − 1 only if the difference map is onto
    /// over Q; otherwise the value is a lower bound.
    pub fn smoothing_is_lower_bound(&self) -> bool {
        !self.surjective_over_q
    }
}

pub fn b2_of_snc(g: &GluingDescriptor) -> B2Computation {
    let d = difference_map(g);
    let image_rank = integer_rank(&d);
    B2Computation {
        b2: d.cols() - image_rank,
        domain_rank: d.cols(),
        image_rank,
        surjective_over_q: image_rank == g.s_lattice.rank(),
    }
}

/// Same number via an explicit kernel basis; slower, used as a cross-check.
pub fn b2_of_snc_via_kernel(g: &GluingDescriptor) -> usize {
    integer_kernel(&difference_map(g)).len()
}

pub fn b2_of_smoothing(b2_x0: usize) -> usize {
    b2_x0.saturating_sub(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    #[serde(with = "crate::serde_int")]
    pub e_x1: Int,
    #[serde(with = "crate::serde_int")]
    pub e_x2: Int,
    #[serde(with = "crate::serde_int")]
    pub e_x0: Int,
    #[serde(with = "crate::serde_int")]
    pub e_x: Int,
    pub b2_x0: usize,
    pub b2_x: usize,
    pub b2_x_is_lower_bound: bool,
    pub difference_map_rank: usize,
    pub warnings: Vec<String>,
}

impl InvariantReport {
    /// e(X₀) = e(X₁) + e(X₂) − e(S) and e(X) = e(X₀) − e(S).
    pub fn euler_relations_hold(&self) -> bool {
        let k3 = int(EULER_K3);
        self.e_x0 == &self.e_x1 + &self.e_x2 - &k3 && self.e_x == &self.e_x0 - &k3
    }
}

pub fn invariant_report(g: &GluingDescriptor) -> InvariantReport {
    let e_x1 = euler_of_component(&g.x1);
    let e_x2 = euler_of_component(&g.x2);
    let e_x0 = &e_x1 + &e_x2 - int(EULER_K3);
    let e_x = euler_of_smoothing(&e_x1, &e_x2);
    let b2 = b2_of_snc(g);
    let mut warnings = Vec::new();
    if b2.smoothing_is_lower_bound() {
        warnings.push(format!(
            "difference map has rank {} < rank Pic S = {}; b2(X) is only a lower bound",
            b2.image_rank,
            g.s_lattice.rank()
        ));
    }
    InvariantReport {
        e_x1,
        e_x2,
        e_x0,
        e_x,
        b2_x0: b2.b2,
        b2_x: b2_of_smoothing(b2.b2),
        b2_x_is_lower_bound: b2.smoothing_is_lower_bound(),
        difference_map_rank: b2.image_rank,
        warnings,
    }
}
