//! The two K3 Picard lattices used by the constructions: the very general
//! (2,2,2) hypersurface in P¹×P¹×P¹ and the quartic with an elliptic
//! fibration and two skew lines.

use std::sync::Arc;

use crate::error::Result;
use crate::lattice::{change_basis, pairing, self_intersection, DivisorClass, Isometry, Lattice};
use crate::linalg::{int, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Wehler,
    Oguiso,
    Custom,
}

/// A K3 Picard lattice plus the distinguished classes the certificates use.
#[derive(Clone, Debug)]
pub struct K3Model {
    pub kind: ModelKind,
    pub lattice: Arc<Lattice>,
    /// A class known to be ample; orients the positive cone.
    pub reference_ample: DivisorClass,
    /// Classes of elliptic pencils (base point free).
    pub elliptic_fibers: Vec<DivisorClass>,
}

pub fn wehler_lattice() -> Arc<Lattice> {
    Lattice::new(
        "wehler",
        IntMatrix::from_i64(&[&[0, 2, 2], &[2, 0, 2], &[2, 2, 0]]),
        vec!["e1".into(), "e2".into(), "e3".into()],
    )
    .expect("constant lattice")
}

pub fn oguiso_lattice() -> Arc<Lattice> {
    Lattice::new(
        "oguiso",
        IntMatrix::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, -20]]),
        vec!["f".into(), "e".into(), "v".into()],
    )
    .expect("constant lattice")
}

impl K3Model {
    pub fn wehler() -> Self {
        let lattice = wehler_lattice();
        let fibers = (0..3).map(|i| DivisorClass::basis(&lattice, i)).collect();
        let h = DivisorClass::from_i64(&lattice, &[1, 1, 1]).expect("rank 3");
        K3Model { kind: ModelKind::Wehler, lattice, reference_ample: h, elliptic_fibers: fibers }
    }

    pub fn oguiso() -> Self {
        let lattice = oguiso_lattice();
        let f = DivisorClass::basis(&lattice, 0);
        let h = oguiso_hyperplane(&lattice);
        K3Model { kind: ModelKind::Oguiso, lattice, reference_ample: h, elliptic_fibers: vec![f] }
    }

    /// A lattice supplied by hand. No distinguished fibers unless given.
    pub fn custom(lattice: Arc<Lattice>, reference_ample: DivisorClass, elliptic_fibers: Vec<DivisorClass>) -> Self {
        K3Model { kind: ModelKind::Custom, lattice, reference_ample, elliptic_fibers }
    }

    pub fn class(&self, coords: &[i64]) -> Result<DivisorClass> {
        DivisorClass::from_i64(&self.lattice, coords)
    }
}

/// h = O_S(1) = 4f + 3e + v.
pub fn oguiso_hyperplane(lattice: &Arc<Lattice>) -> DivisorClass {
    DivisorClass::from_i64(lattice, &[4, 3, 1]).expect("rank 3")
}

/// Pullback by translation along the section Γ_a:
/// `[[1, 10a², 20a], [0, 1, 0], [0, a, 1]]` in the basis (f, e, v).
pub fn oguiso_translation(lattice: &Arc<Lattice>, a: i64) -> Isometry {
    let a = int(a);
    let m = IntMatrix::from_rows(vec![
        vec![int(1), &a * &a * 10, &a * 20],
        vec![int(0), int(1), int(0)],
        vec![int(0), a.clone(), int(1)],
    ])
    .expect("3x3");
    Isometry::new(lattice, m).expect("translation matrices preserve the form")
}

/// The section class Γ_c = (10c² − 1) f + e + c v.
pub fn oguiso_section(lattice: &Arc<Lattice>, c: i64) -> DivisorClass {
    let c = int(c);
    DivisorClass::new(lattice, vec![&c * &c * 10 - 1, int(1), c]).expect("rank 3")
}

/// Intersection data of the hyperplane section H and the skew lines L, M.
pub fn hlm_lattice() -> Arc<Lattice> {
    Lattice::new(
        "quartic_hlm",
        IntMatrix::from_i64(&[&[4, 1, 1], &[1, -2, 0], &[1, 0, -2]]),
        vec!["H".into(), "L".into(), "M".into()],
    )
    .expect("constant lattice")
}

/// Columns: f = H − L, e = H − L + M, v = −6H + 7L − 3M in the (H, L, M) basis.
pub fn hlm_to_fev_columns() -> IntMatrix {
    IntMatrix::from_i64(&[&[1, 1, -6], &[-1, -1, 7], &[0, 1, -3]])
}

/// Re-derives the (f, e, v) lattice from the (H, L, M) data. Returns the
/// lattice and the coordinate map (H, L, M) → (f, e, v).
pub fn oguiso_from_hlm() -> Result<(Arc<Lattice>, IntMatrix)> {
    change_basis(&hlm_lattice(), "oguiso_from_hlm", &hlm_to_fev_columns(), vec!["f".into(), "e".into(), "v".into()])
}

/// Γ_c² and Γ_c · f, the two identities the section class must satisfy.
pub fn section_identities(c: i64) -> (crate::linalg::Int, crate::linalg::Int) {
    let l = oguiso_lattice();
    let g = oguiso_section(&l, c);
    let f = DivisorClass::basis(&l, 0);
    (self_intersection(&g), pairing(&g, &f).expect("same lattice"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::apply_isometry;
    use crate::linalg::ints;

    #[test]
    fn oguiso_gram_from_hlm() {
        let (lat, to_fev) = oguiso_from_hlm().unwrap();
        assert_eq!(lat.gram(), oguiso_lattice().gram());
        // H itself in (f, e, v) coordinates
        assert_eq!(to_fev.mul_vec(&ints(&[1, 0, 0])).unwrap(), ints(&[4, 3, 1]));
    }

    #[test]
    fn hyperplane_degree_four() {
        let l = oguiso_lattice();
        assert_eq!(self_intersection(&oguiso_hyperplane(&l)), int(4));
    }

    #[test]
    fn translation_image_of_h() {
        let l = oguiso_lattice();
        for a in 1..=10i64 {
            let img = apply_isometry(&oguiso_translation(&l, a), &oguiso_hyperplane(&l)).unwrap();
            assert_eq!(img.coords(), &ints(&[30 * a * a + 20 * a + 4, 3, 3 * a + 1])[..]);
        }
    }

    #[test]
    fn translation_is_a_power() {
        let l = oguiso_lattice();
        let t1 = oguiso_translation(&l, 1);
        for a in -5..=5 {
            assert_eq!(t1.power(a), oguiso_translation(&l, a));
        }
    }

    #[test]
    fn sections_are_minus_two_and_meet_f_once() {
        for c in -6..=6 {
            assert_eq!(section_identities(c), (int(-2), int(1)));
        }
    }
}
