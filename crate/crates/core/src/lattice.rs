//! Integral lattices, divisor classes and isometries.
//!
//! Isometries act on coordinate column vectors in the pullback convention:
//! the j-th column of the matrix is the image of the j-th basis class.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Int, IntMatrix};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    name: String,
    gram: IntMatrix,
    basis_labels: Vec<String>,
}

impl Lattice {
    pub fn new(name: impl Into<String>, gram: IntMatrix, basis_labels: Vec<String>) -> Result<Arc<Self>> {
        let name = name.into();
        if gram.rows() == 0 || !gram.is_square() {
            return Err(Error::Dimension { expected: gram.rows().max(1), got: gram.cols() });
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric(name));
        }
        if basis_labels.len() != gram.rows() {
            return Err(Error::Dimension { expected: gram.rows(), got: basis_labels.len() });
        }
        Ok(Arc::new(Lattice { name, gram, basis_labels }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    /// Largest d such that every self-intersection in the lattice is divisible
    /// by d: gcd of the diagonal entries and twice the off-diagonal ones.
    pub fn square_divisor(&self) -> Int {
        let n = self.rank();
        let mut g = Int::zero();
        for i in 0..n {
            g = g.gcd(self.gram.get(i, i));
            for j in i + 1..n {
                g = g.gcd(&(self.gram.get(i, j) * 2));
            }
        }
        g
    }

    pub fn bilinear(&self, x: &[Int], y: &[Int]) -> Int {
        let gy = self.gram.mul_vec(y).expect("coordinate length checked by caller");
        dot(x, &gy)
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice({}, gram={})", self.name, self.gram)
    }
}

fn same_lattice(a: &Arc<Lattice>, b: &Arc<Lattice>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::LatticeMismatch { left: a.name.clone(), right: b.name.clone() })
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct DivisorClass {
    lattice: Arc<Lattice>,
    coords: Vec<Int>,
}

impl DivisorClass {
    pub fn new(lattice: &Arc<Lattice>, coords: Vec<Int>) -> Result<Self> {
        if coords.len() != lattice.rank() {
            return Err(Error::Dimension { expected: lattice.rank(), got: coords.len() });
        }
        Ok(DivisorClass { lattice: Arc::clone(lattice), coords })
    }

    pub fn from_i64(lattice: &Arc<Lattice>, coords: &[i64]) -> Result<Self> {
        Self::new(lattice, coords.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn zero(lattice: &Arc<Lattice>) -> Self {
        DivisorClass { lattice: Arc::clone(lattice), coords: vec![Int::zero(); lattice.rank()] }
    }

    /// The i-th basis class (0-based).
    pub fn basis(lattice: &Arc<Lattice>, i: usize) -> Self {
        let mut c = Self::zero(lattice);
        c.coords[i] = Int::one();
        c
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Int> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &DivisorClass) -> Result<DivisorClass> {
        same_lattice(&self.lattice, &other.lattice)?;
        Ok(DivisorClass {
            lattice: Arc::clone(&self.lattice),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &DivisorClass) -> Result<DivisorClass> {
        same_lattice(&self.lattice, &other.lattice)?;
        Ok(DivisorClass {
            lattice: Arc::clone(&self.lattice),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, k: &Int) -> DivisorClass {
        DivisorClass { lattice: Arc::clone(&self.lattice), coords: self.coords.iter().map(|a| a * k).collect() }
    }

    pub fn is_primitive(&self) -> bool {
        crate::linalg::gcd_of(&self.coords).is_one()
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.lattice.name, self)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

/// `coords(D)ᵀ · gram · coords(E)`.
pub fn pairing(d: &DivisorClass, e: &DivisorClass) -> Result<Int> {
    same_lattice(&d.lattice, &e.lattice)?;
    Ok(d.lattice.bilinear(&d.coords, &e.coords))
}

pub fn self_intersection(d: &DivisorClass) -> Int {
    d.lattice.bilinear(&d.coords, &d.coords)
}

#[derive(Clone, PartialEq, Eq)]
pub struct Isometry {
    lattice: Arc<Lattice>,
    matrix: IntMatrix,
}

impl Isometry {
    /// Checks `Mᵀ G M = G` and `|det M| = 1`.
    pub fn new(lattice: &Arc<Lattice>, matrix: IntMatrix) -> Result<Self> {
        let n = lattice.rank();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Dimension { expected: n, got: matrix.rows().max(matrix.cols()) });
        }
        if !preserves_form(lattice, &matrix) || !matrix.det()?.abs().is_one() {
            return Err(Error::NotIsometry(lattice.name.clone()));
        }
        Ok(Isometry { lattice: Arc::clone(lattice), matrix })
    }

    pub fn identity(lattice: &Arc<Lattice>) -> Self {
        Isometry { lattice: Arc::clone(lattice), matrix: IntMatrix::identity(lattice.rank()) }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn inverse(&self) -> Isometry {
        let inv = self.matrix.unimodular_inverse().expect("isometries are unimodular");
        Isometry { lattice: Arc::clone(&self.lattice), matrix: inv }
    }

    /// `Mᵃ`, with `Mᵃ = (M⁻¹)^|a|` for negative `a`.
    pub fn power(&self, a: i64) -> Isometry {
        let base = if a < 0 { self.inverse() } else { self.clone() };
        let matrix = base.matrix.pow(a.unsigned_abs()).expect("square");
        Isometry { lattice: Arc::clone(&self.lattice), matrix }
    }
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Isometry({}, {})", self.lattice.name, self.matrix)
    }
}

pub fn preserves_form(lattice: &Lattice, m: &IntMatrix) -> bool {
    let g = lattice.gram();
    match m.transpose().mul(g).and_then(|t| t.mul(m)) {
        Ok(p) => &p == g,
        Err(_) => false,
    }
}

pub fn apply_isometry(m: &Isometry, d: &DivisorClass) -> Result<DivisorClass> {
    same_lattice(&m.lattice, &d.lattice)?;
    Ok(DivisorClass { lattice: Arc::clone(&d.lattice), coords: m.matrix.mul_vec(&d.coords)? })
}

/// Pullback of the composite map `f ∘ g`, given `first = f*` and `second = g*`:
/// `(f ∘ g)* = g* · f*` as matrices.
pub fn compose(first: &Isometry, second: &Isometry) -> Result<Isometry> {
    same_lattice(&first.lattice, &second.lattice)?;
    Ok(Isometry { lattice: Arc::clone(&first.lattice), matrix: second.matrix.mul(&first.matrix)? })
}

/// Re-expresses a lattice in a new basis whose vectors are the columns of
/// `basis_change` (coordinates in the old basis). Returns the new lattice and
/// the map taking old coordinates to new ones.
pub fn change_basis(
    lattice: &Arc<Lattice>,
    name: impl Into<String>,
    basis_change: &IntMatrix,
    labels: Vec<String>,
) -> Result<(Arc<Lattice>, IntMatrix)> {
    let inverse = basis_change
        .unimodular_inverse()
        .ok_or_else(|| Error::InvalidArgument("basis change is not unimodular".into()))?;
    let gram = basis_change.transpose().mul(lattice.gram())?.mul(basis_change)?;
    let new = Lattice::new(name, gram, labels)?;
    Ok((new, inverse))
}
