//! Exact Fourier–Motzkin elimination for homogeneous cones.
//!
//! `cone_generators` turns {x : Gx ≥ 0} into rays plus a lineality basis. It
//! writes the dual cone as the projection {y : y = Gᵀλ, λ ≥ 0}, eliminates λ
//! (equalities by row reduction, the rest by Fourier–Motzkin with Chernikov's
//! history rule), and reads generators off the resulting H-description.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot, integer_kernel, primitive, rational_to_primitive, Int, IntMatrix, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeGenerators {
    pub rays: Vec<Vec<Int>>,
    pub lineality: Vec<Vec<Int>>,
}

impl ConeGenerators {
    pub fn is_zero_cone(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<Int>,
    history: BTreeSet<usize>,
}

fn normalize(coeffs: Vec<Int>) -> Vec<Int> {
    if coeffs.iter().all(Zero::is_zero) {
        coeffs
    } else {
        primitive(&coeffs)
    }
}

/// Eliminates the last `eliminate` variables from the system {a·x ≥ 0}.
/// Rows are returned primitive and without duplicates; the all-zero row is
/// dropped.
pub fn fourier_motzkin(rows: &[Vec<Int>], eliminate: usize, max_rows: usize) -> Result<Vec<Vec<Int>>> {
    let n = rows.first().map_or(0, Vec::len);
    if eliminate > n {
        return Err(Error::Dimension { expected: n, got: eliminate });
    }
    let mut cur: Vec<Row> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| Row { coeffs: normalize(r.clone()), history: BTreeSet::from([i]) })
        .collect();
    for step in 0..eliminate {
        let col = n - 1 - step;
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for r in cur {
            match r.coeffs[col].sign() {
                num_bigint::Sign::Plus => pos.push(r),
                num_bigint::Sign::Minus => neg.push(r),
                num_bigint::Sign::NoSign => keep.push(r),
            }
        }
        let mut seen: BTreeSet<Vec<Int>> = keep.iter().map(|r| r.coeffs.clone()).collect();
        for p in &pos {
            for q in &neg {
                let history: BTreeSet<usize> = p.history.union(&q.history).copied().collect();
                if history.len() > step + 2 {
                    continue;
                }
                let (pc, qc) = (&p.coeffs[col], -&q.coeffs[col]);
                let coeffs: Vec<Int> = p.coeffs.iter().zip(&q.coeffs).map(|(x, y)| x * &qc + y * pc).collect();
                let coeffs = normalize(coeffs);
                if seen.insert(coeffs.clone()) {
                    keep.push(Row { coeffs, history });
                }
            }
        }
        if keep.len() > max_rows {
            return Err(Error::Resource(format!(
                "Fourier-Motzkin produced {} inequalities (limit {max_rows})",
                keep.len()
            )));
        }
        cur = keep;
    }
    let mut out = BTreeSet::new();
    for r in cur {
        let head: Vec<Int> = r.coeffs[..n - eliminate].to_vec();
        if head.iter().any(|v| !v.is_zero()) {
            out.insert(normalize(head));
        }
    }
    Ok(out.into_iter().collect())
}

/// Reduced row echelon form in place over Q; returns pivot columns among the
/// first `ncols` columns.
fn rref(m: &mut [Vec<Rat>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Rat::one() / m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (v, pv) in m[i].iter_mut().zip(&pivot_row) {
                    *v = &*v - &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

/// A basis (primitive, pairwise orthogonal integer rows) of the row space
/// of `rows`.
pub fn row_space_basis(rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    Projector::new(rows).ortho
}

/// Extreme rays of {x ∈ Qⁿ : g·x ≥ 0} modulo its lineality ker g, taken in
/// the row space of g (so orthogonal to the lineality), and dim ker g.
pub fn cone_rays(g: &[Vec<Int>], n: usize, max_rows: usize) -> Result<(Vec<Vec<Int>>, usize)> {
    if let Some(bad) = g.iter().find(|r| r.len() != n) {
        return Err(Error::Dimension { expected: n, got: bad.len() });
    }
    let basis = row_space_basis(g);
    let r = basis.len();
    if r == 0 {
        return Ok((Vec::new(), n));
    }
    // x = Σ s_i b_i; the reduced system has full column rank r.
    let reduced: Vec<Vec<Int>> = g.iter().map(|row| basis.iter().map(|b| dot(row, b)).collect()).collect();
    let pointed = dual_generators(&reduced, r, max_rows)?;
    debug_assert!(pointed.lineality.is_empty());
    // FM output can keep redundant inequalities; keep only extreme rays.
    let rays: BTreeSet<Vec<Int>> = pointed
        .rays
        .iter()
        .filter(|s| {
            let tight: Vec<Vec<Int>> = reduced.iter().filter(|row| dot(row, s).is_zero()).cloned().collect();
            row_space_basis(&tight).len() + 1 == r
        })
        .map(|s| normalize((0..n).map(|c| basis.iter().zip(s).map(|(b, x)| &b[c] * x).sum()).collect()))
        .collect();
    Ok((rays.into_iter().collect(), n - r))
}

/// Generators of {x ∈ Qⁿ : g·x ≥ 0 for every row g}.
pub fn cone_generators(g: &[Vec<Int>], n: usize, max_rows: usize) -> Result<ConeGenerators> {
    let (rays, lineality_dim) = cone_rays(g, n, max_rows)?;
    let lineality = if lineality_dim == 0 {
        Vec::new()
    } else if g.is_empty() {
        (0..n).map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()).collect()
    } else {
        let m = IntMatrix::from_rows(g.to_vec())?;
        integer_kernel(&m).into_iter().map(normalize).collect()
    };
    Ok(ConeGenerators { rays, lineality })
}

/// The dual construction on its own; `g` need not have full column rank, in
/// which case the lineality comes back as well.
fn dual_generators(g: &[Vec<Int>], n: usize, max_rows: usize) -> Result<ConeGenerators> {
    let m = g.len();
    if m == 0 {
        let lineality = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect();
        return Ok(ConeGenerators { rays: Vec::new(), lineality });
    }
    // Equations Σ_r G[r][i] λ_r − y_i = 0, columns (λ | y).
    let mut eq: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = g.iter().map(|r| Rat::from_integer(r[i].clone())).collect();
            row.extend((0..n).map(|j| if i == j { -Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut eq, m);
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();

    // Rows after the pivots only involve y: they cut out the span of P*.
    let equalities: Vec<Vec<Int>> = eq[pivots.len()..]
        .iter()
        .map(|r| r[m..].to_vec())
        .filter(|r| r.iter().any(|v| !v.is_zero()))
        .map(|r| rational_to_primitive(&r))
        .collect();

    // λ_p = −(y-part) − Σ_f a_f λ_f ≥ 0, and λ_f ≥ 0; columns (y | λ_free).
    let mut ineqs: Vec<Vec<Int>> = Vec::new();
    for i in 0..pivots.len() {
        let mut row: Vec<Rat> = eq[i][m..].iter().map(|v| -v).collect();
        row.extend(free.iter().map(|&f| -&eq[i][f]));
        ineqs.push(rational_to_primitive(&row));
    }
    for k in 0..free.len() {
        let mut row = vec![Int::zero(); n + free.len()];
        row[n + k] = Int::one();
        ineqs.push(row);
    }
    let lineality = row_space_basis(&equalities);
    let projector = Projector::new(&lineality);
    let mut rays = BTreeSet::new();
    for r in fourier_motzkin(&ineqs, free.len(), max_rows)? {
        let p = projector.project(&r);
        if p.iter().any(|v| !v.is_zero()) {
            rays.insert(p);
        }
    }
    Ok(ConeGenerators { rays: rays.into_iter().collect(), lineality })
}

/// Orthogonal projection (standard inner product) onto the complement of a
/// subspace, via an integral orthogonal basis of the subspace.
#[derive(Clone, Debug)]
pub struct Projector {
    ortho: Vec<Vec<Int>>,
    norms: Vec<Int>,
}

impl Projector {
    pub fn new(basis: &[Vec<Int>]) -> Self {
        let mut p = Projector { ortho: Vec::new(), norms: Vec::new() };
        for b in basis {
            let u = p.project(b);
            if u.iter().any(|v| !v.is_zero()) {
                p.norms.push(dot(&u, &u));
                p.ortho.push(u);
            }
        }
        p
    }

    /// Primitive integer vector on the ray of the component of `x` inside
    /// the subspace.
    pub fn onto(&self, x: &[Int]) -> Vec<Int> {
        let mut out = vec![Rat::zero(); x.len()];
        for (u, nu) in self.ortho.iter().zip(&self.norms) {
            let c = Rat::new(dot(x, u), nu.clone());
            if c.is_zero() {
                continue;
            }
            for (o, ui) in out.iter_mut().zip(u) {
                *o += &c * Rat::from_integer(ui.clone());
            }
        }
        rational_to_primitive(&out)
    }

    pub fn dim(&self) -> usize {
        self.ortho.len()
    }

    /// Primitive integer vector on the ray of the projection of `x`.
    /// Fraction-free: each step scales by a positive norm, so the ray is kept.
    pub fn project(&self, x: &[Int]) -> Vec<Int> {
        let mut out = normalize(x.to_vec());
        for (u, nu) in self.ortho.iter().zip(&self.norms) {
            let c = dot(&out, u);
            if c.is_zero() {
                continue;
            }
            out = normalize(out.iter().zip(u).map(|(o, ui)| o * nu - &c * ui).collect());
        }
        out
    }
}

/// Primitive integer vector on the ray of the orthogonal projection of `x`
/// onto the complement of span(`basis`), standard inner product.
pub fn project_off(x: &[Int], basis: &[Vec<Int>]) -> Vec<Int> {
    Projector::new(basis).project(x)
}

pub fn satisfies(g: &[Vec<Int>], x: &[Int]) -> bool {
    g.iter().all(|r| !dot(r, x).is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ints;

    fn rows(r: &[&[i64]]) -> Vec<Vec<Int>> {
        r.iter().map(|x| ints(x)).collect()
    }

    #[test]
    fn orthant() {
        let g = rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let c = cone_generators(&g, 3, 1000).unwrap();
        assert!(c.lineality.is_empty());
        assert_eq!(c.rays.len(), 3);
        for r in &c.rays {
            assert_eq!(r.iter().filter(|v| !v.is_zero()).count(), 1);
        }
    }

    #[test]
    fn hyperplane_is_lineality() {
        let g = rows(&[&[1, 0], &[-1, 0]]);
        let c = cone_generators(&g, 2, 1000).unwrap();
        assert!(c.rays.is_empty());
        assert_eq!(c.lineality.len(), 1);
        assert!(c.lineality[0][0].is_zero());
    }

    #[test]
    fn half_plane() {
        let g = rows(&[&[1, 1]]);
        let c = cone_generators(&g, 2, 1000).unwrap();
        assert_eq!(c.rays, rows(&[&[1, 1]]));
        assert_eq!(c.lineality.len(), 1);
    }

    #[test]
    fn square_pyramid() {
        // x_3 ≥ |x_1|, x_3 ≥ |x_2|: four extreme rays (±1, ±1, 1)
        let g = rows(&[&[1, 0, 1], &[-1, 0, 1], &[0, 1, 1], &[0, -1, 1]]);
        let c = cone_generators(&g, 3, 1000).unwrap();
        assert!(c.lineality.is_empty());
        let expect: BTreeSet<Vec<Int>> =
            [[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]].iter().map(|r| ints(r)).collect();
        let got: BTreeSet<Vec<Int>> = c.rays.into_iter().collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn empty_interior_gives_zero_cone() {
        let g = rows(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        assert!(cone_generators(&g, 2, 1000).unwrap().is_zero_cone());
    }

    #[test]
    fn projection_of_square() {
        // homogenized square 0 ≤ x, y ≤ t projected onto (x, t): 0 ≤ x ≤ t
        let g = rows(&[&[1, 0, 0], &[-1, 0, 1], &[0, 0, 1], &[0, 1, 0], &[0, -1, 1]]);
        let g: Vec<Vec<Int>> = g.into_iter().map(|r| vec![r[0].clone(), r[2].clone(), r[1].clone()]).collect();
        let p = fourier_motzkin(&g, 1, 100).unwrap();
        let got: BTreeSet<Vec<Int>> = p.into_iter().collect();
        assert!(got.contains(&ints(&[1, 0])));
        assert!(got.contains(&ints(&[-1, 1])));
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let g = rows(&[&[1, -1, 2], &[0, 0, -1], &[-1, 3, -1], &[1, 0, 2], &[0, 1, 0], &[1, -2, 0]]);
        let c = cone_generators(&g, 3, 1000).unwrap();
        for r in &c.rays {
            let tight: Vec<Vec<Int>> = g.iter().filter(|row| dot(row, r).is_zero()).cloned().collect();
            assert_eq!(row_space_basis(&tight).len(), 2, "{r:?} is not extreme");
        }
    }

    #[test]
    fn projector_matches_definition() {
        let basis = rows(&[&[1, 1, 0, 0], &[0, 1, 1, 0]]);
        let p = Projector::new(&basis);
        let x = ints(&[3, -1, 4, 1]);
        let y = p.project(&x);
        assert!(basis.iter().all(|b| dot(b, &y).is_zero()));
        let z = p.onto(&x);
        // x − (component in span) is a multiple of y
        let comp_scale = dot(&z, &z);
        let resid: Vec<Int> = x.iter().zip(&z).map(|(a, b)| a * &comp_scale - b * dot(&x, &z)).collect();
        assert_eq!(primitive(&resid), y);
    }

    #[test]
    fn resource_limit() {
        let g = rows(&[&[1, 0, 1], &[-1, 0, 1], &[0, 1, 1], &[0, -1, 1]]);
        assert!(matches!(cone_generators(&g, 3, 1), Err(Error::Resource(_))));
    }
}
