//! Rank-three lattices in `L`: canonical echelon form, reduction under a
//! weighted Minkowski form, and ellipsoid enumeration.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{embed_coords, FieldElement};
use crate::radicand::Radicand;

pub type Row = [BigInt; 3];

/// The Z-module spanned by `rows[i] / den`, rows on the basis `(1, δ, δ̄)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntLattice {
    pub rows: [Row; 3],
    pub den: BigInt,
}

impl IntLattice {
    pub fn new(rows: [Row; 3], den: BigInt) -> Self {
        IntLattice { rows, den }
    }

    /// Upper-triangular Hermite form with content shared with the denominator removed.
    /// Two lattices are equal iff their canonical forms are equal.
    pub fn canonical(&self) -> Self {
        Self::span(self.rows.to_vec(), self.den.clone())
    }

    /// The lattice spanned by any number of rows over `den`, in canonical form.
    pub fn span(mut m: Vec<Row>, den: BigInt) -> Self {
        assert!(m.len() >= 3, "lattice is not of full rank");
        for col in 0..3 {
            for row in col + 1..m.len() {
                if m[row][col].is_zero() {
                    continue;
                }
                let e = m[col][col].extended_gcd(&m[row][col]);
                let (p, q) = (&m[col][col] / &e.gcd, &m[row][col] / &e.gcd);
                let top: Row = [0, 1, 2].map(|j| &e.x * &m[col][j] + &e.y * &m[row][j]);
                let bottom: Row = [0, 1, 2].map(|j| &p * &m[row][j] - &q * &m[col][j]);
                m[col] = top;
                m[row] = bottom;
            }
            if m[col][col].is_negative() {
                m[col] = m[col].clone().map(|c| -c);
            }
            assert!(!m[col][col].is_zero(), "lattice is not of full rank");
            for above in 0..col {
                let f = m[above][col].div_floor(&m[col][col]);
                if !f.is_zero() {
                    for j in 0..3 {
                        let t = &f * &m[col][j];
                        m[above][j] -= t;
                    }
                }
            }
        }
        m.truncate(3);
        let mut den = den.abs();
        let flat: Vec<BigInt> = m.iter().flatten().cloned().collect();
        let g = crate::field::content_with(&den, &flat);
        if !g.is_one() {
            for c in m.iter_mut().flatten() {
                *c /= &g;
            }
            den /= &g;
        }
        let rows: [Row; 3] = m.try_into().expect("three rows");
        IntLattice { rows, den }
    }

    /// The module `Σ gᵢ·Λ`, e.g. an ideal from its generators over an order `Λ`.
    pub fn times_elements(&self, r: Radicand, gens: &[FieldElement]) -> Self {
        let mut rows = Vec::new();
        let mut den = BigInt::one();
        let mut prods = Vec::new();
        for g in gens {
            for i in 0..3 {
                let mut c = [0i64; 3];
                c[i] = 1;
                let p = &self.element(r, &c) * g;
                den = den.lcm(p.denominator());
                prods.push(p);
            }
        }
        for p in prods {
            let k = &den / p.denominator();
            rows.push(p.numerators().clone().map(|c| c * &k));
        }
        Self::span(rows, den)
    }

    pub fn element(&self, r: Radicand, coeffs: &[i64; 3]) -> FieldElement {
        let num: Row = [0, 1, 2].map(|j| {
            coeffs
                .iter()
                .zip(&self.rows)
                .map(|(&c, row)| BigInt::from(c) * &row[j])
                .sum()
        });
        FieldElement::new(r, num, self.den.clone())
    }

    /// Image under multiplication by `e`.
    pub fn scaled_by(&self, e: &FieldElement) -> Self {
        let r = *e.radicand();
        let rows = self.rows.clone().map(|row| crate::field::mul_coords(&r, &row, e.numerators()));
        IntLattice { rows, den: &self.den * e.denominator() }.canonical()
    }

    /// Membership of `e` by solving the triangular system of the canonical form.
    pub fn contains(&self, e: &FieldElement) -> bool {
        let c = self.canonical();
        // e = Σ k_i rows_i / den  ⟺  e_num·den = Σ k_i rows_i·e_den
        let mut target: Row = e.numerators().clone().map(|v| v * &c.den);
        let scale = e.denominator();
        for col in 0..3 {
            let piv = &c.rows[col][col] * scale;
            let (k, rem) = target[col].div_rem(&piv);
            if !rem.is_zero() {
                return false;
            }
            for j in 0..3 {
                let t = &k * &c.rows[col][j] * scale;
                target[j] -= t;
            }
        }
        target.iter().all(Zero::is_zero)
    }

    /// Covolume in Minkowski coordinates `(h, Re, Im)`.
    pub fn covolume(&self, r: &Radicand) -> f64 {
        let v = self.rows.clone().map(|row| {
            let (h, re, im) = embed_coords(r, &row, &self.den);
            [h, re, im]
        });
        det3(&v).abs()
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn dot(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// A basis reduced for the form `h²/wh² + (Re² + Im²)/wr²`, kept as exact rows
/// together with their scaled float embeddings.
pub struct ReducedBasis {
    pub rows: [Row; 3],
    pub den: BigInt,
    pub vecs: [[f64; 3]; 3],
}

fn scaled_embedding(r: &Radicand, row: &Row, den: &BigInt, wh: f64, wr: f64) -> [f64; 3] {
    let (h, re, im) = embed_coords(r, row, den);
    [h / wh, re / wr, im / wr]
}

/// LLL with `δ = 0.99`. Rows stay exact; embeddings are recomputed from them.
pub fn reduce(r: &Radicand, lat: &IntLattice, wh: f64, wr: f64) -> ReducedBasis {
    let mut rows = lat.rows.clone();
    let den = lat.den.clone();
    let mut vecs = rows.clone().map(|row| scaled_embedding(r, &row, &den, wh, wr));
    let mut k = 1;
    let mut guard = 0;
    while k < 3 {
        guard += 1;
        assert!(guard < 100_000, "LLL did not converge");
        for j in (0..k).rev() {
            let q = gram_schmidt(&vecs).0[k][j].round();
            if q != 0.0 {
                let qi = BigInt::from(q as i128);
                let sub: Row = [0, 1, 2].map(|t| &qi * &rows[j][t]);
                for t in 0..3 {
                    rows[k][t] -= &sub[t];
                }
                vecs[k] = scaled_embedding(r, &rows[k], &den, wh, wr);
            }
        }
        let (mu, bstar) = gram_schmidt(&vecs);
        let lovasz = (0.99 - mu[k][k - 1] * mu[k][k - 1]) * dot(&bstar[k - 1], &bstar[k - 1]);
        if dot(&bstar[k], &bstar[k]) < lovasz {
            rows.swap(k, k - 1);
            vecs.swap(k, k - 1);
            k = if k > 1 { k - 1 } else { 1 };
        } else {
            k += 1;
        }
    }
    ReducedBasis { rows, den, vecs }
}

fn gram_schmidt(v: &[[f64; 3]; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let mut mu = [[0.0; 3]; 3];
    let mut bs = *v;
    for i in 0..3 {
        for j in 0..i {
            let nj = dot(&bs[j], &bs[j]);
            mu[i][j] = if nj > 0.0 { dot(&v[i], &bs[j]) / nj } else { 0.0 };
            for t in 0..3 {
                bs[i][t] -= mu[i][j] * bs[j][t];
            }
        }
    }
    (mu, bs)
}

/// All nonzero coefficient vectors `c` (up to sign) with `‖Σ cᵢ·vecs[i]‖² ≤ bound`.
pub fn enumerate(basis: &ReducedBasis, bound: f64, limit: usize) -> Result<Vec<[i64; 3]>> {
    let (mu, bs) = gram_schmidt(&basis.vecs);
    let q: Vec<f64> = bs.iter().map(|b| dot(b, b)).collect();
    let mut out = Vec::new();
    let mut c = [0i64; 3];
    fn rec(
        i: usize,
        rest: f64,
        c: &mut [i64; 3],
        mu: &[[f64; 3]; 3],
        q: &[f64],
        out: &mut Vec<[i64; 3]>,
        limit: usize,
    ) -> Result<()> {
        let center: f64 = -(i + 1..3).map(|j| mu[j][i] * c[j] as f64).sum::<f64>();
        let span = (rest.max(0.0) / q[i]).sqrt();
        let lo = (center - span).ceil() as i64;
        let hi = (center + span).floor() as i64;
        for x in lo..=hi {
            c[i] = x;
            let t = x as f64 - center;
            let left = rest - t * t * q[i];
            if left < 0.0 {
                continue;
            }
            if i == 0 {
                if c.iter().any(|&v| v != 0) {
                    // keep one of each ± pair
                    let first = c.iter().find(|&&v| v != 0).copied().unwrap();
                    if first > 0 {
                        out.push(*c);
                        if out.len() > limit {
                            return Err(Error::EnumerationOverflow(format!(
                                "more than {limit} lattice points"
                            )));
                        }
                    }
                }
            } else {
                rec(i - 1, left, c, mu, q, out, limit)?;
            }
        }
        c[i] = 0;
        Ok(())
    }
    rec(2, bound, &mut c, &mu, &q, &mut out, limit)?;
    Ok(out)
}

impl ReducedBasis {
    pub fn element(&self, r: Radicand, coeffs: &[i64; 3]) -> FieldElement {
        IntLattice { rows: self.rows.clone(), den: self.den.clone() }.element(r, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radicand::normalize;

    fn row(x: i64, y: i64, z: i64) -> Row {
        [x.into(), y.into(), z.into()]
    }

    #[test]
    fn canonical_form_is_basis_independent() {
        let a = IntLattice::new([row(2, 1, 0), row(0, 3, 1), row(1, 1, 1)], 1.into());
        let b = IntLattice::new([row(3, 5, 2), row(0, 3, 1), row(1, 1, 1)], 1.into());
        // (3, 5, 2) is the sum of all three rows of a
        assert_eq!(a.canonical(), b.canonical());
        let c = a.canonical();
        assert!(c.rows[1][0].is_zero() && c.rows[2][0].is_zero() && c.rows[2][1].is_zero());
    }

    #[test]
    fn canonical_strips_common_content() {
        let a = IntLattice::new([row(2, 0, 0), row(0, 2, 0), row(0, 0, 2)], 4.into());
        let c = a.canonical();
        assert_eq!(c.den, BigInt::from(2));
        assert_eq!(c.rows[0], row(1, 0, 0));
    }

    #[test]
    fn membership() {
        let r = normalize(10).unwrap();
        let lat = IntLattice::new([row(3, 0, 0), row(0, 3, 0), row(1, 1, 1)], 3.into());
        assert!(lat.contains(&FieldElement::from_ints(r, 5, -2, 7)));
        let third = FieldElement::new(r, row(1, 1, 1), 3.into());
        assert!(lat.contains(&third));
        let other = FieldElement::new(r, row(1, -1, 1), 3.into());
        assert!(!lat.contains(&other));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let r = normalize(7).unwrap();
        let lat = IntLattice::new([row(1, 0, 0), row(0, 1, 0), row(0, 0, 1)], 1.into());
        let basis = reduce(&r, &lat, 1.0, 2.0);
        let bound = 3.0;
        let mut found: Vec<FieldElement> = enumerate(&basis, bound, 10_000)
            .unwrap()
            .iter()
            .map(|c| basis.element(r, c))
            .collect();
        let mut brute = Vec::new();
        for x in -30i64..=30 {
            for y in -30i64..=30 {
                for z in -30i64..=30 {
                    if (x, y, z) == (0, 0, 0) {
                        continue;
                    }
                    let e = FieldElement::from_ints(r, x, y, z);
                    let (h, re, im) = e.approx_embedding();
                    let v = h * h + (re * re + im * im) / 4.0;
                    if v <= bound && e.sign() > 0 {
                        brute.push(e);
                    }
                }
            }
        }
        for e in found.iter_mut() {
            if e.sign() < 0 {
                *e = -&*e;
            }
        }
        let key = |e: &FieldElement| e.to_string();
        found.sort_by_key(key);
        brute.sort_by_key(key);
        assert_eq!(found, brute);
        assert!(!found.is_empty());
    }

    #[test]
    fn covolume_of_suborder() {
        // sqrt(27·a²b²)/2 for Z[δ, δ̄]
        let r = normalize(12).unwrap();
        let lat = IntLattice::new([row(1, 0, 0), row(0, 1, 0), row(0, 0, 1)], 1.into());
        let expected = (27.0f64 * 36.0).sqrt() / 2.0;
        assert!((lat.covolume(&r) - expected).abs() < 1e-9);
    }
}
