//! Exact arithmetic in `L = Q(∛d)` on the basis `(1, δ, δ̄)` with
//! `δ = ∛(ab²)` and `δ̄ = ∛(a²b)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::dyadic::{filtered_sign, interval_sign, max_bits, scaled_to_f64, cbrt_floor_scaled};
use crate::error::{Error, Result};
use crate::radicand::{Radicand, Species};

/// `x + yδ + zδ̄` stored as an integer numerator triple over a positive denominator
/// in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    radicand: Radicand,
    num: [BigInt; 3],
    den: BigInt,
}

/// `gcd(den, c₀, c₁, c₂)`, reducing the large entries modulo the running gcd
/// first so that huge numerators over small denominators stay cheap.
pub(crate) fn content_with(den: &BigInt, coords: &[BigInt]) -> BigInt {
    let mut g = den.abs();
    for c in coords {
        if g.is_one() {
            break;
        }
        g = if g.is_zero() { c.abs() } else { g.gcd(&(c % &g)) };
    }
    g
}

/// Product of integer coordinate triples.
pub fn mul_coords(r: &Radicand, u: &[BigInt; 3], v: &[BigInt; 3]) -> [BigInt; 3] {
    let (a, b) = (BigInt::from(r.a), BigInt::from(r.b));
    let ab = &a * &b;
    [
        &u[0] * &v[0] + &ab * (&u[1] * &v[2] + &u[2] * &v[1]),
        &u[0] * &v[1] + &u[1] * &v[0] + &a * &u[2] * &v[2],
        &u[0] * &v[2] + &u[2] * &v[0] + &b * &u[1] * &v[1],
    ]
}

/// `x³ + ab²y³ + a²bz³ − 3abxyz` on integer coordinates.
pub fn norm_coords(r: &Radicand, u: &[BigInt; 3]) -> BigInt {
    let [x, y, z] = u;
    x * x * x + BigInt::from(r.d) * y * y * y + BigInt::from(r.dbar) * z * z * z
        - BigInt::from(3 * r.a * r.b) * x * y * z
}

/// `(x² − ab·yz, a·z² − xy, b·y² − xz)`, the value `|θ'|²` of the complex embedding.
pub fn conjugate_product_coords(r: &Radicand, u: &[BigInt; 3]) -> [BigInt; 3] {
    let [x, y, z] = u;
    [
        x * x - BigInt::from(r.a * r.b) * y * z,
        BigInt::from(r.a) * z * z - x * y,
        BigInt::from(r.b) * y * y - x * z,
    ]
}

/// Exact sign of `A + Bδ + Cδ̄` for integers.
pub fn sign_coords(r: &Radicand, u: &[BigInt; 3]) -> i8 {
    if u.iter().all(Zero::is_zero) {
        return 0;
    }
    let f = |v: &BigInt| num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY);
    let (rd, rn) = ((r.d as f64).cbrt(), (r.dbar as f64).cbrt());
    if let Some(s) = filtered_sign(f(&u[0]), f(&u[1]), f(&u[2]), rd, rn) {
        return s;
    }
    // 1, δ, δ̄ are linearly independent over Q, so a nonzero vector has nonzero value
    interval_sign(&u[0], &u[1], &u[2], r.d, r.dbar)
}

/// Exact sign of `A + B∛(ab²) + C∛(a²b)` for rationals.
pub fn exact_sign(a: &BigRational, b: &BigRational, c: &BigRational, r: &Radicand) -> i8 {
    let l = a.denom().lcm(b.denom()).lcm(c.denom());
    let scale = |q: &BigRational| q.numer() * (&l / q.denom());
    sign_coords(r, &[scale(a), scale(b), scale(c)])
}

/// A real number `A + Bδ + Cδ̄` together with its certified sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedValue {
    pub expression: [BigRational; 3],
    pub certified_sign: i8,
}

impl SignedValue {
    pub fn new(r: &Radicand, expression: [BigRational; 3]) -> Self {
        let certified_sign = exact_sign(&expression[0], &expression[1], &expression[2], r);
        SignedValue { expression, certified_sign }
    }
}

/// Sign pattern `(s1, s2)` making `(1 + s1δ + s2δ̄)/3` integral; `None` unless species 2.
pub fn maximal_order_signs(r: &Radicand) -> Option<(i64, i64)> {
    let (a, b) = (r.a as i128, r.b as i128);
    for s1 in [1i64, -1] {
        for s2 in [1i64, -1] {
            let (t1, t2) = (s1 as i128, s2 as i128);
            let second = 1 - a * b * t1 * t2;
            let third = 1 + a * b * b * t1 + a * a * b * t2 - 3 * a * b * t1 * t2;
            if second % 3 == 0 && third % 27 == 0 {
                return Some((s1, s2));
            }
        }
    }
    None
}

impl FieldElement {
    pub fn new(radicand: Radicand, num: [BigInt; 3], den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut e = FieldElement { radicand, num, den };
        e.reduce();
        e
    }

    pub fn from_coords(radicand: Radicand, num: [BigInt; 3]) -> Self {
        FieldElement { radicand, num, den: BigInt::one() }
    }

    pub fn from_ints(radicand: Radicand, x: i64, y: i64, z: i64) -> Self {
        Self::from_coords(radicand, [x.into(), y.into(), z.into()])
    }

    pub fn from_rationals(radicand: Radicand, c: [BigRational; 3]) -> Self {
        let l = c[0].denom().lcm(c[1].denom()).lcm(c[2].denom());
        let num = c.map(|q| q.numer() * (&l / q.denom()));
        Self::new(radicand, num, l)
    }

    pub fn zero(r: Radicand) -> Self {
        Self::from_ints(r, 0, 0, 0)
    }

    pub fn one(r: Radicand) -> Self {
        Self::from_ints(r, 1, 0, 0)
    }

    pub fn rational(r: Radicand, q: BigRational) -> Self {
        let z = BigRational::zero();
        Self::from_rationals(r, [q, z.clone(), z])
    }

    pub fn delta(r: Radicand) -> Self {
        Self::from_ints(r, 0, 1, 0)
    }

    pub fn delta_bar(r: Radicand) -> Self {
        Self::from_ints(r, 0, 0, 1)
    }

    fn reduce(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        let g = content_with(&self.den, &self.num);
        if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
    }

    pub fn radicand(&self) -> &Radicand {
        &self.radicand
    }

    pub fn numerators(&self) -> &[BigInt; 3] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn coords(&self) -> [BigRational; 3] {
        self.num.clone().map(|c| BigRational::new(c, self.den.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1].is_zero() && self.num[2].is_zero()
    }

    fn check_parent(&self, other: &Self) -> Result<()> {
        if self.radicand != other.radicand {
            return Err(Error::MixedParents(self.radicand.d, other.radicand.d));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_parent(other)?;
        Ok(Self::new(
            self.radicand,
            mul_coords(&self.radicand, &self.num, &other.num),
            &self.den * &other.den,
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_parent(other)?;
        let num = [0, 1, 2].map(|i| &self.num[i] * &other.den + &other.num[i] * &self.den);
        Ok(Self::new(self.radicand, num, &self.den * &other.den))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.radicand, self.num.clone().map(|c| c * k), self.den.clone())
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        Self::new(self.radicand, self.num.clone(), &self.den * k)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.radicand);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn norm(&self) -> BigRational {
        BigRational::new(norm_coords(&self.radicand, &self.num), self.den.pow(3))
    }

    /// `θ'θ''` as an element of `L`; `e · cp(e) = N(e)`.
    pub fn conjugate_product(&self) -> Self {
        Self::new(
            self.radicand,
            conjugate_product_coords(&self.radicand, &self.num),
            &self.den * &self.den,
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Inconsistent("inverse of zero".into()));
        }
        // cp(num/den) / N(num/den) = cp(num)·den / N(num)
        let n = norm_coords(&self.radicand, &self.num);
        let cp = conjugate_product_coords(&self.radicand, &self.num);
        Ok(Self::new(self.radicand, cp.map(|c| c * &self.den), n))
    }

    /// Exact sign of the real value.
    pub fn sign(&self) -> i8 {
        sign_coords(&self.radicand, &self.num)
    }

    /// Exact comparison of real values.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    /// Exact comparison of the real value with an integer.
    pub fn cmp_int(&self, k: i64) -> Ordering {
        let mut v = self.num.clone();
        v[0] -= &self.den * k;
        sign_coords(&self.radicand, &v).cmp(&0)
    }

    /// Real embedding `h` and the complex embedding `(Re, Im)` as floats, computed
    /// from a fixed-point evaluation wide enough to absorb any cancellation.
    pub fn approx_embedding(&self) -> (f64, f64, f64) {
        embed_coords(&self.radicand, &self.num, &self.den)
    }

    pub fn approx(&self) -> f64 {
        self.approx_embedding().0
    }

    pub fn approx_radius_sq(&self) -> f64 {
        let (_, re, im) = self.approx_embedding();
        re * re + im * im
    }

    /// Coefficients `(t, s, n)` of the characteristic polynomial `X³ − tX² + sX − n`.
    pub fn char_poly(&self) -> [BigRational; 3] {
        let [x, y, z] = self.coords();
        let ab = BigRational::from_integer(BigInt::from(self.radicand.a * self.radicand.b));
        let three = BigRational::from_integer(3.into());
        [
            &three * &x,
            &three * (&x * &x - ab * y * z),
            self.norm(),
        ]
    }

    pub fn in_suborder0(&self) -> bool {
        self.den.is_one()
    }

    pub fn in_maximal_order(&self) -> bool {
        if self.den.is_one() {
            return true;
        }
        if self.radicand.species != Species::S2 || self.den != BigInt::from(3) {
            return false;
        }
        let (s1, s2) = maximal_order_signs(&self.radicand).expect("species 2 has a sign pattern");
        let t = self.num[0].mod_floor(&BigInt::from(3));
        let ok = |c: &BigInt, s: i64| (c - &t * s).mod_floor(&BigInt::from(3)).is_zero();
        ok(&self.num[1], s1) && ok(&self.num[2], s2)
    }
}

/// Float embedding of `num/den`, see [`FieldElement::approx_embedding`].
pub fn embed_coords(r: &Radicand, num: &[BigInt; 3], den: &BigInt) -> (f64, f64, f64) {
    let bits = max_bits(num.iter());
    let mut k = (2 * bits + 64).div_ceil(64) * 64;
    loop {
        let yk = &num[1] * cbrt_floor_scaled(r.d, k);
        let zk = &num[2] * cbrt_floor_scaled(r.dbar, k);
        let xk = &num[0] << k as usize;
        let h = &xk + &yk + &zk;
        let re = (&xk << 1usize) - &yk - &zk;
        let im = &yk - &zk;
        // absolute error stays below 2^(bits + 2); ask for 60 more significant bits
        let enough = |v: &BigInt| v.is_zero() || v.bits() >= bits + 62;
        if (enough(&h) && enough(&re) && enough(&im)) || k > 8 * bits + 512 {
            let dv = scaled_to_f64(den, 0);
            return (
                scaled_to_f64(&h, k) / dv,
                scaled_to_f64(&re, k + 1) / dv,
                scaled_to_f64(&im, k) * (3f64.sqrt() / 2.0) / dv,
            );
        }
        k *= 2;
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = &self.num;
        if self.den.is_one() {
            write!(f, "({x}, {y}, {z})")
        } else {
            write!(f, "({x}, {y}, {z})/{}", self.den)
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    /// Panics on mixed parents; use [`FieldElement::mul`] for the checked form.
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::mul(self, rhs).expect("mixed parents")
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::add(self, rhs).expect("mixed parents")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::add(self, &-rhs).expect("mixed parents")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            radicand: self.radicand,
            num: self.num.clone().map(|c| -c),
            den: self.den.clone(),
        }
    }
}
