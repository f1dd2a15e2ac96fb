//! Arithmetic in `k = L(ζ)` and certified cube tests for units of `k`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{cbrt_floor_scaled, max_bits};
use crate::error::{Error, Result};
use crate::factor::{cube_roots_mod, inv_mod, is_prime, pow_mod, unity_cube_roots};
use crate::field::FieldElement;
use crate::radicand::Radicand;

/// `p + q·ζ` with `ζ² = −1 − ζ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KElement {
    pub p: FieldElement,
    pub q: FieldElement,
}

impl KElement {
    pub fn new(p: FieldElement, q: FieldElement) -> Self {
        KElement { p, q }
    }

    pub fn from_l(p: FieldElement) -> Self {
        let q = FieldElement::zero(*p.radicand());
        KElement { p, q }
    }

    pub fn one(r: Radicand) -> Self {
        Self::from_l(FieldElement::one(r))
    }

    pub fn zeta(r: Radicand) -> Self {
        KElement { p: FieldElement::zero(r), q: FieldElement::one(r) }
    }

    pub fn radicand(&self) -> &Radicand {
        self.p.radicand()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let qs = &self.q * &o.q;
        KElement {
            p: &(&self.p * &o.p) - &qs,
            q: &(&(&self.p * &o.q) + &(&self.q * &o.p)) - &qs,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(*self.radicand());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `σ` on `L` embedded in `k`: `δ ↦ ζδ`, `δ̄ ↦ ζ²δ̄`.
    pub fn sigma_of_l(e: &FieldElement) -> Self {
        let r = *e.radicand();
        let [x, y, z] = e.numerators().clone();
        let den = e.denominator().clone();
        let p = FieldElement::new(r, [x, BigInt::zero(), -&z], den.clone());
        let q = FieldElement::new(r, [BigInt::zero(), y, -z], den);
        KElement { p, q }
    }

    /// `σ` fixes `ζ`.
    pub fn sigma(&self) -> Self {
        let sp = Self::sigma_of_l(&self.p);
        let sq = Self::sigma_of_l(&self.q);
        sp.add(&sq.mul(&Self::zeta(*self.radicand())))
    }

    /// Complex conjugation: `ζ ↦ ζ² = −1 − ζ`.
    pub fn tau(&self) -> Self {
        KElement { p: &self.p - &self.q, q: -&self.q }
    }

    pub fn add(&self, o: &Self) -> Self {
        KElement { p: &self.p + &o.p, q: &self.q + &o.q }
    }

    /// `w · σ(w) · σ²(w)`, which lies in `Q(ζ)`.
    pub fn relative_norm(&self) -> Self {
        let s1 = self.sigma();
        let s2 = s1.sigma();
        self.mul(&s1).mul(&s2)
    }

    fn all_coords(&self) -> impl Iterator<Item = &BigInt> {
        self.p.numerators().iter().chain(self.q.numerators().iter())
    }

    /// Image in `F_p` under `ζ ↦ rho`, `δ ↦ t`, `δ̄ ↦ t²/b`.
    fn reduce_mod(&self, p: u64, rho: u64, t: u64) -> Option<u64> {
        let r = self.radicand();
        let tb = t * t % p * inv_mod(r.b % p, p) % p;
        let image = |e: &FieldElement| -> Option<u64> {
            let pm = BigInt::from(p);
            let den = e.denominator().mod_floor(&pm).to_u64().unwrap();
            if den == 0 {
                return None;
            }
            let c = e.numerators().clone().map(|v| v.mod_floor(&pm).to_u64().unwrap());
            let v = (c[0] + c[1] * t % p + c[2] * tb % p) % p;
            Some(v * inv_mod(den, p) % p)
        };
        Some((image(&self.p)? + image(&self.q)? * rho) % p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CubeCertificate {
    /// An exact cube root.
    Root(KElement),
    /// A prime ideal of degree one, given by `p` and the images of `ζ` and `δ`,
    /// at which the element is a cubic non-residue.
    NonResidue { prime: u64, zeta: u64, delta: u64 },
}

const PRIMES_FIRST_PASS: usize = 24;
const PRIMES_TOTAL: usize = 400;
pub const DEFAULT_PRECISION_BUDGET: u64 = 1 << 18;

/// Degree-one primes of `k(∛d)`: `p ≡ 1 (mod 3)` with `d` a cube mod `p`, with their embeddings.
fn split_primes(r: &Radicand, skip: usize, count: usize) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    let mut seen = 0;
    let mut p = 7u64;
    while seen < skip + count {
        if p % 3 == 1 && is_prime(p) && r.a % p != 0 && r.b % p != 0 {
            let roots = cube_roots_mod(r.d % p, p);
            if !roots.is_empty() {
                if seen >= skip {
                    for rho in unity_cube_roots(p) {
                        for &t in &roots {
                            out.push((p, rho, t));
                        }
                    }
                }
                seen += 1;
            }
        }
        p += 2;
    }
    out
}

fn residue_certificate(w: &KElement, primes: &[(u64, u64, u64)]) -> Option<CubeCertificate> {
    for &(p, rho, t) in primes {
        if let Some(v) = w.reduce_mod(p, rho, t) {
            if v != 0 && pow_mod(v, (p - 1) / 3, p) != 1 {
                return Some(CubeCertificate::NonResidue { prime: p, zeta: rho, delta: t });
            }
        }
    }
    None
}

/// Cube test for a unit `w` of `k`; `budget` caps the working precision in bits.
pub fn is_cube_in_k(w: &KElement, budget: u64) -> Result<(bool, CubeCertificate)> {
    let r = *w.radicand();
    if let Some(c) = residue_certificate(w, &split_primes(&r, 0, PRIMES_FIRST_PASS)) {
        return Ok((false, c));
    }
    let mut bits = 2 * max_bits(w.all_coords()) + 128;
    while bits <= budget {
        if let Some(root) = reconstruct_cube_root(w, bits as usize) {
            return Ok((true, CubeCertificate::Root(root)));
        }
        bits *= 2;
    }
    if let Some(c) = residue_certificate(w, &split_primes(&r, PRIMES_FIRST_PASS, PRIMES_TOTAL)) {
        return Ok((false, c));
    }
    Err(Error::Undecided { bits: budget })
}

/// Complex fixed-point number scaled by `2^k`.
#[derive(Clone, Debug)]
struct Cx {
    re: BigInt,
    im: BigInt,
}

struct Fixed {
    k: usize,
    one: BigInt,
    sqrt3: BigInt,
    delta: BigInt,
    delta_bar: BigInt,
}

impl Fixed {
    fn new(r: &Radicand, k: usize) -> Self {
        Fixed {
            k,
            one: BigInt::one() << k,
            sqrt3: (BigInt::from(3) << (2 * k)).sqrt(),
            delta: cbrt_floor_scaled(r.d, k as u64),
            delta_bar: cbrt_floor_scaled(r.dbar, k as u64),
        }
    }

    fn zeta_pow(&self, j: i64) -> Cx {
        match j.rem_euclid(3) {
            0 => Cx { re: self.one.clone(), im: BigInt::zero() },
            1 => Cx { re: -(&self.one >> 1usize), im: &self.sqrt3 >> 1usize },
            _ => Cx { re: -(&self.one >> 1usize), im: -(&self.sqrt3 >> 1usize) },
        }
    }

    fn mul(&self, a: &Cx, b: &Cx) -> Cx {
        Cx {
            re: (&a.re * &b.re - &a.im * &b.im) >> self.k,
            im: (&a.re * &b.im + &a.im * &b.re) >> self.k,
        }
    }

    fn div(&self, a: &Cx, b: &Cx) -> Cx {
        let den = &b.re * &b.re + &b.im * &b.im;
        let re = (&a.re * &b.re + &a.im * &b.im) << self.k;
        let im = (&a.im * &b.re - &a.re * &b.im) << self.k;
        Cx { re: re / &den, im: im / den }
    }

    fn sub(a: &Cx, b: &Cx) -> Cx {
        Cx { re: &a.re - &b.re, im: &a.im - &b.im }
    }

    fn add(a: &Cx, b: &Cx) -> Cx {
        Cx { re: &a.re + &b.re, im: &a.im + &b.im }
    }

    fn conj(a: &Cx) -> Cx {
        Cx { re: a.re.clone(), im: -&a.im }
    }

    /// `ι_j(e)` with `δ ↦ ζ^j·∛d`.
    fn embed_l(&self, e: &FieldElement, j: i64) -> Cx {
        let [x, y, z] = e.numerators();
        let real = Cx { re: x << self.k, im: BigInt::zero() };
        let yd = Cx { re: y * &self.delta, im: BigInt::zero() };
        let zd = Cx { re: z * &self.delta_bar, im: BigInt::zero() };
        let s = Self::add(&Self::add(&real, &self.mul(&yd, &self.zeta_pow(j))), &self.mul(&zd, &self.zeta_pow(2 * j)));
        let den = e.denominator();
        Cx { re: s.re / den, im: s.im / den }
    }

    fn embed_k(&self, w: &KElement, j: i64) -> Cx {
        let p = self.embed_l(&w.p, j);
        let q = self.embed_l(&w.q, j);
        Self::add(&p, &self.mul(&q, &self.zeta_pow(1)))
    }

    fn cbrt(&self, w: &Cx) -> Option<Cx> {
        let m = w.re.bits().max(w.im.bits());
        if m == 0 {
            return None;
        }
        let shift = m.saturating_sub(60);
        let fr = (&w.re >> shift as usize).to_f64()?;
        let fi = (&w.im >> shift as usize).to_f64()?;
        let e = shift as i64 - self.k as i64;
        let (q, rem) = (e.div_euclid(3), e.rem_euclid(3));
        let mag = (fr.hypot(fi) * 2f64.powi(rem as i32)).cbrt();
        let arg = fi.atan2(fr) / 3.0;
        let lift = |v: f64| -> BigInt {
            let m = BigInt::from_f64(v * 2f64.powi(52)).unwrap_or_default();
            let sh = q + self.k as i64 - 52;
            if sh >= 0 { m << sh as usize } else { m >> (-sh) as usize }
        };
        let mut z = Cx { re: lift(mag * arg.cos()), im: lift(mag * arg.sin()) };
        for _ in 0..200 {
            if z.re.is_zero() && z.im.is_zero() {
                return None;
            }
            let z2 = self.mul(&z, &z);
            let q = self.div(w, &z2);
            let next = Cx { re: (&z.re * 2 + &q.re) / 3, im: (&z.im * 2 + &q.im) / 3 };
            let delta = (&next.re - &z.re).abs().max((&next.im - &z.im).abs());
            z = next;
            if delta.bits() < 8 {
                break;
            }
        }
        Some(z)
    }

    /// Rounds `v / 2^k` to a multiple of `1/den`, if it is within `2^-20` of one.
    fn snap(&self, v: &BigInt, den: u64) -> Option<BigInt> {
        let scaled = v * den;
        let half = BigInt::one() << (self.k - 1);
        let n = (&scaled + &half).div_floor(&self.one);
        let err = (&scaled - &n * &self.one).abs();
        (err.bits() + 20 < self.k as u64).then_some(n)
    }
}

const ROOT_DENOMINATOR: u64 = 243;

fn reconstruct_cube_root(w: &KElement, k: usize) -> Option<KElement> {
    let r = *w.radicand();
    let fx = Fixed::new(&r, k);
    let roots: Vec<Cx> = (0..3).map(|j| fx.cbrt(&fx.embed_k(w, j))).collect::<Option<_>>()?;
    let third = |c: &Cx| Cx { re: &c.re / 3, im: &c.im / 3 };
    for m1 in 0..3 {
        for m2 in 0..3 {
            let eta = [
                roots[0].clone(),
                fx.mul(&roots[1], &fx.zeta_pow(m1)),
                fx.mul(&roots[2], &fx.zeta_pow(m2)),
            ];
            // ι_{j,−}(η) = conj(ι_{−j,+}(η))
            let mut pj = Vec::with_capacity(3);
            let mut qj = Vec::with_capacity(3);
            for j in 0..3usize {
                let other = Fixed::conj(&eta[(3 - j) % 3]);
                let diff = Fixed::sub(&eta[j], &other);
                // divide by i√3
                let q = Cx {
                    re: (&diff.im << k) / &fx.sqrt3,
                    im: -((&diff.re << k) / &fx.sqrt3),
                };
                let p = Fixed::sub(&eta[j], &fx.mul(&q, &fx.zeta_pow(1)));
                pj.push(p);
                qj.push(q);
            }
            let coords = |vals: &[Cx]| -> Option<[BigInt; 3]> {
                let mut out: [BigInt; 3] = Default::default();
                for (m, slot) in out.iter_mut().enumerate() {
                    let mut acc = Cx { re: BigInt::zero(), im: BigInt::zero() };
                    for (j, v) in vals.iter().enumerate() {
                        acc = Fixed::add(&acc, &fx.mul(v, &fx.zeta_pow(-((m * j) as i64))));
                    }
                    let mut acc = third(&acc);
                    if m == 1 {
                        acc = Cx { re: (&acc.re << k) / &fx.delta, im: (&acc.im << k) / &fx.delta };
                    } else if m == 2 {
                        acc = Cx { re: (&acc.re << k) / &fx.delta_bar, im: (&acc.im << k) / &fx.delta_bar };
                    }
                    let im = fx.snap(&acc.im, ROOT_DENOMINATOR)?;
                    if !im.is_zero() {
                        return None;
                    }
                    *slot = fx.snap(&acc.re, ROOT_DENOMINATOR)?;
                }
                Some(out)
            };
            let (Some(pc), Some(qc)) = (coords(&pj), coords(&qj)) else {
                continue;
            };
            let den = BigInt::from(ROOT_DENOMINATOR);
            let eta = KElement::new(FieldElement::new(r, pc, den.clone()), FieldElement::new(r, qc, den));
            if eta.pow(3) == *w {
                return Some(eta);
            }
        }
    }
    None
}

/// Exponent triple `(a, b, c)` of a Kummer class `ζ^a·ε^b·σ(ε)^c`.
pub type KummerClass = (i8, i8, i8);

/// The 13 nontrivial classes of `F₃³` modulo `±`, with exponents in `{−1, 0, 1}`.
pub fn kummer_classes() -> Vec<KummerClass> {
    let mut out = Vec::new();
    for a in -1i8..=1 {
        for b in -1i8..=1 {
            for c in -1i8..=1 {
                let first = [a, b, c].into_iter().find(|&v| v != 0);
                if first == Some(1) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

/// `ζ^a·ε^b·σ(ε)^c` for a unit `ε` of norm 1.
pub fn kummer_element(eps: &FieldElement, class: KummerClass) -> KElement {
    let r = *eps.radicand();
    let inv = eps.conjugate_product();
    let pick = |e: i8| match e {
        1 => Some(eps.clone()),
        -1 => Some(inv.clone()),
        _ => None,
    };
    let mut w = match class.0 {
        1 => KElement::zeta(r),
        -1 => KElement::zeta(r).pow(2),
        _ => KElement::one(r),
    };
    if let Some(e) = pick(class.1) {
        w = w.mul(&KElement::from_l(e));
    }
    if let Some(e) = pick(class.2) {
        w = w.mul(&KElement::sigma_of_l(&e));
    }
    w
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QCertificate {
    /// A class that is a cube, with the coordinates of the root as text.
    Cube { class: KummerClass, root: String },
    /// One non-residue prime per class.
    NonResidues(Vec<(KummerClass, u64)>),
}

/// The index `Q ∈ {1, 3}` of the subgroup generated by subfield units.
pub fn subfield_unit_index(eps: &FieldElement, budget: u64) -> Result<(u8, QCertificate)> {
    if eps.norm() != num_rational::BigRational::one() {
        return Err(Error::Inconsistent("unit of norm 1 expected".into()));
    }
    let mut negatives = Vec::new();
    for class in kummer_classes() {
        let w = kummer_element(eps, class);
        match is_cube_in_k(&w, budget)? {
            (true, CubeCertificate::Root(root)) => {
                let text = format!("({}) + ({})·ζ", root.p, root.q);
                return Ok((3, QCertificate::Cube { class, root: text }));
            }
            (_, CubeCertificate::NonResidue { prime, .. }) => negatives.push((class, prime)),
            (false, CubeCertificate::Root(_)) => unreachable!("root certificate implies a cube"),
        }
    }
    Ok((1, QCertificate::NonResidues(negatives)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radicand::normalize;

    fn r(d: u64) -> Radicand {
        normalize(d).unwrap()
    }

    #[test]
    fn zeta_relations() {
        let rr = r(5);
        let z = KElement::zeta(rr);
        assert_eq!(z.pow(3), KElement::one(rr));
        assert_eq!(z.tau(), z.pow(2));
        assert_eq!(z.tau().tau(), z);
    }

    #[test]
    fn sigma_has_order_three() {
        let rr = r(20);
        let e = KElement::new(FieldElement::from_ints(rr, 3, -2, 5), FieldElement::from_ints(rr, 1, 4, -1));
        assert_eq!(e.sigma().sigma().sigma(), e);
        assert_ne!(e.sigma(), e);
        // σ(δ)³ = d
        let d = KElement::sigma_of_l(&FieldElement::delta(rr));
        assert_eq!(d.pow(3), KElement::from_l(FieldElement::from_ints(rr, 20, 0, 0)));
        let n = e.relative_norm();
        assert_eq!(n.sigma(), n);
    }

    #[test]
    fn thirteen_classes() {
        let c = kummer_classes();
        assert_eq!(c.len(), 13);
        assert!(c.contains(&(1, 0, 0)) && c.contains(&(0, 1, -1)));
    }

    #[test]
    fn zeta_is_not_a_cube() {
        let (cube, cert) = is_cube_in_k(&KElement::zeta(r(2)), DEFAULT_PRECISION_BUDGET).unwrap();
        assert!(!cube);
        match cert {
            // ζ is a cube mod p exactly when 9 | p − 1
            CubeCertificate::NonResidue { prime, .. } => assert_ne!(prime % 9, 1),
            _ => panic!("expected a residue certificate"),
        }
    }

    #[test]
    fn cubes_are_recognized() {
        let rr = r(7);
        let eps = crate::voronoi::run_chain(
            &crate::voronoi::CubicOrder::maximal(rr),
            crate::voronoi::StopRule::FullPeriod,
        )
        .unwrap()
        .fundamental_unit
        .unwrap();
        let w = KElement::from_l(eps.clone()).mul(&KElement::sigma_of_l(&eps)).mul(&KElement::zeta(rr));
        let cube = w.pow(3);
        let (ok, cert) = is_cube_in_k(&cube, DEFAULT_PRECISION_BUDGET).unwrap();
        assert!(ok);
        match cert {
            CubeCertificate::Root(root) => assert_eq!(root.pow(3), cube),
            _ => panic!("expected a root"),
        }
    }
}
