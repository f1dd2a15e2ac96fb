//! Closed-form tests deciding whether a principal factor is a lattice minimum,
//! and the resulting M-class of a field of type β.
//!
//! Every inequality is decided exactly: the critical polynomials are evaluated
//! in `L` itself and compared with rationals through [`FieldElement::sign`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::radicand::{CanonicalSplit, Radicand, Species};
use crate::voronoi::OrderKind;

fn constant(r: Radicand, k: i64) -> FieldElement {
    FieldElement::from_ints(r, k, 0, 0)
}

/// `X² + Y² − XY − X − Y + 1`.
pub fn p2(x: &FieldElement, y: &FieldElement) -> FieldElement {
    let r = *x.radicand();
    let s = &(&(&(x * x) + &(y * y)) - &(x * y)) - &(x + y);
    &s + &constant(r, 1)
}

/// `X⁴ − X³ + X²Y − 8X² + XY + Y²`.
pub fn p4(x: &FieldElement, y: &FieldElement) -> FieldElement {
    let r = *x.radicand();
    let x2 = x * x;
    let x3 = &x2 * x;
    let x4 = &x2 * &x2;
    let mut s = &x4 - &x3;
    s = &s + &(&x2 * y);
    s = &s - &(&x2 * &constant(r, 8));
    s = &s + &(x * y);
    &s + &(y * y)
}

/// `X⁴ + X³ + X − 8`.
pub fn q4(x: &FieldElement) -> FieldElement {
    let r = *x.radicand();
    let x2 = x * x;
    let s = &(&(&x2 * &x2) + &(&x2 * x)) + x;
    &s - &constant(r, 8)
}

pub fn p2_f64(x: f64, y: f64) -> f64 {
    x * x + y * y - x * y - x - y + 1.0
}

pub fn p4_f64(x: f64, y: f64) -> f64 {
    let x2 = x * x;
    x2 * x2 - x2 * x + x2 * y - 8.0 * x2 + x * y + y * y
}

pub fn q4_f64(x: f64) -> f64 {
    let x2 = x * x;
    x2 * x2 + x2 * x + x - 8.0
}

/// The positive zero of `Q4`, isolated in `(1.4, 1.41)` by bisection.
pub fn z_plus() -> f64 {
    let (mut lo, mut hi) = (1.4f64, 1.41f64);
    debug_assert!(q4_f64(lo) < 0.0 && q4_f64(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q4_f64(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A positive threshold that is either an integer or the positive root of a
/// monic quadratic `X² + pX + q` with `q < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    Integer(i64),
    QuadraticRoot { p: i64, q: i64 },
}

impl Bound {
    pub fn value(&self) -> f64 {
        match *self {
            Bound::Integer(k) => k as f64,
            Bound::QuadraticRoot { p, q } => {
                let (p, q) = (p as f64, q as f64);
                (-p + (p * p - 4.0 * q).sqrt()) / 2.0
            }
        }
    }

    pub fn cube(&self) -> f64 {
        let v = self.value();
        v * v * v
    }

    /// Exact comparison of a positive real `x` with the bound.
    pub fn compare(&self, x: &FieldElement) -> Ordering {
        debug_assert!(x.sign() > 0);
        match *self {
            Bound::Integer(k) => x.cmp_int(k),
            // x > 0 lies above the negative root, so the sign of the quadratic decides
            Bound::QuadraticRoot { p, q } => {
                let r = *x.radicand();
                let v = &(&(x * x) + &x.scale(&BigInt::from(p))) + &constant(r, q);
                v.sign().cmp(&0)
            }
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Bound::Integer(k) => write!(f, "{k}"),
            Bound::QuadraticRoot { p: 0, q } => write!(f, "√{}", -q),
            Bound::QuadraticRoot { p, q } => write!(f, "({}+√{})/2", -p, p * p - 4 * q),
        }
    }
}

/// `B(−1) = √6`, `B(1) = 2`.
pub fn bound_b(u: i8) -> Bound {
    if u < 0 {
        Bound::QuadraticRoot { p: 0, q: -6 }
    } else {
        Bound::Integer(2)
    }
}

/// `C(1) = (−1 + √33)/2`, `C(−1) = 2`.
pub fn bound_c(u: i8) -> Bound {
    if u > 0 {
        Bound::QuadraticRoot { p: 1, q: -8 }
    } else {
        Bound::Integer(2)
    }
}

/// Normalized radicals of a principal factor norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionInput {
    pub split: CanonicalSplit,
    /// `None` for species 1a, where 3 divides the invariants.
    pub u: Option<(i8, i8)>,
    /// `δ / (d2·d4·d5)`
    pub gamma: FieldElement,
    /// `δ̄ / (d1·d2·d5)`
    pub gamma_bar: FieldElement,
    /// `γ·γ̄ = d3·d6 / (d2·d5)`
    pub y: BigRational,
}

impl CriterionInput {
    pub fn new(r: &Radicand, n: u64) -> Result<Self> {
        let split = r.canonical_split(n)?;
        Ok(Self::from_split(r, split))
    }

    pub fn from_split(r: &Radicand, split: CanonicalSplit) -> Self {
        let s = &split;
        let u = split.congruence_invariants().ok();
        let gamma = FieldElement::delta(*r).div_int(&BigInt::from(s.d2 * s.d4 * s.d5));
        let gamma_bar = FieldElement::delta_bar(*r).div_int(&BigInt::from(s.d1 * s.d2 * s.d5));
        let y = BigRational::new(BigInt::from(s.d3 * s.d6), BigInt::from(s.d2 * s.d5));
        CriterionInput { split, u, gamma, gamma_bar, y }
    }

    /// `γ > 1` and `γ̄ > 1`, i.e. the norm is the least in its coset.
    pub fn hypothesis_holds(&self) -> bool {
        self.gamma.cmp_int(1) == Ordering::Greater && self.gamma_bar.cmp_int(1) == Ordering::Greater
    }

    fn require_hypothesis(&self) -> Result<()> {
        if self.hypothesis_holds() {
            Ok(())
        } else {
            Err(Error::HypothesisViolated(format!(
                "norm {} is not minimal in its coset (γ ≈ {:.6}, γ̄ ≈ {:.6})",
                self.split.n,
                self.gamma.approx(),
                self.gamma_bar.approx()
            )))
        }
    }

    fn invariants(&self) -> Result<(i8, i8)> {
        self.u.ok_or(Error::ThreeDividesInvariant)
    }

    pub fn y_f64(&self) -> f64 {
        self.y.to_f64().unwrap_or(f64::NAN)
    }

    fn y_element(&self) -> FieldElement {
        FieldElement::rational(*self.gamma.radicand(), self.y.clone())
    }

    /// `P2(u1γ, u2γ̄)`.
    pub fn p2_value(&self) -> Result<FieldElement> {
        let (u1, u2) = self.invariants()?;
        let x = self.gamma.scale(&BigInt::from(u1));
        let y = self.gamma_bar.scale(&BigInt::from(u2));
        Ok(p2(&x, &y))
    }

    /// Signs of `P2(u1γ, u2γ̄) − 9`, `P4(u1γ, −u1u2y)` and `P4(u2γ̄, −u1u2y)`,
    /// which agree away from the boundary.
    pub fn escalatory3_signs(&self) -> Result<[i8; 3]> {
        let (u1, u2) = self.invariants()?;
        let r = *self.gamma.radicand();
        let yy = self.y_element().scale(&BigInt::from(-(u1 as i64) * u2 as i64));
        let s2 = (&self.p2_value()? - &constant(r, 9)).sign();
        let s4a = p4(&self.gamma.scale(&BigInt::from(u1)), &yy).sign();
        let s4b = p4(&self.gamma_bar.scale(&BigInt::from(u2)), &yy).sign();
        Ok([s2, s4a, s4b])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Prediction {
    IsMinimum,
    NotMinimum,
    UnconditionallyMinimum,
}

impl Prediction {
    pub fn is_minimum(self) -> bool {
        self != Prediction::NotMinimum
    }
}

/// Which of the three regimes of the minimum criterion governs the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    Unconditional,
    Escalatory3,
    Escalatory9,
}

fn regime(split: &CanonicalSplit, order: OrderKind) -> Regime {
    match (split.species, split.v, order) {
        (Species::S1a, _, _) => Regime::Unconditional,
        (Species::S1b, 0, _) => Regime::Unconditional,
        (Species::S1b, 1, _) => Regime::Escalatory3,
        (Species::S1b, _, _) => Regime::Escalatory9,
        (Species::S2, _, OrderKind::SubOrder0) => Regime::Unconditional,
        (Species::S2, _, OrderKind::Maximal) => Regime::Escalatory3,
    }
}

/// Whether the generator of the ideal with the input's norm is a minimum of
/// the given order. Boundary equalities count as minima.
pub fn predict_minimum(input: &CriterionInput, order: OrderKind) -> Result<Prediction> {
    match regime(&input.split, order) {
        Regime::Unconditional => Ok(Prediction::UnconditionallyMinimum),
        Regime::Escalatory3 => {
            input.require_hypothesis()?;
            let (u1, u2) = input.invariants()?;
            if (u1, u2) == (1, 1) {
                return Ok(Prediction::IsMinimum);
            }
            let below = input.p2_value()?.cmp_int(9) == Ordering::Less;
            Ok(if below { Prediction::NotMinimum } else { Prediction::IsMinimum })
        }
        Regime::Escalatory9 => {
            input.require_hypothesis()?;
            let (u1, u2) = input.invariants()?;
            let below = bound_c(u1).compare(&input.gamma) == Ordering::Less
                || bound_c(u2).compare(&input.gamma_bar) == Ordering::Less;
            Ok(if below { Prediction::NotMinimum } else { Prediction::IsMinimum })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coarse {
    ForcesMinimum,
    ForcesNonMinimum,
    Indeterminate,
}

/// The one-sided sufficient tests of the `v ≤ 1` regime: `y ≤ B(−u1u2)` forces a
/// non-minimum and `max(γ/B(u2), γ̄/B(u1)) ≥ 1` forces a minimum. Inputs outside
/// that regime (species 1a, `v = 0` in species 1b, `v = 2`) give `Indeterminate`.
pub fn coarse_conditions(input: &CriterionInput) -> Coarse {
    if regime(&input.split, OrderKind::Maximal) != Regime::Escalatory3 {
        return Coarse::Indeterminate;
    }
    let Some((u1, u2)) = input.u else {
        return Coarse::Indeterminate;
    };
    if (u1, u2) == (1, 1) {
        return Coarse::ForcesMinimum;
    }
    if bound_b(-u1 * u2).compare(&input.y_element()) != Ordering::Greater {
        return Coarse::ForcesNonMinimum;
    }
    if bound_b(u2).compare(&input.gamma) != Ordering::Less
        || bound_b(u1).compare(&input.gamma_bar) != Ordering::Less
    {
        return Coarse::ForcesMinimum;
    }
    Coarse::Indeterminate
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MLevel {
    M0,
    M1,
    M2,
}

impl fmt::Display for MLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MLevel::M0 => "M0",
            MLevel::M1 => "M1",
            MLevel::M2 => "M2",
        })
    }
}

/// The closed-form shortcut that confirmed the level, if one applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FastPath {
    /// Squarefree radicand of species 2 with integer inequalities in `d1, d2, d3`.
    SquareFreeSpecies2,
    /// `d = d3·d4²` of species 1b with principal factor norm `9·d4`.
    SquarePartSpecies1b,
}

/// Verdict for the least representative of one non-trivial coset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosetVerdict {
    pub norm: u64,
    pub split: CanonicalSplit,
    pub u: Option<(i8, i8)>,
    pub y: f64,
    /// `P2(u1γ, u2γ̄)` when the `v ≤ 1` regime applies.
    pub p2: Option<f64>,
    pub coarse: Coarse,
    pub prediction: Prediction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MClass {
    pub level: MLevel,
    /// The coset of the given norm first, then its square class.
    pub cosets: [CosetVerdict; 2],
    pub fast_path: Option<FastPath>,
    pub trace: Vec<String>,
}

impl MClass {
    pub fn minimal_norms(&self) -> [u64; 2] {
        [self.cosets[0].norm, self.cosets[1].norm]
    }
}

fn least_in_coset(r: &Radicand, n: u64) -> Result<u64> {
    Ok(*r.coset_of(n)?.iter().min().expect("three norms"))
}

/// Decides a coset from its least member.
pub fn coset_verdict(r: &Radicand, n: u64) -> Result<CosetVerdict> {
    let norm = least_in_coset(r, n)?;
    let input = CriterionInput::new(r, norm)?;
    let prediction = predict_minimum(&input, OrderKind::Maximal)?;
    let p2 = match regime(&input.split, OrderKind::Maximal) {
        Regime::Escalatory3 => Some(input.p2_value()?.approx()),
        _ => None,
    };
    Ok(CosetVerdict {
        norm,
        split: input.split,
        u: input.u,
        y: input.y_f64(),
        p2,
        coarse: coarse_conditions(&input),
        prediction,
    })
}

fn describe(label: &str, c: &CosetVerdict) -> String {
    let s = &c.split;
    let mut out = format!(
        "{label} coset: n = {} with (d1..d6) = ({}, {}, {}, {}, {}, {}), v = {}",
        c.norm, s.d1, s.d2, s.d3, s.d4, s.d5, s.d6, s.v
    );
    if let Some((u1, u2)) = c.u {
        out += &format!(", (u1, u2) = ({u1}, {u2})");
    }
    match (c.p2, c.u) {
        (Some(p), Some((u1, u2))) if (u1, u2) != (1, 1) => {
            let b = bound_b(-u1 * u2);
            let rel = if c.coarse == Coarse::ForcesNonMinimum { "≤" } else { ">" };
            out += &format!(", y ≈ {:.4} {rel} {b} ≈ {:.4}, P2 ≈ {p:.4}", c.y, b.value());
            out += if p < 9.0 { " < 9" } else { " ≥ 9" };
        }
        _ => {}
    }
    out += match c.prediction {
        Prediction::NotMinimum => ": not a minimum",
        Prediction::IsMinimum => ": minimum",
        Prediction::UnconditionallyMinimum => ": minimum unconditionally",
    };
    out
}

/// The M-class of a type-β field with a principal factor of norm `n`.
///
/// Both non-trivial cosets are decided from their least members; where the
/// integer criteria for squarefree species-2 and square-part species-1b
/// radicands apply they are evaluated too and must agree.
pub fn m_class(r: &Radicand, n: u64) -> Result<MClass> {
    if !r.divides_r_squared(n) {
        return Err(Error::NotAPrincipalFactorNorm { d: r.d, norm: n });
    }
    if r.is_trivial_class(n)? {
        return Err(Error::NotTypeBeta(r.d));
    }
    let first = coset_verdict(r, n)?;
    let second = coset_verdict(r, r.square_class_norm(n)?)?;
    let minima = [&first, &second].iter().filter(|c| c.prediction.is_minimum()).count();
    let level = [MLevel::M0, MLevel::M1, MLevel::M2][minima];
    let mut trace = vec![describe("first", &first), describe("second", &second)];

    let mut fast_path = None;
    if let Some((fast_level, lines)) = square_part_species1b(r, &first, &second)? {
        fast_path = Some(FastPath::SquarePartSpecies1b);
        trace.extend(lines);
        if fast_level != level {
            return Err(Error::Inconsistent(format!(
                "d = {}: square-part criterion gives {fast_level}, general criterion {level}",
                r.d
            )));
        }
    } else if let Some((m0, lines)) = square_free_species2(r, &first) {
        fast_path = Some(FastPath::SquareFreeSpecies2);
        trace.extend(lines);
        if m0 && level != MLevel::M0 {
            return Err(Error::Inconsistent(format!(
                "d = {}: squarefree criterion gives M0, general criterion {level}",
                r.d
            )));
        }
    }
    trace.push(format!("M-class {level}"));
    Ok(MClass { level, cosets: [first, second], fast_path, trace })
}

/// `d = d3·d4²` in species 1b with a principal factor of norm `9·d4`: returns the
/// level from the integer criteria in `d3, d4` and the inequalities used.
fn square_part_species1b(
    r: &Radicand,
    first: &CosetVerdict,
    second: &CosetVerdict,
) -> Result<Option<(MLevel, Vec<String>)>> {
    if r.species != Species::S1b || r.b == 1 {
        return Ok(None);
    }
    let nine = 9 * r.b;
    if first.norm != nine && second.norm != nine {
        return Ok(None);
    }
    let (d3, d4) = (r.a, r.b);
    let mut lines = vec![format!("d = d3·d4² with d3 = {d3}, d4 = {d4}, n = 9·d4 = {nine}, d4 = {d4} < {d3} = d3")];
    // γ = δ/d4 = ∛(d3/d4)
    let gamma = FieldElement::delta(*r).div_int(&BigInt::from(d4));
    let zc = z_plus().powi(3);
    let c1 = bound_c(1);
    let level = if (d3 + d4) % 3 == 0 {
        lines.push(format!("d3 = {d3} ≡ −d4 = −{d4} (mod 3)"));
        let below_z = q4(&gamma).sign() < 0;
        if below_z {
            lines.push(format!("d3 = {d3} < {:.2} ≈ Z+³·{d4}", zc * d4 as f64));
            MLevel::M0
        } else if d3 < 8 * d4 {
            lines.push(format!("d3 = {d3} ≥ {:.2} ≈ Z+³·{d4}", zc * d4 as f64));
            lines.push(format!("d3 = {d3} < {} = 8·{d4}", 8 * d4));
            MLevel::M1
        } else {
            lines.push(format!("d3 = {d3} ≥ {} = 8·{d4}", 8 * d4));
            MLevel::M2
        }
    } else {
        lines.push(format!("d3 = {d3} ≡ d4 = {d4} (mod 3)"));
        if c1.compare(&gamma) == Ordering::Less {
            lines.push(format!("d3 = {d3} < {:.2} ≈ C1³·{d4}", c1.cube() * d4 as f64));
            MLevel::M1
        } else {
            lines.push(format!("d3 = {d3} ≥ {:.2} ≈ C1³·{d4}", c1.cube() * d4 as f64));
            MLevel::M2
        }
    };
    Ok(Some((level, lines)))
}

/// Squarefree `d = d1·d2·d3` of species 2 with `n = d1·d2²` least in its coset:
/// returns whether the sufficient integer conditions for M0 hold, with the
/// inequalities checked.
fn square_free_species2(r: &Radicand, first: &CosetVerdict) -> Option<(bool, Vec<String>)> {
    if r.species != Species::S2 || r.b != 1 {
        return None;
    }
    let s = &first.split;
    let (d1, d2, d3) = (s.d1, s.d2, s.d3);
    let (m1, m2, m3) = (d1 % 3, d2 % 3, d3 % 3);
    let mut lines = vec![format!(
        "d = d1·d2·d3 with (d1, d2, d3) = ({d1}, {d2}, {d3}), n = d1·d2² = {}",
        first.norm
    )];
    lines.push(format!(
        "d1·d3 = {} > {} = d2², d3² = {} > {} = d1·d2",
        d1 * d3,
        d2 * d2,
        d3 * d3,
        d1 * d2
    ));
    let le_two = |x: u64, k: u64, nx: &str, nk: &str| {
        let rel = match x.cmp(&(2 * k)) {
            std::cmp::Ordering::Less => "<",
            std::cmp::Ordering::Equal => "=",
            std::cmp::Ordering::Greater => ">",
        };
        (x <= 2 * k, format!("{nx} = {x} {rel} {} = 2·{nk}", 2 * k))
    };
    let le_root6 = |x: u64, k: u64, nx: &str, nk: &str| {
        let ok = x * x <= 6 * k * k;
        let v = 6f64.sqrt() * k as f64;
        (ok, format!("{nx} = {x} {} {v:.2} ≈ √6·{nk}", if ok { "<" } else { ">" }))
    };
    // m3 is the odd one out, or m2, or m1; all equal means (u1, u2) = (1, 1)
    let checks: Vec<(bool, String)> = if d1 * d1 < d2 * d3 {
        lines.push(format!("d1² = {} < {} = d2·d3", d1 * d1, d2 * d3));
        if m1 == m2 && m2 != m3 {
            lines.push("d1 ≡ d2 ≡ −d3 (mod 3)".into());
            vec![le_two(d3, d1, "d3", "d1"), le_two(d3, d2, "d3", "d2")]
        } else if m1 == m3 && m1 != m2 {
            lines.push("d1 ≡ −d2 ≡ d3 (mod 3)".into());
            vec![le_root6(d3, d1, "d3", "d1"), le_two(d3, d2, "d3", "d2")]
        } else if m2 == m3 && m1 != m2 {
            lines.push("−d1 ≡ d2 ≡ d3 (mod 3)".into());
            vec![le_two(d3, d1, "d3", "d1"), le_root6(d3, d2, "d3", "d2")]
        } else {
            lines.push("d1 ≡ d2 ≡ d3 (mod 3)".into());
            vec![(false, "(u1, u2) = (1, 1)".into())]
        }
    } else {
        lines.push(format!("d2·d3 = {} < {} = d1²", d2 * d3, d1 * d1));
        if m1 == m2 && m2 != m3 {
            lines.push("d1 ≡ d2 ≡ −d3 (mod 3)".into());
            vec![le_root6(d1, d2, "d1", "d2"), le_two(d3, d2, "d3", "d2")]
        } else if m1 == m3 && m1 != m2 {
            lines.push("d1 ≡ −d2 ≡ d3 (mod 3)".into());
            vec![le_two(d1, d2, "d1", "d2"), le_two(d3, d2, "d3", "d2")]
        } else if m2 == m3 && m1 != m2 {
            lines.push("−d1 ≡ d2 ≡ d3 (mod 3)".into());
            vec![le_two(d1, d2, "d1", "d2"), le_root6(d3, d2, "d3", "d2")]
        } else {
            lines.push("d1 ≡ d2 ≡ d3 (mod 3)".into());
            vec![(false, "(u1, u2) = (1, 1)".into())]
        }
    };
    let m0 = checks.iter().all(|(ok, _)| *ok);
    lines.extend(checks.into_iter().map(|(_, l)| l));
    Some((m0, lines))
}
