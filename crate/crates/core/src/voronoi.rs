//! Chains of lattice minima of cubic orders by Voronoi's adjacency steps.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{maximal_order_signs, FieldElement};
use crate::lattice::{enumerate, reduce, IntLattice, Row};
use crate::radicand::{Radicand, Species};

const ENUMERATION_LIMIT: usize = 2_000_000;
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderKind {
    Maximal,
    SubOrder0,
}

#[derive(Debug, Clone)]
pub struct CubicOrder {
    pub radicand: Radicand,
    pub kind: OrderKind,
    pub basis: [FieldElement; 3],
}

fn int_row(x: i64, y: i64, z: i64) -> Row {
    [x.into(), y.into(), z.into()]
}

impl CubicOrder {
    pub fn new(radicand: Radicand, kind: OrderKind) -> Self {
        let r = radicand;
        let third = match (kind, maximal_order_signs(&r)) {
            (OrderKind::Maximal, Some((s1, s2))) if r.species == Species::S2 => {
                FieldElement::new(r, int_row(1, s1, s2), 3.into())
            }
            _ => FieldElement::delta_bar(r),
        };
        CubicOrder { radicand, kind, basis: [FieldElement::one(r), FieldElement::delta(r), third] }
    }

    pub fn maximal(radicand: Radicand) -> Self {
        Self::new(radicand, OrderKind::Maximal)
    }

    pub fn suborder0(radicand: Radicand) -> Self {
        Self::new(radicand, OrderKind::SubOrder0)
    }

    /// `true` when the order is `Z[δ, δ̄]` as a lattice, whatever its label.
    pub fn is_suborder0_lattice(&self) -> bool {
        self.basis[2].in_suborder0()
    }

    pub fn lattice(&self) -> IntLattice {
        if self.is_suborder0_lattice() {
            IntLattice::new([int_row(1, 0, 0), int_row(0, 1, 0), int_row(0, 0, 1)], BigInt::one())
        } else {
            let w = self.basis[2].numerators().clone();
            IntLattice::new([int_row(3, 0, 0), int_row(0, 3, 0), w], 3.into()).canonical()
        }
    }

    pub fn contains(&self, e: &FieldElement) -> bool {
        match self.kind {
            OrderKind::Maximal => e.in_maximal_order(),
            OrderKind::SubOrder0 => e.in_suborder0(),
        }
    }
}

/// The lattice `(1/θ)·Λ₀` with `1` as a minimum, together with `θ`.
#[derive(Debug, Clone)]
pub struct ReducedLattice {
    pub radicand: Radicand,
    pub basis: IntLattice,
    pub accumulated: FieldElement,
    pub accumulated_norm: BigRational,
    pub index: i64,
}

impl ReducedLattice {
    pub fn of_order(order: &CubicOrder) -> Self {
        let r = order.radicand;
        ReducedLattice {
            radicand: r,
            basis: order.lattice(),
            accumulated: FieldElement::one(r),
            accumulated_norm: BigRational::one(),
            index: 0,
        }
    }

    /// Starts a chain in an arbitrary lattice at the minimum `mu`.
    pub fn at_minimum(lattice: &IntLattice, mu: &FieldElement) -> Result<Self> {
        Ok(ReducedLattice {
            radicand: *mu.radicand(),
            basis: lattice.scaled_by(&mu.inverse()?),
            accumulated: mu.clone(),
            accumulated_norm: mu.norm(),
            index: 0,
        })
    }
}

/// Which real value bounds the height window of a cylinder search.
struct HeightCap<'a> {
    cap: Option<&'a FieldElement>,
    inclusive: bool,
}

impl HeightCap<'_> {
    fn approx(&self) -> f64 {
        self.cap.map_or(1.0, |c| c.approx())
    }

    fn admits(&self, e: &FieldElement) -> bool {
        let ord = match self.cap {
            Some(c) => e.cmp_value(c),
            None => e.cmp_int(1),
        };
        ord == Ordering::Less || (self.inclusive && ord == Ordering::Equal)
    }
}

/// The element of smallest radius among lattice points with `0 < h` below the cap.
fn min_radius_under(r: &Radicand, lat: &IntLattice, cap: HeightCap<'_>) -> Result<FieldElement> {
    let hf = cap.approx() * (1.0 + 1e-9);
    let covol = lat.covolume(r);
    let mut rho2 = (4.0 * covol / (PI * hf)).max(1e-30);
    for _ in 0..400 {
        let basis = reduce(r, lat, hf, rho2.sqrt());
        let coeffs = enumerate(&basis, 2.0, ENUMERATION_LIMIT)?;
        let mut best: Option<(FieldElement, FieldElement, f64)> = None;
        for c in &coeffs {
            let mut e = basis.element(*r, c);
            if e.sign() < 0 {
                e = -&e;
            }
            if !cap.admits(&e) {
                continue;
            }
            let cp = e.conjugate_product();
            let approx = cp.approx();
            let better = match &best {
                None => true,
                Some((_, bcp, bapprox)) => {
                    if approx < bapprox * (1.0 - 1e-9) {
                        true
                    } else if approx > bapprox * (1.0 + 1e-9) {
                        false
                    } else {
                        match cp.cmp_value(bcp) {
                            Ordering::Less => true,
                            // equal radii only between ±-pairs, which are filtered
                            Ordering::Equal => e.cmp_value(&best.as_ref().unwrap().0) == Ordering::Greater,
                            Ordering::Greater => false,
                        }
                    }
                }
            };
            if better {
                best = Some((e, cp, approx));
            }
        }
        if let Some((e, cp, _)) = best {
            let limit = BigRational::from_f64(rho2 * (1.0 - 1e-6)).expect("finite radius");
            let bound = FieldElement::rational(*r, limit);
            if cp.cmp_value(&bound) == Ordering::Less {
                return Ok(e);
            }
        }
        rho2 *= 2.0;
    }
    Err(Error::EnumerationOverflow("no admissible lattice point found".into()))
}

/// Adjacent minimum of `1` in direction of decreasing height, and the lattice divided by it.
pub fn adjacent_step(lat: &ReducedLattice) -> Result<(FieldElement, ReducedLattice)> {
    let r = lat.radicand;
    let phi = min_radius_under(&r, &lat.basis, HeightCap { cap: None, inclusive: false })?;
    let next = ReducedLattice {
        radicand: r,
        basis: lat.basis.scaled_by(&phi.inverse()?),
        accumulated: &lat.accumulated * &phi,
        accumulated_norm: &lat.accumulated_norm * phi.norm(),
        index: lat.index - 1,
    };
    Ok((phi, next))
}

/// A minimum of an arbitrary lattice: the smallest radius at or below the height of a short vector.
pub fn first_minimum(r: &Radicand, lat: &IntLattice) -> Result<FieldElement> {
    let basis = reduce(r, lat, 1.0, 1.0);
    let mut v = basis.element(*r, &[1, 0, 0]);
    if v.sign() < 0 {
        v = -&v;
    }
    min_radius_under(r, lat, HeightCap { cap: Some(&v), inclusive: true })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// One full period, ending at the inverse fundamental unit.
    FullPeriod,
    /// The first record with a nontrivial norm dividing `R²`, or a full period.
    FirstPF,
    /// Stop below the given height, or after a full period.
    HeightFloor(f64),
    /// Several full periods.
    Periods(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainRecord {
    pub index: i64,
    pub element: FieldElement,
    pub norm: BigInt,
}

#[derive(Debug, Clone)]
pub struct ChainSummary {
    pub radicand: Radicand,
    pub kind: OrderKind,
    /// Known once a unit has been reached.
    pub period_length: Option<usize>,
    /// `ε > 1`, the inverse of the first nontrivial unit record.
    pub fundamental_unit: Option<FieldElement>,
    pub records: Vec<ChainRecord>,
    pub pf_hits: Vec<i64>,
}

impl ChainSummary {
    pub fn record(&self, index: i64) -> Option<&ChainRecord> {
        self.records.iter().find(|rec| rec.index == index)
    }

    pub fn first_pf(&self) -> Option<&ChainRecord> {
        self.pf_hits.first().and_then(|&j| self.record(j))
    }

    pub fn is_complete(&self) -> bool {
        self.period_length.is_some()
    }
}

/// Nontrivial norm dividing `R²` (the trivial class `1, ab², a²b` cannot occur among minima).
pub fn is_pf_norm(r: &Radicand, n: &BigInt) -> bool {
    match n.to_u64() {
        Some(n) if n > 1 => r.divides_r_squared(n) && !r.is_trivial_class(n).unwrap_or(true),
        _ => false,
    }
}

pub fn run_chain(order: &CubicOrder, stop: StopRule) -> Result<ChainSummary> {
    run_chain_budget(order, stop, DEFAULT_MAX_STEPS)
}

pub fn run_chain_budget(order: &CubicOrder, stop: StopRule, max_steps: usize) -> Result<ChainSummary> {
    let r = order.radicand;
    let start = ReducedLattice::of_order(order);
    let origin = start.basis.clone();
    let mut state = start;
    let mut summary = ChainSummary {
        radicand: r,
        kind: order.kind,
        period_length: None,
        fundamental_unit: None,
        records: vec![ChainRecord { index: 0, element: FieldElement::one(r), norm: BigInt::one() }],
        pf_hits: Vec::new(),
    };
    let periods = match stop {
        StopRule::Periods(k) => k.max(1),
        _ => 1,
    };
    let mut units_seen = 0;
    for _ in 0..max_steps {
        let (_, next) = adjacent_step(&state)?;
        state = next;
        let n = state.accumulated_norm.numer().abs();
        if !state.accumulated_norm.denom().is_one() {
            return Err(Error::Inconsistent(format!("non-integral record norm at {}", state.index)));
        }
        let theta = state.accumulated.clone();
        summary.records.push(ChainRecord { index: state.index, element: theta.clone(), norm: n.clone() });
        if n.is_one() {
            if state.basis != origin {
                return Err(Error::Inconsistent("unit record without lattice return".into()));
            }
            units_seen += 1;
            if units_seen == 1 {
                summary.period_length = Some((-state.index) as usize);
                summary.fundamental_unit = Some(theta.conjugate_product());
            }
            if units_seen >= periods {
                return Ok(summary);
            }
            continue;
        }
        if units_seen == 0 && is_pf_norm(&r, &n) {
            summary.pf_hits.push(state.index);
            if stop == StopRule::FirstPF {
                return Ok(summary);
            }
        }
        if let StopRule::HeightFloor(h) = stop {
            if theta.approx() < h {
                return Ok(summary);
            }
        }
    }
    Err(Error::BudgetExceeded(format!("chain for d = {} exceeded {max_steps} steps", r.d)))
}

/// `true` iff no nonzero point of the order lies in the open norm cylinder of `e`.
pub fn is_lattice_minimum(order: &CubicOrder, e: &FieldElement) -> Result<bool> {
    if e.sign() <= 0 {
        return Ok(false);
    }
    let r = order.radicand;
    let lat = order.lattice().scaled_by(&e.inverse()?);
    let basis = reduce(&r, &lat, 1.0, 1.0);
    for c in enumerate(&basis, 2.0 * (1.0 + 1e-9), ENUMERATION_LIMIT)? {
        let mut x = basis.element(r, &c);
        if x.sign() < 0 {
            x = -&x;
        }
        if x.cmp_int(1) == Ordering::Less && x.conjugate_product().cmp_int(1) == Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive oracle: minima with height in `[h1, h2]` among elements whose
/// coordinates in the order basis are bounded by `bound`, sorted by decreasing height.
pub fn brute_force_minima(order: &CubicOrder, h1: f64, h2: f64, bound: i64) -> Result<Vec<FieldElement>> {
    if bound > 200 {
        return Err(Error::BudgetExceeded(format!("coefficient bound {bound} too large")));
    }
    let r = order.radicand;
    let mut out: Vec<FieldElement> = Vec::new();
    let [b0, b1, b2] = &order.basis;
    for i in -bound..=bound {
        for j in -bound..=bound {
            for k in -bound..=bound {
                if (i, j, k) == (0, 0, 0) {
                    continue;
                }
                let e = &(&b0.scale(&i.into()) + &b1.scale(&j.into())) + &b2.scale(&k.into());
                let h = e.approx();
                let tol = 1e-9 * h2.abs().max(1.0);
                if h <= 0.0 || h < h1 - tol || h > h2 + tol {
                    continue;
                }
                if is_lattice_minimum(order, &e)? && !out.contains(&e) {
                    out.push(e);
                }
            }
        }
    }
    let _ = r;
    out.sort_by(|x, y| y.cmp_value(x));
    Ok(out)
}

/// Searches one unit orbit of minima of `ideal` for an element of norm `n`,
/// which then generates the ideal.
pub fn principal_generator(
    ideal: &IntLattice,
    r: &Radicand,
    n: &BigInt,
    unit: &FieldElement,
    max_steps: usize,
) -> Result<Option<FieldElement>> {
    let mu = first_minimum(r, ideal)?;
    let floor = &mu * &unit.inverse()?;
    let mut state = ReducedLattice::at_minimum(ideal, &mu)?;
    if mu.norm().numer().abs() == *n && mu.norm().denom().is_one() {
        return Ok(Some(mu));
    }
    for _ in 0..max_steps {
        let (_, next) = adjacent_step(&state)?;
        state = next;
        let norm = state.accumulated_norm.abs();
        if norm.denom().is_one() && norm.numer() == n {
            return Ok(Some(state.accumulated.clone()));
        }
        if state.accumulated.cmp_value(&floor) != Ordering::Greater {
            return Ok(None);
        }
    }
    Err(Error::BudgetExceeded("ideal chain".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radicand::normalize;

    fn r(d: u64) -> Radicand {
        normalize(d).unwrap()
    }

    #[test]
    fn maximal_order_lattice_contains_third_vector() {
        let r10 = r(10);
        let o = CubicOrder::maximal(r10);
        assert!(!o.is_suborder0_lattice());
        assert!(o.lattice().contains(&o.basis[2]));
        assert!(CubicOrder::maximal(r(2)).is_suborder0_lattice());
    }

    #[test]
    fn d2_period_ends_at_inverse_unit() {
        let o = CubicOrder::suborder0(r(2));
        let s = run_chain(&o, StopRule::FullPeriod).unwrap();
        let last = s.records.last().unwrap();
        assert_eq!(last.element, FieldElement::from_ints(r(2), -1, 1, 0));
        assert_eq!(s.period_length, Some(1));
        assert_eq!(s.fundamental_unit.unwrap(), FieldElement::from_ints(r(2), 1, 1, 1));
    }

    #[test]
    fn identity_step_properties() {
        for d in [2u64, 3, 5, 6, 7, 10, 12, 19] {
            let o = CubicOrder::maximal(r(d));
            let (phi, _) = adjacent_step(&ReducedLattice::of_order(&o)).unwrap();
            assert_eq!(phi.sign(), 1);
            assert_eq!(phi.cmp_int(1), Ordering::Less);
            assert_eq!(phi.conjugate_product().cmp_int(1), Ordering::Greater);
            assert!(is_lattice_minimum(&o, &phi).unwrap());
        }
    }

    #[test]
    fn units_and_radicals() {
        let o = CubicOrder::maximal(r(7));
        assert!(is_lattice_minimum(&o, &FieldElement::one(r(7))).unwrap());
        assert!(!is_lattice_minimum(&o, &FieldElement::delta(r(7))).unwrap());
        assert!(!is_lattice_minimum(&o, &FieldElement::delta_bar(r(7))).unwrap());
    }

    #[test]
    fn principal_generator_finds_radical() {
        // the ideal (δ) of Z[∛6] has norm 6
        let rr = r(6);
        let o = CubicOrder::maximal(rr);
        let ideal = o.lattice().scaled_by(&FieldElement::delta(rr));
        let eps = run_chain(&o, StopRule::FullPeriod).unwrap().fundamental_unit.unwrap();
        let g = principal_generator(&ideal, &rr, &BigInt::from(6), &eps, 10_000).unwrap().unwrap();
        assert_eq!(g.norm().numer().abs(), BigInt::from(6));
        assert!(ideal.contains(&g));
        assert_eq!(ideal, o.lattice().scaled_by(&g));
    }
}
