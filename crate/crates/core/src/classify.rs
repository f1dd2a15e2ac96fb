//! Principal factorization type α, β or γ of a pure cubic field, decided by a
//! chain of lattice minima and, when no principal factor shows up, by the
//! subfield unit index `Q`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::criteria::{m_class, MClass, Prediction};
use crate::error::{Error, Result};
use crate::factor::factorize;
use crate::field::FieldElement;
use crate::kummer::{subfield_unit_index, QCertificate, DEFAULT_PRECISION_BUDGET};
use crate::radicand::{Radicand, Species};
use crate::voronoi::{
    is_lattice_minimum, principal_generator, run_chain_budget, ChainSummary, CubicOrder, OrderKind,
    StopRule, DEFAULT_MAX_STEPS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PfType {
    Alpha,
    Beta,
    Gamma,
}

impl fmt::Display for PfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PfType::Alpha => "α",
            PfType::Beta => "β",
            PfType::Gamma => "γ",
        })
    }
}

/// Why a type was assigned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// A chain record generating a primitive ambiguous principal ideal.
    PfWitness { index: i64, coordinates: [String; 3], denominator: String, norm: u64 },
    QIndex { q: u8, certificate: QCertificate },
    /// A prime `ℓ ≡ ±2, ±4 (mod 9)` dividing the conductor, which rules out type γ.
    GammaExcluded { prime: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Run the whole period instead of stopping at the first principal factor.
    pub full_period: bool,
    pub precision_budget: u64,
    pub max_steps: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            full_period: false,
            precision_budget: DEFAULT_PRECISION_BUDGET,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub d: u64,
    pub species: Species,
    pub pf_type: PfType,
    pub evidence: Vec<Evidence>,
    pub chain_used: OrderKind,
    /// Known when the chain ran a whole period.
    pub period_length: Option<usize>,
    pub q: Option<u8>,
    /// Norms of the principal factors met in the chain, in chain order.
    pub pf_norms: Vec<u64>,
    pub m_class: Option<MClass>,
    /// A generator of a non-trivial primitive ambiguous principal ideal, if known.
    #[serde(skip)]
    pub witness: Option<FieldElement>,
    /// Fundamental unit `ε > 1` of the maximal order, if computed.
    #[serde(skip)]
    pub unit: Option<FieldElement>,
}

impl Classification {
    pub fn pf_witness(&self) -> Option<&Evidence> {
        self.evidence.iter().find(|e| matches!(e, Evidence::PfWitness { .. }))
    }
}

/// A prime `ℓ | f` with `ℓ ≡ ±2, ±4 (mod 9)`; its presence makes type γ impossible.
pub fn gamma_exclusion_prime(r: &Radicand) -> Option<u64> {
    factorize(r.f).into_iter().map(|(p, _)| p).find(|p| matches!(p % 9, 2 | 4 | 5 | 7))
}

/// Divides out rational integers: minima are primitive, so this only guards
/// against records that are not.
fn primitive_part(order: &CubicOrder, e: &FieldElement) -> FieldElement {
    let mut e = e.clone();
    let Some(n) = e.norm().numer().abs().to_u64() else { return e };
    for (p, k) in factorize(n) {
        for _ in 0..k / 3 {
            let q = e.div_int(&BigInt::from(p));
            if order.contains(&q) {
                e = q;
            }
        }
    }
    e
}

fn witness_evidence(order: &CubicOrder, chain: &ChainSummary) -> Option<(Evidence, FieldElement)> {
    let rec = chain.first_pf()?;
    let e = primitive_part(order, &rec.element);
    let norm = e.norm().numer().abs().to_u64()?;
    let den = e.denominator().clone();
    let coordinates = e.numerators().clone().map(|c| c.to_string());
    Some((
        Evidence::PfWitness { index: rec.index, coordinates, denominator: den.to_string(), norm },
        e,
    ))
}

fn pf_norms(chain: &ChainSummary) -> Vec<u64> {
    chain
        .pf_hits
        .iter()
        .filter_map(|&j| chain.record(j))
        .filter_map(|rec| rec.norm.to_u64())
        .collect()
}

pub fn classify(d: u64) -> Result<Classification> {
    classify_with(d, &ClassifyOptions::default())
}

pub fn classify_with(d: u64, opts: &ClassifyOptions) -> Result<Classification> {
    let r = Radicand::normalize(d)?;
    let kind = if r.species == Species::S2 { OrderKind::SubOrder0 } else { OrderKind::Maximal };
    let order = CubicOrder::new(r, kind);
    let stop = if opts.full_period { StopRule::FullPeriod } else { StopRule::FirstPF };
    let chain = run_chain_budget(&order, stop, opts.max_steps)?;

    let mut out = Classification {
        d: r.d,
        species: r.species,
        pf_type: PfType::Alpha,
        evidence: Vec::new(),
        chain_used: kind,
        period_length: chain.period_length,
        q: None,
        pf_norms: pf_norms(&chain),
        m_class: None,
        witness: None,
        unit: None,
    };
    if r.species == Species::S1b {
        if let Some(p) = gamma_exclusion_prime(&r) {
            out.evidence.push(Evidence::GammaExcluded { prime: p });
        }
    }
    if let Some((ev, e)) = witness_evidence(&order, &chain) {
        out.pf_type = PfType::Beta;
        out.evidence.insert(0, ev);
        out.witness = Some(e);
        if kind == OrderKind::Maximal {
            out.unit = chain.fundamental_unit.clone();
        }
        return Ok(out);
    }

    // no principal factor among the minima: Q decides, from the unit of the maximal order
    let unit = if kind == OrderKind::Maximal {
        chain.fundamental_unit.clone()
    } else {
        run_chain_budget(&CubicOrder::maximal(r), StopRule::FullPeriod, opts.max_steps)?.fundamental_unit
    }
    .ok_or_else(|| Error::Inconsistent(format!("chain for d = {} ended without a unit", r.d)))?;
    let (q, cert) = subfield_unit_index(&unit, opts.precision_budget)?;
    out.q = Some(q);
    out.unit = Some(unit);
    out.evidence.insert(0, Evidence::QIndex { q, certificate: cert });
    out.pf_type = match (q, r.species) {
        (1, _) => PfType::Alpha,
        (_, Species::S1b) => PfType::Beta,
        _ => PfType::Gamma,
    };
    Ok(out)
}

/// The classification together with its M-class; fails for types α and γ.
pub fn classify_with_mclass(d: u64, opts: &ClassifyOptions) -> Result<Classification> {
    let mut c = classify_with(d, opts)?;
    attach_mclass(&mut c, opts)?;
    Ok(c)
}

/// Fills in the M-class of a type-β classification.
pub fn attach_mclass(c: &mut Classification, opts: &ClassifyOptions) -> Result<()> {
    if c.pf_type != PfType::Beta {
        return Err(Error::NotTypeBeta(c.d));
    }
    let r = Radicand::normalize(c.d)?;
    let n = match c.pf_witness() {
        Some(Evidence::PfWitness { norm, .. }) => *norm,
        _ => {
            // species 1b without a principal factor among the minima: locate one
            let unit = c.unit.clone().ok_or(Error::NotTypeBeta(c.d))?;
            let (n, g) = find_principal_factor(&r, &unit, opts.max_steps)?.ok_or_else(|| {
                Error::Inconsistent(format!("d = {}: Q = 3 but no principal ambiguous ideal found", r.d))
            })?;
            c.witness = Some(g);
            n
        }
    };
    c.m_class = Some(m_class(&r, n)?);
    Ok(())
}

fn uniformizer(r: &Radicand, p: u64) -> FieldElement {
    if r.a % p == 0 {
        FieldElement::delta(*r)
    } else if r.b % p == 0 {
        FieldElement::delta_bar(*r)
    } else {
        // p = 3 in species 1b: δ − d has norm d − d³, divisible by 3 exactly once
        FieldElement::from_ints(*r, -(r.d as i64), 1, 0)
    }
}

/// The ideal `∏ 𝔭ᵢ^eᵢ` of the maximal order over the totally ramified primes.
pub fn ramified_ideal(r: &Radicand, exps: &[(u64, u32)]) -> crate::lattice::IntLattice {
    let mut lat = CubicOrder::maximal(*r).lattice();
    for &(p, e) in exps {
        if e == 0 {
            continue;
        }
        let pi = uniformizer(r, p).pow(e);
        lat = lat.times_elements(*r, &[FieldElement::from_ints(*r, p as i64, 0, 0), pi]);
    }
    lat
}

/// Searches the primitive ambiguous ideals of species 1b with `3 | N` for a
/// principal one and returns its norm and a generator.
pub fn find_principal_factor(
    r: &Radicand,
    unit: &FieldElement,
    max_steps: usize,
) -> Result<Option<(u64, FieldElement)>> {
    let primes = r.ramified_primes();
    let mut seen = BTreeSet::new();
    let mut candidates = Vec::new();
    let total = 3usize.pow(primes.len() as u32);
    for code in 0..total {
        let mut c = code;
        let exps: Vec<(u64, u32)> = primes
            .iter()
            .map(|&p| {
                let e = (c % 3) as u32;
                c /= 3;
                (p, e)
            })
            .collect();
        let n: u64 = exps.iter().map(|&(p, e)| p.pow(e)).product();
        if n == 1 || r.is_trivial_class(n)? {
            continue;
        }
        let least = *r.coset_of(n)?.iter().min().expect("three norms");
        let other = *r.coset_of(r.square_class_norm(n)?)?.iter().min().expect("three norms");
        if seen.contains(&least) || seen.contains(&other) {
            continue;
        }
        seen.insert(least);
        candidates.push(least);
    }
    candidates.sort_unstable();
    for n in candidates {
        let exps: Vec<(u64, u32)> = factorize(n).into_iter().collect();
        let ideal = ramified_ideal(r, &exps);
        if let Some(g) = principal_generator(&ideal, r, &BigInt::from(n), unit, max_steps)? {
            return Ok(Some((n, g)));
        }
    }
    Ok(None)
}

/// Generators of the least members of both non-trivial cosets, from any
/// generator `alpha` of a non-trivial primitive ambiguous principal ideal.
pub fn coset_generators(r: &Radicand, alpha: &FieldElement) -> Result<[(u64, FieldElement); 2]> {
    let n = alpha
        .norm()
        .numer()
        .abs()
        .to_u64()
        .ok_or_else(|| Error::Inconsistent("witness norm overflows".into()))?;
    let square = alpha * alpha;
    let mut out = Vec::new();
    let least = |m: u64| -> Result<u64> { Ok(*r.coset_of(m)?.iter().min().expect("three norms")) };
    let targets = [least(n)?, least(r.square_class_norm(n)?)?];
    for ((base, base_norm), target) in [(alpha.clone(), n as u128), (square, n as u128 * n as u128)].into_iter().zip(targets) {
        let mut found = None;
        for (rad, rad_norm) in
            [(FieldElement::one(*r), 1u64), (FieldElement::delta(*r), r.d), (FieldElement::delta_bar(*r), r.dbar)]
        {
            let full = BigInt::from(base_norm) * BigInt::from(rad_norm);
            if (&full % target) != BigInt::from(0) {
                continue;
            }
            let ratio = full / target;
            let c = ratio.cbrt();
            if &c * &c * &c != ratio {
                continue;
            }
            let mut g = (&base * &rad).div_int(&BigInt::from(c));
            if g.sign() < 0 {
                g = -&g;
            }
            found = Some((target, g));
            break;
        }
        out.push(found.ok_or_else(|| Error::Inconsistent(format!("no generator of norm {target}")))?);
    }
    Ok([out[0].clone(), out[1].clone()])
}

/// A maximal-order minimum lying in the norm cylinder of a non-minimum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Shadow {
    pub index: i64,
    pub norm: u64,
}

/// Direct check of the predicted M-class against the maximal order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verification {
    pub maximal_period: usize,
    pub maximal_pf_norms: Vec<u64>,
    /// For each coset: least norm, predicted minimum, actual minimum.
    pub cosets: Vec<(u64, bool, bool)>,
    /// Species 2 only: period of the suborder chain and its principal factors
    /// with their shadows among the maximal-order minima.
    pub suborder_period: Option<usize>,
    pub suborder_factors: Vec<(i64, u64, Vec<Shadow>)>,
    pub agrees: bool,
}

/// Runs the maximal-order chain and tests both coset representatives directly.
pub fn verify_mclass(c: &Classification, opts: &ClassifyOptions) -> Result<Verification> {
    let r = Radicand::normalize(c.d)?;
    let mc = c.m_class.as_ref().ok_or(Error::NotTypeBeta(c.d))?;
    let alpha = c.witness.as_ref().ok_or(Error::NotTypeBeta(c.d))?;
    let maximal = CubicOrder::maximal(r);
    let chain = run_chain_budget(&maximal, StopRule::FullPeriod, opts.max_steps)?;
    let reps = coset_generators(&r, alpha)?;
    let mut cosets = Vec::new();
    let mut agrees = true;
    for ((norm, g), verdict) in reps.iter().zip(&mc.cosets) {
        let actual = is_lattice_minimum(&maximal, g)?;
        let predicted = verdict.prediction != Prediction::NotMinimum;
        agrees &= actual == predicted && *norm == verdict.norm;
        cosets.push((*norm, predicted, actual));
    }
    let mut out = Verification {
        maximal_period: chain.period_length.unwrap_or(0),
        maximal_pf_norms: pf_norms(&chain),
        cosets,
        suborder_period: None,
        suborder_factors: Vec::new(),
        agrees,
    };
    if r.species == Species::S2 {
        let sub = run_chain_budget(&CubicOrder::suborder0(r), StopRule::FullPeriod, opts.max_steps)?;
        out.suborder_period = sub.period_length;
        for &j in &sub.pf_hits {
            let rec = sub.record(j).expect("hit record");
            let shadows = shadows_of(&chain, &rec.element);
            out.suborder_factors.push((j, rec.norm.to_u64().unwrap_or(0), shadows));
        }
    }
    Ok(out)
}

/// Records of one maximal period that lie strictly inside the norm cylinder of `e`.
fn shadows_of(chain: &ChainSummary, e: &FieldElement) -> Vec<Shadow> {
    let cp = e.conjugate_product();
    let len = chain.period_length.unwrap_or(0) as i64;
    chain
        .records
        .iter()
        .filter(|rec| rec.index < 0 && rec.index > -len)
        .filter(|rec| {
            rec.element.cmp_value(e) == Ordering::Less
                && rec.element.conjugate_product().cmp_value(&cp) == Ordering::Less
        })
        .map(|rec| Shadow { index: rec.index, norm: rec.norm.to_u64().unwrap_or(0) })
        .collect()
}

/// `witness³ / N(witness)` is a unit of the maximal order, i.e. the witness
/// generates an ambiguous ideal.
pub fn witness_is_ambiguous(w: &FieldElement) -> bool {
    let n = w.norm();
    if n.numer().is_one() && n.denom().is_one() {
        return false;
    }
    let cube = w.pow(3);
    let q = FieldElement::rational(*w.radicand(), n.recip());
    let u = &cube * &q;
    u.in_maximal_order() && u.norm().abs().is_one()
}
