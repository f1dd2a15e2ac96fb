use cubic_minima::classify::{classify_with, classify_with_mclass, ClassifyOptions, PfType};
use cubic_minima::criteria::{coarse_conditions, predict_minimum, Coarse, CriterionInput, FastPath, Prediction};
use cubic_minima::voronoi::OrderKind;
use cubic_minima::{Radicand, Species};

fn beta_fields(lo: u64, hi: u64) -> impl Iterator<Item = Radicand> {
    Radicand::range(lo, hi).filter(|r| classify_with(r.d, &ClassifyOptions::default()).unwrap().pf_type == PfType::Beta)
}

fn divisors_of_r_squared(r: &Radicand) -> Vec<u64> {
    let mut out = vec![1u64];
    for p in r.ramified_primes() {
        out = out.iter().flat_map(|&m| [m, m * p, m * p * p]).collect();
    }
    out.retain(|&n| r.divides_r_squared(n));
    out
}

#[test]
fn coarse_agrees_with_fine() {
    let mut decided = 0;
    for r in Radicand::range(2, 3000) {
        for n in divisors_of_r_squared(&r) {
            if n == 1 || r.is_trivial_class(n).unwrap() {
                continue;
            }
            let input = CriterionInput::new(&r, n).unwrap();
            if !input.hypothesis_holds() {
                continue;
            }
            let fine = predict_minimum(&input, OrderKind::Maximal).unwrap();
            match coarse_conditions(&input) {
                Coarse::ForcesNonMinimum => assert_eq!(fine, Prediction::NotMinimum, "d = {}, n = {n}", r.d),
                Coarse::ForcesMinimum => assert_ne!(fine, Prediction::NotMinimum, "d = {}, n = {n}", r.d),
                Coarse::Indeterminate => continue,
            }
            decided += 1;
        }
    }
    assert!(decided > 100);
}

#[test]
fn fast_paths_match_general_path() {
    // m_class cross-checks the closed forms itself and fails on disagreement
    let mut square_part = 0;
    let mut square_free = 0;
    for r in beta_fields(2, 6000) {
        let is_candidate = (r.species == Species::S1b && r.b > 1) || (r.species == Species::S2 && r.b == 1);
        if !is_candidate {
            continue;
        }
        let c = classify_with_mclass(r.d, &ClassifyOptions::default()).unwrap();
        match c.m_class.unwrap().fast_path {
            Some(FastPath::SquarePartSpecies1b) => square_part += 1,
            Some(FastPath::SquareFreeSpecies2) => square_free += 1,
            None => {}
        }
    }
    assert!(square_part > 0 && square_free > 0, "{square_part} / {square_free}");
}
