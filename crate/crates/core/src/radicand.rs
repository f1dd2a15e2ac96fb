//! Integer invariants of a pure cubic field `Q(∛d)`: normalization, Dedekind
//! species, conductor, ramification invariant and the canonical divisors of
//! a principal factor norm.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::factor::factorize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Species {
    /// `3 | ab`, i.e. `d ≡ 0, ±3 (mod 9)`.
    #[serde(rename = "1a")]
    S1a,
    /// `d ≡ ±2, ±4 (mod 9)`.
    #[serde(rename = "1b")]
    S1b,
    /// `d ≡ ±1 (mod 9)`.
    #[serde(rename = "2")]
    S2,
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Species::S1a => "1a",
            Species::S1b => "1b",
            Species::S2 => "2",
        })
    }
}

/// Normalized cube-free radicand `d = a·b²` with `a > b ≥ 1` squarefree and coprime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Radicand {
    pub d: u64,
    pub a: u64,
    pub b: u64,
    /// Co-radicand `a²b`.
    pub dbar: u64,
    pub species: Species,
    /// Conductor of the Kummer extension `k/k0`.
    pub f: u64,
    /// Product of the primes ramified in `k/k0`.
    pub r: u64,
}

impl Radicand {
    /// Strips cubes from `m`, splits the rest into `a·b²` and swaps to the
    /// co-radicand when needed so that `a > b`.
    pub fn normalize(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidRadicand(m));
        }
        let (mut a, mut b) = (1u64, 1u64);
        for (p, e) in factorize(m) {
            match e % 3 {
                1 => a *= p,
                2 => b *= p,
                _ => {}
            }
        }
        if a == 1 && b == 1 {
            return Err(Error::NotACubicField(m));
        }
        if a < b {
            std::mem::swap(&mut a, &mut b);
        }
        Ok(Self::from_parts(a, b))
    }

    fn from_parts(a: u64, b: u64) -> Self {
        let d = a * b * b;
        let species = if a % 3 == 0 || b % 3 == 0 {
            Species::S1a
        } else if matches!(d % 9, 1 | 8) {
            Species::S2
        } else {
            Species::S1b
        };
        let ab = a * b;
        let (f, r) = match species {
            Species::S1a => (3 * ab, ab),
            Species::S1b => (3 * ab, 3 * ab),
            Species::S2 => (ab, ab),
        };
        Radicand { d, a, b, dbar: a * a * b, species, f, r }
    }

    /// 3-adic valuation of the conductor: 2, 1, 0 for species 1a, 1b, 2.
    pub fn v3_conductor(&self) -> u32 {
        let mut f = self.f;
        let mut v = 0;
        while f % 3 == 0 {
            f /= 3;
            v += 1;
        }
        v
    }

    /// Primes dividing `R`, ascending.
    pub fn ramified_primes(&self) -> Vec<u64> {
        factorize(self.r).into_iter().map(|(p, _)| p).collect()
    }

    pub fn divides_r_squared(&self, n: u64) -> bool {
        n != 0 && ((self.r as u128 * self.r as u128) % n as u128) == 0
    }

    /// Exponent of `p` in the principal ideal `(δ)` (zero for `p = 3` in species 1b).
    pub fn radical_exponent(&self, p: u64) -> u32 {
        if self.a % p == 0 {
            1
        } else if self.b % p == 0 {
            2
        } else {
            0
        }
    }

    /// The canonical divisors of `d` relative to the norm `n`.
    pub fn canonical_split(&self, n: u64) -> Result<CanonicalSplit> {
        let bad = || Error::NotAPrincipalFactorNorm { d: self.d, norm: n };
        if n == 0 {
            return Err(bad());
        }
        let (mut d1, mut d2, mut d4, mut d5, mut v) = (1u64, 1u64, 1u64, 1u64, 0u8);
        for (p, e) in factorize(n) {
            if e > 2 {
                return Err(bad());
            }
            if self.a % p == 0 {
                if e == 1 { d1 *= p } else { d2 *= p }
            } else if self.b % p == 0 {
                if e == 1 { d4 *= p } else { d5 *= p }
            } else if p == 3 && self.species == Species::S1b {
                v = e as u8;
            } else {
                return Err(bad());
            }
        }
        Ok(CanonicalSplit {
            species: self.species,
            d1,
            d2,
            d3: self.a / (d1 * d2),
            d4,
            d5,
            d6: self.b / (d4 * d5),
            v,
            n,
        })
    }

    /// Norm of the primitive representative whose ideal exponents are `e` (mod 3)
    /// over the ramified primes.
    fn norm_from_exponents(primes: &[u64], e: &[u32]) -> u64 {
        primes.iter().zip(e).map(|(&p, &k)| p.pow(k % 3)).product()
    }

    fn exponents_of(&self, primes: &[u64], n: u64) -> Vec<u32> {
        primes
            .iter()
            .map(|&p| {
                let mut m = n;
                let mut k = 0;
                while m % p == 0 {
                    m /= p;
                    k += 1;
                }
                k
            })
            .collect()
    }

    /// The three primitive norms in the coset of `n` modulo the radical group `{1, δ, δ̄}`.
    pub fn coset_of(&self, n: u64) -> Result<[u64; 3]> {
        self.canonical_split(n)?;
        let primes = self.ramified_primes();
        let e = self.exponents_of(&primes, n);
        let shift: Vec<u32> = primes.iter().map(|&p| self.radical_exponent(p)).collect();
        let mut out = [0u64; 3];
        for (t, slot) in out.iter_mut().enumerate() {
            let et: Vec<u32> = e.iter().zip(&shift).map(|(&x, &s)| x + t as u32 * s).collect();
            *slot = Self::norm_from_exponents(&primes, &et);
        }
        Ok(out)
    }

    /// Primitive norm representing the square of the class of `n`.
    pub fn square_class_norm(&self, n: u64) -> Result<u64> {
        self.canonical_split(n)?;
        let primes = self.ramified_primes();
        let e: Vec<u32> = self.exponents_of(&primes, n).iter().map(|x| 2 * x).collect();
        Ok(Self::norm_from_exponents(&primes, &e))
    }

    /// `true` when `n` lies in the trivial coset `{1, ab², a²b}`.
    pub fn is_trivial_class(&self, n: u64) -> Result<bool> {
        Ok(self.coset_of(n)?.contains(&1))
    }

    /// All normalized radicands `lo ≤ d ≤ hi`.
    pub fn range(lo: u64, hi: u64) -> impl Iterator<Item = Radicand> {
        (lo.max(2)..=hi).filter_map(|m| Radicand::normalize(m).ok().filter(|r| r.d == m))
    }
}

/// Free-function form of [`Radicand::normalize`].
pub fn normalize(m: u64) -> Result<Radicand> {
    Radicand::normalize(m)
}

/// Squarefree pairwise coprime divisors `d1..d6` with `a = d1d2d3`, `b = d4d5d6`
/// and `n = 3^v·d1·d2²·d4·d5²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalSplit {
    pub species: Species,
    pub d1: u64,
    pub d2: u64,
    pub d3: u64,
    pub d4: u64,
    pub d5: u64,
    pub d6: u64,
    pub v: u8,
    pub n: u64,
}

pub fn canonical_split(r: &Radicand, n: u64) -> Result<CanonicalSplit> {
    r.canonical_split(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetNorms {
    pub trivial: [u64; 3],
    pub first: [u64; 3],
    pub second: [u64; 3],
}

impl CosetNorms {
    pub fn minimal_first(&self) -> u64 {
        *self.first.iter().min().unwrap()
    }

    pub fn minimal_second(&self) -> u64 {
        *self.second.iter().min().unwrap()
    }
}

impl CanonicalSplit {
    pub fn a(&self) -> u64 {
        self.d1 * self.d2 * self.d3
    }

    pub fn b(&self) -> u64 {
        self.d4 * self.d5 * self.d6
    }

    pub fn three_power(&self) -> u64 {
        3u64.pow(self.v as u32)
    }

    /// Norms of the trivial subgroup and the two non-trivial cosets. The 3-part of
    /// each non-trivial coset is the primitive 3-power of `α` resp. `α²`.
    pub fn coset_norms(&self) -> CosetNorms {
        let [d1, d2, d3, d4, d5, d6] = [self.d1, self.d2, self.d3, self.d4, self.d5, self.d6];
        let (a, b) = (self.a(), self.b());
        let first_three = self.three_power();
        let second_three = 3u64.pow((2 * self.v as u32) % 3);
        CosetNorms {
            trivial: [1, a * b * b, a * a * b],
            first: [
                first_three * d1 * d2 * d2 * d4 * d5 * d5,
                first_three * d1 * d1 * d3 * d5 * d6 * d6,
                first_three * d2 * d3 * d3 * d4 * d4 * d6,
            ],
            second: [
                second_three * d1 * d1 * d2 * d4 * d4 * d5,
                second_three * d2 * d2 * d3 * d4 * d6 * d6,
                second_three * d1 * d3 * d3 * d5 * d5 * d6,
            ],
        }
    }

    /// `(u1, u2)` with `u1 ≡ d1d3d4d5` and `u2 ≡ d1d2d4d6 (mod 3)`.
    pub fn congruence_invariants(&self) -> Result<(i8, i8)> {
        if self.species == Species::S1a {
            return Err(Error::ThreeDividesInvariant);
        }
        let sign = |m: u64| match m % 3 {
            1 => Ok(1i8),
            2 => Ok(-1i8),
            _ => Err(Error::ThreeDividesInvariant),
        };
        let u1 = sign((self.d1 % 3) * (self.d3 % 3) * (self.d4 % 3) * (self.d5 % 3))?;
        let u2 = sign((self.d1 % 3) * (self.d2 % 3) * (self.d4 % 3) * (self.d6 % 3))?;
        Ok((u1, u2))
    }
}

pub fn coset_norms(s: &CanonicalSplit) -> CosetNorms {
    s.coset_norms()
}

pub fn congruence_invariants(s: &CanonicalSplit) -> Result<(i8, i8)> {
    s.congruence_invariants()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let r = normalize(12).unwrap();
        assert_eq!((r.d, r.a, r.b, r.dbar, r.species, r.f, r.r), (12, 3, 2, 18, Species::S1a, 18, 6));
        let s = normalize(18).unwrap();
        assert_eq!((s.d, s.a, s.b), (12, 3, 2));
        let t = normalize(1430).unwrap();
        assert_eq!((t.d, t.a, t.b, t.species, t.f, t.r), (1430, 1430, 1, Species::S2, 1430, 1430));
        assert_eq!(normalize(4).unwrap().d, 2);
        assert_eq!(normalize(16).unwrap().d, 2);
        assert_eq!(normalize(1), Err(Error::InvalidRadicand(1)));
        assert_eq!(normalize(27), Err(Error::NotACubicField(27)));
        assert_eq!(normalize(216), Err(Error::NotACubicField(216)));
    }

    #[test]
    fn conductor_valuation_matches_species() {
        for r in Radicand::range(2, 500) {
            let expected = match r.species {
                Species::S1a => 2,
                Species::S1b => 1,
                Species::S2 => 0,
            };
            assert_eq!(r.v3_conductor(), expected, "d = {}", r.d);
            let m = r.d % 9;
            match r.species {
                Species::S1a => assert!(matches!(m, 0 | 3 | 6)),
                Species::S1b => assert!(matches!(m, 2 | 4 | 5 | 7)),
                Species::S2 => assert!(matches!(m, 1 | 8)),
            }
        }
    }

    #[test]
    fn canonical_split_examples() {
        let r = normalize(1430).unwrap();
        let s = r.canonical_split(1100).unwrap();
        assert_eq!((s.d1, s.d2, s.d3, s.d4, s.d5, s.d6, s.v), (11, 10, 13, 1, 1, 1, 0));

        let r = normalize(833).unwrap();
        let s = r.canonical_split(63).unwrap();
        assert_eq!((s.d1, s.d2, s.d3, s.d4, s.d5, s.d6, s.v), (1, 1, 17, 7, 1, 1, 2));

        let r = normalize(12).unwrap();
        let s = r.canonical_split(1).unwrap();
        assert_eq!((s.d1, s.d2, s.d3, s.d4, s.d5, s.d6, s.v), (1, 1, 3, 1, 1, 2, 0));
    }

    #[test]
    fn canonical_split_rejects_foreign_norms() {
        let r = normalize(1430).unwrap();
        assert!(r.canonical_split(7).is_err());
        assert!(r.canonical_split(8).is_err());
        // 3 is unramified for species 2
        assert!(r.canonical_split(3).is_err());
        let r = normalize(2).unwrap();
        assert_eq!(r.canonical_split(27).unwrap_err(), Error::NotAPrincipalFactorNorm { d: 2, norm: 27 });
        assert_eq!(r.canonical_split(9).unwrap().v, 2);
    }

    #[test]
    fn coset_norm_examples() {
        let r = normalize(1430).unwrap();
        let c = r.canonical_split(1100).unwrap().coset_norms();
        assert_eq!(c.first, [1100, 1573, 1690]);
        assert_eq!(c.second, [1210, 1300, 1859]);
        assert_eq!(c.minimal_second(), 1210);
        assert_eq!(c.trivial, [1, 1430, 1430 * 1430]);

        let r = normalize(833).unwrap();
        let c = r.canonical_split(63).unwrap().coset_norms();
        assert_eq!(c.minimal_first(), 63);
        assert_eq!(c.minimal_second(), 147);

        let r = normalize(1430).unwrap();
        let c = r.canonical_split(1).unwrap().coset_norms();
        assert_eq!(c.first, [1, 1430, 1430 * 1430]);
    }

    #[test]
    fn exponent_cosets_agree_with_norm_formulas() {
        let r = normalize(1430).unwrap();
        let mut c = r.coset_of(1100).unwrap();
        c.sort_unstable();
        assert_eq!(c, [1100, 1573, 1690]);
        let sq = r.square_class_norm(1100).unwrap();
        let mut c2 = r.coset_of(sq).unwrap();
        c2.sort_unstable();
        assert_eq!(c2, [1210, 1300, 1859]);
        assert!(r.is_trivial_class(1430).unwrap());
        assert!(!r.is_trivial_class(1100).unwrap());
    }

    #[test]
    fn congruence_examples() {
        let r = normalize(1430).unwrap();
        assert_eq!(r.canonical_split(1100).unwrap().congruence_invariants().unwrap(), (-1, -1));
        let r = normalize(2).unwrap();
        let s = r.canonical_split(3).unwrap();
        assert_eq!((s.v, s.d3), (1, 2));
        assert_eq!(s.congruence_invariants().unwrap(), (-1, 1));
        let r = normalize(10).unwrap();
        assert_eq!(r.canonical_split(1).unwrap().d3, 10);
        let r = normalize(12).unwrap();
        assert_eq!(r.canonical_split(1).unwrap().congruence_invariants(), Err(Error::ThreeDividesInvariant));
    }

    #[test]
    fn species_counts_partition_small_range() {
        let all: Vec<Radicand> = Radicand::range(2, 100).collect();
        let count = |s| all.iter().filter(|r| r.species == s).count();
        assert_eq!(count(Species::S1a) + count(Species::S1b) + count(Species::S2), all.len());
        assert_eq!(all.len(), 74);
    }
}
