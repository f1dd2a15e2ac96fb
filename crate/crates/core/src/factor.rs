//! Small-integer number theory: factorization, modular powers, primality.

const TRIAL_LIMIT: u64 = 1_000_000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        while g == 1 {
            x = f(x);
            y = f(f(y));
            g = gcd(x.abs_diff(y), n);
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn push_factor(out: &mut Vec<(u64, u32)>, p: u64, e: u32) {
    match out.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += e,
        None => out.push((p, e)),
    }
}

fn split_large(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        push_factor(out, n, 1);
        return;
    }
    let g = pollard_rho(n);
    split_large(g, out);
    split_large(n / g, out);
}

/// Prime factorization as sorted `(prime, exponent)` pairs. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factorize(0)");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    split_large(n, &mut out);
    out.sort_unstable();
    out
}

/// Iterator over primes `p ≡ 1 (mod 3)` starting above `from`.
pub fn primes_one_mod_three(from: u64) -> impl Iterator<Item = u64> {
    (from + 1..).filter(|&p| p % 3 == 1 && is_prime(p))
}

/// Modular inverse for prime modulus.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// All cube roots of `a` modulo a prime `p ≡ 1 (mod 3)`; empty if `a` is a non-residue.
pub fn cube_roots_mod(a: u64, p: u64) -> Vec<u64> {
    let a = a % p;
    if a == 0 {
        return vec![0];
    }
    if pow_mod(a, (p - 1) / 3, p) != 1 {
        return Vec::new();
    }
    // p stays small (a few thousand at most), so a scan for one root suffices.
    let x = (1..p).find(|&x| pow_mod(x, 3, p) == a).expect("cubic residue has a root");
    let [w1, w2] = unity_cube_roots(p);
    let mut roots = vec![x, mul_mod(x, w1, p), mul_mod(x, w2, p)];
    roots.sort_unstable();
    roots
}

/// Primitive cube roots of unity modulo `p ≡ 1 (mod 3)`.
pub fn unity_cube_roots(p: u64) -> [u64; 2] {
    let mut g = 2u64;
    loop {
        let r = pow_mod(g, (p - 1) / 3, p);
        if r != 1 {
            return [r, mul_mod(r, r, p)];
        }
        g += 1;
    }
}
