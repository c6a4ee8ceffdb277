//! Exact integer primitives: primality, factorization, totient, Kronecker
//! symbol, least quadratic nonresidue, primes in arithmetic progressions.
//!
//! No floating point anywhere in this module. All functions are pure.

use crate::{Error, Result};

/// Witness set proving strong-pseudoprime compositeness for all n < 3.317e24,
/// which covers the full u64 range with a wide margin.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Largest n for which `MR_BASES` is a proven-complete witness set.
const MR_PROVEN_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

pub(crate) fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc = 1u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

fn add_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

fn sub_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        m - b + a
    }
}

/// Multiply-mod that stays exact when the product overflows 128 bits.
fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let mut a = a % m;
    let mut b = b % m;
    match a.checked_mul(b) {
        Some(p) => p % m,
        None => {
            let mut acc = 0u128;
            while b > 0 {
                if b & 1 == 1 {
                    acc = add_mod_u128(acc, a, m);
                }
                a = add_mod_u128(a, a, m);
                b >>= 1;
            }
            acc
        }
    }
}

fn pow_mod_u128(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

fn miller_rabin_u64(n: u64) -> bool {
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'bases: for &a in &MR_BASES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn miller_rabin_u128(n: u128) -> bool {
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod_u128(a as u128, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

pub(crate) fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    // f64 seed, corrected exactly
    let mut x = (n as f64).sqrt() as u128 + 2;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    x
}

fn is_square_u128(n: u128) -> bool {
    let r = isqrt_u128(n);
    r * r == n
}

/// Strong Lucas probable-prime test with Selfridge parameters. Together with
/// the strong base-2 test this is the Baillie-PSW combination, which has no
/// known composite passing it; it only runs above `MR_PROVEN_LIMIT`.
fn strong_lucas_u128(n: u128) -> bool {
    // Select D = 5, -7, 9, -11, ... with (D/n) = -1.
    let mut d: i64 = 5;
    loop {
        let j = kronecker_i128(d as i128, n);
        if j == 0 {
            // shares a factor with n (|d| < n here since n is huge)
            return false;
        }
        if j == -1 {
            break;
        }
        d = if d > 0 { -(d + 2) } else { -(d - 2) };
        if d.abs() > 30 && is_square_u128(n) {
            return false;
        }
    }
    // P = 1, Q = (1 - D) / 4
    let q_int = (1 - d as i128) / 4;
    let q = if q_int >= 0 {
        (q_int as u128) % n
    } else {
        n - (q_int.unsigned_abs() % n)
    };
    let d_mod = if d >= 0 {
        (d as u128) % n
    } else {
        n - ((d.unsigned_abs() as u128) % n)
    };

    let mut t = n + 1;
    let s = t.trailing_zeros();
    t >>= s;

    let inv2 = n / 2 + 1; // (n + 1)/2, the inverse of 2 for odd n
    let mut u = 1u128; // U_1
    let mut v = 1u128; // V_1 with P = 1
    let mut qk = q; // Q^k for the current index k
    let bits = 128 - t.leading_zeros();
    for i in (0..bits - 1).rev() {
        // (U, V)_k -> (U, V)_{2k}
        u = mul_mod_u128(u, v, n);
        v = sub_mod_u128(mul_mod_u128(v, v, n), mul_mod_u128(2, qk, n), n);
        qk = mul_mod_u128(qk, qk, n);
        if (t >> i) & 1 == 1 {
            // (U, V)_k -> (U, V)_{k+1}
            let u_next = mul_mod_u128(add_mod_u128(u, v, n), inv2, n);
            let v_next = mul_mod_u128(add_mod_u128(mul_mod_u128(d_mod, u, n), v, n), inv2, n);
            u = u_next;
            v = v_next;
            qk = mul_mod_u128(qk, q, n);
        }
    }
    if u == 0 || v == 0 {
        return true;
    }
    for _ in 1..s {
        v = sub_mod_u128(mul_mod_u128(v, v, n), mul_mod_u128(2, qk, n), n);
        if v == 0 {
            return true;
        }
        qk = mul_mod_u128(qk, qk, n);
    }
    false
}

/// Deterministic primality test, exact for every input representable in
/// 128 bits: fixed-witness strong-pseudoprime rounds (a proven-complete set
/// below 3.3e24, i.e. far past u64), with a strong Lucas test layered on
/// above that range.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p as u128 == 0 {
            return n == p as u128;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    if n <= u64::MAX as u128 {
        return miller_rabin_u64(n as u64);
    }
    if !miller_rabin_u128(n) {
        return false;
    }
    if n <= MR_PROVEN_LIMIT {
        return true;
    }
    strong_lucas_u128(n)
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Pollard-Brent rho with a fixed increment sequence, so factorization is
/// deterministic. Input must be odd, composite, and coprime to small primes.
fn pollard_rho(n: u64) -> u64 {
    let n128 = n as u128;
    for c in 1..n {
        let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n128) as u64;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("rho exhausted increments for {n}");
}

/// Prime factorization of n >= 1, ascending primes with exponents.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut n = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut stack = Vec::new();
    if n > 1 {
        stack.push(n);
    }
    let mut found = Vec::new();
    while let Some(m) = stack.pop() {
        if is_prime(m as u128) {
            found.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    found.sort_unstable();
    let mut i = 0;
    while i < found.len() {
        let p = found[i];
        let mut e = 0;
        while i < found.len() && found[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
    out.sort_unstable();
    out
}

/// Euler's totient via factorization. Errors on n = 0.
pub fn euler_phi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("euler_phi(0) is undefined"));
    }
    let mut phi = 1u64;
    for (p, e) in factorize(n) {
        phi *= p.pow(e - 1) * (p - 1);
    }
    Ok(phi)
}

fn kronecker_i128(a: i128, mut n: u128) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut k = 1i32;
    // factor of 2 in the bottom: (a/2) depends on a mod 8
    let two_part = n.trailing_zeros();
    n >>= two_part;
    if two_part > 0 {
        if a & 1 == 0 {
            return 0;
        }
        let am8 = a.rem_euclid(8);
        if two_part & 1 == 1 && (am8 == 3 || am8 == 5) {
            k = -k;
        }
    }
    // Jacobi symbol for odd n; the sign of a folds in via euclidean reduction
    let mut a = a.rem_euclid(n as i128) as u128;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz & 1 == 1 && (n % 8 == 3 || n % 8 == 5) {
            k = -k;
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        a %= n;
    }
    if n == 1 {
        k
    } else {
        0
    }
}

/// Full Kronecker symbol (a/n) for n >= 0, extending the Legendre symbol to
/// arbitrary integer numerators and even denominators. Zero iff gcd > 1.
pub fn kronecker(a: i64, n: u64) -> i32 {
    kronecker_i128(a as i128, n as u128)
}

/// Least M >= 2 with (M/N) = -1, for N an odd prime. The minimum is
/// necessarily prime (the symbol is multiplicative), which we assert.
pub fn least_nonresidue(n: u64) -> Result<u64> {
    if n < 3 || n % 2 == 0 || !is_prime(n as u128) {
        return Err(Error::NotOddPrime(n));
    }
    let m = (2..n)
        .find(|&m| kronecker(m as i64, n) == -1)
        .expect("an odd prime has a nonresidue below it");
    assert!(is_prime(m as u128), "least nonresidue {m} mod {n} not prime");
    assert!(
        factorize(m).iter().all(|&(_, e)| e == 1),
        "least nonresidue {m} mod {n} not squarefree"
    );
    Ok(m)
}

/// First `count` primes congruent to a (mod m), ascending. Requires
/// gcd(a, m) = 1 so the progression contains primes at all.
pub fn primes_in_progression(a: u64, m: u64, count: usize) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::Domain("modulus must be positive"));
    }
    if gcd_u64(a % m, m) != 1 {
        return Err(Error::NotCoprime(a, m));
    }
    let mut out = Vec::with_capacity(count);
    let mut x = a % m;
    if x == 0 {
        x = m; // only reachable when m = 1
    }
    while out.len() < count {
        if x >= 2 && is_prime(x as u128) {
            out.push(x);
        }
        x += m;
    }
    Ok(out)
}

/// All primes <= limit, ascending (plain sieve of Eratosthenes).
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}
