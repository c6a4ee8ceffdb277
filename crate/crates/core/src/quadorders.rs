//! Imaginary quadratic orders: discriminant decomposition, unit counts,
//! class numbers via reduced binary quadratic forms, the relative class
//! number formula, and the ray-class degree formula.
//!
//! The class number h(D) counts primitive reduced forms only, which matches
//! the Picard group of the (possibly non-maximal) order of discriminant D;
//! the relative class number cross-check fails with imprimitive forms
//! included.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_rational::Ratio;

use crate::arith::{factorize, gcd_u64, is_prime, kronecker};
use crate::{Error, Result};

/// A negative integer congruent to 0 or 1 mod 4. Constructing one validates
/// the invariant; every downstream API takes the validated type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d < 0 && (d.rem_euclid(4) == 0 || d.rem_euclid(4) == 1) {
            Ok(Discriminant(d))
        } else {
            Err(Error::InvalidDiscriminant(d))
        }
    }

    pub fn get(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }

    /// All valid discriminants with |D| <= bound, ascending |D|.
    pub fn range_to(bound: u64) -> impl Iterator<Item = Discriminant> {
        (3..=bound as i64).filter_map(|m| Discriminant::new(-m).ok())
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A primitive reduced positive definite form (a, b, c) of discriminant
/// b^2 - 4ac: |b| <= a <= c, with b >= 0 when |b| = a or a = c, and
/// gcd(a, b, c) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }
}

impl fmt::Display for ReducedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// The arithmetic profile of one order: discriminant, fundamental part,
/// conductor, unit count and class number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderProfile {
    pub discriminant: Discriminant,
    pub fundamental: Discriminant,
    pub conductor: u64,
    pub unit_count: u8,
    pub class_number: u64,
}

/// D = f^2 * D0 with D0 fundamental: either D0 = 1 mod 4 squarefree, or
/// D0 = 4m with m squarefree and m = 2, 3 mod 4.
pub fn decompose(d: Discriminant) -> (Discriminant, u64) {
    let m = d.abs();
    let mut square = 1u64;
    let mut kernel = 1u64;
    for (p, e) in factorize(m) {
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            kernel *= p;
        }
    }
    if kernel % 4 == 3 {
        (Discriminant(-(kernel as i64)), square)
    } else {
        // validity of D forces the remaining square part to be even
        debug_assert_eq!(square % 2, 0, "D = {d}");
        (Discriminant(-4 * kernel as i64), square / 2)
    }
}

/// True iff the conductor of D is 1.
pub fn is_fundamental(d: Discriminant) -> bool {
    decompose(d).1 == 1
}

/// w(D): 6 for D = -3, 4 for D = -4, 2 otherwise.
pub fn unit_count(d: Discriminant) -> u8 {
    match d.get() {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// All primitive reduced forms of discriminant D, in lexicographic (a, b, c)
/// order. The loop bound a <= sqrt(|D|/3) follows from |b| <= a <= c.
pub fn reduced_forms(d: Discriminant) -> Vec<ReducedForm> {
    let dd = d.get();
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -dd {
        for b in -a..=a {
            let num = b * b - dd;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            if gcd_u64(gcd_u64(a as u64, b.unsigned_abs()), c as u64) == 1 {
                out.push(ReducedForm { a, b, c });
            }
        }
        a += 1;
    }
    out.sort_unstable();
    out
}

fn memo() -> &'static RwLock<HashMap<i64, u64>> {
    static MEMO: OnceLock<RwLock<HashMap<i64, u64>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// h(D): the number of primitive reduced forms of discriminant D.
/// Memoized process-wide; concurrent readers race only to insert the same
/// value, so results are deterministic regardless of interleaving.
pub fn class_number(d: Discriminant) -> u64 {
    if let Some(&h) = memo().read().expect("memo poisoned").get(&d.get()) {
        return h;
    }
    let h = reduced_forms(d).len() as u64;
    debug_assert!(h >= 1);
    memo().write().expect("memo poisoned").insert(d.get(), h);
    h
}

/// Snapshot of every class number computed so far, sorted by |D|.
pub fn class_number_cache_snapshot() -> Vec<(i64, u64)> {
    let mut entries: Vec<(i64, u64)> = memo()
        .read()
        .expect("memo poisoned")
        .iter()
        .map(|(&d, &h)| (d, h))
        .collect();
    entries.sort_unstable_by_key(|&(d, _)| -d);
    entries
}

/// Seed the memo table, e.g. from a disk cache. Entries are trusted.
pub fn preload_class_numbers(entries: impl IntoIterator<Item = (i64, u64)>) {
    let mut table = memo().write().expect("memo poisoned");
    for (d, h) in entries {
        if Discriminant::new(d).is_ok() && h >= 1 {
            table.insert(d, h);
        }
    }
}

/// Profile of the order of discriminant D.
pub fn order_profile(d: Discriminant) -> OrderProfile {
    let (fundamental, conductor) = decompose(d);
    OrderProfile {
        discriminant: d,
        fundamental,
        conductor,
        unit_count: unit_count(d),
        class_number: class_number(d),
    }
}

/// Exact check of the relative class number formula
/// h(f^2 D0) * [O_K^x : O^x] = h(D0) * f * prod_{p | f} (1 - (D0/p)/p).
pub fn relative_class_number_check(d0: Discriminant, f: u64) -> Result<bool> {
    if !is_fundamental(d0) {
        return Err(Error::NotFundamental(d0.get()));
    }
    if f == 0 {
        return Err(Error::Domain("conductor must be >= 1"));
    }
    let d = Discriminant::new(d0.get() * (f * f) as i64)?;
    let unit_index = (unit_count(d0) / unit_count(d)) as i64;
    let lhs = Ratio::from_integer(class_number(d) as i64 * unit_index);
    let mut rhs = Ratio::from_integer(class_number(d0) as i64 * f as i64);
    for (p, _) in factorize(f) {
        rhs *= Ratio::from_integer(1)
            - Ratio::new(kronecker(d0.get(), p) as i64, p as i64);
    }
    Ok(lhs == rhs)
}

/// The degree ((N-1)/w(K)) * (N - (D0/N)) of the N-torsion ray class
/// extension over the Hilbert class field layer. Evaluated in exact
/// rationals; the product is always integral even when w(K) does not
/// divide N - 1, which the conversion asserts.
pub fn ray_class_degree(d0: Discriminant, n: u64) -> Result<u64> {
    if !is_fundamental(d0) {
        return Err(Error::NotFundamental(d0.get()));
    }
    if n < 3 || !is_prime(n as u128) {
        return Err(Error::NotOddPrime(n));
    }
    let value = Ratio::new(n as i64 - 1, unit_count(d0) as i64)
        * Ratio::from_integer(n as i64 - kronecker(d0.get(), n) as i64);
    if !value.is_integer() {
        return Err(Error::NonIntegral(value.to_string()));
    }
    Ok(value.to_integer() as u64)
}

/// Result of a bounded class-number scan. The listing is complete only for
/// |D| <= scan_bound; it carries the bound so downstream claims stay honest
/// (provably complete lists for a given h are out of scope).
#[derive(Debug, Clone)]
pub struct DiscriminantScan {
    pub h_max: u64,
    pub scan_bound: u64,
    pub profiles: Vec<OrderProfile>,
}

impl DiscriminantScan {
    pub const COMPLETENESS: &'static str = "complete-to-bound";
}

/// All discriminants with |D| <= scan_bound and h(D) <= h_max, ascending |D|.
pub fn discriminants_with_class_number_at_most(h_max: u64, scan_bound: u64) -> DiscriminantScan {
    let profiles = Discriminant::range_to(scan_bound)
        .filter(|&d| class_number(d) <= h_max)
        .map(order_profile)
        .collect();
    DiscriminantScan {
        h_max,
        scan_bound,
        profiles,
    }
}

/// The thirteen discriminants of class number one.
pub const CLASS_NUMBER_ONE: [i64; 13] = [
    -3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163,
];
