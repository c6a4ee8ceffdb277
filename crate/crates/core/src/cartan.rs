//! The subalgebra C_N of 2x2 matrices over Z/NZ induced by an imaginary
//! quadratic order, realized explicitly and checked by exhaustive
//! enumeration: unit groups, orbits on (Z/NZ)^2 \ {0}, normalizers, the
//! conjugation involution, and the small DFT matrix identity.
//!
//! The N-torsion module is modeled abstractly as (Z/NZ)^2 with the order
//! acting through the companion matrix of t^2 - D t + (D^2 - D)/4; no
//! elliptic curves are constructed.

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;

use crate::arith::{is_prime, kronecker, pow_mod};
use crate::quadorders::Discriminant;
use crate::{Error, Result};

/// Exhaustive GL2 enumeration (normalizers, conjugation checks) is capped
/// here; |GL2| is about 9e5 at N = 31 and all paper-scale checks live at
/// N <= 13. Larger N use closed forms only.
pub const ENUMERATION_CAP: u64 = 31;

/// Behavior of the prime N in the order of discriminant D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

impl SplitType {
    /// Classify via the Kronecker symbol (D/N).
    pub fn of(d: Discriminant, n: u64) -> Result<SplitType> {
        if n < 3 || !is_prime(n as u128) {
            return Err(Error::NotOddPrime(n));
        }
        Ok(Self::from_symbol(kronecker(d.get(), n)))
    }

    /// Classification from an already computed symbol (D/N), for scan loops
    /// that validate N once.
    pub(crate) fn from_symbol(symbol: i32) -> SplitType {
        match symbol {
            1 => SplitType::Split,
            -1 => SplitType::Inert,
            _ => SplitType::Ramified,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SplitType::Split => "split",
            SplitType::Inert => "inert",
            SplitType::Ramified => "ramified",
        }
    }
}

impl fmt::Display for SplitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A 2x2 matrix over Z/NZ, entries reduced to [0, N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixModN {
    pub n: u64,
    pub entries: [[u64; 2]; 2],
}

impl MatrixModN {
    pub fn new(n: u64, entries: [[u64; 2]; 2]) -> Self {
        let e = entries.map(|row| row.map(|x| x % n));
        MatrixModN { n, entries: e }
    }

    pub fn identity(n: u64) -> Self {
        MatrixModN {
            n,
            entries: [[1 % n, 0], [0, 1 % n]],
        }
    }

    pub fn scalar(n: u64, a: u64) -> Self {
        MatrixModN {
            n,
            entries: [[a % n, 0], [0, a % n]],
        }
    }

    pub fn mul(&self, rhs: &MatrixModN) -> MatrixModN {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n as u128;
        let a = &self.entries;
        let b = &rhs.entries;
        let mut out = [[0u64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let v = (a[i][0] as u128 * b[0][j] as u128
                    + a[i][1] as u128 * b[1][j] as u128)
                    % n;
                *cell = v as u64;
            }
        }
        MatrixModN {
            n: self.n,
            entries: out,
        }
    }

    pub fn pow(&self, mut k: u64) -> MatrixModN {
        let mut acc = MatrixModN::identity(self.n);
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn det(&self) -> u64 {
        let n = self.n as u128;
        let e = &self.entries;
        let ad = e[0][0] as u128 * e[1][1] as u128 % n;
        let bc = e[0][1] as u128 * e[1][0] as u128 % n;
        ((ad + n - bc) % n) as u64
    }

    /// Inverse via the adjugate; N must be prime. None when singular.
    pub fn inverse(&self) -> Option<MatrixModN> {
        let d = self.det();
        if d == 0 {
            return None;
        }
        let n = self.n;
        let dinv = pow_mod(d, n - 2, n);
        let e = &self.entries;
        let neg = |x: u64| (n - x % n) % n;
        Some(MatrixModN::new(
            n,
            [
                [
                    mulred(dinv, e[1][1], n),
                    mulred(dinv, neg(e[0][1]), n),
                ],
                [
                    mulred(dinv, neg(e[1][0]), n),
                    mulred(dinv, e[0][0], n),
                ],
            ],
        ))
    }

    /// Matrix-vector product on column vectors.
    pub fn apply(&self, v: (u64, u64)) -> (u64, u64) {
        let n = self.n as u128;
        let e = &self.entries;
        (
            ((e[0][0] as u128 * v.0 as u128 + e[0][1] as u128 * v.1 as u128) % n) as u64,
            ((e[1][0] as u128 * v.0 as u128 + e[1][1] as u128 * v.1 as u128) % n) as u64,
        )
    }
}

fn mulred(a: u64, b: u64, n: u64) -> u64 {
    (a as u128 * b as u128 % n as u128) as u64
}

/// The image of the order of discriminant D in 2x2 matrices mod N: the
/// commutative algebra {aI + bT} where T is the companion matrix of
/// t^2 - D t + (D^2 - D)/4.
#[derive(Debug, Clone, Copy)]
pub struct CartanContext {
    pub n: u64,
    pub d: Discriminant,
    pub generator: MatrixModN,
    pub split: SplitType,
}

/// Build the context and verify by enumeration that {aI + bT} really has
/// N^2 distinct elements.
pub fn build_cartan(d: Discriminant, n: u64) -> Result<CartanContext> {
    let split = SplitType::of(d, n)?;
    let dd = d.get() as i128;
    let q = (dd * dd - dd) / 4;
    let n128 = n as i128;
    let q_mod = q.rem_euclid(n128) as u64;
    let d_mod = dd.rem_euclid(n128) as u64;
    let generator = MatrixModN::new(n, [[0, (n - q_mod) % n], [1, d_mod]]);

    // generator satisfies its characteristic polynomial
    let lhs = generator.mul(&generator);
    let want = {
        let dt = MatrixModN::scalar(n, d_mod).mul(&generator);
        let qn = MatrixModN::scalar(n, (n - q_mod) % n);
        MatrixModN::new(
            n,
            [
                [
                    (dt.entries[0][0] + qn.entries[0][0]) % n,
                    (dt.entries[0][1] + qn.entries[0][1]) % n,
                ],
                [
                    (dt.entries[1][0] + qn.entries[1][0]) % n,
                    (dt.entries[1][1] + qn.entries[1][1]) % n,
                ],
            ],
        )
    };
    assert_eq!(lhs, want, "generator violates its characteristic polynomial");

    let ctx = CartanContext {
        n,
        d,
        generator,
        split,
    };
    let distinct: HashSet<[[u64; 2]; 2]> =
        algebra_elements(&ctx).map(|m| m.entries).collect();
    assert_eq!(
        distinct.len(),
        (n * n) as usize,
        "algebra of ({d}, {n}) is not free of rank 2"
    );
    Ok(ctx)
}

/// The N^2 elements aI + bT.
pub fn algebra_elements(ctx: &CartanContext) -> impl Iterator<Item = MatrixModN> + '_ {
    let n = ctx.n;
    let t = ctx.generator;
    (0..n).flat_map(move |a| {
        (0..n).map(move |b| {
            let e = t.entries;
            MatrixModN::new(
                n,
                [
                    [(a + b * e[0][0] % n) % n, b * e[0][1] % n],
                    [b * e[1][0] % n, (a + b * e[1][1] % n) % n],
                ],
            )
        })
    })
}

/// Membership test against the companion structure of the generator.
fn in_algebra(ctx: &CartanContext, m: &MatrixModN) -> bool {
    let n = ctx.n;
    let g = &ctx.generator.entries;
    let b = m.entries[1][0];
    let a = m.entries[0][0];
    m.entries[0][1] == mulred(b, g[0][1], n) && m.entries[1][1] == (a + mulred(b, g[1][1], n)) % n
}

/// Invertible elements of the algebra.
pub fn unit_group(ctx: &CartanContext) -> Vec<MatrixModN> {
    algebra_elements(ctx).filter(|m| m.det() != 0).collect()
}

/// Order of C_N^x by enumeration; asserted against the closed form
/// (N-1)^2, N^2-1 or N^2-N for the split type.
pub fn unit_group_order(ctx: &CartanContext) -> u64 {
    let count = algebra_elements(ctx).filter(|m| m.det() != 0).count() as u64;
    let n = ctx.n;
    let expected = match ctx.split {
        SplitType::Split => (n - 1) * (n - 1),
        SplitType::Inert => n * n - 1,
        SplitType::Ramified => n * n - n,
    };
    assert_eq!(count, expected, "unit count of ({}, {})", ctx.d, ctx.n);
    count
}

/// One orbit: its lexicographically least vector and the sorted members.
pub type Orbit = ((u64, u64), Vec<(u64, u64)>);

/// Orbit partition of (Z/NZ)^2 \ {0} under the unit group, each orbit
/// labeled by its lexicographically least vector. Sorted by label.
pub fn orbit_partition(ctx: &CartanContext) -> Vec<Orbit> {
    let n = ctx.n;
    let units = unit_group(ctx);
    let mut seen = vec![false; (n * n) as usize];
    seen[0] = true;
    let mut orbits = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if seen[(x * n + y) as usize] {
                continue;
            }
            let mut orbit: HashSet<(u64, u64)> = HashSet::new();
            for g in &units {
                orbit.insert(g.apply((x, y)));
            }
            let mut members: Vec<(u64, u64)> = orbit.into_iter().collect();
            members.sort_unstable();
            for &(vx, vy) in &members {
                seen[(vx * n + vy) as usize] = true;
            }
            orbits.push(((x, y), members));
        }
    }
    orbits.sort_unstable_by_key(|(rep, _)| *rep);
    orbits
}

/// Orbit sizes under C_N^x, ascending.
pub fn orbit_sizes(ctx: &CartanContext) -> Vec<u64> {
    let mut sizes: Vec<u64> = orbit_partition(ctx)
        .iter()
        .map(|(_, members)| members.len() as u64)
        .collect();
    sizes.sort_unstable();
    sizes
}

fn check_cap(n: u64) -> Result<()> {
    if n > ENUMERATION_CAP {
        Err(Error::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        })
    } else {
        Ok(())
    }
}

/// Every g in GL2(F_N) normalizing the algebra (equivalently its unit
/// group): brute force over all of GL2, so capped at N <= 31.
pub fn normalizer_elements(ctx: &CartanContext) -> Result<Vec<MatrixModN>> {
    check_cap(ctx.n)?;
    let n = ctx.n;
    let t = ctx.generator;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let g = MatrixModN {
                        n,
                        entries: [[a, b], [c, d]],
                    };
                    let Some(ginv) = g.inverse() else {
                        continue;
                    };
                    let conj = g.mul(&t).mul(&ginv);
                    if in_algebra(ctx, &conj) {
                        out.push(g);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Order of the normalizer of C_N^x in GL2 and its index over the unit
/// group. Split and inert give index 2; ramified gives the full Borel,
/// of order N(N-1)^2.
pub fn normalizer(ctx: &CartanContext) -> Result<(u64, u64)> {
    let order = normalizer_elements(ctx)?.len() as u64;
    let units = unit_group_order(ctx);
    assert_eq!(order % units, 0);
    Ok((order, order / units))
}

/// Orbit structure plus normalizer data in one report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitReport {
    pub orbit_sizes: Vec<u64>,
    pub unit_group_order: u64,
    pub normalizer_order: u64,
    pub normalizer_index: u64,
}

pub fn orbits(ctx: &CartanContext) -> Result<OrbitReport> {
    let sizes = orbit_sizes(ctx);
    debug_assert_eq!(sizes.iter().sum::<u64>(), ctx.n * ctx.n - 1);
    let units = unit_group_order(ctx);
    let (norm_order, norm_index) = normalizer(ctx)?;
    Ok(OrbitReport {
        orbit_sizes: sizes,
        unit_group_order: units,
        normalizer_order: norm_order,
        normalizer_index: norm_index,
    })
}

/// In the split case the two eigenline orbits of size N-1 must fuse into a
/// single orbit of the normalizer.
pub fn normalizer_merges_eigen_orbits(ctx: &CartanContext) -> Result<bool> {
    if ctx.split != SplitType::Split {
        return Err(Error::WrongSplitType {
            expected: "split",
            actual: ctx.split.label(),
        });
    }
    let partition = orbit_partition(ctx);
    let small: Vec<&Vec<(u64, u64)>> = partition
        .iter()
        .filter(|(_, m)| m.len() as u64 == ctx.n - 1)
        .map(|(_, m)| m)
        .collect();
    assert_eq!(small.len(), 2, "split case must have two eigenline orbits");
    let second: HashSet<(u64, u64)> = small[1].iter().copied().collect();
    let rep = small[0][0];
    for g in normalizer_elements(ctx)? {
        if second.contains(&g.apply(rep)) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Verify that some involution in the normalizer, outside the unit group,
/// induces the conjugation involution of the algebra:
/// swap of the two eigenvalues (split), the Frobenius x -> x^N (inert),
/// or negation of the nilpotent part (ramified).
pub fn conjugation_action_check(ctx: &CartanContext) -> Result<bool> {
    check_cap(ctx.n)?;
    let n = ctx.n;
    let t = ctx.generator;
    let d_mod = ctx.d.get().rem_euclid(n as i64) as u64;
    let identity = MatrixModN::identity(n);
    let neg_identity = MatrixModN::scalar(n, n - 1);

    // image of the generator under the involution, per split type
    let target = match ctx.split {
        // eigenvalue swap: T -> tr(T) I - T, with tr(T) = D
        SplitType::Split => sub_from_scalar(d_mod, &t),
        // Frobenius on the degree-2 field extension
        SplitType::Inert => t.pow(n),
        // negate the nilpotent part U = T - (D/2) I
        SplitType::Ramified => {
            let inv2 = n / 2 + 1; // inverse of 2 mod odd n
            let r = mulred(d_mod, inv2, n);
            let u = sub(&t, &MatrixModN::scalar(n, r));
            assert_eq!(
                u.mul(&u),
                MatrixModN::scalar(n, 0),
                "ramified nilpotent part must square to zero"
            );
            // g U g^-1 = -U  <=>  g T g^-1 = 2r I - T
            sub_from_scalar(mulred(2, r, n), &t)
        }
    };

    for g in normalizer_elements(ctx)? {
        if in_algebra(ctx, &g) || g == identity || g == neg_identity {
            continue;
        }
        if g.mul(&g) != identity {
            continue;
        }
        let ginv = g.inverse().expect("normalizer elements are invertible");
        if g.mul(&t).mul(&ginv) == target {
            return Ok(true);
        }
    }
    Ok(false)
}

fn sub(a: &MatrixModN, b: &MatrixModN) -> MatrixModN {
    let n = a.n;
    let mut e = [[0u64; 2]; 2];
    for (i, row) in e.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (a.entries[i][j] + n - b.entries[i][j]) % n;
        }
    }
    MatrixModN { n, entries: e }
}

fn sub_from_scalar(s: u64, m: &MatrixModN) -> MatrixModN {
    sub(&MatrixModN::scalar(m.n, s), m)
}

/// [F(E[N]) : F] divides 2 (N-1)^2, 2 (N^2-1) or 2 (N^2-N) according to the
/// split type; this returns that bound.
pub fn torsion_field_degree_bound(d: Discriminant, n: u64) -> Result<u64> {
    Ok(match SplitType::of(d, n)? {
        SplitType::Split => 2 * (n - 1) * (n - 1),
        SplitType::Inert => 2 * (n * n - 1),
        SplitType::Ramified => 2 * (n * n - n),
    })
}

/// The divisibility unit for the degree [F(P) : F] of a single point of
/// order N, when the Galois image has index I in C_N^x: (N-1)/I if the
/// [split] field contains sqrt(D), 2/I if it does not, (N^2-1)/I in the
/// inert case, (N-1)/I in the ramified case. A rational r "divides" an
/// integer q when q/r is an integer.
pub fn point_degree_divisor(
    d: Discriminant,
    n: u64,
    field_contains_sqrt_d: bool,
    index: u64,
) -> Result<Ratio<u64>> {
    if index == 0 {
        return Err(Error::Domain("index must be >= 1"));
    }
    let numerator = match SplitType::of(d, n)? {
        SplitType::Split if field_contains_sqrt_d => n - 1,
        SplitType::Split => 2,
        SplitType::Inert => n * n - 1,
        SplitType::Ramified => n - 1,
    };
    Ok(Ratio::new(numerator, index))
}

/// For zeta of exact order w mod p, the w x w matrix A[j][k] = zeta^{jk}
/// satisfies A^2 = w P, where P fixes index 0 and sends i to w - i.
pub fn dft_square_check(w: u8, p: u64) -> Result<bool> {
    if !matches!(w, 2 | 4 | 6) {
        return Err(Error::Domain("w must be one of 2, 4, 6"));
    }
    if !is_prime(p as u128) {
        return Err(Error::NotPrime(p));
    }
    let w64 = w as u64;
    if (p - 1) % w64 != 0 {
        return Err(Error::Domain("p must be 1 mod w so an order-w root exists"));
    }
    let zeta = (2..p)
        .map(|g| pow_mod(g, (p - 1) / w64, p))
        .find(|&z| {
            // exact order w: z^w = 1 and z^(w/r) != 1 for prime r | w
            let exact = match w {
                2 => z != 1,
                4 => pow_mod(z, 2, p) != 1,
                _ => pow_mod(z, 2, p) != 1 && pow_mod(z, 3, p) != 1,
            };
            exact && pow_mod(z, w64, p) == 1
        })
        .expect("a cyclic group of order p-1 with w | p-1 has an order-w element");

    let size = w as usize;
    let mut a = vec![vec![0u64; size]; size];
    for (j, row) in a.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            *cell = pow_mod(zeta, (j * k) as u64, p);
        }
    }
    for i in 0..size {
        for j in 0..size {
            let mut acc = 0u128;
            for (&aik, row) in a[i].iter().zip(&a) {
                acc = (acc + aik as u128 * row[j] as u128) % p as u128;
            }
            let expected = if (i + j) % size == 0 { w64 % p } else { 0 };
            if acc as u64 != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
