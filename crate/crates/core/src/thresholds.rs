//! Gonality-derived degree thresholds for X1(N) and the crossover
//! comparison against least CM degrees.
//!
//! For prime N > 3 the curve X1(N) has only finitely many points of degree
//! below ceil(7(N^2-1)/3200) — improving to ceil((N^2-1)/384) under
//! Selberg's eigenvalue conjecture — and infinitely many points of degree
//! at most floor((N^2-12N+11)/12). The scan compares d_CM(N) against the
//! finite-side threshold, which serves as the provable lower bound for the
//! least degree with infinitely many points.

use num_rational::Ratio;

use crate::arith::{is_prime, sieve_primes};
use crate::degrees::least_cm_degree;
use crate::{Error, Result};

fn check_level(n: u64) -> Result<()> {
    if n <= 3 {
        return Err(Error::LevelTooSmall(n, 3));
    }
    if !is_prime(n as u128) {
        return Err(Error::NotPrime(n));
    }
    Ok(())
}

/// Index (N^2-1)/2 of the level subgroup in the full modular group.
pub fn psl2_index(n: u64) -> Result<u64> {
    check_level(n)?;
    Ok((n * n - 1) / 2)
}

/// Degrees strictly below this ceiling see only finitely many points:
/// ceil(7(N^2-1)/3200), or ceil((N^2-1)/384) assuming Selberg's eigenvalue
/// conjecture.
pub fn finite_degree_threshold(n: u64, conditional: bool) -> Result<u64> {
    check_level(n)?;
    let idx2 = n * n - 1;
    Ok(if conditional {
        idx2.div_ceil(384)
    } else {
        (7 * idx2).div_ceil(3200)
    })
}

/// Degrees up to floor((N^2-12N+11)/12) carry infinitely many points
/// (reported as 0 when the quantity is negative).
pub fn infinite_degree_bound(n: u64) -> Result<u64> {
    check_level(n)?;
    let num = n as i64 * n as i64 - 12 * n as i64 + 11;
    Ok(if num < 0 { 0 } else { (num / 12) as u64 })
}

/// Exact gonality lower bounds: 7(N^2-1)/1600 unconditionally and
/// (N^2-1)/192 under Selberg's eigenvalue conjecture.
pub fn gonality_bounds(n: u64) -> Result<(Ratio<u64>, Ratio<u64>)> {
    check_level(n)?;
    let idx2 = n * n - 1;
    Ok((Ratio::new(7 * idx2, 1600), Ratio::new(idx2, 192)))
}

/// Outcome of comparing d_CM(N) with the finite-side threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CmBelowThreshold,
    CmAboveThreshold,
    /// exact equality: the threshold speaks of degrees strictly below it
    Indeterminate,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::CmBelowThreshold => "cm-below-threshold",
            Verdict::CmAboveThreshold => "cm-above-threshold",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// Per-level threshold data and the CM comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdReport {
    pub n: u64,
    pub index: u64,
    pub gonality_lower_unconditional: Ratio<u64>,
    pub gonality_lower_conditional: Ratio<u64>,
    pub finite_threshold_unconditional: u64,
    pub finite_threshold_conditional: u64,
    pub infinite_bound: u64,
    pub d_cm: u64,
    pub verdict: Verdict,
}

/// Build the report for one prime level, with the verdict taken against
/// the unconditional or the Selberg-conditional threshold.
pub fn threshold_report(
    n: u64,
    scan_bound: Option<u64>,
    conditional: bool,
) -> Result<ThresholdReport> {
    check_level(n)?;
    let (gon_u, gon_c) = gonality_bounds(n)?;
    let fin_u = finite_degree_threshold(n, false)?;
    let fin_c = finite_degree_threshold(n, true)?;
    let d_cm = least_cm_degree(n, scan_bound)?.d_cm;
    let threshold = if conditional { fin_c } else { fin_u };
    let verdict = match d_cm.cmp(&threshold) {
        std::cmp::Ordering::Less => Verdict::CmBelowThreshold,
        std::cmp::Ordering::Greater => Verdict::CmAboveThreshold,
        std::cmp::Ordering::Equal => Verdict::Indeterminate,
    };
    Ok(ThresholdReport {
        n,
        index: psl2_index(n)?,
        gonality_lower_unconditional: gon_u,
        gonality_lower_conditional: gon_c,
        finite_threshold_unconditional: fin_u,
        finite_threshold_conditional: fin_c,
        infinite_bound: infinite_degree_bound(n)?,
        d_cm,
        verdict,
    })
}

/// One report per prime in [5, n_max], plus the largest level in the
/// window still at-or-above the threshold.
#[derive(Debug, Clone)]
pub struct CrossoverScan {
    pub reports: Vec<ThresholdReport>,
    /// largest N in the window with verdict cm-above-threshold, i.e. the
    /// crossover candidate as seen from this window
    pub last_above: Option<u64>,
    pub conditional: bool,
}

pub fn crossover_scan(
    n_max: u64,
    scan_bound: Option<u64>,
    conditional: bool,
) -> Result<CrossoverScan> {
    if n_max < 5 {
        return Err(Error::Domain("crossover window must reach at least 5"));
    }
    let mut reports = Vec::new();
    for p in sieve_primes(n_max) {
        if p < 5 {
            continue;
        }
        reports.push(threshold_report(p, scan_bound, conditional)?);
    }
    let last_above = reports
        .iter()
        .rev()
        .find(|r| r.verdict == Verdict::CmAboveThreshold)
        .map(|r| r.n);
    Ok(CrossoverScan {
        reports,
        last_above,
        conditional,
    })
}
