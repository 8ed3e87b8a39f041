//! Exhaustive brute-force oracles.
//!
//! These enumerate every assignment in `{0..=k}^n`, in lexicographic order
//! with vertex 0 most significant, and return the first one the matching
//! verifier accepts. They share no code with the dynamic programs.

use crate::error::{Error, Result};
use crate::graph::{verify_conflict_free, verify_strong_conflict_free, Coloring, Graph, Verdict};

/// Upper bound on `(k + 1)^n` the oracles agree to enumerate.
pub const ORACLE_LIMIT: u128 = 100_000_000;

fn guard(g: &Graph, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut total: u128 = 1;
    for _ in 0..g.n() {
        total = total.saturating_mul(k as u128 + 1);
        if total > ORACLE_LIMIT {
            return Err(Error::InstanceTooLarge(format!(
                "({}+1)^{} assignments exceed the oracle limit of {ORACLE_LIMIT}",
                k,
                g.n()
            )));
        }
    }
    Ok(())
}

fn first_accepted(
    g: &Graph,
    k: usize,
    accept: impl Fn(&Graph, &Coloring) -> Result<Verdict>,
) -> Result<Option<Coloring>> {
    guard(g, k)?;
    let n = g.n();
    let mut colors = vec![0usize; n];
    loop {
        let candidate = Coloring::new(k, colors.clone())?;
        if accept(g, &candidate)?.is_ok() {
            return Ok(Some(candidate));
        }
        // odometer step, last vertex fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            if colors[i] < k {
                colors[i] += 1;
                break;
            }
            colors[i] = 0;
        }
    }
}

pub fn oracle_cfc(g: &Graph, k: usize) -> Result<Option<Coloring>> {
    first_accepted(g, k, verify_conflict_free)
}

pub fn oracle_scfc(g: &Graph, k: usize) -> Result<Option<Coloring>> {
    first_accepted(g, k, verify_strong_conflict_free)
}

/// Smallest `k` in `1..=max_k` for which [`oracle_cfc`] finds a coloring.
pub fn oracle_cf_number(g: &Graph, max_k: usize) -> Result<Option<(usize, Coloring)>> {
    for k in 1..=max_k {
        if let Some(c) = oracle_cfc(g, k)? {
            return Ok(Some((k, c)));
        }
    }
    Ok(None)
}
