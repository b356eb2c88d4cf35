//! Multi-threaded drivers over the core kernels.
//!
//! Work is split into contiguous blocks of `[1, x]`; partial sums are exact
//! integers, so the result does not depend on the number of workers.

use std::thread;
use std::time::Instant;

use chowla_core::arith::{SieveTable, DEFAULT_CAPACITY};
use chowla_core::experiments::{block_bounds, correlation_block, ArithFunction, CorrelationReport};

use crate::error::{LabError, LabResult};

/// Environment variable overriding the sieve capacity.
pub const TABLE_LIMIT_ENV: &str = "CHOWLA_LAB_TABLE_LIMIT";

/// Capacity from the flag, then the environment, then the default.
pub fn table_capacity(flag: Option<u64>) -> LabResult<u64> {
    if let Some(limit) = flag {
        return Ok(limit);
    }
    match std::env::var(TABLE_LIMIT_ENV) {
        Ok(text) => text.trim().parse().map_err(|_| {
            LabError::Usage(format!("{TABLE_LIMIT_ENV} must be a positive integer, got {text:?}"))
        }),
        Err(_) => Ok(DEFAULT_CAPACITY),
    }
}

/// Table covering `[1, needed]` (at least `[1, 2]`) within `capacity`.
pub fn build_table(needed: u64, capacity: u64) -> LabResult<SieveTable> {
    Ok(SieveTable::build_with_capacity(needed.max(2), capacity)?)
}

/// `Σ_{n ≤ x} ∏ f(n + h_i)` over `threads` workers, timed.
pub fn correlate(
    table: &SieveTable,
    f: &ArithFunction,
    x: u64,
    shifts: &[i64],
    threads: usize,
) -> LabResult<CorrelationReport> {
    let start = Instant::now();
    if x == 0 {
        return Err(LabError::Usage("--x must be positive".into()));
    }
    // Validate the range once before spawning.
    correlation_block(table, f, shifts, x, x)?;
    let blocks = block_bounds(x, threads);
    let partials: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = blocks
            .iter()
            .map(|&(lo, hi)| s.spawn(move || correlation_block(table, f, shifts, lo, hi)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("correlation worker panicked"))
            .collect()
    });
    let mut raw = 0i64;
    for part in partials {
        raw += part?;
    }
    let mut report = CorrelationReport::from_raw(f.name(), x, shifts.to_vec(), raw);
    report.elapsed = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_count_does_not_change_the_sum() {
        let table = SieveTable::build(100_010).unwrap();
        let f = ArithFunction::Liouville;
        let one = correlate(&table, &f, 100_000, &[0, 1, 5], 1).unwrap();
        for threads in [2, 3, 8, 13] {
            let many = correlate(&table, &f, 100_000, &[0, 1, 5], threads).unwrap();
            assert_eq!(many.raw_sum, one.raw_sum);
        }
    }

    #[test]
    fn range_errors_surface_before_work() {
        let table = SieveTable::build(1000).unwrap();
        let err = correlate(&table, &ArithFunction::Liouville, 1000, &[0, 1], 4).unwrap_err();
        assert_eq!(err.kind(), "range");
    }
}
