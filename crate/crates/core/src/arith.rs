//! Smallest-prime-factor tables and the multiplicative functions derived from them.
//!
//! A single [`SieveTable`] backs λ, μ, Ω, ω, τ_κ and the r-smooth / r-rough
//! split. The table stores one `u32` per integer in `[0, N]` plus the list of
//! primes up to `N`, i.e. roughly `4·N + 4·π(N)` bytes; the default capacity of
//! 10^8 entries costs about 420 MB.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Default upper bound on the table limit.
pub const DEFAULT_CAPACITY: u64 = 100_000_000;

/// Bytes of table storage per integer covered.
pub const BYTES_PER_ENTRY: usize = core::mem::size_of::<u32>();

/// Immutable smallest-prime-factor table on `[2, limit]`.
#[derive(Debug, Clone)]
pub struct SieveTable {
    limit: u32,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SieveTable {
    /// Builds the table with the [`DEFAULT_CAPACITY`] budget.
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_capacity(limit, DEFAULT_CAPACITY)
    }

    /// Builds the table with a linear sieve in `O(limit)` time.
    pub fn build_with_capacity(limit: u64, capacity: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::range("limit", limit, 2, capacity.max(2)));
        }
        if limit > capacity || limit >= u32::MAX as u64 {
            return Err(Error::Capacity(alloc::format!(
                "sieve limit {limit} exceeds capacity {} ({BYTES_PER_ENTRY} bytes per entry)",
                capacity.min(u32::MAX as u64 - 1)
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let s = spf[i];
            for &p in &primes {
                if p > s {
                    break;
                }
                let m = i * p as usize;
                if m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(Self {
            limit: limit as u32,
            spf,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit as u64
    }

    /// All primes `≤ limit`, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes `≤ x` (clamped to the table limit).
    pub fn primes_up_to(&self, x: u64) -> &[u32] {
        let end = self.primes.partition_point(|&p| (p as u64) <= x);
        &self.primes[..end]
    }

    pub(crate) fn check(&self, what: &'static str, n: u64) -> Result<()> {
        if n == 0 || n > self.limit as u64 {
            return Err(Error::range(what, n, 1, self.limit));
        }
        Ok(())
    }

    /// Smallest prime factor of `n ≥ 2`.
    pub fn spf(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit as u64 {
            return Err(Error::range("n", n, 2, self.limit));
        }
        Ok(self.spf[n as usize] as u64)
    }

    #[inline]
    pub(crate) fn spf_unchecked(&self, n: u32) -> u32 {
        self.spf[n as usize]
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        self.check("n", n)?;
        Ok(n >= 2 && self.spf[n as usize] as u64 == n)
    }

    /// Prime-power factorization `n = ∏ p^e`, ascending in `p`.
    pub fn prime_powers(&self, n: u64) -> Result<PrimePowers<'_>> {
        self.check("n", n)?;
        Ok(PrimePowers {
            spf: &self.spf,
            rest: n as u32,
        })
    }

    /// Ω(n): prime factors counted with multiplicity.
    pub fn big_omega(&self, n: u64) -> Result<u32> {
        self.check("n", n)?;
        Ok(self.big_omega_unchecked(n as u32))
    }

    #[inline]
    pub(crate) fn big_omega_unchecked(&self, mut n: u32) -> u32 {
        let mut count = 0;
        while n > 1 {
            n /= self.spf[n as usize];
            count += 1;
        }
        count
    }

    /// ω(n): distinct prime factors.
    pub fn small_omega(&self, n: u64) -> Result<u32> {
        Ok(self.prime_powers(n)?.count() as u32)
    }

    /// Liouville function λ(n) = (−1)^Ω(n).
    pub fn liouville(&self, n: u64) -> Result<i8> {
        self.check("n", n)?;
        Ok(self.liouville_unchecked(n as u32))
    }

    #[inline]
    pub(crate) fn liouville_unchecked(&self, n: u32) -> i8 {
        if self.big_omega_unchecked(n) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Möbius function μ(n).
    pub fn mobius(&self, n: u64) -> Result<i8> {
        self.check("n", n)?;
        Ok(self.mobius_unchecked(n as u32))
    }

    #[inline]
    pub(crate) fn mobius_unchecked(&self, mut n: u32) -> i8 {
        let mut sign = 1i8;
        let mut last = 0u32;
        while n > 1 {
            let p = self.spf[n as usize];
            if p == last {
                return 0;
            }
            sign = -sign;
            last = p;
            n /= p;
        }
        sign
    }

    /// Writes the r-smooth part and r-rough part of `n`.
    pub fn smooth_split(&self, n: u64, r: u64) -> Result<SmoothSplit> {
        self.check("n", n)?;
        if r < 2 {
            return Err(Error::range("r", r, 2, u64::MAX));
        }
        let smooth = self.smooth_part_unchecked(n as u32, r);
        Ok(SmoothSplit {
            n,
            r,
            smooth,
            rough: n / smooth,
        })
    }

    #[inline]
    pub(crate) fn smooth_part_unchecked(&self, mut n: u32, r: u64) -> u64 {
        let mut smooth = 1u64;
        while n > 1 {
            let p = self.spf[n as usize];
            if p as u64 > r {
                break;
            }
            smooth *= p as u64;
            n /= p;
        }
        smooth
    }

    /// Counts `n ≤ x` whose r-smooth part is strictly larger than `r^A`.
    ///
    /// `r^A` is turned into the least integer threshold `T > r^A` once (see
    /// [`least_integer_above_power`]), so the loop itself is integer-only.
    pub fn count_large_smooth(&self, x: u64, r: u64, a: f64) -> Result<u64> {
        self.check("x", x)?;
        if r < 2 {
            return Err(Error::range("r", r, 2, u64::MAX));
        }
        if !(a >= 1.0) || !a.is_finite() {
            return Err(Error::Precondition(alloc::format!("A = {a} must be a finite real >= 1")));
        }
        let threshold = least_integer_above_power(r, a);
        let count = (1..=x as u32)
            .filter(|&n| self.smooth_part_unchecked(n, r) >= threshold)
            .count();
        Ok(count as u64)
    }

    /// τ_κ(n): ordered κ-tuples of positive integers with product `n`.
    pub fn tau_kappa(&self, n: u64, kappa: u32) -> Result<u128> {
        self.check("n", n)?;
        if kappa == 0 {
            return Err(Error::range("kappa", 0, 1, u32::MAX));
        }
        let mut total = 1u128;
        for (_, e) in self.prime_powers(n)? {
            let c = binomial(e as u128 + kappa as u128 - 1, e as u128)?;
            total = total.checked_mul(c).ok_or(Error::Overflow("tau_kappa"))?;
        }
        Ok(total)
    }
}

/// Iterator over `(p, e)` with `p^e ‖ n`.
#[derive(Debug, Clone)]
pub struct PrimePowers<'a> {
    spf: &'a [u32],
    rest: u32,
}

impl Iterator for PrimePowers<'_> {
    type Item = (u64, u32);

    fn next(&mut self) -> Option<Self::Item> {
        if self.rest <= 1 {
            return None;
        }
        let p = self.spf[self.rest as usize];
        let mut e = 0;
        while self.rest % p == 0 {
            self.rest /= p;
            e += 1;
        }
        Some((p as u64, e))
    }
}

/// `n = smooth · rough` with every prime of `smooth` at most `r` and every
/// prime of `rough` above `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothSplit {
    pub n: u64,
    pub r: u64,
    pub smooth: u64,
    pub rough: u64,
}

/// Relative width of the band in which `ln s` and `A·ln r` are considered tied.
pub const LOG_GUARD_BAND: f64 = 1e-12;

/// Least integer `T` with `T > r^a`, saturating at `u64::MAX`.
///
/// Integral `a` is handled with exact integer powers. Otherwise the logarithm
/// locates `T`; a candidate whose logarithm falls inside [`LOG_GUARD_BAND`] is
/// settled exactly when `a = num/den` with `den ≤ 64` and both powers fit in
/// `u128`, and is treated as equal to `r^a` (so not above it) otherwise.
pub fn least_integer_above_power(r: u64, a: f64) -> u64 {
    if a == libm::trunc(a) && a <= 64.0 {
        return match r.checked_pow(a as u32) {
            Some(v) => v.saturating_add(1),
            None => u64::MAX,
        };
    }
    let target = a * libm::log(r as f64);
    if target >= 44.0 {
        // e^44 > 2^63
        return u64::MAX;
    }
    let above = |s: u64| -> bool {
        let diff = libm::log(s as f64) - target;
        let band = LOG_GUARD_BAND * libm::fabs(target);
        if diff > band {
            true
        } else if diff < -band {
            false
        } else {
            exact_power_compare(s, r, a).unwrap_or(false)
        }
    };
    let guess = libm::floor(libm::exp(target)) as u64;
    let mut s = guess.saturating_sub(2).max(1);
    while !above(s) {
        s += 1;
    }
    s
}

/// Returns `Some(s > r^a)` when `a` is a rational with a small denominator and
/// the comparison `s^den > r^num` fits in `u128`.
fn exact_power_compare(s: u64, r: u64, a: f64) -> Option<bool> {
    for den in 1u32..=64 {
        let num = a * den as f64;
        if num != libm::trunc(num) || num > u32::MAX as f64 {
            continue;
        }
        let lhs = (s as u128).checked_pow(den)?;
        let rhs = (r as u128).checked_pow(num as u32)?;
        return Some(lhs > rhs);
    }
    None
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Non-negative gcd of signed integers.
pub fn gcd_i128(a: i128, b: i128) -> i128 {
    gcd_u128(a.unsigned_abs(), b.unsigned_abs()) as i128
}

/// Extended Euclid: returns `(g, x, y)` with `a·x + b·y = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Least common multiple of a non-empty list of positive integers.
pub fn lcm_many(values: &[u64]) -> Result<u128> {
    if values.is_empty() {
        return Err(Error::InvalidInput("lcm of an empty list".into()));
    }
    let mut acc = 1u128;
    for &v in values {
        if v == 0 {
            return Err(Error::InvalidInput("lcm arguments must be positive".into()));
        }
        let g = gcd_u128(acc, v as u128);
        acc = (acc / g)
            .checked_mul(v as u128)
            .ok_or(Error::Overflow("lcm_many"))?;
    }
    Ok(acc)
}

/// Numerator and denominator of the lower bound
/// `lcm(a_0..a_k) ≥ (∏ a_i) / ∏_{i<j} gcd(a_i, a_j)`.
pub fn lcm_pairwise_bound(values: &[u64]) -> Result<(u128, u128)> {
    let mut product = 1u128;
    let mut gcds = 1u128;
    for (i, &a) in values.iter().enumerate() {
        product = product
            .checked_mul(a as u128)
            .ok_or(Error::Overflow("lcm_pairwise_bound"))?;
        for &b in &values[i + 1..] {
            gcds = gcds
                .checked_mul(gcd_u64(a, b) as u128)
                .ok_or(Error::Overflow("lcm_pairwise_bound"))?;
        }
    }
    Ok((product, gcds))
}

/// Binomial coefficient with checked arithmetic.
pub fn binomial(n: u128, k: u128) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut c = 1u128;
    for i in 1..=k {
        // c·(n−k+i) is divisible by i after the multiplication.
        c = c
            .checked_mul(n - k + i)
            .ok_or(Error::Overflow("binomial"))?
            / i;
    }
    Ok(c)
}

/// Deterministic primality by trial division, for values beyond a table.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Factorization by trial division, ascending primes.
pub fn factor_trial(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Reduces `a` into `[0, m)`.
#[inline]
pub fn rem_euclid_u64(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}
