//! Correlation sums of λ, μ and λ_r, the parameter formulas tying `r`, `u`
//! and `A_x` to the scale η, and the moment (Chebyshev) experiment.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use crate::arith::{binomial, SieveTable};
use crate::characters::{check_fundamental_discriminant, RealCharacter};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Default `C` in `u = C·α`.
pub const DEFAULT_LEVEL_CONSTANT: f64 = 0.1;

/// `C` in the analytic tail bound `exp(−ε²m/C)`.
pub const TAIL_CONSTANT: f64 = 8.0 * core::f64::consts::E;

/// Largest `m^k` for which tuples are enumerated one by one.
pub const TUPLE_ENUMERATION_LIMIT: u128 = 100_000_000;

/// Largest number of odd-multiplicity classes visited by the Chebyshev majorant.
pub const MAX_TUPLE_CLASSES: u128 = 2_000_000;

/// Cap on `classes × ⌈x/64⌉` word operations for the Chebyshev majorant.
pub const MAX_CLASS_WORK: u128 = 20_000_000_000;

/// `α = (log log η)^{1/2} (log η)^{1/12}` for `η > e^e`.
pub fn alpha_from_eta(eta: f64) -> Result<f64> {
    let floor = libm::exp(core::f64::consts::E);
    if !(eta.is_finite() && eta > floor) {
        return Err(Error::InvalidInput(format!(
            "eta proxy must exceed e^e = {floor:.4}, got {eta}"
        )));
    }
    let log_eta = libm::log(eta);
    Ok(libm::sqrt(libm::log(log_eta)) * libm::pow(log_eta, 1.0 / 12.0))
}

/// How the smoothness cutoff `r` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    /// `r = round(x^{1/α(η)})`.
    EtaProxy(f64),
    /// `r` given directly; `α = log x / log r`.
    Direct(u64),
}

/// Quantities derived from `(x, q, scale, C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub alpha: f64,
    pub r: u64,
    /// Level of distribution `u = C·α`.
    pub u: f64,
    /// `A_x = u / (number of shifts)`.
    pub a_x: f64,
    /// `[q^10, q^{(log log η)/3}]`; only defined through an η proxy.
    pub window: Option<(f64, f64)>,
    pub in_window: Option<bool>,
    /// `1/α`, the decay shape of the conditional bound (constant omitted).
    pub reference_bound: f64,
}

/// Parameters of one correlation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    x: u64,
    shifts: Vec<i64>,
    discriminant: i64,
    scale: Scale,
    level_constant: f64,
    params: DerivedParams,
}

impl ExperimentConfig {
    pub fn new(x: u64, shifts: Vec<i64>, discriminant: i64, scale: Scale) -> Result<Self> {
        Self::with_level_constant(x, shifts, discriminant, scale, DEFAULT_LEVEL_CONSTANT)
    }

    pub fn with_level_constant(
        x: u64,
        shifts: Vec<i64>,
        discriminant: i64,
        scale: Scale,
        level_constant: f64,
    ) -> Result<Self> {
        validate_shifts(&shifts)?;
        if let Some(&h) = shifts.iter().find(|&&h| h < 0) {
            return Err(Error::InvalidInput(format!("shifts must be non-negative, got {h}")));
        }
        check_fundamental_discriminant(discriminant)?;
        if !(level_constant.is_finite() && level_constant > 0.0) {
            return Err(Error::InvalidInput(format!(
                "level constant must be positive, got {level_constant}"
            )));
        }
        let params = derive(x, shifts.len(), discriminant.unsigned_abs(), scale, level_constant)?;
        Ok(Self {
            x,
            shifts,
            discriminant,
            scale,
            level_constant,
            params,
        })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn modulus(&self) -> u64 {
        self.discriminant.unsigned_abs()
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn level_constant(&self) -> f64 {
        self.level_constant
    }

    pub fn params(&self) -> &DerivedParams {
        &self.params
    }

    pub fn character(&self) -> RealCharacter {
        RealCharacter::from_discriminant(self.discriminant)
            .expect("validated discriminant")
            .tabulated()
    }
}

/// Shifts must be non-empty and pairwise distinct.
pub fn validate_shifts(shifts: &[i64]) -> Result<()> {
    if shifts.is_empty() {
        return Err(Error::InvalidInput("at least one shift is required".into()));
    }
    for (i, h) in shifts.iter().enumerate() {
        if shifts[i + 1..].contains(h) {
            return Err(Error::InvalidInput("shifts must be distinct".into()));
        }
    }
    Ok(())
}

fn derive(x: u64, forms: usize, q: u64, scale: Scale, c: f64) -> Result<DerivedParams> {
    let log_x = libm::log(x as f64);
    let (alpha, r, window) = match scale {
        Scale::EtaProxy(eta) => {
            let alpha = alpha_from_eta(eta)?;
            let r = libm::round(libm::exp(log_x / alpha)) as u64;
            let log_q = libm::log(q as f64);
            let top = libm::log(libm::log(eta)) / 3.0;
            (alpha, r, Some((10.0 * log_q, top * log_q)))
        }
        Scale::Direct(r) => (log_x / libm::log(r as f64), r, None),
    };
    if r < 2 || r >= x {
        return Err(Error::InvalidInput(format!(
            "derived r = {r} must satisfy 2 <= r < x = {x}"
        )));
    }
    let u = c * alpha;
    Ok(DerivedParams {
        alpha,
        r,
        u,
        a_x: u / forms as f64,
        window: window.map(|(lo, hi)| (libm::exp(lo), libm::exp(hi))),
        in_window: window.map(|(lo, hi)| lo <= log_x && log_x <= hi),
        reference_bound: 1.0 / alpha,
    })
}

/// λ_r(n): λ on primes `≤ r`, χ on primes `> r`, extended completely multiplicatively.
pub fn lambda_r_eval(table: &SieveTable, chi: &RealCharacter, r: u64, n: u64) -> Result<i8> {
    table.check("n", n)?;
    Ok(lambda_r_unchecked(table, chi, r, n as u32))
}

#[inline]
fn lambda_r_unchecked(table: &SieveTable, chi: &RealCharacter, r: u64, mut n: u32) -> i8 {
    let q = chi.modulus();
    let mut value = 1i8;
    while n > 1 {
        let p = table.spf_unchecked(n);
        n /= p;
        if p as u64 <= r {
            value = -value;
        } else {
            let c = chi.eval_residue(p as u64 % q);
            if c == 0 {
                return 0;
            }
            value *= c;
        }
    }
    value
}

/// Function whose shifted products are summed.
#[derive(Debug, Clone, PartialEq)]
pub enum ArithFunction {
    Liouville,
    Mobius,
    LambdaR { chi: RealCharacter, r: u64 },
}

impl ArithFunction {
    pub fn name(&self) -> &'static str {
        match self {
            ArithFunction::Liouville => "liouville",
            ArithFunction::Mobius => "mobius",
            ArithFunction::LambdaR { .. } => "lambda_r",
        }
    }

    /// `f(n)`, with `f(n) = 0` for `n ≤ 0`.
    pub fn eval(&self, table: &SieveTable, n: i64) -> Result<i8> {
        if n <= 0 {
            return Ok(0);
        }
        table.check("n", n as u64)?;
        Ok(self.eval_unchecked(table, n as u32))
    }

    #[inline]
    fn eval_unchecked(&self, table: &SieveTable, n: u32) -> i8 {
        match self {
            ArithFunction::Liouville => table.liouville_unchecked(n),
            ArithFunction::Mobius => table.mobius_unchecked(n),
            ArithFunction::LambdaR { chi, r } => lambda_r_unchecked(table, chi, *r, n),
        }
    }

    /// `f(start), f(start + 1), .., f(end)` with zeros for non-positive arguments.
    fn values(&self, table: &SieveTable, start: i64, end: i64) -> Vec<i8> {
        (start..=end)
            .map(|n| if n <= 0 { 0 } else { self.eval_unchecked(table, n as u32) })
            .collect()
    }
}

fn shift_range(shifts: &[i64]) -> (i64, i64) {
    let lo = shifts.iter().copied().min().unwrap_or(0);
    let hi = shifts.iter().copied().max().unwrap_or(0);
    (lo, hi)
}

fn check_top(table: &SieveTable, hi: u64, shifts: &[i64]) -> Result<()> {
    let top = hi as i128 + shift_range(shifts).1 as i128;
    if top > table.limit() as i128 {
        return Err(Error::range("n + max shift", top, 1, table.limit()));
    }
    Ok(())
}

/// `Σ_{lo ≤ n ≤ hi} ∏_i f(n + h_i)` exactly.
pub fn correlation_block(
    table: &SieveTable,
    f: &ArithFunction,
    shifts: &[i64],
    lo: u64,
    hi: u64,
) -> Result<i64> {
    if shifts.is_empty() {
        return Err(Error::InvalidInput("at least one shift is required".into()));
    }
    if lo == 0 {
        return Err(Error::range("block start", 0, 1, table.limit()));
    }
    if lo > hi {
        return Ok(0);
    }
    check_top(table, hi, shifts)?;
    let (h_lo, h_hi) = shift_range(shifts);
    let start = lo as i64 + h_lo;
    let values = f.values(table, start, hi as i64 + h_hi);
    let offsets: Vec<usize> = shifts.iter().map(|&h| (h - h_lo) as usize).collect();
    let mut sum = 0i64;
    for base in 0..=(hi - lo) as usize {
        let mut prod = 1i8;
        for &o in &offsets {
            prod *= values[base + o];
        }
        sum += prod as i64;
    }
    Ok(sum)
}

/// Splits `[1, x]` into at most `parts` contiguous, non-empty, ascending blocks.
pub fn block_bounds(x: u64, parts: usize) -> Vec<(u64, u64)> {
    let parts = (parts.max(1) as u64).min(x.max(1));
    let mut out = Vec::with_capacity(parts as usize);
    let mut lo = 1;
    for i in 0..parts {
        let len = x / parts + u64::from(i < x % parts);
        if len == 0 {
            break;
        }
        out.push((lo, lo + len - 1));
        lo += len;
    }
    out
}

/// Outcome of one correlation sum.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub function: &'static str,
    pub x: u64,
    pub shifts: Vec<i64>,
    pub raw_sum: i64,
    /// `raw_sum / x`.
    pub value: f64,
    /// Wall-clock time; zero unless filled in by a timed driver.
    pub elapsed: Duration,
}

impl CorrelationReport {
    pub fn from_raw(function: &'static str, x: u64, shifts: Vec<i64>, raw_sum: i64) -> Self {
        Self {
            function,
            x,
            shifts,
            raw_sum,
            value: raw_sum as f64 / x as f64,
            elapsed: Duration::ZERO,
        }
    }
}

/// `Σ_{n ≤ x} ∏_i f(n + h_i)` on a single thread.
pub fn chowla_correlation(
    table: &SieveTable,
    f: &ArithFunction,
    x: u64,
    shifts: &[i64],
) -> Result<CorrelationReport> {
    if x == 0 {
        return Err(Error::range("x", 0, 1, table.limit()));
    }
    let raw = correlation_block(table, f, shifts, 1, x)?;
    Ok(CorrelationReport::from_raw(f.name(), x, shifts.to_vec(), raw))
}

/// Both sides of `|Σ (λ(n;k) − λ_r(n;k))| ≤ k Σ |λ(n) − λ_r(n)| + O(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceReport {
    pub x: u64,
    pub r: u64,
    pub shifts: Vec<i64>,
    /// `|Σ_{n ≤ x} (∏ λ(n+h_i) − ∏ λ_r(n+h_i))|`.
    pub lhs: u64,
    /// `Σ_{n ≤ x} |λ(n) − λ_r(n)|`.
    pub termwise: u64,
    /// `k · termwise + k · max |h_i|`.
    pub majorant: u64,
    /// `k · termwise + 2 Σ |h_i|`, which always dominates `lhs`.
    pub rigorous_majorant: u64,
}

impl DifferenceReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.majorant
    }
}

pub fn correlation_difference(
    table: &SieveTable,
    chi: &RealCharacter,
    r: u64,
    x: u64,
    shifts: &[i64],
) -> Result<DifferenceReport> {
    if x == 0 {
        return Err(Error::range("x", 0, 1, table.limit()));
    }
    if shifts.is_empty() {
        return Err(Error::InvalidInput("at least one shift is required".into()));
    }
    check_top(table, x, shifts)?;
    let (h_lo, h_hi) = shift_range(shifts);
    let start = 1 + h_lo.min(0);
    let end = x as i64 + h_hi.max(0);
    let lam = ArithFunction::Liouville.values(table, start, end);
    let approx = ArithFunction::LambdaR { chi: chi.clone(), r }.values(table, start, end);
    let at = |v: &[i8], n: i64| v[(n - start) as usize] as i64;
    let mut diff = 0i64;
    let mut termwise = 0u64;
    for n in 1..=x as i64 {
        let (mut a, mut b) = (1i64, 1i64);
        for &h in shifts {
            a *= at(&lam, n + h);
            b *= at(&approx, n + h);
        }
        diff += a - b;
        termwise += (at(&lam, n) - at(&approx, n)).unsigned_abs();
    }
    let k = shifts.len() as u64;
    let max_h = shifts.iter().map(|h| h.unsigned_abs()).max().unwrap_or(0);
    let sum_h: u64 = shifts.iter().map(|h| h.unsigned_abs()).sum();
    Ok(DifferenceReport {
        x,
        r,
        shifts: shifts.to_vec(),
        lhs: diff.unsigned_abs(),
        termwise,
        majorant: k * termwise + k * max_h,
        rigorous_majorant: k * termwise + 2 * sum_h,
    })
}

/// Tuples in `[1, m]^k` in which every value occurs an even number of times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TupleCount {
    pub m: u64,
    pub k: u32,
    /// `None` when `m^k` exceeds [`TUPLE_ENUMERATION_LIMIT`].
    pub exact: Option<u128>,
    /// `2^k m^{k/2} k^{k/2}`.
    pub bound: f64,
}

impl TupleCount {
    pub fn within_bound(&self) -> Option<bool> {
        self.exact.map(|e| e as f64 <= self.bound)
    }
}

fn check_even_order(k: u32) -> Result<()> {
    if k == 0 || k % 2 != 0 {
        return Err(Error::InvalidInput(format!("moment order k must be even and positive, got {k}")));
    }
    Ok(())
}

pub fn even_multiplicity_tuple_count(m: u64, k: u32) -> Result<TupleCount> {
    check_even_order(k)?;
    if m == 0 {
        return Err(Error::range("m", 0, 1, u64::MAX));
    }
    let half = k as f64 / 2.0;
    let bound = libm::pow(2.0, k as f64) * libm::pow(m as f64, half) * libm::pow(k as f64, half);
    let feasible = (m as u128)
        .checked_pow(k)
        .is_some_and(|total| total <= TUPLE_ENUMERATION_LIMIT);
    let exact = feasible.then(|| {
        let factorials: Vec<u128> = (0..=k as u128)
            .scan(1u128, |acc, i| {
                if i > 0 {
                    *acc *= i;
                }
                Some(*acc)
            })
            .collect();
        let mut odd = vec![false; m as usize];
        count_even_completions(k as usize, &mut odd, 0, &factorials)
    });
    Ok(TupleCount { m, k, exact, bound })
}

/// Extends a partial tuple position by position. Once the remaining length
/// equals the number of odd values, the tail must be a permutation of them.
fn count_even_completions(left: usize, odd: &mut [bool], odd_count: usize, fact: &[u128]) -> u128 {
    if odd_count > left {
        return 0;
    }
    if odd_count == left {
        return fact[left];
    }
    let mut total = 0;
    for v in 0..odd.len() {
        odd[v] = !odd[v];
        let next = if odd[v] { odd_count + 1 } else { odd_count - 1 };
        total += count_even_completions(left - 1, odd, next, fact);
        odd[v] = !odd[v];
    }
    total
}

/// Number of tuples in `[1, m]^k` whose odd-multiplicity values form one fixed set of size `s`.
pub fn tuple_class_weight(m: u64, k: u32, s: u64) -> Result<u128> {
    if s > m {
        return Ok(0);
    }
    let weights = vec![1.0; m as usize];
    let odd: Vec<bool> = (0..m).map(|i| i < s).collect();
    let exact = class_weight_exact(k as usize, &odd)?;
    debug_assert_eq!(exact as f64, class_weight(k as usize, &odd, &weights));
    Ok(exact)
}

fn class_weight_exact(k: usize, odd: &[bool]) -> Result<u128> {
    let mut dp = vec![0u128; k + 1];
    dp[0] = 1;
    for &is_odd in odd {
        let mut next = vec![0u128; k + 1];
        for t in 0..=k {
            let mut acc = 0u128;
            let first = usize::from(is_odd);
            for e in (first..=t).step_by(2) {
                let ways = binomial(t as u128, e as u128)?
                    .checked_mul(dp[t - e])
                    .ok_or(Error::Overflow("tuple class weight"))?;
                acc = acc.checked_add(ways).ok_or(Error::Overflow("tuple class weight"))?;
            }
            next[t] = acc;
        }
        dp = next;
    }
    Ok(dp[k])
}

/// `Σ ∏_j w_{i_j}` over tuples of length `k` whose odd-multiplicity set is marked by `odd`.
fn class_weight(k: usize, odd: &[bool], weights: &[f64]) -> f64 {
    let mut dp = vec![0.0f64; k + 1];
    dp[0] = 1.0;
    let mut next = vec![0.0f64; k + 1];
    let mut choose = vec![vec![0.0f64; k + 1]; k + 1];
    for t in 0..=k {
        choose[t][0] = 1.0;
        for e in 1..=t {
            choose[t][e] = choose[t - 1][e - 1] + if e < t { choose[t - 1][e] } else { 0.0 };
        }
    }
    for (&is_odd, &w) in odd.iter().zip(weights) {
        for t in 0..=k {
            let mut acc = 0.0;
            let mut e = usize::from(is_odd);
            while e <= t {
                acc += choose[t][e] * libm::pow(w, e as f64) * dp[t - e];
                e += 2;
            }
            next[t] = acc;
        }
        core::mem::swap(&mut dp, &mut next);
    }
    dp[k]
}

/// The even integer nearest `ε²m/(4e)`, kept within `[2, max(2, m)]`.
pub fn default_moment_order(m: u64, eps: f64) -> u32 {
    let target = eps * eps * m as f64 / (4.0 * core::f64::consts::E);
    let even = 2.0 * libm::round(target / 2.0);
    let cap = (m - m % 2).max(2) as f64;
    even.clamp(2.0, cap) as u32
}

/// Threshold count, exact moment and its majorants for `(1/m) Σ c_i λ(n+i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub x: u64,
    pub m: u64,
    pub k: u32,
    pub eps: f64,
    /// `t = ε·m`, used for both the count and the majorant.
    pub threshold: f64,
    /// `#{n ≤ x : |Σ c_i λ(n+i)| ≥ t}`.
    pub count: u64,
    pub fraction: f64,
    /// `Σ_{n ≤ x} |Σ c_i λ(n+i)|^k`.
    pub moment: f64,
    /// `Σ_{tuples} ∏ c · Σ_n ∏ λ`, equal to `moment` up to rounding.
    pub signed_tuple_sum: Option<f64>,
    /// `Σ_{tuples} |∏ c · Σ_n ∏ λ|`.
    pub tuple_sum: Option<f64>,
    /// `tuple_sum / (x t^k)`, a majorant for `fraction`.
    pub chebyshev: Option<f64>,
    /// `exp(−ε² m / (8e))`.
    pub analytic: f64,
}

impl MomentReport {
    /// `count · t^k ≤ moment ≤ tuple_sum`, when the majorant was computed.
    pub fn chain_holds(&self) -> Option<bool> {
        let scaled = self.count as f64 * libm::pow(self.threshold, self.k as f64);
        self.tuple_sum
            .map(|tuple_sum| scaled <= self.moment * (1.0 + 1e-12) && self.moment <= tuple_sum * (1.0 + 1e-12))
    }
}

pub fn moment_tail_experiment(
    table: &SieveTable,
    x: u64,
    m: u64,
    k: Option<u32>,
    eps: f64,
    coeffs: &[f64],
) -> Result<MomentReport> {
    if x == 0 {
        return Err(Error::range("x", 0, 1, table.limit()));
    }
    if m == 0 {
        return Err(Error::range("m", 0, 1, table.limit()));
    }
    if coeffs.len() as u64 != m {
        return Err(Error::InvalidInput(format!(
            "expected {m} coefficients, got {}",
            coeffs.len()
        )));
    }
    if let Some(c) = coeffs.iter().find(|c| !(c.abs() <= 1.0)) {
        return Err(Error::InvalidInput(format!("coefficients must satisfy |c| <= 1, got {c}")));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    let k = k.unwrap_or_else(|| default_moment_order(m, eps));
    check_even_order(k)?;
    let top = x as u128 + m as u128;
    if top > table.limit() as u128 {
        return Err(Error::range("x + m", top as i128, 1, table.limit()));
    }
    // lam[j] = λ(j + 2), covering n + i for 1 ≤ n ≤ x, 1 ≤ i ≤ m.
    let lam: Vec<i8> = (2..=top as u32).map(|n| table.liouville_unchecked(n)).collect();
    let threshold = eps * m as f64;
    let mut count = 0u64;
    let mut moment = CompensatedSum::new();
    for n in 1..=x as usize {
        let s: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * lam[n + i - 1] as f64)
            .sum();
        if s.abs() >= threshold {
            count += 1;
        }
        moment.add(libm::pow(s.abs(), k as f64));
    }
    let sums = tuple_sums(&lam, x, m, k, coeffs)?;
    let chebyshev = sums.map(|(abs, _)| abs / (x as f64 * libm::pow(threshold, k as f64)));
    Ok(MomentReport {
        x,
        m,
        k,
        eps,
        threshold,
        count,
        fraction: count as f64 / x as f64,
        moment: moment.value(),
        signed_tuple_sum: sums.map(|(_, signed)| signed),
        tuple_sum: sums.map(|(abs, _)| abs),
        chebyshev,
        analytic: libm::exp(-eps * eps * m as f64 / TAIL_CONSTANT),
    })
}

/// `(Σ |w(S) corr(S)|, Σ w(S) corr(S))` over odd-multiplicity sets `S`, or
/// `None` when the class count or word budget is exceeded.
fn tuple_sums(lam: &[i8], x: u64, m: u64, k: u32, coeffs: &[f64]) -> Result<Option<(f64, f64)>> {
    let mut nodes = 0u128;
    for s in 0..=k.min(m as u32) {
        nodes += binomial(m as u128, s as u128)?;
    }
    let words = x.div_ceil(64) as usize;
    if nodes > MAX_TUPLE_CLASSES || nodes * words as u128 > MAX_CLASS_WORK {
        return Ok(None);
    }
    // bits[i] marks n ∈ [1, x] with λ(n + i + 1) = −1.
    let bits: Vec<Vec<u64>> = (0..m as usize)
        .map(|i| {
            let mut b = vec![0u64; words];
            for n in 0..x as usize {
                if lam[n + i] < 0 {
                    b[n / 64] |= 1 << (n % 64);
                }
            }
            b
        })
        .collect();
    let mut walk = ClassWalk {
        x,
        k: k as usize,
        bits: &bits,
        abs_weights: coeffs.iter().map(|c| c.abs()).collect(),
        weights: coeffs.to_vec(),
        odd: vec![false; m as usize],
        scratch: vec![vec![0u64; words]; k as usize + 1],
        abs_total: CompensatedSum::new(),
        signed_total: CompensatedSum::new(),
    };
    walk.visit(0, 0);
    Ok(Some((walk.abs_total.value(), walk.signed_total.value())))
}

struct ClassWalk<'a> {
    x: u64,
    k: usize,
    bits: &'a [Vec<u64>],
    abs_weights: Vec<f64>,
    weights: Vec<f64>,
    odd: Vec<bool>,
    /// `scratch[d]` is the XOR of the bitsets of the current set at depth `d`.
    scratch: Vec<Vec<u64>>,
    abs_total: CompensatedSum,
    signed_total: CompensatedSum,
}

impl ClassWalk<'_> {
    fn visit(&mut self, depth: usize, from: usize) {
        if (self.k - depth) % 2 == 0 {
            let flips: u64 = self.scratch[depth].iter().map(|w| w.count_ones() as u64).sum();
            let corr = self.x as f64 - 2.0 * flips as f64;
            let w_abs = class_weight(self.k, &self.odd, &self.abs_weights);
            let w = class_weight(self.k, &self.odd, &self.weights);
            self.abs_total.add((w_abs * corr).abs());
            self.signed_total.add(w * corr);
        }
        if depth == self.k {
            return;
        }
        for i in from..self.bits.len() {
            let (head, tail) = self.scratch.split_at_mut(depth + 1);
            for ((out, a), b) in tail[0].iter_mut().zip(&head[depth]).zip(&self.bits[i]) {
                *out = a ^ b;
            }
            self.odd[i] = true;
            self.visit(depth + 1, i + 1);
            self.odd[i] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn table() -> SieveTable {
        SieveTable::build(200_000).unwrap()
    }

    #[test]
    fn alpha_and_derived_parameters() {
        assert!(alpha_from_eta(15.0).is_err());
        let eta = 1e6;
        let alpha = alpha_from_eta(eta).unwrap();
        let l = 1e6f64.ln();
        assert!((alpha - l.ln().sqrt() * l.powf(1.0 / 12.0)).abs() < 1e-12);
        let cfg = ExperimentConfig::new(1_000_000, vec![0, 1], -4, Scale::EtaProxy(eta)).unwrap();
        let p = cfg.params();
        assert_eq!(p.r, (1e6f64.powf(1.0 / alpha)).round() as u64);
        assert!((p.u - 0.1 * alpha).abs() < 1e-12);
        assert!((p.a_x * 2.0 - p.u).abs() < 1e-12);
        assert!((p.reference_bound - 1.0 / alpha).abs() < 1e-12);
        // 4^10 ≈ 1.05e6 > 1e6
        assert_eq!(p.in_window, Some(false));

        let cfg = ExperimentConfig::new(10_000, vec![0, 1], -4, Scale::Direct(100)).unwrap();
        assert!((cfg.params().alpha - 2.0).abs() < 1e-12);
        assert_eq!(cfg.params().window, None);
    }

    #[test]
    fn config_rejections() {
        let direct = Scale::Direct(10);
        let err = ExperimentConfig::new(1000, vec![0, 0, 1], -4, direct).unwrap_err();
        assert!(format!("{err}").contains("shifts must be distinct"));
        assert!(ExperimentConfig::new(1000, vec![-1, 1], -4, direct).is_err());
        assert!(ExperimentConfig::new(1000, vec![0, 1], 20, direct).is_err());
        assert!(ExperimentConfig::new(1000, vec![0, 1], -4, Scale::Direct(1000)).is_err());
        assert!(ExperimentConfig::new(1000, vec![0, 1], -4, Scale::Direct(1)).is_err());
    }

    #[test]
    fn lambda_r_examples() {
        let t = table();
        let chi = RealCharacter::from_discriminant(-4).unwrap();
        assert_eq!(lambda_r_eval(&t, &chi, 2, 10).unwrap(), -1);
        let chi3 = RealCharacter::from_discriminant(-3).unwrap();
        assert_eq!(lambda_r_eval(&t, &chi3, 2, 3).unwrap(), 0);
        for n in [12u64, 16, 30, 1] {
            assert_eq!(lambda_r_eval(&t, &chi, 5, n).unwrap(), t.liouville(n).unwrap());
        }
        assert!(lambda_r_eval(&t, &chi, 5, 0).is_err());
        assert!(lambda_r_eval(&t, &chi, 5, 200_001).is_err());
    }

    #[test]
    fn lambda_r_properties() {
        let t = SieveTable::build(10_000).unwrap();
        let chi = RealCharacter::from_discriminant(-4).unwrap();
        for n in 1..=10_000u64 {
            assert_eq!(lambda_r_eval(&t, &chi, 10_000, n).unwrap(), t.liouville(n).unwrap());
            let lr = lambda_r_eval(&t, &chi, 30, n).unwrap();
            if lr != t.liouville(n).unwrap() {
                assert!(t.prime_powers(n).unwrap().any(|(p, _)| p > 30));
            }
        }
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..2000 {
            let a = rng.gen_range(1..=100u64);
            let b = rng.gen_range(1..=100u64);
            let r = rng.gen_range(2..50);
            assert_eq!(
                lambda_r_eval(&t, &chi, r, a * b).unwrap(),
                lambda_r_eval(&t, &chi, r, a).unwrap() * lambda_r_eval(&t, &chi, r, b).unwrap()
            );
        }
    }

    #[test]
    fn correlation_examples() {
        let t = table();
        let f = ArithFunction::Liouville;
        assert_eq!(chowla_correlation(&t, &f, 10, &[0]).unwrap().raw_sum, 0);
        assert_eq!(chowla_correlation(&t, &f, 1000, &[0, 0]).unwrap().raw_sum, 1000);
        assert_eq!(chowla_correlation(&t, &f, 1000, &[5, 5]).unwrap().raw_sum, 1000);
        // Negative shift: n − 3 ≤ 0 for n ≤ 3, so those terms vanish.
        assert_eq!(chowla_correlation(&t, &f, 100, &[-3, -3]).unwrap().raw_sum, 97);

        let report = chowla_correlation(&t, &f, 10_000, &[0, 1]).unwrap();
        let mut oracle = 0i64;
        for n in 1..=10_000u64 {
            let a = if t.big_omega(n).unwrap() % 2 == 0 { 1 } else { -1 };
            let b = if t.big_omega(n + 1).unwrap() % 2 == 0 { 1 } else { -1 };
            oracle += a * b;
        }
        assert_eq!(report.raw_sum, oracle);
        assert!(report.value.abs() <= 1.0);

        assert!(matches!(
            chowla_correlation(&t, &f, 200_000, &[0, 1]),
            Err(Error::Range { .. })
        ));
        let mu = chowla_correlation(&t, &ArithFunction::Mobius, 10, &[0]).unwrap();
        assert_eq!(mu.raw_sum, -1);
    }

    #[test]
    fn blocks_are_partition_invariant() {
        let t = table();
        let chi = RealCharacter::from_discriminant(-4).unwrap().tabulated();
        for f in [
            ArithFunction::Liouville,
            ArithFunction::Mobius,
            ArithFunction::LambdaR { chi, r: 50 },
        ] {
            let whole = correlation_block(&t, &f, &[0, 2, 7], 1, 50_000).unwrap();
            for parts in [1, 2, 3, 7, 64] {
                let blocks = block_bounds(50_000, parts);
                assert_eq!(blocks.first().unwrap().0, 1);
                assert_eq!(blocks.last().unwrap().1, 50_000);
                let sum: i64 = blocks
                    .iter()
                    .map(|&(lo, hi)| correlation_block(&t, &f, &[0, 2, 7], lo, hi).unwrap())
                    .sum();
                assert_eq!(sum, whole);
            }
        }
        assert_eq!(block_bounds(3, 8).len(), 3);
    }

    #[test]
    fn translation_invariance() {
        let t = table();
        let f = ArithFunction::Liouville;
        for x in [100u64, 1000, 50_000] {
            let a = correlation_block(&t, &f, &[0, 1, 3], 1, x).unwrap();
            let b = correlation_block(&t, &f, &[1, 2, 4], 1, x).unwrap();
            assert!((a - b).abs() <= 2);
        }
    }

    #[test]
    fn difference_examples() {
        let t = table();
        let chi = RealCharacter::from_discriminant(-4).unwrap();
        let rep = correlation_difference(&t, &chi, 1000, 500, &[0, 1]).unwrap();
        assert_eq!((rep.lhs, rep.termwise), (0, 0));
        let rep = correlation_difference(&t, &chi, 10, 5000, &[0]).unwrap();
        let direct: i64 = (1..=5000u64)
            .map(|n| t.liouville(n).unwrap() as i64 - lambda_r_eval(&t, &chi, 10, n).unwrap() as i64)
            .sum();
        assert_eq!(rep.lhs, direct.unsigned_abs());
        assert!(rep.lhs <= rep.termwise);
        let rep = correlation_difference(&t, &chi, 100, 100_000, &[0, 1]).unwrap();
        assert!(rep.holds() && rep.lhs <= rep.rigorous_majorant);
    }

    #[test]
    fn tuple_count_examples() {
        for m in 1..=50 {
            assert_eq!(even_multiplicity_tuple_count(m, 2).unwrap().exact, Some(m as u128));
        }
        assert_eq!(even_multiplicity_tuple_count(2, 4).unwrap().exact, Some(8));
        let c = even_multiplicity_tuple_count(5, 4).unwrap();
        assert_eq!(c.bound, 6400.0);
        // 5 + 3·5·4 = 65
        assert_eq!(c.exact, Some(65));
        assert_eq!(even_multiplicity_tuple_count(1000, 4).unwrap().exact, None);
        assert!(even_multiplicity_tuple_count(5, 3).is_err());
    }

    #[test]
    fn tuple_count_matches_brute_force_and_weights() {
        for m in 1..=6u64 {
            for k in [2u32, 4, 6] {
                let total = m.pow(k);
                let brute = (0..total)
                    .filter(|&code| {
                        let mut counts = vec![0u32; m as usize];
                        let mut c = code;
                        for _ in 0..k {
                            counts[(c % m) as usize] += 1;
                            c /= m;
                        }
                        counts.iter().all(|x| x % 2 == 0)
                    })
                    .count() as u128;
                assert_eq!(even_multiplicity_tuple_count(m, k).unwrap().exact, Some(brute));
                assert_eq!(tuple_class_weight(m, k, 0).unwrap(), brute);
                // Every tuple has exactly one odd set.
                let all: u128 = (0..=m)
                    .map(|s| {
                        binomial(m as u128, s as u128).unwrap() * tuple_class_weight(m, k, s).unwrap()
                    })
                    .sum();
                assert_eq!(all, total as u128);
            }
        }
    }

    #[test]
    fn default_order() {
        assert_eq!(default_moment_order(20, 0.6), 2);
        assert_eq!(default_moment_order(1000, 0.6), 34);
        assert_eq!(default_moment_order(1, 0.5), 2);
    }

    #[test]
    fn moment_examples() {
        let t = table();
        let r = moment_tail_experiment(&t, 1000, 5, Some(2), 0.1, &[0.0; 5]).unwrap();
        assert_eq!(r.count, 0);
        let r = moment_tail_experiment(&t, 1000, 1, Some(2), 0.5, &[1.0]).unwrap();
        assert_eq!(r.count, 1000);
        assert_eq!(r.chain_holds(), Some(true));
        assert!(moment_tail_experiment(&t, 1000, 2, Some(2), 0.5, &[1.0, 1.5]).is_err());
        assert!(moment_tail_experiment(&t, 200_000, 2, Some(2), 0.5, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn moment_identity_and_chain() {
        let t = table();
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..5 {
            let m = rng.gen_range(1..8u64);
            let coeffs: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let x = rng.gen_range(100..3000);
            for k in [2u32, 4] {
                let r = moment_tail_experiment(&t, x, m, Some(k), 0.3, &coeffs).unwrap();
                let signed = r.signed_tuple_sum.unwrap();
                assert!((signed - r.moment).abs() <= 1e-8 * r.moment.max(1.0), "{r:?}");
                assert_eq!(r.chain_holds(), Some(true));
            }
        }
        let r = moment_tail_experiment(&t, 20_000, 10, Some(4), 0.6, &[1.0; 10]).unwrap();
        // Integer coefficients: moment and signed tuple sum agree exactly.
        assert_eq!(r.signed_tuple_sum.unwrap(), r.moment);
        assert_eq!(r.chain_holds(), Some(true));
        assert!(r.fraction <= r.chebyshev.unwrap());
    }
}
