//! Real primitive Dirichlet characters and complete character sums.
//!
//! A real primitive character is identified with its fundamental discriminant
//! `d` through the Kronecker symbol `χ_d(n) = (d/n)`, with modulus `q = |d|`.
//! Evaluation is `O(log q)` by reciprocity; a value table indexed by `n mod q`
//! can be attached with [`RealCharacter::tabulated`] when `q` is small.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{factor_trial, is_prime_trial, SieveTable};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Largest modulus for which [`RealCharacter::tabulated`] builds a table.
pub const TABLE_THRESHOLD: u64 = 1_000_000;

/// Jacobi symbol `(a/n)` for odd `n > 0`.
pub fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut result = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        core::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol `(a/n)` for arbitrary integers.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a.unsigned_abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1i8;
    if n < 0 && a < 0 {
        result = -1;
    }
    let mut m = n.unsigned_abs();
    let v = m.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        m >>= v;
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    if m == 1 {
        return result;
    }
    result * jacobi(a.rem_euclid(m as i64) as u64, m)
}

/// Reasons a discriminant can fail validation.
pub fn check_fundamental_discriminant(d: i64) -> Result<()> {
    let fail = |reason| Err(Error::InvalidDiscriminant { d, reason });
    if d == 0 {
        return fail("zero is not a discriminant");
    }
    if d == 1 {
        return fail("d = 1 gives the principal character, which is not a non-principal real character");
    }
    let squarefree = |m: u64| factor_trial(m).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => {
            if !squarefree(d.unsigned_abs()) {
                return fail("d ≡ 1 (mod 4) but |d| is not squarefree");
            }
        }
        0 => {
            let m = d / 4;
            if !matches!(m.rem_euclid(4), 2 | 3) {
                return fail("d = 4m requires m ≡ 2 or 3 (mod 4)");
            }
            if !squarefree(m.unsigned_abs()) {
                return fail("d = 4m requires m squarefree");
            }
        }
        _ => return fail("d ≡ 2 or 3 (mod 4)"),
    }
    Ok(())
}

/// Whether `χ(−1) = +1` (even) or `−1` (odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A real primitive Dirichlet character `χ_d = (d/·)` of modulus `|d|`.
#[derive(Clone)]
pub struct RealCharacter {
    discriminant: i64,
    modulus: u64,
    table: Option<Arc<[i8]>>,
}

impl fmt::Debug for RealCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealCharacter")
            .field("discriminant", &self.discriminant)
            .field("modulus", &self.modulus)
            .field("tabulated", &self.table.is_some())
            .finish()
    }
}

impl PartialEq for RealCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.discriminant == other.discriminant
    }
}

impl Eq for RealCharacter {}

impl RealCharacter {
    /// Character attached to a fundamental discriminant.
    pub fn from_discriminant(d: i64) -> Result<Self> {
        check_fundamental_discriminant(d)?;
        let chi = Self::unchecked(d);
        chi.check_structure()?;
        Ok(chi)
    }

    /// The quadratic (Legendre) character modulo an odd prime `p`.
    pub fn legendre(p: u64) -> Result<Self> {
        if p == 2 || !is_prime_trial(p) || p > i64::MAX as u64 {
            return Err(Error::Precondition(format!("{p} is not an odd prime")));
        }
        let d = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        Ok(Self::unchecked(d))
    }

    fn unchecked(d: i64) -> Self {
        Self {
            discriminant: d,
            modulus: d.unsigned_abs(),
            table: None,
        }
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn parity(&self) -> Parity {
        if self.discriminant > 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Exponent `j` in `q = 2^j · m`.
    pub fn two_adic_exponent(&self) -> u32 {
        self.modulus.trailing_zeros()
    }

    /// Odd part `m` of the modulus.
    pub fn odd_part(&self) -> u64 {
        self.modulus >> self.modulus.trailing_zeros()
    }

    /// Confirms `q = 2^j m` with `j ≤ 3` and `m` odd squarefree.
    pub fn check_structure(&self) -> Result<()> {
        let j = self.two_adic_exponent();
        if j > 3 {
            return Err(Error::InvalidDiscriminant {
                d: self.discriminant,
                reason: "2-adic exponent of the modulus exceeds 3",
            });
        }
        if j == 1 {
            return Err(Error::InvalidDiscriminant {
                d: self.discriminant,
                reason: "modulus exactly divisible by 2 cannot be a conductor",
            });
        }
        if factor_trial(self.odd_part()).iter().any(|&(_, e)| e > 1) {
            return Err(Error::InvalidDiscriminant {
                d: self.discriminant,
                reason: "odd part of the modulus is not squarefree",
            });
        }
        Ok(())
    }

    /// Attaches a value table over `n mod q` when `q ≤` [`TABLE_THRESHOLD`].
    pub fn tabulated(mut self) -> Self {
        if self.table.is_none() && self.modulus <= TABLE_THRESHOLD {
            let d = self.discriminant;
            let table: Vec<i8> = (0..self.modulus as i64).map(|n| kronecker(d, n)).collect();
            self.table = Some(table.into());
        }
        self
    }

    pub fn is_tabulated(&self) -> bool {
        self.table.is_some()
    }

    /// χ(n) for any integer `n`.
    #[inline]
    pub fn eval(&self, n: i128) -> i8 {
        self.eval_residue(n.rem_euclid(self.modulus as i128) as u64)
    }

    /// χ(n) for `0 ≤ n < q`.
    #[inline]
    pub fn eval_residue(&self, n: u64) -> i8 {
        match &self.table {
            Some(t) => t[n as usize],
            None => kronecker(self.discriminant, n as i64),
        }
    }

    /// Factorization `χ = ∏ χ_i` into characters of prime-power modulus,
    /// ordered by modulus (the 2-part first when present).
    pub fn components(&self) -> Vec<RealCharacter> {
        let mut odd_product = 1i64;
        let mut out = Vec::new();
        for (p, _) in factor_trial(self.odd_part()) {
            let star = if p % 4 == 1 { p as i64 } else { -(p as i64) };
            odd_product *= star;
            out.push(Self::unchecked(star));
        }
        let two_part = self.discriminant / odd_product;
        if two_part != 1 {
            out.insert(0, Self::unchecked(two_part));
        }
        out
    }
}

/// `f(x) = ∏ (b_i + a_i x)` given as `(b_i, a_i)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFactorPoly {
    factors: Vec<(i64, i64)>,
}

impl LinearFactorPoly {
    pub fn new(factors: Vec<(i64, i64)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("polynomial needs at least one factor".into()));
        }
        if factors.iter().all(|&(_, a)| a == 0) {
            return Err(Error::InvalidInput("at least one factor must have a nonzero x coefficient".into()));
        }
        Ok(Self { factors })
    }

    /// `f(x) = ∏ (x + c)` over the given shifts.
    pub fn from_shifts(shifts: &[i64]) -> Result<Self> {
        Self::new(shifts.iter().map(|&c| (c, 1)).collect())
    }

    pub fn factors(&self) -> &[(i64, i64)] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    /// `f(n) mod q` in `[0, q)`.
    pub fn eval_mod(&self, n: i128, q: u64) -> u64 {
        let q128 = q as i128;
        let mut acc = 1i128 % q128;
        for &(b, a) in &self.factors {
            let v = (b as i128 + (a as i128) * n.rem_euclid(q128)).rem_euclid(q128);
            acc = acc * v % q128;
        }
        acc as u64
    }

    /// Classification of `f` modulo the prime `p`.
    pub fn square_class_mod_p(&self, p: u64) -> SquareClass {
        match self.root_multiplicities(p) {
            None => SquareClass::IdenticallyZero,
            Some(roots) if roots.values().all(|m| m % 2 == 0) => SquareClass::Square,
            Some(_) => SquareClass::NonSquare,
        }
    }

    /// Number of distinct roots of `f` modulo `p`; `None` if `f ≡ 0`.
    pub fn distinct_roots_mod_p(&self, p: u64) -> Option<usize> {
        self.root_multiplicities(p).map(|r| r.len())
    }

    /// Roots mod `p` with multiplicity. Factors proportional mod `p` share a
    /// root; factors with `p | a` are nonzero constants unless `p | b` too.
    fn root_multiplicities(&self, p: u64) -> Option<BTreeMap<u64, u32>> {
        let mut roots = BTreeMap::new();
        let pi = p as i128;
        for &(b, a) in &self.factors {
            let a = (a as i128).rem_euclid(pi);
            let b = (b as i128).rem_euclid(pi);
            if a == 0 {
                if b == 0 {
                    return None;
                }
                continue;
            }
            let inv = mod_inverse(a, pi).expect("p prime and a nonzero");
            let root = ((pi - b) % pi * inv % pi) as u64;
            *roots.entry(root).or_insert(0) += 1;
        }
        Some(roots)
    }
}

impl fmt::Display for LinearFactorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(b, a) in &self.factors {
            write!(f, "({b}{:+}x)", a)?;
        }
        Ok(())
    }
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let (g, x, _) = crate::arith::ext_gcd(a, m);
    (g == 1).then(|| x.rem_euclid(m))
}

/// Whether `f ≡ c·g(x)^2 (mod p)` identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareClass {
    Square,
    NonSquare,
    /// Some factor vanishes identically mod `p`, so `f ≡ 0`.
    IdenticallyZero,
}

/// Tri-state test of whether `f` is a constant times a square modulo `p`.
pub fn is_square_mod_p(f: &LinearFactorPoly, p: u64) -> SquareClass {
    f.square_class_mod_p(p)
}

/// `Σ_{n=0}^{q−1} χ(f(n))`, exact.
pub fn char_sum_poly(chi: &RealCharacter, f: &LinearFactorPoly) -> i64 {
    let q = chi.modulus();
    (0..q as i128)
        .map(|n| chi.eval_residue(f.eval_mod(n, q)) as i64)
        .sum()
}

/// Outcome of comparing a prime-modulus character sum with `(m−1)√p`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeilReport {
    pub p: u64,
    pub sum: i64,
    /// Distinct roots of `f` modulo `p`.
    pub distinct_roots: usize,
    pub bound: f64,
    pub holds: bool,
}

/// Checks `|Σ_{n mod p} χ(f(n))| ≤ (m−1)√p` for the quadratic character mod `p`.
pub fn weil_bound_check(chi: &RealCharacter, f: &LinearFactorPoly) -> Result<WeilReport> {
    let p = chi.modulus();
    if p == 2 || !is_prime_trial(p) {
        return Err(Error::Precondition(format!(
            "Weil bound needs a character of odd prime modulus, got modulus {p}"
        )));
    }
    match f.square_class_mod_p(p) {
        SquareClass::NonSquare => {}
        SquareClass::Square => {
            return Err(Error::Precondition(format!("{f} is a constant times a square mod {p}")))
        }
        SquareClass::IdenticallyZero => {
            return Err(Error::Precondition(format!("{f} vanishes identically mod {p}")))
        }
    }
    let m = f.distinct_roots_mod_p(p).unwrap_or(0);
    let sum = char_sum_poly(chi, f);
    let bound = (m as f64 - 1.0) * libm::sqrt(p as f64);
    Ok(WeilReport {
        p,
        sum,
        distinct_roots: m,
        bound,
        holds: (sum.unsigned_abs() as f64) <= bound,
    })
}

/// One prime-power factor of a CRT-factored character sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSum {
    pub modulus: u64,
    pub discriminant: i64,
    pub sum: i64,
}

/// Direct and CRT-factored evaluation of `Σ_{n mod q} χ(f(n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrtReport {
    pub modulus: u64,
    pub direct: i64,
    pub factored: i64,
    pub components: Vec<ComponentSum>,
    /// `(deg f − 1)^s · √q` with `s = ω(q)`.
    pub bound: f64,
}

impl CrtReport {
    pub fn agree(&self) -> bool {
        self.direct == self.factored
    }

    pub fn within_bound(&self) -> bool {
        (self.direct.unsigned_abs() as f64) <= self.bound
    }
}

/// Computes the sum directly and as `∏_i Σ_{a mod p_i^α} χ_i(f(a·q/p_i^α))`.
pub fn crt_char_sum(chi: &RealCharacter, f: &LinearFactorPoly) -> Result<CrtReport> {
    chi.check_structure()?;
    let q = chi.modulus();
    let direct = char_sum_poly(chi, f);
    let mut components = Vec::new();
    let mut factored = 1i64;
    for part in chi.components() {
        let pq = part.modulus();
        let cofactor = (q / pq) as i128;
        let sum: i64 = (0..pq as i128)
            .map(|a| part.eval_residue(f.eval_mod(a * cofactor, pq)) as i64)
            .sum();
        factored *= sum;
        components.push(ComponentSum {
            modulus: pq,
            discriminant: part.discriminant(),
            sum,
        });
    }
    let s = components.len() as i32;
    let bound = libm::pow(f.degree() as f64 - 1.0, s as f64) * libm::sqrt(q as f64);
    Ok(CrtReport {
        modulus: q,
        direct,
        factored,
        components,
        bound,
    })
}

/// Which primes enter a prime logarithm sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeSelector {
    /// χ(p) = +1
    Split,
    /// χ(p) = 0, i.e. `p | q`
    Ramified,
    /// χ(p) = −1
    Inert,
}

impl PrimeSelector {
    fn value(self) -> i8 {
        match self {
            PrimeSelector::Split => 1,
            PrimeSelector::Ramified => 0,
            PrimeSelector::Inert => -1,
        }
    }
}

/// `Σ_{p ≤ x, χ(p) = selector} (log p)/p`, ascending in `p`, compensated.
pub fn prime_log_sum(
    chi: &RealCharacter,
    x: u64,
    table: &SieveTable,
    which: PrimeSelector,
) -> Result<f64> {
    Ok(prime_log_sum_range(chi, table, 1, x, which)?.value())
}

/// Partial sum over primes in `[lo, hi]`, for partitioned accumulation.
pub fn prime_log_sum_range(
    chi: &RealCharacter,
    table: &SieveTable,
    lo: u64,
    hi: u64,
    which: PrimeSelector,
) -> Result<CompensatedSum> {
    table.check("x", hi)?;
    let want = which.value();
    let upto = table.primes_up_to(hi);
    let start = upto.partition_point(|&p| (p as u64) < lo);
    let mut acc = CompensatedSum::new();
    for &p in &upto[start..] {
        if chi.eval(p as i128) == want {
            let pf = p as f64;
            acc.add(libm::log(pf) / pf);
        }
    }
    Ok(acc)
}

/// Human-readable label used in reports.
pub fn describe(chi: &RealCharacter) -> String {
    format!("chi_{}", chi.discriminant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn legendre_brute(a: i64, p: u64) -> i8 {
        let a = a.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_matches_legendre_for_odd_primes() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            for a in -30i64..30 {
                assert_eq!(kronecker(a, p as i64), legendre_brute(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_special_cases() {
        assert_eq!(kronecker(5, 0), 0);
        assert_eq!(kronecker(-1, 0), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(1, 2), 1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-4, -1), -1);
        assert_eq!(kronecker(5, -1), 1);
    }

    #[test]
    fn discriminant_examples() {
        let chi = RealCharacter::from_discriminant(-4).unwrap();
        assert_eq!(chi.eval(1), 1);
        assert_eq!(chi.eval(3), -1);
        assert_eq!(chi.eval(2), 0);
        assert_eq!(chi.eval(7), -1);
        assert_eq!(chi.eval(0), 0);
        assert_eq!(chi.parity(), Parity::Odd);

        let chi5 = RealCharacter::from_discriminant(5).unwrap();
        assert_eq!(chi5.eval(2), -1);
        assert_eq!(chi5.eval(6), 1);
        assert_eq!(chi5.parity(), Parity::Even);

        assert_eq!(RealCharacter::from_discriminant(-3).unwrap().eval(2), -1);
        assert!(RealCharacter::from_discriminant(12).is_ok());
        assert_eq!(RealCharacter::from_discriminant(8).unwrap().two_adic_exponent(), 3);
    }

    #[test]
    fn rejects_non_fundamental() {
        for (d, needle) in [
            (0, "zero"),
            (1, "principal"),
            (9, "squarefree"),
            (-7 * 4, "m ≡ 2 or 3"),
            (16, "m ≡ 2 or 3"),
            (4 * 18, "m squarefree"),
            (4 * 27, "m squarefree"),
            (6, "(mod 4)"),
            (-5, "(mod 4)"),
        ] {
            match RealCharacter::from_discriminant(d) {
                Err(Error::InvalidDiscriminant { reason, .. }) => {
                    assert!(reason.contains(needle), "d={d}: {reason}")
                }
                other => panic!("d={d}: {other:?}"),
            }
        }
    }

    fn random_discriminants(rng: &mut StdRng, count: usize) -> Vec<RealCharacter> {
        let mut out = Vec::new();
        while out.len() < count {
            let d = rng.gen_range(-10_000i64..=10_000);
            if let Ok(chi) = RealCharacter::from_discriminant(d) {
                out.push(chi);
            }
        }
        out
    }

    #[test]
    fn multiplicative_periodic_and_vanishing() {
        let mut rng = StdRng::seed_from_u64(42);
        for chi in random_discriminants(&mut rng, 20) {
            let q = chi.modulus() as i128;
            let tab = chi.clone().tabulated();
            for _ in 0..500 {
                let a = rng.gen_range(-100_000i128..100_000);
                let b = rng.gen_range(-100_000i128..100_000);
                assert_eq!(chi.eval(a * b), chi.eval(a) * chi.eval(b));
                assert_eq!(chi.eval(a + q), chi.eval(a));
                assert_eq!(tab.eval(a), chi.eval(a));
                let coprime = crate::arith::gcd_i128(a, q) == 1;
                assert_eq!(chi.eval(a) != 0, coprime);
            }
        }
    }

    #[test]
    fn orthogonality() {
        let mut rng = StdRng::seed_from_u64(5);
        for chi in random_discriminants(&mut rng, 30) {
            let s: i64 = (0..chi.modulus() as i128).map(|n| chi.eval(n) as i64).sum();
            assert_eq!(s, 0, "{chi:?}");
        }
    }

    #[test]
    fn components_multiply_back() {
        for d in [-4i64, 8, -8, 5, -3, 12, -15, 21, -20, 24, -840, 1365] {
            let chi = RealCharacter::from_discriminant(d).unwrap();
            let parts = chi.components();
            assert_eq!(parts.iter().map(|c| c.discriminant()).product::<i64>(), d);
            assert_eq!(parts.iter().map(|c| c.modulus()).product::<u64>(), chi.modulus());
            for n in -50i128..200 {
                let prod: i8 = parts.iter().map(|c| c.eval(n)).product();
                assert_eq!(prod, chi.eval(n), "d={d} n={n}");
            }
        }
    }

    #[test]
    fn quadratic_x_times_x_plus_one_sum() {
        let f = LinearFactorPoly::from_shifts(&[0, 1]).unwrap();
        assert_eq!(char_sum_poly(&RealCharacter::legendre(7).unwrap(), &f), -1);
        for p in (3u64..2000).filter(|&p| is_prime_trial(p)) {
            let chi = RealCharacter::legendre(p).unwrap();
            assert_eq!(char_sum_poly(&chi, &f), -1, "p = {p}");
        }
    }

    #[test]
    fn single_linear_factor_sums_to_zero() {
        let chi = RealCharacter::legendre(13).unwrap();
        for (b, a) in [(3, 1), (0, 5), (-7, 2)] {
            let f = LinearFactorPoly::new(vec![(b, a)]).unwrap();
            assert_eq!(char_sum_poly(&chi, &f), 0);
        }
    }

    #[test]
    fn cubic_sum_mod_11_by_loop() {
        let chi = RealCharacter::legendre(11).unwrap();
        let f = LinearFactorPoly::from_shifts(&[0, 1, 2]).unwrap();
        let expect: i64 = (0..11i64)
            .map(|n| legendre_brute(n * (n + 1) * (n + 2), 11) as i64)
            .sum();
        assert_eq!(char_sum_poly(&chi, &f), expect);
    }

    #[test]
    fn square_classes() {
        let sq = LinearFactorPoly::new(vec![(0, 1), (0, 1)]).unwrap();
        assert_eq!(is_square_mod_p(&sq, 5), SquareClass::Square);
        let f = LinearFactorPoly::from_shifts(&[0, 1]).unwrap();
        assert_eq!(is_square_mod_p(&f, 5), SquareClass::NonSquare);
        let g = LinearFactorPoly::from_shifts(&[0, 5]).unwrap();
        assert_eq!(is_square_mod_p(&g, 5), SquareClass::Square);
        // 2x and x+... proportional factors share the root 0
        let h = LinearFactorPoly::new(vec![(0, 2), (0, 3), (1, 5)]).unwrap();
        assert_eq!(is_square_mod_p(&h, 5), SquareClass::Square);
        let z = LinearFactorPoly::new(vec![(5, 5), (1, 1)]).unwrap();
        assert_eq!(is_square_mod_p(&z, 5), SquareClass::IdenticallyZero);
    }

    #[test]
    fn weil_examples() {
        let f = LinearFactorPoly::from_shifts(&[0, 1]).unwrap();
        let r = weil_bound_check(&RealCharacter::legendre(7).unwrap(), &f).unwrap();
        assert_eq!(r.sum, -1);
        assert!(r.holds);

        let f = LinearFactorPoly::from_shifts(&[0, 1, 3]).unwrap();
        let r = weil_bound_check(&RealCharacter::legendre(13).unwrap(), &f).unwrap();
        let expect: i64 = (0..13i64)
            .map(|n| legendre_brute(n * (n + 1) * (n + 3), 13) as i64)
            .sum();
        assert_eq!(r.sum, expect);
        assert!(r.sum.abs() <= 7 && r.holds);

        let f = LinearFactorPoly::from_shifts(&[0, 1, 2]).unwrap();
        let r = weil_bound_check(&RealCharacter::legendre(3).unwrap(), &f).unwrap();
        assert_eq!((r.sum, r.distinct_roots), (0, 3));
        assert!(r.holds);

        let sq = LinearFactorPoly::new(vec![(0, 1), (0, 1)]).unwrap();
        assert!(matches!(
            weil_bound_check(&RealCharacter::legendre(5).unwrap(), &sq),
            Err(Error::Precondition(_))
        ));
        assert!(weil_bound_check(&RealCharacter::from_discriminant(-4).unwrap(), &f).is_err());
    }

    #[test]
    fn crt_examples() {
        let f = LinearFactorPoly::from_shifts(&[0, 1]).unwrap();
        let r = crt_char_sum(&RealCharacter::from_discriminant(-15).unwrap(), &f).unwrap();
        assert!(r.agree());
        assert_eq!(r.components.len(), 2);
        let mod3: i64 = (0..3i64).map(|n| legendre_brute(n * (n + 1), 3) as i64).sum();
        let mod5: i64 = (0..5i64).map(|n| legendre_brute(n * (n + 1), 5) as i64).sum();
        assert_eq!(r.direct, mod3 * mod5);

        let g = LinearFactorPoly::from_shifts(&[0, 2]).unwrap();
        let r = crt_char_sum(&RealCharacter::from_discriminant(21).unwrap(), &g).unwrap();
        assert!(r.agree());

        let prime = RealCharacter::legendre(13).unwrap();
        let r = crt_char_sum(&prime, &f).unwrap();
        assert_eq!(r.direct, char_sum_poly(&prime, &f));
        assert_eq!(r.components.len(), 1);
    }

    #[test]
    fn crt_identity_many_moduli() {
        let mut rng = StdRng::seed_from_u64(9);
        for chi in random_discriminants(&mut rng, 25) {
            let k = rng.gen_range(1..=4);
            let factors = (0..k)
                .map(|_| (rng.gen_range(-50..50), rng.gen_range(1..20)))
                .collect();
            let f = LinearFactorPoly::new(factors).unwrap();
            let r = crt_char_sum(&chi, &f).unwrap();
            assert!(r.agree(), "{chi:?} {f}");
        }
    }

    #[test]
    fn prime_log_sums() {
        let table = SieveTable::build(1_000_000).unwrap();
        let chi = RealCharacter::from_discriminant(-4).unwrap();
        let s = prime_log_sum(&chi, 10, &table, PrimeSelector::Split).unwrap();
        assert!((s - libm::log(5.0) / 5.0).abs() < 1e-15);
        assert!((s - 0.3219).abs() < 1e-4);
        let r = prime_log_sum(&chi, 10, &table, PrimeSelector::Ramified).unwrap();
        assert!((r - libm::log(2.0) / 2.0).abs() < 1e-15);

        let chi5 = RealCharacter::from_discriminant(5).unwrap();
        assert_eq!(prime_log_sum(&chi5, 2, &table, PrimeSelector::Split).unwrap(), 0.0);
        let chi_m7 = RealCharacter::from_discriminant(-7).unwrap();
        let two = prime_log_sum(&chi_m7, 2, &table, PrimeSelector::Split).unwrap();
        assert!((two - libm::log(2.0) / 2.0).abs() < 1e-15);

        let split = prime_log_sum(&chi, 1_000_000, &table, PrimeSelector::Split).unwrap();
        let all: f64 = table
            .primes()
            .iter()
            .map(|&p| libm::log(p as f64) / p as f64)
            .sum();
        assert!((split - 0.5 * all).abs() < 1.0, "split={split} all={all}");
        assert!((split - 0.5 * libm::log(1e6)).abs() < 2.0);
        assert!(prime_log_sum(&chi, 1_000_001, &table, PrimeSelector::Split).is_err());
    }

    #[test]
    fn prime_log_sum_partition_invariant() {
        let table = SieveTable::build(200_000).unwrap();
        let chi = RealCharacter::from_discriminant(-23).unwrap();
        let whole = prime_log_sum(&chi, 200_000, &table, PrimeSelector::Inert).unwrap();
        let mut acc = CompensatedSum::new();
        for (lo, hi) in [(1, 50_000), (50_001, 120_000), (120_001, 200_000)] {
            acc.merge(&prime_log_sum_range(&chi, &table, lo, hi, PrimeSelector::Inert).unwrap());
        }
        assert!((whole - acc.value()).abs() <= 1e-9 * whole);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn weil_bound_random(pi in 0usize..200, raw in proptest::collection::vec((-1000i64..1000, -1000i64..1000), 1..=5)) {
            let primes: Vec<u64> = (3u64..1300).filter(|&p| is_prime_trial(p)).collect();
            let p = primes[pi % primes.len()];
            let Ok(f) = LinearFactorPoly::new(raw) else { return Ok(()) };
            if f.square_class_mod_p(p) != SquareClass::NonSquare {
                return Ok(());
            }
            let r = weil_bound_check(&RealCharacter::legendre(p).unwrap(), &f).unwrap();
            prop_assert!(r.holds, "{:?}", r);
        }
    }
}
