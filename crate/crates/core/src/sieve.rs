//! Sieve layer: local densities ν(p), root counts N(p), exact sifted counts
//! and the fundamental-lemma estimate with its remainder budget.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{
    ext_gcd, factor_trial, gcd_u64, is_prime_trial, least_integer_above_power,
    rem_euclid_u64, SieveTable,
};
use crate::{Error, Result};

/// Largest prime set for which inclusion-exclusion over all `d | P` is attempted.
pub const MAX_INCLUSION_EXCLUSION_PRIMES: usize = 24;

/// Largest modulus [`coprime_residue_count`] accepts.
pub const MAX_RESIDUE_MODULUS: u64 = 1_000_000_000_000;

/// Direct enumeration cutoff in [`coprime_residue_count`].
pub const DIRECT_ENUMERATION_LIMIT: u64 = 1_000_000;

/// Product of linear forms `c_i + s_i·m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceFamily {
    forms: Vec<(i128, i128)>,
}

impl CongruenceFamily {
    /// `forms[i] = (c_i, s_i)`.
    pub fn new(forms: Vec<(i128, i128)>) -> Result<Self> {
        if forms.is_empty() {
            return Err(Error::InvalidInput("congruence family needs at least one form".into()));
        }
        Ok(Self { forms })
    }

    /// The forms `(b_i* + n a_i*) + m · q a_i*` attached to residue `n` mod `q`.
    pub fn from_parametrization(b_star: &[i128], a_star: &[i128], n: i128, q: u64) -> Result<Self> {
        if b_star.len() != a_star.len() {
            return Err(Error::InvalidInput("b* and a* differ in length".into()));
        }
        let overflow = || Error::Overflow("parametrized congruence family");
        let forms = b_star
            .iter()
            .zip(a_star)
            .map(|(&b, &a)| {
                let c = a.checked_mul(n).and_then(|x| x.checked_add(b)).ok_or_else(overflow)?;
                let s = a.checked_mul(q as i128).ok_or_else(overflow)?;
                Ok((c, s))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(forms)
    }

    pub fn forms(&self) -> &[(i128, i128)] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// `#{m mod d : ∏(c_i + s_i m) ≡ 0 mod d}` by looping over every residue.
    pub fn count_roots_mod(&self, d: u64) -> u64 {
        count_roots_by_scan(&self.forms, d)
    }

    /// Roots of the product modulo a prime `p`, ascending.
    pub fn roots_mod_p(&self, p: u64) -> Vec<u64> {
        roots_mod_prime(&self.forms, p)
    }
}

fn count_roots_by_scan(forms: &[(i128, i128)], d: u64) -> u64 {
    let reduced: Vec<(u64, u64)> = forms
        .iter()
        .map(|&(c, s)| (rem_euclid_u64(c, d), rem_euclid_u64(s, d)))
        .collect();
    (0..d)
        .filter(|&m| {
            let mut prod = 1u128 % d as u128;
            for &(c, s) in &reduced {
                let v = (c as u128 + s as u128 * m as u128) % d as u128;
                prod = prod * v % d as u128;
            }
            prod == 0
        })
        .count() as u64
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    let (_, x, _) = ext_gcd(a as i128, p as i128);
    rem_euclid_u64(x, p)
}

fn roots_mod_prime(forms: &[(i128, i128)], p: u64) -> Vec<u64> {
    let mut roots = Vec::new();
    for &(c, s) in forms {
        let (c, s) = (rem_euclid_u64(c, p), rem_euclid_u64(s, p));
        if s == 0 {
            if c == 0 {
                return (0..p).collect();
            }
            continue;
        }
        let root = ((p - c) % p) as u128 * inverse_mod(s, p) as u128 % p as u128;
        roots.push(root as u64);
    }
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// Which branch of the local-density analysis produced a count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuCase {
    /// `p | q`: every form is a unit constant mod `p`, so nothing is removed.
    ModulusPrime,
    /// Every slope is a unit and `p > h_max`: one distinct root per form.
    AllInvertible,
    /// Exactly one slope is a unit: one root, or every class when another
    /// form vanishes identically.
    OneInvertible,
    /// Small primes and mixed shapes: roots counted one by one.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NuCount {
    pub p: u64,
    pub value: u64,
    pub case: NuCase,
}

impl NuCount {
    /// All residue classes are removed (`ν(p) = p`).
    pub fn is_degenerate(&self) -> bool {
        self.value == self.p
    }
}

fn local_count(forms: &[(i128, i128)], p: u64, q: Option<u64>, h_max: u64) -> NuCount {
    let reduced: Vec<(u64, u64)> = forms
        .iter()
        .map(|&(c, s)| (rem_euclid_u64(c, p), rem_euclid_u64(s, p)))
        .collect();
    let done = |value, case| NuCount { p, value, case };
    let units = reduced.iter().filter(|&&(_, s)| s != 0).count();
    if q.is_some_and(|q| q % p == 0) && units == 0 && reduced.iter().all(|&(c, _)| c != 0) {
        return done(0, NuCase::ModulusPrime);
    }
    if p > h_max && units == forms.len() {
        let roots = roots_mod_prime(forms, p);
        // Distinct roots are guaranteed for parametrized families; anything
        // else falls through to the direct count below.
        if roots.len() == forms.len() {
            return done(forms.len() as u64, NuCase::AllInvertible);
        }
    }
    if p > h_max && units == 1 {
        let vanishes = reduced.iter().any(|&(c, s)| s == 0 && c == 0);
        return done(if vanishes { p } else { 1 }, NuCase::OneInvertible);
    }
    done(roots_mod_prime(forms, p).len() as u64, NuCase::Direct)
}

/// `ν(p) = #{m mod p : ∏(c_i + s_i m) ≡ 0 mod p}` via the case analysis.
///
/// `q` is the character modulus and `h_max = max |h_i − h_j|`.
pub fn nu_p(family: &CongruenceFamily, p: u64, q: u64, h_max: u64) -> Result<NuCount> {
    if !is_prime_trial(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    Ok(local_count(&family.forms, p, Some(q), h_max))
}

/// `ν(d) = ∏_{p | d} ν(p)` for squarefree `d` within the table.
pub fn nu_d(
    family: &CongruenceFamily,
    d: u64,
    q: u64,
    h_max: u64,
    table: &SieveTable,
) -> Result<u64> {
    let mut product = 1u64;
    if d == 1 {
        return Ok(1);
    }
    for (p, e) in table.prime_powers(d)? {
        if e > 1 {
            return Err(Error::InvalidInput(format!("{d} is not squarefree")));
        }
        product *= local_count(&family.forms, p, Some(q), h_max).value;
    }
    Ok(product)
}

/// `N(p) = #{n mod p : ∏(b_i* + n a_i*) ≡ 0 mod p}`; `factors[i] = (b_i*, a_i*)`.
pub fn root_count_mod_p(factors: &[(i64, i64)], p: u64, h_max: u64) -> Result<NuCount> {
    if !is_prime_trial(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if factors.is_empty() {
        return Err(Error::InvalidInput("no factors".into()));
    }
    let forms: Vec<(i128, i128)> = factors.iter().map(|&(b, a)| (b as i128, a as i128)).collect();
    Ok(local_count(&forms, p, None, h_max))
}

/// Residues `n mod q` with `∏(b_i* + n a_i*)` coprime to `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoprimeResidueCount {
    pub q: u64,
    /// `∏_{p^α ∥ q} p^{α−1}(p − N(p))`.
    pub formula: u64,
    /// Direct enumeration, when `q ≤ DIRECT_ENUMERATION_LIMIT`.
    pub direct: Option<u64>,
}

impl CoprimeResidueCount {
    pub fn agree(&self) -> bool {
        self.direct.is_none_or(|d| d == self.formula)
    }
}

pub fn coprime_residue_count(factors: &[(i64, i64)], q: u64) -> Result<CoprimeResidueCount> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if q > MAX_RESIDUE_MODULUS {
        return Err(Error::Capacity(format!(
            "modulus {q} exceeds {MAX_RESIDUE_MODULUS}"
        )));
    }
    if factors.is_empty() {
        return Err(Error::InvalidInput("no factors".into()));
    }
    let forms: Vec<(i128, i128)> = factors.iter().map(|&(b, a)| (b as i128, a as i128)).collect();
    let mut formula = 1u64;
    for (p, e) in factor_trial(q) {
        let n_p = roots_mod_prime(&forms, p).len() as u64;
        formula *= p.pow(e - 1) * (p - n_p);
    }
    let direct = (q <= DIRECT_ENUMERATION_LIMIT).then(|| {
        (0..q)
            .filter(|&n| {
                forms.iter().all(|&(b, a)| {
                    let v = rem_euclid_u64(b + a * n as i128, q);
                    gcd_u64(v, q) == 1
                })
            })
            .count() as u64
    });
    Ok(CoprimeResidueCount { q, formula, direct })
}

/// Enumerable shapes for the sifted set `𝒜`.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    /// `{n ∈ [lo, hi] : n ≡ residue mod modulus}`.
    Progression {
        lo: i64,
        hi: i64,
        modulus: u64,
        residue: u64,
    },
    /// The values `∏(c_i + s_i m)` for `m ∈ [lo, hi]`, one element per `m`.
    LinearForms {
        family: CongruenceFamily,
        lo: i64,
        hi: i64,
    },
}

impl SetSpec {
    pub fn interval(lo: i64, hi: i64) -> Self {
        SetSpec::Progression {
            lo,
            hi,
            modulus: 1,
            residue: 0,
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            SetSpec::Progression {
                lo,
                hi,
                modulus,
                residue,
            } => count_in_class(*lo, *hi, *modulus as i128, *residue as i128) as u64,
            SetSpec::LinearForms { lo, hi, .. } => (hi - lo + 1).max(0) as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the element indexed by `t` shares a prime with the product
    /// of `primes` (`t` is the integer itself for progressions, `m` otherwise).
    fn hits(&self, t: i64, primes: &[u64]) -> bool {
        match self {
            SetSpec::Progression { .. } => {
                let n = t.unsigned_abs();
                primes.iter().any(|&p| n % p == 0)
            }
            SetSpec::LinearForms { family, .. } => primes.iter().any(|&p| {
                family
                    .forms
                    .iter()
                    .any(|&(c, s)| rem_euclid_u64(c + s * t as i128, p) == 0)
            }),
        }
    }

    /// `A_d = #{a ∈ 𝒜 : d | a}` for squarefree `d = ∏ primes`, without scanning.
    fn count_divisible(&self, primes: &[u64]) -> Result<u128> {
        match self {
            SetSpec::Progression {
                lo,
                hi,
                modulus,
                residue,
            } => {
                let d = checked_product(primes)?;
                let Some((m, r)) = crt(*modulus as i128, *residue as i128, d, 0)? else {
                    return Ok(0);
                };
                Ok(count_in_class(*lo, *hi, m, r))
            }
            SetSpec::LinearForms { family, lo, hi } => {
                let mut classes = vec![0i128];
                let mut modulus = 1i128;
                for &p in primes {
                    let roots = roots_mod_prime(&family.forms, p);
                    let mut next = Vec::with_capacity(classes.len() * roots.len());
                    let mut new_modulus = modulus;
                    for &c in &classes {
                        for &root in &roots {
                            let (m, r) = crt(modulus, c, p as i128, root as i128)?
                                .expect("coprime moduli");
                            new_modulus = m;
                            next.push(r);
                        }
                    }
                    modulus = new_modulus;
                    classes = next;
                    if classes.is_empty() {
                        return Ok(0);
                    }
                }
                Ok(classes
                    .iter()
                    .map(|&r| count_in_class(*lo, *hi, modulus, r))
                    .sum())
            }
        }
    }

    fn scan_range(&self) -> (i64, i64) {
        match self {
            SetSpec::Progression { lo, hi, .. } | SetSpec::LinearForms { lo, hi, .. } => (*lo, *hi),
        }
    }

    fn contains_index(&self, t: i64) -> bool {
        match self {
            SetSpec::Progression {
                modulus, residue, ..
            } => rem_euclid_u64(t as i128, *modulus) == *residue % *modulus,
            SetSpec::LinearForms { .. } => true,
        }
    }
}

fn checked_product(primes: &[u64]) -> Result<i128> {
    primes.iter().try_fold(1i128, |acc, &p| {
        acc.checked_mul(p as i128)
            .ok_or(Error::Overflow("product of sieving primes"))
    })
}

/// `#{t ∈ [lo, hi] : t ≡ r mod m}`.
fn count_in_class(lo: i64, hi: i64, m: i128, r: i128) -> u128 {
    if hi < lo {
        return 0;
    }
    let upto = |x: i128| (x - r).div_euclid(m);
    (upto(hi as i128) - upto(lo as i128 - 1)) as u128
}

/// Combines `x ≡ r1 mod m1`, `x ≡ r2 mod m2`; `None` when incompatible.
fn crt(m1: i128, r1: i128, m2: i128, r2: i128) -> Result<Option<(i128, i128)>> {
    let (g, s, _) = ext_gcd(m1, m2);
    let diff = r2 - r1;
    if diff % g != 0 {
        return Ok(None);
    }
    let overflow = || Error::Overflow("Chinese remaindering");
    let lcm = (m1 / g).checked_mul(m2).ok_or_else(overflow)?;
    let step = m2 / g;
    let t = (diff / g).rem_euclid(step) * s.rem_euclid(step) % step;
    let x = m1
        .checked_mul(t)
        .and_then(|v| v.checked_add(r1))
        .ok_or_else(overflow)?;
    Ok(Some((lcm, x.rem_euclid(lcm))))
}

/// A finite sieve problem: sift `𝒜` by the primes `𝒫` with density `ν` at scale `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveProblem {
    x: f64,
    primes: Vec<u64>,
    nu: Vec<u64>,
    set: SetSpec,
}

impl SieveProblem {
    /// `nu[i]` is `ν(primes[i])`; primes must be strictly ascending.
    pub fn new(x: f64, primes: Vec<u64>, nu: Vec<u64>, set: SetSpec) -> Result<Self> {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::InvalidInput(format!("scale X must be finite and non-negative, got {x}")));
        }
        if primes.len() != nu.len() {
            return Err(Error::InvalidInput("one density value per prime is required".into()));
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime_trial(p)) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("primes must be strictly ascending".into()));
        }
        match &set {
            SetSpec::Progression { modulus: 0, .. } => {
                return Err(Error::InvalidInput("progression modulus must be positive".into()))
            }
            SetSpec::Progression { lo, hi, .. } | SetSpec::LinearForms { lo, hi, .. }
                if lo > hi && hi.checked_add(1) != Some(*lo) =>
            {
                return Err(Error::InvalidInput(format!("empty range must be written [lo, lo-1], got [{lo}, {hi}]")))
            }
            _ => {}
        }
        Ok(Self { x, primes, nu, set })
    }

    /// Every prime removes the same number of classes.
    pub fn with_constant_nu(x: f64, primes: Vec<u64>, nu: u64, set: SetSpec) -> Result<Self> {
        let n = primes.len();
        Self::new(x, primes, vec![nu; n], set)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn nu(&self) -> &[u64] {
        &self.nu
    }

    pub fn set(&self) -> &SetSpec {
        &self.set
    }

    /// `max 𝒫`, or 1 for an empty prime set.
    pub fn sifting_limit(&self) -> u64 {
        self.primes.last().copied().unwrap_or(1)
    }

    /// Axiom 1's `ν(p) < p` for every sieving prime.
    pub fn check_axiom1(&self) -> Result<()> {
        for (&p, &v) in self.primes.iter().zip(&self.nu) {
            if v == p {
                return Err(Error::Degenerate { p });
            }
            if v > p {
                return Err(Error::Axiom {
                    at: p,
                    reason: format!("nu(p) = {v} exceeds p"),
                });
            }
        }
        Ok(())
    }

    /// Remainder `r_d = A_d − ν(d) X / d` for the squarefree `d` with the given prime indices.
    pub fn remainder(&self, indices: &[usize]) -> Result<f64> {
        let primes: Vec<u64> = indices.iter().map(|&i| self.primes[i]).collect();
        let a_d = self.set.count_divisible(&primes)?;
        let density = indices
            .iter()
            .fold(1.0, |acc, &i| acc * self.nu[i] as f64 / self.primes[i] as f64);
        Ok(a_d as f64 - density * self.x)
    }
}

/// Sifted count computed twice, independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SExact {
    /// `#{a ∈ 𝒜 : (a, 𝒫) = 1}` by scanning `𝒜`.
    pub scan: u64,
    /// `Σ_{d | 𝒫} μ(d) A_d` with closed-form `A_d`.
    pub inclusion_exclusion: i128,
}

impl SExact {
    pub fn agree(&self) -> bool {
        self.scan as i128 == self.inclusion_exclusion
    }
}

/// Exact sifted count by direct scan and by inclusion-exclusion.
pub fn s_exact(problem: &SieveProblem) -> Result<SExact> {
    let primes = &problem.primes;
    if primes.len() > MAX_INCLUSION_EXCLUSION_PRIMES {
        return Err(Error::Capacity(format!(
            "inclusion-exclusion over {} primes (limit {MAX_INCLUSION_EXCLUSION_PRIMES})",
            primes.len()
        )));
    }
    let (lo, hi) = problem.set.scan_range();
    let mut scan = 0u64;
    if lo <= hi {
        for t in lo..=hi {
            if problem.set.contains_index(t) && !problem.set.hits(t, primes) {
                scan += 1;
            }
        }
    }
    let mut inclusion_exclusion = 0i128;
    let mut chosen = Vec::with_capacity(primes.len());
    for mask in 0u32..(1u32 << primes.len()) {
        chosen.clear();
        chosen.extend((0..primes.len()).filter(|i| mask >> i & 1 == 1).map(|i| primes[i]));
        let a_d = problem.set.count_divisible(&chosen)? as i128;
        if chosen.len() % 2 == 0 {
            inclusion_exclusion += a_d;
        } else {
            inclusion_exclusion -= a_d;
        }
    }
    Ok(SExact {
        scan,
        inclusion_exclusion,
    })
}

/// Main term and error budgets of the fundamental lemma at level `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlstEstimate {
    /// `X ∏_{p ∈ 𝒫} (1 − ν(p)/p)`.
    pub main: f64,
    pub u: f64,
    /// `u^{−u/2}`.
    pub relative_error_budget: f64,
    /// `Σ_{d ≤ y^u, d | 𝒫} |r_d|`.
    pub remainder_budget: f64,
    /// `floor(y^u)`.
    pub level: u64,
}

impl FlstEstimate {
    /// `constant · (u^{−u/2} · main + Σ|r_d|)`.
    pub fn error_bound(&self, constant: f64) -> f64 {
        constant * (self.relative_error_budget * self.main + self.remainder_budget)
    }

    pub fn holds(&self, sifted: f64, constant: f64) -> bool {
        (sifted - self.main).abs() <= self.error_bound(constant)
    }

    /// Smallest constant for which [`holds`](Self::holds) is true.
    pub fn measured_constant(&self, sifted: f64) -> f64 {
        let scale = self.error_bound(1.0);
        let gap = (sifted - self.main).abs();
        if gap == 0.0 {
            0.0
        } else {
            gap / scale
        }
    }
}

pub fn flst_estimate(problem: &SieveProblem, u: f64) -> Result<FlstEstimate> {
    if !(u.is_finite() && u >= 1.0) {
        return Err(Error::InvalidInput(format!("level parameter u must be >= 1, got {u}")));
    }
    problem.check_axiom1()?;
    let main = problem
        .primes
        .iter()
        .zip(&problem.nu)
        .fold(problem.x, |acc, (&p, &v)| acc * (1.0 - v as f64 / p as f64));
    let y = problem.sifting_limit();
    let level = least_integer_above_power(y, u) - 1;
    let mut remainder_budget = 0.0;
    let mut stack: Vec<(usize, u64, Vec<usize>)> = vec![(0, 1, Vec::new())];
    while let Some((start, d, indices)) = stack.pop() {
        remainder_budget += problem.remainder(&indices)?.abs();
        for i in start..problem.primes.len() {
            let Some(next) = d.checked_mul(problem.primes[i]).filter(|&n| n <= level) else {
                break;
            };
            let mut ext = indices.clone();
            ext.push(i);
            stack.push((i + 1, next, ext));
        }
    }
    Ok(FlstEstimate {
        main,
        u,
        relative_error_budget: libm::pow(u, -u / 2.0),
        remainder_budget,
        level,
    })
}

/// Density-sum regularity and the size cap on `ν(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Axiom2Report {
    /// `sup_{2 ≤ ω ≤ max 𝒫} |Σ_{p ≤ ω} ν(p) log p / p − κ log ω|`.
    pub sup_deviation: f64,
    /// Where the supremum is attained (a left limit is reported at the prime itself).
    pub argmax: f64,
    /// `ν(p) ≤ min{k_cap, (1 − ε) p}` for every `p`.
    pub cap_holds: bool,
    pub cap_violations: Vec<u64>,
}

pub fn axiom2_check(problem: &SieveProblem, kappa: f64, k_cap: f64, eps: f64) -> Axiom2Report {
    let mut sup = 0.0f64;
    let mut argmax = 0.0;
    let mut mass = 0.0;
    let mut visit = |mass: f64, omega: f64| {
        let dev = (mass - kappa * libm::log(omega)).abs();
        if dev > sup {
            sup = dev;
            argmax = omega;
        }
    };
    let mut cap_violations = Vec::new();
    if !problem.primes.is_empty() {
        visit(0.0, 2.0);
    }
    for (&p, &v) in problem.primes.iter().zip(&problem.nu) {
        let pf = p as f64;
        visit(mass, pf);
        mass += v as f64 * libm::log(pf) / pf;
        visit(mass, pf);
        if v as f64 > k_cap.min((1.0 - eps) * pf) {
            cap_violations.push(p);
        }
    }
    Axiom2Report {
        sup_deviation: sup,
        argmax,
        cap_holds: cap_violations.is_empty(),
        cap_violations,
    }
}

/// `Σ_{d ≤ r^u} τ_κ(d)` against `r^u (u log r)^κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorSumBound {
    /// `floor(r^u)`.
    pub limit: u64,
    pub exact: u128,
    pub bound: f64,
}

impl DivisorSumBound {
    pub fn ratio(&self) -> f64 {
        self.exact as f64 / self.bound
    }
}

pub fn divisor_sum_bound(table: &SieveTable, r: u64, u: f64, kappa: u32) -> Result<DivisorSumBound> {
    if r < 2 {
        return Err(Error::range("r", r, 2, u64::MAX));
    }
    if kappa == 0 {
        return Err(Error::InvalidInput("kappa must be positive".into()));
    }
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::InvalidInput(format!("u must be positive, got {u}")));
    }
    let limit = least_integer_above_power(r, u) - 1;
    if limit > table.limit() {
        return Err(Error::Capacity(format!(
            "r^u = {limit} exceeds the sieve table limit {}",
            table.limit()
        )));
    }
    let mut exact = 0u128;
    for d in 1..=limit {
        exact += table.tau_kappa(d, kappa)?;
    }
    let bound = libm::pow(r as f64, u) * libm::pow(u * libm::log(r as f64), kappa as f64);
    Ok(DivisorSumBound {
        limit,
        exact,
        bound,
    })
}
