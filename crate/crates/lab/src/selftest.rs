//! Reduced-scale invariant suite behind the `selftest` subcommand.

use std::time::{Duration, Instant};

use chowla_core::arith::{is_prime_trial, SieveTable};
use chowla_core::characters::{
    char_sum_poly, weil_bound_check, LinearFactorPoly, RealCharacter, SquareClass,
};
use chowla_core::diophantine::{brute_force_solutions, solve_system, DiophantineSystem};
use chowla_core::experiments::{
    chowla_correlation, correlation_difference, even_multiplicity_tuple_count,
    moment_tail_experiment, ArithFunction,
};
use chowla_core::sieve::{flst_estimate, nu_p, s_exact, CongruenceFamily, SetSpec, SieveProblem};
use rand::{rngs::StdRng, Rng, SeedableRng};

use crate::parallel;

/// Largest integer the suite's table must cover.
pub const TABLE_SIZE: u64 = 100_010;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

type Check = fn(&SieveTable, usize) -> Result<String, String>;

const CHECKS: &[(&str, Check)] = &[
    ("quadratic character sum of x(x+1)", check_consecutive_product),
    ("Weil bound", check_weil),
    ("Diophantine family against scan", check_diophantine),
    ("local densities against direct count", check_local_densities),
    ("fundamental lemma on an interval", check_fundamental_lemma),
    ("Liouville summatory function", check_summatory),
    ("Chebyshev chain", check_chebyshev),
    ("even-multiplicity tuples", check_tuples),
    ("lambda_r difference inequality", check_difference),
    ("thread-count invariance", check_threads),
];

/// Runs every check against a shared table; `threads` feeds the parallel check.
pub fn run_checks(table: &SieveTable, threads: usize) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(name, check)| {
            let start = Instant::now();
            let result = check(table, threads);
            CheckOutcome {
                name,
                passed: result.is_ok(),
                detail: result.unwrap_or_else(|e| e),
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_consecutive_product(_: &SieveTable, _: usize) -> Result<String, String> {
    let f = LinearFactorPoly::from_shifts(&[0, 1]).map_err(|e| e.to_string())?;
    let mut n = 0;
    for p in (3..=3000).filter(|&p| is_prime_trial(p)) {
        let chi = RealCharacter::legendre(p).map_err(|e| e.to_string())?;
        let s = char_sum_poly(&chi, &f);
        ensure(s == -1, || format!("p = {p}: sum {s}"))?;
        n += 1;
    }
    Ok(format!("{n} primes"))
}

fn check_weil(_: &SieveTable, _: usize) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(11);
    let primes: Vec<u64> = (3..2000).filter(|&p| is_prime_trial(p)).collect();
    let mut tested = 0;
    while tested < 200 {
        let p = primes[rng.gen_range(0..primes.len())];
        let factors = (0..rng.gen_range(1..=5))
            .map(|_| (rng.gen_range(0..p as i64), rng.gen_range(1..p as i64)))
            .collect();
        let f = LinearFactorPoly::new(factors).map_err(|e| e.to_string())?;
        if f.square_class_mod_p(p) != SquareClass::NonSquare {
            continue;
        }
        let chi = RealCharacter::legendre(p).map_err(|e| e.to_string())?;
        let r = weil_bound_check(&chi, &f).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("{f} mod {p}: |{}| > {:.3}", r.sum, r.bound))?;
        tested += 1;
    }
    Ok(format!("{tested} polynomials"))
}

fn check_diophantine(_: &SieveTable, _: usize) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(12);
    let mut solvable = 0;
    for _ in 0..200 {
        let k = rng.gen_range(1..=3);
        let a: Vec<i64> = (0..=k).map(|_| rng.gen_range(1..=20)).collect();
        let mut h = Vec::new();
        while h.len() < k {
            let v = rng.gen_range(-10..=10);
            if !h.contains(&v) {
                h.push(v);
            }
        }
        let sys = DiophantineSystem::new(a, h).map_err(|e| e.to_string())?;
        let out = solve_system(&sys).map_err(|e| e.to_string())?;
        ensure(out.snf.verify(&sys.matrix()).unwrap_or(false), || format!("{sys:?}: UAV != B"))?;
        let brute = brute_force_solutions(&sys, -500, 500);
        let found = match &out.family {
            Some(fam) => {
                solvable += 1;
                let lcm = out.lcm as i128;
                ensure(
                    fam.step.iter().zip(sys.a()).all(|(&s, &a)| s * a as i128 == lcm),
                    || format!("{sys:?}: step {:?}", fam.step),
                )?;
                fam.members_in_box(-500, 500).map_err(|e| e.to_string())?
            }
            None => Vec::new(),
        };
        ensure(found == brute, || format!("{sys:?}: family and scan differ"))?;
    }
    Ok(format!("200 systems, {solvable} solvable"))
}

fn check_local_densities(_: &SieveTable, _: usize) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(13);
    let primes: Vec<u64> = (2..=100).filter(|&p| is_prime_trial(p)).collect();
    for _ in 0..100 {
        let forms = (0..rng.gen_range(1..=4))
            .map(|_| (rng.gen_range(-100..100), rng.gen_range(-100..100)))
            .collect();
        let fam = CongruenceFamily::new(forms).map_err(|e| e.to_string())?;
        let q = rng.gen_range(1..30);
        let h_max = rng.gen_range(0..20);
        for &p in &primes {
            let nu = nu_p(&fam, p, q, h_max).map_err(|e| e.to_string())?;
            let direct = fam.count_roots_mod(p);
            ensure(nu.value == direct, || format!("p = {p}: {} vs {direct}", nu.value))?;
        }
    }
    Ok("100 families, primes <= 100".into())
}

fn check_fundamental_lemma(_: &SieveTable, _: usize) -> Result<String, String> {
    let primes: Vec<u64> = (2..=20).filter(|&p| is_prime_trial(p)).collect();
    let problem = SieveProblem::with_constant_nu(100_000.0, primes, 1, SetSpec::interval(1, 100_000))
        .map_err(|e| e.to_string())?;
    let s = s_exact(&problem).map_err(|e| e.to_string())?;
    ensure(s.agree(), || format!("scan {} vs inclusion-exclusion {}", s.scan, s.inclusion_exclusion))?;
    for u in [1.0, 2.0, 3.0] {
        let est = flst_estimate(&problem, u).map_err(|e| e.to_string())?;
        ensure(est.holds(s.scan as f64, 10.0), || format!("u = {u}: {est:?}"))?;
    }
    Ok(format!("S = {}", s.scan))
}

fn check_summatory(table: &SieveTable, _: usize) -> Result<String, String> {
    let report = chowla_correlation(table, &ArithFunction::Liouville, 10_000, &[0])
        .map_err(|e| e.to_string())?;
    let mut oracle = 0i64;
    for n in 1..=10_000u64 {
        let omega = table.big_omega(n).map_err(|e| e.to_string())?;
        oracle += if omega % 2 == 0 { 1 } else { -1 };
    }
    ensure(report.raw_sum == oracle, || format!("{} vs {oracle}", report.raw_sum))?;
    Ok(format!("L(10^4) = {oracle}"))
}

fn check_chebyshev(table: &SieveTable, _: usize) -> Result<String, String> {
    let r = moment_tail_experiment(table, 20_000, 10, Some(4), 0.6, &[1.0; 10])
        .map_err(|e| e.to_string())?;
    ensure(r.chain_holds() == Some(true), || format!("{r:?}"))?;
    Ok(format!("count {} <= majorant {:.1}", r.count, r.chebyshev.unwrap_or(f64::NAN) * r.x as f64))
}

fn check_tuples(_: &SieveTable, _: usize) -> Result<String, String> {
    for k in [2u32, 4] {
        for m in k as u64..=8 {
            let c = even_multiplicity_tuple_count(m, k).map_err(|e| e.to_string())?;
            ensure(c.within_bound() == Some(true), || format!("m = {m}, k = {k}: {c:?}"))?;
            if k == 2 {
                ensure(c.exact == Some(m as u128), || format!("m = {m}: {c:?}"))?;
            }
        }
    }
    Ok("k in {2, 4}, m <= 8".into())
}

fn check_difference(table: &SieveTable, _: usize) -> Result<String, String> {
    let chi = RealCharacter::from_discriminant(-4).map_err(|e| e.to_string())?;
    let r = correlation_difference(table, &chi, 100, 20_000, &[0, 1]).map_err(|e| e.to_string())?;
    ensure(r.holds(), || format!("{r:?}"))?;
    Ok(format!("{} <= {}", r.lhs, r.majorant))
}

fn check_threads(table: &SieveTable, threads: usize) -> Result<String, String> {
    let f = ArithFunction::Liouville;
    let one = parallel::correlate(table, &f, 100_000, &[0, 1], 1).map_err(|e| e.to_string())?;
    let many = parallel::correlate(table, &f, 100_000, &[0, 1], threads.max(2))
        .map_err(|e| e.to_string())?;
    ensure(one.raw_sum == many.raw_sum, || format!("{} vs {}", one.raw_sum, many.raw_sum))?;
    Ok(format!("raw_sum {}", one.raw_sum))
}
