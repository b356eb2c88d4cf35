use chowla_core::arith::{lcm_many, SieveTable};
use chowla_core::diophantine::{
    brute_force_solutions, minimal_positive_particular, smith_normal_form, solve_system,
    DiophantineSystem, IntMatrix, SnfMode,
};
use chowla_core::experiments::{correlation_block, ArithFunction};
use chowla_core::sieve::{s_exact, SetSpec, SieveProblem};
use proptest::prelude::*;

fn system() -> impl Strategy<Value = DiophantineSystem> {
    (1usize..=4)
        .prop_flat_map(|k| {
            (
                prop::collection::vec(1i64..=30, k + 1),
                prop::collection::hash_set(-20i64..=20, k),
            )
        })
        .prop_map(|(a, h)| DiophantineSystem::new(a, h.into_iter().collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solution_family_matches_scan(sys in system()) {
        let out = solve_system(&sys).unwrap();
        prop_assert!(out.snf.verify(&sys.matrix()).unwrap());
        let brute = brute_force_solutions(&sys, -600, 600);
        match &out.family {
            None => prop_assert!(brute.is_empty()),
            Some(fam) => {
                prop_assert!(out.necessary_condition);
                let lcm = lcm_many(&sys.a().iter().map(|&a| a as u64).collect::<Vec<_>>()).unwrap();
                for (s, &a) in fam.step.iter().zip(sys.a()) {
                    prop_assert_eq!(*s * a as i128, lcm as i128);
                }
                prop_assert_eq!(fam.members_in_box(-600, 600).unwrap(), brute);
                let min = minimal_positive_particular(fam).unwrap();
                prop_assert!(min.particular.iter().all(|&b| b > 0));
                prop_assert!(min.particular.iter().zip(&min.step).any(|(&b, &s)| b - s <= 0));
                prop_assert!(sys.is_solution(&min.particular));
            }
        }
    }

    #[test]
    fn banded_elimination_is_unimodular(sys in system()) {
        let a = sys.matrix();
        let snf = smith_normal_form(&a, SnfMode::BandedRecursion).unwrap();
        prop_assert!(snf.verify(&a).unwrap());
    }

    #[test]
    fn canonical_form_of_random_matrix(
        rows in 1usize..=4,
        cols in 1usize..=4,
        seed in prop::collection::vec(-50i128..=50, 16),
    ) {
        let a = IntMatrix::new(rows, cols, seed[..rows * cols].to_vec()).unwrap();
        prop_assume!(!a.is_zero());
        let snf = smith_normal_form(&a, SnfMode::Canonical).unwrap();
        prop_assert!(snf.verify(&a).unwrap());
        prop_assert!(snf.has_divisibility_chain());
    }

    #[test]
    fn sifted_count_two_ways(lo in -500i64..500, len in 0i64..3000, mask in 0u32..256) {
        let primes: Vec<u64> = [2u64, 3, 5, 7, 11, 13, 17, 19]
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let problem = SieveProblem::with_constant_nu(
            len as f64,
            primes,
            1,
            SetSpec::interval(lo, lo + len - 1),
        )
        .unwrap();
        prop_assert!(s_exact(&problem).unwrap().agree());
    }
}

#[test]
fn correlation_of_repeated_shift_counts_positive_terms() {
    let table = SieveTable::build(20_000).unwrap();
    for h in [-5i64, 0, 3] {
        let sum = correlation_block(&table, &ArithFunction::Liouville, &[h, h], 1, 10_000).unwrap();
        let positive = (1..=10_000i64).filter(|&n| n + h >= 1).count() as i64;
        assert_eq!(sum, positive);
    }
}
