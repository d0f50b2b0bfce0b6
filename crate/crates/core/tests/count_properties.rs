use proptest::prelude::*;
use wittbox::count::{
    bound_main, count_bruteforce, count_fq_system, reduce_to_fq, teich_expand, verify, CountOptions, Verdict,
};
use wittbox::suite::{instance_rng, random_instance};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduced_system_counts_agree(index in 0u64..1_000_000) {
        let inst = random_instance(&mut instance_rng(11, index)).unwrap();
        let opts = CountOptions::default();
        let sys = reduce_to_fq(&inst, &opts).unwrap();
        let expected: usize = inst.system().iter().map(|c| c.m as usize).sum();
        prop_assert_eq!(sys.polys.len(), expected);
        let brute = count_bruteforce(&inst, &opts).unwrap();
        prop_assert_eq!(count_fq_system(inst.field(), &sys.polys(), inst.n(), &opts).unwrap(), brute);
    }

    #[test]
    fn expansions_reassemble(index in 0u64..1_000_000) {
        let inst = random_instance(&mut instance_rng(12, index)).unwrap();
        let ring = inst.ring();
        for c in inst.system().iter().filter(|c| !c.vanishes) {
            let back = teich_expand(ring, &c.f, c.m).unwrap().reassemble(ring).unwrap();
            let back = back.map_coeffs(ring, |a| ring.truncate(a, c.m));
            prop_assert_eq!(back, c.f.clone());
        }
    }

    #[test]
    fn bound_holds_whenever_a_hypothesis_does(index in 0u64..1_000_000) {
        let inst = random_instance(&mut instance_rng(13, index)).unwrap();
        let r = verify(&inst, &CountOptions::default()).unwrap();
        if let (Some(o), Verdict::Holds) = (r.ordp, r.verdict) {
            prop_assert!(o as u64 >= r.required_ordp);
        }
        if r.count == 0 {
            prop_assert_eq!(r.verdict, Verdict::Vacuous);
        }
    }

    #[test]
    fn count_ignores_worker_count(index in 0u64..1_000_000, workers in 1usize..4) {
        let inst = random_instance(&mut instance_rng(14, index)).unwrap();
        let serial = CountOptions { workers: 1, ..CountOptions::default() };
        let parallel = CountOptions { workers, ..CountOptions::default() };
        prop_assert_eq!(count_bruteforce(&inst, &serial).unwrap(), count_bruteforce(&inst, &parallel).unwrap());
    }

    #[test]
    fn single_digit_bound_is_ax_katz(p in prop::sample::select(vec![2u64, 3, 5, 7]), n in 0usize..12,
                                     degrees in prop::collection::vec(1u64..6, 1..4)) {
        let params: Vec<(u64, u32)> = degrees.iter().map(|&d| (d, 1)).collect();
        let sum: u64 = degrees.iter().sum();
        let max = *degrees.iter().max().unwrap();
        let expect = if n as u64 > sum { (n as u64 - sum).div_ceil(max) } else { 0 };
        prop_assert_eq!(bound_main(p, n, &params), expect);
    }
}
