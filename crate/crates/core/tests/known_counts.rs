//! Counts of the linear form on small boxes, checked against a direct count
//! of the equivalent digit system written out by hand over F_2 and F_9.

use wittbox::count::{count_bruteforce, verify, CountOptions, Tier, Verdict};
use wittbox::suite::{power_box_instance, product_box_instance, teichmuller_linear_instance};

/// F_9 as a + b i with i^2 = -1, independent of the library's field code.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct F9(u8, u8);

impl F9 {
    const ZERO: F9 = F9(0, 0);
    const ONE: F9 = F9(1, 0);

    fn add(self, o: F9) -> F9 {
        F9((self.0 + o.0) % 3, (self.1 + o.1) % 3)
    }

    fn mul(self, o: F9) -> F9 {
        let (a, b, c, d) = (self.0 as i32, self.1 as i32, o.0 as i32, o.1 as i32);
        F9(((a * c - b * d).rem_euclid(3)) as u8, ((a * d + b * c).rem_euclid(3)) as u8)
    }

    fn scale(self, k: u8) -> F9 {
        F9(self.0 * k % 3, self.1 * k % 3)
    }

    fn pow(self, e: u32) -> F9 {
        (0..e).fold(F9::ONE, |acc, _| acc.mul(self))
    }

    fn all() -> Vec<F9> {
        (0..9).map(|k| F9(k / 3, k % 3)).collect()
    }
}

/// Solutions over F_9 of `sum y = 0` and
/// `sum y_j^(3 u_j) - sum_t (1/3) (3; t) y^t = 0`, t over `|t| = 3`, `t_i < 3`.
/// `shifted = false` drops the first sum (the Teichmuller box).
fn f9_digit_system_count(u: &[u32; 5], shifted: bool) -> u64 {
    let elems = F9::all();
    let mut count = 0;
    let mut y = [F9::ZERO; 5];
    for idx in 0..9usize.pow(5) {
        let mut k = idx;
        for slot in y.iter_mut().rev() {
            *slot = elems[k % 9];
            k /= 9;
        }
        if y.iter().fold(F9::ZERO, |a, &b| a.add(b)) != F9::ZERO {
            continue;
        }
        let mut second = F9::ZERO;
        if shifted {
            for j in 0..5 {
                second = second.add(y[j].pow(3 * u[j]));
            }
        }
        // (1/3)(3; 1,1,1) = 2 and (1/3)(3; 2,1) = 1, subtracted
        for a in 0..5 {
            for b in a + 1..5 {
                for c in b + 1..5 {
                    second = second.add(y[a].mul(y[b]).mul(y[c]).scale(2 * 2));
                }
            }
            for b in 0..5 {
                if a != b {
                    second = second.add(y[a].mul(y[a]).mul(y[b]).scale(2));
                }
            }
        }
        if second == F9::ZERO {
            count += 1;
        }
    }
    count
}

/// Solutions over F_2 of `y1 + y2 + y3 + y4 = 0`, `y1 y2 y3 y4 + a - e_2(y) = 0`.
fn f2_digit_system_count(a: u8) -> u64 {
    (0..16u8)
        .filter(|bits| {
            let y: Vec<u8> = (0..4).map(|j| (bits >> (3 - j)) & 1).collect();
            let e1 = y.iter().sum::<u8>() % 2;
            let mut e2 = 0;
            for i in 0..4 {
                for j in i + 1..4 {
                    e2 += y[i] * y[j];
                }
            }
            let prod = y.iter().product::<u8>();
            e1 == 0 && (prod + a + e2) % 2 == 0
        })
        .count() as u64
}

#[test]
fn hand_written_systems_agree_with_each_other() {
    assert_eq!(f2_digit_system_count(0), 1);
    assert_eq!(f2_digit_system_count(1), 7);
}

#[test]
fn product_box_matches_digit_system() {
    let opts = CountOptions::default();
    for a in [0u64, 1] {
        let inst = product_box_instance(a).unwrap();
        let report = verify(&inst, &opts).unwrap();
        assert_eq!(report.count, f2_digit_system_count(a as u8));
        assert_eq!(report.fq_count, Some(report.count));
        assert_eq!(report.tier, Tier::None);
    }
}

#[test]
fn power_boxes_match_digit_system() {
    let opts = CountOptions::default();
    for u in [[4u32, 4, 4, 4, 4], [6, 6, 6, 6, 6], [8, 8, 8, 8, 8], [4, 7, 2, 5, 8]] {
        let inst = power_box_instance(&u).unwrap();
        let brute = count_bruteforce(&inst, &opts).unwrap();
        assert_eq!(brute, f9_digit_system_count(&u, true), "u = {u:?}");
    }
}

#[test]
fn teichmuller_linear_form_over_z9() {
    let inst = teichmuller_linear_instance(3, 2, 5, 2).unwrap();
    let report = verify(&inst, &CountOptions::default()).unwrap();
    assert_eq!(report.count, f9_digit_system_count(&[0; 5], false));
    assert_eq!(report.count, 1161);
    assert_eq!(report.ordp, Some(3));
    assert_eq!(report.tier, Tier::Strong);
    assert_eq!(report.bound, 1);
    assert_eq!(report.verdict, Verdict::Holds);
}

#[test]
fn degree_violations_defeat_the_bound() {
    let opts = CountOptions::default();
    let product = verify(&product_box_instance(1).unwrap(), &opts).unwrap();
    assert_eq!((product.count, product.ordp, product.bound), (7, Some(0), 1));
    assert_eq!(product.verdict, Verdict::Informational { satisfied: false });
    // the term x1 with beta = (1) picks up g_11 of degree 4 > 2
    assert!(product
        .strong_violations
        .iter()
        .any(|v| v.k == 1 && v.level == 0 && v.shift == 1 && v.degree == 4 && v.allowed == 2));

    for u in [[8u32, 8, 8, 8, 8], [4, 7, 2, 5, 8]] {
        let r = verify(&power_box_instance(&u).unwrap(), &opts).unwrap();
        assert_eq!(r.tier, Tier::None);
        assert_eq!(r.ordp, Some(1));
        assert_eq!(r.required_ordp, 2);
        assert_eq!(r.split, Some(true));
    }
}
