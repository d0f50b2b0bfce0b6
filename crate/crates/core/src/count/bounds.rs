use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// `max(0, ceil(t))`.
pub fn ceil_star(t: &BigRational) -> u64 {
    if !t.is_positive() {
        return 0;
    }
    let c = t.numer().div_ceil(t.denom());
    c.to_u64().expect("bound fits in u64")
}

/// `ceil*((n - sum_k (p^m_k - 1)/(p - 1) d_k) / max_k p^(m_k - 1) d_k)` for
/// `params = [(d_k, m_k)]`; 0 for an empty system.
pub fn bound_main(p: u64, n: usize, params: &[(u64, u32)]) -> u64 {
    if params.is_empty() {
        return 0;
    }
    let p_big = BigInt::from(p);
    let mut num = BigInt::from(n);
    let mut den = BigInt::zero();
    for &(d, m) in params {
        let pm = num_traits::pow(p_big.clone(), m as usize);
        let geometric = (pm - 1u32) / (&p_big - 1u32);
        num -= geometric * d;
        let lead = num_traits::pow(p_big.clone(), m as usize - 1) * d;
        den = den.max(lead);
    }
    ceil_star(&BigRational::new(num, den))
}

/// Classical `ceil*((n - sum deg f_k) / max deg f_k)`; all degrees must be >= 1.
pub fn ax_katz(n: usize, degrees: &[u64]) -> u64 {
    let params: Vec<(u64, u32)> = degrees.iter().map(|&d| (d, 1)).collect();
    bound_main(2, n, &params)
}
