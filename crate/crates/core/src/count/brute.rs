use rayon::prelude::*;

use super::{vanishes_mod, CountOptions, Instance};
use crate::error::{Error, Result};
use crate::ff::FieldCtx;
use crate::mpoly::{num_points, point_from_index, FqPoly};

/// Contiguous chunks per count; fixed so the split never depends on the worker count.
const CHUNKS: u64 = 256;
/// Below this many points the count runs on the calling thread.
const SEQUENTIAL_BELOW: u64 = 4096;

fn check_cap(total: u64, cap: u64) -> Result<()> {
    if total > cap {
        return Err(Error::BudgetExceeded {
            what: "points to enumerate",
            size: total,
            limit: cap,
        });
    }
    Ok(())
}

/// Counts `i in 0..total` with `pred(i)`, summing per-chunk counts in chunk order.
pub(crate) fn parallel_count<F>(total: u64, workers: usize, pred: F) -> Result<u64>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    let run_chunk = |c: u64, size: u64| -> Result<u64> {
        let start = c * size;
        let end = (start + size).min(total);
        let mut hits = 0;
        for i in start..end {
            hits += pred(i)? as u64;
        }
        Ok(hits)
    };
    if total < SEQUENTIAL_BELOW {
        return run_chunk(0, total.max(1));
    }
    let size = total.div_ceil(CHUNKS);
    let work = || -> Result<Vec<u64>> {
        (0..CHUNKS).into_par_iter().map(|c| run_chunk(c, size)).collect()
    };
    let parts = if workers == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(work)?
    };
    Ok(parts.iter().sum())
}

/// `|V|` by lifting every point of F_q^n through the box and evaluating each
/// `f_k` modulo `p^(m_k)`.
pub fn count_bruteforce(inst: &Instance, opts: &CountOptions) -> Result<u64> {
    let field = inst.field();
    let ring = inst.ring();
    let n = inst.n();
    let total = num_points(field, n)?;
    check_cap(total, opts.cap)?;
    parallel_count(total, opts.workers, |i| {
        let x = point_from_index(field, n, i);
        let y = inst.boxspec().lift_point(&x)?;
        for c in inst.system() {
            if c.vanishes {
                continue;
            }
            let v = c.f.eval(ring, &y)?;
            if !vanishes_mod(ring, &v, c.m) {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

/// Common zeros of `polys` in F_q^n.
pub fn count_fq_system(ctx: &FieldCtx, polys: &[FqPoly], n: usize, opts: &CountOptions) -> Result<u64> {
    if let Some(bad) = polys.iter().find(|f| f.arity() != n) {
        return Err(Error::ArityMismatch {
            expected: n,
            found: bad.arity(),
        });
    }
    let total = num_points(ctx, n)?;
    check_cap(total, opts.cap)?;
    let live: Vec<&FqPoly> = polys.iter().filter(|f| !f.is_zero()).collect();
    parallel_count(total, opts.workers, |i| {
        let x = point_from_index(ctx, n, i);
        for f in &live {
            if !f.eval(ctx, &x)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_systems() {
        let f = FieldCtx::new(3, 1).unwrap();
        let opts = CountOptions::default();
        assert_eq!(count_fq_system(&f, &[], 3, &opts).unwrap(), 27);
        assert_eq!(count_fq_system(&f, &[FqPoly::var(&f, 0, 1)], 1, &opts).unwrap(), 1);
        let small = CountOptions { cap: 10, ..opts };
        assert!(matches!(count_fq_system(&f, &[], 3, &small), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn worker_count_does_not_change_the_count() {
        let f = FieldCtx::new(2, 2).unwrap();
        let g = FqPoly::from_terms(&f, 6, [(vec![1, 1, 0, 0, 0, 0], f.one()), (vec![0, 0, 1, 0, 0, 1], f.gen())]);
        let counts: Vec<u64> = [0, 1, 3]
            .iter()
            .map(|&w| count_fq_system(&f, &[g.clone()], 6, &CountOptions { workers: w, ..Default::default() }).unwrap())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]));
        // against a plain sequential loop
        let direct = (0..4096u64)
            .filter(|&i| g.eval(&f, &point_from_index(&f, 6, i)).unwrap().is_zero())
            .count() as u64;
        assert_eq!(counts[0], direct);
    }
}
