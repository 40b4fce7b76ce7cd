//! Dispatch between rayon data-parallel kernels and their sequential
//! fallbacks.
//!
//! With the `parallel` feature (default) pointwise cell maps and independent
//! probe batches run on the rayon pool; without it the same closures run in
//! plain loops. Every closure writes only to its own element and batch
//! results are merged in input order, so both modes produce identical output.
//! Reductions (quadrature sums) are deliberately *not* parallelised anywhere
//! in this crate: summation order is part of the reproducibility contract.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many cells a parallel pointwise map is not worth the fork.
pub const PAR_MIN_LEN: usize = 1 << 14;

/// Apply `f(index, cell)` to every element.
pub fn for_each_cell<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync,
{
    #[cfg(feature = "parallel")]
    if items.len() >= PAR_MIN_LEN {
        items
            .par_iter_mut()
            .with_min_len(PAR_MIN_LEN / 8)
            .enumerate()
            .for_each(|(i, v)| f(i, v));
        return;
    }
    for (i, v) in items.iter_mut().enumerate() {
        f(i, v);
    }
}

/// Apply `f(a, b)` pairwise, writing into `a`. Slices must match in length.
pub fn zip_apply<A, B, F>(a: &mut [A], b: &[B], f: F)
where
    A: Send,
    B: Sync,
    F: Fn(&mut A, &B) + Sync,
{
    assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    if a.len() >= PAR_MIN_LEN {
        a.par_iter_mut()
            .with_min_len(PAR_MIN_LEN / 8)
            .zip(b.par_iter())
            .for_each(|(x, y)| f(x, y));
        return;
    }
    for (x, y) in a.iter_mut().zip(b.iter()) {
        f(x, y);
    }
}

/// Run independent jobs and collect their outputs in input order.
///
/// This is the probe-level entry point used by sweeps, bisection stages and
/// multi-time curves: each job is a full, self-contained computation.
pub fn map_ordered<I, O, F>(inputs: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync,
{
    #[cfg(feature = "parallel")]
    {
        inputs.par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        inputs.iter().map(&f).collect()
    }
}

/// Apply `f` to disjoint chunks of `chunk` elements (rows of a 2D array).
pub fn for_each_chunk<T, F>(items: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(&mut [T]) + Sync,
{
    #[cfg(feature = "parallel")]
    if items.len() >= PAR_MIN_LEN {
        items.par_chunks_mut(chunk).for_each(|c| f(c));
        return;
    }
    for c in items.chunks_mut(chunk) {
        f(c);
    }
}
