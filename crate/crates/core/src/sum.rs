//! Compensated, partition-independent reductions.
//!
//! Work is cut into fixed-size chunks whose boundaries depend only on the
//! problem size. Each chunk is reduced sequentially and the partials are
//! merged in chunk order, so the result is bitwise identical whether the
//! chunks run on one thread or many.

use alloc::vec::Vec;
use core::ops::Range;

/// Chunk length used by every indexed reduction.
pub const CHUNK: usize = 512;

/// Neumaier (improved Kahan) running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if crate::math::abs(self.sum) >= crate::math::abs(v) {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl core::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Compensated sum of a slice.
pub fn sum_slice(values: &[f64]) -> f64 {
    values.iter().copied().collect::<NeumaierSum>().value()
}

fn chunk_ranges(n: usize) -> impl Iterator<Item = Range<usize>> + Clone {
    (0..n.div_ceil(CHUNK)).map(move |c| c * CHUNK..((c + 1) * CHUNK).min(n))
}

/// Map every chunk of `0..n` through `f`, returning the partials in chunk order.
pub fn map_chunks<A, F>(n: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<usize>) -> A + Sync + Send,
{
    #[cfg(feature = "std")]
    {
        use rayon::prelude::*;
        let ranges: Vec<Range<usize>> = chunk_ranges(n).collect();
        ranges.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "std"))]
    {
        chunk_ranges(n).map(f).collect()
    }
}

/// Compensated sum of `f(i)` for `i in 0..n`.
pub fn sum_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let partials = map_chunks(n, |r| r.map(&f).collect::<NeumaierSum>());
    let mut total = NeumaierSum::new();
    for p in &partials {
        total.merge(p);
    }
    total.value()
}

/// Fallible variant of [`sum_indexed`]; the first error in index order wins.
pub fn try_sum_indexed<E, F>(n: usize, f: F) -> Result<f64, E>
where
    E: Send,
    F: Fn(usize) -> Result<f64, E> + Sync + Send,
{
    let partials = map_chunks(n, |r| {
        let mut s = NeumaierSum::new();
        for i in r {
            s.add(f(i)?);
        }
        Ok(s)
    });
    let mut total = NeumaierSum::new();
    for p in partials {
        total.merge(&p?);
    }
    Ok(total.value())
}

/// Order-preserving map of `f` over `0..n`.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let partials = map_chunks(n, |r| r.map(&f).collect::<Vec<T>>());
    let mut out = Vec::with_capacity(n);
    for p in partials {
        out.extend(p);
    }
    out
}

/// Fallible order-preserving map.
pub fn try_map_indexed<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    let partials = map_chunks(n, |r| r.map(&f).collect::<Result<Vec<T>, E>>());
    let mut out = Vec::with_capacity(n);
    for p in partials {
        out.extend(p?);
    }
    Ok(out)
}
