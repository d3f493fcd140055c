//! Deterministic grid reductions.
//!
//! Work is split into fixed-size chunks that are reduced independently
//! (in parallel) and then combined in chunk order, so results are
//! byte-identical for any thread count. Within a chunk, sums use pairwise
//! combination to keep rounding growth logarithmic.

use crate::scalar::Real;
use num_complex::Complex;
use rayon::prelude::*;

const CHUNK: usize = 4096;

fn pairwise<T: Copy, F: Fn(T, T) -> T + Copy>(buf: &[T], zero: T, add: F) -> T {
    match buf.len() {
        0 => zero,
        1 => buf[0],
        n if n <= 8 => {
            let mut acc = buf[0];
            for v in &buf[1..] {
                acc = add(acc, *v);
            }
            acc
        }
        n => {
            let mid = n / 2;
            add(
                pairwise(&buf[..mid], zero, add),
                pairwise(&buf[mid..], zero, add),
            )
        }
    }
}

/// Pairwise chunked sum of `f(0), ..., f(n-1)`.
pub fn chunked_sum<T: Real>(n: usize, f: impl Fn(usize) -> Complex<T> + Sync) -> Complex<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<Complex<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n);
            let buf: Vec<Complex<T>> = (lo..hi).map(&f).collect();
            pairwise(&buf, zero, |a, b| a + b)
        })
        .collect();
    pairwise(&partials, zero, |a, b| a + b)
}

/// Index and value of the maximum of `f(0), ..., f(n-1)`; ties keep the
/// smallest index. `n` must be at least 1.
pub fn chunked_argmax<T: Real>(n: usize, f: impl Fn(usize) -> T + Sync) -> (usize, T) {
    assert!(n > 0, "argmax over an empty range");
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<(usize, T)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n);
            let mut best = (lo, f(lo));
            for i in lo + 1..hi {
                let v = f(i);
                // NaN poisons the max so callers can detect it.
                if v > best.1 || v.is_nan() {
                    best = (i, v);
                }
                if best.1.is_nan() {
                    break;
                }
            }
            best
        })
        .collect();
    let mut best = partials[0];
    for p in &partials[1..] {
        if p.1 > best.1 || p.1.is_nan() {
            best = *p;
        }
        if best.1.is_nan() {
            break;
        }
    }
    best
}
