//! Shared-write views of embedding data for the SGD kernels.
//!
//! Sequential training goes through `[Cell<f64>]`; parallel training goes
//! through relaxed atomics, where concurrent read-modify-write sequences on
//! one coordinate may lose updates. Lost updates are tolerated the same way
//! lock-free SGD tolerates them; there is no undefined behavior.

use std::cell::Cell;
use std::sync::atomic::{AtomicU64, Ordering};

pub(crate) trait RowStore {
    fn get(&self, k: usize) -> f64;
    fn set(&self, k: usize, value: f64);

    #[inline]
    fn read_row(&self, row: usize, out: &mut [f64]) {
        let base = row * out.len();
        for (j, x) in out.iter_mut().enumerate() {
            *x = self.get(base + j);
        }
    }

    /// `row += scale * delta`.
    #[inline]
    fn add_to_row(&self, row: usize, scale: f64, delta: &[f64]) {
        let base = row * delta.len();
        for (j, d) in delta.iter().enumerate() {
            self.set(base + j, self.get(base + j) + scale * d);
        }
    }
}

impl RowStore for [Cell<f64>] {
    #[inline]
    fn get(&self, k: usize) -> f64 {
        self[k].get()
    }

    #[inline]
    fn set(&self, k: usize, value: f64) {
        self[k].set(value)
    }
}

pub(crate) struct AtomicRows(Vec<AtomicU64>);

impl AtomicRows {
    pub(crate) fn from_slice(data: &[f64]) -> Self {
        AtomicRows(data.iter().map(|x| AtomicU64::new(x.to_bits())).collect())
    }

    pub(crate) fn write_back(&self, data: &mut [f64]) {
        for (dst, src) in data.iter_mut().zip(&self.0) {
            *dst = f64::from_bits(src.load(Ordering::Relaxed));
        }
    }
}

impl RowStore for AtomicRows {
    #[inline]
    fn get(&self, k: usize) -> f64 {
        f64::from_bits(self.0[k].load(Ordering::Relaxed))
    }

    #[inline]
    fn set(&self, k: usize, value: f64) {
        self.0[k].store(value.to_bits(), Ordering::Relaxed)
    }
}
