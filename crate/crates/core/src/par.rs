//! Thin indirection over rayon so every batch loop in the crate has a
//! sequential fallback when the `parallel` feature is off. Results are
//! bit-identical either way: the closures are pure and the reductions
//! (collection in order, exact counting) do not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_slice<T: Sync, U: Send, F: Fn(&T) -> U + Sync>(items: &[T], f: F) -> Vec<U> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_slice<T, U, F: Fn(&T) -> U>(items: &[T], f: F) -> Vec<U> {
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn count_slice<T: Sync, F: Fn(&T) -> bool + Sync>(items: &[T], pred: F) -> usize {
    items.par_iter().filter(|t| pred(t)).count()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn count_slice<T, F: Fn(&T) -> bool>(items: &[T], pred: F) -> usize {
    items.iter().filter(|t| pred(t)).count()
}
