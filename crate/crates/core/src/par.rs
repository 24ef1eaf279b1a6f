//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! rayon's pool; without it (or after `set_mode(Mode::Sequential)`) the same
//! closures run in a plain loop. Output order is always the input order.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Parallel,
}

static FORCE_SEQ: AtomicBool = AtomicBool::new(false);

pub fn set_mode(mode: Mode) {
    FORCE_SEQ.store(mode == Mode::Sequential, Ordering::SeqCst);
}

pub fn mode() -> Mode {
    if cfg!(feature = "parallel") && !FORCE_SEQ.load(Ordering::SeqCst) {
        Mode::Parallel
    } else {
        Mode::Sequential
    }
}

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode() == Mode::Parallel {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode() == Mode::Parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

pub fn flat_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Vec<R> + Sync + Send,
{
    map(items, f).into_iter().flatten().collect()
}

pub fn all<T, F>(items: &[T], f: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode() == Mode::Parallel {
        return items.par_iter().all(f);
    }
    items.iter().all(f)
}
