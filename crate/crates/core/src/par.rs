//! Data-parallel map used by every grid scan and sampling sweep.
//!
//! With the `parallel` feature (on by default) [`ExecMode::Parallel`] runs on
//! the rayon pool; without it both modes run sequentially. Results are always
//! returned in input order, so reports do not depend on the mode.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// Whether this mode actually fans out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }
}

pub fn map_indexed<R, F>(n: usize, mode: ExecMode, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..n).map(f).collect()
}

pub fn map_slice<T, R, F>(items: &[T], mode: ExecMode, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_indexed(items.len(), mode, |i| f(&items[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let seq = map_indexed(1000, ExecMode::Sequential, |i| i * i);
        let par = map_indexed(1000, ExecMode::Parallel, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[31], 961);
        let items: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(map_slice(&items, ExecMode::Parallel, |x| x * 2.0)[9], 18.0);
    }
}
