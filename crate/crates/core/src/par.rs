//! Data-parallel helpers. With the `parallel` feature disabled every
//! [`Exec`] runs sequentially.

/// How independent work items are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Fan out over the rayon pool when the `parallel` feature is enabled.
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this mode actually runs in parallel in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Maps `f` over `items`, preserving order and stopping at the first error
/// in sequential mode. Results are identical in both modes.
pub(crate) fn try_map<T, R, E, F>(exec: Exec, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let f = |x: &u64| -> Result<u64, ()> { Ok(x * x) };
        assert_eq!(try_map(Exec::Sequential, &xs, f), try_map(Exec::Parallel, &xs, f));
    }

    #[test]
    fn first_error_wins_sequentially() {
        let xs = [1, 2, 3, 4];
        let r: Result<Vec<i32>, i32> = try_map(Exec::Sequential, &xs, |&x| if x >= 2 { Err(x) } else { Ok(x) });
        assert_eq!(r, Err(2));
    }
}
