//! Thin data-parallel shim.
//!
//! With the default `parallel` feature the helpers fan out over rayon's
//! global pool; without it they degrade to plain sequential iteration so
//! the crate stays usable on targets where rayon is unwanted. All call
//! sites are embarrassingly parallel maps, so results are identical in
//! both modes up to floating-point-irrelevant ordering (outputs keep the
//! input order either way).

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over an index range, in parallel when enabled.
pub fn par_map_range<U, F>(range: std::ops::Range<usize>, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        range.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let ys = par_map(&xs, |x| x * x);
        assert_eq!(ys, xs.iter().map(|x| x * x).collect::<Vec<_>>());
    }

    #[test]
    fn par_map_range_matches_sequential() {
        let ys = par_map_range(0..100, |i| i as f64 / 7.0);
        for (i, y) in ys.iter().enumerate() {
            assert_eq!(*y, i as f64 / 7.0);
        }
    }
}
