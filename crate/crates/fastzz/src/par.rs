//! Feature-switched data parallelism. With the `parallel` feature enabled
//! (the default) these helpers fan work out over rayon; without it they fall
//! back to plain sequential iterators with identical results.

#[cfg(feature = "parallel")]
pub(crate) trait MaybeParIter: rayon::iter::IntoParallelIterator + IntoIterator {
    type Iter;
    fn maybe_par_iter(self) -> <Self as MaybeParIter>::Iter;
}

#[cfg(feature = "parallel")]
impl<I: rayon::iter::IntoParallelIterator + IntoIterator> MaybeParIter for I {
    type Iter = <Self as rayon::iter::IntoParallelIterator>::Iter;

    fn maybe_par_iter(self) -> <Self as MaybeParIter>::Iter {
        self.into_par_iter()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) trait MaybeParIter: IntoIterator {
    type Iter;
    fn maybe_par_iter(self) -> <Self as MaybeParIter>::Iter;
}

#[cfg(not(feature = "parallel"))]
impl<I: IntoIterator> MaybeParIter for I {
    type Iter = <Self as IntoIterator>::IntoIter;

    fn maybe_par_iter(self) -> <Self as MaybeParIter>::Iter {
        self.into_iter()
    }
}

#[cfg(feature = "parallel")]
pub(crate) use rayon::iter::ParallelIterator;
