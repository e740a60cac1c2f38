//! Worker pool and scheduling-independent parallel drivers.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use skatevote_core::axioms::{search_fixtures, trial, AxiomId, SearchBounds, ViolationWitness};
use skatevote_core::Result;

pub const THREADS_VAR: &str = "SKATEVOTE_THREADS";

/// Worker cap from `SKATEVOTE_THREADS`; 0 or unset means one worker per core.
pub fn threads_from_env() -> std::result::Result<usize, String> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{THREADS_VAR} must be a non-negative integer, got `{v}`")),
    }
}

pub fn pool(threads: usize) -> ThreadPool {
    ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

/// Same result as the sequential search: the fixtures first, then the
/// witness from the lowest trial index.
pub fn search_counterexample(
    pool: &ThreadPool,
    axiom: AxiomId,
    bounds: &SearchBounds,
) -> Result<Option<ViolationWitness>> {
    bounds.validate()?;
    if let Some(w) = search_fixtures(axiom, bounds)? {
        return Ok(Some(w));
    }
    if axiom == AxiomId::Nondictatorship {
        return skatevote_core::axioms::search_counterexample(axiom, bounds);
    }
    pool.install(|| {
        (0..bounds.budget)
            .into_par_iter()
            .find_map_first(|t| trial(axiom, bounds, t).transpose())
            .transpose()
    })
}

/// `f` over `items`, results in input order.
pub fn map_ordered<T: Sync, R: Send>(pool: &ThreadPool, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    pool.install(|| items.par_iter().map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_search() {
        let bounds = SearchBounds { max_m: 4, max_n: 6, ..SearchBounds::default() };
        for threads in [1, 3] {
            let p = pool(threads);
            for axiom in [AxiomId::Consistency, AxiomId::Participation, AxiomId::Majority, AxiomId::Nondictatorship] {
                assert_eq!(
                    search_counterexample(&p, axiom, &bounds).unwrap(),
                    skatevote_core::axioms::search_counterexample(axiom, &bounds).unwrap(),
                    "{axiom} with {threads} threads"
                );
            }
        }
    }

    #[test]
    fn ordered_map() {
        let p = pool(4);
        let v: Vec<u64> = (0..100).collect();
        assert_eq!(map_ordered(&p, &v, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
    }
}
