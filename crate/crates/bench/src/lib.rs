//! Fixtures shared by the benchmarks.

use ellchi_core::{ChiRequest, Engine, EngineConfig, MemoCache, Mode};

/// An engine with an empty, private cache, so every run starts cold.
pub fn cold_engine() -> Engine {
    Engine::with_cache(EngineConfig::default(), MemoCache::in_memory())
}

/// `chi(n, 0, [d, …, d])` for `d` in `0..=max`, some with negative entries.
pub fn mixed_requests(n: usize, max: i64) -> Vec<ChiRequest> {
    (0..=max)
        .flat_map(|d| {
            let mut exps = vec![d; n];
            let direct = ChiRequest::new(n, 0, exps.clone()).with_mode(Mode::Exact);
            exps[0] = -1 - d;
            [direct, ChiRequest::new(n, 0, exps).with_mode(Mode::Exact)]
        })
        .collect()
}
