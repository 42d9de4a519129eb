//! Size guards for the exhaustive evaluators and the brute-force oracle.
//!
//! The subset-condition checkers and the backtracking oracle are
//! deliberately exponential; these limits make them refuse oversized
//! inputs instead of hanging. Every limit can be overridden through the
//! environment (`RHO_LATIN_GUARD_<NAME>`), which the CLI documents.

use std::env;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guards {
    /// Max row/column count for single-subset condition enumeration.
    pub single_side: usize,
    /// Max symbol count for single-subset condition enumeration.
    pub single_symbols: usize,
    /// Max row/column count for (I,K)/(J,K) pairwise enumeration.
    pub pair_side: usize,
    /// Max symbol count for pairwise enumeration.
    pub pair_symbols: usize,
    /// Max size of one enumerated side in the factor-condition checkers.
    pub ore_single: usize,
    /// Max total vertex count across both sides for pairwise factor checks.
    pub ore_pair_sum: usize,
    /// Max number of fitting sequences enumerated per instance.
    pub fitting_budget: usize,
    /// Max order accepted by the backtracking completion oracle.
    pub oracle_n: usize,
    /// Max symbol count accepted by the backtracking completion oracle.
    pub oracle_k: usize,
    /// Max order accepted by the exhaustive completion counter.
    pub count_n: usize,
    /// Search-node budget for one oracle run.
    pub oracle_nodes: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            single_side: 6,
            single_symbols: 8,
            pair_side: 5,
            pair_symbols: 6,
            ore_single: 20,
            ore_pair_sum: 20,
            fitting_budget: 50_000,
            oracle_n: 6,
            oracle_k: 10,
            count_n: 4,
            oracle_nodes: 200_000_000,
        }
    }
}

impl Guards {
    /// Defaults overridden by any `RHO_LATIN_GUARD_*` environment variables.
    pub fn from_env() -> Self {
        let mut g = Guards::default();
        fn get(name: &str) -> Option<u64> {
            env::var(format!("RHO_LATIN_GUARD_{name}"))
                .ok()
                .and_then(|v| v.parse().ok())
        }
        if let Some(v) = get("SINGLE_SIDE") {
            g.single_side = v as usize;
        }
        if let Some(v) = get("SINGLE_SYMBOLS") {
            g.single_symbols = v as usize;
        }
        if let Some(v) = get("PAIR_SIDE") {
            g.pair_side = v as usize;
        }
        if let Some(v) = get("PAIR_SYMBOLS") {
            g.pair_symbols = v as usize;
        }
        if let Some(v) = get("ORE_SINGLE") {
            g.ore_single = v as usize;
        }
        if let Some(v) = get("ORE_PAIR_SUM") {
            g.ore_pair_sum = v as usize;
        }
        if let Some(v) = get("FITTING_BUDGET") {
            g.fitting_budget = v as usize;
        }
        if let Some(v) = get("ORACLE_N") {
            g.oracle_n = v as usize;
        }
        if let Some(v) = get("ORACLE_K") {
            g.oracle_k = v as usize;
        }
        if let Some(v) = get("COUNT_N") {
            g.count_n = v as usize;
        }
        if let Some(v) = get("ORACLE_NODES") {
            g.oracle_nodes = v;
        }
        g
    }
}
