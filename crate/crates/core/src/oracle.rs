//! Brute-force ground truth and randomized instance generation.
//!
//! The backtracking search here is the reference answer the flow
//! pipeline and the condition evaluators are audited against, so it
//! stays deliberately simple: row-major cell order, ascending symbol
//! order, optional capacity pruning that can be switched off to check
//! the pruned search against the dumb one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complete::generate_square;
use crate::factor::DegreeSpec;
use crate::graph::ColoredBigraph;
use crate::guards::Guards;
use crate::model::{Rectangle, RhoProfile, Square};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("TooLarge: {detail}")]
    TooLarge { detail: String },
    #[error("InvalidParams: {detail}")]
    InvalidParams { detail: String },
}

struct Search {
    n: usize,
    k: usize,
    grid: Vec<Vec<usize>>,
    budget: Vec<usize>,
    row_used: Vec<Vec<bool>>,
    col_used: Vec<Vec<bool>>,
    row_empty: Vec<usize>,
    col_empty: Vec<usize>,
    cells: Vec<(usize, usize)>,
    prune: bool,
    nodes: u64,
    node_budget: u64,
}

enum SearchOutcome {
    Found,
    Exhausted,
    OutOfBudget,
}

impl Search {
    fn new(rect: &Rectangle, prune: bool, node_budget: u64) -> Self {
        let n = rect.profile().n();
        let k = rect.profile().k();
        let mut grid = vec![vec![0usize; n]; n];
        let mut row_used = vec![vec![false; k + 1]; n];
        let mut col_used = vec![vec![false; k + 1]; n];
        let mut budget: Vec<usize> = (1..=k).map(|sym| rect.deficit(sym)).collect();
        budget.insert(0, 0); // 1-based access
        for i in 0..rect.r() {
            for j in 0..rect.s() {
                let sym = rect.grid()[i][j];
                grid[i][j] = sym;
                row_used[i][sym] = true;
                col_used[j][sym] = true;
            }
        }
        let mut cells = Vec::new();
        let mut row_empty = vec![0usize; n];
        let mut col_empty = vec![0usize; n];
        for i in 0..n {
            for j in 0..n {
                if grid[i][j] == 0 {
                    cells.push((i, j));
                    row_empty[i] += 1;
                    col_empty[j] += 1;
                }
            }
        }
        Search {
            n,
            k,
            grid,
            budget,
            row_used,
            col_used,
            row_empty,
            col_empty,
            cells,
            prune,
            nodes: 0,
            node_budget,
        }
    }

    /// Sound capacity check: a symbol still owing `b` occurrences needs
    /// at least `b` rows and `b` columns that miss it and still have
    /// empty cells.
    fn capacity_ok(&self) -> bool {
        for sym in 1..=self.k {
            let b = self.budget[sym];
            if b == 0 {
                continue;
            }
            let rows = (0..self.n)
                .filter(|&i| self.row_empty[i] > 0 && !self.row_used[i][sym])
                .count();
            if rows < b {
                return false;
            }
            let cols = (0..self.n)
                .filter(|&j| self.col_empty[j] > 0 && !self.col_used[j][sym])
                .count();
            if cols < b {
                return false;
            }
        }
        true
    }

    fn run<F: FnMut(&[Vec<usize>]) -> bool>(
        &mut self,
        idx: usize,
        on_found: &mut F,
    ) -> SearchOutcome {
        if idx == self.cells.len() {
            return if on_found(&self.grid) {
                SearchOutcome::Found
            } else {
                SearchOutcome::Exhausted
            };
        }
        if self.prune && !self.capacity_ok() {
            return SearchOutcome::Exhausted;
        }
        let (i, j) = self.cells[idx];
        for sym in 1..=self.k {
            if self.budget[sym] == 0 || self.row_used[i][sym] || self.col_used[j][sym] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.node_budget {
                return SearchOutcome::OutOfBudget;
            }
            self.grid[i][j] = sym;
            self.budget[sym] -= 1;
            self.row_used[i][sym] = true;
            self.col_used[j][sym] = true;
            self.row_empty[i] -= 1;
            self.col_empty[j] -= 1;
            let outcome = self.run(idx + 1, on_found);
            self.grid[i][j] = 0;
            self.budget[sym] += 1;
            self.row_used[i][sym] = false;
            self.col_used[j][sym] = false;
            self.row_empty[i] += 1;
            self.col_empty[j] += 1;
            match outcome {
                SearchOutcome::Exhausted => {}
                done => return done,
            }
        }
        SearchOutcome::Exhausted
    }
}

fn check_oracle_guard(rect: &Rectangle, guards: &Guards) -> Result<(), OracleError> {
    let (n, k) = (rect.profile().n(), rect.profile().k());
    if n > guards.oracle_n || k > guards.oracle_k {
        return Err(OracleError::TooLarge {
            detail: format!(
                "instance n={n}, k={k} exceeds oracle guard n<={}, k<={}",
                guards.oracle_n, guards.oracle_k
            ),
        });
    }
    Ok(())
}

/// Exhaustive backtracking completion search. Returns the first
/// extension in row-major/ascending-symbol order, or `None` after
/// exhausting the space.
pub fn brute_force_complete(
    rect: &Rectangle,
    guards: &Guards,
) -> Result<Option<Square>, OracleError> {
    brute_force_complete_with(rect, guards, true)
}

/// Same search with pruning switchable, for validating the pruned
/// oracle against the dumb one.
pub fn brute_force_complete_with(
    rect: &Rectangle,
    guards: &Guards,
    prune: bool,
) -> Result<Option<Square>, OracleError> {
    check_oracle_guard(rect, guards)?;
    let mut search = Search::new(rect, prune, guards.oracle_nodes);
    let mut found: Option<Vec<Vec<usize>>> = None;
    let outcome = search.run(0, &mut |grid| {
        found = Some(grid.to_vec());
        true
    });
    match outcome {
        SearchOutcome::OutOfBudget => Err(OracleError::TooLarge {
            detail: format!("search exceeded {} nodes", guards.oracle_nodes),
        }),
        _ => Ok(found.map(|grid| {
            Square::new(grid, rect.profile().clone()).expect("oracle built an invalid square")
        })),
    }
}

/// Exact number of extensions, by exhaustive backtracking.
pub fn count_completions(rect: &Rectangle, guards: &Guards) -> Result<u64, OracleError> {
    let n = rect.profile().n();
    if n > guards.count_n {
        return Err(OracleError::TooLarge {
            detail: format!("order {n} exceeds counting guard {}", guards.count_n),
        });
    }
    check_oracle_guard(rect, guards)?;
    let mut search = Search::new(rect, true, guards.oracle_nodes);
    let mut count = 0u64;
    let outcome = search.run(0, &mut |_| {
        count += 1;
        false
    });
    match outcome {
        SearchOutcome::OutOfBudget => Err(OracleError::TooLarge {
            detail: format!("search exceeded {} nodes", guards.oracle_nodes),
        }),
        _ => Ok(count),
    }
}

/// Independent feasibility check for bounded-degree subgraphs: dynamic
/// programming over left vertices with the vector of remaining
/// right-side capacities as state. Shares nothing with the flow solver.
pub fn gf_factor_exists_exhaustive(g: &ColoredBigraph, spec: &DegreeSpec) -> bool {
    use std::collections::HashMap;

    let (nl, nr) = (g.left().len(), g.right().len());
    for r in 0..nr {
        if spec.g_right[r] > g.deg_right(r) {
            return false;
        }
    }
    for l in 0..nl {
        if spec.g_left[l] > g.deg_left(l) {
            return false;
        }
    }
    let init: Vec<u8> = (0..nr)
        .map(|r| spec.f_right[r].min(g.deg_right(r)) as u8)
        .collect();

    fn assign(
        g: &ColoredBigraph,
        spec: &DegreeSpec,
        l: usize,
        r: usize,
        taken: usize,
        rem: &mut Vec<u8>,
        memo: &mut HashMap<(usize, Vec<u8>), bool>,
    ) -> bool {
        let nr = rem.len();
        if r == nr {
            return taken >= spec.g_left[l] && step(g, spec, l + 1, rem, memo);
        }
        let max_here = g.mult(l, r).min(rem[r] as usize);
        for take in 0..=max_here {
            if taken + take > spec.f_left[l] {
                break;
            }
            rem[r] -= take as u8;
            if assign(g, spec, l, r + 1, taken + take, rem, memo) {
                rem[r] += take as u8;
                return true;
            }
            rem[r] += take as u8;
        }
        false
    }

    fn step(
        g: &ColoredBigraph,
        spec: &DegreeSpec,
        l: usize,
        rem: &mut Vec<u8>,
        memo: &mut HashMap<(usize, Vec<u8>), bool>,
    ) -> bool {
        let nr = rem.len();
        if l == g.left().len() {
            return (0..nr).all(|r| {
                let used = spec.f_right[r].min(g.deg_right(r)) - rem[r] as usize;
                used >= spec.g_right[r]
            });
        }
        let key = (l, rem.clone());
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let result = assign(g, spec, l, 0, 0, rem, memo);
        memo.insert(key, result);
        result
    }

    let mut rem = init;
    let mut memo = HashMap::new();
    step(g, spec, 0, &mut rem, &mut memo)
}

/// How random instances are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// Crop of a generated square: completable by construction.
    Completable,
    /// Crop with the budget vector reshuffled afterwards; may or may
    /// not be completable.
    Arbitrary,
}

/// Ranges are inclusive; `r`/`s` draws are clamped into `0..=n` and `k`
/// into `n..=n²` after `n` is drawn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceParams {
    pub n: (usize, usize),
    pub k: (usize, usize),
    pub r: (usize, usize),
    pub s: (usize, usize),
    pub mode: GenMode,
}

impl InstanceParams {
    pub fn new(n: (usize, usize), k: (usize, usize), mode: GenMode) -> Self {
        InstanceParams {
            n,
            k,
            r: (1, usize::MAX),
            s: (1, usize::MAX),
            mode,
        }
    }
}

/// PRNG used for all seeded generation; recorded in audit logs.
pub const RNG_ALGORITHM: &str = "chacha8";

fn draw(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    if lo >= hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

fn draw_profile(
    rng: &mut ChaCha8Rng,
    n_range: (usize, usize),
    k_range: (usize, usize),
) -> Result<RhoProfile, OracleError> {
    if n_range.0 > n_range.1 || n_range.0 == 0 {
        return Err(OracleError::InvalidParams {
            detail: format!("bad order range {n_range:?}"),
        });
    }
    let n = draw(rng, n_range.0, n_range.1);
    let k_lo = k_range.0.max(n);
    let k_hi = k_range.1.min(n * n);
    if k_lo > k_hi {
        return Err(OracleError::InvalidParams {
            detail: format!("no symbol count in {k_range:?} fits order {n}"),
        });
    }
    let k = draw(rng, k_lo, k_hi);

    // Budget vector: all ones, then distribute the remaining n² − k.
    let mut rho = vec![1usize; k];
    let mut left = n * n - k;
    while left > 0 {
        let open: Vec<usize> = (0..k).filter(|&idx| rho[idx] < n).collect();
        let idx = open[rng.random_range(0..open.len())];
        rho[idx] += 1;
        left -= 1;
    }
    Ok(RhoProfile::new(n, k, rho).expect("generated profile is valid"))
}

/// Deterministic random symbol profile for the given seed.
pub fn random_profile(
    n_range: (usize, usize),
    k_range: (usize, usize),
    seed: u64,
) -> Result<RhoProfile, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_profile(&mut rng, n_range, k_range)
}

/// Deterministic random instance for the given seed.
pub fn random_instance(params: &InstanceParams, seed: u64) -> Result<Rectangle, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profile = draw_profile(&mut rng, params.n, params.k)?;
    let (n, k) = (profile.n(), profile.k());

    let square_seed = rng.random::<u64>();
    let square = generate_square(&profile, square_seed);
    let r = draw(&mut rng, params.r.0.min(n), params.r.1.min(n));
    let s = draw(&mut rng, params.s.0.min(n), params.s.1.min(n));
    let rect = square.crop(r, s).expect("crop of a valid square");

    match params.mode {
        GenMode::Completable => Ok(rect),
        GenMode::Arbitrary => {
            // Move budget between symbols without invalidating the
            // rectangle: donors keep at least max(1, e_ℓ), receivers
            // stay at most n.
            let mut rho: Vec<usize> = rect.profile().rho().to_vec();
            let moves = rng.random_range(0..=2 * n);
            for _ in 0..moves {
                let donors: Vec<usize> = (0..k)
                    .filter(|&idx| rho[idx] > rect.e()[idx].max(1))
                    .collect();
                let takers: Vec<usize> = (0..k).filter(|&idx| rho[idx] < n).collect();
                if donors.is_empty() || takers.is_empty() {
                    break;
                }
                let d = donors[rng.random_range(0..donors.len())];
                let t = takers[rng.random_range(0..takers.len())];
                if d == t {
                    continue;
                }
                rho[d] -= 1;
                rho[t] += 1;
            }
            let profile = RhoProfile::new(n, k, rho).expect("perturbed profile is valid");
            Ok(Rectangle::new(rect.grid().to_vec(), profile)
                .expect("perturbation keeps the rectangle valid"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Rectangle, RhoProfile};

    fn rect(grid: &[&[usize]], n: usize, k: usize, rho: &[usize]) -> Rectangle {
        let p = RhoProfile::new(n, k, rho.to_vec()).unwrap();
        Rectangle::new(grid.iter().map(|row| row.to_vec()).collect(), p).unwrap()
    }

    #[test]
    fn unique_completion_found() {
        let l = rect(&[&[1]], 2, 2, &[2, 2]);
        let sq = brute_force_complete(&l, &Guards::default())
            .unwrap()
            .unwrap();
        assert_eq!(sq.grid(), &[vec![1, 2], vec![2, 1]]);
        assert_eq!(count_completions(&l, &Guards::default()).unwrap(), 1);
    }

    #[test]
    fn order_three_obstruction() {
        let l = rect(&[&[1, 2], &[2, 1]], 3, 3, &[3, 3, 3]);
        assert!(brute_force_complete(&l, &Guards::default())
            .unwrap()
            .is_none());
        assert_eq!(count_completions(&l, &Guards::default()).unwrap(), 0);
    }

    #[test]
    fn four_symbol_corner_is_completable() {
        // Deficits [1, 0, 2, 2] fit into the five free cells; the
        // search must find an extension.
        let l = rect(&[&[1, 2], &[2, 1]], 3, 4, &[3, 2, 2, 2]);
        let sq = brute_force_complete(&l, &Guards::default())
            .unwrap()
            .unwrap();
        assert!(sq.is_completion_of(&l).unwrap());
    }

    #[test]
    fn full_square_completes_to_itself() {
        let l = rect(&[&[1, 2], &[2, 1]], 2, 2, &[2, 2]);
        let sq = brute_force_complete(&l, &Guards::default())
            .unwrap()
            .unwrap();
        assert_eq!(sq.grid(), l.grid());
    }

    #[test]
    fn counting_distinct_symbols() {
        let l = rect(&[&[1]], 2, 4, &[1, 1, 1, 1]);
        assert_eq!(count_completions(&l, &Guards::default()).unwrap(), 6);
    }

    #[test]
    fn pruned_matches_dumb_search() {
        let cases = [
            rect(&[&[1]], 2, 2, &[2, 2]),
            rect(&[&[1, 2], &[2, 1]], 3, 3, &[3, 3, 3]),
            rect(&[&[1, 2], &[2, 1]], 3, 4, &[3, 2, 2, 2]),
            rect(&[&[1, 2, 3]], 3, 3, &[3, 3, 3]),
            rect(&[&[3]], 3, 4, &[3, 2, 2, 2]),
        ];
        for l in &cases {
            let pruned = brute_force_complete_with(l, &Guards::default(), true).unwrap();
            let dumb = brute_force_complete_with(l, &Guards::default(), false).unwrap();
            assert_eq!(pruned.is_some(), dumb.is_some());
            // Pruning only skips dead branches, so the first completion
            // found is identical.
            assert_eq!(
                pruned.map(|sq| sq.grid().to_vec()),
                dumb.map(|sq| sq.grid().to_vec())
            );
        }
    }

    #[test]
    fn guard_rejects_large_orders() {
        let p = RhoProfile::new(7, 7, vec![7; 7]).unwrap();
        let l = Rectangle::new(vec![], p).unwrap();
        assert!(matches!(
            brute_force_complete(&l, &Guards::default()),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn random_instance_is_deterministic() {
        let params = InstanceParams::new((2, 4), (2, 6), GenMode::Arbitrary);
        for seed in [0u64, 1, 17, 999] {
            let a = random_instance(&params, seed).unwrap();
            let b = random_instance(&params, seed).unwrap();
            assert_eq!(a.grid(), b.grid());
            assert_eq!(a.profile(), b.profile());
        }
    }

    #[test]
    fn completable_mode_instances_complete() {
        let params = InstanceParams::new((2, 4), (2, 8), GenMode::Completable);
        for seed in 0..30u64 {
            let inst = random_instance(&params, seed).unwrap();
            let sq = brute_force_complete(&inst, &Guards::default()).unwrap();
            assert!(sq.is_some(), "seed {seed} produced an incompletable crop");
        }
    }

    #[test]
    fn arbitrary_mode_produces_both_verdicts() {
        let params = InstanceParams::new((2, 4), (2, 6), GenMode::Arbitrary);
        let mut feasible = 0;
        let mut infeasible = 0;
        for seed in 0..150u64 {
            let inst = random_instance(&params, seed).unwrap();
            match brute_force_complete(&inst, &Guards::default()).unwrap() {
                Some(_) => feasible += 1,
                None => infeasible += 1,
            }
        }
        assert!(feasible > 0 && infeasible > 0, "{feasible} vs {infeasible}");
    }
}
