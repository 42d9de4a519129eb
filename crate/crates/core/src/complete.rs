//! End-to-end completion pipeline.
//!
//! `complete` decides whether a rectangle extends to a full square and
//! constructs the extension when it does: check the counting bound,
//! find a transfer subgraph Θ by flow, transcribe Θ into a coloring of
//! the amalgamated graph, then split the super-vertices back into the
//! missing rows and columns. Infeasibility always comes with a
//! certificate that [`reverify_certificate`] can replay from scratch.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::detach::detach_to_square;
use crate::factor::{
    find_f_factor, find_theta, verify_ore_pair, verify_theta_cut, ExactDegrees, FactorOutcome,
    FactorSubgraph, SubsetCertificate,
};
use crate::graph::{build_gamma_hall, ColoredBigraph, VertexRole};
use crate::model::{Rectangle, RhoProfile, Square};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("PreconditionViolation: {detail}")]
    Precondition { detail: String },
}

/// Verdict of a completion attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompleteOutcome {
    Square(Square),
    Infeasible(SubsetCertificate),
}

impl CompleteOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CompleteOutcome::Square(_))
    }

    pub fn square(&self) -> Option<&Square> {
        match self {
            CompleteOutcome::Square(sq) => Some(sq),
            CompleteOutcome::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&SubsetCertificate> {
        match self {
            CompleteOutcome::Square(_) => None,
            CompleteOutcome::Infeasible(cert) => Some(cert),
        }
    }
}

/// Decides and constructs the extension of `rect` to a full square.
pub fn complete(rect: &Rectangle) -> CompleteOutcome {
    let n = rect.profile().n();
    if rect.r() == n && rect.s() == n {
        // Nothing to fill; budgets are exact automatically.
        let sq = Square::new(rect.grid().to_vec(), rect.profile().clone())
            .expect("a full valid rectangle is a valid square");
        return CompleteOutcome::Square(sq);
    }
    let bound = rect.necessary_bound();
    if let Some(v) = bound.violators.first() {
        return CompleteOutcome::Infeasible(SubsetCertificate::NecessaryBound {
            symbol: v.symbol,
            lhs: v.count,
            rhs: v.required,
        });
    }
    match find_theta(rect) {
        FactorOutcome::Infeasible(cert) => CompleteOutcome::Infeasible(cert),
        FactorOutcome::Factor(theta) => {
            let g = color_amalgamation(rect, &theta);
            let sq = detach_to_square(&g, rect)
                .unwrap_or_else(|e| panic!("detachment failed on a balanced coloring: {e}"));
            CompleteOutcome::Square(sq)
        }
    }
}

/// Transcribes a transfer subgraph into a full coloring of the
/// amalgamated graph: column-side Θ edges color the `α`-edges,
/// row-side Θ edges color the `β`-edges, and the surplus budget of each
/// symbol goes on the `α β` bundle.
fn color_amalgamation(rect: &Rectangle, theta: &FactorSubgraph) -> ColoredBigraph {
    let n = rect.profile().n();
    let k = rect.profile().k();
    let (r, s) = (rect.r(), rect.s());
    let mut left: Vec<VertexRole> = (0..r).map(VertexRole::Row).collect();
    if r < n {
        left.push(VertexRole::SuperRow);
    }
    let mut right: Vec<VertexRole> = (0..s).map(VertexRole::Col).collect();
    if s < n {
        right.push(VertexRole::SuperCol);
    }
    let mut g = ColoredBigraph::new(left, right, k);
    for i in 0..r {
        for j in 0..s {
            g.add_edges(i, j, Some(rect.grid()[i][j]), 1);
        }
    }
    let alpha = r; // valid only when r < n
    let beta = s;
    for j in 0..s {
        for sym in 1..=k {
            if theta.mult[r + j][sym - 1] > 0 {
                assert!(r < n, "column-side transfer edges need the row super-vertex");
                g.add_edges(alpha, j, Some(sym), theta.mult[r + j][sym - 1]);
            }
        }
    }
    for i in 0..r {
        for sym in 1..=k {
            if theta.mult[i][sym - 1] > 0 {
                assert!(s < n, "row-side transfer edges need the column super-vertex");
                g.add_edges(i, beta, Some(sym), theta.mult[i][sym - 1]);
            }
        }
    }
    if r < n && s < n {
        let mut bundle = 0;
        for sym in 1..=k {
            let surplus = rect.deficit(sym) - theta.deg_right(sym - 1);
            if surplus > 0 {
                g.add_edges(alpha, beta, Some(sym), surplus);
            }
            bundle += surplus;
        }
        assert_eq!(bundle, (n - r) * (n - s), "super-bundle bookkeeping");
    }
    // Full coloring contract on the amalgamation.
    for sym in 1..=k {
        assert_eq!(
            g.class_size(Some(sym)),
            rect.profile().rho_of(sym),
            "color class size"
        );
        for i in 0..r {
            assert!(g.deg_left_colored(i, Some(sym)) <= 1);
        }
        for j in 0..s {
            assert!(g.deg_right_colored(j, Some(sym)) <= 1);
        }
        if r < n {
            assert!(g.deg_left_colored(alpha, Some(sym)) <= n - r);
        }
        if s < n {
            assert!(g.deg_right_colored(beta, Some(sym)) <= n - s);
        }
    }
    g
}

/// Completion through the full-width reduction: requires `s = n`, uses
/// a column-only deficiency graph and an exact-degree factor, and
/// splits only the row super-vertex.
pub fn complete_hall(rect: &Rectangle) -> Result<CompleteOutcome, CompletionError> {
    let n = rect.profile().n();
    let k = rect.profile().k();
    if rect.s() != n {
        return Err(CompletionError::Precondition {
            detail: format!("full-width path needs s = n, got s = {}", rect.s()),
        });
    }
    let r = rect.r();
    if r == n {
        let sq = Square::new(rect.grid().to_vec(), rect.profile().clone())
            .expect("a full valid rectangle is a valid square");
        return Ok(CompleteOutcome::Square(sq));
    }
    for sym in 1..=k {
        if rect.deficit(sym) > n - r {
            return Ok(CompleteOutcome::Infeasible(SubsetCertificate::HallDeficit {
                symbol: sym,
                lhs: rect.deficit(sym) as i64,
                rhs: (n - r) as i64,
            }));
        }
    }
    let gamma = build_gamma_hall(rect);
    let f = ExactDegrees {
        left: vec![n - r; n],
        right: (1..=k).map(|sym| rect.deficit(sym)).collect(),
    };
    match find_f_factor(&gamma, &f).expect("prescription matches the graph") {
        FactorOutcome::Infeasible(cert) => Ok(CompleteOutcome::Infeasible(cert)),
        FactorOutcome::Factor(theta) => {
            let mut left: Vec<VertexRole> = (0..r).map(VertexRole::Row).collect();
            left.push(VertexRole::SuperRow);
            let right: Vec<VertexRole> = (0..n).map(VertexRole::Col).collect();
            let mut g = ColoredBigraph::new(left, right, k);
            for i in 0..r {
                for j in 0..n {
                    g.add_edges(i, j, Some(rect.grid()[i][j]), 1);
                }
            }
            for j in 0..n {
                for sym in 1..=k {
                    if theta.mult[j][sym - 1] > 0 {
                        g.add_edges(r, j, Some(sym), theta.mult[j][sym - 1]);
                    }
                }
            }
            for sym in 1..=k {
                assert_eq!(g.class_size(Some(sym)), rect.profile().rho_of(sym));
                assert!(g.deg_left_colored(r, Some(sym)) <= n - r);
            }
            let sq = detach_to_square(&g, rect)
                .unwrap_or_else(|e| panic!("detachment failed on a balanced coloring: {e}"));
            Ok(CompleteOutcome::Square(sq))
        }
    }
}

/// Builds a square with the prescribed symbol counts from scratch by
/// detaching the two-vertex bundle graph. The seed relabels symbols and
/// permutes rows and columns, so different seeds explore different
/// squares while every run with one seed is identical.
pub fn generate_square(profile: &RhoProfile, seed: u64) -> Square {
    let n = profile.n();
    let k = profile.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (1..=k).collect();
    perm.shuffle(&mut rng);
    let rho_perm: Vec<usize> = perm.iter().map(|&orig| profile.rho_of(orig)).collect();
    let shuffled =
        RhoProfile::new(n, k, rho_perm).expect("permuted budgets keep the profile valid");
    let empty = Rectangle::new(vec![], shuffled.clone()).expect("empty rectangle");
    let mut g = ColoredBigraph::new(vec![VertexRole::SuperRow], vec![VertexRole::SuperCol], k);
    for idx in 0..k {
        g.add_edges(0, 0, Some(idx + 1), shuffled.rho_of(idx + 1));
    }
    let raw = detach_to_square(&g, &empty)
        .unwrap_or_else(|e| panic!("two-vertex detachment cannot fail: {e}"));
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut rng);
    cols.shuffle(&mut rng);
    let grid: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| perm[raw.grid()[rows[i]][cols[j]] - 1])
                .collect()
        })
        .collect();
    Square::new(grid, profile.clone()).expect("relabeling preserves validity")
}

/// Replays a completion certificate against the instance from scratch.
pub fn reverify_certificate(rect: &Rectangle, cert: &SubsetCertificate) -> bool {
    let n = rect.profile().n();
    match cert {
        SubsetCertificate::NecessaryBound { symbol, lhs, rhs } => {
            let sym = *symbol;
            if sym < 1 || sym > rect.profile().k() {
                return false;
            }
            let required = (rect.r() + rect.s() + rect.profile().rho_of(sym)) as i64 - 2 * n as i64;
            rect.e_of(sym) as i64 == *lhs && required == *rhs && lhs < rhs
        }
        SubsetCertificate::HallDeficit { symbol, lhs, rhs } => {
            let sym = *symbol;
            if rect.s() != n || sym < 1 || sym > rect.profile().k() {
                return false;
            }
            rect.deficit(sym) as i64 == *lhs && (n - rect.r()) as i64 == *rhs && lhs > rhs
        }
        SubsetCertificate::ThetaCut { .. } => verify_theta_cut(rect, cert),
        SubsetCertificate::OrePair { .. } => {
            if rect.s() != n {
                return false;
            }
            let gamma = build_gamma_hall(rect);
            let f = ExactDegrees {
                left: vec![n - rect.r(); n],
                right: (1..=rect.profile().k()).map(|sym| rect.deficit(sym)).collect(),
            };
            verify_ore_pair(&gamma, &f, cert)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guards::Guards;
    use crate::model::RhoProfile;
    use crate::oracle::{brute_force_complete, random_instance, GenMode, InstanceParams};

    fn rect(grid: &[&[usize]], n: usize, k: usize, rho: &[usize]) -> Rectangle {
        let p = RhoProfile::new(n, k, rho.to_vec()).unwrap();
        Rectangle::new(grid.iter().map(|row| row.to_vec()).collect(), p).unwrap()
    }

    #[test]
    fn unique_completion() {
        let l = rect(&[&[1]], 2, 2, &[2, 2]);
        match complete(&l) {
            CompleteOutcome::Square(sq) => {
                assert_eq!(sq.grid(), &[vec![1, 2], vec![2, 1]]);
            }
            other => panic!("expected square, got {other:?}"),
        }
    }

    #[test]
    fn counting_bound_certificate() {
        let l = rect(&[&[1, 2], &[2, 1]], 3, 3, &[3, 3, 3]);
        match complete(&l) {
            CompleteOutcome::Infeasible(cert) => {
                assert!(matches!(
                    cert,
                    SubsetCertificate::NecessaryBound { symbol: 3, .. }
                ));
                assert!(reverify_certificate(&l, &cert));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn four_symbol_corner_completes() {
        // Deficits [1,0,2,2] against one new row and one new column.
        let l = rect(&[&[1, 2], &[2, 1]], 3, 4, &[3, 2, 2, 2]);
        match complete(&l) {
            CompleteOutcome::Square(sq) => {
                assert!(sq.is_completion_of(&l).unwrap());
            }
            other => panic!("expected square, got {other:?}"),
        }
    }

    #[test]
    fn full_rectangle_is_returned_as_is() {
        let l = rect(&[&[1, 2], &[2, 1]], 2, 2, &[2, 2]);
        match complete(&l) {
            CompleteOutcome::Square(sq) => assert_eq!(sq.grid(), l.grid()),
            other => panic!("expected square, got {other:?}"),
        }
    }

    #[test]
    fn empty_rectangle_generates() {
        let p = RhoProfile::new(3, 4, vec![3, 2, 2, 2]).unwrap();
        let l = Rectangle::new(vec![], p).unwrap();
        assert!(complete(&l).is_feasible());
    }

    #[test]
    fn hall_path_completes_full_width_rows() {
        let l = rect(&[&[1, 2, 3]], 3, 3, &[3, 3, 3]);
        match complete_hall(&l).unwrap() {
            CompleteOutcome::Square(sq) => {
                assert!(sq.is_completion_of(&l).unwrap());
            }
            other => panic!("expected square, got {other:?}"),
        }
    }

    #[test]
    fn hall_path_rejects_narrow_rectangles() {
        let l = rect(&[&[1]], 2, 2, &[2, 2]);
        assert!(matches!(
            complete_hall(&l),
            Err(CompletionError::Precondition { .. })
        ));
    }

    #[test]
    fn hall_path_full_square() {
        let l = rect(&[&[1, 2], &[2, 1]], 2, 2, &[2, 2]);
        match complete_hall(&l).unwrap() {
            CompleteOutcome::Square(sq) => assert_eq!(sq.grid(), l.grid()),
            other => panic!("expected square, got {other:?}"),
        }
    }

    #[test]
    fn hall_deficit_certificate() {
        // Symbol 1 absent from the single full-width row but owed three
        // occurrences: more than the two remaining rows can host.
        let l = rect(&[&[2, 3, 4]], 3, 4, &[3, 2, 2, 2]);
        match complete_hall(&l).unwrap() {
            CompleteOutcome::Infeasible(cert) => {
                assert!(matches!(
                    cert,
                    SubsetCertificate::HallDeficit { symbol: 1, .. }
                ));
                assert!(reverify_certificate(&l, &cert));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn hall_and_general_paths_agree() {
        let params = InstanceParams {
            n: (2, 4),
            k: (2, 6),
            r: (1, usize::MAX),
            s: (8, 8), // clamps to n: full-width instances
            mode: GenMode::Arbitrary,
        };
        for seed in 0..60u64 {
            let inst = random_instance(&params, seed).unwrap();
            assert_eq!(inst.s(), inst.profile().n());
            let general = complete(&inst).is_feasible();
            let hall = complete_hall(&inst).unwrap().is_feasible();
            assert_eq!(general, hall, "paths disagree on seed {seed}");
        }
    }

    #[test]
    fn pipeline_matches_oracle_on_small_sweep() {
        let guards = Guards::default();
        let params = InstanceParams::new((2, 4), (2, 6), GenMode::Arbitrary);
        for seed in 0..80u64 {
            let inst = random_instance(&params, seed).unwrap();
            let flow = complete(&inst);
            let oracle = brute_force_complete(&inst, &guards).unwrap();
            assert_eq!(
                flow.is_feasible(),
                oracle.is_some(),
                "flow and oracle disagree on seed {seed}: {inst:?}"
            );
            if let CompleteOutcome::Square(sq) = &flow {
                assert!(sq.is_completion_of(&inst).unwrap());
            }
            if let CompleteOutcome::Infeasible(cert) = &flow {
                assert!(reverify_certificate(&inst, cert), "stale certificate");
            }
        }
    }

    #[test]
    fn classical_full_budget_rule() {
        // With k = n and every budget n, completability is exactly the
        // e_l >= r + s - n rule.
        let cases: Vec<(Vec<Vec<usize>>, usize)> = vec![
            (vec![vec![1, 2], vec![2, 1]], 3),
            (vec![vec![1, 2], vec![2, 3]], 3),
            (vec![vec![1]], 2),
            (vec![vec![1, 2, 3], vec![2, 3, 1]], 4),
            (vec![vec![1, 2], vec![2, 1]], 4),
        ];
        for (grid, n) in cases {
            let p = RhoProfile::new(n, n, vec![n; n]).unwrap();
            let l = Rectangle::new(grid, p).unwrap();
            let rule = (1..=n).all(|sym| l.e_of(sym) + n >= l.r() + l.s());
            assert_eq!(complete(&l).is_feasible(), rule, "instance {l:?}");
        }
    }

    #[test]
    fn crop_of_generated_square_completes() {
        for seed in 0..25u64 {
            let params = InstanceParams::new((2, 5), (2, 9), GenMode::Completable);
            let inst = random_instance(&params, seed).unwrap();
            assert!(complete(&inst).is_feasible(), "seed {seed}");
        }
    }

    #[test]
    fn generator_is_seed_deterministic() {
        let p = RhoProfile::new(3, 4, vec![3, 2, 2, 2]).unwrap();
        let a = generate_square(&p, 7);
        let b = generate_square(&p, 7);
        assert_eq!(a.grid(), b.grid());
    }

    #[test]
    fn generator_small_profiles() {
        for (n, k, rho) in [
            (2usize, 2usize, vec![2usize, 2]),
            (2, 4, vec![1, 1, 1, 1]),
            (3, 4, vec![3, 2, 2, 2]),
            (4, 5, vec![4, 4, 4, 2, 2]),
        ] {
            let p = RhoProfile::new(n, k, rho).unwrap();
            for seed in 0..5u64 {
                let sq = generate_square(&p, seed);
                assert_eq!(sq.n(), n);
            }
        }
    }
}
