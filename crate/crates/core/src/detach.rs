//! Balanced vertex splitting: replace a fully colored vertex by `p`
//! parts so that every color class and every neighbor multiplicity is
//! shared out within floor/ceiling of an even split.
//!
//! Parts are extracted one at a time. Each extraction is a bounded-
//! degree subgraph of the star at the vertex, solved on an auxiliary
//! neighbors-versus-colors bigraph with `⌊d/p'⌋..⌈d/p'⌉` bounds for the
//! `p'` parts still owed. Nesting of those bounds keeps every part
//! within floor/ceiling of the original `p`-way split, which is
//! asserted before returning. A failed extraction cannot happen for
//! valid input, so it surfaces loudly as `SplitInfeasible`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::factor::{find_gf_factor, DegreeSpec, FactorOutcome, Side};
use crate::graph::{ColoredBigraph, VertexRole};
use crate::model::{Rectangle, Square};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetachError {
    #[error("NotFullyColored: {detail}")]
    NotFullyColored { detail: String },
    #[error("SplitInfeasible: {detail}")]
    SplitInfeasible { detail: String },
    #[error("PreconditionViolated: {detail}")]
    Precondition { detail: String },
    #[error("PostconditionViolated: {detail}")]
    Postcondition { detail: String },
}

/// Record of one split: the floor/ceiling targets every part must meet
/// against the original graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub side: Side,
    pub vertex: usize,
    pub parts: usize,
    /// `(neighbor, floor, ceil)` bounds on per-part multiplicity.
    pub neighbor_targets: Vec<(usize, usize, usize)>,
    /// `(symbol, floor, ceil)` bounds on per-part color degree.
    pub color_targets: Vec<(usize, usize, usize)>,
}

fn div_bounds(total: usize, parts: usize) -> (usize, usize) {
    (total / parts, total.div_ceil(parts))
}

/// One part of the star at the split vertex: multiplicity per
/// `(neighbor, symbol)`.
type StarPart = BTreeMap<(usize, usize), usize>;

/// Splits `vertex` (on `side`) into `parts` new vertices whose roles are
/// given by `role_of`. All edges at the vertex must be colored. The new
/// vertices are appended after the remaining ones on the same side.
pub fn split_vertex(
    g: &ColoredBigraph,
    side: Side,
    vertex: usize,
    parts: usize,
    role_of: impl Fn(usize) -> VertexRole,
) -> Result<(ColoredBigraph, SplitPlan), DetachError> {
    assert!(parts >= 1, "part count must be positive");
    let k = g.k();
    let other_len = match side {
        Side::Left => g.right().len(),
        Side::Right => g.left().len(),
    };
    // Star at the vertex, keyed by (neighbor, symbol).
    let mut star: StarPart = BTreeMap::new();
    for (l, r, color, m) in g.edges() {
        let (at, neighbor) = match side {
            Side::Left => (l, r),
            Side::Right => (r, l),
        };
        if at != vertex {
            continue;
        }
        let Some(sym) = color else {
            return Err(DetachError::NotFullyColored {
                detail: format!("{m} uncolored edges at split vertex"),
            });
        };
        *star.entry((neighbor, sym)).or_insert(0) += m;
    }

    let mut orig_neighbor = vec![0usize; other_len];
    let mut orig_color = vec![0usize; k + 1];
    for (&(u, sym), &m) in &star {
        orig_neighbor[u] += m;
        orig_color[sym] += m;
    }
    let plan = SplitPlan {
        side,
        vertex,
        parts,
        neighbor_targets: (0..other_len)
            .filter(|&u| orig_neighbor[u] > 0)
            .map(|u| {
                let (lo, hi) = div_bounds(orig_neighbor[u], parts);
                (u, lo, hi)
            })
            .collect(),
        color_targets: (1..=k)
            .filter(|&sym| orig_color[sym] > 0)
            .map(|sym| {
                let (lo, hi) = div_bounds(orig_color[sym], parts);
                (sym, lo, hi)
            })
            .collect(),
    };

    // Extract parts 0..parts-1; the last part takes the remainder.
    let mut remaining = star;
    let mut part_edges: Vec<StarPart> = Vec::with_capacity(parts);
    for extracted in 0..parts - 1 {
        let p_left = parts - extracted;
        let part = extract_part(&remaining, p_left, other_len, k).map_err(|detail| {
            DetachError::SplitInfeasible {
                detail: format!("part {extracted}: {detail}"),
            }
        })?;
        for (&key, &m) in &part {
            let slot = remaining.get_mut(&key).expect("part within star");
            *slot -= m;
            if *slot == 0 {
                remaining.remove(&key);
            }
        }
        part_edges.push(part);
    }
    part_edges.push(remaining);

    // Per-part floor/ceiling against the original p-way split.
    for (idx, part) in part_edges.iter().enumerate() {
        let mut by_neighbor = vec![0usize; other_len];
        let mut by_color = vec![0usize; k + 1];
        for (&(u, sym), &m) in part {
            by_neighbor[u] += m;
            by_color[sym] += m;
        }
        for &(u, lo, hi) in &plan.neighbor_targets {
            if !(lo..=hi).contains(&by_neighbor[u]) {
                return Err(DetachError::Postcondition {
                    detail: format!(
                        "part {idx} takes {} edges to neighbor {u}, outside {lo}..={hi}",
                        by_neighbor[u]
                    ),
                });
            }
        }
        for &(sym, lo, hi) in &plan.color_targets {
            if !(lo..=hi).contains(&by_color[sym]) {
                return Err(DetachError::Postcondition {
                    detail: format!(
                        "part {idx} takes {} edges of color {sym}, outside {lo}..={hi}",
                        by_color[sym]
                    ),
                });
            }
        }
    }

    // Rebuild the graph: drop the split vertex, append the parts.
    let (old_left, old_right) = (g.left().to_vec(), g.right().to_vec());
    let mut map_same: Vec<Option<usize>> = Vec::new();
    let split_roles = match side {
        Side::Left => &old_left,
        Side::Right => &old_right,
    };
    let mut same_roles: Vec<VertexRole> = Vec::new();
    for (i, &role) in split_roles.iter().enumerate() {
        if i == vertex {
            map_same.push(None);
        } else {
            map_same.push(Some(same_roles.len()));
            same_roles.push(role);
        }
    }
    let mut new = match side {
        Side::Left => ColoredBigraph::new(same_roles, old_right.clone(), k),
        Side::Right => ColoredBigraph::new(old_left.clone(), same_roles, k),
    };
    let mut part_ids = Vec::with_capacity(parts);
    for i in 0..parts {
        let id = match side {
            Side::Left => new.add_left_vertex(role_of(i)),
            Side::Right => new.add_right_vertex(role_of(i)),
        };
        part_ids.push(id);
    }
    for (l, r, color, m) in g.edges() {
        let at = match side {
            Side::Left => l,
            Side::Right => r,
        };
        if at == vertex {
            continue;
        }
        match side {
            Side::Left => new.add_edges(map_same[l].unwrap(), r, color, m),
            Side::Right => new.add_edges(l, map_same[r].unwrap(), color, m),
        }
    }
    for (i, part) in part_edges.iter().enumerate() {
        for (&(u, sym), &m) in part {
            match side {
                Side::Left => new.add_edges(part_ids[i], u, Some(sym), m),
                Side::Right => new.add_edges(u, part_ids[i], Some(sym), m),
            }
        }
    }
    Ok((new, plan))
}

/// One extraction step: a subgraph of the star with degree within
/// `⌊d/p'⌋..⌈d/p'⌉` at every live neighbor and color.
fn extract_part(
    star: &StarPart,
    p_left: usize,
    other_len: usize,
    k: usize,
) -> Result<StarPart, String> {
    let mut by_neighbor = vec![0usize; other_len];
    let mut by_color = vec![0usize; k + 1];
    for (&(u, sym), &m) in star {
        by_neighbor[u] += m;
        by_color[sym] += m;
    }
    let neighbors: Vec<usize> = (0..other_len).filter(|&u| by_neighbor[u] > 0).collect();
    let colors: Vec<usize> = (1..=k).filter(|&sym| by_color[sym] > 0).collect();
    let mut aux = ColoredBigraph::new(
        neighbors.iter().map(|&u| VertexRole::Row(u)).collect(),
        colors.iter().map(|&sym| VertexRole::Sym(sym)).collect(),
        k,
    );
    for (ai, &u) in neighbors.iter().enumerate() {
        for (bi, &sym) in colors.iter().enumerate() {
            let m = star.get(&(u, sym)).copied().unwrap_or(0);
            if m > 0 {
                aux.add_edges(ai, bi, None, m);
            }
        }
    }
    let bounds = |total: usize| div_bounds(total, p_left);
    let (g_left, f_left): (Vec<usize>, Vec<usize>) =
        neighbors.iter().map(|&u| bounds(by_neighbor[u])).unzip();
    let (g_right, f_right): (Vec<usize>, Vec<usize>) =
        colors.iter().map(|&sym| bounds(by_color[sym])).unzip();
    let spec = DegreeSpec::new(g_left, f_left, g_right, f_right).expect("floor <= ceil");
    match find_gf_factor(&aux, &spec).expect("aux instance is well formed") {
        FactorOutcome::Factor(sub) => {
            let mut part = StarPart::new();
            for (ai, &u) in neighbors.iter().enumerate() {
                for (bi, &sym) in colors.iter().enumerate() {
                    let m = sub.mult[ai][bi];
                    if m > 0 {
                        part.insert((u, sym), m);
                    }
                }
            }
            Ok(part)
        }
        FactorOutcome::Infeasible(cert) => Err(format!(
            "balanced extraction infeasible ({}, lhs={}, rhs={})",
            cert.family(),
            cert.sides().0,
            cert.sides().1
        )),
    }
}

/// Splits the row super-vertex into the missing rows and the column
/// super-vertex into the missing columns, checks that the result is the
/// simple complete bigraph properly colored everywhere, and decodes it
/// as a square extending the rectangle.
pub fn detach_to_square(g: &ColoredBigraph, rect: &Rectangle) -> Result<Square, DetachError> {
    let n = rect.profile().n();
    let k = rect.profile().k();
    let (r, s) = (rect.r(), rect.s());

    for sym in 1..=k {
        let class = g.class_size(Some(sym));
        if class != rect.profile().rho_of(sym) {
            return Err(DetachError::Precondition {
                detail: format!(
                    "color class {sym} has {class} edges, expected {}",
                    rect.profile().rho_of(sym)
                ),
            });
        }
    }
    if g.class_size(None) != 0 {
        return Err(DetachError::Precondition {
            detail: "graph still has uncolored edges".into(),
        });
    }
    for (idx, &role) in g.left().iter().enumerate() {
        let cap = match role {
            VertexRole::Row(_) => 1,
            VertexRole::SuperRow => n - r,
            other => {
                return Err(DetachError::Precondition {
                    detail: format!("unexpected left vertex {other:?}"),
                })
            }
        };
        for sym in 1..=k {
            if g.deg_left_colored(idx, Some(sym)) > cap {
                return Err(DetachError::Precondition {
                    detail: format!("color {sym} over-saturates {}", role.label()),
                });
            }
        }
    }
    for (idx, &role) in g.right().iter().enumerate() {
        let cap = match role {
            VertexRole::Col(_) => 1,
            VertexRole::SuperCol => n - s,
            other => {
                return Err(DetachError::Precondition {
                    detail: format!("unexpected right vertex {other:?}"),
                })
            }
        };
        for sym in 1..=k {
            if g.deg_right_colored(idx, Some(sym)) > cap {
                return Err(DetachError::Precondition {
                    detail: format!("color {sym} over-saturates {}", role.label()),
                });
            }
        }
    }

    let alpha_beta_mult = match (
        g.find_left(VertexRole::SuperRow),
        g.find_right(VertexRole::SuperCol),
    ) {
        (Some(a), Some(b)) => g.mult(a, b),
        _ => 0,
    };

    let mut current = g.clone();
    if let Some(alpha) = current.find_left(VertexRole::SuperRow) {
        let (split, _plan) =
            split_vertex(&current, Side::Left, alpha, n - r, |i| VertexRole::Row(r + i))?;
        current = split;
    }
    if let Some(beta) = current.find_right(VertexRole::SuperCol) {
        let (split, _plan) =
            split_vertex(&current, Side::Right, beta, n - s, |j| VertexRole::Col(s + j))?;
        current = split;
    }

    // The detached graph must be the simple complete bigraph, properly
    // colored, with balanced multiplicity between every new row/column
    // pair relative to the amalgamated graph.
    if current.left().len() != n || current.right().len() != n {
        return Err(DetachError::Postcondition {
            detail: "detached graph is not n by n".into(),
        });
    }
    let mut row_of = vec![usize::MAX; n];
    let mut col_of = vec![usize::MAX; n];
    for (idx, &role) in current.left().iter().enumerate() {
        match role {
            VertexRole::Row(i) if i < n => row_of[i] = idx,
            other => {
                return Err(DetachError::Postcondition {
                    detail: format!("unexpected detached vertex {other:?}"),
                })
            }
        }
    }
    for (idx, &role) in current.right().iter().enumerate() {
        match role {
            VertexRole::Col(j) if j < n => col_of[j] = idx,
            other => {
                return Err(DetachError::Postcondition {
                    detail: format!("unexpected detached vertex {other:?}"),
                })
            }
        }
    }
    if n > r && n > s {
        let (lo, hi) = div_bounds(alpha_beta_mult, (n - r) * (n - s));
        for i in r..n {
            for j in s..n {
                let m = current.mult(row_of[i], col_of[j]);
                if !(lo..=hi).contains(&m) {
                    return Err(DetachError::Postcondition {
                        detail: format!(
                            "super-pair multiplicity {m} at ({i},{j}) outside {lo}..={hi}"
                        ),
                    });
                }
            }
        }
    }
    let mut grid = vec![vec![0usize; n]; n];
    for (l, rr, color, m) in current.edges() {
        let (VertexRole::Row(i), VertexRole::Col(j)) = (current.left()[l], current.right()[rr])
        else {
            unreachable!("roles checked above");
        };
        let sym = color.expect("all edges colored");
        if m != 1 {
            return Err(DetachError::Postcondition {
                detail: format!("multiplicity {m} between x{} and y{}", i + 1, j + 1),
            });
        }
        if grid[i][j] != 0 {
            return Err(DetachError::Postcondition {
                detail: format!("two edges decode into cell ({i},{j})"),
            });
        }
        grid[i][j] = sym;
    }
    if grid.iter().any(|row| row.contains(&0)) {
        return Err(DetachError::Postcondition {
            detail: "detached graph is not complete".into(),
        });
    }
    let square =
        Square::new(grid, rect.profile().clone()).map_err(|e| DetachError::Postcondition {
            detail: format!("decoded grid is not a valid square: {e}"),
        })?;
    match square.is_completion_of(rect) {
        Ok(true) => Ok(square),
        Ok(false) => Err(DetachError::Postcondition {
            detail: "decoded square does not extend the rectangle".into(),
        }),
        Err(e) => Err(DetachError::Postcondition {
            detail: format!("completion check failed: {e}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RhoProfile;

    #[test]
    fn exact_divisibility_split() {
        // Star with two neighbors and two colors, two edges each: both
        // parts get exactly one edge per neighbor and per color.
        let mut g = ColoredBigraph::new(
            vec![VertexRole::SuperRow],
            vec![VertexRole::Col(0), VertexRole::Col(1)],
            2,
        );
        g.add_edges(0, 0, Some(1), 1);
        g.add_edges(0, 1, Some(2), 1);
        g.add_edges(0, 0, Some(2), 1);
        g.add_edges(0, 1, Some(1), 1);
        let (split, plan) = split_vertex(&g, Side::Left, 0, 2, VertexRole::Row).unwrap();
        assert_eq!(plan.neighbor_targets, vec![(0, 1, 1), (1, 1, 1)]);
        assert_eq!(plan.color_targets, vec![(1, 1, 1), (2, 1, 1)]);
        assert_eq!(split.left().len(), 2);
        for part in 0..2 {
            assert_eq!(split.deg_left(part), 2);
            for sym in 1..=2 {
                assert_eq!(split.deg_left_colored(part, Some(sym)), 1);
            }
            for u in 0..2 {
                assert_eq!(split.mult(part, u), 1);
            }
        }
    }

    #[test]
    fn uneven_split_respects_bounds() {
        let mut g = ColoredBigraph::new(
            vec![VertexRole::SuperRow],
            vec![VertexRole::Col(0), VertexRole::Col(1), VertexRole::Col(2)],
            3,
        );
        g.add_edges(0, 0, Some(1), 3);
        g.add_edges(0, 1, Some(2), 2);
        g.add_edges(0, 2, Some(3), 2);
        let (split, _) = split_vertex(&g, Side::Left, 0, 3, VertexRole::Row).unwrap();
        for part in 0..3 {
            // Neighbor 0 has 3 parallel edges: exactly one per part;
            // the two-edge neighbors contribute zero or one.
            assert_eq!(split.mult(part, 0), 1);
            assert!(split.mult(part, 1) <= 1);
            assert!(split.mult(part, 2) <= 1);
            // Color 1 has 3 edges: exactly one per part.
            assert_eq!(split.deg_left_colored(part, Some(1)), 1);
            for sym in 2..=3 {
                assert!(split.deg_left_colored(part, Some(sym)) <= 1);
            }
        }
        // Everything is handed out.
        assert_eq!((0..3).map(|p| split.deg_left(p)).sum::<usize>(), 7);
    }

    #[test]
    fn trivial_split_is_a_renaming() {
        let mut g = ColoredBigraph::new(
            vec![VertexRole::SuperRow, VertexRole::Row(0)],
            vec![VertexRole::Col(0)],
            2,
        );
        g.add_edges(0, 0, Some(1), 2);
        g.add_edges(1, 0, Some(2), 1);
        let (split, _) = split_vertex(&g, Side::Left, 0, 1, |_| VertexRole::Row(9)).unwrap();
        let renamed = split.find_left(VertexRole::Row(9)).unwrap();
        assert_eq!(split.mult_colored(renamed, 0, Some(1)), 2);
        let kept = split.find_left(VertexRole::Row(0)).unwrap();
        assert_eq!(split.mult_colored(kept, 0, Some(2)), 1);
    }

    #[test]
    fn uncolored_star_is_rejected() {
        let mut g = ColoredBigraph::new(vec![VertexRole::SuperRow], vec![VertexRole::Col(0)], 1);
        g.add_edges(0, 0, None, 2);
        assert!(matches!(
            split_vertex(&g, Side::Left, 0, 2, VertexRole::Row),
            Err(DetachError::NotFullyColored { .. })
        ));
    }

    #[test]
    fn two_vertex_graph_detaches_to_latin_square() {
        // Order-2 construction: 4 parallel edges, one color class per
        // symbol, split both super-vertices in half.
        let profile = RhoProfile::new(2, 2, vec![2, 2]).unwrap();
        let rect = crate::model::Rectangle::new(vec![], profile.clone()).unwrap();
        let mut g =
            ColoredBigraph::new(vec![VertexRole::SuperRow], vec![VertexRole::SuperCol], 2);
        g.add_edges(0, 0, Some(1), 2);
        g.add_edges(0, 0, Some(2), 2);
        let square = detach_to_square(&g, &rect).unwrap();
        assert_eq!(square.n(), 2);
    }

    #[test]
    fn colored_amalgamation_detaches_and_extends() {
        // Instance [[1]] in a 2x2 target with budgets [2,2]: the only
        // valid coloring routes symbol 2 through both super edges.
        let profile = RhoProfile::new(2, 2, vec![2, 2]).unwrap();
        let rect = crate::model::Rectangle::new(vec![vec![1]], profile).unwrap();
        let mut g = ColoredBigraph::new(
            vec![VertexRole::Row(0), VertexRole::SuperRow],
            vec![VertexRole::Col(0), VertexRole::SuperCol],
            2,
        );
        g.add_edges(0, 0, Some(1), 1); // the rectangle cell
        g.add_edges(1, 0, Some(2), 1); // alpha-y1
        g.add_edges(0, 1, Some(2), 1); // x1-beta
        g.add_edges(1, 1, Some(1), 1); // alpha-beta
        let square = detach_to_square(&g, &rect).unwrap();
        assert_eq!(square.grid(), &[vec![1, 2], vec![2, 1]]);
    }

    #[test]
    fn unbalanced_input_is_rejected() {
        let profile = RhoProfile::new(2, 2, vec![2, 2]).unwrap();
        let rect = crate::model::Rectangle::new(vec![], profile).unwrap();
        let mut g =
            ColoredBigraph::new(vec![VertexRole::SuperRow], vec![VertexRole::SuperCol], 2);
        g.add_edges(0, 0, Some(1), 3);
        g.add_edges(0, 0, Some(2), 1);
        // Color class sizes do not match the budgets.
        assert!(matches!(
            detach_to_square(&g, &rect),
            Err(DetachError::Precondition { .. })
        ));
    }
}
