//! Colored bipartite multigraphs and the auxiliary constructions the
//! completion pipeline runs on: the cell graph `F` of an instance, its
//! amalgamation `G` (new rows merged into a super-vertex `α`, new
//! columns into `β`), and the deficiency bigraph `Γ` joining rows and
//! columns to the symbols they miss.
//!
//! Multiplicities are stored as counts per `(left, right, color)`
//! triple; vertex order is fixed at construction so every traversal is
//! deterministic.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::Rectangle;

/// Role tag of a vertex. Row/column indices are 0-based; symbols 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VertexRole {
    /// Row vertex `x_i`.
    Row(usize),
    /// Column vertex `y_j`.
    Col(usize),
    /// Super-vertex `α` amalgamating the missing rows.
    SuperRow,
    /// Super-vertex `β` amalgamating the missing columns.
    SuperCol,
    /// Symbol vertex.
    Sym(usize),
}

impl VertexRole {
    pub fn label(&self) -> String {
        match self {
            VertexRole::Row(i) => format!("x{}", i + 1),
            VertexRole::Col(j) => format!("y{}", j + 1),
            VertexRole::SuperRow => "alpha".into(),
            VertexRole::SuperCol => "beta".into(),
            VertexRole::Sym(sym) => format!("s{sym}"),
        }
    }
}

/// Edge color: `None` is uncolored, `Some(ℓ)` carries symbol `ℓ`.
pub type Color = Option<usize>;

/// Loopless bipartite multigraph with optional per-edge colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredBigraph {
    left: Vec<VertexRole>,
    right: Vec<VertexRole>,
    k: usize,
    edges: BTreeMap<(usize, usize, Color), usize>,
    mult: Vec<Vec<usize>>,
    // Per-vertex degree by color; index 0 holds the uncolored count.
    left_color_deg: Vec<Vec<usize>>,
    right_color_deg: Vec<Vec<usize>>,
}

impl ColoredBigraph {
    pub fn new(left: Vec<VertexRole>, right: Vec<VertexRole>, k: usize) -> Self {
        let mult = vec![vec![0; right.len()]; left.len()];
        let left_color_deg = vec![vec![0; k + 1]; left.len()];
        let right_color_deg = vec![vec![0; k + 1]; right.len()];
        ColoredBigraph {
            left,
            right,
            k,
            edges: BTreeMap::new(),
            mult,
            left_color_deg,
            right_color_deg,
        }
    }

    pub fn left(&self) -> &[VertexRole] {
        &self.left
    }

    pub fn right(&self) -> &[VertexRole] {
        &self.right
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn add_left_vertex(&mut self, role: VertexRole) -> usize {
        self.left.push(role);
        self.mult.push(vec![0; self.right.len()]);
        self.left_color_deg.push(vec![0; self.k + 1]);
        self.left.len() - 1
    }

    pub fn add_right_vertex(&mut self, role: VertexRole) -> usize {
        self.right.push(role);
        for row in &mut self.mult {
            row.push(0);
        }
        self.right_color_deg.push(vec![0; self.k + 1]);
        self.right.len() - 1
    }

    fn color_slot(color: Color) -> usize {
        color.unwrap_or(0)
    }

    pub fn add_edges(&mut self, l: usize, r: usize, color: Color, count: usize) {
        if count == 0 {
            return;
        }
        if let Some(sym) = color {
            assert!(sym >= 1 && sym <= self.k, "color {sym} out of range");
        }
        *self.edges.entry((l, r, color)).or_insert(0) += count;
        self.mult[l][r] += count;
        self.left_color_deg[l][Self::color_slot(color)] += count;
        self.right_color_deg[r][Self::color_slot(color)] += count;
    }

    pub fn remove_edges(&mut self, l: usize, r: usize, color: Color, count: usize) {
        if count == 0 {
            return;
        }
        let slot = self
            .edges
            .get_mut(&(l, r, color))
            .unwrap_or_else(|| panic!("no ({l},{r},{color:?}) edges to remove"));
        assert!(*slot >= count, "removing more edges than present");
        *slot -= count;
        if *slot == 0 {
            self.edges.remove(&(l, r, color));
        }
        self.mult[l][r] -= count;
        self.left_color_deg[l][Self::color_slot(color)] -= count;
        self.right_color_deg[r][Self::color_slot(color)] -= count;
    }

    /// Iterates `(left, right, color, multiplicity)` in a fixed order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Color, usize)> + '_ {
        self.edges.iter().map(|(&(l, r, c), &m)| (l, r, c, m))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().sum()
    }

    pub fn mult(&self, l: usize, r: usize) -> usize {
        self.mult[l][r]
    }

    pub fn mult_colored(&self, l: usize, r: usize, color: Color) -> usize {
        self.edges.get(&(l, r, color)).copied().unwrap_or(0)
    }

    pub fn deg_left(&self, l: usize) -> usize {
        self.mult[l].iter().sum()
    }

    pub fn deg_right(&self, r: usize) -> usize {
        self.mult.iter().map(|row| row[r]).sum()
    }

    /// Degree of left vertex `l` within color class `color`.
    pub fn deg_left_colored(&self, l: usize, color: Color) -> usize {
        self.left_color_deg[l][Self::color_slot(color)]
    }

    pub fn deg_right_colored(&self, r: usize, color: Color) -> usize {
        self.right_color_deg[r][Self::color_slot(color)]
    }

    /// Total multiplicity between a left vertex and a set of right vertices.
    pub fn mult_left_to(&self, l: usize, rights: &[usize]) -> usize {
        rights.iter().map(|&r| self.mult[l][r]).sum()
    }

    pub fn mult_right_to(&self, r: usize, lefts: &[usize]) -> usize {
        lefts.iter().map(|&l| self.mult[l][r]).sum()
    }

    pub fn mult_between(&self, lefts: &[usize], rights: &[usize]) -> usize {
        lefts.iter().map(|&l| self.mult_left_to(l, rights)).sum()
    }

    /// Edges of one color class, `(left, right, multiplicity)`.
    pub fn color_class(&self, color: Color) -> Vec<(usize, usize, usize)> {
        self.edges
            .iter()
            .filter(|((_, _, c), _)| *c == color)
            .map(|(&(l, r, _), &m)| (l, r, m))
            .collect()
    }

    pub fn class_size(&self, color: Color) -> usize {
        self.edges
            .iter()
            .filter(|((_, _, c), _)| *c == color)
            .map(|(_, &m)| m)
            .sum()
    }

    pub fn find_left(&self, role: VertexRole) -> Option<usize> {
        self.left.iter().position(|&v| v == role)
    }

    pub fn find_right(&self, role: VertexRole) -> Option<usize> {
        self.right.iter().position(|&v| v == role)
    }

    /// Line-oriented debug serialization: the two vertex lists, then one
    /// `u v color mult` line per edge triple in fixed order. Colors print
    /// as the symbol id or `-` for uncolored.
    pub fn to_debug_text(&self) -> String {
        let mut out = String::new();
        out.push_str("left:");
        for v in &self.left {
            let _ = write!(out, " {}", v.label());
        }
        out.push('\n');
        out.push_str("right:");
        for v in &self.right {
            let _ = write!(out, " {}", v.label());
        }
        out.push('\n');
        for (l, r, c, m) in self.edges() {
            let color = c.map_or_else(|| "-".to_string(), |sym| sym.to_string());
            let _ = writeln!(
                out,
                "{} {} {} {}",
                self.left[l].label(),
                self.right[r].label(),
                color,
                m
            );
        }
        out
    }
}

/// The complete bigraph `K_{n,n}` on rows and columns, with the edge
/// `x_i y_j` colored by the cell entry for cells inside the rectangle
/// and uncolored elsewhere.
pub fn build_f(rect: &Rectangle) -> ColoredBigraph {
    let n = rect.profile().n();
    let left: Vec<VertexRole> = (0..n).map(VertexRole::Row).collect();
    let right: Vec<VertexRole> = (0..n).map(VertexRole::Col).collect();
    let mut g = ColoredBigraph::new(left, right, rect.profile().k());
    for i in 0..n {
        for j in 0..n {
            let color = if i < rect.r() && j < rect.s() {
                Some(rect.grid()[i][j])
            } else {
                None
            };
            g.add_edges(i, j, color, 1);
        }
    }
    g
}

/// Amalgamation of `F` together with the record of where each merged
/// edge came from, sufficient to reconstruct `F` exactly.
#[derive(Debug, Clone)]
pub struct Amalgamation {
    pub graph: ColoredBigraph,
    /// Maps each edge triple of the amalgamated graph to the list of
    /// original `(row, col)` endpoint pairs it absorbed.
    pub origin: BTreeMap<(usize, usize, Color), Vec<(usize, usize)>>,
}

/// Merges rows `r..n` of `F` into `α` and columns `s..n` into `β`.
/// Whichever is empty is omitted entirely.
pub fn amalgamate(f: &ColoredBigraph, rect: &Rectangle) -> Amalgamation {
    let n = rect.profile().n();
    let (r, s) = (rect.r(), rect.s());
    let mut left: Vec<VertexRole> = (0..r).map(VertexRole::Row).collect();
    if r < n {
        left.push(VertexRole::SuperRow);
    }
    let mut right: Vec<VertexRole> = (0..s).map(VertexRole::Col).collect();
    if s < n {
        right.push(VertexRole::SuperCol);
    }
    let mut g = ColoredBigraph::new(left, right, rect.profile().k());
    let mut origin: BTreeMap<(usize, usize, Color), Vec<(usize, usize)>> = BTreeMap::new();
    for (i, j, color, m) in f.edges() {
        let l = if i < r { i } else { r };
        let rr = if j < s { j } else { s };
        g.add_edges(l, rr, color, m);
        let entry = origin.entry((l, rr, color)).or_default();
        for _ in 0..m {
            entry.push((i, j));
        }
    }
    Amalgamation { graph: g, origin }
}

/// Rebuilds the detached graph from an amalgamation's origin record.
pub fn deamalgamate(am: &Amalgamation, rect: &Rectangle) -> ColoredBigraph {
    let n = rect.profile().n();
    let left: Vec<VertexRole> = (0..n).map(VertexRole::Row).collect();
    let right: Vec<VertexRole> = (0..n).map(VertexRole::Col).collect();
    let mut f = ColoredBigraph::new(left, right, rect.profile().k());
    for ((_, _, color), originals) in &am.origin {
        for &(i, j) in originals {
            f.add_edges(i, j, *color, 1);
        }
    }
    f
}

/// The deficiency bigraph `Γ` on `X ∪ Y` versus symbols: `u ℓ` is an
/// edge iff symbol `ℓ` does not occur in row/column `u`. Left vertices
/// are the `r` rows followed by the `s` columns.
pub fn build_gamma(rect: &Rectangle) -> ColoredBigraph {
    let k = rect.profile().k();
    let mut left: Vec<VertexRole> = (0..rect.r()).map(VertexRole::Row).collect();
    left.extend((0..rect.s()).map(VertexRole::Col));
    let right: Vec<VertexRole> = (1..=k).map(VertexRole::Sym).collect();
    let mut g = ColoredBigraph::new(left, right, k);
    for i in 0..rect.r() {
        for sym in 1..=k {
            if !rect.row_contains(i, sym) {
                g.add_edges(i, sym - 1, None, 1);
            }
        }
    }
    for j in 0..rect.s() {
        for sym in 1..=k {
            if !rect.col_contains(j, sym) {
                g.add_edges(rect.r() + j, sym - 1, None, 1);
            }
        }
    }
    g
}

/// The column-only deficiency bigraph used when `s = n`: columns versus
/// the symbols they miss.
pub fn build_gamma_hall(rect: &Rectangle) -> ColoredBigraph {
    assert_eq!(rect.s(), rect.profile().n(), "hall form requires s = n");
    let k = rect.profile().k();
    let left: Vec<VertexRole> = (0..rect.s()).map(VertexRole::Col).collect();
    let right: Vec<VertexRole> = (1..=k).map(VertexRole::Sym).collect();
    let mut g = ColoredBigraph::new(left, right, k);
    for j in 0..rect.s() {
        for sym in 1..=k {
            if !rect.col_contains(j, sym) {
                g.add_edges(j, sym - 1, None, 1);
            }
        }
    }
    g
}

/// Splits `Γ` into its row-side and column-side induced subgraphs.
pub fn induced_sides(gamma: &ColoredBigraph, rect: &Rectangle) -> (ColoredBigraph, ColoredBigraph) {
    let k = rect.profile().k();
    let right: Vec<VertexRole> = (1..=k).map(VertexRole::Sym).collect();
    let mut g1 = ColoredBigraph::new(
        (0..rect.r()).map(VertexRole::Row).collect(),
        right.clone(),
        k,
    );
    let mut g2 = ColoredBigraph::new((0..rect.s()).map(VertexRole::Col).collect(), right, k);
    for (l, r, color, m) in gamma.edges() {
        match gamma.left()[l] {
            VertexRole::Row(i) => g1.add_edges(i, r, color, m),
            VertexRole::Col(j) => g2.add_edges(j, r, color, m),
            other => panic!("unexpected vertex {other:?} in gamma"),
        }
    }
    (g1, g2)
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
    fn f_graph_shape() {
        let l = rect(&[&[1]], 2, 2, &[2, 2]);
        let f = build_f(&l);
        assert_eq!(f.edge_count(), 4);
        assert_eq!(f.class_size(Some(1)), 1);
        assert_eq!(f.class_size(None), 3);

        let l = rect(&[&[1, 2], &[2, 1]], 3, 3, &[3, 3, 3]);
        let f = build_f(&l);
        assert_eq!(f.edge_count(), 9);
        let colored: usize = (1..=3).map(|sym| f.class_size(Some(sym))).sum();
        assert_eq!(colored, 4);
        for sym in 1..=3 {
            assert_eq!(f.class_size(Some(sym)), l.e_of(sym));
            for v in 0..3 {
                assert!(f.deg_left_colored(v, Some(sym)) <= 1);
                assert!(f.deg_right_colored(v, Some(sym)) <= 1);
            }
        }
    }

    #[test]
    fn f_encodes_grid() {
        let l = rect(&[&[1, 2], &[2, 1]], 3, 4, &[3, 2, 2, 2]);
        let f = build_f(&l);
        for i in 0..l.r() {
            for j in 0..l.s() {
                assert_eq!(f.mult_colored(i, j, Some(l.grid()[i][j])), 1);
            }
        }
    }

    #[test]
    fn amalgamation_multiplicities() {
        let l = rect(&[&[1]], 2, 2, &[2, 2]);
        let am = amalgamate(&build_f(&l), &l);
        let g = &am.graph;
        let alpha = g.find_left(VertexRole::SuperRow).unwrap();
        let beta = g.find_right(VertexRole::SuperCol).unwrap();
        assert_eq!(g.mult(alpha, 0), 1);
        assert_eq!(g.mult(0, beta), 1);
        assert_eq!(g.mult(alpha, beta), 1);

        let l = rect(&[&[1, 2], &[2, 1]], 3, 3, &[3, 3, 3]);
        let am = amalgamate(&build_f(&l), &l);
        let g = &am.graph;
        let alpha = g.find_left(VertexRole::SuperRow).unwrap();
        let beta = g.find_right(VertexRole::SuperCol).unwrap();
        assert_eq!(g.mult(alpha, beta), 1);
        for j in 0..2 {
            assert_eq!(g.mult(alpha, j), 1);
        }
        for i in 0..2 {
            assert_eq!(g.mult(i, beta), 1);
        }
    }

    #[test]
    fn amalgamation_full_width_has_no_beta() {
        let l = rect(&[&[1, 2, 3]], 3, 3, &[3, 3, 3]);
        let am = amalgamate(&build_f(&l), &l);
        let g = &am.graph;
        assert!(g.find_right(VertexRole::SuperCol).is_none());
        let alpha = g.find_left(VertexRole::SuperRow).unwrap();
        for j in 0..3 {
            assert_eq!(g.mult(alpha, j), 3 - 1);
        }
    }

    #[test]
    fn amalgamation_roundtrip() {
        let l = rect(&[&[1, 2], &[2, 3]], 4, 4, &[4, 4, 4, 4]);
        let f = build_f(&l);
        let am = amalgamate(&f, &l);
        let back = deamalgamate(&am, &l);
        assert_eq!(back, f);
    }

    #[test]
    fn gamma_small_instances() {
        let l = rect(&[&[1]], 2, 2, &[2, 2]);
        let g = build_gamma(&l);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.deg_right(0), 0); // symbol 1 present in the row and column
        assert_eq!(g.deg_right(1), 2);

        let l = rect(&[&[1, 2], &[2, 1]], 3, 3, &[3, 3, 3]);
        let g = build_gamma(&l);
        assert_eq!(g.deg_right(2), 4);
        assert_eq!(g.deg_right(0), 0);
        assert_eq!(g.deg_right(1), 0);
    }

    #[test]
    fn gamma_degree_identities() {
        let l = rect(&[&[1, 2, 5], &[2, 3, 1]], 4, 6, &[4, 4, 2, 2, 2, 2]);
        let (r, s, k) = (l.r(), l.s(), l.profile().k());
        let g = build_gamma(&l);
        for i in 0..r {
            assert_eq!(g.deg_left(i), k - s);
        }
        for j in 0..s {
            assert_eq!(g.deg_left(r + j), k - r);
        }
        let rows: Vec<usize> = (0..r).collect();
        let cols: Vec<usize> = (r..r + s).collect();
        for sym in 1..=k {
            assert_eq!(g.mult_right_to(sym - 1, &rows), r - l.e_of(sym));
            assert_eq!(g.mult_right_to(sym - 1, &cols), s - l.e_of(sym));
            assert_eq!(g.deg_right(sym - 1), r + s - 2 * l.e_of(sym));
        }
        let total: usize = (1..=k).map(|sym| g.deg_right(sym - 1)).sum();
        assert_eq!(total, r * (k - s) + s * (k - r));
    }

    #[test]
    fn gamma_hall_degrees() {
        let l = rect(&[&[1, 2, 3]], 3, 3, &[3, 3, 3]);
        let g = build_gamma_hall(&l);
        for j in 0..3 {
            assert_eq!(g.deg_left(j), 3 - 1);
        }
        for sym in 1..=3 {
            assert_eq!(g.deg_right(sym - 1), 3 - l.e_of(sym));
        }
    }

    #[test]
    fn induced_sides_partition_gamma() {
        let l = rect(&[&[1]], 2, 2, &[2, 2]);
        let g = build_gamma(&l);
        let (g1, g2) = induced_sides(&g, &l);
        assert_eq!(g1.edge_count(), 1);
        assert_eq!(g1.mult(0, 1), 1); // x1 – symbol 2
        assert_eq!(g2.edge_count(), 1);
        assert_eq!(g2.mult(0, 1), 1); // y1 – symbol 2

        let l = rect(&[&[1, 2], &[3, 1]], 4, 5, &[4, 3, 3, 3, 3]);
        let g = build_gamma(&l);
        let (g1, g2) = induced_sides(&g, &l);
        assert_eq!(g1.edge_count() + g2.edge_count(), g.edge_count());
        let rows: Vec<usize> = (0..l.r()).collect();
        for sym in 1..=5 {
            assert_eq!(
                g1.mult_right_to(sym - 1, &rows),
                l.r() - l.e_of(sym)
            );
        }
    }

    #[test]
    fn debug_text_is_stable() {
        let l = rect(&[&[1]], 2, 2, &[2, 2]);
        let g = build_gamma(&l);
        let text = g.to_debug_text();
        assert_eq!(text, "left: x1 y1\nright: s1 s2\nx1 s2 - 1\ny1 s2 - 1\n");
    }
}
