//! Instance representation and validation: symbol profiles, filled
//! rectangles, squares, and the missing-symbol statistics the
//! characterizations quantify over.
//!
//! Symbols are 1-based ids in `1..=k`. The id `0` never appears inside a
//! validated [`Rectangle`] or [`Square`]; it is reserved for I/O of
//! partially printed grids.

use thiserror::Error;

/// Saturating subtraction on unsigned integers (`x ∸ y = max{0, x − y}`).
#[inline]
pub fn monus(x: usize, y: usize) -> usize {
    x.saturating_sub(y)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("SumMismatch: rho sums to {got}, expected n^2 = {expected}")]
    SumMismatch { expected: usize, got: usize },
    #[error("RangeViolation: {detail}")]
    RangeViolation { detail: String },
    #[error("BadDimensions: grid is {rows}x{cols} but order is {n}")]
    BadDimensions { rows: usize, cols: usize, n: usize },
    #[error("BadSymbol: cell ({row},{col}) holds {value}, outside 1..={k}")]
    BadSymbol {
        row: usize,
        col: usize,
        value: usize,
        k: usize,
    },
    #[error("RowRepeat: symbol {symbol} occurs twice in row {row}, second time at cell ({row},{col})")]
    RowRepeat { row: usize, col: usize, symbol: usize },
    #[error("ColRepeat: symbol {symbol} occurs twice in column {col}, second time at cell ({row},{col})")]
    ColRepeat { row: usize, col: usize, symbol: usize },
    #[error("BudgetExceeded: symbol {symbol} occurs {count} times, budget {budget}")]
    BudgetExceeded {
        symbol: usize,
        count: usize,
        budget: usize,
    },
    #[error("DimensionMismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("IndexOutOfRange: {what} index {index} not below {limit}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },
}

impl ModelError {
    /// Stable short code for reports and exit messages.
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::SumMismatch { .. } => "SumMismatch",
            ModelError::RangeViolation { .. } => "RangeViolation",
            ModelError::BadDimensions { .. } => "BadDimensions",
            ModelError::BadSymbol { .. } => "BadSymbol",
            ModelError::RowRepeat { .. } => "RowRepeat",
            ModelError::ColRepeat { .. } => "ColRepeat",
            ModelError::BudgetExceeded { .. } => "BudgetExceeded",
            ModelError::DimensionMismatch { .. } => "DimensionMismatch",
            ModelError::IndexOutOfRange { .. } => "IndexOutOfRange",
        }
    }
}

/// The tuple `(n, k, ρ)`: an order, a symbol count and the prescribed
/// number of occurrences of each symbol, with `Σ ρ_ℓ = n²` and
/// `1 ≤ ρ_ℓ ≤ n ≤ k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoProfile {
    n: usize,
    k: usize,
    rho: Vec<usize>,
}

impl RhoProfile {
    pub fn new(n: usize, k: usize, rho: Vec<usize>) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::RangeViolation {
                detail: "order n must be positive".into(),
            });
        }
        if k < n {
            return Err(ModelError::RangeViolation {
                detail: format!("symbol count k = {k} is below order n = {n}"),
            });
        }
        if rho.len() != k {
            return Err(ModelError::RangeViolation {
                detail: format!("rho has {} entries, expected k = {k}", rho.len()),
            });
        }
        for (idx, &v) in rho.iter().enumerate() {
            if v < 1 || v > n {
                return Err(ModelError::RangeViolation {
                    detail: format!("rho_{} = {v} outside 1..={n}", idx + 1),
                });
            }
        }
        let sum: usize = rho.iter().sum();
        if sum != n * n {
            return Err(ModelError::SumMismatch {
                expected: n * n,
                got: sum,
            });
        }
        Ok(RhoProfile { n, k, rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rho(&self) -> &[usize] {
        &self.rho
    }

    /// Prescribed occurrences of symbol `sym` ( 1-based).
    pub fn rho_of(&self, sym: usize) -> usize {
        self.rho[sym - 1]
    }
}

/// A fully filled `r×s` array over `1..=k`, latin in rows and columns,
/// with each symbol within its budget. Carries the derived occurrence
/// counts and per-row/per-column presence tables built at validation.
#[derive(Debug, Clone)]
pub struct Rectangle {
    profile: RhoProfile,
    r: usize,
    s: usize,
    grid: Vec<Vec<usize>>,
    e: Vec<usize>,
    row_has: Vec<Vec<bool>>,
    col_has: Vec<Vec<bool>>,
}

impl Rectangle {
    pub fn new(grid: Vec<Vec<usize>>, profile: RhoProfile) -> Result<Self, ModelError> {
        let n = profile.n();
        let k = profile.k();
        let r = grid.len();
        let s = if r == 0 { 0 } else { grid[0].len() };
        if r > n || s > n {
            return Err(ModelError::BadDimensions { rows: r, cols: s, n });
        }
        if grid.iter().any(|row| row.len() != s) {
            return Err(ModelError::BadDimensions { rows: r, cols: s, n });
        }
        let mut e = vec![0usize; k];
        let mut row_has = vec![vec![false; k + 1]; r];
        let mut col_has = vec![vec![false; k + 1]; s];
        for (i, row) in grid.iter().enumerate() {
            for (j, &sym) in row.iter().enumerate() {
                if sym < 1 || sym > k {
                    return Err(ModelError::BadSymbol {
                        row: i,
                        col: j,
                        value: sym,
                        k,
                    });
                }
                if row_has[i][sym] {
                    return Err(ModelError::RowRepeat {
                        row: i,
                        col: j,
                        symbol: sym,
                    });
                }
                if col_has[j][sym] {
                    return Err(ModelError::ColRepeat {
                        row: i,
                        col: j,
                        symbol: sym,
                    });
                }
                row_has[i][sym] = true;
                col_has[j][sym] = true;
                e[sym - 1] += 1;
            }
        }
        for sym in 1..=k {
            if e[sym - 1] > profile.rho_of(sym) {
                return Err(ModelError::BudgetExceeded {
                    symbol: sym,
                    count: e[sym - 1],
                    budget: profile.rho_of(sym),
                });
            }
        }
        Ok(Rectangle {
            profile,
            r,
            s,
            grid,
            e,
            row_has,
            col_has,
        })
    }

    pub fn profile(&self) -> &RhoProfile {
        &self.profile
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn grid(&self) -> &[Vec<usize>] {
        &self.grid
    }

    /// Occurrence counts `e_ℓ`, indexed by `sym − 1`.
    pub fn e(&self) -> &[usize] {
        &self.e
    }

    pub fn e_of(&self, sym: usize) -> usize {
        self.e[sym - 1]
    }

    /// Remaining budget `ρ_ℓ − e_ℓ` of symbol `sym`.
    pub fn deficit(&self, sym: usize) -> usize {
        self.profile.rho_of(sym) - self.e_of(sym)
    }

    pub fn row_contains(&self, i: usize, sym: usize) -> bool {
        self.row_has[i][sym]
    }

    pub fn col_contains(&self, j: usize, sym: usize) -> bool {
        self.col_has[j][sym]
    }

    pub fn mu(&self) -> MuStats<'_> {
        MuStats { rect: self }
    }

    /// The deficiency sets `P_r` and `P_s`.
    pub fn p_sets(&self) -> PSets {
        let n = self.profile.n();
        let collect = |t: usize| -> Vec<usize> {
            (1..=self.profile.k())
                .filter(|&sym| self.deficit(sym) > n - t)
                .collect()
        };
        let p = PSets {
            p_r: collect(self.r),
            p_s: collect(self.s),
        };
        // The set attached to the smaller dimension is always contained
        // in the other.
        let (small, large) = if self.r <= self.s {
            (&p.p_r, &p.p_s)
        } else {
            (&p.p_s, &p.p_r)
        };
        debug_assert!(small.iter().all(|sym| large.contains(sym)));
        p
    }

    /// Checks the counting bound `e_ℓ ≥ r + s + ρ_ℓ − 2n` for every symbol.
    pub fn necessary_bound(&self) -> BoundReport {
        let n = self.profile.n();
        let mut violators = Vec::new();
        for sym in 1..=self.profile.k() {
            let required = (self.r + self.s + self.profile.rho_of(sym)) as i64 - 2 * n as i64;
            let count = self.e_of(sym) as i64;
            if count < required {
                violators.push(BoundViolation {
                    symbol: sym,
                    count,
                    required,
                });
            }
        }
        BoundReport { violators }
    }
}

/// Outcome of the counting-bound check, listing every violating symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub violators: Vec<BoundViolation>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.violators.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundViolation {
    pub symbol: usize,
    /// Occurrences of the symbol in the rectangle.
    pub count: i64,
    /// The lower bound `r + s + ρ_ℓ − 2n` it fails to meet.
    pub required: i64,
}

/// Symbols whose remaining budget exceeds what the new rows (resp.
/// columns) can absorb: `P_t = {ℓ : ρ_ℓ − e_ℓ > n − t}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PSets {
    pub p_r: Vec<usize>,
    pub p_s: Vec<usize>,
}

impl PSets {
    pub fn in_p_r(&self, sym: usize) -> bool {
        self.p_r.binary_search(&sym).is_ok()
    }

    pub fn in_p_s(&self, sym: usize) -> bool {
        self.p_s.binary_search(&sym).is_ok()
    }
}

/// An `n×n` array over `1..=k`, latin in rows and columns, with symbol
/// `ℓ` occurring exactly `ρ_ℓ` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    profile: RhoProfile,
    grid: Vec<Vec<usize>>,
}

impl Square {
    pub fn new(grid: Vec<Vec<usize>>, profile: RhoProfile) -> Result<Self, ModelError> {
        let n = profile.n();
        if grid.len() != n || grid.iter().any(|row| row.len() != n) {
            return Err(ModelError::BadDimensions {
                rows: grid.len(),
                cols: grid.first().map_or(0, |row| row.len()),
                n,
            });
        }
        let rect = Rectangle::new(grid, profile)?;
        // Counts are exact automatically: Σe = n² = Σρ with e ≤ ρ.
        debug_assert!((1..=rect.profile.k()).all(|sym| rect.e_of(sym) == rect.profile.rho_of(sym)));
        Ok(Square {
            profile: rect.profile,
            grid: rect.grid,
        })
    }

    pub fn profile(&self) -> &RhoProfile {
        &self.profile
    }

    pub fn n(&self) -> usize {
        self.profile.n()
    }

    pub fn grid(&self) -> &[Vec<usize>] {
        &self.grid
    }

    /// The top-left `r×s` block as a rectangle over the same profile.
    pub fn crop(&self, r: usize, s: usize) -> Result<Rectangle, ModelError> {
        let n = self.n();
        if r > n || s > n {
            return Err(ModelError::BadDimensions { rows: r, cols: s, n });
        }
        let grid: Vec<Vec<usize>> = self.grid[..r]
            .iter()
            .map(|row| row[..s].to_vec())
            .collect();
        Rectangle::new(grid, self.profile.clone())
    }

    /// True iff the top-left `r×s` block of this square equals the
    /// rectangle's grid.
    pub fn is_completion_of(&self, rect: &Rectangle) -> Result<bool, ModelError> {
        if self.profile != *rect.profile() {
            return Err(ModelError::DimensionMismatch {
                detail: "square and rectangle have different profiles".into(),
            });
        }
        Ok((0..rect.r()).all(|i| (0..rect.s()).all(|j| self.grid[i][j] == rect.grid()[i][j])))
    }
}

/// Missing-symbol statistics of a rectangle.
///
/// Row and column indices are 0-based; symbols are 1-based. Subset
/// arguments are index lists; duplicates are ignored.
#[derive(Debug, Clone, Copy)]
pub struct MuStats<'a> {
    rect: &'a Rectangle,
}

impl<'a> MuStats<'a> {
    fn check(&self, what: &'static str, set: &[usize], limit: usize, one_based: bool) -> Result<(), ModelError> {
        for &idx in set {
            let ok = if one_based {
                idx >= 1 && idx <= limit
            } else {
                idx < limit
            };
            if !ok {
                return Err(ModelError::IndexOutOfRange {
                    what,
                    index: idx,
                    limit,
                });
            }
        }
        Ok(())
    }

    fn dedup(set: &[usize], limit: usize) -> Vec<usize> {
        let mut seen = vec![false; limit + 1];
        let mut out = Vec::with_capacity(set.len());
        for &idx in set {
            if !seen[idx] {
                seen[idx] = true;
                out.push(idx);
            }
        }
        out
    }

    /// `μ_K(i)`: symbols of `syms` missing in row `i`.
    pub fn mu_row(&self, syms: &[usize], i: usize) -> Result<usize, ModelError> {
        self.check("row", &[i], self.rect.r(), false)?;
        self.check("symbol", syms, self.rect.profile().k(), true)?;
        Ok(Self::dedup(syms, self.rect.profile().k())
            .iter()
            .filter(|&&sym| !self.rect.row_contains(i, sym))
            .count())
    }

    /// `μ_K(j)`: symbols of `syms` missing in column `j`.
    pub fn mu_col(&self, syms: &[usize], j: usize) -> Result<usize, ModelError> {
        self.check("col", &[j], self.rect.s(), false)?;
        self.check("symbol", syms, self.rect.profile().k(), true)?;
        Ok(Self::dedup(syms, self.rect.profile().k())
            .iter()
            .filter(|&&sym| !self.rect.col_contains(j, sym))
            .count())
    }

    /// `μ_I(ℓ)`: rows of `rows` where symbol `sym` is missing.
    pub fn mu_rows(&self, rows: &[usize], sym: usize) -> Result<usize, ModelError> {
        self.check("row", rows, self.rect.r(), false)?;
        self.check("symbol", &[sym], self.rect.profile().k(), true)?;
        Ok(Self::dedup(rows, self.rect.r())
            .iter()
            .filter(|&&i| !self.rect.row_contains(i, sym))
            .count())
    }

    /// `μ_J(ℓ)`: columns of `cols` where symbol `sym` is missing.
    pub fn mu_cols(&self, cols: &[usize], sym: usize) -> Result<usize, ModelError> {
        self.check("col", cols, self.rect.s(), false)?;
        self.check("symbol", &[sym], self.rect.profile().k(), true)?;
        Ok(Self::dedup(cols, self.rect.s())
            .iter()
            .filter(|&&j| !self.rect.col_contains(j, sym))
            .count())
    }

    /// `μ_K(I) = Σ_{i∈I} μ_K(i)`.
    pub fn mu_row_sum(&self, syms: &[usize], rows: &[usize]) -> Result<usize, ModelError> {
        Self::dedup(rows, self.rect.r().max(rows.iter().copied().max().unwrap_or(0)))
            .iter()
            .map(|&i| self.mu_row(syms, i))
            .sum()
    }

    /// `μ_I(K) = Σ_{ℓ∈K} μ_I(ℓ)`.
    pub fn mu_rows_sum(&self, rows: &[usize], syms: &[usize]) -> Result<usize, ModelError> {
        Self::dedup(syms, self.rect.profile().k().max(syms.iter().copied().max().unwrap_or(0)))
            .iter()
            .map(|&sym| self.mu_rows(rows, sym))
            .sum()
    }

    /// `μ_K(J) = Σ_{j∈J} μ_K(j)`.
    pub fn mu_col_sum(&self, syms: &[usize], cols: &[usize]) -> Result<usize, ModelError> {
        Self::dedup(cols, self.rect.s().max(cols.iter().copied().max().unwrap_or(0)))
            .iter()
            .map(|&j| self.mu_col(syms, j))
            .sum()
    }

    /// `μ_J(K) = Σ_{ℓ∈K} μ_J(ℓ)`.
    pub fn mu_cols_sum(&self, cols: &[usize], syms: &[usize]) -> Result<usize, ModelError> {
        Self::dedup(syms, self.rect.profile().k().max(syms.iter().copied().max().unwrap_or(0)))
            .iter()
            .map(|&sym| self.mu_cols(cols, sym))
            .sum()
    }
}
