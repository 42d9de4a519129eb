//! Exhaustive evaluators for the published subset characterizations of
//! completability: the full-width (Hall-type) bound plus six column
//! conditions, the general twelve-condition criterion quantified over
//! fitting sequences, its P-set-free restatement, and the three
//! simplified corollaries. All evaluation is by direct subset
//! enumeration over bitmasks; these are desk-scale cross-checks for the
//! flow decision, not a polynomial decision path.
//!
//! The third column condition of the general criterion is printed with
//! its first sum over all symbols where the row analogue sums over the
//! deficiency set only. Both readings are evaluated: the corrected one
//! (sum over the deficiency set) feeds the verdicts, the printed one is
//! reported alongside so the discrepancy stays visible.

use thiserror::Error;

use crate::guards::Guards;
use crate::model::Rectangle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error("TooLarge: {detail}")]
    TooLarge { detail: String },
    #[error("PreconditionViolation: {detail}")]
    Precondition { detail: String },
}

/// A nonnegative pair sequence splitting each symbol's remaining budget
/// between the new columns (`a`) and the new rows (`b`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FittingSequence {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

/// The two sum targets and the per-symbol cap a fitting sequence must
/// meet. Negative values mean no sequence exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FittingFrame {
    pub a_total: i64,
    pub b_total: i64,
    pub caps: Vec<i64>,
}

/// Witness that one named condition fails: the subsets and both sides
/// of the inequality as evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremCert {
    pub condition: &'static str,
    pub rows: Option<Vec<usize>>,
    pub cols: Option<Vec<usize>>,
    pub symbols: Option<Vec<usize>>,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub certificate: Option<TheoremCert>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict {
            holds: true,
            certificate: None,
        }
    }

    fn fail(cert: TheoremCert) -> Self {
        Verdict {
            holds: false,
            certificate: Some(cert),
        }
    }
}

/// Bitmask evaluation context for one instance.
struct Ctx {
    n: i64,
    r: usize,
    s: usize,
    k: usize,
    deficit: Vec<i64>,
    /// Mask over rows missing each symbol.
    row_miss: Vec<u32>,
    /// Mask over columns missing each symbol.
    col_miss: Vec<u32>,
    /// Mask over symbols missing in each row.
    sym_miss_row: Vec<u32>,
    /// Mask over symbols missing in each column.
    sym_miss_col: Vec<u32>,
    p_r: u32,
    p_s: u32,
}

impl Ctx {
    fn new(rect: &Rectangle) -> Self {
        let (r, s, k) = (rect.r(), rect.s(), rect.profile().k());
        let n = rect.profile().n();
        assert!(r < 32 && s < 32 && k < 32, "bitmask context limit");
        let deficit: Vec<i64> = (1..=k).map(|sym| rect.deficit(sym) as i64).collect();
        let mut row_miss = vec![0u32; k];
        let mut col_miss = vec![0u32; k];
        let mut sym_miss_row = vec![0u32; r];
        let mut sym_miss_col = vec![0u32; s];
        for sym in 1..=k {
            for i in 0..r {
                if !rect.row_contains(i, sym) {
                    row_miss[sym - 1] |= 1 << i;
                    sym_miss_row[i] |= 1 << (sym - 1);
                }
            }
            for j in 0..s {
                if !rect.col_contains(j, sym) {
                    col_miss[sym - 1] |= 1 << j;
                    sym_miss_col[j] |= 1 << (sym - 1);
                }
            }
        }
        let sets = rect.p_sets();
        let mut p_r = 0u32;
        let mut p_s = 0u32;
        for &sym in &sets.p_r {
            p_r |= 1 << (sym - 1);
        }
        for &sym in &sets.p_s {
            p_s |= 1 << (sym - 1);
        }
        Ctx {
            n: n as i64,
            r,
            s,
            k,
            deficit,
            row_miss,
            col_miss,
            sym_miss_row,
            sym_miss_col,
            p_r,
            p_s,
        }
    }

    fn mu_rows(&self, i_mask: u32, sym_idx: usize) -> i64 {
        (self.row_miss[sym_idx] & i_mask).count_ones() as i64
    }

    fn mu_cols(&self, j_mask: u32, sym_idx: usize) -> i64 {
        (self.col_miss[sym_idx] & j_mask).count_ones() as i64
    }

    fn mu_row_syms(&self, k_mask: u32, i: usize) -> i64 {
        (self.sym_miss_row[i] & k_mask).count_ones() as i64
    }

    fn mu_col_syms(&self, k_mask: u32, j: usize) -> i64 {
        (self.sym_miss_col[j] & k_mask).count_ones() as i64
    }

    fn full(len: usize) -> u32 {
        (1u32 << len) - 1
    }
}

fn monus64(x: i64) -> i64 {
    x.max(0)
}

fn mask_to_rows(mask: u32, len: usize) -> Vec<usize> {
    (0..len).filter(|&i| mask & (1 << i) != 0).collect()
}

fn mask_to_syms(mask: u32, k: usize) -> Vec<usize> {
    (0..k).filter(|&i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

/// Sum targets and per-symbol caps for fitting sequences.
pub fn fitting_frame(rect: &Rectangle) -> FittingFrame {
    let n = rect.profile().n() as i64;
    let (r, s) = (rect.r() as i64, rect.s() as i64);
    let k = rect.profile().k();
    let sets = rect.p_sets();
    let deficit = |sym: usize| rect.deficit(sym) as i64;
    let a_total = r * (n - s) + sets.p_r.len() as i64 * (n - r)
        - sets.p_r.iter().map(|&sym| deficit(sym)).sum::<i64>();
    let b_total = s * (n - r) + sets.p_s.len() as i64 * (n - s)
        - sets.p_s.iter().map(|&sym| deficit(sym)).sum::<i64>();
    let (p_min, p_max) = if rect.r() <= rect.s() {
        (&sets.p_r, &sets.p_s)
    } else {
        (&sets.p_s, &sets.p_r)
    };
    let max_rs = r.max(s);
    let caps = (1..=k)
        .map(|sym| {
            if p_min.contains(&sym) {
                2 * n - r - s - deficit(sym)
            } else if p_max.contains(&sym) {
                n - max_rs
            } else {
                deficit(sym)
            }
        })
        .collect();
    FittingFrame {
        a_total,
        b_total,
        caps,
    }
}

/// Lexicographically smallest composition of `total` under `caps`, or
/// `None` if infeasible.
fn first_composition(total: i64, caps: &[i64]) -> Option<Vec<usize>> {
    if total < 0 || caps.iter().any(|&c| c < 0) {
        return None;
    }
    let suffix_cap: Vec<i64> = {
        let mut acc = vec![0i64; caps.len() + 1];
        for i in (0..caps.len()).rev() {
            acc[i] = acc[i + 1] + caps[i];
        }
        acc
    };
    if total > suffix_cap[0] {
        return None;
    }
    let mut out = Vec::with_capacity(caps.len());
    let mut rem = total;
    for i in 0..caps.len() {
        let v = (rem - suffix_cap[i + 1]).max(0);
        out.push(v as usize);
        rem -= v;
    }
    debug_assert_eq!(rem, 0);
    Some(out)
}

/// Next composition after `x` in lexicographic order, under `caps`.
fn next_composition(x: &[usize], caps: &[i64]) -> Option<Vec<usize>> {
    let len = x.len();
    if len == 0 {
        return None;
    }
    let suffix_cap: Vec<i64> = {
        let mut acc = vec![0i64; len + 1];
        for i in (0..len).rev() {
            acc[i] = acc[i + 1] + caps[i];
        }
        acc
    };
    let mut suffix_sum: i64 = 0;
    for i in (0..len - 1).rev() {
        suffix_sum += x[i + 1] as i64;
        if suffix_sum >= 1 && (x[i] as i64) < caps[i] {
            let mut out = x[..=i].to_vec();
            out[i] += 1;
            let mut rem = suffix_sum - 1;
            for j in i + 1..len {
                let v = (rem - suffix_cap[j + 1]).max(0);
                out.push(v as usize);
                rem -= v;
            }
            debug_assert_eq!(rem, 0);
            return Some(out);
        }
    }
    None
}

/// Lazy stream of all fitting sequences in lexicographic order. Yields
/// `Err(TooLarge)` once and stops if the enumeration budget runs out.
pub struct FittingIter {
    caps: Vec<i64>,
    b_total: i64,
    a: Option<Vec<usize>>,
    b: Option<Vec<usize>>,
    budget: usize,
    exhausted: bool,
}

impl FittingIter {
    fn b_caps(caps: &[i64], a: &[usize]) -> Vec<i64> {
        caps.iter().zip(a).map(|(&c, &ai)| c - ai as i64).collect()
    }
}

impl Iterator for FittingIter {
    type Item = Result<FittingSequence, ConditionError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.exhausted {
            return None;
        }
        let a = self.a.clone()?;
        let b = self.b.clone()?;
        if self.budget == 0 {
            self.exhausted = true;
            return Some(Err(ConditionError::TooLarge {
                detail: "fitting sequence budget exhausted".into(),
            }));
        }
        self.budget -= 1;
        let item = FittingSequence {
            a: a.clone(),
            b: b.clone(),
        };
        // Advance: b first, then a.
        let b_caps = Self::b_caps(&self.caps, &a);
        if let Some(nb) = next_composition(&b, &b_caps) {
            self.b = Some(nb);
        } else {
            let mut next_a = next_composition(&a, &self.caps);
            loop {
                match next_a {
                    None => {
                        self.a = None;
                        self.b = None;
                        break;
                    }
                    Some(ca) => {
                        let caps_b = Self::b_caps(&self.caps, &ca);
                        if let Some(fb) = first_composition(self.b_total, &caps_b) {
                            self.a = Some(ca);
                            self.b = Some(fb);
                            break;
                        }
                        next_a = next_composition(&ca, &self.caps);
                    }
                }
            }
        }
        Some(Ok(item))
    }
}

/// All fitting sequences of the instance, lazily, within the guard's
/// enumeration budget.
pub fn enumerate_fitting(rect: &Rectangle, guards: &Guards) -> FittingIter {
    let frame = fitting_frame(rect);
    let mut iter = FittingIter {
        caps: frame.caps.clone(),
        b_total: frame.b_total,
        a: None,
        b: None,
        budget: guards.fitting_budget,
        exhausted: false,
    };
    // Seed with the first (a, b) pair that fits, skipping a-vectors
    // whose residual caps cannot absorb the b target.
    let mut a = first_composition(frame.a_total, &frame.caps);
    while let Some(ca) = a {
        let caps_b = FittingIter::b_caps(&frame.caps, &ca);
        if let Some(fb) = first_composition(frame.b_total, &caps_b) {
            iter.a = Some(ca);
            iter.b = Some(fb);
            break;
        }
        a = next_composition(&ca, &frame.caps);
    }
    iter
}

/// Checks a sequence against the frame; used by tests and the CLI.
pub fn is_fitting(rect: &Rectangle, fit: &FittingSequence) -> bool {
    let frame = fitting_frame(rect);
    let k = rect.profile().k();
    fit.a.len() == k
        && fit.b.len() == k
        && fit.a.iter().sum::<usize>() as i64 == frame.a_total
        && fit.b.iter().sum::<usize>() as i64 == frame.b_total
        && (0..k).all(|i| (fit.a[i] + fit.b[i]) as i64 <= frame.caps[i])
}

fn guard_single(rect: &Rectangle, guards: &Guards) -> Result<(), ConditionError> {
    let (r, s, k) = (rect.r(), rect.s(), rect.profile().k());
    if r > guards.single_side || s > guards.single_side || k > guards.single_symbols {
        return Err(ConditionError::TooLarge {
            detail: format!(
                "instance r={r}, s={s}, k={k} exceeds single-subset guard ({}, {})",
                guards.single_side, guards.single_symbols
            ),
        });
    }
    Ok(())
}

fn guard_pair(rect: &Rectangle, guards: &Guards) -> Result<(), ConditionError> {
    let (r, s, k) = (rect.r(), rect.s(), rect.profile().k());
    if r > guards.pair_side || s > guards.pair_side || k > guards.pair_symbols {
        return Err(ConditionError::TooLarge {
            detail: format!(
                "instance r={r}, s={s}, k={k} exceeds pairwise guard ({}, {})",
                guards.pair_side, guards.pair_symbols
            ),
        });
    }
    Ok(())
}

/// Report of the full-width criterion: the per-symbol bound plus six
/// equivalent subset conditions over columns and symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallReport {
    pub bound: Verdict,
    pub conditions: [Verdict; 6],
}

impl HallReport {
    pub fn conditions_agree(&self) -> bool {
        let first = self.conditions[0].holds;
        self.conditions.iter().all(|v| v.holds == first)
    }

    /// The criterion's verdict: bound plus any one condition.
    pub fn verdict(&self) -> bool {
        self.bound.holds && self.conditions[0].holds
    }
}

/// Evaluates the full-width criterion on an `r×n` instance.
pub fn hall_conditions(rect: &Rectangle, guards: &Guards) -> Result<HallReport, ConditionError> {
    let n = rect.profile().n();
    if rect.s() != n {
        return Err(ConditionError::Precondition {
            detail: format!("full-width criterion needs s = n, got s = {}", rect.s()),
        });
    }
    guard_pair(rect, guards)?;
    let ctx = Ctx::new(rect);
    let k = ctx.k;
    let s = ctx.s;
    let nr = ctx.n - ctx.r as i64;

    let mut bound = Verdict::pass();
    for sym in 1..=k {
        let lhs = ctx.deficit[sym - 1];
        if lhs > nr {
            bound = Verdict::fail(TheoremCert {
                condition: "hall-bound",
                rows: None,
                cols: None,
                symbols: Some(vec![sym]),
                lhs,
                rhs: nr,
            });
            break;
        }
    }

    let full_k = Ctx::full(k);
    let full_j = Ctx::full(s);

    // Condition 1: |J|(n−r) ≤ Σ_ℓ min{deficit, μ_J(ℓ)}.
    let c1 = (0..=full_j)
        .find_map(|j_mask| {
            let lhs = j_mask.count_ones() as i64 * nr;
            let rhs: i64 = (0..k)
                .map(|idx| ctx.deficit[idx].min(ctx.mu_cols(j_mask, idx)))
                .sum();
            (lhs > rhs).then(|| TheoremCert {
                condition: "hall-1",
                rows: None,
                cols: Some(mask_to_rows(j_mask, s)),
                symbols: None,
                lhs,
                rhs,
            })
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    // Condition 2: Σ_K deficit ≤ Σ_j min{n−r, μ_K(j)}.
    let c2 = (0..=full_k)
        .find_map(|k_mask| {
            let lhs: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| ctx.deficit[idx])
                .sum();
            let rhs: i64 = (0..s).map(|j| nr.min(ctx.mu_col_syms(k_mask, j))).sum();
            (lhs > rhs).then(|| TheoremCert {
                condition: "hall-2",
                rows: None,
                cols: None,
                symbols: Some(mask_to_syms(k_mask, k)),
                lhs,
                rhs,
            })
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    // Condition 3: |J|(n−r) ≥ Σ_ℓ (deficit ∸ μ_J̄(ℓ)).
    let c3 = (0..=full_j)
        .find_map(|j_mask| {
            let lhs = j_mask.count_ones() as i64 * nr;
            let co = !j_mask & full_j;
            let rhs: i64 = (0..k)
                .map(|idx| monus64(ctx.deficit[idx] - ctx.mu_cols(co, idx)))
                .sum();
            (lhs < rhs).then(|| TheoremCert {
                condition: "hall-3",
                rows: None,
                cols: Some(mask_to_rows(j_mask, s)),
                symbols: None,
                lhs,
                rhs,
            })
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    // Condition 4: Σ_K deficit ≥ Σ_j (n−r ∸ μ_K̄(j)).
    let c4 = (0..=full_k)
        .find_map(|k_mask| {
            let lhs: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| ctx.deficit[idx])
                .sum();
            let co = !k_mask & full_k;
            let rhs: i64 = (0..s)
                .map(|j| monus64(nr - ctx.mu_col_syms(co, j)))
                .sum();
            (lhs < rhs).then(|| TheoremCert {
                condition: "hall-4",
                rows: None,
                cols: None,
                symbols: Some(mask_to_syms(k_mask, k)),
                lhs,
                rhs,
            })
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    // Condition 5: |J|(n−r) ≤ Σ_K deficit + μ_J(K̄).
    let mut c5 = Verdict::pass();
    'c5: for j_mask in 0..=full_j {
        let base = j_mask.count_ones() as i64 * nr;
        for k_mask in 0..=full_k {
            let def: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| ctx.deficit[idx])
                .sum();
            let co = !k_mask & full_k;
            let mu: i64 = (0..s)
                .filter(|&j| j_mask & (1 << j) != 0)
                .map(|j| ctx.mu_col_syms(co, j))
                .sum();
            if base > def + mu {
                c5 = Verdict::fail(TheoremCert {
                    condition: "hall-5",
                    rows: None,
                    cols: Some(mask_to_rows(j_mask, s)),
                    symbols: Some(mask_to_syms(k_mask, k)),
                    lhs: base,
                    rhs: def + mu,
                });
                break 'c5;
            }
        }
    }

    // Condition 6: Σ_K deficit ≤ |J|(n−r) + μ_K(J̄).
    let mut c6 = Verdict::pass();
    'c6: for j_mask in 0..=full_j {
        let base = j_mask.count_ones() as i64 * nr;
        let co_j = !j_mask & full_j;
        for k_mask in 0..=full_k {
            let def: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| ctx.deficit[idx])
                .sum();
            let mu: i64 = (0..s)
                .filter(|&j| co_j & (1 << j) != 0)
                .map(|j| ctx.mu_col_syms(k_mask, j))
                .sum();
            if def > base + mu {
                c6 = Verdict::fail(TheoremCert {
                    condition: "hall-6",
                    rows: None,
                    cols: Some(mask_to_rows(j_mask, s)),
                    symbols: Some(mask_to_syms(k_mask, k)),
                    lhs: def,
                    rhs: base + mu,
                });
                break 'c6;
            }
        }
    }

    Ok(HallReport {
        bound,
        conditions: [c1, c2, c3, c4, c5, c6],
    })
}

/// The twelve verdicts of the general criterion for one fitting
/// sequence, plus the as-printed reading of the third column condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RyserReport {
    pub rows: [Verdict; 6],
    pub cols: [Verdict; 6],
    pub col3_as_printed: Verdict,
}

impl RyserReport {
    pub fn rows_agree(&self) -> bool {
        let first = self.rows[0].holds;
        self.rows.iter().all(|v| v.holds == first)
    }

    pub fn cols_agree(&self) -> bool {
        let first = self.cols[0].holds;
        self.cols.iter().all(|v| v.holds == first)
    }
}

/// Row-group evaluation. `row_side = true` evaluates the row conditions
/// with (a, P_r, μ over rows); `false` the column conditions with
/// (b, P_s, μ over columns).
fn group_conditions(
    ctx: &Ctx,
    fit_vals: &[usize],
    row_side: bool,
) -> ([Verdict; 6], Verdict) {
    let k = ctx.k;
    let full_k = Ctx::full(k);
    let (side_len, p_mask, own_dim, other_dim) = if row_side {
        (ctx.r, ctx.p_r, ctx.r as i64, ctx.s as i64)
    } else {
        (ctx.s, ctx.p_s, ctx.s as i64, ctx.r as i64)
    };
    let full_i = Ctx::full(side_len);
    let n = ctx.n;
    // Per-new-cell weight: n − s for rows, n − r for columns.
    let weight = n - other_dim;
    let fit: Vec<i64> = fit_vals.iter().map(|&v| v as i64).collect();
    let names: [&'static str; 6] = if row_side {
        ["row-1", "row-2", "row-3", "row-4", "row-5", "row-6"]
    } else {
        ["col-1", "col-2", "col-3", "col-4", "col-5", "col-6"]
    };
    let mu_side = |mask: u32, idx: usize| -> i64 {
        if row_side {
            ctx.mu_rows(mask, idx)
        } else {
            ctx.mu_cols(mask, idx)
        }
    };
    let mu_unit = |k_mask: u32, u: usize| -> i64 {
        if row_side {
            ctx.mu_row_syms(k_mask, u)
        } else {
            ctx.mu_col_syms(k_mask, u)
        }
    };
    let in_p = |idx: usize| p_mask & (1 << idx) != 0;
    let cert = |condition: &'static str, unit: Option<u32>, syms: Option<u32>, lhs, rhs| {
        let set = unit.map(|m| mask_to_rows(m, side_len));
        TheoremCert {
            condition,
            rows: if row_side { set.clone() } else { None },
            cols: if row_side { None } else { set },
            symbols: syms.map(|m| mask_to_syms(m, k)),
            lhs,
            rhs,
        }
    };

    // Condition 1: |I|·w ≤ Σ_{P} min{fit+def−(n−own), μ_I} + Σ_{P̄} min{fit, μ_I}.
    let c1 = (0..=full_i)
        .find_map(|i_mask| {
            let lhs = i_mask.count_ones() as i64 * weight;
            let rhs: i64 = (0..k)
                .map(|idx| {
                    let cap = if in_p(idx) {
                        fit[idx] + ctx.deficit[idx] - (n - own_dim)
                    } else {
                        fit[idx]
                    };
                    cap.min(mu_side(i_mask, idx))
                })
                .sum();
            (lhs > rhs).then(|| cert(names[0], Some(i_mask), None, lhs, rhs))
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    // Condition 2: Σ_{K∩P} def ≤ Σ_u min{w, μ_K(u)} − Σ_K fit + |K∩P|(n−own).
    let c2 = (0..=full_k)
        .find_map(|k_mask| {
            let lhs: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0 && in_p(idx))
                .map(|idx| ctx.deficit[idx])
                .sum();
            let p_count = (k_mask & p_mask).count_ones() as i64;
            let fits: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| fit[idx])
                .sum();
            let mins: i64 = (0..side_len as usize)
                .map(|u| weight.min(mu_unit(k_mask, u)))
                .sum();
            let rhs = mins - fits + p_count * (n - own_dim);
            (lhs > rhs).then(|| cert(names[1], None, Some(k_mask), lhs, rhs))
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    // Condition 3, corrected: |I|·w ≥ Σ_{P} ((fit+ρ+μ_I) ∸ n) + Σ_{P̄} (fit ∸ μ_Ī).
    let eval_c3 = |printed: bool| -> Verdict {
        (0..=full_i)
            .find_map(|i_mask| {
                let lhs = i_mask.count_ones() as i64 * weight;
                let co = !i_mask & full_i;
                let rhs: i64 = (0..k)
                    .map(|idx| {
                        let first_term_applies = printed || in_p(idx);
                        let mut total = 0;
                        if first_term_applies {
                            // fit + ρ + μ_I ∸ n, with ρ = e + deficit and
                            // μ_I + μ_Ī = own − e, expressed directly:
                            let rho = ctx.deficit[idx]
                                + (own_dim - ctx.row_or_col_misses(row_side, idx));
                            total += monus64(fit[idx] + rho + mu_side(i_mask, idx) - n);
                        }
                        if !in_p(idx) {
                            total += monus64(fit[idx] - mu_side(co, idx));
                        }
                        total
                    })
                    .sum();
                (lhs < rhs).then(|| {
                    let name = if printed {
                        if row_side {
                            "row-3-printed"
                        } else {
                            "col-3-printed"
                        }
                    } else {
                        names[2]
                    };
                    cert(name, Some(i_mask), None, lhs, rhs)
                })
            })
            .map_or_else(Verdict::pass, Verdict::fail)
    };
    let c3 = eval_c3(false);
    let c3_printed = eval_c3(true);

    // Condition 4: Σ_{K∩P} def ≥ Σ_u (w ∸ μ_K̄(u)) + |K∩P|(n−own) − Σ_K fit.
    let c4 = (0..=full_k)
        .find_map(|k_mask| {
            let lhs: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0 && in_p(idx))
                .map(|idx| ctx.deficit[idx])
                .sum();
            let co = !k_mask & full_k;
            let p_count = (k_mask & p_mask).count_ones() as i64;
            let fits: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| fit[idx])
                .sum();
            let sums: i64 = (0..side_len as usize)
                .map(|u| monus64(weight - mu_unit(co, u)))
                .sum();
            let rhs = sums + p_count * (n - own_dim) - fits;
            (lhs < rhs).then(|| cert(names[3], None, Some(k_mask), lhs, rhs))
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    // Condition 5: |I|·w ≤ Σ_{K∩P} def + Σ_K fit + μ_I(K̄) − |K∩P|(n−own).
    let mut c5 = Verdict::pass();
    'c5: for i_mask in 0..=full_i {
        let base = i_mask.count_ones() as i64 * weight;
        for k_mask in 0..=full_k {
            let def: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0 && in_p(idx))
                .map(|idx| ctx.deficit[idx])
                .sum();
            let fits: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| fit[idx])
                .sum();
            let p_count = (k_mask & p_mask).count_ones() as i64;
            let co = !k_mask & full_k;
            let mu: i64 = (0..side_len as usize)
                .filter(|&u| i_mask & (1 << u) != 0)
                .map(|u| mu_unit(co, u))
                .sum();
            let rhs = def + fits + mu - p_count * (n - own_dim);
            if base > rhs {
                c5 = Verdict::fail(cert(names[4], Some(i_mask), Some(k_mask), base, rhs));
                break 'c5;
            }
        }
    }

    // Condition 6: Σ_{K∩P} def ≤ |I|·w + |K∩P|(n−own) + μ_K(Ī) − Σ_K fit.
    let mut c6 = Verdict::pass();
    'c6: for i_mask in 0..=full_i {
        let base = i_mask.count_ones() as i64 * weight;
        let co_i = !i_mask & full_i;
        for k_mask in 0..=full_k {
            let def: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0 && in_p(idx))
                .map(|idx| ctx.deficit[idx])
                .sum();
            let fits: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| fit[idx])
                .sum();
            let p_count = (k_mask & p_mask).count_ones() as i64;
            let mu: i64 = (0..side_len as usize)
                .filter(|&u| co_i & (1 << u) != 0)
                .map(|u| mu_unit(k_mask, u))
                .sum();
            let rhs = base + p_count * (n - own_dim) + mu - fits;
            if def > rhs {
                c6 = Verdict::fail(cert(names[5], Some(i_mask), Some(k_mask), def, rhs));
                break 'c6;
            }
        }
    }

    ([c1, c2, c3, c4, c5, c6], c3_printed)
}

impl Ctx {
    /// `r − e_ℓ` for the row side, `s − e_ℓ` for the column side.
    fn row_or_col_misses(&self, row_side: bool, idx: usize) -> i64 {
        if row_side {
            self.row_miss[idx].count_ones() as i64
        } else {
            self.col_miss[idx].count_ones() as i64
        }
    }
}

/// Evaluates all twelve conditions of the general criterion for one
/// fitting sequence.
pub fn ryser_conditions(
    rect: &Rectangle,
    fit: &FittingSequence,
    guards: &Guards,
) -> Result<RyserReport, ConditionError> {
    guard_pair(rect, guards)?;
    let ctx = Ctx::new(rect);
    let (rows, _) = group_conditions(&ctx, &fit.a, true);
    let (cols, col3_as_printed) = group_conditions(&ctx, &fit.b, false);
    Ok(RyserReport {
        rows,
        cols,
        col3_as_printed,
    })
}

/// The P-set-free restatement: six row conditions with the combined
/// weight `ã_ℓ = a_ℓ + (deficit + r ∸ n)`, and the mirrored column set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemarkReport {
    pub rows: [Verdict; 6],
    pub cols: [Verdict; 6],
}

pub fn remark_conditions(
    rect: &Rectangle,
    fit: &FittingSequence,
    guards: &Guards,
) -> Result<RemarkReport, ConditionError> {
    guard_pair(rect, guards)?;
    let ctx = Ctx::new(rect);
    let rows = remark_group(&ctx, &fit.a, true);
    let cols = remark_group(&ctx, &fit.b, false);
    Ok(RemarkReport { rows, cols })
}

fn remark_group(ctx: &Ctx, fit_vals: &[usize], row_side: bool) -> [Verdict; 6] {
    let k = ctx.k;
    let full_k = Ctx::full(k);
    let (side_len, own_dim, other_dim) = if row_side {
        (ctx.r, ctx.r as i64, ctx.s as i64)
    } else {
        (ctx.s, ctx.s as i64, ctx.r as i64)
    };
    let full_i = Ctx::full(side_len);
    let n = ctx.n;
    let weight = n - other_dim;
    // Combined per-symbol weight: fit + (deficit + own − n ∸ 0).
    let tilde: Vec<i64> = (0..k)
        .map(|idx| fit_vals[idx] as i64 + monus64(ctx.deficit[idx] + own_dim - n))
        .collect();
    let names: [&'static str; 6] = if row_side {
        [
            "remark-row-1",
            "remark-row-2",
            "remark-row-3",
            "remark-row-4",
            "remark-row-5",
            "remark-row-6",
        ]
    } else {
        [
            "remark-col-1",
            "remark-col-2",
            "remark-col-3",
            "remark-col-4",
            "remark-col-5",
            "remark-col-6",
        ]
    };
    let mu_side = |mask: u32, idx: usize| -> i64 {
        if row_side {
            ctx.mu_rows(mask, idx)
        } else {
            ctx.mu_cols(mask, idx)
        }
    };
    let mu_unit = |k_mask: u32, u: usize| -> i64 {
        if row_side {
            ctx.mu_row_syms(k_mask, u)
        } else {
            ctx.mu_col_syms(k_mask, u)
        }
    };
    let cert = |condition: &'static str, unit: Option<u32>, syms: Option<u32>, lhs, rhs| {
        let set = unit.map(|m| mask_to_rows(m, side_len));
        TheoremCert {
            condition,
            rows: if row_side { set.clone() } else { None },
            cols: if row_side { None } else { set },
            symbols: syms.map(|m| mask_to_syms(m, k)),
            lhs,
            rhs,
        }
    };

    let c1 = (0..=full_i)
        .find_map(|i_mask| {
            let lhs = i_mask.count_ones() as i64 * weight;
            let rhs: i64 = (0..k)
                .map(|idx| tilde[idx].min(mu_side(i_mask, idx)))
                .sum();
            (lhs > rhs).then(|| cert(names[0], Some(i_mask), None, lhs, rhs))
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    let c2 = (0..=full_k)
        .find_map(|k_mask| {
            let rhs: i64 = (0..side_len as usize)
                .map(|u| weight.min(mu_unit(k_mask, u)))
                .sum();
            let lhs: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| tilde[idx])
                .sum();
            (lhs > rhs).then(|| cert(names[1], None, Some(k_mask), lhs, rhs))
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    let c3 = (0..=full_i)
        .find_map(|i_mask| {
            let lhs = i_mask.count_ones() as i64 * weight;
            let co = !i_mask & full_i;
            let rhs: i64 = (0..k)
                .map(|idx| monus64(tilde[idx] - mu_side(co, idx)))
                .sum();
            (lhs < rhs).then(|| cert(names[2], Some(i_mask), None, lhs, rhs))
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    let c4 = (0..=full_k)
        .find_map(|k_mask| {
            let co = !k_mask & full_k;
            let lhs: i64 = (0..side_len as usize)
                .map(|u| monus64(weight - mu_unit(co, u)))
                .sum();
            let rhs: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| tilde[idx])
                .sum();
            (lhs > rhs).then(|| cert(names[3], None, Some(k_mask), lhs, rhs))
        })
        .map_or_else(Verdict::pass, Verdict::fail);

    let mut c5 = Verdict::pass();
    'c5: for i_mask in 0..=full_i {
        let base = i_mask.count_ones() as i64 * weight;
        for k_mask in 0..=full_k {
            let tl: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| tilde[idx])
                .sum();
            let co = !k_mask & full_k;
            let mu: i64 = (0..side_len as usize)
                .filter(|&u| i_mask & (1 << u) != 0)
                .map(|u| mu_unit(co, u))
                .sum();
            if base > tl + mu {
                c5 = Verdict::fail(cert(names[4], Some(i_mask), Some(k_mask), base, tl + mu));
                break 'c5;
            }
        }
    }

    let mut c6 = Verdict::pass();
    'c6: for i_mask in 0..=full_i {
        let base = i_mask.count_ones() as i64 * weight;
        let co_i = !i_mask & full_i;
        for k_mask in 0..=full_k {
            let tl: i64 = (0..k)
                .filter(|&idx| k_mask & (1 << idx) != 0)
                .map(|idx| tilde[idx])
                .sum();
            let mu: i64 = (0..side_len as usize)
                .filter(|&u| co_i & (1 << u) != 0)
                .map(|u| mu_unit(k_mask, u))
                .sum();
            if base < tl - mu {
                c6 = Verdict::fail(cert(names[5], Some(i_mask), Some(k_mask), base, tl - mu));
                break 'c6;
            }
        }
    }

    [c1, c2, c3, c4, c5, c6]
}

/// Outcome of scanning all fitting sequences for the general criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RyserTheoremReport {
    /// Some sequence satisfies one row and one column condition.
    pub completable: bool,
    /// Sequences scanned (cheap single-condition pass).
    pub sequences_tested: usize,
    /// Sequences given the full twelve-condition audit.
    pub audited: usize,
    /// Within every audited sequence, the six row verdicts agreed.
    pub row_groups_agree: bool,
    pub col_groups_agree: bool,
    /// Audited sequences where the printed third column condition
    /// disagrees with the corrected reading.
    pub col3_printed_disagreements: usize,
    /// Verdict the printed reading would give for the whole criterion.
    pub completable_printed_reading: bool,
    pub witness: Option<FittingSequence>,
}

/// How many sequences get the expensive twelve-condition audit.
const AUDIT_CAP: usize = 64;

/// Scans fitting sequences and decides the general criterion: the
/// instance is completable iff some sequence passes a row condition and
/// a column condition. Single conditions are used for the scan; the
/// first [`AUDIT_CAP`] sequences (and any witness) also get the full
/// agreement audit.
pub fn ryser_theorem_check(
    rect: &Rectangle,
    guards: &Guards,
) -> Result<RyserTheoremReport, ConditionError> {
    guard_pair(rect, guards)?;
    let ctx = Ctx::new(rect);
    let mut report = RyserTheoremReport {
        completable: false,
        sequences_tested: 0,
        audited: 0,
        row_groups_agree: true,
        col_groups_agree: true,
        col3_printed_disagreements: 0,
        completable_printed_reading: false,
        witness: None,
    };
    for item in enumerate_fitting(rect, guards) {
        let fit = item?;
        report.sequences_tested += 1;
        let (rows, _row3_printed) = group_conditions(&ctx, &fit.a, true);
        let (cols, col3_printed) = group_conditions(&ctx, &fit.b, false);
        let pass = rows[2].holds && cols[2].holds;
        let audit = report.audited < AUDIT_CAP || pass;
        if audit {
            report.audited += 1;
            let first_row = rows[0].holds;
            if rows.iter().any(|v| v.holds != first_row) {
                report.row_groups_agree = false;
            }
            let first_col = cols[0].holds;
            if cols.iter().any(|v| v.holds != first_col) {
                report.col_groups_agree = false;
            }
            if col3_printed.holds != cols[2].holds {
                report.col3_printed_disagreements += 1;
            }
        }
        if rows[2].holds && col3_printed.holds {
            report.completable_printed_reading = true;
        }
        if pass {
            report.completable = true;
            report.witness = Some(fit);
            break;
        }
    }
    Ok(report)
}

/// The three simplified criteria, named by what their hypotheses buy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorollaryKind {
    /// Deficits at most `n − max{r,s}`: no per-symbol lower bounds, two
    /// conditions over row/column pairs. Forces a large symbol count.
    ManySymbols,
    /// Occurrences at least `r + s − ρ_ℓ`: caps never bind, two row-type
    /// and two column-type conditions. Forces a small symbol count.
    FewSymbols,
    /// Both slack regimes at once: always completable.
    Unconditional,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorollaryReport {
    pub kind: CorollaryKind,
    pub hypothesis_holds: bool,
    pub hypothesis_violators: Vec<usize>,
    /// Named condition verdicts; empty for the unconditional criterion.
    pub conditions: Vec<(&'static str, Verdict)>,
}

impl CorollaryReport {
    /// The criterion's overall verdict given its hypothesis: any single
    /// condition for `ManySymbols`, one of each group for `FewSymbols`,
    /// unconditionally true otherwise. `None` if the hypothesis fails.
    pub fn verdict(&self) -> Option<bool> {
        if !self.hypothesis_holds {
            return None;
        }
        match self.kind {
            CorollaryKind::Unconditional => Some(true),
            CorollaryKind::ManySymbols => Some(self.conditions[0].1.holds),
            CorollaryKind::FewSymbols => {
                let row = self.conditions[0].1.holds || self.conditions[1].1.holds;
                let col = self.conditions[2].1.holds || self.conditions[3].1.holds;
                Some(row && col)
            }
        }
    }
}

pub fn corollary_checks(
    rect: &Rectangle,
    kind: CorollaryKind,
    guards: &Guards,
) -> Result<CorollaryReport, ConditionError> {
    match kind {
        CorollaryKind::ManySymbols => guard_pair(rect, guards)?,
        CorollaryKind::FewSymbols | CorollaryKind::Unconditional => guard_single(rect, guards)?,
    }
    let ctx = Ctx::new(rect);
    let n = ctx.n;
    let (r64, s64) = (ctx.r as i64, ctx.s as i64);
    let max_rs = r64.max(s64);
    let k = ctx.k;

    let e_of = |idx: usize| r64 - ctx.row_miss[idx].count_ones() as i64;
    let hypothesis_ok = |idx: usize| -> bool {
        let rho = e_of(idx) + ctx.deficit[idx];
        match kind {
            CorollaryKind::ManySymbols => ctx.deficit[idx] <= n - max_rs,
            CorollaryKind::FewSymbols => e_of(idx) >= r64 + s64 - rho,
            CorollaryKind::Unconditional => {
                e_of(idx) >= r64 + s64 - rho && ctx.deficit[idx] <= n - max_rs
            }
        }
    };
    let violators: Vec<usize> = (0..k).filter(|&idx| !hypothesis_ok(idx)).map(|i| i + 1).collect();
    let hypothesis_holds = violators.is_empty();

    let mut conditions: Vec<(&'static str, Verdict)> = Vec::new();
    match kind {
        CorollaryKind::Unconditional => {}
        CorollaryKind::ManySymbols => {
            let full_i = Ctx::full(ctx.r);
            let full_j = Ctx::full(ctx.s);
            let full_k = Ctx::full(k);
            // Condition A: |I|(n−s) + |J|(n−r) ≤ Σ_ℓ min{def, μ_I + μ_J}.
            let mut a = Verdict::pass();
            'a: for i_mask in 0..=full_i {
                for j_mask in 0..=full_j {
                    let lhs = i_mask.count_ones() as i64 * (n - s64)
                        + j_mask.count_ones() as i64 * (n - r64);
                    let rhs: i64 = (0..k)
                        .map(|idx| {
                            ctx.deficit[idx]
                                .min(ctx.mu_rows(i_mask, idx) + ctx.mu_cols(j_mask, idx))
                        })
                        .sum();
                    if lhs > rhs {
                        a = Verdict::fail(TheoremCert {
                            condition: "pair-min",
                            rows: Some(mask_to_rows(i_mask, ctx.r)),
                            cols: Some(mask_to_rows(j_mask, ctx.s)),
                            symbols: None,
                            lhs,
                            rhs,
                        });
                        break 'a;
                    }
                }
            }
            // Condition B: Σ_K def ≥ Σ_{i∈I}(n−s ∸ μ_K̄(i)) + Σ_{j∈J}(n−r ∸ μ_K̄(j)).
            let mut b = Verdict::pass();
            'b: for k_mask in 0..=full_k {
                let def: i64 = (0..k)
                    .filter(|&idx| k_mask & (1 << idx) != 0)
                    .map(|idx| ctx.deficit[idx])
                    .sum();
                let co = !k_mask & full_k;
                for i_mask in 0..=full_i {
                    let row_part: i64 = (0..ctx.r)
                        .filter(|&i| i_mask & (1 << i) != 0)
                        .map(|i| monus64(n - s64 - ctx.mu_row_syms(co, i)))
                        .sum();
                    if row_part > def {
                        // The column part is nonnegative; J = ∅ already violates.
                        b = Verdict::fail(TheoremCert {
                            condition: "triple-monus",
                            rows: Some(mask_to_rows(i_mask, ctx.r)),
                            cols: Some(vec![]),
                            symbols: Some(mask_to_syms(k_mask, k)),
                            lhs: def,
                            rhs: row_part,
                        });
                        break 'b;
                    }
                    for j_mask in 1..=full_j.max(0) {
                        let col_part: i64 = (0..ctx.s)
                            .filter(|&j| j_mask & (1 << j) != 0)
                            .map(|j| monus64(n - r64 - ctx.mu_col_syms(co, j)))
                            .sum();
                        if row_part + col_part > def {
                            b = Verdict::fail(TheoremCert {
                                condition: "triple-monus",
                                rows: Some(mask_to_rows(i_mask, ctx.r)),
                                cols: Some(mask_to_rows(j_mask, ctx.s)),
                                symbols: Some(mask_to_syms(k_mask, k)),
                                lhs: def,
                                rhs: row_part + col_part,
                            });
                            break 'b;
                        }
                    }
                }
            }
            conditions.push(("pair-min", a));
            conditions.push(("triple-monus", b));
        }
        CorollaryKind::FewSymbols => {
            let full_i = Ctx::full(ctx.r);
            let full_j = Ctx::full(ctx.s);
            let full_k = Ctx::full(k);
            let lower_row: Vec<i64> = (0..k)
                .map(|idx| monus64(ctx.deficit[idx] + r64 - n))
                .collect();
            let lower_col: Vec<i64> = (0..k)
                .map(|idx| monus64(ctx.deficit[idx] + s64 - n))
                .collect();
            // Row group, min form: Σ_K lower ≤ Σ_i min{n−s, μ_K(i)}.
            let r1 = (0..=full_k)
                .find_map(|k_mask| {
                    let lhs: i64 = (0..k)
                        .filter(|&idx| k_mask & (1 << idx) != 0)
                        .map(|idx| lower_row[idx])
                        .sum();
                    let rhs: i64 = (0..ctx.r)
                        .map(|i| (n - s64).min(ctx.mu_row_syms(k_mask, i)))
                        .sum();
                    (lhs > rhs).then(|| TheoremCert {
                        condition: "row-lower-min",
                        rows: None,
                        cols: None,
                        symbols: Some(mask_to_syms(k_mask, k)),
                        lhs,
                        rhs,
                    })
                })
                .map_or_else(Verdict::pass, Verdict::fail);
            // Row group, monus form: |I|(n−s) ≥ Σ_ℓ (lower ∸ μ_Ī(ℓ)).
            let r2 = (0..=full_i)
                .find_map(|i_mask| {
                    let lhs = i_mask.count_ones() as i64 * (n - s64);
                    let co = !i_mask & full_i;
                    let rhs: i64 = (0..k)
                        .map(|idx| monus64(lower_row[idx] - ctx.mu_rows(co, idx)))
                        .sum();
                    (lhs < rhs).then(|| TheoremCert {
                        condition: "row-lower-monus",
                        rows: Some(mask_to_rows(i_mask, ctx.r)),
                        cols: None,
                        symbols: None,
                        lhs,
                        rhs,
                    })
                })
                .map_or_else(Verdict::pass, Verdict::fail);
            let c1 = (0..=full_k)
                .find_map(|k_mask| {
                    let lhs: i64 = (0..k)
                        .filter(|&idx| k_mask & (1 << idx) != 0)
                        .map(|idx| lower_col[idx])
                        .sum();
                    let rhs: i64 = (0..ctx.s)
                        .map(|j| (n - r64).min(ctx.mu_col_syms(k_mask, j)))
                        .sum();
                    (lhs > rhs).then(|| TheoremCert {
                        condition: "col-lower-min",
                        rows: None,
                        cols: None,
                        symbols: Some(mask_to_syms(k_mask, k)),
                        lhs,
                        rhs,
                    })
                })
                .map_or_else(Verdict::pass, Verdict::fail);
            let c2 = (0..=full_j)
                .find_map(|j_mask| {
                    let lhs = j_mask.count_ones() as i64 * (n - r64);
                    let co = !j_mask & full_j;
                    let rhs: i64 = (0..k)
                        .map(|idx| monus64(lower_col[idx] - ctx.mu_cols(co, idx)))
                        .sum();
                    (lhs < rhs).then(|| TheoremCert {
                        condition: "col-lower-monus",
                        rows: None,
                        cols: Some(mask_to_rows(j_mask, ctx.s)),
                        symbols: None,
                        lhs,
                        rhs,
                    })
                })
                .map_or_else(Verdict::pass, Verdict::fail);
            conditions.push(("row-lower-min", r1));
            conditions.push(("row-lower-monus", r2));
            conditions.push(("col-lower-min", c1));
            conditions.push(("col-lower-monus", c2));
        }
    }

    Ok(CorollaryReport {
        kind,
        hypothesis_holds,
        hypothesis_violators: violators,
        conditions,
    })
}
