//! Semilinear subsets of ℕ^d and the existential-to-universal conversion
//! over clique alphabets.
//!
//! A semilinear set is a finite union of linear sets `base + ℕ·periods`.
//! Union and Minkowski sum are structural; intersection and complement go
//! through exact solving of integer linear systems over ℕ (minimal
//! solutions via the Contejean–Devie completion procedure), so every
//! operation here is exact, not an approximation. The test suite
//! cross-validates all of them against grid brute force.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::alphabet::ConcurrentAlphabet;
use crate::automata::{FiniteAutomaton, Symbol};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemilinearError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("alphabet is not a clique: {0:?} and {1:?} are dependent")]
    NotAClique(String, String),
}

/// `base + ℕ-combinations of periods`, all over ℕ^d.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinearSet {
    pub base: Vec<u64>,
    pub periods: Vec<Vec<u64>>,
}

impl LinearSet {
    pub fn new(base: Vec<u64>, periods: Vec<Vec<u64>>) -> Self {
        let dim = base.len();
        let mut ps: Vec<Vec<u64>> = periods
            .into_iter()
            .inspect(|p| assert_eq!(p.len(), dim, "period dimension mismatch"))
            .filter(|p| p.iter().any(|&x| x > 0))
            .collect();
        ps.sort();
        ps.dedup();
        LinearSet { base, periods: ps }
    }

    pub fn dimension(&self) -> usize {
        self.base.len()
    }

    /// Membership by depth-first search over period choices. Periods are
    /// nonzero, so each use strictly increases some coordinate and the
    /// residual shrinks; no explicit coefficient bound is needed.
    fn member(&self, v: &[u64]) -> bool {
        fn rec(rest: &[i64], periods: &[Vec<u64>]) -> bool {
            if rest.iter().all(|&x| x == 0) {
                return true;
            }
            if rest.iter().any(|&x| x < 0) {
                return false;
            }
            match periods.split_first() {
                None => false,
                Some((p, tail)) => {
                    // try all multiples of p, then move on
                    let mut cur: Vec<i64> = rest.to_vec();
                    loop {
                        if rec(&cur, tail) {
                            return true;
                        }
                        for (c, &d) in cur.iter_mut().zip(p.iter()) {
                            *c -= d as i64;
                        }
                        if cur.iter().any(|&x| x < 0) {
                            return false;
                        }
                    }
                }
            }
        }
        let rest: Vec<i64> = v
            .iter()
            .zip(self.base.iter())
            .map(|(&a, &b)| a as i64 - b as i64)
            .collect();
        rec(&rest, &self.periods)
    }
}

/// Finite union of linear sets of a common dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemilinearSet {
    dimension: usize,
    parts: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn new(dimension: usize, parts: Vec<LinearSet>) -> Self {
        for p in &parts {
            assert_eq!(p.dimension(), dimension, "part dimension mismatch");
        }
        let mut s = SemilinearSet { dimension, parts };
        s.normalize();
        s
    }

    pub fn empty(dimension: usize) -> Self {
        SemilinearSet {
            dimension,
            parts: Vec::new(),
        }
    }

    pub fn singleton(v: Vec<u64>) -> Self {
        let dim = v.len();
        SemilinearSet::new(dim, vec![LinearSet::new(v, vec![])])
    }

    /// All of ℕ^d: zero base with the unit periods.
    pub fn full(dimension: usize) -> Self {
        let periods = (0..dimension)
            .map(|i| {
                let mut p = vec![0; dimension];
                p[i] = 1;
                p
            })
            .collect();
        SemilinearSet::new(dimension, vec![LinearSet::new(vec![0; dimension], periods)])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn parts(&self) -> &[LinearSet] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    fn normalize(&mut self) {
        self.parts.sort();
        self.parts.dedup();
        // drop parts subsumed by a sibling
        let snapshot = self.parts.clone();
        self.parts.retain(|p| {
            !snapshot.iter().any(|q| {
                q != p
                    && q.member(&p.base)
                    && p.periods.iter().all(|per| {
                        LinearSet::new(vec![0; p.base.len()], q.periods.clone()).member(per)
                    })
            })
        });
    }

    pub fn member(&self, v: &[u64]) -> Result<bool, SemilinearError> {
        if v.len() != self.dimension {
            return Err(SemilinearError::DimensionMismatch {
                left: self.dimension,
                right: v.len(),
            });
        }
        Ok(self.parts.iter().any(|p| p.member(v)))
    }

    pub fn union(&self, other: &Self) -> Result<Self, SemilinearError> {
        self.check_dim(other)?;
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Ok(SemilinearSet::new(self.dimension, parts))
    }

    fn check_dim(&self, other: &Self) -> Result<(), SemilinearError> {
        if self.dimension != other.dimension {
            return Err(SemilinearError::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        Ok(())
    }

    /// Pointwise sum of the two sets (Parikh image of concatenation).
    pub fn minkowski_sum(&self, other: &Self) -> Self {
        assert_eq!(self.dimension, other.dimension);
        let mut parts = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let base = a
                    .base
                    .iter()
                    .zip(b.base.iter())
                    .map(|(&x, &y)| x + y)
                    .collect();
                let mut periods = a.periods.clone();
                periods.extend(b.periods.iter().cloned());
                parts.push(LinearSet::new(base, periods));
            }
        }
        SemilinearSet::new(self.dimension, parts)
    }

    /// Parikh image of the Kleene star: zero, plus one linear set per
    /// non-empty subset of parts, whose bases join the periods.
    pub fn star_closure(&self) -> Self {
        let dim = self.dimension;
        let mut parts = vec![LinearSet::new(vec![0; dim], vec![])];
        let n = self.parts.len();
        assert!(
            n <= 16,
            "star of a semilinear set with {n} parts; automaton too large for the regex route"
        );
        for mask in 1u32..(1 << n) {
            let mut base = vec![0u64; dim];
            let mut periods = Vec::new();
            for (i, part) in self.parts.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (b, &x) in base.iter_mut().zip(part.base.iter()) {
                        *b += x;
                    }
                    periods.push(part.base.clone());
                    periods.extend(part.periods.iter().cloned());
                }
            }
            parts.push(LinearSet::new(base, periods));
        }
        SemilinearSet::new(dim, parts)
    }

    /// Exact intersection: per pair of linear sets, the mixing coefficients
    /// solve `base1 + P1·x = base2 + P2·y`, whose ℕ-solution set is
    /// reconstructed from minimal solutions.
    pub fn intersect(&self, other: &Self) -> Result<Self, SemilinearError> {
        self.check_dim(other)?;
        let dim = self.dimension;
        let mut parts = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                parts.extend(intersect_linear(a, b, dim));
            }
        }
        Ok(SemilinearSet::new(dim, parts))
    }

    /// Exact complement within ℕ^d.
    ///
    /// Each linear part is first decomposed into pieces with linearly
    /// independent periods; membership in such a piece is a conjunction of
    /// integer-linear span, sign, and divisibility constraints, so the
    /// piece's complement is a union of basic solvable regions. The final
    /// complement intersects the per-part complements.
    pub fn complement(&self) -> Self {
        let dim = self.dimension;
        if self.parts.is_empty() {
            return SemilinearSet::full(dim);
        }
        let mut acc: Option<SemilinearSet> = None;
        for part in &self.parts {
            let mut comp: Option<SemilinearSet> = None;
            for simple in decompose_simple(part) {
                let c = complement_simple(&simple, dim);
                comp = Some(match comp {
                    None => c,
                    Some(prev) => prev.intersect(&c).expect("same dim"),
                });
            }
            let comp = comp.expect("decomposition is never empty");
            acc = Some(match acc {
                None => comp,
                Some(prev) => prev.intersect(&comp).expect("same dim"),
            });
        }
        acc.unwrap()
    }
}

// ---------------------------------------------------------------------------
// Integer linear systems over ℕ: Contejean–Devie completion
// ---------------------------------------------------------------------------

/// Minimal non-zero solutions of `A·z = 0` over ℕ^n.
fn hilbert_basis(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<u64>> {
    let value = |z: &[u64]| -> Vec<i64> {
        rows.iter()
            .map(|row| row.iter().zip(z.iter()).map(|(&a, &x)| a * x as i64).sum())
            .collect()
    };
    let leq = |a: &[u64], b: &[u64]| a.iter().zip(b.iter()).all(|(x, y)| x <= y);
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut frontier: BTreeSet<Vec<u64>> = (0..ncols)
        .map(|i| {
            let mut e = vec![0u64; ncols];
            e[i] = 1;
            e
        })
        .collect();
    while !frontier.is_empty() {
        let mut next = BTreeSet::new();
        for t in &frontier {
            let vt = value(t);
            if vt.iter().all(|&x| x == 0) {
                if !basis.iter().any(|b| leq(b, t)) {
                    basis.retain(|b| !leq(t, b));
                    basis.push(t.clone());
                }
                continue;
            }
            for i in 0..ncols {
                let mut e = vec![0u64; ncols];
                e[i] = 1;
                let ve = value(&e);
                let dot: i64 = vt.iter().zip(ve.iter()).map(|(&a, &b)| a * b).sum();
                if dot < 0 {
                    let mut t2 = t.clone();
                    t2[i] += 1;
                    if !basis.iter().any(|b| leq(b, &t2)) {
                        next.insert(t2);
                    }
                }
            }
        }
        frontier = next;
    }
    basis.sort();
    basis
}

/// Solution set of `A·z = b` over ℕ^n as (particular solutions, periods).
fn solve_system(rows: &[Vec<i64>], rhs: &[i64], ncols: usize) -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
    // Homogenize: append a column for the right-hand side with value -b,
    // then keep minimal solutions by their homogenizing coordinate.
    let ext_rows: Vec<Vec<i64>> = rows
        .iter()
        .zip(rhs.iter())
        .map(|(row, &b)| {
            let mut r = row.clone();
            r.push(-b);
            r
        })
        .collect();
    let minimals = hilbert_basis(&ext_rows, ncols + 1);
    let mut particular = Vec::new();
    let mut periods = Vec::new();
    for m in minimals {
        let (z, mu) = m.split_at(ncols);
        match mu[0] {
            0 => periods.push(z.to_vec()),
            1 => particular.push(z.to_vec()),
            _ => {} // minimal solutions with µ ≥ 2 never contribute to µ = 1 fibers
        }
    }
    (particular, periods)
}

/// The ℕ-solutions of a linear system, projected to the first `keep`
/// coordinates, as a semilinear set.
fn solutions_as_semilinear(
    rows: &[Vec<i64>],
    rhs: &[i64],
    ncols: usize,
    keep: usize,
) -> SemilinearSet {
    let (particular, periods) = solve_system(rows, rhs, ncols);
    let parts = particular
        .into_iter()
        .map(|p| {
            LinearSet::new(
                p[..keep].to_vec(),
                periods.iter().map(|h| h[..keep].to_vec()).collect(),
            )
        })
        .collect();
    SemilinearSet::new(keep, parts)
}

fn intersect_linear(a: &LinearSet, b: &LinearSet, dim: usize) -> Vec<LinearSet> {
    // Solve base_a + Pa·x = base_b + Pb·y row-wise over (x, y) ∈ ℕ.
    let ka = a.periods.len();
    let kb = b.periods.len();
    let ncols = ka + kb;
    let mut rows = Vec::with_capacity(dim);
    let mut rhs = Vec::with_capacity(dim);
    for coord in 0..dim {
        let mut row = Vec::with_capacity(ncols);
        for p in &a.periods {
            row.push(p[coord] as i64);
        }
        for p in &b.periods {
            row.push(-(p[coord] as i64));
        }
        rows.push(row);
        rhs.push(b.base[coord] as i64 - a.base[coord] as i64);
    }
    let (particular, periods) = solve_system(&rows, &rhs, ncols);
    let apply_a = |coeffs: &[u64]| -> Vec<u64> {
        (0..dim)
            .map(|coord| {
                coeffs
                    .iter()
                    .zip(a.periods.iter())
                    .map(|(&k, p)| k * p[coord])
                    .sum::<u64>()
            })
            .collect()
    };
    particular
        .into_iter()
        .map(|sol| {
            let offset = apply_a(&sol[..ka]);
            let base = a
                .base
                .iter()
                .zip(offset.iter())
                .map(|(&x, &y)| x + y)
                .collect();
            let ps: Vec<Vec<u64>> = periods.iter().map(|h| apply_a(&h[..ka])).collect();
            LinearSet::new(base, ps)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Complement of a linear set
// ---------------------------------------------------------------------------

/// Exact rational arithmetic for the small eliminations below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Frac {
    num: i128,
    den: i128, // > 0
}

impl Frac {
    fn new(num: i128, den: i128) -> Self {
        assert!(den != 0);
        let sign = if den < 0 { -1 } else { 1 };
        let (mut num, mut den) = (num * sign, den * sign);
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
        if g > 1 {
            num /= g;
            den /= g;
        }
        Frac { num, den }
    }
    fn int(v: i128) -> Self {
        Frac { num: v, den: 1 }
    }
    fn zero() -> Self {
        Frac::int(0)
    }
    fn is_zero(self) -> bool {
        self.num == 0
    }
    fn add(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
    fn sub(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }
    fn mul(self, o: Frac) -> Frac {
        Frac::new(self.num * o.num, self.den * o.den)
    }
    fn div(self, o: Frac) -> Frac {
        assert!(!o.is_zero());
        Frac::new(self.num * o.den, self.den * o.num)
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        0
    } else {
        (a / gcd(a.unsigned_abs(), b.unsigned_abs()) as i128) * b
    }
}

/// Reduced row echelon form; returns pivot column per row.
fn rref(matrix: &mut Vec<Vec<Frac>>) -> Vec<usize> {
    let rows = matrix.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = matrix[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !matrix[i][c].is_zero()) else {
            continue;
        };
        matrix.swap(r, pr);
        let inv = matrix[r][c];
        for x in matrix[r].iter_mut() {
            *x = x.div(inv);
        }
        for i in 0..rows {
            if i != r && !matrix[i][c].is_zero() {
                let f = matrix[i][c];
                for c2 in 0..cols {
                    let sub = matrix[r][c2].mul(f);
                    matrix[i][c2] = matrix[i][c2].sub(sub);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A non-zero integer vector z with `columns · z = 0`, if the columns are
/// linearly dependent.
fn integer_kernel_vector(columns: &[Vec<u64>], dim: usize) -> Option<Vec<i128>> {
    let k = columns.len();
    let mut m: Vec<Vec<Frac>> = (0..dim)
        .map(|coord| {
            (0..k)
                .map(|j| Frac::int(columns[j][coord] as i128))
                .collect()
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() == k {
        return None; // full column rank
    }
    let free = (0..k).find(|c| !pivots.contains(c)).unwrap();
    // z[free] = 1, pivot columns read off the echelon form
    let mut z = vec![Frac::zero(); k];
    z[free] = Frac::int(1);
    for (row, &pc) in pivots.iter().enumerate() {
        z[pc] = Frac::zero().sub(m[row][free]);
    }
    let denom = z.iter().fold(1i128, |acc, f| lcm(acc, f.den));
    Some(z.iter().map(|f| f.num * (denom / f.den)).collect())
}

/// Splits a linear set into pieces whose periods are linearly independent.
fn decompose_simple(part: &LinearSet) -> Vec<LinearSet> {
    let dim = part.dimension();
    match integer_kernel_vector(&part.periods, dim) {
        None => vec![part.clone()],
        Some(z) => {
            // relation: Σ_{z_i > 0} z_i·p_i = Σ_{z_j < 0} (-z_j)·p_j
            let mut out = Vec::new();
            for (i, &zi) in z.iter().enumerate() {
                if zi <= 0 {
                    continue;
                }
                for c in 0..zi as u64 {
                    let mut base = part.base.clone();
                    for (b, &p) in base.iter_mut().zip(part.periods[i].iter()) {
                        *b += c * p;
                    }
                    let mut periods = part.periods.clone();
                    periods.remove(i);
                    out.extend(decompose_simple(&LinearSet::new(base, periods)));
                }
            }
            out
        }
    }
}

/// Complement of a linear set with linearly independent periods.
///
/// Membership of v is equivalent to: (v - base) lies in the rational span
/// of the periods, and the unique rational coefficient vector is
/// componentwise a natural number. Each way to violate that is a basic
/// region solvable as an integer linear system.
fn complement_simple(part: &LinearSet, dim: usize) -> SemilinearSet {
    let k = part.periods.len();
    let base: Vec<i128> = part.base.iter().map(|&x| x as i128).collect();

    // Left annihilator rows: integer vectors y with y·p = 0 for all periods.
    let annihilator = left_annihilator(&part.periods, dim);
    // Coefficient extraction rows: λ = R (v - base) / D.
    let (coeff_rows, denom) = coefficient_rows(&part.periods, dim);

    let mut result = SemilinearSet::empty(dim);

    // Region family 1: off-span — some annihilator row is non-zero.
    for row in &annihilator {
        let target: i128 = row.iter().zip(base.iter()).map(|(&a, &b)| a * b).sum();
        for strict_above in [true, false] {
            result = result
                .union(&half_space(row, target, strict_above, dim))
                .expect("dim");
        }
    }

    // Region families 2 and 3: on-span but a coefficient is negative or
    // fractional.
    for i in 0..k {
        let row = &coeff_rows[i];
        let target: i128 = row.iter().zip(base.iter()).map(|(&a, &b)| a * b).sum();
        // negative: R_i·v < R_i·base  (λ_i < 0)
        let mut neg = half_space_below(row, target, dim);
        neg = constrain_to_span(neg, &annihilator, &base);
        result = result.union(&neg).expect("dim");
        // fractional: R_i·(v - base) ≢ 0 (mod D)
        for residue in 1..denom {
            let cong = congruence_region(row, target, residue, denom, dim);
            let cong = constrain_to_span(cong, &annihilator, &base);
            result = result.union(&cong).expect("dim");
        }
    }
    result
}

/// {v ∈ ℕ^d : row·v > target} or {v : row·v ≥ target+1} — same thing.
fn half_space(row: &[i128], target: i128, strict_above: bool, dim: usize) -> SemilinearSet {
    if strict_above {
        // row·v - s = target + 1, s ∈ ℕ
        let mut r: Vec<i64> = row.iter().map(|&x| x as i64).collect();
        r.push(-1);
        solutions_as_semilinear(&[r], &[(target + 1) as i64], dim + 1, dim)
    } else {
        half_space_below(row, target, dim)
    }
}

/// {v ∈ ℕ^d : row·v < target}.
fn half_space_below(row: &[i128], target: i128, dim: usize) -> SemilinearSet {
    // row·v + s = target - 1, s ∈ ℕ
    let mut r: Vec<i64> = row.iter().map(|&x| x as i64).collect();
    r.push(1);
    solutions_as_semilinear(&[r], &[(target - 1) as i64], dim + 1, dim)
}

/// {v ∈ ℕ^d : row·v ≡ target + residue (mod modulus)}.
fn congruence_region(
    row: &[i128],
    target: i128,
    residue: i128,
    modulus: i128,
    dim: usize,
) -> SemilinearSet {
    // row·v - m·t⁺ + m·t⁻ = target + residue, with t⁺, t⁻ ∈ ℕ
    let mut r: Vec<i64> = row.iter().map(|&x| x as i64).collect();
    r.push(-(modulus as i64));
    r.push(modulus as i64);
    solutions_as_semilinear(&[r], &[(target + residue) as i64], dim + 2, dim)
}

/// Intersects a region with the span conditions annihilator·v = annihilator·base.
fn constrain_to_span(
    region: SemilinearSet,
    annihilator: &[Vec<i128>],
    base: &[i128],
) -> SemilinearSet {
    if annihilator.is_empty() {
        return region;
    }
    let dim = region.dimension();
    let rows: Vec<Vec<i64>> = annihilator
        .iter()
        .map(|r| r.iter().map(|&x| x as i64).collect())
        .collect();
    let rhs: Vec<i64> = annihilator
        .iter()
        .map(|r| r.iter().zip(base.iter()).map(|(&a, &b)| (a * b) as i64).sum())
        .collect();
    let span_set = solutions_as_semilinear(&rows, &rhs, dim, dim);
    region.intersect(&span_set).expect("dim")
}

/// Integer basis of {y : y·p = 0 for every period p}.
fn left_annihilator(periods: &[Vec<u64>], dim: usize) -> Vec<Vec<i128>> {
    // Solve Pᵀ y = 0 over ℚ: the kernel of the transpose.
    let k = periods.len();
    let mut m: Vec<Vec<Frac>> = (0..k)
        .map(|j| {
            (0..dim)
                .map(|coord| Frac::int(periods[j][coord] as i128))
                .collect()
        })
        .collect();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    for free in (0..dim).filter(|c| !pivots.contains(c)) {
        let mut y = vec![Frac::zero(); dim];
        y[free] = Frac::int(1);
        for (row, &pc) in pivots.iter().enumerate() {
            y[pc] = Frac::zero().sub(m[row][free]);
        }
        let denom = y.iter().fold(1i128, |acc, f| lcm(acc, f.den));
        basis.push(y.iter().map(|f| f.num * (denom / f.den)).collect());
    }
    basis
}

/// Rows R and denominator D with λ = R·(v - base) / D for v on the span.
fn coefficient_rows(periods: &[Vec<u64>], dim: usize) -> (Vec<Vec<i128>>, i128) {
    let k = periods.len();
    if k == 0 {
        return (Vec::new(), 1);
    }
    // Solve [P | I] by rref on Pᵀ·P λ = Pᵀ·x symbolically: build the k×(k+d)
    // system (PᵀP | Pᵀ) and eliminate; the right block becomes R/D.
    let dot = |a: &Vec<u64>, b: &Vec<u64>| -> i128 {
        a.iter().zip(b.iter()).map(|(&x, &y)| x as i128 * y as i128).sum()
    };
    let mut m: Vec<Vec<Frac>> = (0..k)
        .map(|i| {
            let mut row: Vec<Frac> = (0..k)
                .map(|j| Frac::int(dot(&periods[i], &periods[j])))
                .collect();
            row.extend((0..dim).map(|c| Frac::int(periods[i][c] as i128)));
            row
        })
        .collect();
    let pivots = rref(&mut m);
    assert_eq!(pivots.len(), k, "periods must be linearly independent");
    let denom = m
        .iter()
        .flat_map(|row| row[k..].iter())
        .fold(1i128, |acc, f| lcm(acc, f.den));
    let rows = m
        .iter()
        .map(|row| row[k..].iter().map(|f| f.num * (denom / f.den)).collect())
        .collect();
    (rows, denom)
}

// ---------------------------------------------------------------------------
// Regular-language representatives and the clique ∃→∀ conversion
// ---------------------------------------------------------------------------

/// A regular language whose Parikh image is exactly `s`: per linear set,
/// the base letters in canonical order followed by a loop of period blocks.
pub fn to_regular<S: Symbol>(s: &SemilinearSet, alphabet: &[S]) -> FiniteAutomaton<S> {
    assert_eq!(alphabet.len(), s.dimension(), "alphabet/dimension mismatch");
    let mut sorted = alphabet.to_vec();
    sorted.sort();
    assert_eq!(sorted, alphabet, "alphabet must be in canonical order");
    let word_of = |v: &[u64]| -> Vec<S> {
        v.iter()
            .enumerate()
            .flat_map(|(i, &n)| std::iter::repeat(alphabet[i].clone()).take(n as usize))
            .collect()
    };
    // One branch per part out of a fresh initial state.
    let mut transitions: Vec<(usize, S, usize)> = Vec::new();
    let mut eps: Vec<(usize, usize)> = Vec::new();
    let mut finals = Vec::new();
    let mut next_state = 1;
    for part in s.parts() {
        let mut cur = 0;
        for sym in word_of(&part.base) {
            transitions.push((cur, sym, next_state));
            cur = next_state;
            next_state += 1;
        }
        // if the base is empty the loop anchor is a fresh state joined by ε
        let anchor = if cur == 0 {
            let a = next_state;
            next_state += 1;
            eps.push((0, a));
            a
        } else {
            cur
        };
        finals.push(anchor);
        for period in &part.periods {
            let word = word_of(period);
            let mut c = anchor;
            for (i, sym) in word.iter().enumerate() {
                let target = if i + 1 == word.len() {
                    anchor
                } else {
                    let t = next_state;
                    next_state += 1;
                    t
                };
                transitions.push((c, sym.clone(), target));
                c = target;
            }
        }
    }
    FiniteAutomaton::new(
        alphabet.to_vec(),
        next_state.max(1),
        0,
        finals,
        transitions,
        eps,
    )
    .determinize()
    .trim()
}

/// The ∃→∀ conversion over a clique alphabet: returns K with
/// `[L]∃ = [K]∀`, built as the complement of a representative language of
/// the complement of L's Parikh image.
pub fn exists_to_forall_clique<S: Symbol>(
    l: &FiniteAutomaton<S>,
    alphabet: &ConcurrentAlphabet<S>,
) -> Result<FiniteAutomaton<S>, SemilinearError> {
    if let Some((a, b)) = alphabet.non_independent_pair() {
        return Err(SemilinearError::NotAClique(
            format!("{a:?}"),
            format!("{b:?}"),
        ));
    }
    Ok(exists_to_forall_by_image(l, &l.parikh_image()))
}

/// Shared core: K = ¬ repr(¬ image). Exposed for the pipeline, which
/// coordinates representative choices across a family of languages by
/// passing refined images.
pub(crate) fn exists_to_forall_by_image<S: Symbol>(
    l: &FiniteAutomaton<S>,
    image: &SemilinearSet,
) -> FiniteAutomaton<S> {
    let off_image = image.complement();
    let repr = to_regular(&off_image, l.alphabet());
    repr.complement().trim()
}
