//! Smith normal form over ℤ and the solution family of `a_i b_i = a_0 b_0 + h_i`.
//!
//! The system is written as `A X = C` with the banded matrix
//!
//! ```text
//! A = | a_0  -a_1    0   ...    0  |      C = | -h_1          |
//!     |  0    a_1  -a_2  ...    0  |          |  h_1 - h_2    |
//!     |              ...           |          |  ...          |
//!     |  0    ...   a_{k-1}  -a_k  |          |  h_{k-1} - h_k|
//! ```
//!
//! and solved through `U A V = B`. Every entry is an `i128` and every
//! operation is overflow-checked; overflow is reported, never wrapped.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{ext_gcd, gcd_i128, lcm_many};
use crate::{Error, Result};

const OVERFLOW: Error = Error::Overflow("integer matrix arithmetic");

#[inline]
fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(OVERFLOW)
}

#[inline]
fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(OVERFLOW)
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i128>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput("dimension mismatch in product".into()));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = add(out[(i, j)], mul(a, other[(k, j)])?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i128]) -> Result<Vec<i128>> {
        if v.len() != self.cols {
            return Err(Error::InvalidInput("dimension mismatch in product".into()));
        }
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .try_fold(0i128, |acc, (&a, &b)| add(acc, mul(a, b)?))
            })
            .collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i128> {
        if self.rows != self.cols {
            return Err(Error::InvalidInput("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut m = self.clone();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if m[(k, k)] == 0 {
                let Some(swap) = (k + 1..n).find(|&i| m[(i, k)] != 0) else {
                    return Ok(0);
                };
                m.swap_rows(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = mul(m[(i, j)], m[(k, k)])?
                        .checked_sub(mul(m[(i, k)], m[(k, j)])?)
                        .ok_or(OVERFLOW)?;
                    m[(i, j)] = v / prev;
                }
            }
            prev = m[(k, k)];
        }
        mul(sign, m[(n - 1, n - 1)])
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[target] += factor · row[source]`
    fn add_row(&mut self, target: usize, source: usize, factor: i128) -> Result<()> {
        for j in 0..self.cols {
            let v = add(self[(target, j)], mul(factor, self[(source, j)])?)?;
            self[(target, j)] = v;
        }
        Ok(())
    }

    /// `col[target] += factor · col[source]`
    fn add_col(&mut self, target: usize, source: usize, factor: i128) -> Result<()> {
        for i in 0..self.rows {
            let v = add(self[(i, target)], mul(factor, self[(i, source)])?)?;
            self[(i, target)] = v;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }

    /// Replaces columns `(c0, c1)` by `(x·c0 + z·c1, y·c0 + w·c1)`.
    fn combine_cols(&mut self, c0: usize, c1: usize, [x, y, z, w]: [i128; 4]) -> Result<()> {
        for i in 0..self.rows {
            let (p, q) = (self[(i, c0)], self[(i, c1)]);
            self[(i, c0)] = add(mul(x, p)?, mul(z, q)?)?;
            self[(i, c1)] = add(mul(y, p)?, mul(w, q)?)?;
        }
        Ok(())
    }
}

impl core::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Elimination strategy for [`smith_normal_form`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnfMode {
    /// Divisibility chain `d_1 | d_2 | ...`; pivot is the smallest nonzero
    /// absolute value, ties broken by lowest `(row, col)`.
    Canonical,
    /// Left-to-right Bezout elimination on the banded system matrix; the
    /// diagonal is `e_{j+1} = gcd(lcm(a_0..a_j), a_{j+1})` and no chain is
    /// enforced.
    BandedRecursion,
}

/// `U · A · V = B` with unimodular `U`, `V` and `B` zero off the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub b: IntMatrix,
    pub v: IntMatrix,
    pub mode: SnfMode,
    recursion: Option<Vec<i128>>,
}

impl SnfDecomposition {
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.b.rows.min(self.b.cols))
            .map(|i| self.b[(i, i)])
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&d| d != 0).count()
    }

    /// The gcd recursion `d_{0,1} = gcd(a_0, a_1)`,
    /// `d_{01..j,j+1} = gcd(a_0⋯a_j, a_{j+1} d_{01..j-1,j})` (banded mode only).
    ///
    /// These are the running products of [`diagonal`](Self::diagonal): the
    /// recursion scales each row by the previous pivot, which a unimodular
    /// elimination does not do.
    pub fn recursion_values(&self) -> Option<&[i128]> {
        self.recursion.as_deref()
    }

    pub fn has_divisibility_chain(&self) -> bool {
        let d: Vec<i128> = self.diagonal().into_iter().filter(|&x| x != 0).collect();
        d.windows(2).all(|w| w[1] % w[0] == 0)
    }

    /// Recomputes `U·A·V`, compares it with `B`, and checks `|det U| = |det V| = 1`.
    pub fn verify(&self, a: &IntMatrix) -> Result<bool> {
        let product = self.u.mul(a)?.mul(&self.v)?;
        let off_diagonal_zero = (0..self.b.rows)
            .all(|i| (0..self.b.cols).all(|j| i == j || self.b[(i, j)] == 0));
        Ok(product == self.b
            && off_diagonal_zero
            && self.u.determinant()?.abs() == 1
            && self.v.determinant()?.abs() == 1)
    }
}

/// Smith normal form of a nonzero integer matrix.
pub fn smith_normal_form(a: &IntMatrix, mode: SnfMode) -> Result<SnfDecomposition> {
    if a.rows == 0 || a.cols == 0 || a.is_zero() {
        return Err(Error::Precondition("Smith normal form needs a nonzero matrix".into()));
    }
    match mode {
        SnfMode::Canonical => canonical_snf(a),
        SnfMode::BandedRecursion => banded_snf(a),
    }
}

fn canonical_snf(a: &IntMatrix) -> Result<SnfDecomposition> {
    let (m, n) = (a.rows, a.cols);
    let mut b = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        // Smallest nonzero |entry| in the trailing block, lowest (row, col) on ties.
        let Some((pi, pj)) = smallest_nonzero(&b, (t..m).flat_map(|i| (t..n).map(move |j| (i, j))))
        else {
            break;
        };
        move_pivot(&mut b, &mut u, &mut v, t, pi, pj);
        loop {
            let pivot = b[(t, t)];
            for i in t + 1..m {
                let q = b[(i, t)] / pivot;
                if q != 0 {
                    b.add_row(i, t, -q)?;
                    u.add_row(i, t, -q)?;
                }
            }
            for j in t + 1..n {
                let q = b[(t, j)] / pivot;
                if q != 0 {
                    b.add_col(j, t, -q)?;
                    v.add_col(j, t, -q)?;
                }
            }
            let cross = (t + 1..m).map(|i| (i, t)).chain((t + 1..n).map(|j| (t, j)));
            if let Some((pi, pj)) = smallest_nonzero(&b, cross) {
                move_pivot(&mut b, &mut u, &mut v, t, pi, pj);
                continue;
            }
            let bad = (t + 1..m).find_map(|i| {
                (t + 1..n)
                    .find(|&j| b[(i, j)] % pivot != 0)
                    .map(|_| i)
            });
            match bad {
                Some(i) => {
                    b.add_row(t, i, 1)?;
                    u.add_row(t, i, 1)?;
                }
                None => break,
            }
        }
        if b[(t, t)] < 0 {
            b.negate_row(t);
            u.negate_row(t);
        }
    }
    Ok(SnfDecomposition {
        u,
        b,
        v,
        mode: SnfMode::Canonical,
        recursion: None,
    })
}

fn smallest_nonzero(
    b: &IntMatrix,
    cells: impl Iterator<Item = (usize, usize)>,
) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), u128)> = None;
    for (i, j) in cells {
        let x = b[(i, j)].unsigned_abs();
        if x != 0 && best.is_none_or(|(pos, y)| x < y || (x == y && (i, j) < pos)) {
            best = Some(((i, j), x));
        }
    }
    best.map(|(pos, _)| pos)
}

fn move_pivot(b: &mut IntMatrix, u: &mut IntMatrix, v: &mut IntMatrix, t: usize, i: usize, j: usize) {
    b.swap_rows(t, i);
    u.swap_rows(t, i);
    b.swap_cols(t, j);
    v.swap_cols(t, j);
}

/// Reads `a_0..a_k` off a banded system matrix, or `None` if `a` has another shape.
fn banded_coefficients(a: &IntMatrix) -> Option<Vec<i128>> {
    let k = a.rows;
    if a.cols != k + 1 {
        return None;
    }
    let mut coeffs = vec![a[(0, 0)]];
    for i in 0..k {
        let next = -a[(i, i + 1)];
        if i + 1 < k && a[(i + 1, i + 1)] != next {
            return None;
        }
        coeffs.push(next);
        let others_zero = (0..a.cols).all(|j| j == i || j == i + 1 || a[(i, j)] == 0);
        if a[(i, i)] <= 0 || !others_zero {
            return None;
        }
    }
    (coeffs.iter().all(|&c| c > 0)).then_some(coeffs)
}

fn banded_snf(a: &IntMatrix) -> Result<SnfDecomposition> {
    let coeffs = banded_coefficients(a).ok_or_else(|| {
        Error::Precondition(
            "recursion mode needs the banded matrix [a_0 -a_1 0..; 0 a_1 -a_2 ..; ..] with positive a_i".into(),
        )
    })?;
    let k = a.rows;
    let mut b = a.clone();
    let mut u = IntMatrix::identity(k);
    let mut v = IntMatrix::identity(k + 1);
    for j in 0..k {
        let pivot = b[(j, j)];
        let next = coeffs[j + 1];
        let (g, x, y) = ext_gcd(pivot, next);
        // [P, -a] · [[x, a/g], [-y, P/g]] = [g, 0], determinant 1.
        let transform = [x, next / g, -y, pivot / g];
        b.combine_cols(j, j + 1, transform)?;
        v.combine_cols(j, j + 1, transform)?;
        if j + 1 < k {
            let factor = -b[(j + 1, j)] / g;
            b.add_row(j + 1, j, factor)?;
            u.add_row(j + 1, j, factor)?;
        }
    }
    let mut recursion = Vec::with_capacity(k);
    let mut prefix_product = coeffs[0];
    let mut previous = 1i128;
    for j in 0..k {
        let d = if j == 0 {
            gcd_i128(coeffs[0], coeffs[1])
        } else {
            gcd_i128(prefix_product, mul(coeffs[j + 1], previous)?)
        };
        recursion.push(d);
        previous = d;
        prefix_product = mul(prefix_product, coeffs[j + 1])?;
    }
    Ok(SnfDecomposition {
        u,
        b,
        v,
        mode: SnfMode::BandedRecursion,
        recursion: Some(recursion),
    })
}

/// `a_i b_i = a_0 b_0 + h_i` for `i = 1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantineSystem {
    a: Vec<i64>,
    h: Vec<i64>,
}

impl DiophantineSystem {
    /// `a = [a_0, .., a_k]`, `h = [h_1, .., h_k]`.
    pub fn new(a: Vec<i64>, h: Vec<i64>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::InvalidInput("system needs k >= 1 equations".into()));
        }
        if a.len() != h.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients a_0..a_k for {} shifts, got {}",
                h.len() + 1,
                h.len(),
                a.len()
            )));
        }
        if let Some(&bad) = a.iter().find(|&&x| x < 1) {
            return Err(Error::InvalidInput(format!("coefficients must be positive, got {bad}")));
        }
        for (i, x) in h.iter().enumerate() {
            if h[i + 1..].contains(x) {
                return Err(Error::InvalidInput(format!("shift {x} repeated")));
            }
        }
        Ok(Self { a, h })
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn h(&self) -> &[i64] {
        &self.h
    }

    pub fn k(&self) -> usize {
        self.h.len()
    }

    /// `h_i` with `h_0 = 0`.
    pub fn shift(&self, i: usize) -> i64 {
        if i == 0 {
            0
        } else {
            self.h[i - 1]
        }
    }

    /// `max |h_i − h_j|` over `0 ≤ i, j ≤ k` with `h_0 = 0`.
    pub fn shift_spread(&self) -> u64 {
        let all = (0..=self.k()).map(|i| self.shift(i));
        let (lo, hi) = all.fold((0i64, 0i64), |(lo, hi), x| (lo.min(x), hi.max(x)));
        hi.abs_diff(lo)
    }

    pub fn matrix(&self) -> IntMatrix {
        let k = self.k();
        let mut m = IntMatrix::zeros(k, k + 1);
        for i in 0..k {
            m[(i, i)] = self.a[i] as i128;
            m[(i, i + 1)] = -(self.a[i + 1] as i128);
        }
        m
    }

    pub fn rhs(&self) -> Vec<i128> {
        (0..self.k())
            .map(|i| self.shift(i) as i128 - self.shift(i + 1) as i128)
            .collect()
    }

    pub fn lcm(&self) -> Result<u128> {
        let a: Vec<u64> = self.a.iter().map(|&x| x as u64).collect();
        lcm_many(&a)
    }

    /// Whether `(b_0..b_k)` satisfies every equation.
    pub fn is_solution(&self, b: &[i128]) -> bool {
        b.len() == self.a.len()
            && (1..=self.k()).all(|i| {
                let lhs = (self.a[i] as i128).checked_mul(b[i]);
                let rhs = (self.a[0] as i128)
                    .checked_mul(b[0])
                    .and_then(|x| x.checked_add(self.shift(i) as i128));
                lhs.is_some() && lhs == rhs
            })
    }

    /// `gcd(a_i, a_j) | (h_i − h_j)` for all pairs, with `h_0 = 0`.
    pub fn necessary_condition(&self) -> bool {
        let n = self.a.len();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let g = gcd_i128(self.a[i] as i128, self.a[j] as i128);
                (self.shift(i) as i128 - self.shift(j) as i128) % g == 0
            })
        })
    }
}

/// `{particular + m · step : m ∈ ℤ}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFamily {
    pub particular: Vec<i128>,
    pub step: Vec<i128>,
}

impl SolutionFamily {
    pub fn member(&self, m: i128) -> Result<Vec<i128>> {
        self.particular
            .iter()
            .zip(&self.step)
            .map(|(&p, &s)| add(p, mul(m, s)?))
            .collect()
    }

    /// Members whose first coordinate lies in `[lo, hi]`, ascending in `b_0`.
    pub fn members_in_box(&self, lo: i128, hi: i128) -> Result<Vec<Vec<i128>>> {
        let (p0, s0) = (self.particular[0], self.step[0]);
        let m_lo = div_ceil(lo - p0, s0);
        let m_hi = (hi - p0).div_euclid(s0);
        (m_lo..=m_hi).map(|m| self.member(m)).collect()
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

/// Result of [`solve_system`].
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// `None` when the system has no integer solution.
    pub family: Option<SolutionFamily>,
    /// The pairwise condition `(a_i, a_j) | (h_i − h_j)`; necessary only.
    pub necessary_condition: bool,
    pub lcm: u128,
    pub snf: SnfDecomposition,
}

impl SolveOutcome {
    pub fn is_solvable(&self) -> bool {
        self.family.is_some()
    }
}

/// Decides solvability through the canonical SNF and returns the full family.
pub fn solve_system(sys: &DiophantineSystem) -> Result<SolveOutcome> {
    let a = sys.matrix();
    let c = sys.rhs();
    let snf = smith_normal_form(&a, SnfMode::Canonical)?;
    let general = solve_with(&snf, &c)?;
    let lcm = sys.lcm()?;
    let family = match general {
        None => None,
        Some(sol) => {
            let [kernel] = sol.kernel.as_slice() else {
                return Err(Error::Precondition("system matrix is not of full rank".into()));
            };
            let sign = if kernel[0] < 0 { -1 } else { 1 };
            let step = kernel.iter().map(|&x| x * sign).collect();
            Some(SolutionFamily {
                particular: sol.particular,
                step,
            })
        }
    };
    Ok(SolveOutcome {
        family,
        necessary_condition: sys.necessary_condition(),
        lcm,
        snf,
    })
}

/// Integer solutions of a general `A X = C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralSolution {
    pub particular: Vec<i128>,
    /// ℤ-basis of the kernel of `A`.
    pub kernel: Vec<Vec<i128>>,
}

/// Solves `A X = C` over ℤ. Returns `Ok(None)` when no integer solution exists.
pub fn solve_general(a: &IntMatrix, c: &[i128]) -> Result<Option<GeneralSolution>> {
    if c.len() != a.rows {
        return Err(Error::InvalidInput("right-hand side length mismatch".into()));
    }
    let snf = smith_normal_form(a, SnfMode::Canonical)?;
    solve_with(&snf, c)
}

fn solve_with(snf: &SnfDecomposition, c: &[i128]) -> Result<Option<GeneralSolution>> {
    let d = snf.u.mul_vec(c)?;
    let n = snf.v.cols;
    let mut y = vec![0i128; n];
    let diag = snf.diagonal();
    for (i, &di) in d.iter().enumerate() {
        let bii = diag.get(i).copied().unwrap_or(0);
        if bii == 0 {
            if di != 0 {
                return Ok(None);
            }
        } else if di % bii != 0 {
            return Ok(None);
        } else {
            y[i] = di / bii;
        }
    }
    let particular = snf.v.mul_vec(&y)?;
    let rank = snf.rank();
    let kernel = (rank..n).map(|j| snf.v.column(j)).collect();
    Ok(Some(GeneralSolution { particular, kernel }))
}

/// Translates the particular solution so that every `b_i* > 0` while
/// `b_i* − step_i ≤ 0` for at least one `i`.
pub fn minimal_positive_particular(fam: &SolutionFamily) -> Result<SolutionFamily> {
    if fam.step.iter().any(|&s| s <= 0) {
        return Err(Error::Precondition("step entries must be positive".into()));
    }
    let shift = fam
        .particular
        .iter()
        .zip(&fam.step)
        .map(|(&p, &s)| (-p).div_euclid(s) + 1)
        .max()
        .expect("non-empty family");
    Ok(SolutionFamily {
        particular: fam.member(shift)?,
        step: fam.step.clone(),
    })
}

/// Every solution with `lo ≤ b_0 ≤ hi`, by direct scan.
pub fn brute_force_solutions(sys: &DiophantineSystem, lo: i128, hi: i128) -> Vec<Vec<i128>> {
    let a0 = sys.a[0] as i128;
    let mut out = Vec::new();
    'scan: for b0 in lo..=hi {
        let mut row = Vec::with_capacity(sys.a.len());
        row.push(b0);
        for i in 1..=sys.k() {
            let num = a0 * b0 + sys.shift(i) as i128;
            let ai = sys.a[i] as i128;
            if num % ai != 0 {
                continue 'scan;
            }
            row.push(num / ai);
        }
        out.push(row);
    }
    out
}
