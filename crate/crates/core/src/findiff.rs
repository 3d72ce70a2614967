//! Periodic centered difference stencils and a cyclic banded direct solver.
//!
//! System matrices are stored row-wise in a band of half-width `w`, with
//! periodic wrap: entry `(i, (i + o) mod n)` for `|o| <= w`. The solver
//! factors the non-cyclic band with partial pivoting and folds the corner
//! blocks back in through a rank-`2w` Woodbury correction.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid1D};

/// Constant-coefficient periodic stencil: `(A u)_i = sum_j c_j u_{(i + o_j) mod n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicBandedOperator {
    offsets: Vec<isize>,
    coeffs: Vec<f64>,
    n: usize,
}

impl CyclicBandedOperator {
    pub fn new(n: usize, offsets: Vec<isize>, coeffs: Vec<f64>) -> Result<Self> {
        if offsets.len() != coeffs.len() {
            return Err(Error::config("stencil offsets and coefficients differ in length"));
        }
        if n == 0 {
            return Err(Error::config("stencil dimension must be positive"));
        }
        Ok(CyclicBandedOperator { offsets, coeffs, n })
    }

    pub fn identity(n: usize) -> Self {
        CyclicBandedOperator { offsets: vec![0], coeffs: vec![1.0], n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn stencil(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        self.offsets.iter().copied().zip(self.coeffs.iter().copied())
    }

    pub fn half_width(&self) -> usize {
        self.offsets.iter().map(|o| o.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn apply_slice(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.n {
            return Err(Error::GridMismatch(format!("operator of size {} applied to {} values", self.n, u.len())));
        }
        let n = self.n as isize;
        Ok((0..n)
            .map(|i| self.stencil().map(|(o, c)| c * u[(i + o).rem_euclid(n) as usize]).sum())
            .collect())
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        Field::new(*f.grid(), self.apply_slice(f.values())?)
    }
}

/// `(u_{i+1} - u_{i-1}) / (2 dx)`
pub fn make_d1(grid: &Grid1D) -> CyclicBandedOperator {
    let h = 1.0 / (2.0 * grid.dx());
    CyclicBandedOperator { offsets: vec![-1, 1], coeffs: vec![-h, h], n: grid.num_points() }
}

/// `(u_{i+1} - 2 u_i + u_{i-1}) / dx^2`
pub fn make_d2(grid: &Grid1D) -> CyclicBandedOperator {
    let h = 1.0 / (grid.dx() * grid.dx());
    CyclicBandedOperator { offsets: vec![-1, 0, 1], coeffs: vec![h, -2.0 * h, h], n: grid.num_points() }
}

/// `(u_{i+2} - 2 u_{i+1} + 2 u_{i-1} - u_{i-2}) / (2 dx^3)`
pub fn make_d3(grid: &Grid1D) -> CyclicBandedOperator {
    let h = 1.0 / (2.0 * grid.dx().powi(3));
    CyclicBandedOperator {
        offsets: vec![-2, -1, 1, 2],
        coeffs: vec![-h, 2.0 * h, -2.0 * h, h],
        n: grid.num_points(),
    }
}

/// Variable-coefficient cyclic banded matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicBandedMatrix {
    n: usize,
    w: usize,
    // row-major, n rows of 2w+1 entries; column index w + o holds offset o
    band: Vec<f64>,
}

impl CyclicBandedMatrix {
    pub fn zeros(n: usize, half_width: usize) -> Self {
        CyclicBandedMatrix { n, w: half_width, band: vec![0.0; n * (2 * half_width + 1)] }
    }

    pub fn identity(n: usize, half_width: usize) -> Self {
        let mut m = Self::zeros(n, half_width);
        for i in 0..n {
            m.add(i, 0, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> usize {
        self.w
    }

    fn width(&self) -> usize {
        2 * self.w + 1
    }

    /// Adds `value` at `(row, row + offset mod n)`.
    pub fn add(&mut self, row: usize, offset: isize, value: f64) {
        debug_assert!(offset.unsigned_abs() <= self.w);
        let k = (self.w as isize + offset) as usize;
        let width = self.width();
        self.band[row * width + k] += value;
    }

    pub fn get(&self, row: usize, offset: isize) -> f64 {
        let k = (self.w as isize + offset) as usize;
        self.band[row * self.width() + k]
    }

    fn check_op(&self, op: &CyclicBandedOperator) {
        assert_eq!(op.dim(), self.n, "operator dimension mismatch");
        assert!(op.half_width() <= self.w, "operator wider than matrix band");
    }

    /// `self += scale * op`
    pub fn add_operator(&mut self, scale: f64, op: &CyclicBandedOperator) {
        self.check_op(op);
        for i in 0..self.n {
            for (o, c) in op.stencil() {
                self.add(i, o, scale * c);
            }
        }
    }

    /// `self += scale * diag(d) * op`
    pub fn add_diag_operator(&mut self, scale: f64, d: &[f64], op: &CyclicBandedOperator) {
        self.check_op(op);
        for i in 0..self.n {
            for (o, c) in op.stencil() {
                self.add(i, o, scale * d[i] * c);
            }
        }
    }

    /// `self += scale * op * diag(d)`
    pub fn add_operator_diag(&mut self, scale: f64, op: &CyclicBandedOperator, d: &[f64]) {
        self.check_op(op);
        let n = self.n as isize;
        for i in 0..self.n {
            for (o, c) in op.stencil() {
                let j = (i as isize + o).rem_euclid(n) as usize;
                self.add(i, o, scale * c * d[j]);
            }
        }
    }

    /// `self *= c`
    pub fn scale(&mut self, c: f64) {
        self.band.iter_mut().for_each(|v| *v *= c);
    }

    /// `self += c * I`
    pub fn add_identity(&mut self, c: f64) {
        for i in 0..self.n {
            self.add(i, 0, c);
        }
    }

    /// `self += scale * diag(d)`
    pub fn add_diagonal(&mut self, scale: f64, d: &[f64]) {
        for (i, di) in d.iter().enumerate() {
            self.add(i, 0, scale * di);
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let n = self.n as isize;
        let w = self.w as isize;
        let width = self.width();
        (0..self.n)
            .map(|i| {
                let row = &self.band[i * width..(i + 1) * width];
                (-w..=w)
                    .map(|o| row[(o + w) as usize] * x[(i as isize + o).rem_euclid(n) as usize])
                    .sum()
            })
            .collect()
    }

    /// Dense copy; aliased offsets (when `n <= 2w`) are summed.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        let n = self.n as isize;
        let w = self.w as isize;
        for (i, row) in a.iter_mut().enumerate() {
            for o in -w..=w {
                row[(i as isize + o).rem_euclid(n) as usize] += self.get(i, o);
            }
        }
        a
    }

    fn max_abs(&self) -> f64 {
        self.band.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Interleaves a 2x2 block system of `n x n` matrices into one `2n x 2n`
    /// matrix with unknown ordering `(x_0, y_0, x_1, y_1, ...)`.
    pub fn interleave(blocks: [[&CyclicBandedMatrix; 2]; 2]) -> CyclicBandedMatrix {
        let n = blocks[0][0].n;
        let w = blocks.iter().flatten().map(|b| b.w).max().unwrap_or(0);
        let mut out = CyclicBandedMatrix::zeros(2 * n, 2 * w + 1);
        for (r, row) in blocks.iter().enumerate() {
            for (c, block) in row.iter().enumerate() {
                assert_eq!(block.n, n, "block dimension mismatch");
                let bw = block.w as isize;
                for i in 0..n {
                    for o in -bw..=bw {
                        let v = block.get(i, o);
                        if v != 0.0 {
                            out.add(2 * i + r, 2 * o + c as isize - r as isize, v);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn factor(&self) -> Result<Factorization> {
        Factorization::new(self)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.factor()?.solve(rhs)
    }
}

/// Pivots smaller than this fraction of the largest matrix entry are rejected.
pub const PIVOT_TOL: f64 = 1e-14;

/// Size at or below which the dense path is used.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone)]
pub enum Factorization {
    Dense(DenseLu),
    Cyclic(CyclicLu),
}

impl Factorization {
    fn new(m: &CyclicBandedMatrix) -> Result<Self> {
        if m.n <= DENSE_LIMIT || m.n < 4 * m.w + 2 {
            DenseLu::new(m.to_dense(), PIVOT_TOL * m.max_abs()).map(Factorization::Dense)
        } else {
            CyclicLu::new(m).map(Factorization::Cyclic)
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match self {
            Factorization::Dense(lu) => lu.solve(rhs),
            Factorization::Cyclic(lu) => lu.solve(rhs),
        }
    }
}

/// Dense LU with partial pivoting.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn new(mut a: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .expect("non-empty pivot range");
            if !(a[p][k].abs() > tol) {
                return Err(Error::Solver(format!("pivot {:e} at column {k} below tolerance", a[p][k])));
            }
            a.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..n {
                let l = a[i][k] / a[k][k];
                a[i][k] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        a[i][j] -= l * a[k][j];
                    }
                }
            }
        }
        Ok(DenseLu { lu: a, perm })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.len();
        if rhs.len() != n {
            return Err(Error::GridMismatch(format!("rhs of length {} for system of size {n}", rhs.len())));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i][j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i][j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i][i];
        }
        Ok(x)
    }
}

/// LU of a (non-cyclic) band matrix with partial pivoting.
#[derive(Debug, Clone)]
struct BandLu {
    n: usize,
    w: usize,
    // row i stores columns i - w ..= i + 2w
    rows: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    fn stride(w: usize) -> usize {
        3 * w + 1
    }

    fn new(m: &CyclicBandedMatrix, tol: f64) -> Result<Self> {
        let (n, w) = (m.n, m.w);
        let stride = Self::stride(w);
        let mut rows = vec![0.0; n * stride];
        for i in 0..n {
            for o in -(w as isize)..=(w as isize) {
                let j = i as isize + o;
                if j >= 0 && (j as usize) < n {
                    rows[i * stride + (o + w as isize) as usize] = m.get(i, o);
                }
            }
        }
        // column j of row i lives at i*stride + (j + w - i)
        let at = |i: usize, j: usize| i * stride + j + w - i;
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last = (k + w).min(n - 1);
            let mut p = k;
            for r in k + 1..=last {
                if rows[at(r, k)].abs() > rows[at(p, k)].abs() {
                    p = r;
                }
            }
            let piv = rows[at(p, k)];
            if !(piv.abs() > tol) {
                return Err(Error::Solver(format!("pivot {piv:e} at column {k} below tolerance")));
            }
            pivots[k] = p;
            let jmax = (k + 2 * w).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    rows.swap(at(k, j), at(p, j));
                }
            }
            let pivot = rows[at(k, k)];
            for r in k + 1..=last {
                let l = rows[at(r, k)] / pivot;
                rows[at(r, k)] = l;
                if l != 0.0 {
                    for j in k + 1..=jmax {
                        rows[at(r, j)] -= l * rows[at(k, j)];
                    }
                }
            }
        }
        Ok(BandLu { n, w, rows, pivots })
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let (n, w) = (self.n, self.w);
        let stride = Self::stride(w);
        let at = |i: usize, j: usize| i * stride + j + w - i;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for r in k + 1..=(k + w).min(n - 1) {
                    b[r] -= self.rows[at(r, k)] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + 2 * w).min(n - 1) {
                s -= self.rows[at(i, j)] * b[j];
            }
            b[i] = s / self.rows[at(i, i)];
        }
    }
}

/// Band LU plus Woodbury correction for the periodic corner blocks.
#[derive(Debug, Clone)]
pub struct CyclicLu {
    band: BandLu,
    // rows carrying corner entries, and their (column, value) lists
    corner_rows: Vec<usize>,
    corners: Vec<Vec<(usize, f64)>>,
    // band^{-1} applied to the unit vectors of the corner rows, one column each
    z: Vec<Vec<f64>>,
    capacitance: DenseLu,
}

impl CyclicLu {
    fn new(m: &CyclicBandedMatrix) -> Result<Self> {
        let tol = PIVOT_TOL * m.max_abs();
        let band = BandLu::new(m, tol)?;
        let (n, w) = (m.n, m.w as isize);
        let mut corner_rows = Vec::new();
        let mut corners = Vec::new();
        for i in (0..m.w).chain(n - m.w..n) {
            let entries: Vec<(usize, f64)> = (-w..=w)
                .filter_map(|o| {
                    let j = i as isize + o;
                    (j < 0 || j >= n as isize).then(|| (j.rem_euclid(n as isize) as usize, m.get(i, o)))
                })
                .filter(|&(_, v)| v != 0.0)
                .collect();
            if !entries.is_empty() {
                corner_rows.push(i);
                corners.push(entries);
            }
        }
        let z: Vec<Vec<f64>> = corner_rows
            .iter()
            .map(|&r| {
                let mut e = vec![0.0; n];
                e[r] = 1.0;
                band.solve_in_place(&mut e);
                e
            })
            .collect();
        let k = corner_rows.len();
        let mut cap = vec![vec![0.0; k]; k];
        for (a, entries) in corners.iter().enumerate() {
            for (b, zb) in z.iter().enumerate() {
                cap[a][b] = entries.iter().map(|&(j, v)| v * zb[j]).sum::<f64>() + if a == b { 1.0 } else { 0.0 };
            }
        }
        let capacitance = DenseLu::new(cap, PIVOT_TOL)?;
        Ok(CyclicLu { band, corner_rows, corners, z, capacitance })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.band.n {
            return Err(Error::GridMismatch(format!(
                "rhs of length {} for system of size {}",
                rhs.len(),
                self.band.n
            )));
        }
        let mut y = rhs.to_vec();
        self.band.solve_in_place(&mut y);
        if self.corner_rows.is_empty() {
            return Ok(y);
        }
        let vy: Vec<f64> = self.corners.iter().map(|e| e.iter().map(|&(j, v)| v * y[j]).sum()).collect();
        let coef = self.capacitance.solve(&vy)?;
        for (zc, c) in self.z.iter().zip(coef) {
            for (yi, zi) in y.iter_mut().zip(zc) {
                *yi -= c * zi;
            }
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hand_evaluated_stencils() {
        let g = Grid1D::new(8, 1.0).unwrap();
        // n = 8 stands in for the n = 4 hand example: same periodic pattern repeated
        let u = [0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0];
        assert_eq!(make_d1(&g).apply_slice(&u).unwrap(), vec![1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0]);
        let op = CyclicBandedOperator { n: 4, ..make_d1(&g) };
        assert_eq!(op.apply_slice(&[0.0, 1.0, 0.0, -1.0]).unwrap(), vec![1.0, 0.0, -1.0, 0.0]);
        let d2 = CyclicBandedOperator { n: 4, ..make_d2(&g) };
        assert_eq!(d2.apply_slice(&[1.0, 0.0, 0.0, 0.0]).unwrap(), vec![-2.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn d3_matches_dense_construction() {
        let g = Grid1D::new(8, 0.5).unwrap();
        let d3 = CyclicBandedOperator { n: 6, ..make_d3(&g) };
        let h = 1.0 / (2.0 * 0.125);
        let mut dense = vec![vec![0.0; 6]; 6];
        for (i, row) in dense.iter_mut().enumerate() {
            row[(i + 2) % 6] += h;
            row[(i + 1) % 6] -= 2.0 * h;
            row[(i + 5) % 6] += 2.0 * h;
            row[(i + 4) % 6] -= h;
        }
        let u = [0.3, -1.2, 2.0, 0.7, 0.0, 1.1];
        let got = d3.apply_slice(&u).unwrap();
        for i in 0..6 {
            let want: f64 = (0..6).map(|j| dense[i][j] * u[j]).sum();
            assert_relative_eq!(got[i], want, epsilon = 1e-13);
        }
    }

    #[test]
    fn operators_annihilate_constants() {
        let g = Grid1D::new(16, 0.3).unwrap();
        let c = Field::constant(g, 4.2);
        for op in [make_d1(&g), make_d2(&g), make_d3(&g)] {
            assert!(op.apply(&c).unwrap().max_abs() < 1e-10);
        }
        assert_eq!(CyclicBandedOperator::identity(16).apply(&c).unwrap(), c);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = Grid1D::new(16, 0.3).unwrap();
        assert!(make_d1(&g).apply_slice(&[0.0; 15]).is_err());
    }

    #[test]
    fn interleave_places_blocks() {
        let n = 10;
        let mut a = CyclicBandedMatrix::zeros(n, 1);
        let mut b = CyclicBandedMatrix::zeros(n, 1);
        let c = CyclicBandedMatrix::identity(n, 1);
        let d = CyclicBandedMatrix::identity(n, 1);
        a.add(0, 1, 2.0);
        b.add(n - 1, 1, 3.0);
        let m = CyclicBandedMatrix::interleave([[&a, &b], [&c, &d]]);
        let dense = m.to_dense();
        assert_eq!(dense[0][2], 2.0);
        assert_eq!(dense[2 * (n - 1)][1], 3.0);
        assert_eq!(dense[1][0], 1.0);
        assert_eq!(dense[3][3], 1.0);
    }

    #[test]
    fn identity_solve() {
        let m = CyclicBandedMatrix::identity(100, 2);
        let rhs: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        assert_eq!(m.solve(&rhs).unwrap(), rhs);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        for n in [33, 201] {
            // all-ones tridiagonal pattern: singular whenever 3 divides n
            let mut ones = CyclicBandedMatrix::zeros(n, 1);
            for i in 0..n {
                for o in -1..=1 {
                    ones.add(i, o, 1.0);
                }
            }
            assert!(matches!(ones.solve(&vec![1.0; n]), Err(Error::Solver(_))), "ones, n = {n}");
            let g = Grid1D::new(n, 1.0).unwrap();
            let mut d2 = CyclicBandedMatrix::zeros(n, 1);
            d2.add_operator(1.0, &make_d2(&g));
            assert!(matches!(d2.solve(&vec![1.0; n]), Err(Error::Solver(_))), "d2, n = {n}");
        }
    }
}
