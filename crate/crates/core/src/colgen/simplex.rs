//! Dense revised simplex for small linear programs.
//!
//! Solves `min c^T x` subject to row constraints `a_i^T x (>=|<=|=) b_i`
//! and `x >= 0`. Rows are brought to equality form with slack columns and
//! flipped so the right-hand side is nonnegative; phase 1 then minimises
//! the sum of one artificial per row. Entering and leaving variables follow
//! Bland's rule, and the explicit basis inverse is rebuilt from scratch
//! every [`REFRESH_EVERY`] pivots.

use crate::error::{Error, Result};

pub const REFRESH_EVERY: usize = 50;
pub const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-9;
const RATIO_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub cmp: Cmp,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub costs: Vec<f64>,
    pub rows: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// One dual value per row, for the rows as given (before any flip).
    pub duals: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(costs: Vec<f64>) -> Self {
        Self { costs, rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) -> &mut Self {
        self.rows.push(Constraint { coeffs, cmp, rhs });
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("LP costs"));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.coeffs.len() != n {
                return Err(Error::invalid(format!("row {i} has {} coefficients, expected {n}", r.coeffs.len())));
            }
            if !r.rhs.is_finite() || r.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::NonFinite("LP row"));
            }
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution> {
        self.validate()?;
        Tableau::build(self).run()
    }

    /// Largest violation of complementary slackness between `sol.x` and
    /// `sol.duals`: `|y_i (a_i^T x - b_i)|` over rows and
    /// `|x_j (c_j - y^T a_j)|` over columns.
    pub fn complementary_slackness(&self, sol: &LpSolution) -> f64 {
        let mut worst: f64 = 0.0;
        for (r, &y) in self.rows.iter().zip(&sol.duals) {
            let ax: f64 = r.coeffs.iter().zip(&sol.x).map(|(a, x)| a * x).sum();
            worst = worst.max((y * (ax - r.rhs)).abs());
        }
        for j in 0..self.num_vars() {
            let ya: f64 = self.rows.iter().zip(&sol.duals).map(|(r, y)| y * r.coeffs[j]).sum();
            worst = worst.max((sol.x[j] * (self.costs[j] - ya)).abs());
        }
        worst
    }
}

/// Equality-form data plus the current basis.
struct Tableau {
    m: usize,
    /// Structural count; slack columns follow, then one artificial per row.
    n_struct: usize,
    n_total: usize,
    first_artificial: usize,
    /// Column-major constraint matrix, `cols[j][i]`.
    cols: Vec<Vec<f64>>,
    b: Vec<f64>,
    costs: Vec<f64>,
    /// +1 or -1 per row, recording the flip applied to make `b >= 0`.
    sign: Vec<f64>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    pivots: usize,
    since_refresh: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n_struct = lp.num_vars();
        let slack_rows: Vec<usize> = (0..m).filter(|&i| lp.rows[i].cmp != Cmp::Eq).collect();
        let first_artificial = n_struct + slack_rows.len();
        let n_total = first_artificial + m;
        let sign: Vec<f64> = lp.rows.iter().map(|r| if r.rhs < 0.0 { -1.0 } else { 1.0 }).collect();

        let mut cols = vec![vec![0.0; m]; n_total];
        for (i, r) in lp.rows.iter().enumerate() {
            for j in 0..n_struct {
                cols[j][i] = sign[i] * r.coeffs[j];
            }
        }
        for (s, &i) in slack_rows.iter().enumerate() {
            let coef = if lp.rows[i].cmp == Cmp::Ge { -1.0 } else { 1.0 };
            cols[n_struct + s][i] = sign[i] * coef;
        }
        for i in 0..m {
            cols[first_artificial + i][i] = 1.0;
        }
        let b: Vec<f64> = lp.rows.iter().zip(&sign).map(|(r, s)| s * r.rhs).collect();
        let mut costs = lp.costs.clone();
        costs.resize(n_total, 0.0);

        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        Self {
            m,
            n_struct,
            n_total,
            first_artificial,
            cols,
            xb: b.clone(),
            b,
            costs,
            sign,
            basis: (first_artificial..n_total).collect(),
            binv,
            pivots: 0,
            since_refresh: 0,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.first_artificial
    }

    /// Row vector `c_B^T B^{-1}`.
    fn duals_for(&self, cost: &dyn Fn(usize) -> f64) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (r, &bv) in self.basis.iter().enumerate() {
            let cb = cost(bv);
            if cb != 0.0 {
                for k in 0..m {
                    y[k] += cb * self.binv[r * m + k];
                }
            }
        }
        y
    }

    /// `B^{-1} a_j`.
    fn column(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let a = &self.cols[j];
        let mut out = vec![0.0; m];
        for (k, &ak) in a.iter().enumerate() {
            if ak != 0.0 {
                for r in 0..m {
                    out[r] += self.binv[r * m + k] * ak;
                }
            }
        }
        out
    }

    fn refresh(&mut self) -> Result<()> {
        let m = self.m;
        // Gauss-Jordan on [B | I] with partial pivoting
        let mut bmat = vec![0.0; m * m];
        for (c, &bv) in self.basis.iter().enumerate() {
            for r in 0..m {
                bmat[r * m + c] = self.cols[bv][r];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&a, &b| bmat[a * m + c].abs().total_cmp(&bmat[b * m + c].abs()))
                .expect("nonempty range");
            let piv = bmat[p * m + c];
            if piv.abs() < PIVOT_TOL {
                return Err(Error::Numerical(format!(
                    "singular basis during refresh (column {c}, pivot {piv:e}, after {} pivots)",
                    self.pivots
                )));
            }
            if p != c {
                for k in 0..m {
                    bmat.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            for k in 0..m {
                bmat[c * m + k] /= piv;
                inv[c * m + k] /= piv;
            }
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = bmat[r * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        bmat[r * m + k] -= f * bmat[c * m + k];
                        inv[r * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
        self.binv = inv;
        for r in 0..m {
            self.xb[r] = (0..m).map(|k| self.binv[r * m + k] * self.b[k]).sum();
        }
        self.since_refresh = 0;
        Ok(())
    }

    fn pivot(&mut self, row: usize, entering: usize, d: &[f64]) -> Result<()> {
        let m = self.m;
        let piv = d[row];
        if piv.abs() < PIVOT_TOL {
            return Err(Error::Numerical(format!(
                "pivot magnitude {piv:e} below tolerance (entering {entering}, row {row}, after {} pivots)",
                self.pivots
            )));
        }
        let theta = self.xb[row] / piv;
        for r in 0..m {
            if r != row {
                self.xb[r] -= theta * d[r];
            }
        }
        self.xb[row] = theta;
        for k in 0..m {
            self.binv[row * m + k] /= piv;
        }
        for r in 0..m {
            if r == row || d[r] == 0.0 {
                continue;
            }
            let f = d[r];
            for k in 0..m {
                self.binv[r * m + k] -= f * self.binv[row * m + k];
            }
        }
        self.basis[row] = entering;
        self.pivots += 1;
        self.since_refresh += 1;
        if self.since_refresh >= REFRESH_EVERY {
            self.refresh()?;
        }
        Ok(())
    }

    /// Runs simplex iterations with the given cost function over the
    /// columns `allowed` admits until no reduced cost is negative.
    fn optimise(&mut self, cost: &dyn Fn(usize) -> f64, allowed: &dyn Fn(usize) -> bool) -> Result<()> {
        let max_pivots = 50_000 + 100 * (self.n_total + self.m);
        loop {
            if self.pivots > max_pivots {
                return Err(Error::Numerical(format!("simplex exceeded {max_pivots} pivots")));
            }
            let y = self.duals_for(cost);
            let in_basis = {
                let mut v = vec![false; self.n_total];
                for &bv in &self.basis {
                    v[bv] = true;
                }
                v
            };
            // Bland: lowest-index improving column
            let entering = (0..self.n_total).find(|&j| {
                if in_basis[j] || !allowed(j) {
                    return false;
                }
                let ya: f64 = self.cols[j].iter().zip(&y).map(|(a, yi)| a * yi).sum();
                cost(j) - ya < -COST_TOL
            });
            let Some(e) = entering else { return Ok(()) };
            let d = self.column(e);
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                if d[r] > RATIO_TOL {
                    let ratio = self.xb[r].max(0.0) / d[r];
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12 || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::invalid("linear program is unbounded"));
            };
            self.pivot(row, e, &d)?;
        }
    }

    fn run(mut self) -> Result<LpSolution> {
        let fa = self.first_artificial;
        let phase1 = move |j: usize| if j >= fa { 1.0 } else { 0.0 };
        self.optimise(&phase1, &|_| true)?;
        let infeasibility: f64 = self.basis.iter().zip(&self.xb).filter(|(&bv, _)| bv >= fa).map(|(_, &x)| x).sum();
        if infeasibility > FEAS_TOL {
            return Err(Error::Infeasible(format!("linear program infeasible (phase 1 residual {infeasibility:e})")));
        }
        // drive zero-level artificials out of the basis where possible
        for row in 0..self.m {
            if !self.is_artificial(self.basis[row]) {
                continue;
            }
            let m = self.m;
            let in_basis: Vec<usize> = self.basis.clone();
            let candidate = (0..fa).find(|&j| {
                !in_basis.contains(&j) && {
                    let v: f64 = (0..m).map(|k| self.binv[row * m + k] * self.cols[j][k]).sum();
                    v.abs() > 1e-7
                }
            });
            if let Some(j) = candidate {
                let d = self.column(j);
                self.pivot(row, j, &d)?;
            }
        }
        let costs = self.costs.clone();
        let phase2 = move |j: usize| costs[j];
        self.optimise(&phase2, &|j| j < fa)?;
        self.refresh()?;

        let mut x = vec![0.0; self.n_struct];
        for (&bv, &v) in self.basis.iter().zip(&self.xb) {
            if bv < self.n_struct {
                x[bv] = v.max(0.0);
            }
        }
        let costs = &self.costs;
        let y = self.duals_for(&|j| costs[j]);
        let duals: Vec<f64> = y.iter().zip(&self.sign).map(|(v, s)| v * s).collect();
        let objective = x.iter().zip(&self.costs).map(|(xi, ci)| xi * ci).sum();
        Ok(LpSolution { x, duals, objective, pivots: self.pivots })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_min() {
        // min 2x + 3y, x + y >= 4, x + 3y >= 6 -> x = 3, y = 1, obj 9
        let mut lp = LinearProgram::new(vec![2.0, 3.0]);
        lp.add_row(vec![1.0, 1.0], Cmp::Ge, 4.0).add_row(vec![1.0, 3.0], Cmp::Ge, 6.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 9.0).abs() < 1e-9);
        assert!((s.x[0] - 3.0).abs() < 1e-9 && (s.x[1] - 1.0).abs() < 1e-9);
        // duals: y1 + y2 = 2, y1 + 3 y2 = 3 -> y = (1.5, 0.5)
        assert!((s.duals[0] - 1.5).abs() < 1e-9 && (s.duals[1] - 0.5).abs() < 1e-9);
        assert!(lp.complementary_slackness(&s) < 1e-9);
    }

    #[test]
    fn le_and_eq_rows() {
        // max x + y (as min -x - y), x + 2y <= 4, x - y = 1 -> x = 2, y = 1
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.add_row(vec![1.0, 2.0], Cmp::Le, 4.0).add_row(vec![1.0, -1.0], Cmp::Eq, 1.0);
        let s = lp.solve().unwrap();
        assert!((s.objective + 3.0).abs() < 1e-9, "{}", s.objective);
        assert!(lp.complementary_slackness(&s) < 1e-9);
    }

    #[test]
    fn negative_rhs_and_infeasible() {
        // -x >= -2 (x <= 2), min -x -> x = 2
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.add_row(vec![-1.0], Cmp::Ge, -2.0);
        let s = lp.solve().unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);

        let mut bad = LinearProgram::new(vec![1.0]);
        bad.add_row(vec![1.0], Cmp::Le, 1.0).add_row(vec![1.0], Cmp::Ge, 2.0);
        assert!(matches!(bad.solve(), Err(Error::Infeasible(_))));

        let mut unb = LinearProgram::new(vec![-1.0]);
        unb.add_row(vec![1.0], Cmp::Ge, 1.0);
        assert!(unb.solve().is_err());
    }

    #[test]
    fn redundant_rows_and_refresh() {
        // many duplicate covering rows force degenerate pivots and refreshes
        let n = 30;
        let mut lp = LinearProgram::new(vec![1.0; n]);
        for i in 0..n {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row[(i + 1) % n] = 1.0;
            lp.add_row(row.clone(), Cmp::Ge, 1.0);
            lp.add_row(row, Cmp::Ge, 1.0);
        }
        let s = lp.solve().unwrap();
        assert!((s.objective - 15.0).abs() < 1e-9);
        assert!(lp.complementary_slackness(&s) < 1e-8);
    }
}
