use num_complex::Complex64;

use super::quad::{GL8_NODES, GL8_WEIGHTS};
use crate::error::{Error, Result};

/// What to return when a table is evaluated outside its grid.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Extrapolation {
    #[default]
    Error,
    Zero,
    Hold,
}

/// Complex samples on a strictly increasing real grid, interpolated by
/// piecewise cubic Hermite polynomials (real and imaginary parts separately).
///
/// Node slopes are the derivatives of the local three-point parabola, so the
/// interpolant is C¹ and exact for quadratics.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTable {
    grid: Vec<f64>,
    values: Vec<Complex64>,
    slopes: Vec<Complex64>,
    extrapolation: Extrapolation,
}

impl ComplexTable {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Table(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::Table("at least two points are required".into()));
        }
        if grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Table("non-finite abscissa".into()));
        }
        if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Table(format!(
                "grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Table("non-finite value".into()));
        }
        let slopes = node_slopes(&grid, &values);
        Ok(Self {
            grid,
            values,
            slopes,
            extrapolation: Extrapolation::Error,
        })
    }

    /// Table with caller-supplied node derivatives instead of parabola slopes.
    pub fn with_slopes(
        grid: Vec<f64>,
        values: Vec<Complex64>,
        slopes: Vec<Complex64>,
    ) -> Result<Self> {
        if slopes.len() != grid.len() {
            return Err(Error::Table("one slope per node is required".into()));
        }
        if slopes.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Table("non-finite slope".into()));
        }
        let mut t = Self::new(grid, values)?;
        t.slopes = slopes;
        Ok(t)
    }

    /// Node derivatives used by the interpolant.
    pub fn slopes(&self) -> &[Complex64] {
        &self.slopes
    }

    /// Samples `f` on `grid`.
    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    /// Uniform grid of `n` points on `[a, b]`.
    pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        assert!(n >= 2);
        let h = (b - a) / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { b } else { a + h * i as f64 })
            .collect()
    }

    pub fn with_extrapolation(mut self, policy: Extrapolation) -> Self {
        self.extrapolation = policy;
        self
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.grid[0]
    }

    pub fn max(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min() && x <= self.max()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Index `i` of the segment `[grid[i], grid[i+1]]` containing `x`.
    fn segment(&self, x: f64) -> usize {
        let n = self.grid.len();
        match self.grid.binary_search_by(|g| g.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    fn outside(&self, x: f64) -> Result<Complex64> {
        match self.extrapolation {
            Extrapolation::Error => Err(Error::OutOfRange {
                x,
                lo: self.min(),
                hi: self.max(),
            }),
            Extrapolation::Zero => Ok(Complex64::new(0.0, 0.0)),
            Extrapolation::Hold => Ok(if x < self.min() {
                self.values[0]
            } else {
                self.values[self.values.len() - 1]
            }),
        }
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if x.is_nan() {
            return Err(Error::Domain("NaN abscissa".into()));
        }
        if !self.contains(x) {
            return self.outside(x);
        }
        let i = self.segment(x);
        Ok(self.hermite(i, x).0)
    }

    /// Derivative of the interpolant (zero outside the grid unless the policy is `Error`).
    pub fn eval_derivative(&self, x: f64) -> Result<Complex64> {
        if !self.contains(x) {
            return self.outside(x).map(|_| Complex64::new(0.0, 0.0));
        }
        let i = self.segment(x);
        Ok(self.hermite(i, x).1)
    }

    fn hermite(&self, i: usize, x: f64) -> (Complex64, Complex64) {
        let x0 = self.grid[i];
        let h = self.grid[i + 1] - x0;
        let s = (x - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let v = y0 * h00 + m0 * h10 + y1 * h01 + m1 * h11;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        let d = (y0 * d00 + m0 * d10 + y1 * d01 + m1 * d11) / h;
        (v, d)
    }

    /// Monomial coefficients of the cubic on segment `i`, in the local variable `u = x - grid[i]`.
    fn cubic(&self, i: usize) -> [Complex64; 4] {
        let h = self.grid[i + 1] - self.grid[i];
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let delta = (y1 - y0) / h;
        let c2 = (3.0 * delta - 2.0 * d0 - d1) / h;
        let c3 = (d0 + d1 - 2.0 * delta) / (h * h);
        [y0, d0, c2, c3]
    }

    /// ∫_a^b p(x) e^{c x} dx where `p` is the interpolant; `[a, b]` must lie in the grid.
    ///
    /// Exact for the piecewise cubic up to rounding: short segments use 8-point
    /// Gauss-Legendre, long ones closed-form integration by parts.
    pub fn integrate_exp(&self, c: Complex64, a: f64, b: f64) -> Result<Complex64> {
        if a > b {
            return self.integrate_exp(c, b, a).map(|v| -v);
        }
        if !self.contains(a) {
            return Err(Error::OutOfRange { x: a, lo: self.min(), hi: self.max() });
        }
        if !self.contains(b) {
            return Err(Error::OutOfRange { x: b, lo: self.min(), hi: self.max() });
        }
        if a == b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let i0 = self.segment(a);
        let i1 = self.segment(b);
        let mut total = Complex64::new(0.0, 0.0);
        for i in i0..=i1 {
            let lo = self.grid[i].max(a);
            let hi = self.grid[i + 1].min(b);
            if hi > lo {
                total += self.segment_exp(i, c, lo, hi);
            }
        }
        Ok(total)
    }

    /// ∫ over the full grid of p(x) e^{c x}.
    pub fn integrate_exp_full(&self, c: Complex64) -> Complex64 {
        let n = self.grid.len();
        (0..n - 1)
            .map(|i| self.segment_exp(i, c, self.grid[i], self.grid[i + 1]))
            .sum()
    }

    /// Suffix integrals S_k = ∫_{grid[k]}^{max} p(x) e^{c x} dx for every node.
    pub fn tail_integrals_exp(&self, c: Complex64) -> Vec<Complex64> {
        let n = self.grid.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in (0..n - 1).rev() {
            out[i] = out[i + 1] + self.segment_exp(i, c, self.grid[i], self.grid[i + 1]);
        }
        out
    }

    fn segment_exp(&self, i: usize, c: Complex64, lo: f64, hi: f64) -> Complex64 {
        let x0 = self.grid[i];
        let coef = self.cubic(i);
        let poly = |u: f64| coef[0] + u * (coef[1] + u * (coef[2] + u * coef[3]));
        let w = hi - lo;
        if (c * w).norm() < 0.5 {
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * w;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..8 {
                let x = mid + half * GL8_NODES[k];
                acc += GL8_WEIGHTS[k] * poly(x - x0) * (c * x).exp();
            }
            acc * half
        } else {
            // p e^{cx}/c - p' e^{cx}/c² + p'' e^{cx}/c³ - p''' e^{cx}/c⁴
            let anti = |x: f64| {
                let u = x - x0;
                let p = poly(u);
                let p1 = coef[1] + u * (2.0 * coef[2] + 3.0 * u * coef[3]);
                let p2 = 2.0 * coef[2] + 6.0 * u * coef[3];
                let p3 = 6.0 * coef[3];
                let ic = 1.0 / c;
                ic * (p - ic * (p1 - ic * (p2 - ic * p3)))
            };
            let e_lo = (c * lo).exp();
            let e_hi = (c * hi).exp();
            e_hi * anti(hi) - e_lo * anti(lo)
        }
    }

    /// New table with `f` applied to every sample.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Self> {
        let values = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        Ok(Self::new(self.grid.clone(), values)?.with_extrapolation(self.extrapolation))
    }
}

fn node_slopes(x: &[f64], y: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    if n == 2 {
        let d = (y[1] - y[0]) / (x[1] - x[0]);
        return vec![d, d];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<Complex64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        d[i] = (delta[i] * h[i - 1] + delta[i - 1] * h[i]) / (h[i - 1] + h[i]);
    }
    d[0] = (delta[0] * (2.0 * h[0] + h[1]) - delta[1] * h[0]) / (h[0] + h[1]);
    let m = n - 1;
    d[m] = (delta[m - 1] * (2.0 * h[m - 1] + h[m - 2]) - delta[m - 2] * h[m - 1])
        / (h[m - 1] + h[m - 2]);
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(ComplexTable::new(vec![0.0, 0.0], vec![c(1.0, 0.0); 2]).is_err());
        assert!(ComplexTable::new(vec![0.0], vec![c(1.0, 0.0)]).is_err());
        assert!(ComplexTable::new(vec![0.0, 1.0], vec![c(f64::NAN, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn reproduces_quadratics_exactly() {
        let grid = vec![0.0, 0.3, 0.7, 1.5, 2.0, 3.1];
        let f = |x: f64| c(1.0 - 2.0 * x + 0.5 * x * x, x * x);
        let t = ComplexTable::from_fn(grid, f).unwrap();
        for &x in &[0.05, 0.5, 1.2, 2.7, 3.1] {
            assert!((t.eval(x).unwrap() - f(x)).norm() < 1e-13);
        }
    }

    #[test]
    fn out_of_range_policies() {
        let t = ComplexTable::from_fn(vec![0.0, 1.0, 2.0], |x| c(x, 0.0)).unwrap();
        assert!(matches!(t.eval(2.5), Err(Error::OutOfRange { .. })));
        let z = t.clone().with_extrapolation(Extrapolation::Zero);
        assert_eq!(z.eval(-1.0).unwrap(), c(0.0, 0.0));
        let h = t.with_extrapolation(Extrapolation::Hold);
        assert_eq!(h.eval(9.0).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn exp_integral_matches_closed_form() {
        let grid = ComplexTable::uniform_grid(0.0, 10.0, 2001);
        let t = ComplexTable::from_fn(grid, |x| (c(-0.3, 1.1) * x).exp()).unwrap();
        for cc in [c(-0.2, 0.0), c(0.0, 7.0), c(-1.0, -40.0)] {
            let got = t.integrate_exp_full(cc);
            let k = c(-0.3, 1.1) + cc;
            let want = ((k * 10.0).exp() - 1.0) / k;
            assert!((got - want).norm() < 1e-8 * want.norm().max(1.0), "{cc}: {got} vs {want}");
        }
    }

    #[test]
    fn tail_integrals_are_consistent() {
        let grid = ComplexTable::uniform_grid(0.0, 4.0, 41);
        let t = ComplexTable::from_fn(grid, |x| c(x.cos(), x.sin())).unwrap();
        let cc = c(-0.5, 0.2);
        let tails = t.tail_integrals_exp(cc);
        let direct = t.integrate_exp(cc, 1.2, 4.0).unwrap();
        assert!((tails[12] - direct).norm() < 1e-14);
        assert!((tails[0] - t.integrate_exp_full(cc)).norm() < 1e-14);
    }
}
