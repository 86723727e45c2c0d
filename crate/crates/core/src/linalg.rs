//! Banded matrices with an LU factorisation using partial pivoting.
//!
//! Every operator on the grids of this crate couples a vertex only to
//! vertices within a fixed index distance (1 on one-dimensional grids, one
//! ring on the polar grid), so a band solver is exact and cheap.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    // row-major, `width` entries per row; column j of row i lives at
    // j - i + lower. The extra `lower` super-diagonals absorb pivoting fill.
    width: usize,
    data: Vec<f64>,
}

/// LU factors of a [`BandedMatrix`], reusable for several right-hand sides.
#[derive(Debug, Clone)]
pub struct BandedLu {
    factors: BandedMatrix,
    pivots: Vec<usize>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = 2 * lower + upper + 1;
        Self {
            n,
            lower,
            upper,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let offset = j as isize - i as isize + self.lower as isize;
        if offset < 0 || offset as usize >= self.width {
            None
        } else {
            Some(i * self.width + offset as usize)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.slot(i, j) {
            Some(s) if j <= i + self.upper => self.data[s],
            _ => 0.0,
        }
    }

    /// Adds `value` to entry `(i, j)`.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            j <= i + self.upper && i <= j + self.lower,
            "entry ({i}, {j}) outside band ({}, {})",
            self.lower,
            self.upper
        );
        let s = self.slot(i, j).expect("inside band");
        self.data[s] += value;
    }

    /// Overwrites row `i` with the `i`-th row of the identity.
    pub fn set_identity_row(&mut self, i: usize) {
        let lo = i.saturating_sub(self.lower);
        let hi = (i + self.upper).min(self.n - 1);
        for j in lo..=hi {
            let s = self.slot(i, j).expect("inside band");
            self.data[s] = if i == j { 1.0 } else { 0.0 };
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper).min(self.n - 1);
            *yi = (lo..=hi).map(|j| self.get(i, j) * x[j]).sum();
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.lower;
        let w = self.width;
        let reach = self.lower + self.upper;
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            // entry (i, k) sits at i * w + k - i + kl
            let at = |i: usize| i * w + k + kl - i;
            let mut p = k;
            let mut best = self.data[at(k)].abs();
            for i in k + 1..=last_row {
                let v = self.data[at(i)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular { column: k });
            }
            pivots[k] = p;
            let cols = (k + reach).min(n - 1) - k + 1;
            if p != k {
                for c in 0..cols {
                    self.data.swap(at(k) + c, at(p) + c);
                }
            }
            let pivot_at = at(k);
            let pivot = self.data[pivot_at];
            for i in k + 1..=last_row {
                let ik = at(i);
                let l = self.data[ik] / pivot;
                self.data[ik] = l;
                if l == 0.0 {
                    continue;
                }
                let (head, tail) = self.data.split_at_mut(ik);
                let upper = &head[pivot_at + 1..pivot_at + cols];
                for (x, u) in tail[1..cols].iter_mut().zip(upper) {
                    *x -= l * u;
                }
            }
        }
        Ok(BandedLu {
            factors: self,
            pivots,
        })
    }

    pub fn solve(self, rhs: &mut [f64]) -> Result<()> {
        self.factor()?.solve(rhs);
        Ok(())
    }
}

impl BandedLu {
    pub fn solve(&self, rhs: &mut [f64]) {
        let a = &self.factors;
        let n = a.n;
        let (w, kl) = (a.width, a.lower);
        let reach = a.lower + a.upper;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                rhs.swap(k, p);
            }
            let x = rhs[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                rhs[i] -= a.data[i * w + k + kl - i] * x;
            }
        }
        for k in (0..n).rev() {
            let row = &a.data[k * w + kl..k * w + kl + (k + reach).min(n - 1) - k + 1];
            let s: f64 = row[1..].iter().zip(&rhs[k + 1..]).map(|(u, x)| u * x).sum();
            rhs[k] = (rhs[k] - s) / row[0];
        }
    }
}
