//! Banded LU factorization with partial pivoting.
//!
//! Rows are stored over the column window `[r - kl, r + kl + ku]`, which is
//! wide enough to hold the fill-in produced by row interchanges.

use crate::error::{NsfError, Result};

/// Triplet assembly buffer that tracks the band width on the fly.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    /// Drops every entry of a row (used to pin a degree of freedom).
    pub fn clear_row(&mut self, row: usize) {
        self.entries.retain(|&(r, _, _)| r != row);
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn into_band(self) -> BandMatrix {
        let mut kl = 0;
        let mut ku = 0;
        for &(r, c, _) in &self.entries {
            if c < r {
                kl = kl.max(r - c);
            } else {
                ku = ku.max(c - r);
            }
        }
        let mut band = BandMatrix::zeros(self.n, kl, ku);
        for (r, c, v) in self.entries {
            band.add(r, c, v);
        }
        band
    }
}

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn pos(&self, r: usize, c: usize) -> usize {
        r * self.width + (c + self.kl - r)
    }

    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        assert!(c + self.kl >= r && c <= r + self.ku, "entry ({r},{c}) outside band");
        let p = self.pos(r, c);
        self.data[p] += v;
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        if c + self.kl < r || c > r + self.kl + self.ku || c >= self.n {
            0.0
        } else {
            self.data[self.pos(r, c)]
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let lo = r.saturating_sub(self.kl);
                let hi = (r + self.ku).min(self.n - 1);
                (lo..=hi).map(|c| self.data[self.pos(r, c)] * x[c]).sum()
            })
            .collect()
    }

    /// In-place LU factorization with partial pivoting.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let reach = kl + ku;
        let mut pivots = Vec::with_capacity(n);
        let mut scratch = vec![0.0; reach + 1];
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);

        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + reach).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.pos(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.data[self.pos(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= 1e-14 * scale {
                return Err(NsfError::Singular { row: k });
            }
            pivots.push(p);
            if p != k {
                for c in k..=last_col {
                    scratch[c - k] = self.data[self.pos(k, c)];
                }
                for c in k..=last_col {
                    let pk = self.pos(k, c);
                    let pp = self.pos(p, c);
                    self.data[pk] = self.data[pp];
                }
                for c in k..=last_col {
                    let pp = self.pos(p, c);
                    self.data[pp] = scratch[c - k];
                }
            }
            let pivot = self.data[self.pos(k, k)];
            for r in k + 1..=last_row {
                let prk = self.pos(r, k);
                let factor = self.data[prk] / pivot;
                self.data[prk] = factor;
                if factor == 0.0 {
                    continue;
                }
                for c in k + 1..=last_col {
                    let pkc = self.pos(k, c);
                    let prc = self.pos(r, c);
                    self.data[prc] -= factor * self.data[pkc];
                }
            }
        }
        Ok(BandLu { lu: self, pivots })
    }
}

/// Factored band matrix; reusable for any number of right-hand sides.
#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn n(&self) -> usize {
        self.lu.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let a = &self.lu;
        let n = a.n;
        assert_eq!(x.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for r in k + 1..=(k + a.kl).min(n - 1) {
                    x[r] -= a.data[a.pos(r, k)] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for c in k + 1..=(k + a.kl + a.ku).min(n - 1) {
                s -= a.data[a.pos(k, c)] * x[c];
            }
            x[k] = s / a.data[a.pos(k, k)];
        }
    }
}
