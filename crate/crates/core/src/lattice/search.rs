//! Exact closest-point search (Fincke–Pohst enumeration with Schnorr–Euchner
//! ordering) on the upper-triangular factor of the generator.
//!
//! With `G = QR` and `y = Qᵀx`, `‖x − Gz‖² = ‖y − Rz‖²`. Levels are visited
//! from the last coordinate down; at each level candidates are tried in order
//! of increasing distance to the conditional centre, so the first candidate
//! beyond the radius ends the level. The radius starts at the Babai point and
//! shrinks to every improvement, padded by the tie tolerance so that all
//! equidistant points are visited and the lexicographically smallest
//! coefficient vector wins.

use nalgebra::DMatrix;

use super::TOLERANCE;

struct Search<'a> {
    r: &'a DMatrix<f64>,
    y: &'a [f64],
    unit_sq: f64,
    z: Vec<i64>,
    best: Vec<i64>,
    best_dist: f64,
}

impl Search<'_> {
    fn tol(&self) -> f64 {
        TOLERANCE * self.best_dist.max(self.unit_sq)
    }

    fn centre(&self, k: usize) -> f64 {
        let n = self.y.len();
        let mut acc = self.y[k];
        for j in (k + 1)..n {
            acc -= self.r[(k, j)] * self.z[j] as f64;
        }
        acc / self.r[(k, k)]
    }

    fn visit(&mut self, k: usize, partial: f64) {
        let c = self.centre(k);
        let rkk2 = self.r[(k, k)] * self.r[(k, k)];
        let start = (c - 0.5).ceil();
        let step = if c >= start { 1.0 } else { -1.0 };
        // Zig-zag: start, start+step, start-step, start+2step, ...
        for i in 0.. {
            let offset = if i == 0 {
                0.0
            } else if i % 2 == 1 {
                step * ((i + 1) / 2) as f64
            } else {
                -step * (i / 2) as f64
            };
            let zk = start + offset;
            let d = partial + rkk2 * (zk - c) * (zk - c);
            // |zk − c| is non-decreasing along the zig-zag.
            if d > self.best_dist + self.tol() {
                break;
            }
            self.z[k] = zk as i64;
            if k == 0 {
                self.leaf(d);
            } else {
                self.visit(k - 1, d);
            }
        }
    }

    fn leaf(&mut self, d: f64) {
        let tol = self.tol();
        if d < self.best_dist - tol {
            self.best_dist = d;
            self.best.copy_from_slice(&self.z);
        } else if d <= self.best_dist + tol && self.z < self.best {
            self.best.copy_from_slice(&self.z);
            self.best_dist = self.best_dist.min(d);
        }
    }
}

/// Integer vector minimizing `‖y − Rz‖` for upper-triangular `R`.
pub(super) fn closest_point(r: &DMatrix<f64>, y: &[f64], unit_sq: f64) -> Vec<i64> {
    let n = y.len();
    let mut s = Search {
        r,
        y,
        unit_sq,
        z: vec![0; n],
        best: vec![0; n],
        best_dist: 0.0,
    };
    // Babai nearest-plane point seeds the radius.
    let mut dist = 0.0;
    for k in (0..n).rev() {
        let c = s.centre(k);
        let zk = (c - 0.5).ceil();
        s.z[k] = zk as i64;
        dist += r[(k, k)] * r[(k, k)] * (zk - c) * (zk - c);
    }
    s.best.copy_from_slice(&s.z);
    s.best_dist = dist;
    s.visit(n - 1, 0.0);
    s.best
}
