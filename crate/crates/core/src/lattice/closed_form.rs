//! Closed-form quantizers for `Zⁿ`, `Dₙ` and `E8`.
//!
//! Each returns `None` when the input sits within tolerance of a Voronoi
//! boundary, so the caller can settle the tie with the exact search.

use super::{LatticeKind, TOLERANCE};

pub(super) fn quantize(kind: LatticeKind, scale: f64, x: &[f64]) -> Option<Vec<f64>> {
    let base: Vec<f64> = x.iter().map(|v| v / scale).collect();
    let p = match kind {
        LatticeKind::Integer => Some(integer(&base)),
        LatticeKind::Checkerboard => checkerboard(&base),
        LatticeKind::Gosset => gosset(&base),
    }?;
    Some(p.into_iter().map(|v| v * scale).collect())
}

fn round_half_down(v: f64) -> f64 {
    (v - 0.5).ceil()
}

fn integer(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| round_half_down(v)).collect()
}

fn near_half(v: f64, r: f64) -> bool {
    ((v - r).abs() - 0.5).abs() <= TOLERANCE * (1.0 + v.abs())
}

fn checkerboard(x: &[f64]) -> Option<Vec<f64>> {
    let mut f = integer(x);
    if x.iter().zip(&f).any(|(&v, &r)| near_half(v, r)) {
        return None;
    }
    let parity = f.iter().sum::<f64>().rem_euclid(2.0);
    if parity < 0.5 {
        return Some(f);
    }
    // Re-round the coordinate with the largest rounding error the other way.
    let mut worst = 0;
    let mut worst_err = -1.0;
    let mut runner_up = -1.0;
    for (i, (&v, &r)) in x.iter().zip(&f).enumerate() {
        let e = (v - r).abs();
        if e > worst_err {
            runner_up = worst_err;
            worst_err = e;
            worst = i;
        } else if e > runner_up {
            runner_up = e;
        }
    }
    if x.len() > 1 && worst_err - runner_up <= TOLERANCE {
        return None;
    }
    if worst_err <= TOLERANCE {
        // x already integral with odd parity: both neighbours are equidistant.
        return None;
    }
    f[worst] += if x[worst] > f[worst] { 1.0 } else { -1.0 };
    Some(f)
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn gosset(x: &[f64]) -> Option<Vec<f64>> {
    let even = checkerboard(x)?;
    let shifted: Vec<f64> = x.iter().map(|v| v - 0.5).collect();
    let odd: Vec<f64> = checkerboard(&shifted)?
        .into_iter()
        .map(|v| v + 0.5)
        .collect();
    let (de, dodd) = (dist_sq(x, &even), dist_sq(x, &odd));
    if (de - dodd).abs() <= TOLERANCE * (1.0 + de.max(dodd)) {
        return None;
    }
    Some(if de < dodd { even } else { odd })
}
