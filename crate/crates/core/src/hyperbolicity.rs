//! Exact 4-point and ultrametric defects of a finite metric space.
//!
//! The 4-point defect is the least `delta >= 0` with
//! `(x|y)_p >= min((x|z)_p, (y|z)_p) - delta` for every ordered quadruple.
//! The ultrametric defect is the least `delta >= 0` with
//! `d(x,y) <= max(d(x,z), d(y,z)) + delta` for every ordered triple.
//!
//! In a metric space a quadruple (triple) with a repeated point has defect
//! at most zero, so the kernels only visit pairwise-distinct points and
//! report `0` with the all-zeros witness when nothing positive turns up.
//! Validated inputs are treated as metrics even when rounding breaks a
//! triangle by an ulp; there a repeated-point quadruple evaluated in
//! floating point can come out at `1e-16`, and it is still not counted.
//!
//! Both kernels scan basepoints (first points) independently and
//! reduce with "largest value, then smallest index", which yields the
//! lexicographically smallest maximizer whatever the thread count.

use std::borrow::Cow;

use rayon::prelude::*;
use serde::Serialize;

use crate::metric::{gromov, FiniteMetricSpace};

/// Largest space on which the CLI and the grid experiment run the full
/// quartic scan without being forced.
pub const FULL_SCAN_CAP: usize = 400;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaReport {
    pub delta: f64,
    /// `(p, x, y, z)`; `None` only for the empty space.
    pub witness: Option<[usize; 4]>,
    /// Ordered quadruples covered by the scan (`n^4`, or `n^3` with a fixed
    /// basepoint).
    pub quadruples_scanned: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UltraReport {
    pub delta_u: f64,
    /// `(x, y, z)`; `None` only for the empty space.
    pub witness: Option<[usize; 3]>,
}

/// Unclamped defect `min((x|z)_p, (y|z)_p) - (x|y)_p` of one quadruple.
pub fn four_point_defect(space: &FiniteMetricSpace, p: usize, x: usize, y: usize, z: usize) -> f64 {
    let g = |a, b| gromov(space.dist(a, p), space.dist(b, p), space.dist(a, b));
    g(x, z).min(g(y, z)) - g(x, y)
}

/// Unclamped defect `d(x,y) - max(d(x,z), d(y,z))` of one triple.
pub fn ultrametric_defect(space: &FiniteMetricSpace, x: usize, y: usize, z: usize) -> f64 {
    space.dist(x, y) - space.dist(x, z).max(space.dist(y, z))
}

fn matrix(space: &FiniteMetricSpace) -> Cow<'_, [f64]> {
    match space.matrix() {
        Some(m) => Cow::Borrowed(m),
        None => Cow::Owned(space.to_matrix()),
    }
}

pub fn four_point_delta(space: &FiniteMetricSpace) -> DeltaReport {
    let n = space.len();
    let d = matrix(space);
    let best = (0..n)
        .into_par_iter()
        .map_init(
            || BaseScratch::new(n),
            |scratch, p| scratch.scan(&d, n, p),
        )
        .collect::<Vec<_>>();
    let (delta, witness) = reduce(best);
    DeltaReport {
        delta,
        witness: witness.or((n > 0).then_some([0; 4])),
        quadruples_scanned: (n as u64).pow(4),
    }
}

/// The defect with the basepoint pinned to `p`. Never exceeds
/// [`four_point_delta`].
///
/// # Panics
///
/// If `p` is not a point of the space.
pub fn four_point_delta_fixed_base(space: &FiniteMetricSpace, p: usize) -> DeltaReport {
    let n = space.len();
    assert!(p < n, "basepoint {p} out of range for {n} points");
    let d = matrix(space);
    let (delta, witness) = BaseScratch::new(n).scan(&d, n, p);
    DeltaReport {
        delta,
        witness: witness.or(Some([p, 0, 0, 0])),
        quadruples_scanned: (n as u64).pow(3),
    }
}

fn reduce<const K: usize>(per_base: Vec<(f64, Option<[usize; K]>)>) -> (f64, Option<[usize; K]>) {
    per_base
        .into_iter()
        .fold((0.0, None), |acc, cur| if cur.0 > acc.0 { cur } else { acc })
}

struct BaseScratch {
    gromov: Vec<f64>,
    row_max: Vec<f64>,
}

impl BaseScratch {
    fn new(n: usize) -> Self {
        BaseScratch {
            gromov: vec![0.0; n * n],
            row_max: vec![0.0; n],
        }
    }

    /// Largest positive defect with basepoint `p`, and its lexicographically
    /// smallest witness.
    fn scan(&mut self, d: &[f64], n: usize, p: usize) -> (f64, Option<[usize; 4]>) {
        let dp: Vec<f64> = (0..n).map(|x| d[x * n + p]).collect();
        let g = &mut self.gromov;
        for x in 0..n {
            for z in x..n {
                let v = gromov(dp[x], dp[z], d[x * n + z]);
                g[x * n + z] = v;
                g[z * n + x] = v;
            }
        }
        for x in 0..n {
            let row = &g[x * n..(x + 1) * n];
            self.row_max[x] = row
                .iter()
                .enumerate()
                .filter(|&(z, _)| z != x && z != p)
                .map(|(_, &v)| v)
                .fold(f64::NEG_INFINITY, f64::max);
        }

        let mut best = 0.0;
        let mut witness = None;
        for x in 0..n {
            if x == p {
                continue;
            }
            let gx = &g[x * n..(x + 1) * n];
            for y in (x + 1)..n {
                if y == p {
                    continue;
                }
                let gxy = gx[y];
                // Any z gives at most min(row_max) - gxy.
                if self.row_max[x].min(self.row_max[y]) - gxy <= best {
                    continue;
                }
                let gy = &g[y * n..(y + 1) * n];
                let mut skip = [p, x, y];
                skip.sort_unstable();
                let mut top = f64::NEG_INFINITY;
                let mut from = 0;
                for &s in skip.iter().chain(std::iter::once(&n)) {
                    top = gx[from..s]
                        .iter()
                        .zip(&gy[from..s])
                        .fold(top, |m, (&a, &b)| m.max(a.min(b)));
                    from = s + 1;
                }
                let v = top - gxy;
                if v > best {
                    let z = (0..n)
                        .find(|&z| z != p && z != x && z != y && gx[z].min(gy[z]) - gxy == v)
                        .expect("maximizer exists");
                    best = v;
                    witness = Some([p, x, y, z]);
                }
            }
        }
        (best, witness)
    }
}

pub fn ultrametric_delta(space: &FiniteMetricSpace) -> UltraReport {
    let n = space.len();
    let d = matrix(space);
    let per_x = (0..n)
        .into_par_iter()
        .map(|x| ultra_scan_row(&d, n, x))
        .collect::<Vec<_>>();
    let (delta_u, witness) = reduce(per_x);
    UltraReport {
        delta_u,
        witness: witness.or((n > 0).then_some([0; 3])),
    }
}

fn ultra_scan_row(d: &[f64], n: usize, x: usize) -> (f64, Option<[usize; 3]>) {
    let dx = &d[x * n..(x + 1) * n];
    let mut best = 0.0;
    let mut witness = None;
    for y in (x + 1)..n {
        let dxy = dx[y];
        if dxy <= best {
            continue;
        }
        let dy = &d[y * n..(y + 1) * n];
        // The pair beats `best` only if some z has max(d(x,z), d(y,z)) < dxy - best.
        let cutoff = dxy - best;
        let mut low = f64::INFINITY;
        let mut arg = usize::MAX;
        for z in 0..n {
            if z == x || z == y {
                continue;
            }
            let m = dx[z].max(dy[z]);
            if m < low {
                low = m;
                arg = z;
            }
        }
        if low < cutoff {
            let v = dxy - low;
            if v > best {
                // `arg` is the first z reaching the minimum; the defect is
                // monotone in the minimum, so it is also the first maximizer.
                best = v;
                witness = Some([x, y, arg]);
            }
        }
    }
    (best, witness)
}
