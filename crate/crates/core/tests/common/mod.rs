//! Brute-force oracles and random inputs shared by the integration tests.
//!
//! The oracles scan every tuple, straight from the definitions,
//! and share no code with the library beyond reading distances.

#![allow(dead_code)]

use logmetric::{FiniteMetricSpace, PointCloud, Region};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gp(space: &FiniteMetricSpace, p: usize, x: usize, y: usize) -> f64 {
    0.5 * (space.dist(x, p) + space.dist(y, p) - space.dist(x, y))
}

/// Largest clamped 4-point defect over all `n^4` ordered quadruples, with
/// the first maximizer in lexicographic order. A quadruple with a repeated
/// point counts as 0, its value in any metric space.
pub fn brute_four_point(space: &FiniteMetricSpace) -> (f64, Option<[usize; 4]>) {
    let n = space.len();
    let mut best = (0.0, (n > 0).then_some([0; 4]));
    for p in 0..n {
        let (v, w) = brute_fixed_base(space, p);
        if v > best.0 {
            best = (v, w);
        }
    }
    best
}

pub fn brute_fixed_base(space: &FiniteMetricSpace, p: usize) -> (f64, Option<[usize; 4]>) {
    let n = space.len();
    let mut best = (0.0, Some([p, 0, 0, 0]));
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if distinct(&[p, x, y, z]) < 4 {
                    continue;
                }
                let v = (gp(space, p, x, z).min(gp(space, p, y, z)) - gp(space, p, x, y)).max(0.0);
                if v > best.0 {
                    best = (v, Some([p, x, y, z]));
                }
            }
        }
    }
    best
}

pub fn distinct(ix: &[usize]) -> usize {
    let mut v = ix.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Largest 4-point defect evaluated on every ordered quadruple, repeats
/// included, without clamping.
pub fn raw_four_point(space: &FiniteMetricSpace) -> f64 {
    let n = space.len();
    let mut best = f64::NEG_INFINITY;
    for p in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    best = best.max(gp(space, p, x, z).min(gp(space, p, y, z)) - gp(space, p, x, y));
                }
            }
        }
    }
    best
}

pub fn brute_ultra(space: &FiniteMetricSpace) -> (f64, Option<[usize; 3]>) {
    let n = space.len();
    let mut best = (0.0, (n > 0).then_some([0; 3]));
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let v = (space.dist(x, y) - space.dist(x, z).max(space.dist(y, z))).max(0.0);
                if v > best.0 {
                    best = (v, Some([x, y, z]));
                }
            }
        }
    }
    best
}

/// `(ecc, max inradius, min covering radius)` by scanning every pair.
pub fn brute_ecc(space: &FiniteMetricSpace, s: &Region) -> (f64, f64, f64) {
    let n = space.len();
    let inside = s.mask();
    let mut max_in = f64::NEG_INFINITY;
    let mut min_cov = f64::INFINITY;
    for c in 0..n {
        if inside[c] {
            let r = (0..n)
                .filter(|&y| !inside[y])
                .map(|y| space.dist(c, y))
                .fold(f64::INFINITY, f64::min);
            max_in = max_in.max(r);
        }
        let cov = (0..n)
            .filter(|&y| inside[y])
            .map(|y| space.dist(c, y))
            .fold(0.0, f64::max);
        min_cov = min_cov.min(cov);
    }
    ((min_cov - max_in).max(0.0), max_in, min_cov)
}

pub fn brute_hausdorff(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> f64 {
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&x| to.iter().map(|&y| space.dist(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Smallest Hausdorff distance from `s` to any ball with a realized radius.
pub fn brute_quasi_ball(space: &FiniteMetricSpace, s: &Region) -> f64 {
    let n = space.len();
    let mut best = f64::INFINITY;
    for c in 0..n {
        let mut radii: Vec<f64> = (0..n).map(|y| space.dist(c, y)).collect();
        radii.push(0.0);
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        for r in radii {
            let ball: Vec<usize> = (0..n).filter(|&y| space.dist(c, y) <= r).collect();
            best = best.min(brute_hausdorff(space, s.members(), &ball));
        }
    }
    best
}

/// Root of `exp(D) - 1 - k1 D - k2` by plain interval halving on `[0, 64]`.
pub fn halving_root(k1: f64, k2: f64) -> f64 {
    let f = |d: f64| d.exp() - 1.0 - k1 * d - k2;
    let (mut lo, mut hi) = (0.0f64, 64.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Random cloud with `n` points in `dim` dimensions, coordinates in
/// `[-scale, scale]`.
pub fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize, scale: f64) -> PointCloud {
    let coords = (0..n * dim).map(|_| rng.random_range(-scale..scale)).collect();
    PointCloud::from_flat(dim, coords).unwrap()
}

/// Shortest-path metric of a complete graph with random edge weights.
pub fn random_graph_metric(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.random_range(0.1..10.0);
            d[i * n + j] = w;
            d[j * n + i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::from_flat(n, d).unwrap()
}

/// Either a random cloud or a random graph metric.
pub fn random_space(rng: &mut ChaCha8Rng, max_n: usize) -> FiniteMetricSpace {
    let n = rng.random_range(1..=max_n);
    if rng.random_bool(0.5) {
        let dim = rng.random_range(1..=3);
        let scale = 10f64.powi(rng.random_range(-2..=3));
        FiniteMetricSpace::from_cloud(random_cloud(rng, n, dim, scale))
    } else {
        random_graph_metric(rng, n)
    }
}

pub fn random_region(rng: &mut ChaCha8Rng, n: usize) -> Region {
    let p = rng.random_range(0.1..0.9);
    Region::new(n, (0..n).filter(|_| rng.random_bool(p))).unwrap()
}

/// Shortest-path metric with integer edge weights. All sums are exact, so
/// the triangle inequality holds with no rounding.
pub fn integer_graph_metric(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = f64::from(rng.random_range(1u32..=20));
            d[i * n + j] = w;
            d[j * n + i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = d[i * n + j].min(d[i * n + k] + d[k * n + j]);
            }
        }
    }
    FiniteMetricSpace::from_flat(n, d).unwrap()
}

/// Largest pairwise distance inside `s`.
pub fn diameter(space: &FiniteMetricSpace, s: &Region) -> f64 {
    let m = s.members();
    m.iter()
        .flat_map(|&x| m.iter().map(move |&y| (x, y)))
        .map(|(x, y)| space.dist(x, y))
        .fold(0.0, f64::max)
}

/// A random two-ball intersection: centers are random points, radii are a
/// mix of realized distances and uniform draws up to the diameter.
pub fn random_ball_pair(rng: &mut ChaCha8Rng, space: &FiniteMetricSpace) -> (logmetric::BallSpec, logmetric::BallSpec) {
    let n = space.len();
    let diam = diameter(space, &Region::full(n));
    let pick = |rng: &mut ChaCha8Rng| {
        let c = rng.random_range(0..n);
        let r = if rng.random_bool(0.5) {
            space.dist(c, rng.random_range(0..n))
        } else {
            rng.random_range(0.0..=diam)
        };
        logmetric::BallSpec::new(c, r).unwrap()
    };
    (pick(rng), pick(rng))
}

/// Plane walk with unit parameter steps and Euclidean step lengths in
/// `lengths`, cut to the longest prefix that is `(l, c)`-quasi-geodesic
/// under `d'`. Two samples always survive when steps are at most
/// `e^(l + c) - 1`.
pub fn admissible_walk(
    rng: &mut ChaCha8Rng,
    samples: usize,
    lengths: std::ops::RangeInclusive<f64>,
    l: f64,
    c: f64,
) -> logmetric::PlPath {
    use logmetric::{qg_defect_path, MetricMode, PlPath};
    let mut p = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
    let mut heading: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let mut points = vec![p];
    for _ in 1..samples {
        heading += rng.random_range(-0.4..0.4);
        let len = rng.random_range(lengths.clone());
        p = [p[0] + len * heading.cos(), p[1] + len * heading.sin()];
        points.push(p);
    }
    while points.len() > 2 {
        let path = PlPath::from_points(points.clone()).unwrap();
        if qg_defect_path(&path, l, MetricMode::LogEuclidean).defect <= c {
            break;
        }
        points.pop();
    }
    PlPath::from_points(points).unwrap()
}
