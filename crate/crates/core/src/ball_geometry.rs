//! Eccentricity, quasi-ball defect and weak eccentricity of regions.
//!
//! All searches are exact over the finite space. Inner centers range over
//! the region and outer centers over the whole space; candidate radii are
//! the realized distances from a center.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{Geometry, SubsetIndex};
use crate::metric::FiniteMetricSpace;
use crate::region::Region;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BallSpec {
    pub center: usize,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(center: usize, radius: f64) -> Result<Self> {
        if radius >= 0.0 {
            Ok(BallSpec { center, radius })
        } else {
            Err(Error::param(format!("ball radius must be nonnegative, got {radius}")))
        }
    }
}

/// `ecc = max(0, outer.radius - inner.radius)`.
///
/// `inner.radius` is a supremum: every smaller ball about `inner.center` lies
/// in the region, the ball of exactly that radius may not. It is infinite
/// when the region is the whole space. Both balls are `None` for an empty
/// region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EccReport {
    pub ecc: f64,
    pub inner: Option<BallSpec>,
    pub outer: Option<BallSpec>,
}

impl EccReport {
    /// Least `delta` with `B(z, r) ⊆ S ⊆ B(z', lambda * r + delta)`.
    pub fn weak(&self, lambda: f64) -> f64 {
        match (self.inner, self.outer) {
            (Some(inner), Some(outer)) => (outer.radius - lambda * inner.radius).max(0.0),
            _ => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuasiBallReport {
    pub defect: f64,
    pub best: BallSpec,
}

pub fn intersect_balls(space: &FiniteMetricSpace, b1: BallSpec, b2: BallSpec) -> Result<Region> {
    space.check_index(b1.center)?;
    space.check_index(b2.center)?;
    let members: Vec<usize> = (0..space.len())
        .into_par_iter()
        .filter(|&i| space.dist(i, b1.center) <= b1.radius && space.dist(i, b2.center) <= b2.radius)
        .collect();
    Region::new(space.len(), members)
}

/// Distance from `c` to the complement of `s`.
pub fn inradius_at(space: &FiniteMetricSpace, c: usize, s: &Region) -> Result<f64> {
    space.check_region(s)?;
    space.check_index(c)?;
    if !s.contains(c) {
        return Err(Error::CenterOutsideRegion);
    }
    let mask = s.mask();
    Ok((0..space.len())
        .filter(|&y| !mask[y])
        .map(|y| space.dist(c, y))
        .fold(f64::INFINITY, f64::min))
}

pub fn covering_radius(space: &FiniteMetricSpace, c: usize, s: &Region) -> Result<f64> {
    space.check_region(s)?;
    space.check_index(c)?;
    if s.is_empty() {
        return Err(Error::EmptyRegion);
    }
    Ok(s.iter().map(|y| space.dist(c, y)).fold(0.0, f64::max))
}

pub fn eccentricity(space: &FiniteMetricSpace, s: &Region) -> Result<EccReport> {
    space.check_region(s)?;
    if s.is_empty() {
        return Ok(EccReport {
            ecc: 0.0,
            inner: None,
            outer: None,
        });
    }
    let geom = Geometry::new(space);
    let s_index = geom.index(s.members().to_vec(), None);
    let (c, r) = max_inradius(&geom, s);
    let (c_out, cov) = min_covering(&geom, s, &s_index);
    let inner = BallSpec {
        center: c,
        radius: geom.out(r),
    };
    let outer = BallSpec {
        center: c_out,
        radius: geom.out(cov),
    };
    Ok(EccReport {
        ecc: (outer.radius - inner.radius).max(0.0),
        inner: Some(inner),
        outer: Some(outer),
    })
}

pub fn weak_ecc_defect(space: &FiniteMetricSpace, s: &Region, lambda: f64) -> Result<f64> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be a finite number >= 1, got {lambda}")));
    }
    Ok(eccentricity(space, s)?.weak(lambda))
}

/// Shared running extremum of nonnegative values; the bit patterns of
/// nonnegative floats order like the floats.
struct Shared(AtomicU64);

impl Shared {
    fn new(v: f64) -> Self {
        Shared(AtomicU64::new((v + 0.0).to_bits()))
    }

    fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    fn raise(&self, v: f64) {
        self.0.fetch_max((v + 0.0).to_bits(), Ordering::Relaxed);
    }

    fn lower(&self, v: f64) {
        self.0.fetch_min((v + 0.0).to_bits(), Ordering::Relaxed);
    }
}

fn smaller(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

fn larger(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

// A query cut short by the shared bound returns a value strictly worse than
// the final extremum, so it never wins the reduction and the result does not
// depend on scheduling.

/// Center of `s` with the largest inradius, in working units.
fn max_inradius(geom: &Geometry<'_>, s: &Region) -> (usize, f64) {
    let complement = geom.index(s.complement().members().to_vec(), None);
    let best = Shared::new(0.0);
    s.members()
        .par_iter()
        .map(|&c| {
            let v = complement.nearest(c, best.get());
            best.raise(v);
            (c, v)
        })
        .reduce(|| (usize::MAX, f64::NEG_INFINITY), larger)
}

/// Point of the space with the smallest covering radius of `s`.
fn min_covering(geom: &Geometry<'_>, s: &Region, s_index: &SubsetIndex<'_>) -> (usize, f64) {
    let seed = s.members()[s.len() / 2];
    let best = Shared::new(s_index.farthest(seed, f64::INFINITY));
    (0..geom.len())
        .into_par_iter()
        .map(|c| {
            let v = s_index.farthest(c, best.get());
            best.lower(v);
            (c, v)
        })
        .reduce(|| (usize::MAX, f64::INFINITY), smaller)
}

/// The largest threshold whose ball, in the space's own units, is the ball
/// of radius `out(v)`.
fn widen(geom: &Geometry<'_>, v: f64) -> f64 {
    let target = geom.out(v);
    let mut t = v;
    loop {
        let next = f64::from_bits(t.to_bits() + 1);
        if geom.out(next) == target {
            t = next;
        } else {
            return t;
        }
    }
}

struct QuasiBall<'a> {
    geom: Geometry<'a>,
    members: &'a [usize],
    /// All points, weighted by their distance to the region.
    points: SubsetIndex<'a>,
}

impl QuasiBall<'_> {
    /// Members with their distance to `c`, farthest first.
    fn by_distance(&self, c: usize) -> Vec<(f64, usize)> {
        let mut order: Vec<(f64, usize)> = self.members.iter().map(|&s| (self.geom.w(c, s), s)).collect();
        order.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        order
    }

    /// `max_{s in S} d(s, B(c, t))`; nonincreasing in `t`.
    fn region_excess(&self, c: usize, t: f64, order: &[(f64, usize)]) -> f64 {
        let mut worst = 0.0;
        for &(dcs, s) in order {
            // d(s, B) <= d(s, c), and `order` is sorted by d(s, c).
            if dcs <= t || dcs <= worst {
                break;
            }
            let v = self.points.nearest_within(s, c, t, worst);
            if v > worst {
                worst = v;
            }
        }
        worst
    }

    /// `max_{y in B(c, t)} d(y, S)`; nondecreasing in `t`.
    fn ball_excess(&self, c: usize, t: f64) -> f64 {
        self.points.max_weight_within(c, t)
    }

    /// Smallest Hausdorff distance over the thresholds `ts` (ascending) and
    /// the threshold attaining it.
    fn best_radius(&self, c: usize, ts: &[f64]) -> Option<(f64, f64)> {
        if ts.is_empty() {
            return None;
        }
        let order = self.by_distance(c);
        let eval = |k: usize| (self.region_excess(c, ts[k], &order), self.ball_excess(c, ts[k]));
        // First threshold where the ball side dominates.
        let (mut lo, mut hi) = (0, ts.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let (e1, e2) = eval(mid);
            if e2 >= e1 {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let after = (lo < ts.len()).then(|| {
            let (e1, e2) = eval(lo);
            (e1.max(e2), ts[lo])
        });
        let before = (lo > 0).then(|| {
            let (e1, e2) = eval(lo - 1);
            (e1.max(e2), ts[lo - 1])
        });
        match (before, after) {
            (Some(b), Some(a)) => Some(if a.0 < b.0 { a } else { b }),
            (b, a) => b.or(a),
        }
    }

    fn thresholds(&self, c: usize, lo: f64, hi: f64) -> Vec<f64> {
        let mut ts = self.points.distances_between(c, lo, hi);
        for t in &mut ts {
            *t = widen(&self.geom, *t);
        }
        ts.sort_unstable_by(f64::total_cmp);
        ts.dedup();
        ts
    }
}

/// Smallest Hausdorff distance from `s` to a closed ball of the space.
///
/// A first bound `D` comes from the center of the smallest enclosing ball.
/// A center `c` can only beat `D` with a radius `r` satisfying
/// `r >= covrad(c) - D` (otherwise the farthest member is too far from the
/// ball) and `r < dist(c, F)`, where `F` holds the points farther than `D`
/// from `s`. Centers whose window is empty are skipped, and within a window
/// the Hausdorff distance is the maximum of a nonincreasing and a
/// nondecreasing function of `r`, found by bisection.
pub fn quasi_ball_defect(space: &FiniteMetricSpace, s: &Region) -> Result<QuasiBallReport> {
    space.check_region(s)?;
    if s.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let n = space.len();
    let geom = Geometry::new(space);
    let s_index = geom.index(s.members().to_vec(), None);
    let mask = s.mask();
    let to_region: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|y| if mask[y] { 0.0 } else { s_index.nearest(y, f64::NEG_INFINITY) })
        .collect();
    let qb = QuasiBall {
        geom,
        members: s.members(),
        points: geom.index((0..n).collect(), Some(to_region.clone())),
    };

    let (c0, _) = min_covering(&geom, s, &s_index);
    let (d0, t0) = qb
        .best_radius(c0, &qb.thresholds(c0, 0.0, f64::INFINITY))
        .expect("every center has a realized radius");

    let far = geom.index((0..n).filter(|&y| to_region[y] > d0).collect(), None);
    let best = (0..n)
        .into_par_iter()
        .filter_map(|c| {
            if to_region[c] > d0 {
                return None;
            }
            let gap = far.nearest(c, f64::NEG_INFINITY);
            let limit = gap + d0 + 1e-9 * (1.0 + gap + d0);
            let cov = s_index.farthest(c, limit);
            if cov > limit {
                return None;
            }
            let lo = cov - d0 - 1e-9 * (1.0 + cov);
            qb.best_radius(c, &qb.thresholds(c, lo, gap))
                .map(|(h, t)| (c, h, t))
        })
        .reduce(
            || (c0, d0, t0),
            |a, b| {
                if (b.1, b.0, b.2) < (a.1, a.0, a.2) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(QuasiBallReport {
        defect: geom.out(best.1),
        best: BallSpec {
            center: best.0,
            radius: geom.out(best.2),
        },
    })
}
