//! Quasi-geodesic defects, lengths of piecewise-linear plane paths under `d`
//! and `d'`, the non-quasi-geodesic horizon, and the taming of sampled plane
//! quasi-geodesics into continuous piecewise-linear ones.

use serde::Serialize;

use crate::cloud::{euclidean, MetricMode};
use crate::error::{Error, Result};
use crate::metric::{Chain, FiniteMetricSpace};

/// Stopping tolerance for the `d'` length refinement.
pub const DEFAULT_REFINE_TOL: f64 = 1e-6;

/// Parameter spacing of the taming probes.
pub const DEFAULT_PROBE_SPACING: f64 = 0.1;

/// Slack on every inequality checked by [`tame`].
pub const TAME_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QgParams {
    l: f64,
    c: f64,
}

impl QgParams {
    pub fn new(l: f64, c: f64) -> Result<Self> {
        if !(l >= 1.0 && l.is_finite()) {
            return Err(Error::param(format!("L must be a finite number >= 1, got {l}")));
        }
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::param(format!("C must be a finite number >= 0, got {c}")));
        }
        Ok(QgParams { l, c })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn tame_constants(&self) -> TameConstants {
        TameConstants::new(*self)
    }
}

/// `c_prime = 3(L + C)`, `k1 = L(L + C)`, `k2 = (L c_prime + 4)(L + C)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TameConstants {
    pub c_prime: f64,
    pub k1: f64,
    pub k2: f64,
}

impl TameConstants {
    pub fn new(p: QgParams) -> Self {
        let s = p.l + p.c;
        let c_prime = 3.0 * s;
        TameConstants {
            c_prime,
            k1: p.l * s,
            k2: (p.l * c_prime + 4.0) * s,
        }
    }
}

/// A piecewise-linear path in the plane: breakpoint `i` sits at parameter
/// `params[i]`, and the path is linear in between.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlPath {
    params: Vec<f64>,
    points: Vec<[f64; 2]>,
}

impl PlPath {
    pub fn new(params: Vec<f64>, points: Vec<[f64; 2]>) -> Result<Self> {
        if params.len() != points.len() {
            return Err(Error::param(format!(
                "{} parameters for {} points",
                params.len(),
                points.len()
            )));
        }
        if params.is_empty() {
            return Err(Error::param("a path needs at least one point"));
        }
        if let Some(i) = params.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        if let Some(i) = points.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(Error::NonFinite { row: i, col: 1 });
        }
        if let Some(i) = params.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::param(format!(
                "path parameters must increase strictly: {} then {}",
                params[i],
                params[i + 1]
            )));
        }
        Ok(PlPath { params, points })
    }

    /// Breakpoints at parameters `0, 1, 2, ...`.
    pub fn from_points(points: Vec<[f64; 2]>) -> Result<Self> {
        Self::new((0..points.len()).map(|i| i as f64).collect(), points)
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.params[0]
    }

    pub fn end(&self) -> f64 {
        self.params[self.params.len() - 1]
    }

    /// The point at parameter `t`. Breakpoint parameters return the stored
    /// breakpoint exactly.
    pub fn at(&self, t: f64) -> Result<[f64; 2]> {
        if !(t >= self.start() && t <= self.end()) {
            return Err(Error::param(format!(
                "parameter {t} outside [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        let i = self.params.partition_point(|&s| s <= t) - 1;
        if self.params[i] == t || i + 1 == self.len() {
            return Ok(self.points[i]);
        }
        let f = (t - self.params[i]) / (self.params[i + 1] - self.params[i]);
        let (p, q) = (self.points[i], self.points[i + 1]);
        Ok([p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])])
    }

    /// Euclidean lengths of the segments.
    pub fn segment_lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.windows(2).map(|w| euclidean(&w[0], &w[1]))
    }
}

fn plane_dist(a: &[f64; 2], b: &[f64; 2], mode: MetricMode) -> f64 {
    mode.apply(euclidean(a, b))
}

/// Smallest `C` making the samples `(L, C)`-quasi-geodesic, with the pair of
/// sample indices that forces it (`None` when the defect is zero).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QgDefect {
    pub defect: f64,
    pub worst: Option<(usize, usize)>,
}

fn pair_defect(gap: f64, d: f64, l: f64) -> f64 {
    (gap / l - d).max(d - l * gap).max(0.0)
}

fn qg_defect_by(n: usize, l: f64, param: impl Fn(usize) -> f64, dist: impl Fn(usize, usize) -> f64) -> QgDefect {
    let mut best = QgDefect {
        defect: 0.0,
        worst: None,
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let v = pair_defect(param(j) - param(i), dist(i, j), l);
            if v > best.defect {
                best = QgDefect {
                    defect: v,
                    worst: Some((i, j)),
                };
            }
        }
    }
    best
}

/// Quasi-geodesic defect of a chain, over all pairs of its points.
pub fn qg_defect(chain: &Chain, space: &FiniteMetricSpace, l: f64) -> QgDefect {
    let (t, p) = (chain.params(), chain.points());
    qg_defect_by(chain.len(), l, |i| t[i], |i, j| space.dist(p[i], p[j]))
}

/// Quasi-geodesic defect of a plane path, over all pairs of breakpoints.
pub fn qg_defect_path(path: &PlPath, l: f64, mode: MetricMode) -> QgDefect {
    let (t, p) = (path.params(), path.points());
    qg_defect_by(path.len(), l, |i| t[i], |i, j| plane_dist(&p[i], &p[j], mode))
}

/// `2^j ln(1 + len / 2^j)` for `j = 0, 1, ..., depth`: the `d'` lengths of
/// a straight segment of Euclidean length `len` cut into `2^j` equal pieces.
pub fn dprime_refinement_sequence(len: f64, depth: u32) -> Vec<f64> {
    (0..=depth)
        .map(|j| {
            let k = f64::from(2u32.pow(j.min(31)));
            k * (len / k).ln_1p()
        })
        .collect()
}

/// `d'` length of a straight segment: dyadic refinement until successive
/// values differ by less than `tol`. Never exceeds `len`.
pub fn segment_length_dprime(len: f64, tol: f64) -> f64 {
    let mut k = 1.0;
    let mut prev = len.ln_1p();
    for _ in 0..1100 {
        k *= 2.0;
        let next = k * (len / k).ln_1p();
        if (next - prev).abs() < tol || !next.is_finite() {
            return next.min(len);
        }
        prev = next;
    }
    prev.min(len)
}

/// Length of a plane path: exact under `d`; under `d'` the sum of refined
/// segment lengths.
pub fn pl_length(path: &PlPath, mode: MetricMode, tol: f64) -> f64 {
    path.segment_lengths()
        .map(|len| match mode {
            MetricMode::Euclidean => len,
            MetricMode::LogEuclidean => segment_length_dprime(len, tol),
        })
        .sum()
}

/// Root of `exp(D) - 1 = k1 D + k2`: beyond it, the exponential lower bound
/// on the length of a path beats the tamed chord-arc bound.
///
/// Returns the right end of the final bisection bracket, so
/// `exp(D) - 1 > k1 D + k2` at the returned value.
pub fn horizon(params: QgParams) -> f64 {
    let k = params.tame_constants();
    let g = |d: f64| d.exp_m1() - k.k1 * d - k.k2;
    let mut lo = 0.0;
    let mut hi = (100.0 * k.k1 + k.k2 + 1.0).ln().max(10.0);
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Outcome of the four checks made on a tamed path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TameReport {
    pub constants: TameConstants,
    pub probe_spacing: f64,
    pub probes: usize,
    /// (1) The endpoints are unchanged.
    pub endpoints_preserved: bool,
    /// (2) Quasi-geodesic defect of the output under `d'` at the probes,
    /// against `c_prime`.
    pub qg_defect: f64,
    pub qg_ok: bool,
    /// (3) Largest `l'(t, t') - k1 d'(t, t') - k2` over probe pairs.
    pub arc_excess: f64,
    pub arc_worst: Option<(f64, f64)>,
    pub arc_ok: bool,
    /// The same with the Euclidean arc length `l` in place of `l'`.
    pub arc_excess_d: f64,
    /// (4) `d'` Hausdorff distance between the input and output polylines,
    /// against `L + C`.
    pub hausdorff: f64,
    pub hausdorff_ok: bool,
}

impl TameReport {
    pub fn passed(&self) -> bool {
        self.endpoints_preserved && self.qg_ok && self.arc_ok && self.hausdorff_ok
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tamed {
    pub path: PlPath,
    pub report: TameReport,
}

/// Replaces samples of a plane quasi-geodesic by the piecewise-linear path
/// through its values on `{a, b}` and the integers between them, and checks
/// the result on a parameter probe of the given spacing plus every
/// breakpoint.
///
/// `samples` must contain those parameters; further samples are allowed.
/// Admissibility is `(L, C)`-quasi-geodesicity under `d'` on all samples.
/// The input image is the polyline through all samples, and the Hausdorff
/// check compares it with the output on the probe parameters.
pub fn tame(samples: &PlPath, params: QgParams, probe_spacing: f64, tol: f64) -> Result<Tamed> {
    if !(probe_spacing > 0.0 && probe_spacing.is_finite()) {
        return Err(Error::param(format!("probe spacing must be positive, got {probe_spacing}")));
    }
    let (a, b) = (samples.start(), samples.end());
    let mut sigma = vec![0];
    let mut m = a.floor() + 1.0;
    while m < b {
        let i = samples
            .params()
            .binary_search_by(|t| t.total_cmp(&m))
            .map_err(|_| Error::MissingSample(m))?;
        sigma.push(i);
        m += 1.0;
    }
    if samples.len() > 1 {
        sigma.push(samples.len() - 1);
    }

    let admissible = qg_defect_path(samples, params.l, MetricMode::LogEuclidean);
    if admissible.defect > params.c + tol {
        let (i, j) = admissible.worst.expect("positive defect has a witness");
        return Err(Error::NotQuasiGeodesic {
            l: params.l,
            c: params.c,
            a: samples.params()[i],
            b: samples.params()[j],
            needed: admissible.defect,
        });
    }

    let path = PlPath::new(
        sigma.iter().map(|&i| samples.params()[i]).collect(),
        sigma.iter().map(|&i| samples.points()[i]).collect(),
    )?;
    let k = params.tame_constants();

    let mut ts: Vec<f64> = samples.params().to_vec();
    let steps = ((b - a) / probe_spacing).floor() as usize;
    ts.extend((1..=steps).map(|s| a + s as f64 * probe_spacing).filter(|&t| t < b));
    ts.sort_unstable_by(f64::total_cmp);
    ts.dedup();
    let probes = PlPath::new(ts.clone(), ts.iter().map(|&t| path.at(t)).collect::<Result<_>>()?)?;
    let pts = probes.points();

    let endpoints_preserved =
        path.points()[0] == samples.points()[0] && path.points()[path.len() - 1] == samples.points()[samples.len() - 1];

    let qg = qg_defect_path(&probes, params.l, MetricMode::LogEuclidean).defect;

    // Consecutive probes lie on one straight piece of the output.
    let mut arc = vec![0.0];
    let mut arc_d = vec![0.0];
    for w in pts.windows(2) {
        let len = euclidean(&w[0], &w[1]);
        arc.push(arc[arc.len() - 1] + segment_length_dprime(len, DEFAULT_REFINE_TOL));
        arc_d.push(arc_d[arc_d.len() - 1] + len);
    }
    let mut arc_excess = f64::NEG_INFINITY;
    let mut arc_excess_d = f64::NEG_INFINITY;
    let mut arc_worst = None;
    for i in 0..pts.len() {
        for j in i..pts.len() {
            let bound = k.k1 * plane_dist(&pts[i], &pts[j], MetricMode::LogEuclidean) + k.k2;
            let v = arc[j] - arc[i] - bound;
            if v > arc_excess {
                arc_excess = v;
                arc_worst = Some((ts[i], ts[j]));
            }
            arc_excess_d = arc_excess_d.max(arc_d[j] - arc_d[i] - bound);
        }
    }

    let input: Vec<[f64; 2]> = ts.iter().map(|&t| samples.at(t)).collect::<Result<_>>()?;
    let hausdorff = directed_to_polyline(&input, path.points())
        .max(directed_to_polyline(pts, samples.points()))
        .ln_1p();

    let report = TameReport {
        constants: k,
        probe_spacing,
        probes: pts.len(),
        endpoints_preserved,
        qg_defect: qg,
        qg_ok: qg <= k.c_prime + tol,
        arc_excess,
        arc_worst,
        arc_ok: arc_excess <= tol,
        arc_excess_d,
        hausdorff,
        hausdorff_ok: hausdorff <= params.l + params.c + tol,
    };
    Ok(Tamed { path, report })
}

/// Largest Euclidean distance from a probe point to the polyline.
fn directed_to_polyline(probes: &[[f64; 2]], polyline: &[[f64; 2]]) -> f64 {
    probes
        .iter()
        .map(|p| {
            polyline
                .windows(2)
                .map(|w| point_segment(p, &w[0], &w[1]))
                .fold(euclidean(p, &polyline[0]), f64::min)
        })
        .fold(0.0, f64::max)
}

/// Euclidean distance from `p` to the segment `[a, b]`.
fn point_segment(p: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let (vx, vy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = vx * vx + vy * vy;
    if len2 == 0.0 {
        return euclidean(p, a);
    }
    let f = (((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / len2).clamp(0.0, 1.0);
    euclidean(p, &[a[0] + f * vx, a[1] + f * vy])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::PointCloud;

    fn segment(n: usize) -> PlPath {
        PlPath::from_points((0..=n).map(|i| [i as f64, 0.0]).collect()).unwrap()
    }

    #[test]
    fn constants() {
        let k = QgParams::new(1.0, 0.0).unwrap().tame_constants();
        assert_eq!((k.c_prime, k.k1, k.k2), (3.0, 1.0, 7.0));
        let k = QgParams::new(2.0, 1.0).unwrap().tame_constants();
        assert_eq!((k.c_prime, k.k1, k.k2), (9.0, 6.0, 66.0));
        assert!(QgParams::new(0.5, 0.0).is_err());
        assert!(QgParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn qg_defect_of_segments() {
        let s = segment(10);
        assert_eq!(qg_defect_path(&s, 1.0, MetricMode::Euclidean).defect, 0.0);
        let log = qg_defect_path(&s, 1.0, MetricMode::LogEuclidean);
        assert!((log.defect - (10.0 - 11f64.ln())).abs() < 1e-12);
        assert_eq!(log.worst, Some((0, 10)));

        let pts: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64]).collect();
        let space = FiniteMetricSpace::from_cloud(PointCloud::new(1, &pts).unwrap());
        let chain = Chain::from_points((0..=10).collect());
        assert_eq!(qg_defect(&chain, &space, 1.0).defect, 0.0);
        let chain_log = qg_defect(&chain, &space.log_transform(), 1.0);
        assert!((chain_log.defect - 7.602).abs() < 1e-3);

        let mut prev = f64::INFINITY;
        for l in [1.0, 1.5, 2.0, 4.0, 100.0] {
            let d = qg_defect_path(&s, l, MetricMode::LogEuclidean).defect;
            assert!(d <= prev);
            prev = d;
        }
    }

    #[test]
    fn path_evaluation() {
        let p = PlPath::new(vec![0.0, 2.0, 3.0], vec![[0.0, 0.0], [2.0, 0.0], [2.0, 5.0]]).unwrap();
        assert_eq!(p.at(1.0).unwrap(), [1.0, 0.0]);
        assert_eq!(p.at(3.0).unwrap(), [2.0, 5.0]);
        assert_eq!(p.at(2.5).unwrap(), [2.0, 2.5]);
        assert!(p.at(3.5).is_err());
        assert!(PlPath::new(vec![0.0, 0.0], vec![[0.0, 0.0]; 2]).is_err());
    }

    #[test]
    fn lengths() {
        let seg = PlPath::from_points(vec![[0.0, 0.0], [10.0, 0.0]]).unwrap();
        assert_eq!(pl_length(&seg, MetricMode::Euclidean, DEFAULT_REFINE_TOL), 10.0);
        let lp = pl_length(&seg, MetricMode::LogEuclidean, DEFAULT_REFINE_TOL);
        assert!((10.0 - 1e-3..=10.0).contains(&lp), "{lp}");

        let point = PlPath::from_points(vec![[1.0, 1.0]]).unwrap();
        assert_eq!(pl_length(&point, MetricMode::LogEuclidean, DEFAULT_REFINE_TOL), 0.0);

        let corner = PlPath::from_points(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        assert_eq!(pl_length(&corner, MetricMode::Euclidean, DEFAULT_REFINE_TOL), 2.0);
        let lp = pl_length(&corner, MetricMode::LogEuclidean, DEFAULT_REFINE_TOL);
        assert!((2.0 - lp).abs() < 1e-5);

        let seq = dprime_refinement_sequence(10.0, 30);
        assert!(seq.windows(2).all(|w| w[0] <= w[1]));
        assert!(seq.iter().all(|&v| v <= 10.0));
    }

    #[test]
    fn horizon_values() {
        let d = horizon(QgParams::new(1.0, 0.0).unwrap());
        assert!((d - 2.3356).abs() < 1e-3, "{d}");
        assert!(d.exp_m1() > d + 7.0);
        assert!((d - 1e-9).exp_m1() < d - 1e-9 + 7.0);
        assert!(horizon(QgParams::new(1.0, 1.0).unwrap()) > d);
    }

    #[test]
    fn tame_unit_speed_segment_is_unchanged() {
        let s = segment(12);
        let t = tame(&s, QgParams::new(1.0, 0.0).unwrap(), DEFAULT_PROBE_SPACING, TAME_TOLERANCE);
        // A unit-speed segment in d' has defect 12 - ln 13 > 0 for L = 1.
        assert!(matches!(t, Err(Error::NotQuasiGeodesic { .. })));

        let short = segment(3);
        let p = QgParams::new(1.0, 3.0).unwrap();
        let t = tame(&short, p, DEFAULT_PROBE_SPACING, TAME_TOLERANCE).unwrap();
        assert_eq!(t.path, short);
        assert!(t.report.passed(), "{:?}", t.report);
        assert_eq!(t.report.hausdorff, 0.0);
    }

    #[test]
    fn tame_needs_integer_samples() {
        let p = PlPath::new(vec![0.5, 2.5], vec![[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let r = tame(&p, QgParams::new(2.0, 1.0).unwrap(), 0.1, TAME_TOLERANCE);
        assert!(matches!(r, Err(Error::MissingSample(m)) if m == 1.0));
    }

    #[test]
    fn single_segment_input() {
        let p = PlPath::new(vec![0.25, 0.75], vec![[0.0, 0.0], [0.3, 0.4]]).unwrap();
        let t = tame(&p, QgParams::new(2.0, 1.0).unwrap(), 0.1, TAME_TOLERANCE).unwrap();
        assert_eq!(t.path, p);
        assert_eq!(t.report.hausdorff, 0.0);
        assert!(t.report.passed());
    }

    /// Admissible samples whose tamed path is much longer than the chord-arc
    /// bound allows: nine consecutive vertices of a regular 12-gon with side
    /// 19, each step just inside `d' <= L + C = 3`.
    #[test]
    fn long_steps_break_the_arc_bound() {
        let side = 19.0;
        let radius = side / (2.0 * (std::f64::consts::PI / 12.0).sin());
        let pts: Vec<[f64; 2]> = (0..9)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / 12.0;
                [radius * a.cos(), radius * a.sin()]
            })
            .collect();
        let p = PlPath::from_points(pts).unwrap();
        let params = QgParams::new(2.0, 1.0).unwrap();
        let t = tame(&p, params, 0.1, TAME_TOLERANCE).unwrap();
        assert!(t.report.endpoints_preserved && t.report.qg_ok && t.report.hausdorff_ok);
        assert!(!t.report.arc_ok);
        // l' of the whole path is ~152; 6 d'(ends) + 66 is ~91.
        assert!(t.report.arc_excess > 50.0, "{:?}", t.report);
    }
}
