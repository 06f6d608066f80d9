//! Finite metric spaces and the elementary operations on them: validation,
//! the `ln(1 + d)` transform, Gromov products, closed balls, Hausdorff
//! distance and chain lengths.
//!
//! A space is either a materialized `n x n` matrix or a [`PointCloud`] whose
//! distances are evaluated on demand. Clouds with at most
//! [`MATERIALIZE_LIMIT`] points are materialized by [`FiniteMetricSpace::from_cloud`].

use std::borrow::Cow;
use std::fmt;

use crate::cloud::{MetricMode, PointCloud};
use crate::error::{Error, Result};
use crate::region::Region;

/// Largest cloud that [`FiniteMetricSpace::from_cloud`] turns into a matrix.
pub const MATERIALIZE_LIMIT: usize = 4096;

/// Absolute slack allowed on the triangle inequality by [`validate_metric`].
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
enum Store {
    Dense { n: usize, d: Vec<f64> },
    Lazy(PointCloud),
}

#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    labels: Option<Vec<String>>,
    store: Store,
    // Kept for materialized clouds so geometry code can still see coordinates.
    source: Option<PointCloud>,
}

impl FiniteMetricSpace {
    /// Builds a space from a square matrix. Only shape and finiteness are
    /// checked here; run [`validate_metric`] for the axioms.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
            d.extend_from_slice(r);
        }
        Self::from_flat(n, d)
    }

    /// Row-major `n x n` matrix.
    pub fn from_flat(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::NotSquare {
                row: 0,
                len: d.len(),
                expected: n * n,
            });
        }
        if let Some(k) = d.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / n.max(1),
                col: k % n.max(1),
            });
        }
        Ok(FiniteMetricSpace {
            labels: None,
            store: Store::Dense { n, d },
            source: None,
        })
    }

    /// Materializes the distance matrix when the cloud has at most
    /// [`MATERIALIZE_LIMIT`] points, otherwise evaluates lazily.
    pub fn from_cloud(cloud: PointCloud) -> Self {
        if cloud.len() <= MATERIALIZE_LIMIT {
            let n = cloud.len();
            let mut d = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = cloud.dist(i, j);
                    d[i * n + j] = v;
                    d[j * n + i] = v;
                }
            }
            FiniteMetricSpace {
                labels: None,
                store: Store::Dense { n, d },
                source: Some(cloud),
            }
        } else {
            Self::lazy(cloud)
        }
    }

    /// Never materializes, whatever the size.
    pub fn lazy(cloud: PointCloud) -> Self {
        FiniteMetricSpace {
            labels: None,
            store: Store::Lazy(cloud),
            source: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::param(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        match &self.store {
            Store::Dense { n, .. } => *n,
            Store::Lazy(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.store {
            Store::Dense { n, d } => d[i * n + j],
            Store::Lazy(c) => c.dist(i, j),
        }
    }

    pub fn label(&self, i: usize) -> Cow<'_, str> {
        match &self.labels {
            Some(l) => Cow::Borrowed(&l[i]),
            None => Cow::Owned(i.to_string()),
        }
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            })
        }
    }

    pub(crate) fn check_region(&self, region: &Region) -> Result<()> {
        if region.ambient_len() == self.len() {
            Ok(())
        } else {
            Err(Error::AmbientMismatch {
                region: region.ambient_len(),
                space: self.len(),
            })
        }
    }

    /// The row-major matrix, if materialized.
    pub fn matrix(&self) -> Option<&[f64]> {
        match &self.store {
            Store::Dense { d, .. } => Some(d),
            Store::Lazy(_) => None,
        }
    }

    /// The coordinates behind the space, if it came from a cloud.
    pub fn cloud(&self) -> Option<&PointCloud> {
        match &self.store {
            Store::Lazy(c) => Some(c),
            Store::Dense { .. } => self.source.as_ref(),
        }
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.store, Store::Lazy(_))
    }

    /// The full row-major matrix, materializing a lazy space.
    pub fn to_matrix(&self) -> Vec<f64> {
        match &self.store {
            Store::Dense { d, .. } => d.clone(),
            Store::Lazy(_) => {
                let n = self.len();
                let mut d = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        d[i * n + j] = self.dist(i, j);
                    }
                }
                d
            }
        }
    }

    /// `d'(x, y) = ln(1 + d(x, y))`.
    pub fn log_transform(&self) -> FiniteMetricSpace {
        let cloud_mode = self.cloud().map(|c| c.mode());
        let transformed = match (&self.store, cloud_mode) {
            (Store::Lazy(c), Some(MetricMode::Euclidean)) => {
                FiniteMetricSpace::lazy(c.clone().with_mode(MetricMode::LogEuclidean))
            }
            (Store::Dense { n, d }, mode) => FiniteMetricSpace {
                labels: None,
                store: Store::Dense {
                    n: *n,
                    d: d.iter().map(|v| v.ln_1p()).collect(),
                },
                source: match mode {
                    Some(MetricMode::Euclidean) => self
                        .source
                        .clone()
                        .map(|c| c.with_mode(MetricMode::LogEuclidean)),
                    _ => None,
                },
            },
            // A lazy cloud that is already logarithmic has no lazy form for
            // the iterated transform.
            (Store::Lazy(_), _) => {
                let n = self.len();
                let d = self.to_matrix().into_iter().map(f64::ln_1p).collect();
                FiniteMetricSpace {
                    labels: None,
                    store: Store::Dense { n, d },
                    source: None,
                }
            }
        };
        FiniteMetricSpace {
            labels: self.labels.clone(),
            ..transformed
        }
    }

    /// The subspace on `region`, with indices renumbered in member order.
    pub fn subspace(&self, region: &Region) -> FiniteMetricSpace {
        let m = region.members();
        let k = m.len();
        let mut d = vec![0.0; k * k];
        for (a, &i) in m.iter().enumerate() {
            for (b, &j) in m.iter().enumerate() {
                d[a * k + b] = self.dist(i, j);
            }
        }
        FiniteMetricSpace {
            labels: self
                .labels
                .as_ref()
                .map(|l| m.iter().map(|&i| l[i].clone()).collect()),
            store: Store::Dense { n: k, d },
            source: None,
        }
    }

    /// Every distance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<FiniteMetricSpace> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::param("scale factor must be positive and finite"));
        }
        let n = self.len();
        let d = self.to_matrix().into_iter().map(|v| v * factor).collect();
        let mut s = FiniteMetricSpace::from_flat(n, d)?;
        s.labels = self.labels.clone();
        Ok(s)
    }
}

/// Free-function form of [`FiniteMetricSpace::log_transform`].
pub fn log_transform(space: &FiniteMetricSpace) -> FiniteMetricSpace {
    space.log_transform()
}

/// The first metric axiom found broken.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonzeroDiagonal { i: usize, value: f64 },
    Negative { i: usize, j: usize, value: f64 },
    Asymmetric { i: usize, j: usize, forward: f64, backward: f64 },
    /// `d(i, j) > d(i, k) + d(k, j) + tolerance`.
    Triangle { i: usize, j: usize, k: usize, excess: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonzeroDiagonal { i, value } => write!(f, "d({i},{i}) = {value} != 0"),
            Violation::Negative { i, j, value } => write!(f, "d({i},{j}) = {value} < 0"),
            Violation::Asymmetric {
                i,
                j,
                forward,
                backward,
            } => write!(f, "symmetry fails at ({i},{j}): {forward} != {backward}"),
            Violation::Triangle { i, j, k, excess } => {
                write!(f, "triangle inequality fails at ({i},{j},{k}) by {excess}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub violation: Option<Violation>,
    /// Distinct indices at distance zero: allowed, but the space is then only
    /// a pseudometric.
    pub coincident_pairs: usize,
    pub first_coincident: Option<(usize, usize)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }

    pub fn is_pseudometric(&self) -> bool {
        self.coincident_pairs > 0
    }
}

pub fn validate_metric(space: &FiniteMetricSpace) -> ValidationReport {
    validate_metric_with(space, TRIANGLE_TOLERANCE)
}

/// Checks the axioms in order: zero diagonal, nonnegativity, symmetry,
/// triangle inequality. Cloud-backed spaces satisfy the axioms by
/// construction and only get the coincidence scan.
pub fn validate_metric_with(space: &FiniteMetricSpace, tolerance: f64) -> ValidationReport {
    let n = space.len();
    let mut report = ValidationReport {
        violation: None,
        coincident_pairs: 0,
        first_coincident: None,
    };
    let d = |i, j| space.dist(i, j);

    if space.cloud().is_none() {
        report.violation = (|| {
            for i in 0..n {
                if d(i, i) != 0.0 {
                    return Some(Violation::NonzeroDiagonal { i, value: d(i, i) });
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if d(i, j) < 0.0 {
                        return Some(Violation::Negative {
                            i,
                            j,
                            value: d(i, j),
                        });
                    }
                }
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    if d(i, j) != d(j, i) {
                        return Some(Violation::Asymmetric {
                            i,
                            j,
                            forward: d(i, j),
                            backward: d(j, i),
                        });
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let dij = d(i, j);
                    for k in 0..n {
                        let excess = dij - (d(i, k) + d(k, j));
                        if excess > tolerance {
                            return Some(Violation::Triangle { i, j, k, excess });
                        }
                    }
                }
            }
            None
        })();
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if d(i, j) == 0.0 {
                report.coincident_pairs += 1;
                report.first_coincident.get_or_insert((i, j));
            }
        }
    }
    report
}

/// `(x|y)_p = (d(x,p) + d(y,p) - d(x,y)) / 2`.
///
/// The 4-point kernel evaluates exactly this expression, so a witness
/// quadruple re-evaluated here reproduces the kernel's value bit for bit.
#[inline]
pub fn gromov_product(space: &FiniteMetricSpace, p: usize, x: usize, y: usize) -> f64 {
    gromov(space.dist(x, p), space.dist(y, p), space.dist(x, y))
}

#[inline]
pub(crate) fn gromov(dxp: f64, dyp: f64, dxy: f64) -> f64 {
    0.5 * (dxp + dyp - dxy)
}

/// Closed ball `{ y : d(c, y) <= r }`.
pub fn ball(space: &FiniteMetricSpace, c: usize, r: f64) -> Region {
    let members = (0..space.len()).filter(|&y| space.dist(c, y) <= r);
    Region::new(space.len(), members).expect("indices come from the space")
}

/// `d(x, A)`; infinite for empty `A`.
pub fn distance_to_set(space: &FiniteMetricSpace, x: usize, a: &Region) -> f64 {
    a.iter().map(|y| space.dist(x, y)).fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between two regions of the same space.
///
/// Zero for two empty sets, infinite when exactly one is empty.
pub fn hausdorff_distance(space: &FiniteMetricSpace, a: &Region, b: &Region) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => {
            let ab = directed_hausdorff(space, a, b, 0.0);
            directed_hausdorff(space, b, a, ab)
        }
    }
}

// sup_{x in a} d(x, b), starting from a known lower bound on the answer.
fn directed_hausdorff(space: &FiniteMetricSpace, a: &Region, b: &Region, floor: f64) -> f64 {
    let mut best = floor;
    for x in a.iter() {
        let mut nearest = f64::INFINITY;
        for y in b.iter() {
            let v = space.dist(x, y);
            if v < nearest {
                nearest = v;
                if nearest <= best {
                    break;
                }
            }
        }
        if nearest > best {
            best = nearest;
        }
    }
    best
}

/// A finite partition of a path: strictly increasing parameters, one point of
/// the space for each.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    params: Vec<f64>,
    points: Vec<usize>,
}

impl Chain {
    pub fn new(params: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        if params.len() != points.len() {
            return Err(Error::param(format!(
                "{} parameters for {} points",
                params.len(),
                points.len()
            )));
        }
        if params.iter().any(|t| !t.is_finite()) {
            return Err(Error::param("chain parameters must be finite"));
        }
        if params.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("chain parameters must be strictly increasing"));
        }
        Ok(Chain { params, points })
    }

    /// Parameters `0, 1, 2, ...`.
    pub fn from_points(points: Vec<usize>) -> Self {
        Chain {
            params: (0..points.len()).map(|i| i as f64).collect(),
            points,
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Inserts an extra partition point; `t` must lie strictly between two
    /// existing parameters.
    pub fn refine(&mut self, t: f64, point: usize) -> Result<()> {
        let at = self.params.partition_point(|&s| s < t);
        if at == 0 || at == self.params.len() || self.params[at] == t {
            return Err(Error::param(format!(
                "refinement parameter {t} is not interior to the chain"
            )));
        }
        self.params.insert(at, t);
        self.points.insert(at, point);
        Ok(())
    }
}

/// `sum_i d(p_{i-1}, p_i)`.
pub fn chain_length(chain: &Chain, space: &FiniteMetricSpace) -> f64 {
    chain
        .points
        .windows(2)
        .map(|w| space.dist(w[0], w[1]))
        .sum()
}
