//! Euclidean point clouds, optionally viewed through `ln(1 + d)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a [`PointCloud`] turns coordinates into distances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricMode {
    #[default]
    Euclidean,
    /// `ln(1 + |x - y|)`.
    LogEuclidean,
}

impl MetricMode {
    /// Maps a Euclidean length to a length in this mode. Nondecreasing.
    #[inline]
    pub fn apply(self, euclidean: f64) -> f64 {
        match self {
            MetricMode::Euclidean => euclidean,
            MetricMode::LogEuclidean => euclidean.ln_1p(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricMode::Euclidean => "euclidean",
            MetricMode::LogEuclidean => "log-euclidean",
        }
    }
}

impl std::str::FromStr for MetricMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "d" => Ok(MetricMode::Euclidean),
            "log-euclidean" | "log" | "dprime" => Ok(MetricMode::LogEuclidean),
            other => Err(Error::param(format!("unknown metric mode `{other}`"))),
        }
    }
}

/// Points in `R^dim`, stored row-major.
///
/// Stored coordinates are divided by `scale` to give true coordinates.
/// Lattice clouds keep integer coordinates with `scale = k`, which makes
/// every squared difference exact and every distance `sqrt(N) / k` a
/// correctly rounded, nondecreasing function of the integer `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    scale: f64,
    mode: MetricMode,
}

/// Largest lattice coordinate magnitude; keeps squared sums below `2^53`.
const LATTICE_LIMIT: i64 = 1 << 22;

impl PointCloud {
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(dim * points.len());
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    got: p.len(),
                    expected: dim,
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// `coords.len()` must be a multiple of `dim`.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("point dimension must be positive"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                index: coords.len() / dim,
                got: coords.len() % dim,
                expected: dim,
            });
        }
        if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        Ok(PointCloud {
            dim,
            coords,
            scale: 1.0,
            mode: MetricMode::Euclidean,
        })
    }

    /// Points `coords / denominator` with integer `coords`.
    pub fn lattice(dim: usize, coords: &[i64], denominator: u32) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::param("lattice denominator must be positive"));
        }
        if dim > 8 || coords.iter().any(|c| c.abs() > LATTICE_LIMIT) {
            return Err(Error::param(format!(
                "lattice needs dim <= 8 and |coordinate| <= {LATTICE_LIMIT}"
            )));
        }
        let mut cloud = Self::from_flat(dim, coords.iter().map(|&c| c as f64).collect())?;
        cloud.scale = f64::from(denominator);
        Ok(cloud)
    }

    pub fn with_mode(mut self, mode: MetricMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn mode(&self) -> MetricMode {
        self.mode
    }

    /// Divisor from stored to true coordinates; 1 unless built by
    /// [`PointCloud::lattice`].
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Stored coordinates of point `i`.
    #[inline]
    pub fn raw(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// True coordinates of point `i`.
    pub fn point(&self, i: usize) -> Vec<f64> {
        self.raw(i).iter().map(|&c| c / self.scale).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    #[inline]
    pub fn euclidean(&self, i: usize, j: usize) -> f64 {
        euclidean(self.raw(i), self.raw(j)) / self.scale
    }

    /// Distance in the cloud's own mode.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.mode.apply(self.euclidean(i, j))
    }
}

/// Every Euclidean distance in the crate goes through this one expression, so
/// equal inputs always give bit-identical lengths.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum::<f64>()
        .sqrt()
}
