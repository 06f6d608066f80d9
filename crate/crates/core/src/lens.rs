//! The lens family `Y_n = B((0,0), n+1) ∩ B((2n,0), n+1)` in the plane and
//! the growth experiments built on it.

use serde::Serialize;

use crate::ball_geometry::{eccentricity, intersect_balls, quasi_ball_defect, BallSpec};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::hyperbolicity::{
    four_point_delta, four_point_delta_fixed_base, ultrametric_delta, FULL_SCAN_CAP,
};
use crate::metric::FiniteMetricSpace;
use crate::region::Region;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LensFamily {
    n: u32,
}

impl LensFamily {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("lens index n must be at least 1"));
        }
        Ok(LensFamily { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `(0, 0)` and `(2n, 0)`.
    pub fn centers(&self) -> [[f64; 2]; 2] {
        [[0.0, 0.0], [2.0 * f64::from(self.n), 0.0]]
    }

    pub fn radius(&self) -> f64 {
        f64::from(self.n) + 1.0
    }

    /// Half-width of the lens along the vertical axis, `sqrt(2n + 1)`.
    pub fn half_height(&self) -> f64 {
        f64::from(2 * self.n + 1).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StatsSource {
    Analytic,
    Sampled { h: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LensStats {
    pub inradius: f64,
    pub inradius_center: [f64; 2],
    pub diameter: f64,
    pub ecc_d: f64,
    pub ecc_dprime: f64,
    pub source: StatsSource,
}

/// Closed-form constants: the largest inscribed disk is `B((n,0), 1)`, the
/// two tips `(n, ±sqrt(2n+1))` are antipodal through `(n, 0)`, so the
/// smallest enclosing disk has radius `sqrt(2n+1)`.
pub fn lens_exact_stats(n: u32) -> Result<LensStats> {
    let lens = LensFamily::new(n)?;
    let half = lens.half_height();
    Ok(LensStats {
        inradius: 1.0,
        inradius_center: [f64::from(n), 0.0],
        diameter: 2.0 * half,
        ecc_d: half - 1.0,
        ecc_dprime: half.ln_1p() - std::f64::consts::LN_2,
        source: StatsSource::Analytic,
    })
}

/// A lattice sample of a lens.
#[derive(Clone, Debug)]
pub struct LensSample {
    pub lens: LensFamily,
    /// Lattice spacing `1/k`, the requested `h` snapped to a unit fraction.
    pub spacing: f64,
    pub cloud: PointCloud,
    pub region: Region,
    /// Index of `(n, 0)`.
    pub center: usize,
    /// Indices of `(0, 0)` and `(2n, 0)`.
    pub disk_centers: [usize; 2],
}

/// Lattice denominator for a requested spacing.
pub fn lattice_denominator(h: f64) -> Result<u32> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::param(format!("lattice spacing must lie in (0, 1], got {h}")));
    }
    let k = (1.0 / h).round();
    if k > 4096.0 {
        return Err(Error::param(format!("lattice spacing {h} is too fine")));
    }
    Ok(k as u32)
}

/// Samples the lattice `(Z/k)^2`, `k = round(1/h)`, over the bounding box of
/// the lens widened by one lens diameter on every side. The disk centers
/// are appended when they fall outside that box. Coordinates are exact
/// lattice points, so membership tests at the boundary circles are exact.
pub fn sample_lens(n: u32, h: f64) -> Result<LensSample> {
    let lens = LensFamily::new(n)?;
    let k = lattice_denominator(h)?;
    let kf = f64::from(k);
    let (ni, ki) = (i64::from(n), i64::from(k));
    let half = lens.half_height();
    let margin = 2.0 * half;
    let x_lo = ((f64::from(n) - 1.0 - margin) * kf).floor() as i64;
    let x_hi = ((f64::from(n) + 1.0 + margin) * kf).ceil() as i64;
    let y_hi = ((half + margin) * kf).ceil() as i64;

    let mut coords = Vec::new();
    for x in x_lo..=x_hi {
        for y in -y_hi..=y_hi {
            coords.extend_from_slice(&[x, y]);
        }
    }
    let rows = y_hi * 2 + 1;
    let at = |x: i64, y: i64| ((x - x_lo) * rows + (y + y_hi)) as usize;
    let center = at(ni * ki, 0);
    let mut disk_centers = [0; 2];
    for (slot, x) in disk_centers.iter_mut().zip([0, 2 * ni * ki]) {
        *slot = if (x_lo..=x_hi).contains(&x) {
            at(x, 0)
        } else {
            coords.extend_from_slice(&[x, 0]);
            coords.len() / 2 - 1
        };
    }
    let cloud = PointCloud::lattice(2, &coords, k)?;
    let space = FiniteMetricSpace::lazy(cloud.clone());
    let r = lens.radius();
    let region = intersect_balls(
        &space,
        BallSpec::new(disk_centers[0], r)?,
        BallSpec::new(disk_centers[1], r)?,
    )?;
    Ok(LensSample {
        lens,
        spacing: 1.0 / kf,
        cloud,
        region,
        center,
        disk_centers,
    })
}

impl LensSample {
    /// The sample as a metric space, in `d` (`log = false`) or `d'`.
    pub fn space(&self, log: bool) -> FiniteMetricSpace {
        let space = FiniteMetricSpace::from_cloud(self.cloud.clone());
        if log {
            space.log_transform()
        } else {
            space
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LensRow {
    pub n: u32,
    pub h: f64,
    pub points: usize,
    pub region_points: usize,
    pub ecc_d: f64,
    pub ecc_d_analytic: f64,
    pub ecc_dprime: f64,
    pub ecc_dprime_analytic: f64,
    pub max_inradius: f64,
    pub inradius_center: [f64; 2],
    pub min_covering_radius: f64,
    pub quasi_ball_d: f64,
    pub quasi_ball_dprime: f64,
    /// Present when a `lambda` was requested.
    pub weak_ecc_d: Option<f64>,
    pub weak_ecc_dprime: Option<f64>,
}

/// One row per lens: measured and closed-form eccentricities in `d` and
/// `d'`, the largest inradius, and the quasi-ball defects.
pub fn ecc_growth_experiment(n_list: &[u32], h: f64, lambda: Option<f64>) -> Result<Vec<LensRow>> {
    if let Some(l) = lambda {
        if !(l >= 1.0 && l.is_finite()) {
            return Err(Error::param(format!("lambda must be a finite number >= 1, got {l}")));
        }
    }
    n_list.iter().map(|&n| lens_row(n, h, lambda)).collect()
}

fn lens_row(n: u32, h: f64, lambda: Option<f64>) -> Result<LensRow> {
    let exact = lens_exact_stats(n)?;
    let sample = sample_lens(n, h)?;
    let d = sample.space(false);
    let dp = sample.space(true);
    let ecc = eccentricity(&d, &sample.region)?;
    let ecc_p = eccentricity(&dp, &sample.region)?;
    let inner = ecc.inner.ok_or(Error::EmptyRegion)?;
    let outer = ecc.outer.ok_or(Error::EmptyRegion)?;
    Ok(LensRow {
        n,
        h: sample.spacing,
        points: d.len(),
        region_points: sample.region.len(),
        ecc_d: ecc.ecc,
        ecc_d_analytic: exact.ecc_d,
        ecc_dprime: ecc_p.ecc,
        ecc_dprime_analytic: exact.ecc_dprime,
        max_inradius: inner.radius,
        inradius_center: sample
            .cloud
            .point(inner.center)
            .try_into()
            .expect("plane point"),
        min_covering_radius: outer.radius,
        quasi_ball_d: quasi_ball_defect(&d, &sample.region)?.defect,
        quasi_ball_dprime: quasi_ball_defect(&dp, &sample.region)?.defect,
        weak_ecc_d: lambda.map(|l| ecc.weak(l)),
        weak_ecc_dprime: lambda.map(|l| ecc_p.weak(l)),
    })
}

/// How the grid experiment scans quadruples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScan {
    /// Every basepoint; refused above [`FULL_SCAN_CAP`] points.
    Full,
    /// Full scan when allowed, otherwise basepoint pinned to the corner.
    Auto,
    /// Basepoint pinned to the corner `(0, 0)`.
    FixedBase,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridRow {
    pub side: usize,
    pub points: usize,
    pub spacing: f64,
    pub method: &'static str,
    pub delta_d: f64,
    pub delta_dprime: f64,
    /// `(sqrt(2) - 1) * (side - 1) * spacing`, the corner-quadruple defect.
    pub corner_bound: f64,
}

/// The `s x s` square grid with the given spacing, row-major.
pub fn square_grid(side: usize, spacing: f64) -> Result<PointCloud> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::param(format!("grid spacing must be positive, got {spacing}")));
    }
    let coords = (0..side * side)
        .flat_map(|i| [(i / side) as f64 * spacing, (i % side) as f64 * spacing])
        .collect();
    PointCloud::from_flat(2, coords)
}

pub fn grid_experiment(sides: &[usize], spacing: f64, scan: GridScan) -> Result<Vec<GridRow>> {
    sides
        .iter()
        .map(|&side| {
            if side == 0 {
                return Err(Error::param("grid side must be positive"));
            }
            let space = FiniteMetricSpace::from_cloud(square_grid(side, spacing)?);
            let points = space.len();
            let full = match scan {
                GridScan::Full if points > FULL_SCAN_CAP => {
                    return Err(Error::GuardExceeded {
                        points,
                        cap: FULL_SCAN_CAP,
                    })
                }
                GridScan::Full => true,
                GridScan::Auto => points <= FULL_SCAN_CAP,
                GridScan::FixedBase => false,
            };
            let delta = |s: &FiniteMetricSpace| {
                if full {
                    four_point_delta(s).delta
                } else {
                    four_point_delta_fixed_base(s, 0).delta
                }
            };
            Ok(GridRow {
                side,
                points,
                spacing,
                method: if full { "full" } else { "fixed-base" },
                delta_d: delta(&space),
                delta_dprime: delta(&space.log_transform()),
                corner_bound: (2f64.sqrt() - 1.0) * (side - 1) as f64 * spacing,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineUltra {
    pub n: usize,
    pub delta_u: f64,
    pub gap_to_ln2: f64,
    pub witness: [usize; 3],
}

/// Ultrametric defect of `{0, 1, ..., n}` under `d'`.
pub fn line_ultrametric_experiment(n: usize) -> Result<LineUltra> {
    if n < 2 {
        return Err(Error::param("line experiment needs N >= 2"));
    }
    let pts: Vec<Vec<f64>> = (0..=n).map(|i| vec![i as f64]).collect();
    let space = FiniteMetricSpace::from_cloud(PointCloud::new(1, &pts)?).log_transform();
    let r = ultrametric_delta(&space);
    Ok(LineUltra {
        n,
        delta_u: r.delta_u,
        gap_to_ln2: std::f64::consts::LN_2 - r.delta_u,
        witness: r.witness.expect("nonempty space"),
    })
}
