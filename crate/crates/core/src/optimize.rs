//! Optimization of the catalysis transmittance `T`, the modulation variance
//! `V`, and the largest distance with a positive key.
//!
//! Every search is a deterministic coarse scan followed by golden-section
//! refinement on the bracket around the best scan point. The refined value
//! is only accepted when it beats the scan, so the result never falls below
//! the best coarse point even if the objective is not unimodal.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::Layout;
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::keyrate::{beta_threshold, secret_key_rate};

/// Reported distances are searched up to this bound.
const MAX_SEARCH_KM: f64 = 5000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationGrid {
    /// Exclusive lower end of the transmittance scan.
    pub t_lo: f64,
    pub t_hi: f64,
    pub t_steps: usize,
    pub v_lo: f64,
    pub v_hi: f64,
    pub v_steps: usize,
    pub refine_iters: usize,
}

impl Default for OptimizationGrid {
    fn default() -> Self {
        Self {
            t_lo: 0.01,
            t_hi: 1.0,
            t_steps: 200,
            v_lo: 1.01,
            v_hi: 10.0,
            v_steps: 200,
            refine_iters: 30,
        }
    }
}

impl OptimizationGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_lo > 0.0 && self.t_lo < self.t_hi && self.t_hi <= 1.0) {
            return Err(Error::Grid(format!(
                "transmittance range ({}, {}] must lie in (0, 1] with lo < hi",
                self.t_lo, self.t_hi
            )));
        }
        if !(self.v_lo > 1.0 && self.v_lo < self.v_hi && self.v_hi.is_finite()) {
            return Err(Error::Grid(format!(
                "variance range [{}, {}] must satisfy 1 < lo < hi",
                self.v_lo, self.v_hi
            )));
        }
        if self.t_steps < 2 || self.v_steps < 2 {
            return Err(Error::Grid("at least two steps per axis".into()));
        }
        Ok(())
    }

    /// Scan points in `(t_lo, t_hi]`.
    pub fn t_points(&self) -> Vec<f64> {
        let span = self.t_hi - self.t_lo;
        (1..=self.t_steps)
            .map(|i| {
                if i == self.t_steps {
                    self.t_hi
                } else {
                    self.t_lo + span * i as f64 / self.t_steps as f64
                }
            })
            .collect()
    }

    /// Scan points in `[v_lo, v_hi]`.
    pub fn v_points(&self) -> Vec<f64> {
        linspace(self.v_lo, self.v_hi, self.v_steps)
    }
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TOptimum {
    pub t_star: f64,
    pub skr_star: f64,
    /// False when no transmittance gives a positive key.
    pub has_key: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvOptimum {
    pub t_star: f64,
    pub v_star: f64,
    pub skr_star: f64,
    pub has_key: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceOptimum {
    pub distance_km: f64,
    /// False when there is no key even at zero distance.
    pub has_key: bool,
}

/// Maximizes `f` on `[lo, hi]` by golden-section search.
pub fn golden_section_max<F>(mut f: F, mut lo: f64, mut hi: f64, iters: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Scan then refine. Ties on the scan go to the earlier (smaller) point.
fn scan_and_refine<F>(f: F, points: &[f64], lo: f64, hi: f64, iters: usize, parallel: bool) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let values: Vec<f64> = if parallel {
        points.par_iter().map(|&x| f(x)).collect::<Result<_>>()?
    } else {
        points.iter().map(|&x| f(x)).collect::<Result<_>>()?
    };
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let (mut x_best, mut f_best) = (points[best], values[best]);
    if iters > 0 && points.len() > 1 {
        let left = if best == 0 { lo } else { points[best - 1] };
        let right = if best + 1 == points.len() { hi } else { points[best + 1] };
        let (x, fx) = golden_section_max(&f, left, right, iters)?;
        if fx > f_best {
            x_best = x;
            f_best = fx;
        }
    }
    Ok((x_best, f_best))
}

fn skr_with_t(config: &ProtocolConfig, t: f64) -> Result<f64> {
    Ok(secret_key_rate(&config.with_transmittance(t))?.objective())
}

/// Transmittance maximizing the key rate. Catalysis must be enabled.
pub fn optimize_t(config: &ProtocolConfig, grid: &OptimizationGrid) -> Result<TOptimum> {
    if !config.zpc.enabled {
        return Err(Error::ZpcDisabled);
    }
    grid.validate()?;
    config.with_transmittance(1.0).validate()?;
    let (t_star, skr_star) = scan_and_refine(
        |t| skr_with_t(config, t),
        &grid.t_points(),
        grid.t_lo,
        grid.t_hi,
        grid.refine_iters,
        false,
    )?;
    Ok(TOptimum {
        t_star,
        skr_star,
        has_key: skr_star > 0.0,
    })
}

/// Best key rate for a fixed variance: `T` optimized when catalysis is on,
/// pinned to 1 otherwise.
pub fn best_over_t(config: &ProtocolConfig, grid: &OptimizationGrid) -> Result<TOptimum> {
    if config.zpc.enabled {
        optimize_t(config, grid)
    } else {
        let skr = secret_key_rate(config)?.objective();
        Ok(TOptimum {
            t_star: 1.0,
            skr_star: skr,
            has_key: skr > 0.0,
        })
    }
}

/// Joint optimum over variance and (when catalysis is on) transmittance.
pub fn optimize_tv(config: &ProtocolConfig, grid: &OptimizationGrid) -> Result<TvOptimum> {
    grid.validate()?;
    let inner = |v: f64| best_over_t(&config.with_variance(v), grid);
    let (v_star, _) = scan_and_refine(
        |v| inner(v).map(|o| o.skr_star),
        &grid.v_points(),
        grid.v_lo,
        grid.v_hi,
        grid.refine_iters,
        true,
    )?;
    let at = inner(v_star)?;
    Ok(TvOptimum {
        t_star: at.t_star,
        v_star,
        skr_star: at.skr_star,
        has_key: at.has_key,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaThreshold {
    /// Smallest reconciliation efficiency with a non-negative key.
    pub beta0: f64,
    pub t_star: f64,
}

/// `min_T χ_BE / I_AB`: below this efficiency no transmittance gives a key.
/// `T` is pinned to 1 when catalysis is off.
pub fn minimum_beta(config: &ProtocolConfig, grid: &OptimizationGrid) -> Result<BetaThreshold> {
    grid.validate()?;
    let ratio = |c: &ProtocolConfig| -> Result<f64> {
        let r = secret_key_rate(c)?;
        Ok(match r.skr {
            Some(_) if r.i_ab > 0.0 => beta_threshold(&r),
            _ => f64::INFINITY,
        })
    };
    if !config.zpc.enabled {
        return Ok(BetaThreshold {
            beta0: ratio(config)?,
            t_star: 1.0,
        });
    }
    config.with_transmittance(1.0).validate()?;
    let (t_star, neg) = scan_and_refine(
        |t| ratio(&config.with_transmittance(t)).map(|x| -x),
        &grid.t_points(),
        grid.t_lo,
        grid.t_hi,
        grid.refine_iters,
        false,
    )?;
    Ok(BetaThreshold { beta0: -neg, t_star })
}

/// Key rate (optimized over `T` when applicable) at a reported distance.
pub fn skr_at_distance(config: &ProtocolConfig, layout: Layout, distance: f64, grid: &OptimizationGrid) -> Result<f64> {
    best_over_t(&config.at_distance(layout, distance)?, grid).map(|o| o.skr_star)
}

/// Largest reported distance with a positive key, bracketed to `tol_km`.
pub fn max_distance(config: &ProtocolConfig, layout: Layout, grid: &OptimizationGrid, tol_km: f64) -> Result<DistanceOptimum> {
    if !(tol_km > 0.0 && tol_km.is_finite()) {
        return Err(Error::Grid(format!("distance tolerance must be positive, got {tol_km}")));
    }
    let positive = |l: f64| skr_at_distance(config, layout, l, grid).map(|s| s > 0.0);
    if !positive(0.0)? {
        return Ok(DistanceOptimum {
            distance_km: 0.0,
            has_key: false,
        });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while positive(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_SEARCH_KM {
            return Err(Error::Grid(format!("key rate still positive beyond {MAX_SEARCH_KM} km")));
        }
    }
    while hi - lo > tol_km {
        let mid = 0.5 * (lo + hi);
        if positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DistanceOptimum {
        distance_km: 0.5 * (lo + hi),
        has_key: true,
    })
}
