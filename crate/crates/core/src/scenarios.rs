//! Standard sweeps over the four protocol variants, each producing
//! deterministic row-ordered tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::channel::{equivalent_excess_noise_curve, Layout, RatioDistance, SymmetricDistance};
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::keyrate::secret_key_rate;
use crate::modulation::{correlation_z, AmplitudeSq, Scheme};
use crate::optimize::{best_over_t, minimum_beta, linspace, max_distance, OptimizationGrid};
use crate::zpc::ZpcSetting;

/// Relay placement of a figure family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Asymmetric,
    Symmetric,
}

/// Modulation scheme with or without catalysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variant {
    pub scheme: Scheme,
    pub zpc: bool,
}

impl Variant {
    pub const FOUR: Variant = Variant {
        scheme: Scheme::Four,
        zpc: false,
    };
    pub const EIGHT: Variant = Variant {
        scheme: Scheme::Eight,
        zpc: false,
    };
    pub const FOUR_ZPC: Variant = Variant {
        scheme: Scheme::Four,
        zpc: true,
    };
    pub const EIGHT_ZPC: Variant = Variant {
        scheme: Scheme::Eight,
        zpc: true,
    };
    pub const ALL: [Variant; 4] = [Self::FOUR, Self::EIGHT, Self::FOUR_ZPC, Self::EIGHT_ZPC];

    pub fn label(&self) -> String {
        if self.zpc {
            format!("{}_zpc", self.scheme)
        } else {
            self.scheme.to_string()
        }
    }

    /// Variance at which each variant performs best in the standard sweeps.
    pub fn preset_variance(&self, case: Case) -> f64 {
        match (case, self.scheme, self.zpc) {
            (Case::Asymmetric, Scheme::Four, false) => 1.4,
            (Case::Asymmetric, Scheme::Eight, false) => 1.5,
            (Case::Asymmetric, Scheme::Four, true) => 2.5,
            (Case::Asymmetric, Scheme::Eight, true) => 2.6,
            (Case::Symmetric, Scheme::Four, false) => 1.5,
            (Case::Symmetric, Scheme::Eight, false) => 1.8,
            (Case::Symmetric, Scheme::Four, true) => 2.6,
            (Case::Symmetric, Scheme::Eight, true) => 2.7,
            (_, Scheme::Gaussian, _) => 1.5,
        }
    }

    /// `base` with this variant's scheme and catalysis switch. The
    /// transmittance is a placeholder; callers optimize it.
    pub fn configure(&self, base: &ProtocolConfig, variance: f64) -> ProtocolConfig {
        ProtocolConfig {
            scheme: self.scheme,
            zpc: if self.zpc {
                ZpcSetting {
                    enabled: true,
                    transmittance_t: 1.0,
                }
            } else {
                ZpcSetting::OFF
            },
            variance_v: variance,
            ..*base
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (scheme, zpc) = match s.strip_suffix("_zpc") {
            Some(head) => (head, true),
            None => (s, false),
        };
        let scheme: Scheme = scheme.parse()?;
        if scheme == Scheme::Gaussian {
            return Err(format!("`{s}` is not a discrete-modulation variant"));
        }
        Ok(Variant { scheme, zpc })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9a,
    Fig9b,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9a,
        FigureId::Fig9b,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9a => "fig9a",
            FigureId::Fig9b => "fig9b",
        }
    }

    pub fn case(self) -> Option<Case> {
        match self {
            FigureId::Fig3 | FigureId::Fig4 | FigureId::Fig5 => Some(Case::Asymmetric),
            FigureId::Fig6 | FigureId::Fig7 | FigureId::Fig8 => Some(Case::Symmetric),
            _ => None,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown figure `{s}` (expected one of fig2..fig8, fig9a, fig9b)"))
    }
}

/// Evenly spaced inclusive axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub const fn new(lo: f64, hi: f64, steps: usize) -> Self {
        Self { lo, hi, steps }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.steps < 2 || !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::Grid(format!(
                "{name} axis needs lo < hi and at least two steps, got [{}, {}] x {}",
                self.lo, self.hi, self.steps
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.steps)
    }
}

/// Named columns of `f64` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Sorts rows lexicographically by column values.
    fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }
}

/// Everything needed to regenerate one figure's data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub figure: FigureId,
    pub base: ProtocolConfig,
    pub variants: Vec<Variant>,
    /// Reported distance axis (km) for `fig3`, `fig4`, `fig6`, `fig7` and `fig9a`/`fig9b`.
    pub distance_axis: Axis,
    /// Total variance axis for `fig3` and `fig6`.
    pub variance_axis: Axis,
    /// Reconciliation efficiency axis for `fig5` and `fig8`.
    pub beta_axis: Axis,
    /// Effective modulation variance axis for `fig2`.
    pub modulation_axis: Axis,
    /// Fixed distances (km) for `fig5` and `fig8`.
    pub distances: Vec<f64>,
    /// Extra excess-noise values for the catalysed eight-state curve in `fig4` and `fig7`.
    pub eps_list: Vec<f64>,
    /// Ratios `L_BC / L_AC` for `fig9a`/`fig9b`.
    pub d_list: Vec<f64>,
    pub fig9_variance: f64,
    pub grid: OptimizationGrid,
    pub symmetric_distance: SymmetricDistance,
    pub ratio_distance: RatioDistance,
}

impl SweepSpec {
    pub fn preset(figure: FigureId) -> Self {
        let symmetric = figure.case() == Some(Case::Symmetric);
        let surface = matches!(figure, FigureId::Fig3 | FigureId::Fig6);
        let l_hi = if symmetric { 1.5 } else { 60.0 };
        let distance_axis = Axis::new(0.0, l_hi, if surface { 100 } else { 200 });
        let (distances, eps_list) = if symmetric {
            (vec![0.1, 0.2, 0.3, 0.4], vec![0.0015, 0.0025, 0.0030])
        } else {
            (vec![20.0, 25.0, 30.0, 35.0], vec![0.0015, 0.00225, 0.0030])
        };
        Self {
            figure,
            base: ProtocolConfig::default(),
            variants: Variant::ALL.to_vec(),
            distance_axis,
            variance_axis: Axis::new(1.01, 10.0, 100),
            beta_axis: Axis::new(0.5, 1.0, 200),
            modulation_axis: Axis::new(0.0, 4.0, 200),
            distances,
            eps_list,
            d_list: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            fig9_variance: 2.7,
            grid: OptimizationGrid::default(),
            symmetric_distance: SymmetricDistance::Total,
            ratio_distance: RatioDistance::Total,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.grid.validate()?;
        self.distance_axis.validate("distance")?;
        self.variance_axis.validate("variance")?;
        self.beta_axis.validate("beta")?;
        self.modulation_axis.validate("modulation")?;
        if self.distance_axis.lo < 0.0 {
            return Err(Error::Distance(self.distance_axis.lo));
        }
        if self.variance_axis.lo <= 1.0 {
            return Err(Error::Variance(self.variance_axis.lo));
        }
        if !(self.beta_axis.lo > 0.0 && self.beta_axis.hi <= 1.0) {
            return Err(Error::Beta(self.beta_axis.lo));
        }
        if self.modulation_axis.lo < 0.0 {
            return Err(Error::NegativeAmplitude(self.modulation_axis.lo));
        }
        if self.variants.is_empty() {
            return Err(Error::Grid("no protocol variants selected".into()));
        }
        if let Some(&d) = self.d_list.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return Err(Error::Ratio(d));
        }
        if let Some(&l) = self.distances.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::Distance(l));
        }
        if let Some(&e) = self.eps_list.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(Error::ExcessNoise(e));
        }
        if !(self.fig9_variance > 1.0) {
            return Err(Error::Variance(self.fig9_variance));
        }
        Ok(())
    }

    pub fn layout(&self, case: Case) -> Layout {
        match case {
            Case::Asymmetric => Layout::Asymmetric,
            Case::Symmetric => Layout::Symmetric(self.symmetric_distance),
        }
    }
}

/// Tables for one figure plus scalar summaries and domain warnings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOutput {
    pub figure: FigureId,
    pub tables: Vec<Table>,
    pub summary: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

fn domain_warning(table: &str, count: usize) -> Option<String> {
    (count > 0).then(|| {
        format!("{table}: {count} point(s) with effective modulation variance above 0.5 (outside the Gaussian-channel domain)")
    })
}

/// Correlation coefficients against the effective modulation variance.
pub fn run_fig2(axis: &Axis) -> Result<Table> {
    axis.validate("modulation")?;
    let mut table = Table::new("correlation", &["v_m_tilde", "z4", "z8", "zg"]);
    for v_m in axis.points() {
        let x = AmplitudeSq::from_modulation_variance(v_m)?;
        table.rows.push(vec![
            v_m,
            correlation_z(Scheme::Four, x),
            correlation_z(Scheme::Eight, x),
            correlation_z(Scheme::Gaussian, x),
        ]);
    }
    Ok(table)
}

/// One evaluated point: the optimal transmittance and the full result there.
struct Point {
    t_star: f64,
    skr: f64,
    p_d: f64,
    i_ab: f64,
    chi_be: f64,
    warn: bool,
}

fn evaluate(config: &ProtocolConfig, grid: &OptimizationGrid) -> Result<Point> {
    let opt = best_over_t(config, grid)?;
    let at = if config.zpc.enabled {
        config.with_transmittance(opt.t_star)
    } else {
        *config
    };
    let r = secret_key_rate(&at)?;
    Ok(Point {
        t_star: opt.t_star,
        skr: r.skr.unwrap_or(f64::NAN),
        p_d: r.p_d,
        i_ab: r.i_ab,
        chi_be: r.chi_be,
        warn: r.domain_warning,
    })
}

/// Key-rate surface over variance and distance, `T` optimized per point.
pub fn run_fig3_or_fig6(case: Case, spec: &SweepSpec) -> Result<FigureOutput> {
    let layout = spec.layout(case);
    let v_points = spec.variance_axis.points();
    let l_points = spec.distance_axis.points();
    let mut tables = Vec::new();
    let mut warnings = Vec::new();
    for variant in &spec.variants {
        let cells: Vec<(f64, f64)> = v_points
            .iter()
            .flat_map(|&v| l_points.iter().map(move |&l| (v, l)))
            .collect();
        let points: Vec<Point> = cells
            .par_iter()
            .map(|&(v, l)| evaluate(&variant.configure(&spec.base, v).at_distance(layout, l)?, &spec.grid))
            .collect::<Result<_>>()?;
        let mut table = Table::new(
            variant.label(),
            &["variance", "distance_km", "skr_bits_per_use", "t_star"],
        );
        for (&(v, l), p) in cells.iter().zip(&points) {
            table.rows.push(vec![v, l, p.skr, p.t_star]);
        }
        table.sort_rows();
        warnings.extend(domain_warning(&table.name, points.iter().filter(|p| p.warn).count()));
        tables.push(table);
    }
    Ok(FigureOutput {
        figure: if case == Case::Asymmetric { FigureId::Fig3 } else { FigureId::Fig6 },
        tables,
        summary: Vec::new(),
        warnings,
    })
}

fn distance_curve(
    name: String,
    config: &ProtocolConfig,
    layout: Layout,
    distances: &[f64],
    grid: &OptimizationGrid,
    warnings: &mut Vec<String>,
) -> Result<Table> {
    let points: Vec<Point> = distances
        .par_iter()
        .map(|&l| evaluate(&config.at_distance(layout, l)?, grid))
        .collect::<Result<_>>()?;
    let mut table = Table::new(
        name,
        &["distance_km", "skr_bits_per_use", "p_d", "i_ab", "chi_be", "t_star"],
    );
    for (&l, p) in distances.iter().zip(&points) {
        table.rows.push(vec![l, p.skr, p.p_d, p.i_ab, p.chi_be, p.t_star]);
    }
    warnings.extend(domain_warning(&table.name, points.iter().filter(|p| p.warn).count()));
    Ok(table)
}

/// Key rate against distance at each variant's preset variance, plus the
/// catalysed eight-state curve at the extra excess-noise values.
pub fn run_fig4_or_fig7(case: Case, spec: &SweepSpec) -> Result<FigureOutput> {
    let layout = spec.layout(case);
    let distances = spec.distance_axis.points();
    let mut tables = Vec::new();
    let mut warnings = Vec::new();
    for variant in &spec.variants {
        let config = variant.configure(&spec.base, variant.preset_variance(case));
        tables.push(distance_curve(variant.label(), &config, layout, &distances, &spec.grid, &mut warnings)?);
    }
    let eight_zpc = Variant::EIGHT_ZPC;
    for &eps in &spec.eps_list {
        let config = eight_zpc
            .configure(&spec.base, eight_zpc.preset_variance(case))
            .with_eps(eps);
        let name = format!("{}_eps_{eps}", eight_zpc.label());
        tables.push(distance_curve(name, &config, layout, &distances, &spec.grid, &mut warnings)?);
    }
    Ok(FigureOutput {
        figure: if case == Case::Asymmetric { FigureId::Fig4 } else { FigureId::Fig7 },
        tables,
        summary: Vec::new(),
        warnings,
    })
}

/// Key rate against reconciliation efficiency at fixed distances. The
/// summary records each zero-crossing `β₀`.
pub fn run_fig5_or_fig8(case: Case, spec: &SweepSpec) -> Result<FigureOutput> {
    let layout = spec.layout(case);
    let betas = spec.beta_axis.points();
    let mut tables = Vec::new();
    let mut summary = Vec::new();
    let mut warnings = Vec::new();
    for variant in &spec.variants {
        let base = variant.configure(&spec.base, variant.preset_variance(case));
        let cells: Vec<(f64, f64)> = spec
            .distances
            .iter()
            .flat_map(|&l| betas.iter().map(move |&b| (l, b)))
            .collect();
        let points: Vec<Point> = cells
            .par_iter()
            .map(|&(l, b)| evaluate(&base.with_beta(b).at_distance(layout, l)?, &spec.grid))
            .collect::<Result<_>>()?;
        let mut table = Table::new(
            variant.label(),
            &["distance_km", "beta", "skr_bits_per_use", "p_d", "i_ab", "chi_be", "t_star"],
        );
        for (&(l, b), p) in cells.iter().zip(&points) {
            table.rows.push(vec![l, b, p.skr, p.p_d, p.i_ab, p.chi_be, p.t_star]);
        }
        table.sort_rows();
        warnings.extend(domain_warning(&table.name, points.iter().filter(|p| p.warn).count()));
        for &l in &spec.distances {
            let threshold = minimum_beta(&base.at_distance(layout, l)?, &spec.grid)?;
            summary.push((format!("beta0_{}_{l}km", variant.label()), threshold.beta0));
        }
        tables.push(table);
    }
    Ok(FigureOutput {
        figure: if case == Case::Asymmetric { FigureId::Fig5 } else { FigureId::Fig8 },
        tables,
        summary,
        warnings,
    })
}

/// Catalysed eight-state protocol as the relay moves from Bob's site
/// (`d = 0`) to the midpoint (`d = 1`). Returns the key-rate table, the
/// equivalent excess-noise table and the maximum distance per `d`.
pub fn run_fig9(spec: &SweepSpec) -> Result<(FigureOutput, FigureOutput)> {
    let distances = spec.distance_axis.points();
    let config = Variant::EIGHT_ZPC.configure(&spec.base, spec.fig9_variance);
    let eps = spec.base.eps_a;
    if spec.base.eps_a != spec.base.eps_b {
        return Err(Error::Grid("the relay-ratio sweep uses a single excess noise (eps_a = eps_b)".into()));
    }

    let mut rate = Table::new("rate", &["distance_km", "d", "skr_bits_per_use", "p_d", "t_star"]);
    let mut noise = Table::new("excess_noise", &["distance_km", "d", "eps_th"]);
    let mut summary = Vec::new();
    let mut warnings = Vec::new();
    for &d in &spec.d_list {
        let layout = Layout::Ratio {
            d,
            reported: spec.ratio_distance,
        };
        let points: Vec<Point> = distances
            .par_iter()
            .map(|&l| evaluate(&config.at_distance(layout, l)?, &spec.grid))
            .collect::<Result<_>>()?;
        for (&l, p) in distances.iter().zip(&points) {
            rate.rows.push(vec![l, d, p.skr, p.p_d, p.t_star]);
        }
        warnings.extend(domain_warning(&format!("rate d={d}"), points.iter().filter(|p| p.warn).count()));
        for (l, eps_th) in equivalent_excess_noise_curve(d, spec.ratio_distance, &distances, eps, spec.base.geometry.loss_mu)? {
            noise.rows.push(vec![l, d, eps_th]);
        }
        let reach = max_distance(&config, layout, &spec.grid, 1e-3)?;
        summary.push((format!("max_distance_km_d{d}"), reach.distance_km));
    }
    rate.sort_rows();
    noise.sort_rows();
    Ok((
        FigureOutput {
            figure: FigureId::Fig9a,
            tables: vec![rate],
            summary: summary.clone(),
            warnings,
        },
        FigureOutput {
            figure: FigureId::Fig9b,
            tables: vec![noise],
            summary: Vec::new(),
            warnings: Vec::new(),
        },
    ))
}

/// Runs whichever sweep `spec.figure` names.
pub fn run(spec: &SweepSpec) -> Result<FigureOutput> {
    spec.validate()?;
    match spec.figure {
        FigureId::Fig2 => Ok(FigureOutput {
            figure: FigureId::Fig2,
            tables: vec![run_fig2(&spec.modulation_axis)?],
            summary: Vec::new(),
            warnings: Vec::new(),
        }),
        FigureId::Fig3 => run_fig3_or_fig6(Case::Asymmetric, spec),
        FigureId::Fig6 => run_fig3_or_fig6(Case::Symmetric, spec),
        FigureId::Fig4 => run_fig4_or_fig7(Case::Asymmetric, spec),
        FigureId::Fig7 => run_fig4_or_fig7(Case::Symmetric, spec),
        FigureId::Fig5 => run_fig5_or_fig8(Case::Asymmetric, spec),
        FigureId::Fig8 => run_fig5_or_fig8(Case::Symmetric, spec),
        FigureId::Fig9a => run_fig9(spec).map(|(a, _)| a),
        FigureId::Fig9b => run_fig9_noise(spec),
    }
}

fn run_fig9_noise(spec: &SweepSpec) -> Result<FigureOutput> {
    let distances = spec.distance_axis.points();
    let mut noise = Table::new("excess_noise", &["distance_km", "d", "eps_th"]);
    for &d in &spec.d_list {
        for (l, eps_th) in equivalent_excess_noise_curve(d, spec.ratio_distance, &distances, spec.base.eps_a, spec.base.geometry.loss_mu)? {
            noise.rows.push(vec![l, d, eps_th]);
        }
    }
    noise.sort_rows();
    Ok(FigureOutput {
        figure: FigureId::Fig9b,
        tables: vec![noise],
        summary: Vec::new(),
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(figure: FigureId) -> SweepSpec {
        let mut spec = SweepSpec::preset(figure);
        spec.distance_axis.steps = 7;
        spec.variance_axis.steps = 5;
        spec.beta_axis.steps = 6;
        spec.modulation_axis.steps = 9;
        spec.grid.t_steps = 40;
        spec.grid.refine_iters = 10;
        spec
    }

    #[test]
    fn fig2_first_row_is_zero() {
        let t = run_fig2(&Axis::new(0.0, 4.0, 200)).unwrap();
        assert_eq!(t.rows[0], vec![0.0, 0.0, 0.0, 0.0]);
        for r in &t.rows {
            assert!(r[3] >= r[2] && r[2] >= r[1]);
        }
        let near = t.rows.iter().find(|r| (r[0] - 0.4).abs() < 0.011).unwrap();
        assert!((near[3] - near[2]).abs() < 0.05);
    }

    #[test]
    fn variant_labels_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.label().parse::<Variant>().unwrap(), v);
        }
        assert!("gaussian".parse::<Variant>().is_err());
    }

    #[test]
    fn figure_ids() {
        for f in FigureId::ALL {
            assert_eq!(f.as_str().parse::<FigureId>().unwrap(), f);
        }
        assert!("fig10".parse::<FigureId>().is_err());
    }

    #[test]
    fn non_zpc_rows_pinned() {
        let out = run(&small(FigureId::Fig4)).unwrap();
        for t in out.tables.iter().filter(|t| !t.name.contains("zpc")) {
            assert!(t.column("t_star").unwrap().iter().all(|&x| x == 1.0));
            assert!(t.column("p_d").unwrap().iter().all(|&x| x == 1.0));
        }
        // four variants plus three extra excess-noise curves
        assert_eq!(out.tables.len(), 7);
    }

    #[test]
    fn surface_rows_sorted() {
        let out = run(&small(FigureId::Fig6)).unwrap();
        for t in &out.tables {
            assert_eq!(t.rows.len(), 35);
            let keys: Vec<(f64, f64)> = t.rows.iter().map(|r| (r[0], r[1])).collect();
            assert!(keys.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn beta_sweep_is_affine_per_point() {
        let out = run(&small(FigureId::Fig5)).unwrap();
        let t = &out.tables[0];
        // plain four-state: T pinned, so SKR = β·I − χ with I, χ fixed per distance
        for r in &t.rows {
            let (beta, skr, i_ab, chi) = (r[1], r[2], r[4], r[5]);
            assert!((skr - (beta * i_ab - chi)).abs() < 1e-15);
        }
        assert_eq!(out.summary.len(), 16);
    }

    #[test]
    fn fig9_shapes() {
        let spec = small(FigureId::Fig9a);
        let (rate, noise) = run_fig9(&spec).unwrap();
        assert_eq!(rate.tables[0].rows.len(), 35);
        assert_eq!(noise.tables[0].columns, vec!["distance_km", "d", "eps_th"]);
        assert_eq!(rate.summary.len(), 5);
        assert_eq!(run(&small(FigureId::Fig9b)).unwrap().tables, noise.tables);
    }

    #[test]
    fn invalid_specs() {
        let mut s = SweepSpec::preset(FigureId::Fig9a);
        s.d_list = vec![1.5];
        assert!(s.validate().is_err());
        let mut s = SweepSpec::preset(FigureId::Fig4);
        s.distance_axis.steps = 1;
        assert!(s.validate().is_err());
        let mut s = SweepSpec::preset(FigureId::Fig5);
        s.beta_axis.hi = 1.2;
        assert!(s.validate().is_err());
    }
}
