//! Reduction of the two relay links (Alice–Charlie, Bob–Charlie) to an
//! equivalent one-way channel between Alice and Bob.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard single-mode fiber attenuation in dB/km.
pub const DEFAULT_LOSS_DB_PER_KM: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub l_ac: f64,
    pub l_bc: f64,
    pub loss_mu: f64,
}

impl LinkGeometry {
    pub fn new(l_ac: f64, l_bc: f64, loss_mu: f64) -> Result<Self> {
        let g = Self { l_ac, l_bc, loss_mu };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for l in [self.l_ac, self.l_bc] {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::Distance(l));
            }
        }
        if !(self.loss_mu.is_finite() && self.loss_mu > 0.0) {
            return Err(Error::FiberLoss(self.loss_mu));
        }
        Ok(())
    }
}

impl Default for LinkGeometry {
    fn default() -> Self {
        Self {
            l_ac: 0.0,
            l_bc: 0.0,
            loss_mu: DEFAULT_LOSS_DB_PER_KM,
        }
    }
}

/// Parameters of the equivalent one-way channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalentChannel {
    pub t_a: f64,
    pub t_b: f64,
    pub chi_a: f64,
    pub chi_b: f64,
    /// Squared gain of Bob's displacement, set to the value minimizing the
    /// equivalent excess noise.
    pub g_sq: f64,
    pub eps_th: f64,
    pub chi_t: f64,
    pub t_c: f64,
}

/// `10^{-μL/10}`.
pub fn fiber_transmittance(length_km: f64, loss_mu: f64) -> Result<f64> {
    if !(length_km.is_finite() && length_km >= 0.0) {
        return Err(Error::Distance(length_km));
    }
    if !(loss_mu.is_finite() && loss_mu > 0.0) {
        return Err(Error::FiberLoss(loss_mu));
    }
    Ok(10f64.powf(-loss_mu * length_km / 10.0))
}

/// Noise added by a lossy link referred to its input: `(1-T)/T + ε`.
pub fn added_noise(t: f64, eps: f64) -> f64 {
    (1.0 - t) / t + eps
}

/// Displacement gain that minimizes the equivalent excess noise.
pub fn optimal_gain_sq(t_b: f64, v_bob: f64) -> f64 {
    2.0 * (v_bob - 1.0) / (t_b * (v_bob + 1.0))
}

/// Equivalent excess noise at the optimal displacement gain.
pub fn equivalent_excess_noise(t_a: f64, t_b: f64, chi_a: f64, chi_b: f64) -> f64 {
    1.0 + chi_a + (t_b / t_a) * (chi_b - 1.0)
}

/// Equivalent excess noise for an arbitrary displacement gain `g_sq`.
/// Reduces to [`equivalent_excess_noise`] at [`optimal_gain_sq`].
pub fn excess_noise_with_gain(t_a: f64, t_b: f64, chi_a: f64, chi_b: f64, v_bob: f64, g_sq: f64) -> f64 {
    let mismatch = (2.0 * (v_bob - 1.0) / (g_sq * t_b)).sqrt() - (v_bob + 1.0).sqrt();
    let chi_tilde = (chi_b - 1.0) + mismatch * mismatch;
    1.0 + chi_a + (t_b / t_a) * chi_tilde
}

fn validate_noise(eps: f64) -> Result<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(Error::ExcessNoise(eps))
    }
}

/// Builds the equivalent channel for the given links, excess noises and
/// Bob's (unattenuated) variance.
pub fn equivalent_channel(geometry: &LinkGeometry, eps_a: f64, eps_b: f64, v_bob: f64) -> Result<EquivalentChannel> {
    geometry.validate()?;
    validate_noise(eps_a)?;
    validate_noise(eps_b)?;
    if !(v_bob.is_finite() && v_bob > 1.0) {
        return Err(Error::Variance(v_bob));
    }
    let t_a = fiber_transmittance(geometry.l_ac, geometry.loss_mu)?;
    let t_b = fiber_transmittance(geometry.l_bc, geometry.loss_mu)?;
    if t_a <= 0.0 || t_b <= 0.0 {
        return Err(Error::ZeroTransmittance);
    }
    let chi_a = added_noise(t_a, eps_a);
    let chi_b = added_noise(t_b, eps_b);
    let g_sq = optimal_gain_sq(t_b, v_bob);
    let t_c = g_sq * t_a / 2.0;
    let eps_th = equivalent_excess_noise(t_a, t_b, chi_a, chi_b);
    let chi_t = 1.0 / t_c - 1.0 + eps_th;
    Ok(EquivalentChannel {
        t_a,
        t_b,
        chi_a,
        chi_b,
        g_sq,
        eps_th,
        chi_t,
        t_c,
    })
}

/// How a symmetric-link distance is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetricDistance {
    /// `L = L_AC + L_BC`.
    #[default]
    Total,
    /// `L = L_AC = L_BC`.
    PerArm,
}

/// How a distance is reported when `L_BC = d·L_AC`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioDistance {
    /// `L = L_AC·(1+d)`.
    #[default]
    Total,
    /// `L = L_AC·(1-d)`.
    Difference,
}

/// Placement of the relay, mapping a reported distance to the two arm lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Relay at Bob's site: `L_BC = 0`, `L = L_AC`.
    Asymmetric,
    Symmetric(SymmetricDistance),
    Ratio { d: f64, reported: RatioDistance },
}

impl Layout {
    /// Arm lengths `(L_AC, L_BC)` for a reported distance.
    pub fn arms(&self, distance: f64) -> Result<(f64, f64)> {
        if !(distance.is_finite() && distance >= 0.0) {
            return Err(Error::Distance(distance));
        }
        match *self {
            Layout::Asymmetric => Ok((distance, 0.0)),
            Layout::Symmetric(SymmetricDistance::Total) => Ok((distance / 2.0, distance / 2.0)),
            Layout::Symmetric(SymmetricDistance::PerArm) => Ok((distance, distance)),
            Layout::Ratio { d, reported } => {
                if !(0.0..=1.0).contains(&d) {
                    return Err(Error::Ratio(d));
                }
                let l_ac = match reported {
                    RatioDistance::Total => distance / (1.0 + d),
                    RatioDistance::Difference if d < 1.0 => distance / (1.0 - d),
                    RatioDistance::Difference => return Err(Error::Ratio(d)),
                };
                Ok((l_ac, d * l_ac))
            }
        }
    }

    pub fn geometry(&self, distance: f64, loss_mu: f64) -> Result<LinkGeometry> {
        let (l_ac, l_bc) = self.arms(distance)?;
        LinkGeometry::new(l_ac, l_bc, loss_mu)
    }
}

/// `(distance, ε_th)` over `distances` for the relay ratio `d`, with equal
/// excess noise `eps` on both links.
pub fn equivalent_excess_noise_curve(
    d: f64,
    reported: RatioDistance,
    distances: &[f64],
    eps: f64,
    loss_mu: f64,
) -> Result<Vec<(f64, f64)>> {
    validate_noise(eps)?;
    let layout = Layout::Ratio { d, reported };
    distances
        .iter()
        .map(|&distance| {
            let g = layout.geometry(distance, loss_mu)?;
            let t_a = fiber_transmittance(g.l_ac, g.loss_mu)?;
            let t_b = fiber_transmittance(g.l_bc, g.loss_mu)?;
            let eps_th = equivalent_excess_noise(t_a, t_b, added_noise(t_a, eps), added_noise(t_b, eps));
            Ok((distance, eps_th))
        })
        .collect()
}
