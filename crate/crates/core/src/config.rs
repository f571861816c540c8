use serde::{Deserialize, Serialize};

use crate::channel::{Layout, LinkGeometry};
use crate::error::{Error, Result};
use crate::modulation::{AmplitudeSq, Scheme};
use crate::zpc::ZpcSetting;

pub const DEFAULT_BETA: f64 = 0.95;
pub const DEFAULT_EPS: f64 = 0.002;

/// Largest effective modulation variance for which the links are known to
/// be Gaussian.
pub const GAUSSIAN_DOMAIN_LIMIT: f64 = 0.5;

/// Full description of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub scheme: Scheme,
    pub zpc: ZpcSetting,
    /// Total variance `V = 1 + V_M` of the prepared states.
    pub variance_v: f64,
    pub beta: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub geometry: LinkGeometry,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Eight,
            zpc: ZpcSetting::OFF,
            variance_v: 1.5,
            beta: DEFAULT_BETA,
            eps_a: DEFAULT_EPS,
            eps_b: DEFAULT_EPS,
            geometry: LinkGeometry::default(),
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.variance_v.is_finite() && self.variance_v > 1.0) {
            return Err(Error::Variance(self.variance_v));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Beta(self.beta));
        }
        for eps in [self.eps_a, self.eps_b] {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::ExcessNoise(eps));
            }
        }
        self.zpc.validate()?;
        self.geometry.validate()
    }

    /// Unattenuated `α² = (V-1)/2`.
    pub fn alpha_sq(&self) -> Result<AmplitudeSq> {
        AmplitudeSq::from_modulation_variance(self.variance_v - 1.0)
    }

    /// `T·V_M`, the modulation variance that actually leaves Alice.
    pub fn effective_modulation_variance(&self) -> f64 {
        self.zpc.effective_t() * (self.variance_v - 1.0)
    }

    /// True when the effective modulation variance lies outside the range
    /// where the Gaussian-channel argument holds.
    pub fn warn_domain(&self) -> bool {
        self.effective_modulation_variance() > GAUSSIAN_DOMAIN_LIMIT
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_a = eps;
        self.eps_b = eps;
        self
    }

    pub fn with_zpc(mut self, zpc: ZpcSetting) -> Self {
        self.zpc = zpc;
        self
    }

    pub fn with_transmittance(mut self, t: f64) -> Self {
        self.zpc = ZpcSetting {
            enabled: true,
            transmittance_t: t,
        };
        self
    }

    pub fn with_variance(mut self, v: f64) -> Self {
        self.variance_v = v;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_arms(mut self, l_ac: f64, l_bc: f64) -> Self {
        self.geometry.l_ac = l_ac;
        self.geometry.l_bc = l_bc;
        self
    }

    /// Places the relay according to `layout` at the reported `distance`.
    pub fn at_distance(self, layout: Layout, distance: f64) -> Result<Self> {
        let (l_ac, l_bc) = layout.arms(distance)?;
        Ok(self.with_arms(l_ac, l_bc))
    }
}
