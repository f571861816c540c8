//! Zero-photon catalysis on Alice's arm, modelled as a heralded noiseless
//! attenuation `α → √T·α` that succeeds with probability `e^{α²(T-1)}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulation::AmplitudeSq;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZpcSetting {
    pub enabled: bool,
    pub transmittance_t: f64,
}

impl ZpcSetting {
    pub const OFF: ZpcSetting = ZpcSetting {
        enabled: false,
        transmittance_t: 1.0,
    };

    pub fn on(transmittance_t: f64) -> Result<Self> {
        validate_transmittance(transmittance_t)?;
        Ok(Self {
            enabled: true,
            transmittance_t,
        })
    }

    /// Attenuation actually applied; 1 when catalysis is off.
    pub fn effective_t(&self) -> f64 {
        if self.enabled {
            self.transmittance_t
        } else {
            1.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.enabled {
            validate_transmittance(self.transmittance_t)
        } else {
            Ok(())
        }
    }
}

impl Default for ZpcSetting {
    fn default() -> Self {
        Self::OFF
    }
}

pub fn validate_transmittance(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::Transmittance(t))
    }
}

/// Returns the attenuated amplitude and the heralding success probability.
pub fn apply_zpc(alpha_sq: AmplitudeSq, setting: ZpcSetting) -> Result<(AmplitudeSq, f64)> {
    setting.validate()?;
    if !setting.enabled {
        return Ok((alpha_sq, 1.0));
    }
    let t = setting.transmittance_t;
    let x = alpha_sq.get();
    let attenuated = AmplitudeSq::new(t * x)?;
    Ok((attenuated, (x * (t - 1.0)).exp()))
}
