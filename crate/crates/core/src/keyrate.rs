//! Covariance matrix of Alice's and Bob's retained modes and the secret key
//! rate under collective Gaussian attacks with reverse reconciliation.

use serde::{Deserialize, Serialize};

use crate::channel::{equivalent_channel, EquivalentChannel};
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::modulation::correlation_z;
use crate::zpc::apply_zpc;

/// Symplectic eigenvalues below `1 - PHYSICAL_TOL` mark a state as unphysical.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// Entries of `γ = [[a·I, c·σ_z], [c·σ_z, b·I]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalCovariance {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    pub kappa1: f64,
    pub kappa2: f64,
    /// Eigenvalue of Alice's mode conditioned on Bob's heterodyne outcome.
    pub kappa3: f64,
    pub physical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateResult {
    pub p_d: f64,
    /// `T·α²` after catalysis.
    pub attenuated_alpha_sq: f64,
    pub z: f64,
    pub channel: EquivalentChannel,
    pub covariance: FinalCovariance,
    pub i_ab: f64,
    pub chi_be: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    /// `P_d·(β·I_AB − χ_BE)`; `None` when the state is not physical.
    pub skr: Option<f64>,
    pub physical: bool,
    /// Effective modulation variance exceeds the Gaussian-channel domain.
    pub domain_warning: bool,
}

impl KeyRateResult {
    /// Key rate as a plain number for maximization; unphysical points never win.
    pub fn objective(&self) -> f64 {
        self.skr.unwrap_or(f64::NEG_INFINITY)
    }
}

/// `(a, b, c)` of the final covariance matrix, together with the channel
/// it was built from and the catalysis bookkeeping.
fn assemble(config: &ProtocolConfig) -> Result<(FinalCovariance, EquivalentChannel, f64, f64, f64)> {
    config.validate()?;
    let alpha_sq = config.alpha_sq()?;
    let (attenuated, p_d) = apply_zpc(alpha_sq, config.zpc)?;
    let z = correlation_z(config.scheme, attenuated);
    let channel = equivalent_channel(&config.geometry, config.eps_a, config.eps_b, config.variance_v)?;
    let a = 1.0 + 2.0 * attenuated.get();
    let cov = FinalCovariance {
        a,
        b: channel.t_c * (a + channel.chi_t),
        c: channel.t_c.sqrt() * z,
    };
    Ok((cov, channel, p_d, attenuated.get(), z))
}

pub fn final_covariance(config: &ProtocolConfig) -> Result<FinalCovariance> {
    assemble(config).map(|(cov, ..)| cov)
}

/// Shannon mutual information of Alice's and Bob's heterodyne outcomes.
pub fn mutual_information(cov: &FinalCovariance) -> Result<f64> {
    let bound = (cov.a + 1.0) * (cov.b + 1.0);
    let c_sq = cov.c * cov.c;
    if !(c_sq < bound) {
        return Err(Error::NonPhysicalCorrelation { c_sq, bound });
    }
    // log2[(a+1)/(a+1 - c²/(b+1))] = -log2(1 - c²/((a+1)(b+1)))
    Ok(-(-c_sq / bound).ln_1p() / std::f64::consts::LN_2)
}

/// `G(x) = (x+1)·log₂(x+1) − x·log₂x`, the entropy of a thermal state with
/// mean photon number `x`.
pub fn von_neumann_g(x: f64) -> Result<f64> {
    if x.is_nan() || x < -PHYSICAL_TOL {
        return Err(Error::EntropyArgument(x));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

pub fn symplectic_eigenvalues(cov: &FinalCovariance) -> SymplecticSpectrum {
    let FinalCovariance { a, b, c } = *cov;
    let c_sq = c * c;
    let delta = a * a + b * b - 2.0 * c_sq;
    let f = a * b - c_sq;
    // Δ² − 4F² factored as (a−b)²·((a+b)² − 4c²)
    let disc = (a - b) * (a - b) * ((a + b) * (a + b) - 4.0 * c_sq);
    let kappa3 = a - c_sq / (b + 1.0);

    if !(f > 0.0 && disc >= 0.0) || !delta.is_finite() {
        return SymplecticSpectrum {
            kappa1: f64::NAN,
            kappa2: f64::NAN,
            kappa3,
            physical: false,
        };
    }
    let root = disc.sqrt();
    let kappa1 = ((delta + root) / 2.0).sqrt();
    let kappa2 = ((delta - root) / 2.0).max(0.0).sqrt();
    let physical = [kappa1, kappa2, kappa3]
        .iter()
        .all(|k| k.is_finite() && *k >= 1.0 - PHYSICAL_TOL);
    SymplecticSpectrum {
        kappa1,
        kappa2,
        kappa3,
        physical,
    }
}

fn holevo_from_spectrum(s: &SymplecticSpectrum) -> Result<f64> {
    if !s.physical {
        return Err(Error::NonPhysical);
    }
    let g = |k: f64| von_neumann_g((k - 1.0) / 2.0);
    Ok(g(s.kappa1)? + g(s.kappa2)? - g(s.kappa3)?)
}

/// Holevo information between Bob's measurement and Eve.
pub fn holevo_bound(cov: &FinalCovariance) -> Result<f64> {
    holevo_from_spectrum(&symplectic_eigenvalues(cov))
}

/// Full key-rate evaluation. Invalid configurations are errors; an
/// unphysical covariance is reported through `physical = false`.
pub fn secret_key_rate(config: &ProtocolConfig) -> Result<KeyRateResult> {
    let (cov, channel, p_d, attenuated_alpha_sq, z) = assemble(config)?;
    let spectrum = symplectic_eigenvalues(&cov);
    let i_ab = mutual_information(&cov);
    let chi_be = holevo_from_spectrum(&spectrum);

    let mut result = KeyRateResult {
        p_d,
        attenuated_alpha_sq,
        z,
        channel,
        covariance: cov,
        i_ab: f64::NAN,
        chi_be: f64::NAN,
        kappa1: spectrum.kappa1,
        kappa2: spectrum.kappa2,
        kappa3: spectrum.kappa3,
        skr: None,
        physical: false,
        domain_warning: config.warn_domain(),
    };
    if let (Ok(i_ab), Ok(chi_be)) = (i_ab, chi_be) {
        result.i_ab = i_ab;
        result.chi_be = chi_be;
        let skr = p_d * (config.beta * i_ab - chi_be);
        if skr.is_finite() {
            result.skr = Some(skr);
            result.physical = true;
        }
    }
    Ok(result)
}

/// Reconciliation efficiency at which the key rate crosses zero.
pub fn beta_threshold(result: &KeyRateResult) -> f64 {
    result.chi_be / result.i_ab
}
