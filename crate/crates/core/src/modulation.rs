//! Normalization constants and correlation coefficients of discrete
//! (four- and eight-state) and Gaussian coherent-state modulation.
//!
//! For a coherent state of mean photon number `α²`, the constant `λ_k` is
//! the probability that the photon number is congruent to `k` modulo the
//! constellation size. The cross-correlation of the entangled
//! representation is `Z = 2α² Σ_k λ_{k-1}^{3/2} / √λ_k` with the index
//! taken cyclically.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Above this amplitude the closed forms lose precision to cancellation
/// between `e^{-α²}` and the hyperbolic terms, so the Poisson sum is used.
const CLOSED_FORM_LIMIT: f64 = 30.0;

/// Denominators at or below this are treated as an exact zero.
const LAMBDA_FLOOR: f64 = 1e-300;

/// Squared coherent amplitude `α² = V_M / 2` in shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AmplitudeSq(f64);

impl AmplitudeSq {
    pub const ZERO: AmplitudeSq = AmplitudeSq(0.0);

    pub fn new(alpha_sq: f64) -> Result<Self> {
        if alpha_sq.is_finite() && alpha_sq >= 0.0 {
            Ok(Self(alpha_sq))
        } else {
            Err(Error::NegativeAmplitude(alpha_sq))
        }
    }

    /// Amplitude whose modulation variance `V_M = 2α²` equals `v_m`.
    pub fn from_modulation_variance(v_m: f64) -> Result<Self> {
        Self::new(v_m / 2.0)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn modulation_variance(self) -> f64 {
        2.0 * self.0
    }
}

impl TryFrom<f64> for AmplitudeSq {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<AmplitudeSq> for f64 {
    fn from(value: AmplitudeSq) -> f64 {
        value.0
    }
}

/// Modulation format of the prepared coherent states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Four,
    Eight,
    Gaussian,
}

impl Scheme {
    /// Constellation size, or `None` for Gaussian modulation.
    pub fn states(self) -> Option<usize> {
        match self {
            Scheme::Four => Some(4),
            Scheme::Eight => Some(8),
            Scheme::Gaussian => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Four => "four",
            Scheme::Eight => "eight",
            Scheme::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "four" | "4" => Ok(Scheme::Four),
            "eight" | "8" => Ok(Scheme::Eight),
            "gaussian" | "g" => Ok(Scheme::Gaussian),
            other => Err(format!("unknown modulation scheme `{other}` (expected four, eight or gaussian)")),
        }
    }
}

/// The `λ_k` array and correlation coefficient for one amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationConstants {
    pub scheme: Scheme,
    pub lambdas: Vec<f64>,
    pub z: f64,
    pub alpha_sq: f64,
}

impl ModulationConstants {
    pub fn new(scheme: Scheme, alpha_sq: AmplitudeSq) -> Self {
        let lambdas = match scheme {
            Scheme::Four => lambdas_four(alpha_sq).to_vec(),
            Scheme::Eight => lambdas_eight(alpha_sq).to_vec(),
            Scheme::Gaussian => Vec::new(),
        };
        let z = match scheme {
            Scheme::Gaussian => gaussian_z(alpha_sq.get()),
            _ => cyclic_z(alpha_sq.get(), &lambdas),
        };
        Self {
            scheme,
            lambdas,
            z,
            alpha_sq: alpha_sq.get(),
        }
    }
}

/// Eight-state constants `[λ_0, …, λ_7]`.
pub fn lambdas_eight(alpha_sq: AmplitudeSq) -> [f64; 8] {
    let x = alpha_sq.get();
    if x > CLOSED_FORM_LIMIT {
        let mut out = [0.0; 8];
        out.copy_from_slice(&poisson_residues(x, 8));
        out
    } else {
        lambdas_eight_closed_form(x).map(clamp_unit)
    }
}

/// Four-state constants `[λ_0, …, λ_3]`.
pub fn lambdas_four(alpha_sq: AmplitudeSq) -> [f64; 4] {
    let x = alpha_sq.get();
    if x > CLOSED_FORM_LIMIT {
        let mut out = [0.0; 4];
        out.copy_from_slice(&poisson_residues(x, 4));
        out
    } else {
        lambdas_four_closed_form(x).map(clamp_unit)
    }
}

/// Trigonometric/hyperbolic closed form of the eight-state constants,
/// evaluated without clamping or series fallback.
pub fn lambdas_eight_closed_form(x: f64) -> [f64; 8] {
    let pre = 0.25 * (-x).exp();
    let s = x / SQRT_2;
    let (ch, sh) = (x.cosh(), x.sinh());
    let (c, sn) = (x.cos(), x.sin());
    let (cs, ss) = (s.cos(), s.sin());
    let (chs, shs) = (s.cosh(), s.sinh());

    let even0 = ch + c;
    let odd0 = 2.0 * cs * chs;
    let even1 = sh + sn;
    let odd1 = SQRT_2 * (cs * shs + ss * chs);
    let even2 = ch - c;
    let odd2 = 2.0 * ss * shs;
    let even3 = sh - sn;
    let odd3 = SQRT_2 * (cs * shs - ss * chs);

    [
        pre * (even0 + odd0),
        pre * (even1 + odd1),
        pre * (even2 + odd2),
        pre * (even3 - odd3),
        pre * (even0 - odd0),
        pre * (even1 - odd1),
        pre * (even2 - odd2),
        pre * (even3 + odd3),
    ]
}

/// Closed form of the four-state constants.
pub fn lambdas_four_closed_form(x: f64) -> [f64; 4] {
    let pre = 0.5 * (-x).exp();
    let (ch, sh) = (x.cosh(), x.sinh());
    let (c, s) = (x.cos(), x.sin());
    [pre * (ch + c), pre * (sh + s), pre * (ch - c), pre * (sh - s)]
}

/// Correlation coefficient `Z` of `scheme` at amplitude `alpha_sq`.
pub fn correlation_z(scheme: Scheme, alpha_sq: AmplitudeSq) -> f64 {
    match scheme {
        Scheme::Four => cyclic_z(alpha_sq.get(), &lambdas_four(alpha_sq)),
        Scheme::Eight => cyclic_z(alpha_sq.get(), &lambdas_eight(alpha_sq)),
        Scheme::Gaussian => gaussian_z(alpha_sq.get()),
    }
}

// sqrt((2x+1)^2 - 1) written without the cancellation at small x
fn gaussian_z(x: f64) -> f64 {
    2.0 * (x * (x + 1.0)).sqrt()
}

fn cyclic_z(x: f64, lambdas: &[f64]) -> f64 {
    let n = lambdas.len();
    let sum: f64 = (0..n)
        .map(|k| {
            let here = lambdas[k];
            let prev = lambdas[(k + n - 1) % n];
            if here <= LAMBDA_FLOOR {
                0.0
            } else {
                prev.powf(1.5) / here.sqrt()
            }
        })
        .sum();
    2.0 * x * sum
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Photon-number distribution of a coherent state folded modulo `modulus`,
/// summed outward from the mode in log space so that large `x` does not
/// underflow `e^{-x}`.
fn poisson_residues(x: f64, modulus: usize) -> Vec<f64> {
    let mut bins = vec![0.0; modulus];
    if x == 0.0 {
        bins[0] = 1.0;
        return bins;
    }
    let ln_x = x.ln();
    let mode = x.floor();
    let ln_mode_term = -x + mode * ln_x - ln_gamma(mode + 1.0);
    let mode_idx = mode as usize;

    let mut ln_t = ln_mode_term;
    let mut n = mode_idx;
    loop {
        let t = ln_t.exp();
        bins[n % modulus] += t;
        n += 1;
        ln_t += ln_x - (n as f64).ln();
        if t < 1e-18 && n as f64 > x {
            break;
        }
    }

    let mut ln_t = ln_mode_term;
    let mut n = mode_idx;
    while n > 0 {
        ln_t -= ln_x - (n as f64).ln();
        n -= 1;
        let t = ln_t.exp();
        bins[n % modulus] += t;
        if t < 1e-18 {
            break;
        }
    }
    bins
}
