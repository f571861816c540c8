//! Fixtures shared by the criterion benches.

use dmcv_core::{Layout, ProtocolConfig, Scheme, ZpcSetting};

/// Eight-state, catalysed, relay at Bob's site.
pub fn eight_zpc_asymmetric(l_ac: f64) -> ProtocolConfig {
    ProtocolConfig {
        scheme: Scheme::Eight,
        zpc: ZpcSetting::on(0.3).expect("valid transmittance"),
        variance_v: 2.6,
        ..ProtocolConfig::default()
    }
    .with_arms(l_ac, 0.0)
}

pub fn four_plain_symmetric(distance: f64) -> ProtocolConfig {
    ProtocolConfig {
        scheme: Scheme::Four,
        variance_v: 1.5,
        ..ProtocolConfig::default()
    }
    .at_distance(Layout::Symmetric(Default::default()), distance)
    .expect("valid distance")
}
