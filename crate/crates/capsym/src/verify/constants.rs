//! Constants entering the exponential (Moser-Trudinger type) inequality.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gauge::GaugeDescriptor;

/// Which normalization of the critical exponent multiplier to use. The two
/// conventions differ by the constant inside the `1/(n-1)` root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoserConvention {
    /// `lambda_tilde_n = n (n kappa_tilde_n / 2)^{1/(n-1)}`.
    Proposition,
    /// `lambda_tilde_n = n (2 n kappa_tilde_n)^{1/(n-1)}`.
    Theorem,
}

/// The pair `(kappa_tilde_n, lambda_tilde_n)` for a capillary gauge:
/// `kappa_tilde_n` is the volume of the unit Wulff ball of the gauge and
/// `lambda_tilde_n` the critical multiplier of the exponential functional.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MoserConstants {
    pub lambda: f64,
    pub n: usize,
    pub kappa_tilde: f64,
    pub lambda_tilde: f64,
    pub convention: MoserConvention,
}

impl MoserConstants {
    pub fn new(lambda: f64, n: usize, convention: MoserConvention) -> Result<Self> {
        let gauge = GaugeDescriptor::capillary_half_space(lambda, n)?;
        let kappa_tilde = gauge.wulff_ball_volume(None)?;
        Ok(Self::from_kappa(lambda, n, kappa_tilde, convention))
    }

    pub fn from_kappa(lambda: f64, n: usize, kappa_tilde: f64, convention: MoserConvention) -> Self {
        let nf = n as f64;
        let base = match convention {
            MoserConvention::Proposition => nf * kappa_tilde / 2.0,
            MoserConvention::Theorem => 2.0 * nf * kappa_tilde,
        };
        MoserConstants {
            lambda,
            n,
            kappa_tilde,
            lambda_tilde: nf * base.powf(1.0 / (nf - 1.0)),
            convention,
        }
    }
}
