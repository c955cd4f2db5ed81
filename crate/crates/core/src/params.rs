use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real coefficients of
/// `∂_t u = α₀∂_{x₁}u + (α₁+iβ₁)Δu + α₂u + (α₃+iβ₃)|u|²u + (α₄+iβ₄)|u|⁴u + α₅|v|²u`.
///
/// `alpha0` (advection) and `alpha5` (cross-coupling) only enter the coupled
/// two-component system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CglParameters {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub beta3: f64,
    pub alpha4: f64,
    pub beta4: f64,
    pub alpha5: f64,
}

impl CglParameters {
    /// Cubic equation with the given linear and cubic coefficients.
    pub fn cubic(alpha1: f64, beta1: f64, alpha2: f64, alpha3: f64, beta3: f64) -> Self {
        Self {
            alpha1,
            beta1,
            alpha2,
            alpha3,
            beta3,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.alpha0,
            self.alpha1,
            self.beta1,
            self.alpha2,
            self.alpha3,
            self.beta3,
            self.alpha4,
            self.beta4,
            self.alpha5,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("CGL parameters".into()));
        }
        if self.alpha1 <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "alpha1 must be positive, got {}",
                self.alpha1
            )));
        }
        Ok(())
    }

    pub fn has_quintic(&self) -> bool {
        self.alpha4 != 0.0 || self.beta4 != 0.0
    }
}
