use crate::error::{Error, Result};

/// Lattice scale, asymmetry and macroscopic extent of one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub epsilon: f64,
    pub gamma: f64,
    pub window: f64,
    pub horizon: f64,
    pub sites: usize,
}

impl SimParams {
    /// Ring of `round(window / epsilon)` sites.
    pub fn new(epsilon: f64, gamma: f64, window: f64, horizon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "window must be positive, got {window}"
            )));
        }
        let sites = (window / epsilon).round() as usize;
        let p = Self {
            epsilon,
            gamma,
            window,
            horizon,
            sites,
        };
        p.validate()?;
        Ok(p)
    }

    /// Ring with an explicit site count; the window is `sites · epsilon`.
    pub fn with_sites(epsilon: f64, gamma: f64, sites: usize, horizon: f64) -> Result<Self> {
        let p = Self {
            epsilon,
            gamma,
            window: sites as f64 * epsilon,
            horizon,
            sites,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !self.gamma.is_finite() {
            return Err(Error::InvalidParams("gamma must be finite".into()));
        }
        if self.asymmetry().abs() > 1.0 {
            return Err(Error::InvalidParams(format!(
                "sqrt(epsilon)*|gamma| = {} exceeds 1",
                self.asymmetry().abs()
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.sites < 4 {
            return Err(Error::InvalidParams(format!(
                "need at least 4 sites, got {}",
                self.sites
            )));
        }
        if (self.sites as f64 * self.epsilon - self.window).abs() > self.epsilon {
            return Err(Error::InvalidParams(format!(
                "{} sites of spacing {} do not cover window {}",
                self.sites, self.epsilon, self.window
            )));
        }
        Ok(())
    }

    /// `√ε γ`
    pub fn asymmetry(&self) -> f64 {
        self.epsilon.sqrt() * self.gamma
    }

    pub fn right_rate(&self) -> f64 {
        1.0 + self.asymmetry()
    }

    pub fn left_rate(&self) -> f64 {
        1.0 - self.asymmetry()
    }

    pub fn to_micro(&self, t: f64) -> f64 {
        t / (self.epsilon * self.epsilon)
    }

    pub fn to_macro(&self, tau: f64) -> f64 {
        tau * self.epsilon * self.epsilon
    }
}
