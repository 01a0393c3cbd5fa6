/// Dirichlet eigenbasis of `-d²/dt²` on `[0, T]`, normalised in `L²`:
/// `g_m(t) = √(2/T) sin(mπt/T)`, eigenvalue `(mπ/T)²`.
#[derive(Debug, Clone, Copy)]
pub struct DirichletBasis {
    horizon: f64,
}

impl DirichletBasis {
    pub fn new(horizon: f64) -> Self {
        assert!(horizon > 0.0, "horizon must be positive");
        Self { horizon }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn freq(&self, m: usize) -> f64 {
        m as f64 * std::f64::consts::PI / self.horizon
    }

    fn amp(&self) -> f64 {
        (2.0 / self.horizon).sqrt()
    }

    pub fn eigenvalue(&self, m: usize) -> f64 {
        self.freq(m).powi(2)
    }

    pub fn eval(&self, m: usize, t: f64) -> f64 {
        self.amp() * (self.freq(m) * t).sin()
    }

    pub fn deriv(&self, m: usize, t: f64) -> f64 {
        self.amp() * self.freq(m) * (self.freq(m) * t).cos()
    }

    pub fn second_deriv(&self, m: usize, t: f64) -> f64 {
        -self.eigenvalue(m) * self.eval(m, t)
    }

    /// An antiderivative of `g_m`; differences give exact integrals.
    pub fn antiderivative(&self, m: usize, t: f64) -> f64 {
        -self.amp() / self.freq(m) * (self.freq(m) * t).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn boundary_values_and_orthonormality() {
        let b = DirichletBasis::new(0.25);
        for m in 1..=8 {
            assert!(b.eval(m, 0.0).abs() < 1e-15);
            assert!(b.eval(m, 0.25).abs() < 1e-13);
            for k in 1..=8 {
                let ip = integrate(|t| b.eval(m, t) * b.eval(k, t), 0.0, 0.25, 0.01);
                let expect = if m == k { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eigen_relation_and_antiderivative() {
        let b = DirichletBasis::new(1.7);
        let h = 1e-4;
        for m in 1..=5 {
            for &t in &[0.13, 0.8, 1.5] {
                let fd = (b.eval(m, t + h) - 2.0 * b.eval(m, t) + b.eval(m, t - h)) / (h * h);
                assert!((fd - b.second_deriv(m, t)).abs() < 1e-5 * b.eigenvalue(m));
                if b.eval(m, t).abs() > 1e-3 {
                    let rel = (-b.second_deriv(m, t) - b.eigenvalue(m) * b.eval(m, t)).abs()
                        / (b.eigenvalue(m) * b.eval(m, t)).abs();
                    assert!(rel < 1e-8);
                }
            }
            let exact = integrate(|t| b.eval(m, t), 0.2, 1.1, 0.01);
            let anti = b.antiderivative(m, 1.1) - b.antiderivative(m, 0.2);
            assert!((exact - anti).abs() < 1e-12);
        }
    }
}
