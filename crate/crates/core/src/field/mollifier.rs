use std::sync::OnceLock;

use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MollifierKind {
    /// `c · exp(-1/(1-u²))` on `(-1, 1)`
    Bump,
    /// `c · (1-u²)⁴` on `[-1, 1]`
    PolyBump,
}

impl MollifierKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bump" => Some(Self::Bump),
            "polybump" => Some(Self::PolyBump),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Bump => "bump",
            Self::PolyBump => "polybump",
        }
    }
}

/// Even unit-mass kernel `J` supported in `[-1, 1]`, used through its
/// rescalings `J_N(u) = N J(N u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    kind: MollifierKind,
    norm: f64,
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| integrate(raw_bump, -1.0, 1.0, 1.0 / 64.0))
}

fn raw_bump(u: f64) -> f64 {
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

impl Mollifier {
    pub fn new(kind: MollifierKind) -> Self {
        let norm = match kind {
            MollifierKind::Bump => 1.0 / bump_mass(),
            // ∫(1-u²)⁴ = 256/315
            MollifierKind::PolyBump => 315.0 / 256.0,
        };
        Self { kind, norm }
    }

    pub fn bump() -> Self {
        Self::new(MollifierKind::Bump)
    }

    pub fn poly_bump() -> Self {
        Self::new(MollifierKind::PolyBump)
    }

    pub fn kind(&self) -> MollifierKind {
        self.kind
    }

    /// Normalising constant `c`.
    pub fn constant(&self) -> f64 {
        self.norm
    }

    /// `J(u)`
    pub fn base(&self, u: f64) -> f64 {
        match self.kind {
            MollifierKind::Bump => self.norm * raw_bump(u),
            MollifierKind::PolyBump => {
                let s = 1.0 - u * u;
                if s <= 0.0 {
                    0.0
                } else {
                    self.norm * s.powi(4)
                }
            }
        }
    }

    /// `J_N(u) = N J(N u)`
    pub fn scaled(&self, n: f64, u: f64) -> f64 {
        n * self.base(n * u)
    }

    pub fn support_radius(&self, n: f64) -> f64 {
        1.0 / n
    }

    /// `∫ J_N(u) J_N(u - s) du = N ∫ J(v) J(v - N s) dv`
    pub fn overlap(&self, n: f64, shift: f64) -> f64 {
        let d = n * shift;
        if d.abs() >= 2.0 {
            return 0.0;
        }
        let (a, b) = ((d - 1.0).max(-1.0), (d + 1.0).min(1.0));
        n * integrate(|v| self.base(v) * self.base(v - d), a, b, 1.0 / 32.0)
    }

    /// `∫ J_N` by quadrature (equals 1 up to quadrature error).
    pub fn mass(&self, n: f64) -> f64 {
        integrate(|u| self.scaled(n, u), -1.0 / n, 1.0 / n, 1.0 / (64.0 * n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_constant() {
        // ∫_{-1}^{1} exp(-1/(1-u²)) du = 0.443993816168...
        assert!((bump_mass() - 0.443_993_816_168_079_4).abs() < 1e-12);
    }

    #[test]
    fn even_unit_mass_and_support() {
        for j in [Mollifier::bump(), Mollifier::poly_bump()] {
            for &u in &[0.0, 0.1, 0.5, 0.93, 1.2] {
                assert_eq!(j.base(u), j.base(-u));
            }
            for n in [1.0, 2.0, 4.0, 16.0, 32.0] {
                assert!((j.mass(n) - 1.0).abs() < 1e-10, "{:?} N={n}", j.kind());
                assert_eq!(j.scaled(n, 1.0 / n + 1e-12), 0.0);
                assert_eq!(j.scaled(n, -1.0 / n - 1e-12), 0.0);
            }
        }
    }

    #[test]
    fn overlap_is_even_and_integrates_to_one() {
        let j = Mollifier::bump();
        let n = 4.0;
        assert!((j.overlap(n, 0.1) - j.overlap(n, -0.1)).abs() < 1e-14);
        // ∫ K(s) ds = (∫J_N)² = 1
        let total = integrate(|s| j.overlap(n, s), -2.0 / n, 2.0 / n, 1.0 / 64.0);
        assert!((total - 1.0).abs() < 1e-9);
        assert_eq!(j.overlap(n, 0.51), 0.0);
    }
}
