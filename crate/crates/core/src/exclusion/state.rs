use rand::Rng;

use super::SimParams;

/// Occupation configuration `η ∈ {0,1}^L` on the ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinState {
    occupation: Vec<u8>,
    particles: usize,
}

/// Signed lattice coordinate of ring site `site`: sites `0..=L/2` sit at
/// `0..=L/2`, the rest wrap to negative coordinates.
pub fn coordinate(site: usize, sites: usize) -> i64 {
    if site <= sites / 2 {
        site as i64
    } else {
        site as i64 - sites as i64
    }
}

impl SpinState {
    pub fn from_occupation(occupation: Vec<u8>) -> Self {
        assert!(occupation.iter().all(|&v| v <= 1), "occupation must be 0/1");
        let particles = occupation.iter().map(|&v| v as usize).sum();
        Self {
            occupation,
            particles,
        }
    }

    /// Build from centred spins `ξ ∈ {-1, +1}`.
    pub fn from_spins(spins: &[i8]) -> Self {
        Self::from_occupation(
            spins
                .iter()
                .map(|&s| {
                    assert!(s == 1 || s == -1, "spins must be ±1");
                    u8::from(s == 1)
                })
                .collect(),
        )
    }

    pub fn filled(sites: usize) -> Self {
        Self::from_occupation(vec![1; sites])
    }

    pub fn empty(sites: usize) -> Self {
        Self::from_occupation(vec![0; sites])
    }

    pub fn sites(&self) -> usize {
        self.occupation.len()
    }

    pub fn particle_count(&self) -> usize {
        self.particles
    }

    pub fn occupation(&self) -> &[u8] {
        &self.occupation
    }

    pub fn occupied(&self, x: usize) -> bool {
        self.occupation[x] == 1
    }

    /// `ξ(x) = 2η(x) − 1`
    pub fn spin(&self, x: usize) -> i8 {
        2 * self.occupation[x] as i8 - 1
    }

    pub fn spins(&self) -> Vec<i8> {
        (0..self.sites()).map(|x| self.spin(x)).collect()
    }

    pub fn right(&self, x: usize) -> usize {
        (x + 1) % self.sites()
    }

    pub fn left(&self, x: usize) -> usize {
        (x + self.sites() - 1) % self.sites()
    }

    /// Swap the contents of `x` and `y`; particle number is unchanged.
    pub fn exchange(&mut self, x: usize, y: usize) {
        self.occupation.swap(x, y);
    }

    pub fn density(&self) -> f64 {
        self.particles as f64 / self.sites() as f64
    }
}

/// Bernoulli(1/2) product configuration drawn from `rng`.
pub fn sample_initial<R: Rng + ?Sized>(params: &SimParams, rng: &mut R) -> SpinState {
    let mut occupation = Vec::with_capacity(params.sites);
    let mut bits = 0u64;
    for i in 0..params.sites {
        if i % 64 == 0 {
            bits = rng.gen();
        }
        occupation.push((bits & 1) as u8);
        bits >>= 1;
    }
    SpinState::from_occupation(occupation)
}
