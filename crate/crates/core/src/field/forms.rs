//! Banded spin polynomials of degree at most two, evaluated once and then
//! updated in `O(band)` per spin flip.

/// A family of `outputs` polynomials
/// `c_k + Σ_x l_k(x) ξ(x) + Σ_x Σ_{d=1..band} q_k(x, d) ξ(x) ξ(x+d)`
/// on a ring of `sites` spins (indices periodic).
#[derive(Debug, Clone)]
pub struct SpinForms {
    sites: usize,
    band: usize,
    outputs: usize,
    constant: Vec<f64>,
    linear: Vec<f64>,
    pair: Vec<f64>,
}

impl SpinForms {
    pub fn new(sites: usize, band: usize, outputs: usize) -> Self {
        assert!(
            band >= 1 && 2 * band < sites,
            "band {band} too wide for {sites} sites"
        );
        Self {
            sites,
            band,
            outputs,
            constant: vec![0.0; outputs],
            linear: vec![0.0; sites * outputs],
            pair: vec![0.0; sites * band * outputs],
        }
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn add_constant(&mut self, k: usize, c: f64) {
        self.constant[k] += c;
    }

    pub fn add_linear(&mut self, k: usize, x: usize, c: f64) {
        self.linear[x * self.outputs + k] += c;
    }

    /// Add `c ξ(x) ξ(y)`; `ξ(x)² = 1` folds into the constant.
    pub fn add_product(&mut self, k: usize, x: usize, y: usize, c: f64) {
        if x == y {
            self.add_constant(k, c);
            return;
        }
        let d = (y + self.sites - x) % self.sites;
        let (base, off) = if d <= self.band {
            (x, d)
        } else if self.sites - d <= self.band {
            (y, self.sites - d)
        } else {
            panic!(
                "sites {x} and {y} are farther apart than the band {}",
                self.band
            );
        };
        self.pair[(base * self.band + off - 1) * self.outputs + k] += c;
    }

    pub fn evaluate(&self, spins: &[i8], out: &mut [f64]) {
        out.copy_from_slice(&self.constant);
        let k = self.outputs;
        for x in 0..self.sites {
            let sx = spins[x] as f64;
            let lin = &self.linear[x * k..(x + 1) * k];
            for (o, l) in out.iter_mut().zip(lin) {
                *o += l * sx;
            }
            for d in 1..=self.band {
                let s = sx * spins[(x + d) % self.sites] as f64;
                let q = &self.pair[(x * self.band + d - 1) * k..(x * self.band + d) * k];
                for (o, c) in out.iter_mut().zip(q) {
                    *o += c * s;
                }
            }
        }
    }

    /// Add to `out` the change of every output when spin `a` flips.
    pub fn flip_delta(&self, spins: &[i8], a: usize, out: &mut [f64]) {
        let k = self.outputs;
        let l = self.sites;
        let factor = -2.0 * spins[a] as f64;
        let lin = &self.linear[a * k..(a + 1) * k];
        for (o, c) in out.iter_mut().zip(lin) {
            *o += factor * c;
        }
        for d in 1..=self.band {
            let sp = factor * spins[(a + d) % l] as f64;
            let b = (a + l - d) % l;
            let sm = factor * spins[b] as f64;
            let qa = &self.pair[(a * self.band + d - 1) * k..(a * self.band + d) * k];
            let qb = &self.pair[(b * self.band + d - 1) * k..(b * self.band + d) * k];
            for ((o, ca), cb) in out.iter_mut().zip(qa).zip(qb) {
                *o += ca * sp + cb * sm;
            }
        }
    }
}
