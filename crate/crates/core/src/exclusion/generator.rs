use nalgebra::DMatrix;

use super::{SimParams, SpinState};
use crate::error::{Error, Result};

pub const MAX_ORACLE_SITES: usize = 12;

/// `L_ε ξ(x) = [ξ(x−1) − 2ξ(x) + ξ(x+1)] + √εγ [ξ(x)ξ(x+1) − ξ(x−1)ξ(x)]`
pub fn apply_generator_local(state: &SpinState, x: usize, params: &SimParams) -> f64 {
    let (l, c, r) = (
        state.spin(state.left(x)) as f64,
        state.spin(x) as f64,
        state.spin(state.right(x)) as f64,
    );
    (l - 2.0 * c + r) + params.asymmetry() * (c * r - l * c)
}

/// Index of `state` in the dense enumeration: bit `x` holds `η(x)`.
pub fn state_index(state: &SpinState) -> usize {
    state
        .occupation()
        .iter()
        .enumerate()
        .map(|(x, &v)| (v as usize) << x)
        .sum()
}

fn state_from_index(index: usize, sites: usize) -> SpinState {
    SpinState::from_occupation((0..sites).map(|x| ((index >> x) & 1) as u8).collect())
}

/// Dense rate matrix `Q` on all `2^L` configurations; `Q[i][j]` is the rate
/// of the single exchange taking configuration `i` to `j`, rows sum to zero.
pub fn exact_generator_matrix(params: &SimParams) -> Result<DMatrix<f64>> {
    let l = params.sites;
    if l > MAX_ORACLE_SITES {
        return Err(Error::OracleTooLarge {
            sites: l,
            max: MAX_ORACLE_SITES,
        });
    }
    let n = 1usize << l;
    let mut q = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let s = state_from_index(i, l);
        for x in 0..l {
            if !s.occupied(x) {
                continue;
            }
            for (y, rate) in [
                (s.right(x), params.right_rate()),
                (s.left(x), params.left_rate()),
            ] {
                if !s.occupied(y) && rate > 0.0 {
                    let j = i ^ (1 << x) ^ (1 << y);
                    q[(i, j)] += rate;
                    q[(i, i)] -= rate;
                }
            }
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(sites: usize) -> SimParams {
        SimParams::with_sites(0.04, 1.0, sites, 1.0).unwrap()
    }

    #[test]
    fn local_generator_examples() {
        let pp = p(4);
        let a = 0.2; // √0.04 · 1
        let s = SpinState::from_spins(&[1, 1, 1, 1]);
        assert_eq!(apply_generator_local(&s, 1, &pp), 0.0);
        let s = SpinState::from_spins(&[-1, 1, -1, 1]);
        assert!((apply_generator_local(&s, 1, &pp) + 4.0).abs() < 1e-12);
        let s = SpinState::from_spins(&[1, 1, -1, 1]);
        assert!((apply_generator_local(&s, 1, &pp) - (-2.0 - 2.0 * a)).abs() < 1e-12);
    }

    #[test]
    fn rows_sum_to_zero_and_entries_match_rates() {
        let pp = p(6);
        let q = exact_generator_matrix(&pp).unwrap();
        for i in 0..q.nrows() {
            assert!(q.row(i).sum().abs() < 1e-12);
        }
        let pp = p(4);
        let q = exact_generator_matrix(&pp).unwrap();
        let from = state_index(&SpinState::from_occupation(vec![1, 0, 0, 0]));
        let to = state_index(&SpinState::from_occupation(vec![0, 1, 0, 0]));
        let back = state_index(&SpinState::from_occupation(vec![0, 0, 0, 1]));
        assert!((q[(from, to)] - 1.2).abs() < 1e-12);
        assert!((q[(from, back)] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn too_large_rejected() {
        let pp = SimParams::with_sites(0.01, 1.0, 13, 1.0).unwrap();
        assert!(matches!(
            exact_generator_matrix(&pp),
            Err(Error::OracleTooLarge { sites: 13, .. })
        ));
    }

    #[test]
    fn uniform_measure_on_each_sector_is_stationary() {
        let pp = p(7);
        let q = exact_generator_matrix(&pp).unwrap();
        let n = q.nrows();
        for k in 0..=7u32 {
            // πQ = 0 with π uniform on configurations with k particles.
            for j in 0..n {
                let flux: f64 = (0..n)
                    .filter(|i| i.count_ones() == k)
                    .map(|i| q[(i, j)])
                    .sum();
                assert!(flux.abs() < 1e-12, "sector {k}, column {j}: {flux}");
            }
        }
    }

    #[test]
    fn drift_identity_matches_local_generator() {
        // (Q f)(η) for f(η) = ξ(x) equals the local generator formula.
        let pp = p(6);
        let q = exact_generator_matrix(&pp).unwrap();
        let n = q.nrows();
        for x in 0..6 {
            let f: Vec<f64> = (0..n)
                .map(|i| if (i >> x) & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            for i in 0..n {
                let qf: f64 = (0..n).map(|j| q[(i, j)] * f[j]).sum();
                let s = state_from_index(i, 6);
                assert!((qf - apply_generator_local(&s, x, &pp)).abs() < 1e-12);
            }
        }
    }
}
