//! Builders for `M_n(τ)`, the dynamic factor observation panel and `Φ_n(τ)`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand_distr::{Distribution, StandardNormal};

use crate::noise::{
    sample_panel, stream_rng, DistributionKind, NoisePanel, SimulationConfig, FACTOR_STREAM_BASE,
    LOADING_STREAM_BASE,
};
use crate::{Error, Result, C64};

/// Dense `n × n` complex Hermitian matrix stored row-major in full.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<C64>,
}

impl HermitianMatrix {
    /// Accepts row-major data only if `a[i][j] == conj(a[j][i])` holds bit-for-bit.
    pub fn from_rows(n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if data.len() != n * n {
            return Err(Error::Config("matrix data length is not n*n"));
        }
        for i in 0..n {
            for j in i..n {
                if data[i * n + j] != data[j * n + i].conj() {
                    return Err(Error::NotHermitian { row: i, col: j });
                }
            }
        }
        Ok(HermitianMatrix { n, data })
    }

    /// Builds the matrix from its upper triangle; the lower triangle is the
    /// exact conjugate and the diagonal keeps only its real part.
    pub fn from_upper<F: FnMut(usize, usize) -> C64>(n: usize, mut upper: F) -> Self {
        let mut data = alloc::vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = C64::new(upper(i, i).re, 0.0);
            for j in i + 1..n {
                let v = upper(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v.conj();
            }
        }
        HermitianMatrix { n, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_upper(diag.len(), |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest absolute row sum; an upper bound for the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn neg(&self) -> Self {
        HermitianMatrix {
            n: self.n,
            data: self.data.iter().map(|z| -z).collect(),
        }
    }

    /// `P A Pᵀ` where row `i` of the result is row `perm[i]` of `A`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        Self::from_upper(self.n, |i, j| self.get(perm[i], perm[j]))
    }
}

/// `(B + B*) / (2T)` with `B_ij = Σ_{s<T} x_i[s]·conj(x_j[s+τ])`, where `rows`
/// is an `n × cols` row-major array.
fn symmetrized_lag_covariance(
    rows: &[C64],
    n: usize,
    cols: usize,
    t: usize,
    tau: usize,
) -> Result<HermitianMatrix> {
    if t == 0 || t + tau > cols {
        return Err(Error::Dimension {
            needed: t + tau,
            available: cols,
        });
    }
    let scale = 2.0 * t as f64;
    let row = |i: usize| &rows[i * cols..(i + 1) * cols];
    let lagged = |a: &[C64], b: &[C64]| -> C64 {
        a[..t]
            .iter()
            .zip(&b[tau..tau + t])
            .fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj())
    };
    let mut data = alloc::vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let ri = row(i);
        for j in i..n {
            let rj = row(j);
            let bij = lagged(ri, rj);
            let bji = if i == j { bij } else { lagged(rj, ri) };
            let v = (bij + bji.conj()) / scale;
            data[i * n + j] = v;
            data[j * n + i] = v.conj();
        }
    }
    Ok(HermitianMatrix { n, data })
}

/// `M_n(τ) = (1/2T)(E E*_τ + E_τ E*)` with `E` the first `T` columns of the
/// panel and `E_τ` columns `τ..T+τ`.
pub fn build_m_tau(panel: &NoisePanel, tau: usize) -> Result<HermitianMatrix> {
    symmetrized_lag_covariance(
        panel.entries(),
        panel.rows(),
        panel.cols(),
        panel.config.t,
        tau,
    )
}

/// Real `n × k` loading matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Loadings {
    pub n: usize,
    pub k: usize,
    pub values: Vec<f64>,
}

impl Loadings {
    pub fn zeros(n: usize, k: usize) -> Self {
        Loadings {
            n,
            k,
            values: alloc::vec![0.0; n * k],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.k + j]
    }

    /// I.i.d. standard normal entries with every column rescaled to Euclidean norm `strength`.
    pub fn random(n: usize, k: usize, strength: f64, seed: u64, stream: u64) -> Self {
        let mut rng = stream_rng(seed, stream);
        let mut values: Vec<f64> = (0..n * k)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        for j in 0..k {
            let norm = (0..n)
                .map(|i| values[i * k + j].powi(2))
                .sum::<f64>()
                .sqrt();
            for i in 0..n {
                values[i * k + j] *= strength / norm;
            }
        }
        Loadings { n, k, values }
    }
}

/// Dynamic `k`-factor model `R_t = Σ_{i=0}^{q} Λ_i F_{t−i} + e_t`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FactorModelConfig {
    pub k: usize,
    pub q: usize,
    /// `Λ_0, …, Λ_q`.
    pub loadings: Vec<Loadings>,
    pub factor_dist: DistributionKind,
    pub noise_dist: DistributionKind,
    /// Multiplies every factor draw; 0 switches the signal off.
    pub factor_scale: f64,
    /// `base.tau` is the largest lag the panel must support.
    pub base: SimulationConfig,
}

impl FactorModelConfig {
    /// Pure noise (`k = 0`).
    pub fn noise_only(base: SimulationConfig, noise_dist: DistributionKind) -> Self {
        FactorModelConfig {
            k: 0,
            q: 0,
            loadings: alloc::vec![Loadings::zeros(base.n, 0)],
            factor_dist: DistributionKind::ComplexGaussian,
            noise_dist,
            factor_scale: 1.0,
            base,
        }
    }

    /// Independent random loadings per lag, each column of norm `strength`.
    /// They use a stream range that panels never touch, so `loading_seed`
    /// may equal the panel seed.
    pub fn with_random_loadings(
        base: SimulationConfig,
        k: usize,
        q: usize,
        strength: f64,
        loading_seed: u64,
    ) -> Self {
        let loadings = (0..=q)
            .map(|lag| {
                Loadings::random(
                    base.n,
                    k,
                    strength,
                    loading_seed,
                    LOADING_STREAM_BASE + lag as u64,
                )
            })
            .collect();
        FactorModelConfig {
            k,
            q,
            loadings,
            factor_dist: DistributionKind::ComplexGaussian,
            noise_dist: DistributionKind::ComplexGaussian,
            factor_scale: 1.0,
            base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.loadings.len() != self.q + 1 {
            return Err(Error::Config("need q + 1 loading matrices"));
        }
        if self
            .loadings
            .iter()
            .any(|l| l.n != self.base.n || l.k != self.k || l.values.len() != l.n * l.k)
        {
            return Err(Error::Config("loading matrix must be n x k"));
        }
        Ok(())
    }
}

/// Observations `R_1, …, R_{T+τ_max}` stored row-major `n × (T+τ_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationPanel {
    entries: Vec<C64>,
    pub model: FactorModelConfig,
    pub seed: u64,
}

impl ObservationPanel {
    pub fn rows(&self) -> usize {
        self.model.base.n
    }

    pub fn cols(&self) -> usize {
        self.model.base.columns()
    }

    pub fn sample_length(&self) -> usize {
        self.model.base.t
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, i: usize, t: usize) -> C64 {
        self.entries[i * self.cols() + t]
    }
}

/// Column `t` equals `Σ_i Λ_i F_{t−i} + e_t`. Factors are drawn for every
/// time index from `1 − q` on, so early columns see the stationary law.
pub fn simulate_factor_panel(fc: &FactorModelConfig, seed: u64) -> Result<ObservationPanel> {
    fc.validate()?;
    let noise = sample_panel(fc.base, fc.noise_dist, seed)?;
    let (n, cols, k, q) = (fc.base.n, fc.base.columns(), fc.k, fc.q);
    let mut entries = noise.into_entries();
    if k == 0 {
        return Ok(ObservationPanel {
            entries,
            model: fc.clone(),
            seed,
        });
    }
    // factors[s * k + j] is factor j at time index s − q (0-based time).
    let factors: Vec<C64> = (0..cols + q)
        .flat_map(|s| {
            let mut rng = stream_rng(seed, FACTOR_STREAM_BASE + s as u64);
            (0..k)
                .map(move |_| fc.factor_dist.sample(&mut rng) * fc.factor_scale)
                .collect::<Vec<_>>()
        })
        .collect();
    for t in 0..cols {
        for (lag, lam) in fc.loadings.iter().enumerate() {
            let f = &factors[(t + q - lag) * k..(t + q - lag + 1) * k];
            for i in 0..n {
                let signal = f
                    .iter()
                    .enumerate()
                    .fold(C64::new(0.0, 0.0), |acc, (j, fj)| acc + fj * lam.get(i, j));
                entries[i * cols + t] += signal;
            }
        }
    }
    Ok(ObservationPanel {
        entries,
        model: fc.clone(),
        seed,
    })
}

/// `Φ_n(τ) = (1/2T) Σ_j (R_j R*_{j+τ} + R_{j+τ} R*_j)`, no centring.
pub fn build_phi_tau(obs: &ObservationPanel, tau: usize) -> Result<HermitianMatrix> {
    symmetrized_lag_covariance(
        obs.entries(),
        obs.rows(),
        obs.cols(),
        obs.sample_length(),
        tau,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::SimulationConfig;

    fn scalar_panel(values: &[C64], t: usize, tau: usize) -> NoisePanel {
        let cfg = SimulationConfig { n: 1, t, tau };
        NoisePanel::from_entries(cfg, DistributionKind::RealGaussian, 0, values.to_vec()).unwrap()
    }

    #[test]
    fn scalar_hand_computation() {
        let p = scalar_panel(&[C64::new(2.0, 0.0), C64::new(3.0, 0.0)], 1, 1);
        let m = build_m_tau(&p, 1).unwrap();
        assert_eq!(m.get(0, 0), C64::new(6.0, 0.0));
    }

    #[test]
    fn lag_zero_is_sample_covariance() {
        let cfg = SimulationConfig::new(7, 11, 0).unwrap();
        let p = sample_panel(cfg, DistributionKind::ComplexGaussian, 5).unwrap();
        let m = build_m_tau(&p, 0).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                let s = (0..11).fold(C64::new(0.0, 0.0), |acc, t| {
                    acc + p.get(i, t) * p.get(j, t).conj()
                });
                assert_eq!(m.get(i, j), s / 11.0);
            }
        }
    }

    #[test]
    fn exact_hermitian_output() {
        let cfg = SimulationConfig::new(9, 13, 3).unwrap();
        let p = sample_panel(cfg, DistributionKind::ComplexGaussian, 1).unwrap();
        let m = build_m_tau(&p, 3).unwrap();
        assert!(HermitianMatrix::from_rows(9, m.as_slice().to_vec()).is_ok());
    }

    #[test]
    fn lag_too_large() {
        let cfg = SimulationConfig::new(3, 5, 1).unwrap();
        let p = sample_panel(cfg, DistributionKind::Rademacher, 1).unwrap();
        assert_eq!(
            build_m_tau(&p, 2),
            Err(Error::Dimension {
                needed: 7,
                available: 6
            })
        );
    }

    #[test]
    fn from_rows_rejects_non_hermitian() {
        let data = alloc::vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 1.0),
            C64::new(1.0, 0.0)
        ];
        assert_eq!(
            HermitianMatrix::from_rows(2, data),
            Err(Error::NotHermitian { row: 0, col: 1 })
        );
    }

    #[test]
    fn phi_scalar_hand_computation() {
        let model = FactorModelConfig::noise_only(
            SimulationConfig { n: 1, t: 1, tau: 1 },
            DistributionKind::ComplexGaussian,
        );
        let obs = ObservationPanel {
            entries: alloc::vec![C64::new(1.0, 1.0), C64::new(1.0, -1.0)],
            model,
            seed: 0,
        };
        assert_eq!(
            build_phi_tau(&obs, 1).unwrap().get(0, 0),
            C64::new(0.0, 0.0)
        );
    }

    #[test]
    fn noise_only_model_reproduces_noise() {
        let base = SimulationConfig::new(6, 20, 2).unwrap();
        let fc = FactorModelConfig::noise_only(base, DistributionKind::ComplexGaussian);
        let obs = simulate_factor_panel(&fc, 4).unwrap();
        let noise = sample_panel(base, DistributionKind::ComplexGaussian, 4).unwrap();
        assert_eq!(obs.entries(), noise.entries());
        for tau in 0..=2 {
            assert_eq!(
                build_phi_tau(&obs, tau).unwrap(),
                build_m_tau(&noise, tau).unwrap()
            );
        }
    }

    #[test]
    fn zero_factor_path() {
        let base = SimulationConfig::new(5, 12, 1).unwrap();
        let mut fc = FactorModelConfig::with_random_loadings(base, 1, 0, 1.0, 3);
        fc.loadings[0].values.iter_mut().for_each(|v| *v = 1.0);
        fc.factor_scale = 0.0;
        let obs = simulate_factor_panel(&fc, 8).unwrap();
        let noise = sample_panel(base, DistributionKind::ComplexGaussian, 8).unwrap();
        assert_eq!(obs.entries(), noise.entries());
    }

    #[test]
    fn factor_column_formula() {
        // With noise removed by hand, column t must be Λ0 F_t + Λ1 F_{t−1}.
        let base = SimulationConfig::new(3, 6, 1).unwrap();
        let fc = FactorModelConfig::with_random_loadings(base, 2, 1, 2.0, 11);
        let obs = simulate_factor_panel(&fc, 21).unwrap();
        let noise = sample_panel(base, fc.noise_dist, 21).unwrap();
        let factor = |s: usize| -> Vec<C64> {
            let mut rng = stream_rng(21, FACTOR_STREAM_BASE + s as u64);
            (0..2).map(|_| fc.factor_dist.sample(&mut rng)).collect()
        };
        for t in 0..base.columns() {
            let (f0, f1) = (factor(t + 1), factor(t));
            for i in 0..3 {
                let mut expect = noise.get(i, t);
                for j in 0..2 {
                    expect += f0[j] * fc.loadings[0].get(i, j) + f1[j] * fc.loadings[1].get(i, j);
                }
                assert!((obs.get(i, t) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn loading_dimension_mismatch() {
        let base = SimulationConfig::new(4, 8, 1).unwrap();
        let mut fc = FactorModelConfig::with_random_loadings(base, 2, 1, 1.0, 0);
        fc.loadings.pop();
        assert!(simulate_factor_panel(&fc, 0).is_err());
        let mut fc = FactorModelConfig::with_random_loadings(base, 2, 1, 1.0, 0);
        fc.loadings[1] = Loadings::zeros(3, 2);
        assert!(simulate_factor_panel(&fc, 0).is_err());
    }

    #[test]
    fn loading_columns_have_requested_norm() {
        let l = Loadings::random(50, 3, 5.0, 1, 0);
        for j in 0..3 {
            let norm = (0..50).map(|i| l.get(i, j).powi(2)).sum::<f64>().sqrt();
            assert!((norm - 5.0).abs() < 1e-12);
        }
    }
}
