#![allow(dead_code)]

use fris_core::channel::{ChannelRealization, LinkParams};
use fris_core::geometry::{build_correlation, CorrelationModel, SurfaceGrid};
use fris_core::rate::{level_angle, PhaseVector, RadioParams};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Grid at a fifth of a wavelength, unit wavelength.
pub fn dense_grid(my: usize, mz: usize) -> SurfaceGrid {
    SurfaceGrid::new(my, mz, 0.2, 1.0).unwrap()
}

pub fn unit_link() -> LinkParams {
    LinkParams::new(1.0, 2.0, 1.0).unwrap()
}

pub fn unit_radio() -> RadioParams {
    RadioParams::new(1.0, 1.0).unwrap()
}

pub fn channel(corr: &CorrelationModel, seed: u64) -> ChannelRealization {
    ChannelRealization::draw(&mut rng(seed), corr, &unit_link(), &unit_link(), false)
}

pub fn grid_channel(my: usize, mz: usize, seed: u64) -> (SurfaceGrid, ChannelRealization) {
    let grid = dense_grid(my, mz);
    let corr = build_correlation(&grid);
    let ch = channel(&corr, seed);
    (grid, ch)
}

/// Pearson statistic and its p-value against `probs`.
pub fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut dof = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        if p == 0.0 {
            assert_eq!(c, 0, "drew a zero-probability level");
            continue;
        }
        let e = p * n as f64;
        stat += (c as f64 - e).powi(2) / e;
        dof += 1;
    }
    let chi = ChiSquared::new((dof - 1) as f64).unwrap();
    1.0 - chi.cdf(stat)
}

pub fn random_row(r: &mut impl Rng, v: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..v).map(|_| r.random::<f64>() + 0.05).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// Straightforward restatement of the two repair rules.
pub fn reference_repair(xi: &[bool], g: &[f64], m_hat: usize) -> Vec<bool> {
    let mut out = xi.to_vec();
    loop {
        let ones = out.iter().filter(|&&b| b).count();
        if ones == m_hat {
            return out;
        }
        let want = ones < m_hat;
        // the entry to flip: lowest g among ones, or highest g among zeros
        let mut pick: Option<usize> = None;
        for i in 0..out.len() {
            if out[i] == want {
                continue;
            }
            pick = match pick {
                None => Some(i),
                Some(j) => {
                    let better = if want { g[i] > g[j] } else { g[i] < g[j] };
                    if better { Some(i) } else { Some(j) }
                }
            };
        }
        out[pick.unwrap()] = want;
    }
}

/// Dense evaluation built only from the raw channel vectors and `J^{1/2}`.
pub fn dense_gain(
    j_sqrt: &DMatrix<f64>,
    h_ru: &[Complex64],
    h_br: &[Complex64],
    selection: &[usize],
    phi: &PhaseVector,
) -> Complex64 {
    let m = h_ru.len();
    let k = selection.len();
    let mut e = DMatrix::<Complex64>::zeros(k, m);
    for (row, &s) in selection.iter().enumerate() {
        e[(row, s)] = Complex64::new(1.0, 0.0);
    }
    let u = DMatrix::from_diagonal(&DVector::from_iterator(
        k,
        phi.levels().iter().map(|&l| Complex64::from_polar(1.0, level_angle(l, phi.bits()))),
    ));
    let root = j_sqrt.map(|x| Complex64::new(x, 0.0));
    let h_ru = DVector::from_column_slice(h_ru);
    let h_br = DVector::from_column_slice(h_br);
    let lhs = h_ru.adjoint() * root.adjoint() * e.transpose() * u * e * h_br;
    lhs[(0, 0)]
}
