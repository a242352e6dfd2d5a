//! Rayleigh fading for the BS→surface and surface→user hops.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::CorrelationModel;

/// Large-scale parameters of one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Reference power gain at 1 m, linear.
    pub rho: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    pub distance_m: f64,
}

impl LinkParams {
    pub fn new(rho: f64, alpha: f64, distance_m: f64) -> Result<Self> {
        for (name, v) in [("rho", rho), ("alpha", alpha), ("distance_m", distance_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { rho, alpha, distance_m })
    }
}

/// Power gain `ρ·d^(−α)`. Channel amplitudes scale with its square root.
pub fn path_loss(link: &LinkParams) -> f64 {
    link.rho * link.distance_m.powf(-link.alpha)
}

/// `m` i.i.d. `CN(0, l)` entries with `l = path_loss(link)`.
pub fn draw_channel<R: Rng + ?Sized>(rng: &mut R, m: usize, link: &LinkParams) -> Vec<Complex64> {
    let sigma = (path_loss(link) / 2.0).sqrt();
    (0..m)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sigma * re, sigma * im)
        })
        .collect()
}

/// One Monte-Carlo draw of both hops.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    h_br: Vec<Complex64>,
    h_ru: Vec<Complex64>,
    h_ru_corr: Vec<Complex64>,
    /// Present only when correlation is applied on the BS side too.
    h_br_corr: Option<Vec<Complex64>>,
}

fn apply_root(corr: &CorrelationModel, h: &[Complex64]) -> Vec<Complex64> {
    let root = corr.j_sqrt().map(|v| Complex64::new(v, 0.0));
    let v = root * DVector::from_column_slice(h);
    v.iter().copied().collect()
}

impl ChannelRealization {
    pub fn new(
        h_br: Vec<Complex64>,
        h_ru: Vec<Complex64>,
        corr: &CorrelationModel,
        correlate_both: bool,
    ) -> Result<Self> {
        let m = corr.len();
        if h_br.len() != m {
            return Err(Error::LengthMismatch { expected: m, got: h_br.len() });
        }
        if h_ru.len() != m {
            return Err(Error::LengthMismatch { expected: m, got: h_ru.len() });
        }
        if h_br.iter().chain(h_ru.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("channel has non-finite entries".into()));
        }
        let h_ru_corr = apply_root(corr, &h_ru);
        let h_br_corr = correlate_both.then(|| apply_root(corr, &h_br));
        Ok(Self { h_br, h_ru, h_ru_corr, h_br_corr })
    }

    /// Draws both hops from `rng`, BS side first.
    pub fn draw<R: Rng + ?Sized>(
        rng: &mut R,
        corr: &CorrelationModel,
        br: &LinkParams,
        ru: &LinkParams,
        correlate_both: bool,
    ) -> Self {
        let m = corr.len();
        let h_br = draw_channel(rng, m, br);
        let h_ru = draw_channel(rng, m, ru);
        Self::new(h_br, h_ru, corr, correlate_both).expect("drawn vectors have matching lengths")
    }

    pub fn len(&self) -> usize {
        self.h_br.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_br.is_empty()
    }

    pub fn h_br(&self) -> &[Complex64] {
        &self.h_br
    }

    pub fn h_ru(&self) -> &[Complex64] {
        &self.h_ru
    }

    pub fn h_ru_corr(&self) -> &[Complex64] {
        &self.h_ru_corr
    }

    /// BS-side vector entering the cascade: `h_br`, or its correlated
    /// version when both hops are correlated.
    pub fn br_side(&self) -> &[Complex64] {
        self.h_br_corr.as_deref().unwrap_or(&self.h_br)
    }

    /// Cascaded coefficient of every element, `conj(h_ru_corr[m])·br[m]`.
    pub fn element_coefficients(&self) -> Vec<Complex64> {
        self.h_ru_corr
            .iter()
            .zip(self.br_side())
            .map(|(ru, br)| ru.conj() * br)
            .collect()
    }

    /// Hash of the raw fading vectors, used to check that schemes share a draw.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for z in self.h_br.iter().chain(self.h_ru.iter()) {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
        self.h_br_corr.is_some().hash(&mut h);
        h.finish()
    }
}

/// Checks that `selection` holds distinct in-range indices and returns
/// them sorted ascending.
pub fn normalize_selection(selection: &[usize], m: usize) -> Result<Vec<usize>> {
    let mut sorted = selection.to_vec();
    sorted.sort_unstable();
    if let Some(&bad) = sorted.iter().find(|&&s| s >= m) {
        return Err(Error::InvalidSelection(format!("index {bad} out of range for {m} elements")));
    }
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidSelection(format!("index {} selected twice", w[0])));
    }
    Ok(sorted)
}

/// Per-slot coefficients `c_k = conj(h_ru_corr[s_k])·h_br[s_k]` with the
/// selection taken in ascending index order.
pub fn cascaded_coefficients(ch: &ChannelRealization, selection: &[usize]) -> Result<Vec<Complex64>> {
    let sorted = normalize_selection(selection, ch.len())?;
    let br = ch.br_side();
    Ok(sorted.iter().map(|&s| ch.h_ru_corr[s].conj() * br[s]).collect())
}
