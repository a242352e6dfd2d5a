//! Achievable-rate objective for a selection and discrete phase pattern.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported phase resolution in bits.
pub const MAX_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    /// Transmit power in watts.
    pub power_w: f64,
    /// Noise power in watts.
    pub noise_w: f64,
}

impl RadioParams {
    pub fn new(power_w: f64, noise_w: f64) -> Result<Self> {
        for (name, v) in [("power_w", power_w), ("noise_w", noise_w)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { power_w, noise_w })
    }

    pub fn snr_scale(&self) -> f64 {
        self.power_w / self.noise_w
    }
}

/// Number of phase levels `V = 2^b`.
pub fn level_count(bits: u32) -> usize {
    1usize << bits
}

pub fn check_bits(bits: u32) -> Result<()> {
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::InvalidInput(format!("phase resolution must be 1..={MAX_BITS} bits, got {bits}")));
    }
    Ok(())
}

/// Angle of level `v` (1-based), `v·2π/2^b`.
pub fn level_angle(level: u32, bits: u32) -> f64 {
    level as f64 * 2.0 * PI / level_count(bits) as f64
}

/// `e^{jφ}` for level `v`. The top level `V` maps to exactly `1 + 0j`.
pub fn level_phasor(level: u32, bits: u32) -> Complex64 {
    let v = level_count(bits) as u32;
    let reduced = level % v;
    if reduced == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, reduced as f64 * 2.0 * PI / v as f64)
}

/// Phasors for levels `1..=V`, indexed by `level - 1`.
pub fn phasor_table(bits: u32) -> Vec<Complex64> {
    (1..=level_count(bits) as u32).map(|v| level_phasor(v, bits)).collect()
}

/// Discrete phase shifts stored as integer levels `1..=2^b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhaseVector {
    levels: Vec<u32>,
    bits: u32,
}

impl PhaseVector {
    pub fn new(levels: Vec<u32>, bits: u32) -> Result<Self> {
        check_bits(bits)?;
        let v = level_count(bits) as u32;
        if let Some(&bad) = levels.iter().find(|&&l| l == 0 || l > v) {
            return Err(Error::InvalidInput(format!("phase level {bad} outside 1..={v}")));
        }
        Ok(Self { levels, bits })
    }

    pub(crate) fn from_levels_unchecked(levels: Vec<u32>, bits: u32) -> Self {
        Self { levels, bits }
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn angles(&self) -> Vec<f64> {
        self.levels.iter().map(|&l| level_angle(l, self.bits)).collect()
    }
}

/// `Σ_k c_k·e^{jφ_k}`.
pub fn effective_gain(c: &[Complex64], phi: &PhaseVector) -> Result<Complex64> {
    if c.len() != phi.len() {
        return Err(Error::LengthMismatch { expected: c.len(), got: phi.len() });
    }
    Ok(c.iter()
        .zip(phi.levels())
        .map(|(ck, &l)| ck * level_phasor(l, phi.bits()))
        .sum())
}

/// `log2(1 + P·|g|²/σ²)` for an already-computed effective gain.
pub fn rate_from_gain(gain: Complex64, radio: &RadioParams) -> f64 {
    (radio.snr_scale() * gain.norm_sqr()).ln_1p() / std::f64::consts::LN_2
}

pub fn achievable_rate(c: &[Complex64], phi: &PhaseVector, radio: &RadioParams) -> Result<f64> {
    Ok(rate_from_gain(effective_gain(c, phi)?, radio))
}
