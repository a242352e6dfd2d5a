//! Cross-entropy optimization of element selection and discrete phases.
//!
//! Each iteration draws `A` candidates from a product distribution: an
//! independent Bernoulli per element for the on/off pattern (repaired to
//! exactly `M̂` ones) and an independent categorical per slot for the phase
//! level. The top `ceil(ζ·A)` candidates refit the distribution by their
//! empirical frequencies, which is then blended with the previous one.
//!
//! Slot `k` is paired with the `k`-th smallest selected element index.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::rate::{check_bits, level_count, phasor_table, rate_from_gain, PhaseVector, RadioParams};

/// Sampling-distribution parameters: phase probabilities `p` (`M̂ × V`,
/// row-stochastic) and selection probabilities `g` (length `M`).
#[derive(Debug, Clone, PartialEq)]
pub struct TiltingParams {
    p: Vec<f64>,
    g: Vec<f64>,
    m_hat: usize,
    v: usize,
}

const ROW_SUM_TOL: f64 = 1e-12;

impl TiltingParams {
    /// Builds parameters from explicit rows and selection probabilities.
    pub fn new(p_rows: Vec<Vec<f64>>, g: Vec<f64>) -> Result<Self> {
        let m_hat = p_rows.len();
        let v = p_rows.first().map_or(0, Vec::len);
        if m_hat == 0 || m_hat > g.len() {
            return Err(Error::Infeasible(format!("need 1 ≤ M̂ ≤ M, got M̂={m_hat}, M={}", g.len())));
        }
        if v < 2 || !v.is_power_of_two() {
            return Err(Error::Infeasible(format!("phase level count must be a power of two ≥ 2, got {v}")));
        }
        if p_rows.iter().any(|r| r.len() != v) {
            return Err(Error::ShapeMismatch);
        }
        let params = Self { p: p_rows.concat(), g, m_hat, v };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<()> {
        for (k, row) in self.p.chunks(self.v).enumerate() {
            if row.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::InvalidInput(format!("phase row {k} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidInput(format!("phase row {k} sums to {s}")));
            }
        }
        if let Some(x) = self.g.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidInput(format!("selection probability {x} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.g.len()
    }

    pub fn m_hat(&self) -> usize {
        self.m_hat
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn bits(&self) -> u32 {
        self.v.trailing_zeros()
    }

    pub fn p_row(&self, slot: usize) -> &[f64] {
        &self.p[slot * self.v..(slot + 1) * self.v]
    }

    pub fn p_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.p.chunks(self.v)
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.m_hat == other.m_hat && self.v == other.v && self.g.len() == other.g.len()
    }

    /// Raises every probability to at least `floor` (rows renormalized,
    /// `g` clipped to `[floor, 1 − floor]`). A zero floor is a no-op.
    pub fn apply_floor(&mut self, floor: f64) {
        if floor <= 0.0 {
            return;
        }
        for row in self.p.chunks_mut(self.v) {
            for x in row.iter_mut() {
                *x = x.max(floor);
            }
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        for x in &mut self.g {
            *x = x.clamp(floor, 1.0 - floor);
        }
    }
}

/// Uniform phase rows and `g = M̂/M` everywhere.
pub fn init_params(m: usize, m_hat: usize, v: usize) -> Result<TiltingParams> {
    if m_hat == 0 || m_hat > m {
        return Err(Error::Infeasible(format!("need 1 ≤ M̂ ≤ M, got M̂={m_hat}, M={m}")));
    }
    if v < 2 || !v.is_power_of_two() {
        return Err(Error::Infeasible(format!("phase level count must be a power of two ≥ 2, got {v}")));
    }
    let g0 = if m_hat == m { 1.0 } else { m_hat as f64 / m as f64 };
    Ok(TiltingParams {
        p: vec![1.0 / v as f64; m_hat * v],
        g: vec![g0; m],
        m_hat,
        v,
    })
}

/// Inverse-CDF draw: the 1-based level `n` whose cumulative interval
/// `(Σ_{v<n} P_v, Σ_{v≤n} P_v]` contains `z`.
pub fn sample_level(row: &[f64], z: f64) -> u32 {
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (i, &p) in row.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        cum += p;
        last_positive = i;
        if z <= cum {
            return i as u32 + 1;
        }
    }
    // Rounding left the total just short of z.
    last_positive as u32 + 1
}

pub fn sample_phases<R: Rng + ?Sized>(params: &TiltingParams, rng: &mut R) -> PhaseVector {
    let levels = params
        .p_rows()
        .map(|row| sample_level(row, rng.random::<f64>()))
        .collect();
    PhaseVector::from_levels_unchecked(levels, params.bits())
}

/// Independent Bernoulli(`g_m`) draw per element, before repair.
pub fn sample_selection<R: Rng + ?Sized>(params: &TiltingParams, rng: &mut R) -> Vec<bool> {
    params.g.iter().map(|&gm| rng.random::<f64>() < gm).collect()
}

/// Forces exactly `m_hat` ones. Surplus ones are cleared lowest-`g` first;
/// missing ones are set highest-`g` first. Ties go to the lower index.
pub fn repair_selection(mut xi: Vec<bool>, g: &[f64], m_hat: usize) -> Vec<bool> {
    debug_assert_eq!(xi.len(), g.len());
    let ones = xi.iter().filter(|&&b| b).count();
    if ones > m_hat {
        let mut on: Vec<usize> = (0..xi.len()).filter(|&i| xi[i]).collect();
        on.sort_by(|&a, &b| g[a].total_cmp(&g[b]).then(a.cmp(&b)));
        for &i in &on[..ones - m_hat] {
            xi[i] = false;
        }
    } else if ones < m_hat {
        let mut off: Vec<usize> = (0..xi.len()).filter(|&i| !xi[i]).collect();
        off.sort_by(|&a, &b| g[b].total_cmp(&g[a]).then(a.cmp(&b)));
        for &i in &off[..m_hat - ones] {
            xi[i] = true;
        }
    }
    xi
}

/// One feasible solution and its rate on the current channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub xi: Vec<bool>,
    pub phi: PhaseVector,
    pub rate: f64,
}

impl Candidate {
    /// Selected element indices, ascending. Slot `k` of `phi` belongs to
    /// the `k`-th entry.
    pub fn selected(&self) -> Vec<usize> {
        selected_indices(&self.xi)
    }
}

pub fn selected_indices(xi: &[bool]) -> Vec<usize> {
    xi.iter().enumerate().filter_map(|(i, &b)| b.then_some(i)).collect()
}

/// `ceil(ζ·A)`, at least 1 and at most `A`. A small slack keeps products
/// like `0.05·60` from rounding up past the integer they represent.
pub fn elite_count(sample_count: usize, elite_frac: f64) -> usize {
    let raw = (elite_frac * sample_count as f64 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(sample_count.max(1))
}

/// Indices of the top `ceil(ζ·A)` candidates by rate, descending; ties keep
/// sample order.
pub fn select_elite(candidates: &[Candidate], elite_frac: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| candidates[b].rate.total_cmp(&candidates[a].rate).then(a.cmp(&b)));
    order.truncate(elite_count(candidates.len(), elite_frac));
    order
}

/// Closed-form cross-entropy refit: empirical level frequencies per slot
/// and empirical on-frequencies per element over the elite set.
pub fn update_parameters(elite: &[&Candidate], m: usize, m_hat: usize, v: usize) -> Result<TiltingParams> {
    if elite.is_empty() {
        return Err(Error::InvalidInput("elite set is empty".into()));
    }
    let mut p_counts = vec![0u32; m_hat * v];
    let mut g_counts = vec![0u32; m];
    for cand in elite {
        if cand.xi.len() != m || cand.phi.len() != m_hat {
            return Err(Error::ShapeMismatch);
        }
        for (k, &level) in cand.phi.levels().iter().enumerate() {
            if level == 0 || level as usize > v {
                return Err(Error::InvalidInput(format!("phase level {level} outside 1..={v}")));
            }
            p_counts[k * v + level as usize - 1] += 1;
        }
        for (i, &on) in cand.xi.iter().enumerate() {
            g_counts[i] += u32::from(on);
        }
    }
    let n = elite.len() as f64;
    Ok(TiltingParams {
        p: p_counts.into_iter().map(|c| c as f64 / n).collect(),
        g: g_counts.into_iter().map(|c| c as f64 / n).collect(),
        m_hat,
        v,
    })
}

/// `ω·new + (1 − ω)·old`, entrywise.
pub fn smooth(new: &TiltingParams, old: &TiltingParams, omega: f64) -> Result<TiltingParams> {
    if !new.same_shape(old) {
        return Err(Error::ShapeMismatch);
    }
    let mix = |a: &f64, b: &f64| (omega * a + (1.0 - omega) * b).clamp(0.0, 1.0);
    Ok(TiltingParams {
        p: new.p.iter().zip(&old.p).map(|(a, b)| mix(a, b)).collect(),
        g: new.g.iter().zip(&old.g).map(|(a, b)| mix(a, b)).collect(),
        m_hat: new.m_hat,
        v: new.v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CeoConfig {
    /// Samples per iteration, `A`.
    pub sample_count: usize,
    /// Elite fraction `ζ`.
    pub elite_frac: f64,
    /// Smoothing weight `ω` on the new estimate.
    pub smoothing: f64,
    /// Stop once consecutive iteration-best rates differ by at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Optional lower bound on every probability after smoothing.
    pub prob_floor: f64,
}

impl CeoConfig {
    /// `A = 5(M + M̂)`, `ζ = 0.05`, `ω = 0.55`, `tol = 1e−4`, 500 iterations.
    pub fn for_problem(m: usize, m_hat: usize) -> Self {
        Self {
            sample_count: 5 * (m + m_hat),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count < 2 {
            return Err(Error::Config(format!("sample count must be ≥ 2, got {}", self.sample_count)));
        }
        if !(self.elite_frac > 0.0 && self.elite_frac < 1.0) {
            return Err(Error::Config(format!("elite fraction must lie in (0, 1), got {}", self.elite_frac)));
        }
        if !(self.smoothing > 0.0 && self.smoothing < 1.0) {
            return Err(Error::Config(format!("smoothing must lie in (0, 1), got {}", self.smoothing)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be ≥ 1".into()));
        }
        if !(0.0..0.5).contains(&self.prob_floor) {
            return Err(Error::Config(format!("probability floor must lie in [0, 0.5), got {}", self.prob_floor)));
        }
        Ok(())
    }
}

impl Default for CeoConfig {
    fn default() -> Self {
        Self {
            sample_count: 100,
            elite_frac: 0.05,
            smoothing: 0.55,
            tol: 1e-4,
            max_iter: 500,
            prob_floor: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CeoTrace {
    /// Best rate found so far, after each iteration. Non-decreasing.
    pub best_rate: Vec<f64>,
    /// Best rate among the samples of each iteration.
    pub iteration_best: Vec<f64>,
    pub mean_elite: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Cross-entropy optimizer bound to one channel realization.
#[derive(Debug, Clone)]
pub struct Optimizer {
    coeffs: Vec<Complex64>,
    radio: RadioParams,
    m_hat: usize,
    bits: u32,
    config: CeoConfig,
    initial: TiltingParams,
    frozen_selection: bool,
}

impl Optimizer {
    pub fn new(
        channel: &ChannelRealization,
        radio: RadioParams,
        m_hat: usize,
        bits: u32,
        config: CeoConfig,
    ) -> Result<Self> {
        check_bits(bits)?;
        config.validate()?;
        let m = channel.len();
        let initial = init_params(m, m_hat, level_count(bits))?;
        Ok(Self {
            coeffs: channel.element_coefficients(),
            radio,
            m_hat,
            bits,
            config,
            initial,
            frozen_selection: false,
        })
    }

    /// Starts from `params` instead of the uniform initialization.
    pub fn with_initial_params(mut self, params: TiltingParams) -> Result<Self> {
        if !params.same_shape(&self.initial) {
            return Err(Error::ShapeMismatch);
        }
        self.initial = params;
        Ok(self)
    }

    /// Pins the selection to `xi` and learns phases only.
    pub fn with_fixed_selection(mut self, xi: &[bool]) -> Result<Self> {
        if xi.len() != self.initial.m() {
            return Err(Error::LengthMismatch { expected: self.initial.m(), got: xi.len() });
        }
        let ones = xi.iter().filter(|&&b| b).count();
        if ones != self.m_hat {
            return Err(Error::InvalidSelection(format!("fixed selection has {ones} elements, expected {}", self.m_hat)));
        }
        self.initial.g = xi.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        self.frozen_selection = true;
        Ok(self)
    }

    pub fn config(&self) -> &CeoConfig {
        &self.config
    }

    /// Rate of `(xi, levels)` on the bound channel.
    pub fn evaluate(&self, xi: &[bool], phi: &PhaseVector) -> f64 {
        let table = phasor_table(self.bits);
        self.evaluate_with(&table, xi, phi.levels())
    }

    fn evaluate_with(&self, table: &[Complex64], xi: &[bool], levels: &[u32]) -> f64 {
        let gain: Complex64 = xi
            .iter()
            .enumerate()
            .filter_map(|(i, &on)| on.then_some(i))
            .zip(levels)
            .map(|(i, &l)| self.coeffs[i] * table[l as usize - 1])
            .sum();
        rate_from_gain(gain, &self.radio)
    }

    fn draw_candidate(&self, params: &TiltingParams, table: &[Complex64], rng: &mut ChaCha8Rng) -> Candidate {
        let raw = sample_selection(params, rng);
        let xi = repair_selection(raw, params.g(), self.m_hat);
        let phi = sample_phases(params, rng);
        assert_eq!(xi.iter().filter(|&&b| b).count(), self.m_hat, "infeasible candidate");
        let rate = self.evaluate_with(table, &xi, phi.levels());
        Candidate { xi, phi, rate }
    }

    /// Runs the loop to convergence or `max_iter`. Candidate `a` of
    /// iteration `t` draws from its own ChaCha stream keyed by a seed taken
    /// from `rng`, so results do not depend on scheduling.
    pub fn run<R: RngCore + ?Sized>(&self, rng: &mut R) -> (Candidate, CeoTrace) {
        let base = ChaCha8Rng::seed_from_u64(rng.next_u64());
        let table = phasor_table(self.bits);
        let cfg = &self.config;
        let m = self.initial.m();
        let v = self.initial.v();

        let mut params = self.initial.clone();
        let mut best: Option<Candidate> = None;
        let mut trace = CeoTrace::default();
        let mut prev_iter_best: Option<f64> = None;

        for t in 0..cfg.max_iter {
            let candidates: Vec<Candidate> = (0..cfg.sample_count)
                .into_par_iter()
                .with_min_len(64)
                .map(|a| {
                    let mut rng = base.clone();
                    rng.set_stream(((t as u64) << 32) | a as u64);
                    self.draw_candidate(&params, &table, &mut rng)
                })
                .collect();

            let elite_idx = select_elite(&candidates, cfg.elite_frac);
            let elite: Vec<&Candidate> = elite_idx.iter().map(|&i| &candidates[i]).collect();
            let iter_best = elite[0].rate;
            let mean_elite = elite.iter().map(|c| c.rate).sum::<f64>() / elite.len() as f64;

            if best.as_ref().is_none_or(|b| iter_best > b.rate) {
                best = Some(elite[0].clone());
            }

            let mut fitted = update_parameters(&elite, m, self.m_hat, v).expect("elite candidates are feasible");
            if self.frozen_selection {
                fitted.g.clone_from(&params.g);
            }
            params = smooth(&fitted, &params, cfg.smoothing).expect("shapes match");
            params.apply_floor(cfg.prob_floor);
            if self.frozen_selection {
                params.g.clone_from(&self.initial.g);
            }

            trace.best_rate.push(best.as_ref().map_or(iter_best, |b| b.rate));
            trace.iteration_best.push(iter_best);
            trace.mean_elite.push(mean_elite);
            trace.iterations = t + 1;

            if prev_iter_best.is_some_and(|prev| (iter_best - prev).abs() <= cfg.tol) {
                trace.converged = true;
                break;
            }
            prev_iter_best = Some(iter_best);
        }
        (best.expect("at least one iteration ran"), trace)
    }
}

/// Optimizes selection and phases jointly from the uniform start.
pub fn optimize<R: RngCore + ?Sized>(
    channel: &ChannelRealization,
    radio: &RadioParams,
    m_hat: usize,
    bits: u32,
    config: &CeoConfig,
    rng: &mut R,
) -> Result<(Candidate, CeoTrace)> {
    Ok(Optimizer::new(channel, *radio, m_hat, bits, *config)?.run(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(xi: &[u8], levels: &[u32], bits: u32, rate: f64) -> Candidate {
        Candidate {
            xi: xi.iter().map(|&b| b == 1).collect(),
            phi: PhaseVector::new(levels.to_vec(), bits).unwrap(),
            rate,
        }
    }

    fn bools(v: &[u8]) -> Vec<bool> {
        v.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn init_examples() {
        let p = init_params(4, 2, 4).unwrap();
        assert!(p.p_rows().all(|r| r == [0.25; 4]));
        assert_eq!(p.g(), &[0.5; 4]);
        let full = init_params(5, 5, 2).unwrap();
        assert!(full.g().iter().all(|&x| x == 1.0));
        assert!(init_params(3, 4, 2).is_err());
        assert!(init_params(3, 0, 2).is_err());
        assert!(init_params(3, 2, 1).is_err());
        assert!(init_params(3, 2, 3).is_err());
    }

    #[test]
    fn level_sampling_rule() {
        assert_eq!(sample_level(&[1.0, 0.0, 0.0, 0.0], 0.0), 1);
        assert_eq!(sample_level(&[1.0, 0.0, 0.0, 0.0], 0.999), 1);
        assert_eq!(sample_level(&[0.25; 4], 0.3), 2);
        assert_eq!(sample_level(&[0.25; 4], 0.25), 1);
        assert_eq!(sample_level(&[0.25; 4], 1.0), 4);
        // leading zero-probability level is never chosen
        assert_eq!(sample_level(&[0.0, 1.0], 0.0), 2);
        assert_eq!(sample_level(&[0.5, 0.5 - 1e-16, 0.0], 1.0), 2);
    }

    #[test]
    fn degenerate_distributions_are_deterministic() {
        let params = TiltingParams::new(vec![vec![0.0, 1.0]], vec![1.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            assert_eq!(sample_selection(&params, &mut rng), vec![true, false]);
            assert_eq!(sample_phases(&params, &mut rng).levels(), &[2]);
        }
    }

    #[test]
    fn selection_reproducible() {
        let params = init_params(50, 10, 4).unwrap();
        let a = sample_selection(&params, &mut ChaCha8Rng::seed_from_u64(11));
        let b = sample_selection(&params, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }

    #[test]
    fn repair_examples() {
        let out = repair_selection(bools(&[1, 1, 1, 0]), &[0.9, 0.8, 0.1, 0.2], 2);
        assert_eq!(out, bools(&[1, 1, 0, 0]));
        let out = repair_selection(bools(&[0, 0, 0, 0]), &[0.1, 0.9, 0.5, 0.2], 2);
        assert_eq!(out, bools(&[0, 1, 1, 0]));
        let out = repair_selection(bools(&[0, 1, 0, 1]), &[0.1, 0.9, 0.5, 0.2], 2);
        assert_eq!(out, bools(&[0, 1, 0, 1]));
        // ties resolved toward the lower index
        let out = repair_selection(bools(&[1, 1, 1]), &[0.5, 0.5, 0.5], 1);
        assert_eq!(out, bools(&[0, 0, 1]));
        let out = repair_selection(bools(&[0, 0, 0]), &[0.5, 0.5, 0.5], 2);
        assert_eq!(out, bools(&[1, 1, 0]));
    }

    #[test]
    fn elite_examples() {
        let c = vec![cand(&[1], &[1], 1, 3.0), cand(&[1], &[1], 1, 1.0), cand(&[1], &[1], 1, 2.0)];
        assert_eq!(select_elite(&c, 0.2), vec![0]);
        assert_eq!(elite_count(100, 0.05), 5);
        assert_eq!(elite_count(60, 0.05), 3);
        assert_eq!(elite_count(61, 0.05), 4);
        assert_eq!(elite_count(10, 0.01), 1);
        let equal: Vec<Candidate> = (0..100).map(|_| cand(&[1], &[1], 1, 1.0)).collect();
        assert_eq!(select_elite(&equal, 0.05), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn update_is_frequency_count() {
        // levels: π is level 2, π/2 is level 1 for b = 2
        let e = [
            cand(&[1, 0], &[2], 2, 1.0),
            cand(&[1, 0], &[2], 2, 1.0),
            cand(&[0, 1], &[1], 2, 1.0),
        ];
        let refs: Vec<&Candidate> = e.iter().collect();
        let p = update_parameters(&refs, 2, 1, 4).unwrap();
        assert_eq!(p.p_row(0), &[1.0 / 3.0, 2.0 / 3.0, 0.0, 0.0]);
        assert_eq!(p.g(), &[2.0 / 3.0, 1.0 / 3.0]);

        let single = [cand(&[0, 1, 1], &[3, 1], 2, 0.0)];
        let refs: Vec<&Candidate> = single.iter().collect();
        let p = update_parameters(&refs, 3, 2, 4).unwrap();
        assert_eq!(p.p_row(0), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(p.p_row(1), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.g(), &[0.0, 1.0, 1.0]);

        assert!(update_parameters(&[], 3, 2, 4).is_err());
    }

    #[test]
    fn smoothing_examples() {
        let new = TiltingParams::new(vec![vec![1.0, 0.0]], vec![1.0]).unwrap();
        let old = TiltingParams::new(vec![vec![0.0, 1.0]], vec![0.0]).unwrap();
        let s = smooth(&new, &old, 0.55).unwrap();
        assert!((s.g()[0] - 0.55).abs() < 1e-15);
        assert!((s.p_row(0)[0] - 0.55).abs() < 1e-15);
        assert!((s.p_row(0).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(smooth(&new, &new, 0.55).unwrap(), new);

        let other = init_params(2, 1, 2).unwrap();
        assert!(matches!(smooth(&new, &other, 0.5), Err(Error::ShapeMismatch)));
    }

    #[test]
    fn floor_keeps_rows_stochastic() {
        let mut p = TiltingParams::new(vec![vec![1.0, 0.0, 0.0, 0.0]], vec![1.0, 0.0]).unwrap();
        p.apply_floor(0.01);
        assert!(p.p_row(0).iter().all(|&x| x > 0.0));
        assert!((p.p_row(0).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(p.g(), &[0.99, 0.01]);
    }

    #[test]
    fn tilting_params_validation() {
        assert!(TiltingParams::new(vec![vec![0.5, 0.6]], vec![0.5]).is_err());
        assert!(TiltingParams::new(vec![vec![0.5, 0.5]], vec![1.5]).is_err());
        assert!(TiltingParams::new(vec![vec![0.5, 0.5], vec![1.0]], vec![0.5, 0.5]).is_err());
        assert!(TiltingParams::new(vec![vec![0.5, 0.5]; 3], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(CeoConfig::default().validate().is_ok());
        let bad = |f: fn(&mut CeoConfig)| {
            let mut c = CeoConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.sample_count = 1));
        assert!(bad(|c| c.elite_frac = 1.0));
        assert!(bad(|c| c.smoothing = 0.0));
        assert!(bad(|c| c.tol = 0.0));
        assert!(bad(|c| c.max_iter = 0));
        assert!(bad(|c| c.prob_floor = 0.5));
        assert_eq!(CeoConfig::for_problem(9, 3).sample_count, 60);
    }
}
