//! Conventional-RIS benchmark, co-phasing heuristic and the exhaustive
//! oracle used to validate the optimizer on small instances.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::RngCore;

use crate::ceo::{selected_indices, Candidate, CeoConfig, CeoTrace, Optimizer};
use crate::channel::{cascaded_coefficients, ChannelRealization};
use crate::error::{Error, Result};
use crate::geometry::SurfaceGrid;
use crate::rate::{achievable_rate, check_bits, level_angle, level_count, phasor_table, rate_from_gain, PhaseVector, RadioParams};

/// Default cap on oracle evaluations.
pub const DEFAULT_ORACLE_BUDGET: u128 = 1_000_000;

/// A uniformly spread `rows × cols` sub-lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgridSelection {
    pub xi: Vec<bool>,
    pub row_positions: Vec<usize>,
    pub col_positions: Vec<usize>,
    /// False when no exact `r × c = M̂` factorization fit and surplus
    /// positions were dropped.
    pub exact: bool,
}

/// `k` indices in `0..n` spread edge to edge: `round(i·(n−1)/(k−1))` with
/// halves rounded to even. A single index sits at the lower center.
pub fn spread_indices(n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k >= 1 && k <= n);
    if k == 1 {
        return vec![(n - 1) / 2];
    }
    let den = k - 1;
    (0..k)
        .map(|i| {
            let num = i * (n - 1);
            let (q, r) = (num / den, num % den);
            match (2 * r).cmp(&den) {
                std::cmp::Ordering::Less => q,
                std::cmp::Ordering::Greater => q + 1,
                std::cmp::Ordering::Equal => q + (q % 2),
            }
        })
        .collect()
}

fn subgrid_shape(rows: usize, cols: usize, m_hat: usize) -> (usize, usize, bool) {
    let exact = (1..=m_hat)
        .filter(|r| m_hat.is_multiple_of(*r))
        .map(|r| (r, m_hat / r))
        .filter(|&(r, c)| r <= rows && c <= cols)
        .min_by_key(|&(r, c)| (r.abs_diff(c), r));
    if let Some((r, c)) = exact {
        return (r, c, true);
    }
    let (r, c) = (1..=rows)
        .flat_map(|r| (1..=cols).map(move |c| (r, c)))
        .filter(|&(r, c)| r * c >= m_hat)
        .min_by_key(|&(r, c)| (r.abs_diff(c), r * c, r))
        .expect("m_hat ≤ rows·cols");
    (r, c, false)
}

pub fn uniform_subgrid_selection(grid: &SurfaceGrid, m_hat: usize) -> Result<SubgridSelection> {
    let m = grid.len();
    if m_hat == 0 || m_hat > m {
        return Err(Error::Infeasible(format!("need 1 ≤ M̂ ≤ M, got M̂={m_hat}, M={m}")));
    }
    let (r, c, exact) = subgrid_shape(grid.rows(), grid.cols(), m_hat);
    let row_positions = spread_indices(grid.rows(), r);
    let col_positions = spread_indices(grid.cols(), c);
    let mut chosen: Vec<usize> = row_positions
        .iter()
        .flat_map(|&ri| col_positions.iter().map(move |&ci| (ri, ci)))
        .map(|(ri, ci)| grid.element_index(ri, ci).expect("positions inside grid"))
        .collect();
    chosen.sort_unstable();
    chosen.truncate(m_hat);
    let mut xi = vec![false; m];
    for i in chosen {
        xi[i] = true;
    }
    Ok(SubgridSelection { xi, row_positions, col_positions, exact })
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Per-coefficient co-phasing: the level whose angle is closest to
/// `−arg(c_k)`, ties to the lower level. Zero coefficients get level `V`.
pub fn quantized_alignment_phases(c: &[Complex64], bits: u32) -> Result<PhaseVector> {
    check_bits(bits)?;
    let v = level_count(bits) as u32;
    let levels = c
        .iter()
        .map(|ck| {
            if ck.norm_sqr() == 0.0 {
                return v;
            }
            let target = -ck.arg();
            let mut best = (f64::INFINITY, v);
            for level in 1..=v {
                let d = angular_distance(level_angle(level, bits), target);
                if d < best.0 {
                    best = (d, level);
                }
            }
            best.1
        })
        .collect();
    PhaseVector::new(levels, bits)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_xi: Vec<bool>,
    pub best_phi: PhaseVector,
    pub best_rate: f64,
    pub evaluations: u64,
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `C(M, M̂)·V^M̂`, or `None` on overflow.
pub fn oracle_evaluations(m: usize, m_hat: usize, bits: u32) -> Option<u128> {
    if m_hat > m {
        return Some(0);
    }
    let v = level_count(bits) as u128;
    let phases = v.checked_pow(u32::try_from(m_hat).ok()?)?;
    binomial(m, m_hat)?.checked_mul(phases)
}

/// Advances `idx` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Advances an odometer of levels `1..=v`, last slot fastest.
fn next_levels(levels: &mut [u32], v: u32) -> bool {
    for l in levels.iter_mut().rev() {
        if *l < v {
            *l += 1;
            return true;
        }
        *l = 1;
    }
    false
}

/// Enumerates every subset and phase pattern. The first maximizer in
/// lexicographic `(subset, levels)` order wins. Refuses to run when the
/// enumeration would exceed `budget`.
pub fn exhaustive_search(
    ch: &ChannelRealization,
    radio: &RadioParams,
    m_hat: usize,
    bits: u32,
    budget: u128,
) -> Result<OracleResult> {
    check_bits(bits)?;
    let m = ch.len();
    if m_hat == 0 || m_hat > m {
        return Err(Error::Infeasible(format!("need 1 ≤ M̂ ≤ M, got M̂={m_hat}, M={m}")));
    }
    let required = oracle_evaluations(m, m_hat, bits).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let coeffs = ch.element_coefficients();
    let table = phasor_table(bits);
    let v = level_count(bits) as u32;

    let mut subset: Vec<usize> = (0..m_hat).collect();
    let mut best: Option<(f64, Vec<usize>, Vec<u32>)> = None;
    let mut evaluations = 0u64;
    loop {
        let mut levels = vec![1u32; m_hat];
        loop {
            let gain: Complex64 = subset
                .iter()
                .zip(&levels)
                .map(|(&i, &l)| coeffs[i] * table[l as usize - 1])
                .sum();
            let rate = rate_from_gain(gain, radio);
            evaluations += 1;
            if best.as_ref().is_none_or(|b| rate > b.0) {
                best = Some((rate, subset.clone(), levels.clone()));
            }
            if !next_levels(&mut levels, v) {
                break;
            }
        }
        if !next_combination(&mut subset, m) {
            break;
        }
    }
    let (best_rate, sel, levels) = best.expect("at least one evaluation");
    let mut best_xi = vec![false; m];
    for i in sel {
        best_xi[i] = true;
    }
    Ok(OracleResult {
        best_xi,
        best_phi: PhaseVector::new(levels, bits)?,
        best_rate,
        evaluations,
    })
}

/// Rate of a fixed selection with co-phased quantized levels.
pub fn aligned_candidate(ch: &ChannelRealization, radio: &RadioParams, xi: &[bool], bits: u32) -> Result<Candidate> {
    if xi.len() != ch.len() {
        return Err(Error::LengthMismatch { expected: ch.len(), got: xi.len() });
    }
    let c = cascaded_coefficients(ch, &selected_indices(xi))?;
    let phi = quantized_alignment_phases(&c, bits)?;
    let rate = achievable_rate(&c, &phi, radio)?;
    Ok(Candidate { xi: xi.to_vec(), phi, rate })
}

#[derive(Debug, Clone)]
pub struct RisBaseline {
    /// CEO result with the selection pinned to the uniform sub-lattice.
    pub candidate: Candidate,
    pub trace: CeoTrace,
    /// Co-phasing rate on the same sub-lattice, for reference.
    pub aligned_rate: f64,
    pub layout: SubgridSelection,
}

/// Conventional RIS: uniform sub-lattice selection, phases optimized by CEO
/// with the selection distribution frozen.
pub fn ris_baseline<R: RngCore + ?Sized>(
    ch: &ChannelRealization,
    radio: &RadioParams,
    grid: &SurfaceGrid,
    m_hat: usize,
    bits: u32,
    config: &CeoConfig,
    rng: &mut R,
) -> Result<RisBaseline> {
    if grid.len() != ch.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: ch.len() });
    }
    let layout = uniform_subgrid_selection(grid, m_hat)?;
    let aligned_rate = aligned_candidate(ch, radio, &layout.xi, bits)?.rate;
    let (candidate, trace) = Optimizer::new(ch, *radio, m_hat, bits, *config)?
        .with_fixed_selection(&layout.xi)?
        .run(rng);
    Ok(RisBaseline { candidate, trace, aligned_rate, layout })
}
