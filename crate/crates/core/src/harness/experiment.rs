//! Seeded Monte-Carlo trials with paired channel draws.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{db_to_linear, dbm_to_watt, ExperimentConfig, Scheme};
use super::output::ResultRecord;
use crate::baselines::{aligned_candidate, exhaustive_search, ris_baseline, uniform_subgrid_selection};
use crate::ceo::Optimizer;
use crate::channel::{ChannelRealization, LinkParams};
use crate::error::{Error, Result};
use crate::geometry::{build_correlation_with_floor, CorrelationModel, SurfaceGrid};
use crate::rate::RadioParams;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn wavelength(fc_hz: f64) -> f64 {
    SPEED_OF_LIGHT / fc_hz
}

/// Square surface of side `surface_side_lambda·λ` with elements placed edge
/// to edge, `d = side/(my − 1)`.
pub fn derive_grid(config: &ExperimentConfig) -> Result<SurfaceGrid> {
    if config.my != config.mz {
        return Err(Error::Config(format!(
            "only square surfaces are supported, got {}x{}",
            config.my, config.mz
        )));
    }
    if config.my < 2 {
        return Err(Error::Config(format!("grid must be at least 2x2, got {}x{}", config.my, config.mz)));
    }
    if !(config.fc_hz > 0.0 && config.surface_side_lambda > 0.0) {
        return Err(Error::Config("carrier frequency and surface side must be positive".into()));
    }
    let lambda = wavelength(config.fc_hz);
    let spacing = config.surface_side_lambda * lambda / (config.my - 1) as f64;
    SurfaceGrid::new(config.my, config.mz, spacing, lambda).map_err(|e| Error::Config(e.to_string()))
}

/// Warning text when the grid is not sub-half-wavelength.
pub fn grid_warning(grid: &SurfaceGrid) -> Option<String> {
    (!grid.is_dense()).then(|| {
        format!(
            "element spacing {:.6} m is not below half a wavelength ({:.6} m)",
            grid.spacing_m(),
            grid.wavelength_m() / 2.0
        )
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed `index` of `seed`.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}

/// Everything shared by the trials of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentContext {
    pub config: ExperimentConfig,
    pub grid: SurfaceGrid,
    pub correlation: CorrelationModel,
    pub radio: RadioParams,
    pub br: LinkParams,
    pub ru: LinkParams,
}

impl ExperimentContext {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let grid = derive_grid(config)?;
        let correlation = build_correlation_with_floor(&grid, config.eigen_floor)?;
        let radio = RadioParams::new(dbm_to_watt(config.power_dbm), dbm_to_watt(config.noise_dbm))
            .map_err(|e| Error::Config(e.to_string()))?;
        let rho = db_to_linear(config.rho_db);
        let br = LinkParams::new(rho, config.alpha, config.d_br_m).map_err(|e| Error::Config(e.to_string()))?;
        let ru = LinkParams::new(rho, config.alpha, config.d_ru_m).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self { config: config.clone(), grid, correlation, radio, br, ru })
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        split_seed(self.config.master_seed, trial as u64)
    }

    /// The channel every scheme of `trial` sees.
    pub fn trial_channel(&self, trial: usize) -> ChannelRealization {
        let mut rng = ChaCha8Rng::seed_from_u64(self.trial_seed(trial));
        ChannelRealization::draw(&mut rng, &self.correlation, &self.br, &self.ru, self.config.correlate_both)
    }
}

/// Records of one trial plus the fingerprint of the channel each scheme saw.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub records: Vec<ResultRecord>,
    pub fingerprints: Vec<(Scheme, u64)>,
}

struct SchemeOutcome {
    rate: Result<f64>,
    iterations: usize,
    converged: bool,
    wall_ms: f64,
}

fn run_scheme(ctx: &ExperimentContext, scheme: Scheme, ch: &ChannelRealization, seed: u64) -> SchemeOutcome {
    let cfg = &ctx.config;
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, 1 + scheme as u64));
    let ceo = cfg.ceo_config();
    let start = Instant::now();
    let (rate, iterations, converged) = match scheme {
        Scheme::Fris => match Optimizer::new(ch, ctx.radio, cfg.m_hat, cfg.bits, ceo) {
            Ok(opt) => {
                let (best, trace) = opt.run(&mut rng);
                (Ok(best.rate), trace.iterations, trace.converged)
            }
            Err(e) => (Err(e), 0, false),
        },
        Scheme::Ris => match ris_baseline(ch, &ctx.radio, &ctx.grid, cfg.m_hat, cfg.bits, &ceo, &mut rng) {
            Ok(b) => (Ok(b.candidate.rate), b.trace.iterations, b.trace.converged),
            Err(e) => (Err(e), 0, false),
        },
        Scheme::Aligned => {
            let rate = uniform_subgrid_selection(&ctx.grid, cfg.m_hat)
                .and_then(|layout| aligned_candidate(ch, &ctx.radio, &layout.xi, cfg.bits))
                .map(|c| c.rate);
            let ok = rate.is_ok();
            (rate, 0, ok)
        }
        Scheme::Oracle => {
            let rate = exhaustive_search(ch, &ctx.radio, cfg.m_hat, cfg.bits, cfg.oracle_budget).map(|r| r.best_rate);
            let ok = rate.is_ok();
            (rate, 0, ok)
        }
    };
    let wall_ms = if cfg.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
    SchemeOutcome { rate, iterations, converged, wall_ms }
}

pub fn run_trial(ctx: &ExperimentContext, trial: usize) -> TrialOutcome {
    let cfg = &ctx.config;
    let seed = ctx.trial_seed(trial);
    let channel = ctx.trial_channel(trial);
    let mut records = Vec::with_capacity(cfg.schemes.len());
    let mut fingerprints = Vec::with_capacity(cfg.schemes.len());
    for &scheme in &cfg.schemes {
        fingerprints.push((scheme, channel.fingerprint()));
        let out = run_scheme(ctx, scheme, &channel, seed);
        let (rate, failure) = match out.rate {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        records.push(ResultRecord {
            trial,
            scheme,
            my: cfg.my,
            mz: cfg.mz,
            m_hat: cfg.m_hat,
            bits: cfg.bits,
            seed,
            iterations: out.iterations,
            converged: out.converged,
            rate_bps_hz: rate,
            wall_ms: out.wall_ms,
            failure,
        });
    }
    TrialOutcome { records, fingerprints }
}

/// Runs every trial (in parallel) and returns records sorted by
/// `(trial, scheme)`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let ctx = ExperimentContext::new(config)?;
    let mut records: Vec<ResultRecord> = (0..config.trials)
        .into_par_iter()
        .flat_map_iter(|t| run_trial(&ctx, t).records)
        .collect();
    records.sort_by_key(|r| (r.trial, r.scheme));
    Ok(records)
}

/// Runs the experiment once per value of `key`, concatenating records.
pub fn run_sweep(config: &ExperimentConfig, key: &str, values: &[String]) -> Result<Vec<ResultRecord>> {
    if values.is_empty() {
        return Err(Error::Config(format!("sweep over {key} has no values")));
    }
    let mut points = Vec::with_capacity(values.len());
    for v in values {
        let mut cfg = config.clone();
        cfg.set(key, v)?;
        cfg.validate()?;
        points.push(cfg);
    }
    let mut all = Vec::new();
    for cfg in &points {
        all.extend(run_experiment(cfg)?);
    }
    Ok(all)
}
