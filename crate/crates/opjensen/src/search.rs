//! Falsification search over the pointwise coefficient `h(lambda)/lambda`.

use std::time::Instant;

use opjensen_core::engine::lambda_pointwise_check;
use opjensen_core::hfunc::is_h_over_t_decreasing;
use opjensen_core::spectral::random_instance;
use opjensen_core::{CheckOptions, HFunction, ScalarFunction};
use rayon::prelude::*;
use serde::Serialize;

use crate::campaign::{CampaignSummary, Instance, NRange, TrialRecord};
use crate::error::{config, Result};
use crate::json::opt_real;

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub f: ScalarFunction,
    pub h: HFunction,
    /// Used for every evaluation when set; otherwise `trials` random instances.
    pub instance: Option<Instance>,
    pub n_range: NRange,
    pub interval: (f64, f64),
    pub trials: usize,
    pub seed: u64,
    /// Points per half of the lambda range.
    pub grid: usize,
    pub override_positivity: bool,
}

impl SearchConfig {
    pub fn new(f: ScalarFunction, h: HFunction) -> Self {
        SearchConfig {
            f,
            h,
            instance: None,
            n_range: NRange { lo: 1, hi: 8 },
            interval: (1.0, 2.0),
            trials: 100,
            seed: 0,
            grid: 50,
            override_positivity: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// `lambda in (0, 1/2]`
    Lower,
    /// `lambda in (1/2, 1)`
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaRow {
    pub lambda: f64,
    pub region: Region,
    pub total: usize,
    pub violated: usize,
    #[serde(with = "opt_real")]
    pub worst_slack: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    #[serde(skip)]
    pub rows: Vec<LambdaRow>,
    pub upper: CampaignSummary,
    pub lower: CampaignSummary,
    pub h_over_t_decreasing: bool,
    /// No violation below 1/2 whenever `h(t)/t` is decreasing.
    pub lower_clean: bool,
}

#[derive(Serialize)]
struct SearchLine<'a> {
    search: &'a SearchOutcome,
}

impl SearchOutcome {
    /// The closing `{"search": ...}` line.
    pub fn to_line(&self) -> String {
        serde_json::to_string(&SearchLine { search: self }).expect("search outcome serializes")
    }

    pub fn violations(&self) -> usize {
        self.upper.violated + self.lower.violated
    }
}

/// `grid` points strictly inside `(1/2, 1)`.
pub fn upper_grid(grid: usize) -> Vec<f64> {
    (1..=grid)
        .map(|k| 0.5 + 0.5 * k as f64 / (grid + 1) as f64)
        .collect()
}

/// `grid` points in `(0, 1/2]` ending at `1/2`.
pub fn lower_grid(grid: usize) -> Vec<f64> {
    (1..=grid).map(|k| 0.5 * k as f64 / grid as f64).collect()
}

pub fn run_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    if cfg.trials == 0 || cfg.grid == 0 {
        return Err(config("search needs at least one trial and one grid point"));
    }
    let start = Instant::now();
    let (m, big_m) = cfg.interval;
    let interval = if cfg.override_positivity {
        opjensen_core::SpectrumInterval::new_unchecked_positivity(m, big_m)?
    } else {
        opjensen_core::SpectrumInterval::new(m, big_m)?
    };
    let instances: Vec<(u64, Instance)> = match &cfg.instance {
        Some(inst) => vec![(cfg.seed, inst.clone())],
        None => (0..cfg.trials)
            .map(|i| {
                let seed = cfg.seed.wrapping_add(i as u64);
                let (a, x) = random_instance(cfg.n_range.pick(seed), &interval, seed)?;
                Ok((seed, Instance { a, x }))
            })
            .collect::<Result<_>>()?,
    };

    let sweep = |region: Region, lambdas: Vec<f64>| -> Result<(Vec<LambdaRow>, Vec<TrialRecord>)> {
        let mut rows = Vec::with_capacity(lambdas.len());
        let mut records = Vec::new();
        for lambda in lambdas {
            let batch = instances
                .par_iter()
                .enumerate()
                .map(|(i, (seed, inst))| {
                    let opts = CheckOptions {
                        override_positivity: cfg.override_positivity,
                        seed: Some(*seed),
                    };
                    let r = lambda_pointwise_check(&cfg.f, &cfg.h, &inst.a, &inst.x, lambda, opts)?;
                    Ok(TrialRecord {
                        trial: i,
                        seed: *seed,
                        reports: vec![r],
                        agreement: None,
                        weights: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let summary = CampaignSummary::from_trials("", &batch, None, Default::default());
            rows.push(LambdaRow {
                lambda,
                region,
                total: summary.total,
                violated: summary.violated,
                worst_slack: summary.worst_slack,
            });
            records.extend(batch);
        }
        Ok((rows, records))
    };

    let (mut rows, upper_records) = sweep(Region::Upper, upper_grid(cfg.grid))?;
    let (lower_rows, lower_records) = sweep(Region::Lower, lower_grid(cfg.grid))?;
    rows.extend(lower_rows);
    let elapsed = start.elapsed();
    let upper = CampaignSummary::from_trials("search-upper", &upper_records, None, elapsed);
    let lower = CampaignSummary::from_trials("search-lower", &lower_records, None, elapsed);
    let h_over_t_decreasing = is_h_over_t_decreasing(&cfg.h, 1000);
    Ok(SearchOutcome {
        rows,
        lower_clean: !h_over_t_decreasing || lower.violated == 0,
        upper,
        lower,
        h_over_t_decreasing,
    })
}
