//! Seeded verification campaigns.
//!
//! Trial `i` of a campaign with base seed `s` is generated from seed `s + i`
//! alone, so trials run in parallel and are merged back in index order.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use opjensen_core::converse::{compute_constants, converse_check_with, multi_converse_check};
use opjensen_core::engine::{
    endpoint_bound_check, hermite_hadamard_check, match_barycenter, mond_pecaric_check,
    multi_operator_check, weighted_multi_check, InequalityReport,
};
use opjensen_core::spectral::{
    random_family, random_instance, random_operator, random_unit, MAX_DIM,
};
use opjensen_core::{
    check_h_convex, CheckOptions, CoefficientPolicy, ConverseConstants, HFunction, HermitianMatrix,
    PiecewiseC2Function, ScalarFunction, SpectrumInterval, UnitVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::json::{opt_real, ReportJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    MondPecaric,
    Infimum,
    EndpointBound,
    HermiteHadamard,
    MultiOperator,
    WeightedMulti,
    Converse,
    MultiConverse,
}

impl Target {
    pub const ALL: [Target; 8] = [
        Target::MondPecaric,
        Target::Infimum,
        Target::EndpointBound,
        Target::HermiteHadamard,
        Target::MultiOperator,
        Target::WeightedMulti,
        Target::Converse,
        Target::MultiConverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::MondPecaric => "mond-pecaric",
            Target::Infimum => "infimum",
            Target::EndpointBound => "endpoint-bound",
            Target::HermiteHadamard => "hh",
            Target::MultiOperator => "multi-operator",
            Target::WeightedMulti => "weighted-multi",
            Target::Converse => "converse",
            Target::MultiConverse => "multi-converse",
        }
    }

    fn aliases(self) -> &'static [&'static str] {
        match self {
            Target::MondPecaric => &["thm1"],
            Target::Infimum => &["thm1-paper-literal"],
            Target::EndpointBound => &["thm3"],
            Target::HermiteHadamard => &["hermite-hadamard", "cor5"],
            Target::MultiOperator => &["thm6"],
            Target::WeightedMulti => &["cor6"],
            Target::Converse => &[],
            Target::MultiConverse => &["cor7"],
        }
    }

    fn single_operator(self) -> bool {
        !matches!(
            self,
            Target::MultiOperator | Target::WeightedMulti | Target::MultiConverse
        )
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s || t.aliases().contains(&s))
            .ok_or_else(|| {
                let names: Vec<_> = Target::ALL.iter().map(|t| t.name()).collect();
                format!(
                    "unknown target `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Inclusive range of operator dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl NRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || lo > hi || hi > MAX_DIM {
            return Err(config(format!(
                "dimension range {lo}..{hi} must lie in 1..{MAX_DIM}"
            )));
        }
        Ok(NRange { lo, hi })
    }

    pub fn single(n: usize) -> Result<Self> {
        NRange::new(n, n)
    }

    /// The dimension used for the trial with seed `seed`.
    pub fn pick(&self, seed: u64) -> usize {
        let span = (self.hi - self.lo + 1) as u64;
        self.lo + (seed % span) as usize
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad dimension `{t}`: {e}"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        NRange::new(lo, hi).map_err(|e| e.to_string())
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// Parses `m,M`.
pub fn parse_interval(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("interval `{s}` must be written m,M"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad interval bound `{t}`: {e}"))
    };
    Ok((num(a)?, num(b)?))
}

/// How the converse targets subdivide `[m, M]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Subdivision {
    /// The single piece `[m, M]`.
    #[default]
    Trivial,
    /// Knots at the sign changes of `f''`.
    Auto,
    /// Explicit knots including both endpoints.
    Knots(Vec<f64>),
}

impl Subdivision {
    pub fn build(
        &self,
        f: &ScalarFunction,
        interval: &SpectrumInterval,
    ) -> Result<PiecewiseC2Function> {
        let pf = match self {
            Subdivision::Trivial => PiecewiseC2Function::trivial(f.clone(), interval)?,
            Subdivision::Auto => PiecewiseC2Function::auto_refine(f.clone(), interval)?,
            Subdivision::Knots(k) => {
                let ends_match =
                    k.first() == Some(&interval.lower()) && k.last() == Some(&interval.upper());
                if !ends_match {
                    return Err(config(format!(
                        "subdivision must start at {} and end at {}",
                        interval.lower(),
                        interval.upper()
                    )));
                }
                PiecewiseC2Function::new(f.clone(), k.clone())?
            }
        };
        Ok(pf)
    }
}

/// A fixed operator and vector used for every trial in place of random draws.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub a: HermitianMatrix,
    pub x: UnitVector,
}

impl Instance {
    /// `A = diag(1, 0)`, `x = (1/sqrt 2, 1/sqrt 2)`.
    pub fn two_point_counterexample() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Instance {
            a: HermitianMatrix::diag(&[1.0, 0.0]).expect("2x2 diagonal"),
            x: UnitVector::new(vec![r, r]).expect("unit"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub target: Target,
    pub f: ScalarFunction,
    pub h: HFunction,
    pub n_range: NRange,
    pub interval: (f64, f64),
    pub trials: usize,
    pub seed: u64,
    pub policy: CoefficientPolicy,
    pub override_positivity: bool,
    /// Operators per trial for the multi-operator targets.
    pub blocks: usize,
    /// Hermite–Hadamard weights; drawn per trial when absent.
    pub weights: Option<(f64, f64)>,
    pub subdivision: Subdivision,
    pub instance: Option<Instance>,
}

impl CampaignConfig {
    pub fn new(target: Target) -> Self {
        CampaignConfig {
            target,
            f: ScalarFunction::Square,
            h: HFunction::Identity,
            n_range: NRange { lo: 1, hi: 8 },
            interval: (1.0, 2.0),
            trials: 100,
            seed: 0,
            policy: CoefficientPolicy::Safe,
            override_positivity: false,
            blocks: 3,
            weights: None,
            subdivision: Subdivision::Trivial,
            instance: None,
        }
    }

    /// The policy actually applied; the infimum target pins it.
    pub fn effective_policy(&self) -> CoefficientPolicy {
        match self.target {
            Target::Infimum => CoefficientPolicy::Infimum,
            _ => self.policy,
        }
    }

    pub fn spectrum_interval(&self) -> Result<SpectrumInterval> {
        let (m, big_m) = self.interval;
        let iv = if self.override_positivity {
            SpectrumInterval::new_unchecked_positivity(m, big_m)?
        } else {
            SpectrumInterval::new(m, big_m)?
        };
        Ok(iv)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(config("trials must be at least 1"));
        }
        self.spectrum_interval()?;
        if !self.target.single_operator() && self.instance.is_some() {
            return Err(config(format!(
                "target {} does not take a fixed instance",
                self.target
            )));
        }
        if self.blocks == 0 {
            return Err(config("blocks must be at least 1"));
        }
        if let Some((p, q)) = self.weights {
            if !(p >= 0.0 && q >= 0.0 && p + q > 0.0) {
                return Err(config(format!(
                    "weights p={p}, q={q} must be nonnegative and not both zero"
                )));
            }
        }
        Ok(())
    }

    fn opts(&self, seed: u64) -> CheckOptions {
        CheckOptions {
            override_positivity: self.override_positivity,
            seed: Some(seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Held,
    Violated,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub reports: Vec<InequalityReport>,
    /// Agreement with the alternative evaluation path, for the multi targets.
    pub agreement: Option<(f64, f64)>,
    /// Hermite–Hadamard weights used by the trial.
    pub weights: Option<(f64, f64)>,
}

impl TrialRecord {
    fn agrees(&self) -> bool {
        self.agreement.is_none_or(|(value, tol)| value <= tol)
    }

    pub fn outcome(&self) -> Outcome {
        if self.reports.iter().all(|r| r.vacuous) {
            Outcome::Vacuous
        } else if !self.agrees() || self.reports.iter().any(|r| !r.holds) {
            Outcome::Violated
        } else {
            Outcome::Held
        }
    }

    pub fn to_json(&self) -> TrialJson {
        TrialJson {
            trial: self.trial,
            seed: self.seed,
            outcome: self.outcome(),
            reports: self.reports.iter().map(ReportJson::from).collect(),
            agreement: self.agreement.map(|(v, _)| v),
            p: self.weights.map(|w| w.0),
            q: self.weights.map(|w| w.1),
        }
    }
}

/// One line of the report stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialJson {
    pub trial: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub reports: Vec<ReportJson>,
    #[serde(with = "opt_real", default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub target: String,
    pub total: usize,
    pub held: usize,
    pub violated: usize,
    pub vacuous: usize,
    /// Smallest `rhs - lhs` over non-vacuous reports.
    #[serde(with = "opt_real")]
    pub worst_slack: Option<f64>,
    pub first_violation: Option<ReportJson>,
    /// Whether sampling found `f` h-convex on the interval.
    pub f_h_convex: Option<bool>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CampaignSummary {
    pub fn from_trials(
        target: &str,
        trials: &[TrialRecord],
        f_h_convex: Option<bool>,
        wall_time: Duration,
    ) -> Self {
        let mut s = CampaignSummary {
            target: target.to_string(),
            total: trials.len(),
            held: 0,
            violated: 0,
            vacuous: 0,
            worst_slack: None,
            first_violation: None,
            f_h_convex,
            wall_time,
        };
        for t in trials {
            match t.outcome() {
                Outcome::Held => s.held += 1,
                Outcome::Vacuous => s.vacuous += 1,
                Outcome::Violated => {
                    s.violated += 1;
                    if s.first_violation.is_none() {
                        let culprit = t.reports.iter().find(|r| !r.holds).unwrap_or(&t.reports[0]);
                        s.first_violation = Some(culprit.into());
                    }
                }
            }
            for r in t.reports.iter().filter(|r| !r.vacuous) {
                s.worst_slack = Some(s.worst_slack.map_or(r.slack, |w| w.min(r.slack)));
            }
        }
        s
    }

    pub fn is_consistent(&self) -> bool {
        self.total == self.held + self.violated + self.vacuous
            && (self.violated == 0 || self.first_violation.is_some())
    }
}

/// The closing `{"summary": ...}` line of a report stream.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryLine<'a> {
    pub summary: &'a CampaignSummary,
}

impl CampaignSummary {
    pub fn to_line(&self) -> String {
        serde_json::to_string(&SummaryLine { summary: self }).expect("summary serializes")
    }
}

#[derive(Debug, Clone)]
pub struct CampaignRun {
    pub trials: Vec<TrialRecord>,
    pub summary: CampaignSummary,
    /// Converse constants used by the converse target.
    pub constants: Option<ConverseConstants>,
}

impl CampaignRun {
    /// JSON lines: one per trial followed by `{"summary": ...}`.
    pub fn write_jsonl<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for t in &self.trials {
            serde_json::to_writer(&mut out, &t.to_json())?;
            out.write_all(b"\n")?;
        }
        serde_json::to_writer(
            &mut out,
            &SummaryLine {
                summary: &self.summary,
            },
        )?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

struct Prepared {
    interval: SpectrumInterval,
    policy: CoefficientPolicy,
    converse: Option<(PiecewiseC2Function, ConverseConstants)>,
}

pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignRun> {
    cfg.validate()?;
    let start = Instant::now();
    let interval = cfg.spectrum_interval()?;
    let policy = cfg.effective_policy();
    let converse = match cfg.target {
        Target::Converse => {
            let pf = cfg.subdivision.build(&cfg.f, &interval)?;
            let k = compute_constants(&pf, &cfg.h, policy)?;
            Some((pf, k))
        }
        _ => None,
    };
    let prepared = Prepared {
        interval,
        policy,
        converse,
    };
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, &prepared, i))
        .collect::<Result<Vec<_>>>()?;
    let f_h_convex = check_h_convex(&cfg.f, &cfg.h, &interval, 2000, cfg.seed)
        .ok()
        .map(|w| w.holds);
    let summary =
        CampaignSummary::from_trials(cfg.target.name(), &trials, f_h_convex, start.elapsed());
    Ok(CampaignRun {
        trials,
        summary,
        constants: prepared.converse.map(|(_, k)| k),
    })
}

fn single_instance(
    cfg: &CampaignConfig,
    prep: &Prepared,
    n: usize,
    seed: u64,
) -> Result<(HermitianMatrix, UnitVector)> {
    match &cfg.instance {
        Some(inst) => Ok((inst.a.clone(), inst.x.clone())),
        None => Ok(random_instance(n, &prep.interval, seed)?),
    }
}

fn run_trial(cfg: &CampaignConfig, prep: &Prepared, index: usize) -> Result<TrialRecord> {
    let seed = cfg.seed.wrapping_add(index as u64);
    let opts = cfg.opts(seed);
    let n = cfg.n_range.pick(seed);
    let (f, h, policy) = (&cfg.f, &cfg.h, prep.policy);
    let mut agreement = None;
    let mut weights = None;
    let reports = match cfg.target {
        Target::MondPecaric | Target::Infimum => {
            let (a, x) = single_instance(cfg, prep, n, seed)?;
            vec![mond_pecaric_check(f, h, &a, &x, policy, opts)?]
        }
        Target::EndpointBound => {
            let (a, x) = single_instance(cfg, prep, n, seed)?;
            vec![endpoint_bound_check(
                f,
                h,
                &a,
                &x,
                policy,
                Some(prep.interval),
                opts,
            )?]
        }
        Target::HermiteHadamard => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (p, q) = cfg
                .weights
                .unwrap_or_else(|| (rng.random_range(0.05..1.0), rng.random_range(0.05..1.0)));
            let (a, x) = match &cfg.instance {
                Some(inst) => (inst.a.clone(), inst.x.clone()),
                None => {
                    let a = random_operator(n.max(2), &prep.interval, &mut rng)?;
                    let (m, big_m) = a.spectrum_hull();
                    let y = random_unit(a.dim(), &mut rng);
                    let x = match_barycenter(&a, &y, (p * m + q * big_m) / (p + q))?;
                    (a, x)
                }
            };
            weights = Some((p, q));
            let r = hermite_hadamard_check(f, h, &a, &x, p, q, policy, None, opts)?;
            vec![r.lower, r.upper, r.squared_chain]
        }
        Target::MultiOperator | Target::MultiConverse => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dims: Vec<usize> = (0..cfg.blocks)
                .map(|_| cfg.n_range.pick(rng.random()))
                .collect();
            let ops = dims
                .iter()
                .map(|d| random_operator(*d, &prep.interval, &mut rng))
                .collect::<opjensen_core::Result<Vec<_>>>()?;
            let xs = random_family(&dims, &mut rng)?;
            if cfg.target == Target::MultiOperator {
                let r = multi_operator_check(f, h, &ops, &xs, policy, opts)?;
                agreement = Some((r.agreement, opjensen_core::engine::BLOCK_AGREEMENT_TOL));
                vec![r.report]
            } else {
                let pf = cfg.subdivision.build(f, &prep.interval)?;
                let r = multi_converse_check(&pf, h, &ops, &xs, policy, opts)?;
                vec![r.ratio, r.difference]
            }
        }
        Target::WeightedMulti => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ops = (0..cfg.blocks)
                .map(|_| random_operator(n, &prep.interval, &mut rng))
                .collect::<opjensen_core::Result<Vec<_>>>()?;
            let x = random_unit(n, &mut rng);
            let raw: Vec<f64> = (0..cfg.blocks)
                .map(|_| rng.random_range(0.05..1.0))
                .collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let r = weighted_multi_check(f, h, &ops, &x, &weights, policy, opts)?;
            agreement = Some((r.agreement, WEIGHTED_AGREEMENT_TOL));
            vec![r.report]
        }
        Target::Converse => {
            let (pf, k) = prep.converse.as_ref().expect("prepared constants");
            let (a, x) = single_instance(cfg, prep, n, seed)?;
            let r = converse_check_with(pf, k, h, &a, &x, policy, opts)?;
            vec![r.ratio, r.difference]
        }
    };
    Ok(TrialRecord {
        trial: index,
        seed,
        reports,
        agreement,
        weights,
    })
}

/// Agreement required between the weighted form and its substitution.
pub const WEIGHTED_AGREEMENT_TOL: f64 = 1e-12;
