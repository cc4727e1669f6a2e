use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::identities::{run_identity, Identity};
use super::report::{ExperimentReport, Relation, ReportRow};
use crate::correlation::{max_correlation_exhaustive, sampled_correlation_profile, DEFAULT_POINT_SAMPLES};
use crate::error::{Error, Result};
use crate::field::{base_p_digits, FieldVector, PrimeField};
use crate::functions::{materialize, FunctionDescriptor, MaterializeMode, DEFAULT_DENSE_CAP};
use crate::gowers::{gowers_norm_exact, gowers_norm_mc};
use crate::mc::stream_rng;
use crate::polynomial::MultiIndexPolynomial;
use crate::quadratic::{
    af_event_estimate, common_zero_bound_check, dixon_spectrum_check, minor_determinant_chain, rank_tail_check,
    s4_u4_rank_route, s_bilinear, second_derivative_s4, AffineSupport, CubicTensor, QuadraticForm, SweepMode,
    SymmetricBitMatrix,
};
use crate::symmetric::{eval_symmetric, SymmetricSpec};

pub const EXACT_NORM_DIMS: [usize; 3] = [6, 8, 10];
pub const MC_NORM_DIMS: [usize; 3] = [16, 24, 32];
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;
/// Lower limit for the exact `U^4` norms; the `N = 6` value is about 0.90.
pub const EXACT_NORM_FLOOR: f64 = 0.5;
pub const MC_RAW_FLOOR: f64 = 0.01;
pub const EXHAUSTIVE_CORRELATION_DIMS: [usize; 2] = [4, 5];
pub const PROFILE_DIMS: [usize; 4] = [12, 16, 20, 24];
pub const DEFAULT_PROFILE_TRIALS: u64 = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    IcgnGowers,
    IcgnCorrelation,
    GeneralN,
    Digits,
    Identities,
    Dixon,
    RankTail,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::IcgnGowers,
        Experiment::IcgnCorrelation,
        Experiment::GeneralN,
        Experiment::Digits,
        Experiment::Identities,
        Experiment::Dixon,
        Experiment::RankTail,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::IcgnGowers => "icgn-gowers",
            Experiment::IcgnCorrelation => "icgn-correlation",
            Experiment::GeneralN => "general-n",
            Experiment::Digits => "digits",
            Experiment::Identities => "identities",
            Experiment::Dixon => "dixon",
            Experiment::RankTail => "rank-tail",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment {s:?}")))
    }
}

/// Overrides for the per-experiment defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExperimentParams {
    pub seed: u64,
    /// Monte Carlo sample count.
    pub samples: Option<u64>,
    /// Profile trials, or instance counts for the check suites.
    pub trials: Option<u64>,
}

pub fn run_experiment(experiment: Experiment, params: &ExperimentParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(experiment.name(), params.seed);
    match experiment {
        Experiment::IcgnGowers => icgn_gowers(&mut report, params)?,
        Experiment::IcgnCorrelation => icgn_correlation(&mut report, params)?,
        Experiment::GeneralN => general_n(&mut report)?,
        Experiment::Digits => digits(&mut report)?,
        Experiment::Identities => identities(&mut report, params)?,
        Experiment::Dixon => dixon(&mut report, params)?,
        Experiment::RankTail => rank_tail(&mut report, params)?,
    }
    Ok(report)
}

fn s_n(n: usize, field: PrimeField, dim: usize) -> Result<crate::functions::FiniteFunction> {
    materialize(
        &FunctionDescriptor::Symmetric(n),
        field,
        dim,
        MaterializeMode::Auto,
        DEFAULT_DENSE_CAP,
    )
}

fn icgn_gowers(report: &mut ExperimentReport, params: &ExperimentParams) -> Result<()> {
    let samples = params.samples.unwrap_or(DEFAULT_MC_SAMPLES);
    report.param("samples", samples);
    report.param("exact_dims", EXACT_NORM_DIMS.to_vec());
    report.param("mc_dims", MC_NORM_DIMS.to_vec());
    let b = PrimeField::BINARY;
    let mut trend: Vec<(usize, f64)> = Vec::new();
    for dim in EXACT_NORM_DIMS {
        let e = gowers_norm_exact(&s_n(4, b, dim)?, 4)?;
        let exact = e.exact_raw.expect("binary exact evaluation");
        report.push(ReportRow::info(dim, "u4_raw_exact", e.raw_power).with_exact(exact));
        report.push(ReportRow::new(
            dim,
            "u4_norm_exact",
            e.value,
            Relation::Gt,
            Some(EXACT_NORM_FLOOR),
        ));
        trend.push((dim, e.value));
    }
    for (i, dim) in MC_NORM_DIMS.into_iter().enumerate() {
        let exact = s4_u4_rank_route(dim)?;
        report.push(
            ReportRow::info(dim, "u4_raw_rank_route", exact.raw_power).with_exact(exact.exact_raw.expect("exact")),
        );
        trend.push((dim, exact.value));
        let f = s_n(4, b, dim)?;
        let mc = gowers_norm_mc(&f, 4, samples, params.seed.wrapping_add(i as u64))?;
        report.push(
            ReportRow::new(
                dim,
                "u4_raw_mc",
                mc.raw_power,
                Relation::Within3Sigma,
                Some(exact.raw_power),
            )
            .with_err(mc.std_error),
        );
        report.push(ReportRow::new(
            dim,
            "u4_raw_mc_floor",
            mc.raw_power,
            Relation::Gt,
            Some(MC_RAW_FLOOR),
        ));
    }
    for w in trend.windows(2) {
        report.push(ReportRow::new(
            w[1].0,
            "u4_norm_trend_step",
            w[1].1 - w[0].1,
            Relation::Le,
            Some(0.0),
        ));
    }
    Ok(())
}

fn icgn_correlation(report: &mut ExperimentReport, params: &ExperimentParams) -> Result<()> {
    let trials = params.trials.unwrap_or(DEFAULT_PROFILE_TRIALS);
    report.param("degree", 3);
    report.param("trials", trials);
    let b = PrimeField::BINARY;
    let mut exhaustive = Vec::new();
    for dim in EXHAUSTIVE_CORRELATION_DIMS {
        let r = max_correlation_exhaustive(&s_n(4, b, dim)?, 3)?;
        let (num, log2) = r.exact.expect("exact over F_2");
        report
            .push(ReportRow::info(dim, "max_corr_exhaustive", r.max_abs).with_exact(format!("{}/2^{log2}", num.abs())));
        exhaustive.push(r.max_abs);
    }
    let (at4, at5) = (exhaustive[0], exhaustive[1]);
    report.push(ReportRow::new(5, "max_corr_decrease", at5, Relation::Lt, Some(at4)));
    let mut prev: Option<(f64, f64)> = None;
    for (i, dim) in PROFILE_DIMS.into_iter().enumerate() {
        let f = s_n(4, b, dim)?;
        let p = sampled_correlation_profile(&f, 3, trials, params.seed.wrapping_add(i as u64), DEFAULT_POINT_SAMPLES)?;
        report.push(ReportRow::info(dim, "corr_q50", p.q50));
        report.push(ReportRow::info(dim, "corr_q90", p.q90));
        report.push(ReportRow::new(dim, "corr_q99", p.q99, Relation::Lt, Some(at5)).with_err(p.q99_std_error));
        report.push(ReportRow::info(dim, "corr_max", p.max));
        if let Some((q, s)) = prev {
            let sigma = (s * s + p.q99_std_error * p.q99_std_error).sqrt();
            report.push(
                ReportRow::new(dim, "corr_q99_increase", p.q99 - q, Relation::Le, Some(2.0 * sigma)).with_err(sigma),
            );
        }
        prev = Some((p.q99, p.q99_std_error));
    }
    Ok(())
}

/// `(p, n, dims)` for `||S_n||_{U^{n-p+2}}`.
pub const GENERAL_N_CASES: [(u32, usize, &[usize]); 2] = [(2, 5, &[5, 6, 7, 8]), (2, 6, &[6])];

fn general_n(report: &mut ExperimentReport) -> Result<()> {
    for (p, n, dims) in GENERAL_N_CASES {
        let field = PrimeField::new(p)?;
        let order = n - p as usize + 2;
        for &dim in dims {
            let e = gowers_norm_exact(&s_n(n, field, dim)?, order)?;
            let mut row = ReportRow::new(
                dim,
                format!("p{p}_s{n}_u{order}_norm"),
                e.value,
                Relation::Gt,
                Some(0.0),
            );
            if let Some(x) = e.exact_raw {
                row = row.with_exact(x);
            }
            report.push(row);
        }
    }
    Ok(())
}

/// `C(w, n) mod p` from the product formula with big integers.
fn binomial_mod(w: usize, n: usize, p: u32) -> u32 {
    use num_bigint::BigUint;
    if n > w {
        return 0;
    }
    let mut c = BigUint::from(1u32);
    for i in 0..n {
        c = c * BigUint::from(w - i) / BigUint::from(i + 1);
    }
    (c % p).iter_u32_digits().next().unwrap_or(0)
}

pub const DIGIT_CUBE_DIM: usize = 14;

fn digits(report: &mut ExperimentReport) -> Result<()> {
    report.param("cube_dim", DIGIT_CUBE_DIM);
    for p in [2u32, 3] {
        let field = PrimeField::new(p)?;
        let n = (p * p) as usize;
        let len = (p * p * p) as usize - 1;
        let spec = SymmetricSpec::new(n, field, len);
        for w in 0..=len {
            let x = FieldVector::from_values(field, &(0..len).map(|j| u32::from(j < w)).collect::<Vec<_>>())?;
            let v = eval_symmetric(&spec, &x);
            let digit = base_p_digits(w as u64, p, 3)[2];
            report.push(
                ReportRow::new(
                    w,
                    format!("p{p}_s{n}_at_weight"),
                    f64::from(v),
                    Relation::Eq,
                    Some(f64::from(digit)),
                )
                .with_pass(v == binomial_mod(w, n, p) && v == digit),
            );
        }
        let mut mismatches = 0u64;
        let dim = DIGIT_CUBE_DIM;
        for n in 0..=dim {
            let spec = SymmetricSpec::new(n, field, dim);
            for mask in 0..1u64 << dim {
                let x = FieldVector::from_values(field, &(0..dim).map(|j| (mask >> j & 1) as u32).collect::<Vec<_>>())?;
                mismatches += u64::from(eval_symmetric(&spec, &x) != binomial_mod(mask.count_ones() as usize, n, p));
            }
        }
        report.push(ReportRow::new(
            dim,
            format!("p{p}_cube_lucas_mismatches"),
            mismatches as f64,
            Relation::Eq,
            Some(0.0),
        ));
    }
    Ok(())
}

fn identities(report: &mut ExperimentReport, params: &ExperimentParams) -> Result<()> {
    for id in Identity::ALL {
        let instances = params.trials.unwrap_or_else(|| id.default_instances());
        let r = run_identity(id, instances, params.seed)?;
        report.param(&format!("{}_instances", id.name()), instances);
        report.push(
            ReportRow::new(
                0,
                format!("{}_failures", id.name()),
                r.failures as f64,
                Relation::Eq,
                Some(0.0),
            )
            .with_pass(r.failures == 0 && r.instances == instances),
        );
    }
    Ok(())
}

pub const DIXON_INSTANCES: u64 = 200;

fn dixon(report: &mut ExperimentReport, params: &ExperimentParams) -> Result<()> {
    let instances = params.trials.unwrap_or(DIXON_INSTANCES);
    report.param("instances", instances);
    let mut rng = stream_rng(params.seed, 0);
    let mut failures = 0u64;
    for _ in 0..instances {
        let q = QuadraticForm::random(rng.random_range(1..=12), &mut rng)?;
        failures += u64::from(!dixon_spectrum_check(&q)?.pass);
    }
    report.push(ReportRow::new(
        12,
        "random_quadratic_failures",
        failures as f64,
        Relation::Eq,
        Some(0.0),
    ));

    let mut rng = stream_rng(params.seed, 1);
    let (mut outside, mut done) = (0u64, 0u64);
    while done < instances {
        let dim = rng.random_range(1..=12);
        let y = FieldVector::random(PrimeField::BINARY, dim, &mut rng);
        let z = FieldVector::random(PrimeField::BINARY, dim, &mut rng);
        if s_bilinear(&y, &z)? {
            continue;
        }
        let r = dixon_spectrum_check(&second_derivative_s4(&y, &z)?)?;
        let af = AffineSupport::new(&y, &z)?;
        let inside = r.support.iter().all(|&a| af.points().contains(&a));
        outside += u64::from(!(r.pass && inside));
        done += 1;
    }
    report.push(ReportRow::new(
        12,
        "s4_support_outside_af",
        outside as f64,
        Relation::Eq,
        Some(0.0),
    ));

    let mut rng = stream_rng(params.seed, 2);
    let (mut low, mut done) = (0u64, 0u64);
    while done < instances {
        let dim = rng.random_range(1..=12);
        let y = FieldVector::random(PrimeField::BINARY, dim, &mut rng);
        let z = FieldVector::random(PrimeField::BINARY, dim, &mut rng);
        if !s_bilinear(&y, &z)? {
            continue;
        }
        let r = dixon_spectrum_check(&second_derivative_s4(&y, &z)?)?;
        low += u64::from(!r.pass || 2 * r.h + 5 < dim);
        done += 1;
    }
    report.push(ReportRow::new(
        12,
        "s4_rank_deficit_when_s_is_one",
        low as f64,
        Relation::Eq,
        Some(0.0),
    ));
    Ok(())
}

pub const RANK_TAIL_INSTANCES: u64 = 20;

fn rank_tail(report: &mut ExperimentReport, params: &ExperimentParams) -> Result<()> {
    let instances = params.trials.unwrap_or(RANK_TAIL_INSTANCES);
    report.param("instances", instances);
    let mut rng = stream_rng(params.seed, 0);
    let mut worst = 0.0f64;
    let mut failed = 0u64;
    for _ in 0..instances {
        let r = af_event_estimate(&CubicTensor::random(8, &mut rng)?, SweepMode::Exhaustive)?;
        worst = worst.max(r.max_frequency);
        failed += u64::from(!r.holds);
    }
    report.push(
        ReportRow::new(8, "af_event_max_frequency", worst, Relation::Le, Some(0.75f64.powi(8))).with_pass(failed == 0),
    );

    let mut rng = stream_rng(params.seed, 1);
    let dim = 10;
    let (mut failed, mut worst_ratio) = (0u64, 0.0f64);
    for _ in 0..instances {
        let fam = CubicTensor::random(dim, &mut rng)?.a_family();
        for c in [SymmetricBitMatrix::zeros(dim), SymmetricBitMatrix::identity(dim)] {
            for k in 1..=dim {
                let r = rank_tail_check(&fam, &c, k, SweepMode::Exhaustive)?;
                failed += u64::from(!r.holds);
                worst_ratio = worst_ratio.max(r.frequency / r.bound);
            }
        }
    }
    report.push(
        ReportRow::new(dim, "rank_tail_worst_ratio", worst_ratio, Relation::Le, Some(1.0)).with_pass(failed == 0),
    );

    let tight = common_zero_bound_check(&BTreeMap::new(), 10, 3)?;
    report.push(
        ReportRow::new(
            10,
            "common_zeros_unperturbed_k3",
            tight.common_zeros as f64,
            Relation::Eq,
            Some(tight.bound as f64),
        )
        .with_pass(u128::from(tight.common_zeros) == tight.bound),
    );
    let mut rng = stream_rng(params.seed, 2);
    let mut failed = 0u64;
    for t in 0..instances {
        let (dim, k) = (6 + (t as usize % 5), 1 + (t as usize % 3));
        let mut pert = BTreeMap::new();
        for set in subsets(dim, k) {
            pert.insert(
                set,
                MultiIndexPolynomial::random(PrimeField::BINARY, dim, k - 1, &mut rng),
            );
        }
        failed += u64::from(!common_zero_bound_check(&pert, dim, k)?.holds);
    }
    report.push(ReportRow::new(
        0,
        "common_zero_failures",
        failed as f64,
        Relation::Eq,
        Some(0.0),
    ));

    let mut rng = stream_rng(params.seed, 3);
    let mut failed = 0u64;
    for t in 0..instances.min(5) {
        let fam = CubicTensor::random(8, &mut rng)?.a_family();
        let k = 2 + t as usize % 4;
        let r = minor_determinant_chain(&fam, &SymmetricBitMatrix::identity(8), k)?;
        failed += u64::from(!(r.leading_terms_ok && r.low_rank_within_zeros && r.common.is_some_and(|c| c.holds)));
    }
    report.push(ReportRow::new(
        8,
        "determinant_chain_failures",
        failed as f64,
        Relation::Eq,
        Some(0.0),
    ));
    Ok(())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}
