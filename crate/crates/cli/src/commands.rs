use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use semigroup_core::dilation::{egervary_dilation, parrott_tuple, power_dilation_verify, ParrottMode};
use semigroup_core::interp::{
    approx_error_sweep, property_suite, uniform_time_grid, weakly_decreasing, ContractionTuple,
    DiscretizedSemigroup, PropertyThresholds,
};
use semigroup_core::linalg::{op_norm, check_size};
use semigroup_core::structure::{preservation_suite, structure_report, StructureReport};
use semigroup_core::torus::{bscr_check, bscr_trace, GridTime};
use semigroup_core::vn::{vn_check, vn_search, SearchConfig, Verdict};
use semigroup_core::{CMatrix, Tolerance, C64};
use serde::Serialize;

use crate::args::*;
use crate::error::CliError;
use crate::formats::*;

/// Slack allowed when checking that sweep errors do not grow.
const SWEEP_SLACK: f64 = 1e-9;

/// The resolved configuration of one run, echoed in every report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, String>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_num: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flags: Option<BTreeMap<&'static str, bool>>,
    pub tol: f64,
    pub max_entries: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<&'static str>,
}

impl RunConfig {
    fn new(command: &str, tol: Tolerance, max_entries: usize) -> Self {
        RunConfig { command: command.to_string(), tol: tol.eps(), max_entries, ..Default::default() }
    }

    fn input(mut self, name: &str, path: &Path) -> Self {
        self.inputs.insert(name.to_string(), path.display().to_string());
        self
    }

    fn output(mut self, path: Option<&PathBuf>) -> Self {
        self.output = path.map(|p| p.display().to_string());
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub config: RunConfig,
    pub status: &'static str,
    pub result: T,
}

/// What a command produced: the report to print and whether every check
/// passed.
pub struct Outcome {
    pub json: String,
    pub passed: bool,
}

fn finish<T: Serialize>(config: RunConfig, passed: bool, status: &'static str, result: T) -> Result<Outcome, CliError> {
    let json = to_json_string(&Report { config, status, result })?;
    Ok(Outcome { json, passed })
}

fn pass_word(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

fn positive(name: &str, value: usize) -> Result<usize, CliError> {
    if value == 0 {
        Err(CliError::Input(format!("--{name} must be positive")))
    } else {
        Ok(value)
    }
}

fn semigroup(tuple: ContractionTuple, n: usize, max_entries: usize) -> Result<DiscretizedSemigroup, CliError> {
    positive("N", n)?;
    DiscretizedSemigroup::with_cap(tuple, n, max_entries).map_err(|e| match e {
        semigroup_core::Error::Input(m) => {
            CliError::Input(format!("{m}; lower --N or raise --max-entries / SEMIGROUP_MAX_ENTRIES"))
        }
        other => other.into(),
    })
}

pub fn dispatch(cli: &Cli, warn: &mut dyn Write) -> Result<Outcome, CliError> {
    let tol = Tolerance::new(cli.tol).map_err(|_| CliError::Input(format!("--tol must be finite and >= 0, got {}", cli.tol)))?;
    let cap = positive("max-entries", cli.max_entries)?;
    match &cli.command {
        Command::Interp(InterpCommand::Eval(a)) => interp_eval(a, tol, cap),
        Command::Interp(InterpCommand::Check(a)) => interp_check(a, tol, cap),
        Command::Bscr(a) => bscr(a, tol, cap),
        Command::Parrott(a) => parrott(a, tol, cap, warn),
        Command::Vn(a) => vn(a, tol, cap, warn),
        Command::VnSearch(a) => vn_search_cmd(a, tol, cap),
        Command::Dilate(a) => dilate(a, tol, cap),
        Command::Approx(a) => approx(a, tol, cap),
        Command::Structure(a) => structure(a, tol, cap),
        Command::Preserve(a) => preserve(a, tol, cap),
    }
}

#[derive(Serialize)]
struct EvalResult {
    time: String,
    total_dim: usize,
    op_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    operator: Option<MatrixJson>,
}

fn interp_eval(a: &InterpEvalArgs, tol: Tolerance, cap: usize) -> Result<Outcome, CliError> {
    let tuple = read_tuple(&a.tuple, tol)?;
    let sg = semigroup(tuple, a.n, cap)?;
    let t = GridTime::parse_with_denom(&a.t, a.n)?;
    let blocks = sg.eval_blocks(&t)?;
    let dense = blocks.to_dense();
    let mut config = RunConfig::new("interp eval", tol, cap).input("tuple", &a.tuple).output(a.out.as_ref());
    config.n = Some(a.n);
    config.d = Some(sg.d());
    config.t = Some(t.to_string());
    let operator = match &a.out {
        Some(path) => {
            write_json(path, &MatrixJson::from(&dense))?;
            None
        }
        None => Some(MatrixJson::from(&dense)),
    };
    let result = EvalResult { time: t.to_string(), total_dim: sg.total_dim(), op_norm: blocks.op_norm()?, operator };
    finish(config, true, "pass", result)
}

#[derive(Serialize)]
struct CheckResult {
    times_checked: usize,
    pairs_checked: usize,
    homomorphism: f64,
    commutation: f64,
    max_norm: f64,
    interpolation: f64,
    compression: f64,
    thresholds: BTreeMap<&'static str, f64>,
}

fn interp_check(a: &InterpCheckArgs, tol: Tolerance, cap: usize) -> Result<Outcome, CliError> {
    let tuple = read_tuple(&a.tuple, tol)?;
    let sg = semigroup(tuple, a.n, cap)?;
    let max_num = positive("max-num", a.max_num.unwrap_or(2 * a.n))?;
    let report = property_suite(&sg, max_num)?;
    let th = PropertyThresholds::default();
    let passed = report.passes(&th);
    let mut config = RunConfig::new("interp check", tol, cap).input("tuple", &a.tuple).output(a.out.as_ref());
    config.n = Some(a.n);
    config.d = Some(sg.d());
    config.max_num = Some(max_num);
    let result = CheckResult {
        times_checked: report.times_checked,
        pairs_checked: report.pairs_checked,
        homomorphism: report.homomorphism,
        commutation: report.commutation,
        max_norm: report.max_norm,
        interpolation: report.interpolation,
        compression: report.compression,
        thresholds: BTreeMap::from([
            ("homomorphism", th.homomorphism),
            ("commutation", th.commutation),
            ("contractivity_slack", th.contractivity_slack),
            ("interpolation", th.interpolation),
            ("compression", th.compression),
        ]),
    };
    let out = finish(config, passed, pass_word(passed), result)?;
    write_report_copy(a.out.as_deref(), &out)?;
    Ok(out)
}

fn write_report_copy(path: Option<&Path>, out: &Outcome) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, &out.json).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BscrResult {
    pairs_checked: usize,
    max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_points: Option<usize>,
}

fn bscr(a: &BscrArgs, tol: Tolerance, cap: usize) -> Result<Outcome, CliError> {
    let n = positive("N", a.n)?;
    check_size(n, cap)?;
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for s in 0..2 * n {
        for t in 0..2 * n {
            worst = worst.max(bscr_check(n, s, t)?);
            pairs += 1;
        }
    }
    let mut config = RunConfig::new("bscr", tol, cap).output(a.out.as_ref());
    config.n = Some(n);
    let mut trace_points = None;
    if let Some(pair) = &a.trace {
        let st = GridTime::parse_with_denom(pair, n)?;
        if st.dim() != 2 {
            return Err(CliError::Input(format!("--trace takes exactly two times s,t, got '{pair}'")));
        }
        let signal = match &a.signal {
            Some(p) => {
                config.inputs.insert("signal".into(), p.display().to_string());
                read_signal(p)?
            }
            None => vec![C64::new(1.0, 0.0); n],
        };
        let points = bscr_trace(n, st.nums()[0], st.nums()[1], &signal)?;
        let path = a.out.as_ref().expect("clap requires --out with --trace");
        let file = File::create(path).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        write_trace_csv(BufWriter::new(file), &points)?;
        config.t = Some(st.to_string());
        config.format = Some("csv");
        trace_points = Some(points.len());
    }
    let passed = worst == 0.0;
    finish(config, passed, pass_word(passed), BscrResult { pairs_checked: pairs, max_deviation: worst, trace_points })
}

#[derive(Serialize)]
struct ParrottResult {
    d: usize,
    dim: usize,
    inputs_commute: bool,
    input_commutator: f64,
    pairwise_products_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    tuple: Option<TupleJson>,
}

fn parrott(a: &ParrottArgs, tol: Tolerance, cap: usize, warn: &mut dyn Write) -> Result<Outcome, CliError> {
    let r1 = read_matrix(&a.r1)?;
    let r2 = read_matrix(&a.r2)?;
    check_size(2 * r1.rows(), cap)?;
    let mode = if a.relaxed { ParrottMode::RelaxedSecond } else { ParrottMode::Strict };
    let p = parrott_tuple(&r1, &r2, mode, tol)?;
    if p.inputs_commute {
        let _ = writeln!(warn, "warning: R1 and R2 commute, so the tuple may well admit a power dilation");
    }
    let mats = p.tuple.mats();
    let zero = mats.iter().all(|x| mats.iter().all(|y| (x * y).is_zero()));
    let json = TupleJson::from_mats(mats);
    let mut config = RunConfig::new("parrott", tol, cap).input("r1", &a.r1).input("r2", &a.r2).output(a.out.as_ref());
    config.flags = Some(BTreeMap::from([("relaxed", a.relaxed)]));
    let tuple = match &a.out {
        Some(path) => {
            write_json(path, &json)?;
            None
        }
        None => Some(json),
    };
    let result = ParrottResult {
        d: p.tuple.d(),
        dim: p.tuple.dim(),
        inputs_commute: p.inputs_commute,
        input_commutator: p.input_commutator,
        pairwise_products_zero: zero,
        tuple,
    };
    finish(config, zero, pass_word(zero), result)
}

fn vn(a: &VnArgs, tol: Tolerance, cap: usize, warn: &mut dyn Write) -> Result<Outcome, CliError> {
    let tuple = read_tuple(&a.tuple, tol)?;
    let poly = read_poly(&a.poly)?;
    let report = vn_check(&tuple, &poly, a.grid, tol)?;
    let mut config = RunConfig::new("vn", tol, cap).input("tuple", &a.tuple).input("poly", &a.poly).output(a.out.as_ref());
    config.d = Some(tuple.d());
    config.dim = Some(tuple.dim());
    config.m = Some(a.grid);
    if report.verdict == Verdict::Inconclusive {
        let _ = writeln!(warn, "inconclusive: lhs lies between the grid maximum and the certified bound; retry with a larger --grid");
    }
    let passed = report.verdict == Verdict::Holds;
    let out = finish(config, passed, report.verdict.as_str(), VnReportJson::from(&report))?;
    write_report_copy(a.out.as_deref(), &out)?;
    Ok(out)
}

#[derive(Serialize)]
struct ViolationJson {
    index: usize,
    tuple: TupleJson,
    poly: PolynomialJson,
    report: VnReportJson,
}

#[derive(Serialize)]
struct SearchResult {
    cases_run: usize,
    max_ratio: f64,
    max_ratio_index: usize,
    inconclusive: usize,
    violations: Vec<ViolationJson>,
}

fn vn_search_cmd(a: &VnSearchArgs, tol: Tolerance, cap: usize) -> Result<Outcome, CliError> {
    positive("d", a.d)?;
    positive("dim", a.dim)?;
    check_size(a.dim, cap)?;
    if a.grid < 2 {
        return Err(CliError::Input("--grid must be at least 2".into()));
    }
    let mut config = RunConfig::new("vn-search", tol, cap).output(a.out.as_ref());
    let mut extra = Vec::with_capacity(a.cases.len());
    for (k, path) in a.cases.iter().enumerate() {
        let case: VnCaseJson = read_json(path)?;
        extra.push((case.tuple.to_tuple(tol)?, semigroup_core::vn::MultiPolynomial::try_from(&case.poly)?));
        config.inputs.insert(format!("case{k}"), path.display().to_string());
    }
    let mut cfg = SearchConfig::new(a.d, a.dim, a.trials, a.seed, a.grid);
    cfg.poly_degree = a.poly_degree;
    cfg.tol = tol;
    let report = vn_search(&cfg, &extra)?;
    config.d = Some(a.d);
    config.dim = Some(a.dim);
    config.trials = Some(a.trials);
    config.seed = Some(a.seed);
    config.m = Some(a.grid);
    config.poly_degree = Some(a.poly_degree);
    let passed = report.violations.is_empty();
    let result = SearchResult {
        cases_run: report.cases_run,
        max_ratio: report.max_ratio,
        max_ratio_index: report.max_ratio_index,
        inconclusive: report.inconclusive,
        violations: report
            .violations
            .iter()
            .map(|v| ViolationJson {
                index: v.index,
                tuple: TupleJson::from_mats(v.tuple.mats()),
                poly: PolynomialJson::from(&v.poly),
                report: VnReportJson::from(&v.report),
            })
            .collect(),
    };
    let out = finish(config, passed, if passed { "pass" } else { "VIOLATED" }, result)?;
    write_report_copy(a.out.as_deref(), &out)?;
    Ok(out)
}

#[derive(Serialize)]
struct VerificationJson {
    max_deviation: f64,
    worst_index: Vec<usize>,
    indices_checked: usize,
    pass: bool,
}

#[derive(Serialize)]
struct DilateResult {
    dim: usize,
    dilation_dim: usize,
    n_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<VerificationJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unitarity_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidate: Option<CandidateJson>,
}

fn dilate(a: &DilateArgs, tol: Tolerance, cap: usize) -> Result<Outcome, CliError> {
    let s = read_matrix(&a.matrix)?;
    positive("m", a.m)?;
    let big = s.rows().checked_mul(a.m + 1).ok_or_else(|| CliError::Input("dilation size overflows".into()))?;
    check_size(big, cap)?;
    let cand = egervary_dilation(&s, a.m, tol)?;
    let mut config = RunConfig::new("dilate", tol, cap).input("matrix", &a.matrix).output(a.out.as_ref());
    config.n_max = Some(a.m);
    config.flags = Some(BTreeMap::from([("verify", a.verify)]));
    let mut passed = true;
    let (verification, unitarity_defect) = if a.verify {
        let tuple = ContractionTuple::new(vec![s.clone()], tol)?;
        let check = Tolerance::new(tol.eps().max(1e-10)).expect("positive tolerance");
        let rep = power_dilation_verify(&tuple, &cand, check)?;
        let v = &cand.unitaries[0];
        let defect = op_norm(&(&v.adjoint_mul(v) - &CMatrix::identity(v.rows())))?;
        passed = rep.pass && defect <= check.eps();
        let json = VerificationJson {
            max_deviation: rep.max_deviation,
            worst_index: rep.worst_index,
            indices_checked: rep.indices_checked,
            pass: rep.pass,
        };
        (Some(json), Some(defect))
    } else {
        (None, None)
    };
    let json = CandidateJson::from(&cand);
    let candidate = match &a.out {
        Some(path) => {
            write_json(path, &json)?;
            None
        }
        None => Some(json),
    };
    let result = DilateResult {
        dim: s.rows(),
        dilation_dim: big,
        n_max: a.m,
        verification,
        unitarity_defect,
        candidate,
    };
    finish(config, passed, pass_word(passed), result)
}

#[derive(Serialize)]
struct SweepRowJson {
    eps: f64,
    sup_error: f64,
}

#[derive(Serialize)]
struct ApproxResult {
    grid_points: usize,
    rows: Vec<SweepRowJson>,
    weakly_decreasing: bool,
    slack: f64,
}

fn parse_eps_list(s: &str) -> Result<Vec<f64>, CliError> {
    let list: Vec<f64> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(|| CliError::Input(format!("--eps-list entry '{x}' is not a positive number")))
        })
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err(CliError::Input("--eps-list is empty".into()));
    }
    Ok(list)
}

fn approx(a: &ApproxArgs, tol: Tolerance, cap: usize) -> Result<Outcome, CliError> {
    let gens = read_json::<TupleJson>(&a.generators)?.to_mats()?;
    let eps = parse_eps_list(&a.eps_list)?;
    if !(a.tmax.is_finite() && a.tmax >= 0.0) {
        return Err(CliError::Input(format!("--tmax must be finite and >= 0, got {}", a.tmax)));
    }
    positive("steps", a.steps)?;
    let points = (a.steps as u128 + 1).checked_pow(gens.len() as u32).unwrap_or(u128::MAX);
    if points > cap as u128 {
        return Err(CliError::Input(format!(
            "time grid has {points} points, above --max-entries {cap}; lower --steps"
        )));
    }
    let grid = uniform_time_grid(gens.len(), a.tmax, a.steps)?;
    let rows = approx_error_sweep(&gens, &eps, &grid, tol)?;
    let decreasing = weakly_decreasing(&rows, SWEEP_SLACK);

    let mut config = RunConfig::new("approx", tol, cap).input("generators", &a.generators).output(a.out.as_ref());
    config.d = Some(gens.len());
    config.eps = Some(eps);
    config.tmax = Some(a.tmax);
    config.steps = Some(a.steps);
    config.format = Some(match a.format {
        Format::Json => "json",
        Format::Csv => "csv",
    });
    let result = ApproxResult {
        grid_points: grid.len(),
        rows: rows.iter().map(|r| SweepRowJson { eps: r.eps, sup_error: r.sup_error }).collect(),
        weakly_decreasing: decreasing,
        slack: SWEEP_SLACK,
    };
    let out = finish(config, decreasing, pass_word(decreasing), result)?;
    if let Some(path) = &a.out {
        match a.format {
            Format::Json => write_report_copy(Some(path), &out)?,
            Format::Csv => {
                let file = File::create(path).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
                let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.sup_error)).collect();
                write_sweep_csv(BufWriter::new(file), &pairs)?;
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct StructureJson {
    is_contraction: bool,
    is_isometry: bool,
    is_unitary: bool,
    is_projection: bool,
    is_entrywise_nonneg: bool,
    preserves_unity: bool,
    adjoint_preserves_unity: bool,
    is_bimarkov: bool,
    deviations: BTreeMap<&'static str, f64>,
}

impl From<&StructureReport> for StructureJson {
    fn from(r: &StructureReport) -> Self {
        StructureJson {
            is_contraction: r.is_contraction,
            is_isometry: r.is_isometry,
            is_unitary: r.is_unitary,
            is_projection: r.is_projection,
            is_entrywise_nonneg: r.is_entrywise_nonneg,
            preserves_unity: r.preserves_unity,
            adjoint_preserves_unity: r.adjoint_preserves_unity,
            is_bimarkov: r.is_bimarkov(),
            deviations: r.deviations.clone(),
        }
    }
}

fn structure(a: &StructureArgs, tol: Tolerance, cap: usize) -> Result<Outcome, CliError> {
    let m = read_matrix(&a.matrix)?;
    check_size(m.rows().max(m.cols()), cap)?;
    let report = structure_report(&m, tol)?;
    let config = RunConfig::new("structure", tol, cap).input("matrix", &a.matrix);
    finish(config, true, "pass", StructureJson::from(&report))
}

#[derive(Serialize)]
struct ClassJson {
    class: &'static str,
    base_in_class: bool,
    preserved: bool,
    worst_deviation: f64,
    converse_consistent: bool,
}

#[derive(Serialize)]
struct PreserveResult {
    times_checked: usize,
    classes: Vec<ClassJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_nonneg: Option<bool>,
}

fn preserve(a: &PreserveArgs, tol: Tolerance, cap: usize) -> Result<Outcome, CliError> {
    let tuple = read_tuple(&a.tuple, tol)?;
    let d = tuple.d();
    let sg = semigroup(tuple.clone(), a.n, cap)?;
    let max_num = positive("max-num", a.max_num.unwrap_or(2 * a.n))?;
    let times = GridTime::enumerate(a.n, d, max_num)?;
    let report = preservation_suite(sg.base(), a.n, &times, tol)?;
    let mut config = RunConfig::new("preserve", tol, cap).input("tuple", &a.tuple);
    config.n = Some(a.n);
    config.d = Some(d);
    config.max_num = Some(max_num);
    let passed = report.passes();
    let result = PreserveResult {
        times_checked: report.times_checked,
        classes: report
            .classes
            .iter()
            .map(|c| ClassJson {
                class: c.class.name(),
                base_in_class: c.base_in_class,
                preserved: c.preserved,
                worst_deviation: c.worst_deviation,
                converse_consistent: c.converse_consistent,
            })
            .collect(),
        exact_nonneg: report.exact_nonneg,
    };
    finish(config, passed, pass_word(passed), result)
}
