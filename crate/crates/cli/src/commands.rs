use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use lre_core::bench::{run_experiment, ExperimentSpec};
use lre_core::budget::{overhead_curve, overhead_vs_delta, OverheadPoint};
use lre_core::interpolation::{default_scale_factors, ExtrapolationPlan, ScaleFactorConfig};
use lre_core::protocol::SimulatorBackend;
use lre_core::qasm_io::{emit_json, emit_qasm, parse_json, parse_qasm};
use lre_core::{
    chunk_circuit, fold_circuit, mitigate, BudgetReport, Circuit, LreError, MitigatedResult, MitigationConfig,
    NoiseModel, Observable, Strategy,
};
use serde::Serialize;

use crate::args::{
    BenchArgs, CircuitFormat, CoeffsArgs, Command, FoldArgs, NoiseArgs, OutputArgs, OverheadArgs, RunArgs,
    TableFormat,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Singular sample matrix; exit code 2.
    Numerical(LreError),
    Core(LreError),
    Io { path: Option<PathBuf>, source: io::Error },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Numerical(e) | CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path: Some(p), source } => write!(f, "{}: {source}", p.display()),
            CliError::Io { path: None, source } => write!(f, "{source}"),
        }
    }
}

impl From<LreError> for CliError {
    fn from(e: LreError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Core(e)
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

pub fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Coeffs(a) => coeffs(a),
        Command::Overhead(a) => overhead(a),
        Command::Fold(a) => fold(a),
        Command::Run(a) => run(a),
        Command::Bench(a) => bench(a),
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: Some(path.to_path_buf()),
        source,
    }
}

fn emit(output: &OutputArgs, bytes: &[u8]) -> CliResult {
    match &output.out {
        Some(path) => fs::write(path, bytes).map_err(io_err(path)),
        None => io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|source| CliError::Io { path: None, source }),
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text.into_bytes()
}

fn to_csv<T: Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::Core(LreError::InvalidConfig(format!("csv output failed: {e}"))))?;
    }
    w.into_inner()
        .map_err(|e| CliError::Io {
            path: None,
            source: e.into_error(),
        })
}

fn noise_model(args: &NoiseArgs) -> CliResult<NoiseModel> {
    Ok(NoiseModel::new(args.p1, args.p2)?)
}

fn format_lambda(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

fn parse_nodes(text: &str) -> CliResult<Vec<Vec<u32>>> {
    text.split(';')
        .map(|vector| {
            vector
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u32>()
                        .map_err(|_| CliError::Usage(format!("bad scale factor `{}` in --nodes", x.trim())))
                })
                .collect()
        })
        .collect()
}

#[derive(Serialize)]
struct CoeffRow {
    index: usize,
    lambda: String,
    eta: f64,
    gamma: f64,
    c: f64,
    c_tilde: f64,
}

#[derive(Serialize)]
struct CoeffReport<'a> {
    layers: usize,
    degree: u32,
    delta: Option<u32>,
    vectors: &'a [Vec<u32>],
    eta: &'a [f64],
    gamma: f64,
    c: f64,
    c_tilde: f64,
}

fn coeffs(a: CoeffsArgs) -> CliResult {
    let config = match &a.nodes {
        Some(text) => ScaleFactorConfig::new(a.layers, a.degree, parse_nodes(text)?)?,
        None => default_scale_factors(a.layers, a.degree, a.delta)?,
    };
    let plan = ExtrapolationPlan::new(config)?;
    let eta = plan.eta();
    let budget = BudgetReport::exact(eta);
    let bytes = match a.format {
        TableFormat::Csv => {
            let rows: Vec<CoeffRow> = plan
                .config()
                .vectors()
                .iter()
                .zip(eta.values())
                .enumerate()
                .map(|(index, (v, &e))| CoeffRow {
                    index,
                    lambda: format_lambda(v),
                    eta: e,
                    gamma: budget.gamma,
                    c: budget.c,
                    c_tilde: budget.c_tilde,
                })
                .collect();
            to_csv(&rows)?
        }
        TableFormat::Json => to_json(&CoeffReport {
            layers: plan.config().vars(),
            degree: plan.config().degree(),
            delta: plan.config().delta(),
            vectors: plan.config().vectors(),
            eta: eta.values(),
            gamma: budget.gamma,
            c: budget.c,
            c_tilde: budget.c_tilde,
        }),
    };
    emit(&a.output, &bytes)
}

fn parse_range(text: &str) -> CliResult<Vec<u32>> {
    let usage = || CliError::Usage(format!("--delta-range expects start:end:step, got `{text}`"));
    let parts: Vec<u32> = text
        .split(':')
        .map(|p| p.trim().parse::<u32>().map_err(|_| usage()))
        .collect::<CliResult<_>>()?;
    let [start, end, step] = parts[..] else {
        return Err(usage());
    };
    if step == 0 || start > end {
        return Err(usage());
    }
    Ok((start..=end).step_by(step as usize).collect())
}

fn overhead(a: OverheadArgs) -> CliResult {
    let mut points: Vec<OverheadPoint> = Vec::new();
    match (a.max_layers, a.layers, &a.delta_range) {
        (Some(max), None, None) => {
            for &d in &a.degree {
                points.extend(overhead_curve(1..=max, d, a.delta)?);
            }
        }
        (None, Some(l), Some(range)) => {
            let deltas = parse_range(range)?;
            for &d in &a.degree {
                points.extend(overhead_vs_delta(l, d, deltas.iter().copied())?);
            }
        }
        _ => {
            return Err(CliError::Usage(
                "give either --max-layers, or --layers with --delta-range".into(),
            ))
        }
    }
    let bytes = match a.format {
        TableFormat::Csv => to_csv(&points)?,
        TableFormat::Json => to_json(&points),
    };
    emit(&a.output, &bytes)
}

fn read_circuit(path: &Path) -> CliResult<(Circuit, CircuitFormat)> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => CircuitFormat::Json,
        Some("qasm") => CircuitFormat::Qasm,
        _ if text.trim_start().starts_with('{') => CircuitFormat::Json,
        _ => CircuitFormat::Qasm,
    };
    let circuit = match format {
        CircuitFormat::Json => parse_json(&text).map_err(LreError::from)?,
        CircuitFormat::Qasm => parse_qasm(&text).map_err(LreError::from)?,
    };
    Ok((circuit, format))
}

fn render(circuit: &Circuit, format: CircuitFormat) -> String {
    match format {
        CircuitFormat::Qasm => emit_qasm(circuit),
        CircuitFormat::Json => emit_json(circuit),
    }
}

fn extension(format: CircuitFormat) -> &'static str {
    match format {
        CircuitFormat::Qasm => "qasm",
        CircuitFormat::Json => "json",
    }
}

fn fold(a: FoldArgs) -> CliResult {
    let (circuit, input_format) = read_circuit(&a.input)?;
    let format = a.format.unwrap_or(input_format);
    let chunking = chunk_circuit(&circuit, a.chunks)?;

    let vectors: Vec<Vec<u32>> = match (&a.lambdas, a.all_vectors, a.degree) {
        (Some(l), false, _) => vec![l.clone()],
        (None, true, Some(d)) => {
            let config = default_scale_factors(a.chunks, d, a.delta)?;
            // Fail on a singular node set before writing anything.
            ExtrapolationPlan::new(config.clone())?;
            config.vectors().to_vec()
        }
        _ => return Err(CliError::Usage("give --lambdas, or --all-vectors with --degree".into())),
    };

    let folded: Vec<Circuit> = vectors
        .iter()
        .map(|v| fold_circuit(&circuit, &chunking, v, a.mode.into()))
        .collect::<Result<_, _>>()?;

    let Some(dir) = &a.out else {
        let mut stdout = io::stdout().lock();
        for c in &folded {
            stdout
                .write_all(render(c, format).as_bytes())
                .map_err(|source| CliError::Io { path: None, source })?;
        }
        return Ok(());
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (i, (c, v)) in folded.iter().zip(&vectors).enumerate() {
        let lambdas: Vec<String> = v.iter().map(u32::to_string).collect();
        let name = if a.all_vectors {
            format!("fold_{i:03}_{}.{}", lambdas.join("-"), extension(format))
        } else {
            format!("fold_{}.{}", lambdas.join("-"), extension(format))
        };
        let path = dir.join(name);
        fs::write(&path, render(c, format)).map_err(io_err(&path))?;
        log::info!("wrote {} (depth {})", path.display(), c.depth());
    }
    Ok(())
}

#[derive(Serialize)]
struct RunReport<'a> {
    width: usize,
    depth: usize,
    config: MitigationConfig,
    noise: NoiseModel,
    seed: u64,
    #[serde(flatten)]
    result: &'a MitigatedResult,
}

fn run(a: RunArgs) -> CliResult {
    let (circuit, _) = read_circuit(&a.input)?;
    let s_tot = if a.exact { 0 } else { a.shots };
    let chunks = a.chunks.unwrap_or(circuit.depth());
    let config = match Strategy::from(a.strategy) {
        Strategy::Lre => MitigationConfig::lre(a.degree, chunks, a.delta, s_tot),
        Strategy::Re => MitigationConfig::re(a.degree, a.delta, s_tot),
        Strategy::Unmitigated => MitigationConfig::unmitigated(s_tot),
    }
    .with_mode(a.mode.into());
    let noise = noise_model(&a.noise)?;
    let backend = SimulatorBackend::new(noise, Observable::ZeroProjector);
    let result = mitigate(&backend, &circuit, &config, a.seed)?;
    log::info!("{} estimate {:.6} (gamma {:.3})", config.strategy, result.value, result.budget.gamma);
    let report = RunReport {
        width: circuit.width(),
        depth: circuit.depth(),
        config,
        noise,
        seed: a.seed,
        result: &result,
    };
    emit(&a.output, &to_json(&report))
}

fn bench(a: BenchArgs) -> CliResult {
    let mut spec = ExperimentSpec::new(a.family.into(), a.sweep.into(), a.values.clone());
    spec.trials = a.trials;
    spec.qubits = a.qubits;
    spec.half_depth = a.half_depth;
    spec.p_cnot = a.p_cnot;
    spec.degree = a.degree;
    spec.delta = a.delta;
    spec.chunks = a.chunks;
    spec.s_tot = if a.exact { 0 } else { a.shots };
    spec.mode = a.mode.into();
    spec.noise = noise_model(&a.noise)?;
    spec.strategies = a.strategies.iter().map(|&s| s.into()).collect();
    spec.seed = a.seed;
    let report = run_experiment(&spec)?;
    let bytes = match a.format {
        TableFormat::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            buf
        }
        TableFormat::Json => to_json(&report),
    };
    emit(&a.output, &bytes)
}
