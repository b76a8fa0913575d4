//! Subcommand implementations.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clique_core::harness::{self, logistic_extrapolate, series, SweepSpec};
use clique_core::oracle::{self, ExactOffload, WeightClass};
use clique_core::syndrome::effective_frame;
use clique_core::{decode, CliqueError, Lattice, Neighbor, NoiseConfig, NoiseSampler, RunStats};
use serde::Serialize;
use serde_json::json;

use crate::{DataFormat, ExtrapolateArgs, LatticeArgs, NoiseArgs, ReportFormat, SimulateArgs, SweepArgs, VerifyArgs};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Infeasible(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Infeasible(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<CliqueError> for CliError {
    fn from(err: CliqueError) -> Self {
        match err {
            CliqueError::InfeasibleEnumeration(_) => CliError::Infeasible(err.to_string()),
            CliqueError::Io(_) => CliError::Io(err.to_string()),
            _ => CliError::Config(err.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn build_lattice(d: usize) -> Result<Lattice> {
    Ok(Lattice::build(d)?)
}

fn noise_config(noise: &NoiseArgs, rate: f64) -> Result<NoiseConfig> {
    if noise.cycles == 0 {
        return Err(CliError::Config("--cycles must be at least 1".into()));
    }
    let config = NoiseConfig::new(noise.model, rate)
        .with_rounds(noise.rounds)
        .with_seed(noise.seed)
        .with_measurement_rate(noise.measurement_rate.unwrap_or(rate))
        .with_cluster(noise.sigma, noise.cluster_size);
    config.validate()?;
    Ok(config)
}

pub fn lattice(args: LatticeArgs) -> Result<()> {
    let l = build_lattice(args.distance)?;
    let pos = |q: usize| {
        let (i, j) = l.data_position(q);
        json!({ "i": i, "j": j })
    };
    let data: Vec<_> = (0..l.data_count()).map(pos).collect();
    let mut ancillas: Vec<_> = l
        .ancillas()
        .iter()
        .map(|a| {
            let neighbors: Vec<_> = a
                .clique
                .iter()
                .filter_map(|e| match e.neighbor {
                    Neighbor::Ancilla(b) => {
                        let n = &l.ancillas()[b];
                        Some(json!({ "r": n.row, "c": n.col, "shared": pos(e.shared_data) }))
                    }
                    Neighbor::Boundary => None,
                })
                .collect();
            json!({
                "r": a.row,
                "c": a.col,
                "type": "X",
                "support": a.support.iter().map(|&q| pos(q)).collect::<Vec<_>>(),
                "neighbors": neighbors,
                "color": a.color,
                "boundary_slots": a.boundary_slots.iter().map(|&q| pos(q)).collect::<Vec<_>>(),
            })
        })
        .collect();
    ancillas.extend(l.opposite_positions().iter().zip(l.opposite_supports()).map(|(&(r, c), support)| {
        json!({
            "r": r,
            "c": c,
            "type": "Z",
            "support": support.iter().map(|&q| pos(q)).collect::<Vec<_>>(),
            "neighbors": [],
            "color": null,
            "boundary_slots": [],
        })
    }));
    let doc = json!({ "distance": l.distance(), "data": data, "ancillas": ancillas });
    write_json(&mut *sink(args.output.as_deref())?, &doc)
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a SweepSpec,
    cells: &'a [clique_core::CellStats],
}

fn emit(spec: &SweepSpec, stats: &RunStats, format: DataFormat, output: Option<&Path>) -> Result<()> {
    let mut out = sink(output)?;
    match format {
        DataFormat::Csv => {
            stats.write_csv(&mut out)?;
            out.flush()?;
            Ok(())
        }
        DataFormat::Json => write_json(&mut *out, &Report { config: spec, cells: &stats.cells }),
    }
}

fn run_sweep(spec: &SweepSpec) -> Result<RunStats> {
    for &d in &spec.distances {
        build_lattice(d)?;
    }
    let stats = harness::sweep(spec)?;
    debug_assert!(stats.cells.iter().all(|c| c.is_consistent()));
    Ok(stats)
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let config = noise_config(&args.noise, args.rate)?;
    let lattice = build_lattice(args.distance)?;
    let spec = SweepSpec {
        distances: vec![args.distance],
        rates: vec![args.rate],
        decoders: vec![args.decoder],
        base: config.clone(),
        measurement_rate: Some(config.measurement_rate),
        cycles: args.noise.cycles,
    };
    if let Some(path) = &args.trace {
        let mut out = sink(Some(path))?;
        let sampler = NoiseSampler::new(&lattice, &config)?;
        for cycle in 0..args.trace_limit.min(args.noise.cycles) {
            let pattern = sampler.sample(cycle);
            let frame = effective_frame(&lattice, &pattern)?;
            if frame.is_clear() {
                continue;
            }
            let outcome = decode(args.decoder, &lattice, &frame);
            let line = json!({
                "cycle": cycle,
                "errors": pattern.data_flips.iter_ones().collect::<Vec<_>>(),
                "syndrome": frame,
                "outcome": outcome,
            });
            serde_json::to_writer(&mut out, &line)?;
            writeln!(out)?;
        }
        out.flush()?;
    }
    let stats = run_sweep(&spec)?;
    emit(&spec, &stats, args.format, args.output.as_deref())
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let rates = args.rates.clone().or(args.rate.map(|r| vec![r])).expect("clap requires a rate");
    let base = noise_config(&args.noise, rates[0])?;
    for &r in &rates {
        noise_config(&args.noise, r)?;
    }
    let spec = SweepSpec {
        distances: args.distances,
        rates,
        decoders: args.decoders,
        base,
        measurement_rate: args.noise.measurement_rate,
        cycles: args.noise.cycles,
    };
    let stats = run_sweep(&spec)?;
    emit(&spec, &stats, args.format, args.output.as_deref())
}

#[derive(Serialize)]
struct Verdict {
    distance: usize,
    decoder: clique_core::Decoder,
    max_weight: usize,
    by_weight: Vec<WeightClass>,
    adjacent_pairs: WeightClass,
    exact: Vec<RateVerdict>,
}

#[derive(Serialize)]
struct RateVerdict {
    rate: f64,
    offload_probability: f64,
    tail_bound: f64,
}

impl From<(f64, ExactOffload)> for RateVerdict {
    fn from((rate, e): (f64, ExactOffload)) -> Self {
        RateVerdict { rate, offload_probability: e.probability, tail_bound: e.tail_bound }
    }
}

pub fn verify(args: VerifyArgs) -> Result<()> {
    let lattice = build_lattice(args.distance)?;
    let by_weight = oracle::enumerate_weights(&lattice, args.decoder, args.max_weight)?;
    let exact = args
        .rates
        .unwrap_or_default()
        .into_iter()
        .map(|rate| (rate, oracle::offload_from_classes(&lattice, rate, by_weight.clone())).into())
        .collect();
    let verdict = Verdict {
        distance: args.distance,
        decoder: args.decoder,
        max_weight: args.max_weight,
        by_weight,
        adjacent_pairs: oracle::adjacent_pair_class(&lattice, args.decoder),
        exact,
    };
    let mut out = sink(None)?;
    match args.format {
        ReportFormat::Json => write_json(&mut *out, &verdict),
        ReportFormat::Text => {
            writeln!(
                out,
                "distance {}, decoder {}, max weight {}",
                verdict.distance, verdict.decoder, verdict.max_weight
            )?;
            writeln!(
                out,
                "{:<12} {:>10} {:>10} {:>10} {:>16}",
                "class", "patterns", "local", "offload", "logical_failures"
            )?;
            let row = |out: &mut dyn Write, label: String, c: &WeightClass| {
                writeln!(
                    out,
                    "{label:<12} {:>10} {:>10} {:>10} {:>16}",
                    c.patterns,
                    c.patterns - c.offload,
                    c.offload,
                    c.logical_failures
                )
            };
            for c in &verdict.by_weight {
                row(&mut *out, format!("weight {}", c.weight), c)?;
            }
            row(&mut *out, "adjacent 2".to_string(), &verdict.adjacent_pairs)?;
            for e in &verdict.exact {
                writeln!(
                    out,
                    "rate {}: offload probability {:.6e} (+ at most {:.3e} from weights > {})",
                    e.rate, e.offload_probability, e.tail_bound, verdict.max_weight
                )?;
            }
            out.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SeriesFit {
    rate: f64,
    model: clique_core::NoiseModel,
    decoder: clique_core::Decoder,
    fit: clique_core::LogisticFit,
    predictions: Vec<harness::Prediction>,
}

pub fn extrapolate(args: ExtrapolateArgs) -> Result<()> {
    let file =
        File::open(&args.input).map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.input.display())))?;
    let stats = RunStats::read_csv(file)?;
    if stats.cells.is_empty() {
        return Err(CliError::Config(format!("{} has no rows", args.input.display())));
    }
    let mut fits = Vec::new();
    for group in series(&stats.cells) {
        let (fit, predictions) = logistic_extrapolate(&group, args.fit_window, &args.targets)?;
        for d in &fit.excluded {
            eprintln!(
                "note: d={d} excluded from the {} {} p={} fit (fraction is 0 or 1)",
                group[0].model, group[0].decoder, group[0].rate
            );
        }
        fits.push(SeriesFit {
            rate: group[0].rate,
            model: group[0].model,
            decoder: group[0].decoder,
            fit,
            predictions,
        });
    }
    let mut out = sink(None)?;
    match args.format {
        ReportFormat::Json => write_json(&mut *out, &fits),
        ReportFormat::Text => {
            for s in &fits {
                writeln!(
                    out,
                    "{} {} p={}: logit(f) = {:.6} + {:.6} d, fitted d in [{}, {}]",
                    s.model,
                    s.decoder,
                    s.rate,
                    s.fit.intercept,
                    s.fit.slope,
                    s.fit.fitted_range.0,
                    s.fit.fitted_range.1
                )?;
                for (d, r) in &s.fit.residuals {
                    writeln!(out, "  residual d={d}: {r:+.4}")?;
                }
                for p in &s.predictions {
                    writeln!(out, "  predict d={}: {:.6}", p.distance, p.offload_fraction)?;
                }
            }
            out.flush()?;
            Ok(())
        }
    }
}
