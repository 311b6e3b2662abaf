use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use serde_json::json;

use bregnmf::divergence::{BetaParam, Convention, Divergence, GeneratorFamily};
use bregnmf::io::{
    self, curve_data, export_trajectory, write_curve_csv, CsvOptions, Dataset, TrajectoryFormat,
    TrajectoryRecord,
};
use bregnmf::nmf::{solve, SolveReport, SolverConfig};
use bregnmf::verify::{self, Fault, VerifyConfig};

use crate::args::{CurveArgs, FactorizeArgs, InputFormat, VerifyArgs};

/// Process exit status with its message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn config(error: anyhow::Error) -> Self {
        Self { code: 1, error }
    }

    fn numeric(error: anyhow::Error) -> Self {
        Self { code: 2, error }
    }

    fn verify(error: anyhow::Error) -> Self {
        Self { code: 3, error }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure::config(error)
    }
}

fn parse_seeds(range: &str) -> anyhow::Result<Vec<u64>> {
    let (a, b) = range
        .split_once("..")
        .ok_or_else(|| anyhow!("--seeds expects `a..b`, got {range:?}"))?;
    let a: u64 = a
        .trim()
        .parse()
        .with_context(|| format!("bad seed range start {a:?}"))?;
    let b: u64 = b
        .trim()
        .parse()
        .with_context(|| format!("bad seed range end {b:?}"))?;
    if b < a {
        bail!("empty seed range {range:?}");
    }
    Ok((a..=b).collect())
}

fn divergence(args: &FactorizeArgs) -> anyhow::Result<Divergence> {
    let beta = BetaParam::new(args.beta, args.convention.into())?;
    Ok(match args.family {
        Some(f) => Divergence::Bregman(GeneratorFamily::new(f.into(), beta)),
        None => Divergence::Beta(beta),
    })
}

fn load(args: &FactorizeArgs) -> anyhow::Result<Dataset> {
    let ds = match args.format {
        InputFormat::Csv => {
            if !args.delimiter.is_ascii() {
                bail!("delimiter must be a single ASCII character");
            }
            let opts = CsvOptions {
                delimiter: args.delimiter as u8,
                has_header: args.has_header,
                floor: args.eps_floor,
            };
            io::load_csv(&args.input, &opts)
        }
        InputFormat::Sonar => io::load_sonar(&args.input),
    }
    .map_err(|e| match e {
        bregnmf::Error::Io { .. } => anyhow!("cannot load input: {e}"),
        other => anyhow!("failed to load {}: {other}", args.input.display()),
    })?;
    Ok(if args.transpose { ds.transpose() } else { ds })
}

struct RunOutput {
    seed: u64,
    dir: PathBuf,
    report: SolveReport,
}

pub fn factorize(args: &FactorizeArgs) -> Result<(), Failure> {
    let div = divergence(args)?;
    let base = SolverConfig {
        rank: args.rank,
        algorithm: args.algorithm.into(),
        divergence: div,
        max_iters: args.max_iters,
        rel_tol: args.tol,
        seed: args.seed,
        eps_floor: args.eps_floor,
        normalize_columns: args.normalize,
    };
    base.validate().map_err(|e| Failure::config(e.into()))?;
    let seeds = match &args.seeds {
        Some(range) => parse_seeds(range)?,
        None => vec![args.seed],
    };

    let ds = load(args)?;
    let (rows, cols) = ds.matrix.shape();
    if args.rank > rows.min(cols) {
        return Err(Failure::config(anyhow!(
            "rank {} exceeds min(F, N) = {} for a {rows}x{cols} matrix",
            args.rank,
            rows.min(cols)
        )));
    }

    // Solve everything before touching the output directory.
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let cfg = SolverConfig {
                    seed,
                    ..base.clone()
                };
                let v = &ds.matrix;
                scope.spawn(move || (seed, solve(v, &cfg)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });

    let multi = seeds.len() > 1;
    let mut outputs = Vec::with_capacity(results.len());
    for (seed, result) in results {
        let report = result.map_err(|e| match e {
            bregnmf::Error::NonFiniteObjective(_) => Failure::numeric(e.into()),
            other => Failure::config(other.into()),
        })?;
        if !report.final_objective().is_finite() {
            return Err(Failure::numeric(anyhow!(
                "seed {seed}: final objective is not finite"
            )));
        }
        let dir = if multi {
            args.out_dir.join(format!("seed-{seed}"))
        } else {
            args.out_dir.clone()
        };
        outputs.push(RunOutput { seed, dir, report });
    }

    for out in &outputs {
        write_run(args, &ds, &base, out).map_err(Failure::config)?;
        println!(
            "seed {}: objective {:e} -> {:e} in {} iterations (converged: {}) -> {}",
            out.seed,
            out.report.initial_objective(),
            out.report.final_objective(),
            out.report.iterations_run,
            out.report.converged,
            out.dir.display()
        );
    }
    Ok(())
}

fn write_run(
    args: &FactorizeArgs,
    ds: &Dataset,
    base: &SolverConfig,
    out: &RunOutput,
) -> anyhow::Result<()> {
    fs::create_dir_all(&out.dir).with_context(|| format!("cannot create {}", out.dir.display()))?;
    let r = &out.report;
    io::write_matrix_csv(r.factors.w(), out.dir.join("W.csv"), b',')?;
    io::write_matrix_csv(r.factors.h(), out.dir.join("H.csv"), b',')?;

    let format: TrajectoryFormat = args.trajectory_format.into();
    let traj_name = match format {
        TrajectoryFormat::Csv => "trajectory.csv",
        TrajectoryFormat::Json => "trajectory.json",
    };
    let record = TrajectoryRecord::new(
        format!("seed-{}", out.seed),
        base.algorithm.as_str(),
        base.divergence.to_string(),
        out.seed,
        &r.trajectory,
    );
    export_trajectory(&[record], out.dir.join(traj_name), format)?;

    let beta = base.divergence.beta();
    let convention: Convention = args.convention.into();
    let summary = json!({
        "input": args.input.display().to_string(),
        "format": format!("{:?}", args.format).to_lowercase(),
        "transposed": args.transpose,
        "shape": [ds.matrix.rows(), ds.matrix.cols()],
        "rank": base.rank,
        "algorithm": base.algorithm.as_str(),
        "divergence": base.divergence.to_string(),
        "convention": convention.as_str(),
        "beta": beta.to_convention(convention).value(),
        "beta_standard": beta.standard_value(),
        "seed": out.seed,
        "max_iters": base.max_iters,
        "rel_tol": base.rel_tol,
        "eps_floor": base.eps_floor,
        "initial_objective": r.initial_objective(),
        "final_objective": r.final_objective(),
        "iterations": r.iterations_run,
        "converged": r.converged,
        "floor_count": ds.provenance.floor_count,
        "load_warnings": ds.warnings.len(),
        "diagnostics": r.diagnostics,
    });
    let mut bytes = serde_json::to_vec_pretty(&summary)?;
    bytes.push(b'\n');
    io::write_atomic(out.dir.join("summary.json"), &bytes)?;
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let convention: Convention = args.convention.into();
    let mut cfg = match &args.beta_grid {
        Some(values) => {
            let betas = values
                .iter()
                .map(|&b| BetaParam::new(b, convention))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::config(e.into()))?;
            VerifyConfig::from_betas(&betas)
        }
        None => VerifyConfig::default(),
    };
    if args.inject_fault {
        cfg.fault = Some(Fault::WrongFamilyCScale);
    }
    let report = verify::run(&cfg);
    print!("{report}");
    if report.passed() {
        println!("all checks passed");
        return Ok(());
    }
    let offending: Vec<String> = report
        .failures()
        .map(|c| match c.worst {
            Some(w) => format!("{} at (beta={}, x={}, y={})", c.name, w.beta, w.x, w.y),
            None => c.name.to_string(),
        })
        .collect();
    Err(Failure::verify(anyhow!(
        "checks failed: {}",
        offending.join("; ")
    )))
}

fn parse_range(s: &str) -> anyhow::Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("--range expects `lo:hi`, got {s:?}"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .with_context(|| format!("bad range bound {lo:?}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .with_context(|| format!("bad range bound {hi:?}"))?;
    Ok((lo, hi))
}

pub fn curve(args: &CurveArgs) -> Result<(), Failure> {
    let convention: Convention = args.convention.into();
    let range = parse_range(&args.range)?;
    let betas = args
        .betas
        .iter()
        .map(|&b| BetaParam::new(b, convention))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::config(e.into()))?;
    let points = curve_data(
        &betas,
        range,
        args.samples,
        args.reference,
        args.order.into(),
    )
    .map_err(|e| Failure::config(e.into()))?;
    let path = match &args.output {
        Some(p) => p.clone(),
        None => args.out_dir.join("curve.csv"),
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    write_curve_csv(&points, args.order.into(), &path).map_err(|e| Failure::config(e.into()))?;
    println!("wrote {} rows to {}", points.len(), path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_seeds("7..7").unwrap(), vec![7]);
        assert!(parse_seeds("5..3").is_err());
        assert!(parse_seeds("5").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.1:3").unwrap(), (0.1, 3.0));
        assert_eq!(parse_range("-1:2").unwrap(), (-1.0, 2.0));
        assert!(parse_range("1-2").is_err());
    }
}
