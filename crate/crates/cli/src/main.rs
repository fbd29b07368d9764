//! `seglab` command line: segment images, generate synthetic phantoms with
//! ground truth, and score predicted label maps.
//!
//! Exit codes: 0 success, 2 usage or parameter error, 3 I/O error,
//! 4 numerical divergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use seglab::error::Error;
use seglab::io::{load_image, load_label_map, write_image, write_label_map, ImageFormat};
use seglab::metrics::{evaluate, EvalReport};
use seglab::phantom::{junction_phantom, noisy_rectangles_phantom, piecewise_constant_phantom, Phantom};
use seglab::solver::{LambdaCost, LambdaMode, SegmentationResult, Solver, SolverParams};

#[derive(Parser)]
#[command(name = "seglab", version, about = "Multi-label segmentation with residual-driven adaptive regularization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment an image into a fixed number of labels.
    Segment(SegmentArgs),
    /// Generate a synthetic phantom and its ground-truth label map.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Score a predicted label map against ground truth.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LambdaCostArg {
    /// Confidence from the energy integrand including the `u` factor.
    Rho,
    /// Confidence from the `u`-free pointwise cost.
    Pointwise,
}

#[derive(Args)]
struct SegmentArgs {
    /// Input image (PGM, PPM, or 8-bit gray/RGB PNG).
    #[arg(long)]
    input: PathBuf,
    /// Number of labels.
    #[arg(long)]
    labels: usize,
    /// Label map output path (PNG); a PGM with raw indices is written
    /// alongside.
    #[arg(long, default_value = "labels.png")]
    output: PathBuf,
    /// RNG seed for the random initial labeling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Huber threshold of the data term.
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Huber threshold of the regularizer.
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// Sparsity weight of the adaptive-lambda Lasso step.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Residual scale of the confidence exponential.
    #[arg(long, default_value_t = 10.0)]
    beta: f64,
    /// Mutual-exclusivity weight (0 disables the constraint).
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// ADMM augmentation parameter.
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Stop when the max primal residual falls below this.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Gauss-Seidel sweeps per outer iteration.
    #[arg(long, default_value_t = 10)]
    gs_sweeps: usize,
    /// Data-residual unit (input intensities are multiplied by this inside
    /// the data terms).
    #[arg(long, default_value_t = 24.0)]
    intensity_scale: f64,
    /// Relaxation factor for the per-iteration lambda refresh, in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    lambda_relax: f64,
    /// Ablation: fixed global lambda instead of the adaptive scheme.
    #[arg(long)]
    global_lambda: Option<f64>,
    /// Which data cost feeds the confidence exponential.
    #[arg(long, value_enum, default_value_t = LambdaCostArg::Rho)]
    lambda_cost: LambdaCostArg,
    /// Directory for per-label soft fields (written as PGM).
    #[arg(long)]
    soft_fields: Option<PathBuf>,
    /// Per-iteration diagnostics CSV
    /// (iter, energy, primal_residual, mean_lambda_<i>).
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Angular wedges plus a central disc.
    Junction {
        #[arg(long, default_value_t = 5)]
        regions: usize,
        #[arg(long, default_value_t = 256)]
        size: usize,
        /// Disc radius as a fraction of the half-size.
        #[arg(long, default_value_t = 0.25)]
        disc_fraction: f64,
        #[arg(long, default_value = "junction.pgm")]
        image: PathBuf,
        #[arg(long, default_value = "junction_truth.pgm")]
        truth: PathBuf,
    },
    /// White background with three colored rectangles plus per-region noise.
    Rects {
        #[arg(long, default_value_t = 128)]
        size: usize,
        /// Per-region noise sigmas: background,left,middle,right.
        #[arg(long, value_delimiter = ',', num_args = 4, default_value = "0.01,0.03,0.05,0.08")]
        sigmas: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "rects.ppm")]
        image: PathBuf,
        #[arg(long, default_value = "rects_truth.pgm")]
        truth: PathBuf,
    },
    /// Random axis-aligned piecewise-constant partition.
    Pc {
        #[arg(long, default_value_t = 4)]
        regions: usize,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "pc.pgm")]
        image: PathBuf,
        #[arg(long, default_value = "pc_truth.pgm")]
        truth: PathBuf,
    },
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted label map (PGM indices).
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth label map (PGM indices).
    #[arg(long)]
    truth: PathBuf,
    /// Append the report as a CSV row (header written on creation).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print the report as a JSON object instead of plain text.
    #[arg(long)]
    json: bool,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_) | Error::Contract(_) => 2,
        Error::Io { .. } | Error::Format { .. } => 3,
        Error::NonFinite { .. } => 4,
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SEGLAB_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => seglab::set_thread_limit(n),
            _ => {
                eprintln!("error: SEGLAB_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Segment(args) => cmd_segment(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn build_params(args: &SegmentArgs) -> Result<SolverParams, Error> {
    if args.labels < 2 {
        return Err(Error::InvalidParameter(
            "segment needs at least 2 labels".into(),
        ));
    }
    let mut params = SolverParams::new(args.labels);
    params.eta = args.eta;
    params.mu = args.mu;
    params.alpha = args.alpha;
    params.beta = args.beta;
    params.tau = args.tau;
    params.theta = args.theta;
    params.max_iters = args.max_iters;
    params.primal_tol = args.tol;
    params.gs_sweeps = args.gs_sweeps;
    params.seed = args.seed;
    params.intensity_scale = args.intensity_scale;
    params.lambda_relax = args.lambda_relax;
    params.lambda_mode = match args.global_lambda {
        Some(g) => LambdaMode::Global(g),
        None => LambdaMode::Adaptive,
    };
    params.lambda_cost = match args.lambda_cost {
        LambdaCostArg::Rho => LambdaCost::Rho,
        LambdaCostArg::Pointwise => LambdaCost::Pointwise,
    };
    params.validate()?;
    Ok(params)
}

fn write_diagnostics(path: &Path, result: &SegmentationResult) -> Result<(), Error> {
    use std::io::Write;
    let to_io = |source: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(to_io)?;
    let mut w = std::io::BufWriter::new(file);
    let n = result.intensities.len();
    let mut header = String::from("iter,energy,primal_residual");
    for i in 0..n {
        header.push_str(&format!(",mean_lambda_{i}"));
    }
    writeln!(w, "{header}").map_err(to_io)?;
    for rec in &result.diagnostics {
        let mut line = format!("{},{:.9e},{:.9e}", rec.iter, rec.energy, rec.primal_residual);
        for lam in &rec.mean_lambda {
            line.push_str(&format!(",{lam:.9e}"));
        }
        writeln!(w, "{line}").map_err(to_io)?;
    }
    w.flush().map_err(to_io)
}

fn cmd_segment(args: SegmentArgs) -> Result<(), Error> {
    let params = build_params(&args)?;
    let image = load_image(&args.input)?;
    let started = Instant::now();
    let result = Solver::new(&image, params)?.run()?;
    let elapsed = started.elapsed();

    write_label_map(&result.labels, &args.output)?;
    let pgm_path = args.output.with_extension("pgm");
    write_label_map(&result.labels, &pgm_path)?;

    if let Some(dir) = &args.soft_fields {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        for (i, field) in result.soft_fields.iter().enumerate() {
            let clamped = field.map(|v| v.clamp(0.0, 1.0));
            write_image(&clamped, dir.join(format!("label_{i}.pgm")), ImageFormat::Pgm)?;
        }
    }
    if let Some(path) = &args.diagnostics {
        write_diagnostics(path, &result)?;
    }

    println!(
        "{} labels, {} iterations ({}), {:.3}s",
        result.intensities.len(),
        result.iterations,
        if result.converged { "converged" } else { "budget exhausted" },
        elapsed.as_secs_f64()
    );
    Ok(())
}

fn write_phantom(phantom: &Phantom, image_path: &Path, truth_path: &Path) -> Result<(), Error> {
    let format = ImageFormat::from_path(image_path)?;
    write_image(&phantom.image, image_path, format)?;
    write_label_map(&phantom.ground_truth, truth_path)?;
    println!(
        "{} -> {} + {}",
        phantom.description,
        image_path.display(),
        truth_path.display()
    );
    Ok(())
}

fn cmd_synth(command: SynthCommand) -> Result<(), Error> {
    match command {
        SynthCommand::Junction {
            regions,
            size,
            disc_fraction,
            image,
            truth,
        } => write_phantom(&junction_phantom(regions, size, disc_fraction)?, &image, &truth),
        SynthCommand::Rects {
            size,
            sigmas,
            seed,
            image,
            truth,
        } => {
            let sigmas: [f64; 4] = sigmas.try_into().map_err(|_| {
                Error::InvalidParameter("--sigmas wants exactly 4 values".into())
            })?;
            write_phantom(&noisy_rectangles_phantom(size, sigmas, seed)?, &image, &truth)
        }
        SynthCommand::Pc {
            regions,
            size,
            seed,
            image,
            truth,
        } => write_phantom(&piecewise_constant_phantom(regions, size, seed)?, &image, &truth),
    }
}

fn report_csv_row(report: &EvalReport) -> String {
    format!(
        "{:.6},{:.6},{:.6},{:.6}",
        report.precision, report.recall, report.f_measure, report.pixel_accuracy
    )
}

fn report_json(report: &EvalReport) -> String {
    format!(
        "{{\"precision\":{:.6},\"recall\":{:.6},\"f_measure\":{:.6},\"pixel_accuracy\":{:.6}}}",
        report.precision, report.recall, report.f_measure, report.pixel_accuracy
    )
}

fn cmd_eval(args: EvalArgs) -> Result<(), Error> {
    let pred = load_label_map(&args.pred)?;
    let truth = load_label_map(&args.truth)?;
    let report = evaluate(&pred, &truth)?;
    if args.json {
        println!("{}", report_json(&report));
    } else {
        println!(
            "precision {:.6}  recall {:.6}  f_measure {:.6}  pixel_accuracy {:.6}",
            report.precision, report.recall, report.f_measure, report.pixel_accuracy
        );
    }
    if let Some(path) = &args.csv {
        use std::io::Write;
        let to_io = |source: std::io::Error| Error::Io {
            path: path.clone(),
            source,
        };
        let fresh = !path.exists();
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(to_io)?;
        if fresh {
            writeln!(file, "precision,recall,f_measure,pixel_accuracy").map_err(to_io)?;
        }
        writeln!(file, "{}", report_csv_row(&report)).map_err(to_io)?;
    }
    Ok(())
}
