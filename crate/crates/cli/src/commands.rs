//! One function per subcommand.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use yona_core::augment::PolicyTable;
use yona_core::dataset::{
    read_cifar, read_png, synthetic_cifar, write_augmented_dataset, write_cifar, write_png, CifarRecord,
    CifarVariant,
};
use yona_core::eval::{
    accuracy, benchmark_throughput, collect_stats, predict_records, rms_calibration_error_percent,
    train_linear_probe, ProbeConfig,
};
use yona_core::{
    AugmentKind, AugmentationSpec, AxisPolicy, Composition, Execution, ImageTensor, MaskedPiecePolicy, NoiseKind,
    Pipeline, RegionScale, YonaConfig,
};

use crate::cli::{
    AugmentArgs, AxisArg, BenchArgs, DatasetKind, MaskedPieceArg, PipelineArgs, PreviewArgs, ProbeArgs,
    RegionScaleArg, RunArgs, StatsArgs, SynthArgs,
};
use crate::error::{CliError, CliResult};

fn variant(kind: DatasetKind) -> CifarVariant {
    match kind {
        DatasetKind::Cifar10 => CifarVariant::C10,
        DatasetKind::Cifar100 => CifarVariant::C100,
    }
}

fn exec(run: &RunArgs) -> Execution {
    Execution::from_workers(run.workers)
}

fn pair(flag: &str, s: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts.as_slice() else {
        return Err(CliError::usage(format!("--{flag} wants MIN,MAX, got `{s}`")));
    };
    let num = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| CliError::usage(format!("--{flag}: `{v}` is not a number")))
    };
    Ok((num(a)?, num(b)?))
}

/// The augmentation named `name` with the parameter flags applied.
pub fn augmentation(name: &str, args: &PipelineArgs) -> CliResult<AugmentationSpec> {
    let mut spec = AugmentationSpec::by_name(name)?;
    match &mut spec.kind {
        AugmentKind::Jitter(p) => {
            p.brightness = args.brightness;
            p.contrast = args.contrast;
            p.saturation = args.saturation;
            p.hue = args.hue;
        }
        AugmentKind::Erasing(p) => {
            p.scale = pair("erasing-scale", &args.erasing_scale)?;
            p.ratio = pair("erasing-ratio", &args.erasing_ratio)?;
            p.fill = args.erasing_fill;
        }
        AugmentKind::Cutout(p) => p.mask_area_fraction = args.cutout_area,
        AugmentKind::Grid(p) => {
            p.rows = args.grid_rows;
            p.cols = args.grid_cols;
            p.cell_probability = args.grid_cell_p;
        }
        AugmentKind::RandAug(p) => {
            p.num_ops = args.randaug_n;
            p.magnitude = args.randaug_m;
        }
        AugmentKind::AutoAug(table) => {
            if let Some(path) = &args.autoaug_policy {
                *table = Arc::new(PolicyTable::from_file(path)?);
            }
        }
        AugmentKind::Identity | AugmentKind::HFlip | AugmentKind::VFlip => {}
    }
    if let Some(p) = args.apply_probability {
        spec = spec.with_probability(p);
    }
    spec.validate()?;
    Ok(spec)
}

pub fn yona_config(args: &PipelineArgs) -> CliResult<YonaConfig> {
    let cfg = YonaConfig {
        mask_fraction: args.mask_fraction,
        axis_policy: match args.axis {
            AxisArg::Random => AxisPolicy::RandomEqual,
            AxisArg::Height => AxisPolicy::FixedHeight,
            AxisArg::Width => AxisPolicy::FixedWidth,
        },
        noise: NoiseKind::parse(&args.noise)?,
        masked_piece_policy: match args.masked_piece {
            MaskedPieceArg::Random => MaskedPiecePolicy::RandomEqual,
            MaskedPieceArg::First => MaskedPiecePolicy::AlwaysFirst,
            MaskedPieceArg::Second => MaskedPiecePolicy::AlwaysSecond,
        },
        region_scale: match args.region_scale {
            RegionScaleArg::Piece => RegionScale::Piece,
            RegionScaleArg::Image => RegionScale::Image,
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn composition(args: &PipelineArgs) -> CliResult<Composition> {
    Ok(if args.yoco {
        Composition::Yoco
    } else if args.no_yona {
        Composition::Plain
    } else {
        Composition::Yona(yona_config(args)?)
    })
}

pub fn pipeline(args: &PipelineArgs) -> CliResult<Pipeline> {
    let p = Pipeline::new(augmentation(&args.aug, args)?, composition(args)?);
    p.validate()?;
    Ok(p)
}

fn emit(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub fn augment(args: &AugmentArgs) -> CliResult<()> {
    let pipeline = pipeline(&args.pipeline)?;
    let v = variant(args.dataset);
    let records = read_cifar(&args.input, v)?;
    let manifest = write_augmented_dataset(&records, v, &pipeline, args.run.seed, &args.out, exec(&args.run))?;
    print!("{manifest}");
    Ok(())
}

fn is_png(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

pub fn preview(args: &PreviewArgs) -> CliResult<()> {
    let images: Vec<ImageTensor> = if is_png(&args.input) {
        vec![read_png(&args.input)?]
    } else {
        read_cifar(&args.input, variant(args.dataset))?
            .into_iter()
            .take(args.count)
            .map(|r| r.image)
            .collect()
    };
    if images.is_empty() {
        return Err(CliError::usage("preview: no images in input"));
    }
    let names: Vec<&str> = args.augs.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(CliError::usage("preview: --augs is empty"));
    }
    let yona = match composition(&args.pipeline)? {
        Composition::Plain => Composition::Yona(yona_config(&args.pipeline)?),
        other => other,
    };
    create_dir(&args.out)?;
    let mut index = String::new();
    for (i, image) in images.iter().enumerate() {
        let original = format!("{i:03}_original.png");
        write_png(image, args.out.join(&original))?;
        for name in &names {
            let spec = augmentation(name, &args.pipeline)?;
            let plain = Pipeline::new(spec.clone(), Composition::Plain).apply(image, args.run.seed, i as u64)?;
            let composed = Pipeline::new(spec, yona).apply(image, args.run.seed, i as u64)?;
            let (a, y) = (format!("{i:03}_{name}.png"), format!("{i:03}_{name}_yona.png"));
            write_png(&plain, args.out.join(&a))?;
            write_png(&composed, args.out.join(&y))?;
            let _ = writeln!(index, "{i} {name} {original} {a} {y}");
        }
    }
    fs::write(args.out.join("index.txt"), &index)
        .map_err(|e| CliError::io(format!("{}: {e}", args.out.join("index.txt").display())))?;
    println!("wrote {} images to {}", images.len() * (1 + 2 * names.len()), args.out.display());
    Ok(())
}

pub fn stats(args: &StatsArgs) -> CliResult<()> {
    let pipeline = pipeline(&args.pipeline)?;
    let images: Vec<ImageTensor> = match &args.source.input {
        Some(path) => read_cifar(path, variant(args.source.dataset))?.into_iter().map(|r| r.image).collect(),
        None => synthetic_cifar(args.images, variant(args.source.dataset), args.run.seed)
            .into_iter()
            .map(|r| r.image)
            .collect(),
    };
    let report = collect_stats(&images, &pipeline, args.run.seed, args.n, exec(&args.run))?;
    emit(&report.to_string(), args.output.as_deref())?;
    if let Some(tol) = args.gate_coin_tolerance {
        if report.composed == 0 {
            return Err(CliError::gate("no composed samples to check coins against"));
        }
        for (name, f) in [
            ("axis_height_frequency", report.axis_height_frequency),
            ("piece1_masked_frequency", report.piece1_masked_frequency),
        ] {
            if (f - 0.5).abs() > tol {
                return Err(CliError::gate(format!("{name} {f:.4} is more than {tol} from 0.5")));
            }
        }
    }
    Ok(())
}

pub fn bench(args: &BenchArgs) -> CliResult<()> {
    let aug = augmentation(&args.pipeline.aug, &args.pipeline)?;
    let cfg = yona_config(&args.pipeline)?;
    let report = benchmark_throughput(&aug, &cfg, (args.channels, args.height, args.width), args.iterations)?;
    emit(&report.to_string(), args.output.as_deref())?;
    if let Some(max) = args.gate_ratio {
        if report.ratio > max {
            return Err(CliError::gate(format!("ratio {:.3} exceeds {max}", report.ratio)));
        }
    }
    Ok(())
}

fn probe_records(path: Option<&Path>, n: usize, v: CifarVariant, seed: u64) -> CliResult<Vec<CifarRecord>> {
    Ok(match path {
        Some(p) => read_cifar(p, v)?.into_iter().take(n).collect(),
        None => synthetic_cifar(n, v, seed),
    })
}

pub fn probe(args: &ProbeArgs) -> CliResult<()> {
    if args.train_records == 0 || args.test_records == 0 {
        return Err(CliError::usage("probe needs at least one training and one test record"));
    }
    let pipeline = pipeline(&args.pipeline)?;
    let v = variant(args.dataset);
    let seed = args.run.seed;
    let train = probe_records(args.train.as_deref(), args.train_records, v, seed)?;
    let test = probe_records(args.test.as_deref(), args.test_records, v, seed.wrapping_add(1))?;
    let cfg = ProbeConfig {
        epochs: args.epochs,
        learning_rate: args.lr,
        momentum: args.momentum,
        batch_size: args.batch_size,
        seed,
    };
    let run = train_linear_probe(&train, &pipeline, &cfg)?;
    let train_preds = predict_records(&run.model, &train);
    let test_preds = predict_records(&run.model, &test);
    let rms = rms_calibration_error_percent(&test_preds, args.bins)?;

    let mut out = String::new();
    let _ = writeln!(out, "train_records={}", train.len());
    let _ = writeln!(out, "test_records={}", test.len());
    for (i, loss) in run.epoch_losses.iter().enumerate() {
        let _ = writeln!(out, "epoch_{}_loss={loss:.6}", i + 1);
    }
    let _ = writeln!(out, "train_accuracy={:.4}", accuracy(&train_preds));
    let _ = writeln!(out, "test_accuracy={:.4}", accuracy(&test_preds));
    let _ = writeln!(out, "rms_calibration_error_percent={rms:.4}");
    emit(&out, args.output.as_deref())?;

    if args.gate_decreasing && !run.epoch_losses.windows(2).all(|w| w[1] < w[0]) {
        return Err(CliError::gate("epoch loss is not strictly decreasing"));
    }
    if let Some(max) = args.gate_max_rms {
        if rms > max {
            return Err(CliError::gate(format!("rms calibration error {rms:.4}% exceeds {max}%")));
        }
    }
    Ok(())
}

pub fn synth(args: &SynthArgs) -> CliResult<()> {
    let v = variant(args.dataset);
    let records = synthetic_cifar(args.count, v, args.seed);
    write_cifar(&args.out, &records, v)?;
    println!("wrote {} records to {}", records.len(), args.out.display());
    Ok(())
}
