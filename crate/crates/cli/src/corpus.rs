//! Input sets: image files on disk or seeded synthetic decay-model images.

use std::path::{Path, PathBuf};

use clap::Args;
use qimage::imageio::{load_grid, ImageGrid};
use qimage::spectral::{DecayKind, DecayModel};
use qimage::synthetic::SyntheticSpec;

use crate::{CliError, CliResult};

#[derive(Args, Debug, Clone)]
pub struct CorpusArgs {
    /// Image file, or directory of `.png`/`.pgm` files.
    #[arg(long, conflicts_with = "synthetic")]
    pub input: Option<PathBuf>,
    /// Synthetic decay model `exp:C:ALPHA:BETA` or `alg:C:ALPHA:BETA`.
    #[arg(long)]
    pub synthetic: Option<String>,
    /// Synthetic master spectrum side is `2^master_log2`.
    #[arg(long, default_value_t = 9)]
    pub master_log2: usize,
    /// Hard frequency cutoff for synthetic masters.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Number of synthetic images; image `i` uses seed `--seed + i`.
    #[arg(long, default_value_t = 20)]
    pub images: usize,
}

pub fn parse_model(s: &str) -> CliResult<DecayModel> {
    let parts: Vec<&str> = s.split(':').collect();
    let usage = || CliError::Usage(format!("model '{s}' is not KIND:C:ALPHA:BETA"));
    if parts.len() != 4 {
        return Err(usage());
    }
    let kind = match parts[0] {
        "exp" | "exponential" => DecayKind::Exponential,
        "alg" | "algebraic" => DecayKind::Algebraic,
        _ => return Err(usage()),
    };
    let nums: Vec<f64> = parts[1..].iter().map(|p| p.parse::<f64>()).collect::<Result<_, _>>().map_err(|_| usage())?;
    Ok(DecayModel::new(kind, nums[0], nums[1], nums[2])?)
}

pub fn model_name(kind: DecayKind) -> &'static str {
    match kind {
        DecayKind::Exponential => "exp",
        DecayKind::Algebraic => "alg",
    }
}

#[derive(Clone, Debug)]
enum Source {
    File(PathBuf),
    Synthetic(SyntheticSpec, u64),
}

/// One input image, loadable at any resolution.
#[derive(Clone, Debug)]
pub struct Item {
    pub id: String,
    source: Source,
}

impl Item {
    pub fn grid(&self, n: usize) -> qimage::Result<ImageGrid> {
        match &self.source {
            Source::File(path) => load_grid(path, n),
            Source::Synthetic(spec, seed) => spec.image(*seed, n),
        }
    }
}

fn is_image(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "pgm"))
}

fn file_item(path: PathBuf) -> Item {
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Item { id, source: Source::File(path) }
}

/// Items sorted by id.
pub fn load(args: &CorpusArgs, seed: u64) -> CliResult<Vec<Item>> {
    let mut items = match (&args.input, &args.synthetic) {
        (Some(path), None) if path.is_dir() => {
            let mut files: Vec<PathBuf> =
                std::fs::read_dir(path)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
            files.retain(|p| is_image(p));
            files.into_iter().map(file_item).collect::<Vec<_>>()
        }
        (Some(path), None) if path.is_file() => vec![file_item(path.clone())],
        (Some(path), None) => return Err(CliError::Usage(format!("{} does not exist", path.display()))),
        (None, Some(model)) => {
            let spec = SyntheticSpec { model: parse_model(model)?, master_log2: args.master_log2, cutoff: args.cutoff };
            spec.master(seed)?;
            (0..args.images as u64)
                .map(|i| Item { id: format!("synth-{:05}", seed + i), source: Source::Synthetic(spec, seed + i) })
                .collect()
        }
        _ => return Err(CliError::Usage("give exactly one of --input or --synthetic".into())),
    };
    if items.is_empty() {
        return Err(CliError::Usage("the input set is empty".into()));
    }
    items.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(items)
}
