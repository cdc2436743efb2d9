//! Subcommand implementations. Sweeps run item-parallel and sort rows by key
//! before writing, so output does not depend on scheduling.

use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use qimage::circuit::{ansatz_mera, ansatz_seq1d, ansatz_seq2d, param_count, Circuit, Layout2D};
use qimage::encode::{decode_image, encode_state, EncodingKind, EncodingSpec, Indexing};
use qimage::imageio::load_grid;
use qimage::spectral::{
    alias_fold, dft2, discarded_weight_bound, idft2, spectrum_to_mps, truncate_spectrum, MasterSpectrum, TruncationSpec,
};
use qimage::synthetic::{random_left_canonical_mps, SyntheticSpec};
use qimage::tensnet::{entanglement_profile, mps_from_state, two_norm_distance, StateVector};
use qimage::varopt::{circuit_fidelity, optimize as run_optimizer, OptimizerConfig, Retraction};

use crate::corpus::{self, model_name, parse_model, CorpusArgs, Item};
use crate::output::{write_csv, write_json, write_table};
use crate::{CliError, CliResult, Common, Format, Outcome};

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "image".into())
}

fn encoding(kind: EncodingKind, indexing: Indexing) -> CliResult<EncodingSpec> {
    Ok(EncodingSpec::new(kind, indexing)?)
}

fn report_failure(what: &str, err: impl std::fmt::Display) {
    eprintln!("qimage: {what}: {err}");
}

#[derive(Serialize)]
struct AmplitudeRow {
    index: usize,
    re: f64,
    im: f64,
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// PNG or PGM image.
    #[arg(long)]
    pub input: PathBuf,
    /// Grid resolution exponent; the image is cropped and resampled to `2^n`.
    #[arg(long)]
    pub n: usize,
    /// `amplitude`, `frqi`, or `neqrQ`.
    #[arg(long, default_value = "amplitude")]
    pub encoding: EncodingKind,
    /// `row`, `hierarchical`, or `snake`.
    #[arg(long, default_value = "row")]
    pub indexing: Indexing,
}

pub fn encode(common: &Common, args: &EncodeArgs) -> CliResult<Outcome> {
    let grid = load_grid(&args.input, args.n)?;
    let state = encode_state(&grid, encoding(args.encoding, args.indexing)?)?;
    let name = format!("{}.{}.{}.state", stem(&args.input), args.encoding, args.indexing);
    match common.format {
        Format::Json => {
            let path = common.out.join(format!("{name}.json"));
            write_json(&path, &state)?;
            println!("{}", path.display());
        }
        Format::Csv => {
            let rows: Vec<AmplitudeRow> =
                state.amps().iter().enumerate().map(|(index, a)| AmplitudeRow { index, re: a.re, im: a.im }).collect();
            let path = common.out.join(format!("{name}.csv"));
            write_csv(&path, "state", &rows)?;
            println!("{}", path.display());
        }
    }
    Ok(Outcome { failures: 0 })
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// State vector JSON.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value = "amplitude")]
    pub encoding: EncodingKind,
    #[arg(long, default_value = "row")]
    pub indexing: Indexing,
}

pub fn decode(common: &Common, args: &DecodeArgs) -> CliResult<Outcome> {
    let state: StateVector = serde_json::from_slice(&std::fs::read(&args.state)?)?;
    let spec = encoding(args.encoding, args.indexing)?;
    let address = state.num_qubits().checked_sub(spec.color_qubits()).filter(|a| a % 2 == 0 && *a > 0);
    let n = address.ok_or_else(|| {
        CliError::Usage(format!("{} qubits do not fit a square {} grid", state.num_qubits(), args.encoding))
    })? / 2;
    let grid = decode_image(&state, spec, n)?;
    let name = stem(&args.state).trim_end_matches(".state").to_string();
    let pgm = common.out.join(format!("{name}.pgm"));
    std::fs::write(&pgm, grid.to_pgm())?;
    let json = common.out.join(format!("{name}.grid.json"));
    write_json(&json, &grid)?;
    println!("{}\n{}", pgm.display(), json.display());
    Ok(Outcome { failures: 0 })
}

#[derive(Args, Debug)]
pub struct CompressArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, value_delimiter = ',', default_value = "amplitude")]
    pub encodings: Vec<EncodingKind>,
    #[arg(long, value_delimiter = ',', default_value = "row")]
    pub indexings: Vec<Indexing>,
    /// Resolution exponents.
    #[arg(long, value_delimiter = ',', default_value = "6")]
    pub n: Vec<usize>,
    /// Maximum bond dimensions.
    #[arg(long, value_delimiter = ',', default_value = "16")]
    pub chi: Vec<usize>,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct CompressRow {
    pub image_id: String,
    pub encoding: String,
    pub indexing: String,
    pub n: usize,
    pub chi: usize,
    pub infidelity: f64,
    pub two_norm: f64,
    pub max_entropy: f64,
}

fn compress_item(
    item: &Item,
    kind: EncodingKind,
    indexing: Indexing,
    n: usize,
    chis: &[usize],
) -> qimage::Result<Vec<CompressRow>> {
    let state = encode_state(&item.grid(n)?, EncodingSpec::new(kind, indexing)?)?;
    let max_entropy = entanglement_profile(&state).max;
    chis.iter()
        .map(|&chi| {
            let (_, report) = mps_from_state(&state, chi)?;
            Ok(CompressRow {
                image_id: item.id.clone(),
                encoding: kind.to_string(),
                indexing: indexing.to_string(),
                n,
                chi,
                infidelity: report.infidelity,
                two_norm: report.two_norm_distance,
                max_entropy,
            })
        })
        .collect()
}

pub fn compress(common: &Common, args: &CompressArgs) -> CliResult<Outcome> {
    if args.chi.contains(&0) || args.n.contains(&0) {
        return Err(CliError::Usage("χ and n must be positive".into()));
    }
    for &kind in &args.encodings {
        encoding(kind, Indexing::RowMajor)?;
    }
    let items = corpus::load(&args.corpus, common.seed)?;
    let jobs: Vec<(&Item, EncodingKind, Indexing, usize)> = items
        .iter()
        .flat_map(|it| args.encodings.iter().flat_map(move |&k| args.indexings.iter().map(move |&i| (it, k, i))))
        .flat_map(|(it, k, i)| args.n.iter().map(move |&n| (it, k, i, n)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(item, kind, indexing, n)| {
            compress_item(item, kind, indexing, n, &args.chi)
                .map_err(|e| report_failure(&format!("{} {kind} {indexing} n={n}", item.id), e))
        })
        .collect();
    let failures = results.iter().filter(|r| r.is_err()).count();
    let mut rows: Vec<CompressRow> = results.into_iter().flatten().flatten().collect();
    rows.sort_by(|a, b| {
        (&a.image_id, &a.encoding, &a.indexing, a.n, a.chi).cmp(&(&b.image_id, &b.encoding, &b.indexing, b.n, b.chi))
    });
    write_table(common, "compress", &rows)?;
    Ok(Outcome { failures })
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Keep only `|p|, |q| ≤ Λ` and also write the resulting MPS.
    #[arg(long)]
    pub lambda: Option<usize>,
}

#[derive(Serialize)]
struct CoefficientRow {
    p: i64,
    q: i64,
    re: f64,
    im: f64,
}

pub fn spectrum(common: &Common, args: &SpectrumArgs) -> CliResult<Outcome> {
    let grid = load_grid(&args.input, args.n)?;
    let mut spec = dft2(&grid);
    let name = stem(&args.input);
    if let Some(lambda) = args.lambda {
        let (truncated, discarded) = truncate_spectrum(&spec, TruncationSpec::new(lambda, args.n)?)?;
        spec = truncated;
        let mps = spectrum_to_mps(&spec)?;
        let path = common.out.join(format!("{name}.lambda{lambda}.mps.json"));
        write_json(&path, &mps)?;
        println!("{}", path.display());
        eprintln!("discarded weight {discarded:.6e}");
    }
    let suffix = args.lambda.map(|l| format!(".lambda{l}")).unwrap_or_default();
    let base = format!("{name}{suffix}.spectrum");
    let path = match common.format {
        Format::Json => {
            let path = common.out.join(format!("{base}.json"));
            write_json(&path, &spec)?;
            path
        }
        Format::Csv => {
            let mut rows: Vec<CoefficientRow> =
                spec.iter().map(|(p, q, c)| CoefficientRow { p, q, re: c.re, im: c.im }).collect();
            rows.sort_by_key(|r| (r.q, r.p));
            let path = common.out.join(format!("{base}.csv"));
            write_csv(&path, "spectrum", &rows)?;
            path
        }
    };
    println!("{}", path.display());
    Ok(Outcome { failures: 0 })
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Decay model `exp:C:ALPHA:BETA` or `alg:C:ALPHA:BETA`.
    #[arg(long, default_value = "exp:1:0.2:0.2")]
    pub model: String,
    #[arg(long, default_value_t = 9)]
    pub master_log2: usize,
    #[arg(long, value_delimiter = ',', default_value = "5,6,7,8")]
    pub n: Vec<usize>,
    /// Largest cutoff; each n is limited to `Λ < 2^{n−1}`.
    #[arg(long, default_value_t = 31)]
    pub lambda_max: usize,
    /// Use positive (saturating) coefficients instead of random phases.
    #[arg(long)]
    pub positive: bool,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub model: String,
    #[serde(rename = "C")]
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub lambda: usize,
    pub chi: usize,
    pub bound: f64,
    pub fourier_error: f64,
    pub svd_error: f64,
}

pub fn bound(common: &Common, args: &BoundArgs) -> CliResult<Outcome> {
    let model = parse_model(&args.model)?;
    if let Some(&n) = args.n.iter().find(|&&n| n == 0 || 2usize << n > 1usize << args.master_log2.min(20)) {
        return Err(CliError::Usage(format!("n={n} needs a master side of at least 2^{}", n + 1)));
    }
    let phases = (!args.positive).then_some(common.seed);
    let master = MasterSpectrum::from_model(&model, 1 << args.master_log2, None, phases)?;
    let cells: Vec<(usize, usize)> =
        args.n.iter().flat_map(|&n| (0..=args.lambda_max.min((1 << (n - 1)) - 1)).map(move |l| (n, l))).collect();
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(n, lambda)| -> qimage::Result<BoundRow> {
            let spec = alias_fold(&master, n)?;
            let f = idft2(&spec).to_state()?;
            let t = TruncationSpec::new(lambda, n)?;
            let (g, _) = truncate_spectrum(&spec, t)?;
            let fourier_error = two_norm_distance(&f, &idft2(&g).to_state()?)?;
            let weight = discarded_weight_bound(&model, n, lambda)?;
            let bound = 2.0 * weight.sqrt() / g.frobenius_norm();
            let svd_error = mps_from_state(&f, t.chi())?.1.two_norm_distance;
            Ok(BoundRow {
                model: model_name(model.kind).into(),
                c: model.c,
                alpha: model.alpha,
                beta: model.beta,
                n,
                lambda,
                chi: t.chi(),
                bound,
                fourier_error,
                svd_error,
            })
        })
        .collect();
    let mut failures = 0;
    let mut rows = Vec::new();
    for (r, (n, lambda)) in results.into_iter().zip(cells) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                failures += 1;
                report_failure(&format!("n={n} Λ={lambda}"), e);
            }
        }
    }
    rows.sort_by_key(|r| (r.n, r.lambda));
    write_table(common, "bound", &rows)?;
    Ok(Outcome { failures })
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value = "alg:1:1.2:1.2")]
    pub model: String,
    #[arg(long, default_value_t = 9)]
    pub master_log2: usize,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub n: usize,
    /// Number of images; image `i` uses seed `--seed + i`.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

#[derive(Serialize)]
struct SynthRow {
    image_id: String,
    seed: u64,
    n: usize,
    pgm: String,
    json: String,
}

pub fn synth(common: &Common, args: &SynthArgs) -> CliResult<Outcome> {
    let spec = SyntheticSpec { model: parse_model(&args.model)?, master_log2: args.master_log2, cutoff: args.cutoff };
    let mut rows = Vec::new();
    for i in 0..args.count as u64 {
        let seed = common.seed + i;
        let grid = spec.image(seed, args.n)?;
        let id = format!("synth-{seed:05}");
        let pgm = common.out.join(format!("{id}.pgm"));
        std::fs::write(&pgm, grid.to_pgm())?;
        let json = common.out.join(format!("{id}.grid.json"));
        write_json(&json, &grid)?;
        rows.push(SynthRow {
            image_id: id,
            seed,
            n: args.n,
            pgm: pgm.display().to_string(),
            json: json.display().to_string(),
        });
    }
    write_table(common, "synth", &rows)?;
    Ok(Outcome { failures: 0 })
}

/// Ansatz family requested on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AnsatzChoice {
    Seq1d(usize),
    Seq2d(usize),
    Mera,
}

impl std::str::FromStr for AnsatzChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (name, layers) = s.split_once(':').unwrap_or((s, "1"));
        let layers: usize = layers.parse().map_err(|_| format!("bad layer count in '{s}'"))?;
        if layers == 0 {
            return Err(format!("'{s}' needs at least one layer"));
        }
        match name {
            "seq1d" => Ok(AnsatzChoice::Seq1d(layers)),
            "seq2d" => Ok(AnsatzChoice::Seq2d(layers)),
            "mera" => Ok(AnsatzChoice::Mera),
            _ => Err(format!("unknown ansatz '{s}' (seq1d:L, seq2d:L, mera)")),
        }
    }
}

impl std::fmt::Display for AnsatzChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnsatzChoice::Seq1d(l) => write!(f, "seq1d:{l}"),
            AnsatzChoice::Seq2d(l) => write!(f, "seq2d:{l}"),
            AnsatzChoice::Mera => write!(f, "mera"),
        }
    }
}

/// `ROWSxCOLS` with optional removed sites, e.g. `3x4:0.0;2.3`.
pub fn parse_layout(s: &str) -> CliResult<Layout2D> {
    let usage = || CliError::Usage(format!("layout '{s}' is not ROWSxCOLS[:R.C;...]"));
    let (dims, removed) = s.split_once(':').unwrap_or((s, ""));
    let (r, c) = dims.split_once('x').ok_or_else(usage)?;
    let (rows, cols) = (r.parse().map_err(|_| usage())?, c.parse().map_err(|_| usage())?);
    let removed = removed
        .split(';')
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (a, b) = p.split_once('.').ok_or_else(usage)?;
            Ok((a.parse().map_err(|_| usage())?, b.parse().map_err(|_| usage())?))
        })
        .collect::<CliResult<Vec<(usize, usize)>>>()?;
    Ok(Layout2D::new(rows, cols, removed)?)
}

/// Near-square lattice holding `m` sites, with surplus sites removed from
/// the end of the last row.
pub fn auto_layout(m: usize) -> qimage::Result<Layout2D> {
    let rows = ((m as f64).sqrt().floor() as usize).max(1);
    let cols = m.div_ceil(rows);
    Layout2D::new(rows, cols, (m..rows * cols).map(|i| (rows - 1, i - (rows - 1) * cols)))
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Use random left-canonical MPS of this bond dimension as targets
    /// instead of encoded images.
    #[arg(long, conflicts_with_all = ["input", "synthetic"], requires = "qubits")]
    pub mps_targets: Option<usize>,
    /// Qubit count of MPS targets.
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long, default_value = "frqi")]
    pub encoding: EncodingKind,
    #[arg(long, default_value = "row")]
    pub indexing: Indexing,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Ansätze, e.g. `seq1d:1,seq2d:2,mera`.
    #[arg(long, value_delimiter = ',', default_value = "seq1d:1")]
    pub ansatz: Vec<AnsatzChoice>,
    /// Lattice for `seq2d`; defaults to a near-square layout.
    #[arg(long)]
    pub layout: Option<String>,
    /// Initialization seeds per (target, ansatz), starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    pub restarts: u64,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long, default_value_t = 5e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.9)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.999)]
    pub beta2: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub eps: f64,
    #[arg(long, default_value_t = 200)]
    pub patience: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// `qr` or `polar`.
    #[arg(long, default_value = "qr")]
    pub retraction: Retraction,
    /// Also write per-run traces and best circuits.
    #[arg(long)]
    pub traces: bool,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct OptimizeRow {
    pub target_id: String,
    pub ansatz: String,
    pub params: u64,
    pub seed: u64,
    pub initial_infidelity: f64,
    pub best_infidelity: f64,
    pub steps: usize,
}

#[derive(Serialize)]
struct TraceRow {
    step: usize,
    infidelity: f64,
    best_infidelity: f64,
}

struct Target {
    id: String,
    state: StateVector,
}

fn build_ansatz(choice: AnsatzChoice, m: usize, layout: Option<&Layout2D>, seed: u64) -> qimage::Result<Circuit> {
    match choice {
        AnsatzChoice::Seq1d(l) => ansatz_seq1d(m, l, seed),
        AnsatzChoice::Seq2d(l) => match layout {
            Some(layout) => ansatz_seq2d(layout, l, seed),
            None => ansatz_seq2d(&auto_layout(m)?, l, seed),
        },
        AnsatzChoice::Mera => ansatz_mera(m, seed),
    }
}

fn targets(common: &Common, args: &OptimizeArgs) -> CliResult<Vec<Target>> {
    if let Some(chi) = args.mps_targets {
        let m = args.qubits.unwrap_or(0);
        return (0..args.corpus.images as u64)
            .map(|i| {
                let seed = common.seed + i;
                let mps = random_left_canonical_mps(m, chi, seed)?;
                Ok(Target { id: format!("mps{chi}-{seed:05}"), state: mps.to_state()? })
            })
            .collect();
    }
    let spec = encoding(args.encoding, args.indexing)?;
    corpus::load(&args.corpus, common.seed)?
        .into_iter()
        .map(|item| Ok(Target { id: item.id.clone(), state: encode_state(&item.grid(args.n)?, spec)? }))
        .collect()
}

pub fn optimize(common: &Common, args: &OptimizeArgs) -> CliResult<Outcome> {
    let config = OptimizerConfig {
        steps: args.steps,
        lr: args.lr,
        beta1: args.beta1,
        beta2: args.beta2,
        eps: args.eps,
        seed: common.seed,
        tol: args.tol,
        patience: args.patience,
        retraction: args.retraction,
    };
    config.validate()?;
    let layout = args.layout.as_deref().map(parse_layout).transpose()?;
    let targets = targets(common, args)?;
    if args.traces {
        std::fs::create_dir_all(common.out.join("traces"))?;
        std::fs::create_dir_all(common.out.join("circuits"))?;
    }
    let runs: Vec<(&Target, AnsatzChoice, u64)> = targets
        .iter()
        .flat_map(|t| args.ansatz.iter().map(move |&a| (t, a)))
        .flat_map(|(t, a)| (0..args.restarts).map(move |r| (t, a, common.seed + r)))
        .collect();
    let results: Vec<_> = runs
        .par_iter()
        .map(|&(target, choice, seed)| -> CliResult<OptimizeRow> {
            let m = target.state.num_qubits();
            let circuit = build_ansatz(choice, m, layout.as_ref(), seed)?;
            let initial = 1.0 - circuit_fidelity(&circuit, &target.state)?;
            let (best, trace) = run_optimizer(&circuit, &target.state, &OptimizerConfig { seed, ..config.clone() })?;
            if args.traces {
                let key = format!("{}.{}.{seed}", target.id, choice.to_string().replace(':', "-"));
                let rows: Vec<TraceRow> = trace
                    .infidelity
                    .iter()
                    .zip(&trace.best_infidelity)
                    .enumerate()
                    .map(|(step, (&infidelity, &best_infidelity))| TraceRow { step, infidelity, best_infidelity })
                    .collect();
                write_csv(&common.out.join("traces").join(format!("{key}.csv")), "trace", &rows)?;
                write_json(&common.out.join("circuits").join(format!("{key}.json")), &best)?;
            }
            Ok(OptimizeRow {
                target_id: target.id.clone(),
                ansatz: choice.to_string(),
                params: param_count(&best),
                seed,
                initial_infidelity: initial,
                best_infidelity: trace.best,
                steps: trace.infidelity.len(),
            })
        })
        .collect();
    let mut failures = 0;
    let mut rows = Vec::new();
    for (r, (target, choice, seed)) in results.into_iter().zip(&runs) {
        match r {
            Ok(row) => rows.push(row),
            Err(CliError::Usage(e)) => return Err(CliError::Usage(format!("{choice}: {e}"))),
            Err(CliError::Runtime(e)) => {
                failures += 1;
                report_failure(&format!("{} {choice} seed {seed}", target.id), e);
            }
        }
    }
    rows.sort_by(|a, b| (&a.target_id, &a.ansatz, a.seed).cmp(&(&b.target_id, &b.ansatz, b.seed)));
    write_table(common, "optimize", &rows)?;
    Ok(Outcome { failures })
}
