use std::path::Path;
use std::process::{Command, Output};

fn qimage(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qimage")).arg("--out").arg(out).args(args).output().expect("spawn qimage")
}

fn ok(out: &Path, args: &[&str]) -> String {
    let o = qimage(out, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

/// Parses a `# qimage <kind> v1` table into its header and records.
fn read_table(path: &Path, kind: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let (first, body) = text.split_once('\n').unwrap();
    assert_eq!(first, format!("# qimage {kind} v1"));
    let mut lines = body.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn invalid_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["compress", "--bogus"],
        vec!["compress", "--synthetic", "exp:1:0.2:0.2", "--chi", "0"],
        vec!["compress", "--synthetic", "gauss:1:1:1"],
        vec!["compress", "--input", "/nonexistent/qimage"],
        vec!["compress"],
        vec!["bound", "--model", "alg:1:0.3:1"],
        vec!["optimize", "--mps-targets", "2", "--qubits", "4", "--ansatz", "tree"],
        vec!["optimize", "--mps-targets", "2", "--qubits", "4", "--lr=-1"],
        vec!["--jobs", "0", "synth", "--n", "3"],
    ] {
        assert_eq!(qimage(dir.path(), &args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn synth_then_compress_is_monotone_in_chi() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("images");
    ok(
        &images,
        &["--seed", "3", "synth", "--model", "alg:1:1.5:1.5", "--master-log2", "6", "--n", "5", "--count", "2"],
    );
    assert!(images.join("synth-00003.pgm").is_file() && images.join("synth-00004.grid.json").is_file());
    let stdout = ok(
        dir.path(),
        &[
            "compress",
            "--input",
            images.to_str().unwrap(),
            "--n",
            "4",
            "--chi",
            "1,2,4,8,16",
            "--encodings",
            "amplitude,frqi",
        ],
    );
    let path = dir.path().join("compress.csv");
    assert_eq!(stdout.trim(), path.display().to_string());
    let (header, rows) = read_table(&path, "compress");
    assert_eq!(header, ["image_id", "encoding", "indexing", "n", "chi", "infidelity", "two_norm", "max_entropy"]);
    assert_eq!(rows.len(), 2 * 2 * 5);
    let infid = column(&header, &rows, "infidelity");
    for (group, chunk) in infid.chunks(5).enumerate() {
        assert!(chunk.windows(2).all(|w| w[1] <= w[0] + 1e-12), "group {group}: {chunk:?}");
        assert!(chunk[4].abs() < 1e-10, "χ = 16 is exact at 8 qubits: {chunk:?}");
    }
}

#[test]
fn constant_image_compresses_to_a_product_state() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("flat.pgm");
    let mut bytes = b"P5\n8 8\n255\n".to_vec();
    bytes.extend([200u8; 64]);
    std::fs::write(&img, bytes).unwrap();
    ok(
        dir.path(),
        &["compress", "--input", img.to_str().unwrap(), "--n", "3", "--chi", "1", "--encodings", "amplitude,frqi"],
    );
    let (header, rows) = read_table(&dir.path().join("compress.csv"), "compress");
    for x in column(&header, &rows, "infidelity").into_iter().chain(column(&header, &rows, "max_entropy")) {
        assert!(x.abs() < 1e-12, "{x}");
    }
}

#[test]
fn cutoff_bounds_entanglement() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "compress",
            "--synthetic",
            "exp:1:0.1:0.1",
            "--cutoff",
            "1",
            "--master-log2",
            "6",
            "--images",
            "3",
            "--n",
            "5",
            "--chi",
            "3,9",
        ],
    );
    let (header, rows) = read_table(&dir.path().join("compress.csv"), "compress");
    let infid = column(&header, &rows, "infidelity");
    let entropy = column(&header, &rows, "max_entropy");
    for (i, e) in infid.chunks(2).zip(entropy.chunks(2)) {
        assert!(i[0] < 1e-10, "cutoff 1 fits χ = 3: {i:?}");
        assert!(e[0] <= 3f64.ln() + 1e-9);
    }
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "--seed",
        "9",
        "compress",
        "--synthetic",
        "alg:1:1.2:1.2",
        "--master-log2",
        "6",
        "--images",
        "4",
        "--n",
        "4,5",
        "--chi",
        "2,4",
    ];
    ok(a.path(), &args);
    let mut parallel = vec!["--jobs", "3"];
    parallel.extend(args);
    ok(b.path(), &parallel);
    let read = |d: &Path| std::fs::read(d.join("compress.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn bound_dominates_fourier_and_svd_errors() {
    let dir = tempfile::tempdir().unwrap();
    for model in ["exp:1:0.2:0.2", "alg:1:1.2:1.2"] {
        ok(dir.path(), &["bound", "--model", model, "--master-log2", "7", "--n", "4,5", "--lambda-max", "6"]);
        let (header, rows) = read_table(&dir.path().join("bound.csv"), "bound");
        assert_eq!(rows.len(), 7 + 7);
        let bound = column(&header, &rows, "bound");
        let fourier = column(&header, &rows, "fourier_error");
        let svd = column(&header, &rows, "svd_error");
        for k in 0..rows.len() {
            assert!(svd[k] <= fourier[k] + 1e-10 && fourier[k] <= bound[k] + 1e-10, "{model} row {k}");
        }
    }
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--model", "exp:1:0.3:0.3", "--master-log2", "5", "--n", "3"]);
    let pgm = dir.path().join("synth-00000.pgm");
    let state = ok(
        dir.path(),
        &["--format", "json", "encode", "--input", pgm.to_str().unwrap(), "--n", "3", "--encoding", "neqr8"],
    );
    let state = state.trim();
    assert!(state.ends_with("synth-00000.neqr8.row.state.json"), "{state}");
    ok(dir.path(), &["decode", "--state", state, "--encoding", "neqr8"]);
    let decoded = std::fs::read(dir.path().join("synth-00000.neqr8.row.pgm")).unwrap();
    assert_eq!(decoded, std::fs::read(&pgm).unwrap());
}

#[test]
fn spectrum_truncation_writes_mps() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--n", "4", "--master-log2", "5"]);
    let pgm = dir.path().join("synth-00000.pgm");
    let stdout = ok(dir.path(), &["spectrum", "--input", pgm.to_str().unwrap(), "--n", "4", "--lambda", "2"]);
    assert_eq!(stdout.lines().count(), 2);
    let mps: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("synth-00000.lambda2.mps.json")).unwrap()).unwrap();
    assert!(mps["bonds"].as_array().unwrap().iter().all(|b| b.as_u64().unwrap() <= 5));
    let (header, rows) = read_table(&dir.path().join("synth-00000.lambda2.spectrum.csv"), "spectrum");
    assert_eq!((header.len(), rows.len()), (4, 256));
}

#[test]
fn optimize_mps_targets_with_traces() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "optimize",
            "--mps-targets",
            "2",
            "--qubits",
            "4",
            "--images",
            "2",
            "--ansatz",
            "seq1d:1,mera",
            "--steps",
            "300",
            "--traces",
        ],
    );
    let (header, rows) = read_table(&dir.path().join("optimize.csv"), "optimize");
    assert_eq!(rows.len(), 4);
    let initial = column(&header, &rows, "initial_infidelity");
    let best = column(&header, &rows, "best_infidelity");
    assert!(initial.iter().zip(&best).all(|(i, b)| b <= i));
    let traces = std::fs::read_dir(dir.path().join("traces")).unwrap().count();
    let circuits = std::fs::read_dir(dir.path().join("circuits")).unwrap().count();
    assert_eq!((traces, circuits), (4, 4));
}
