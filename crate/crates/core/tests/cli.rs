use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qoc::geometry::read_set;
use qoc::SetKind;

const CARS: &str = "make,year\nToyota,2001\nHonda,2003\nNissan,2010\nToyota,2012\nSubaru,2015\nMitsubishi,2016\nHonda,2020\n";

fn qoc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qoc"))
        .args(args)
        .env_remove("QOC_DATA_DIR")
        .output()
        .expect("qoc runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }
}

fn pack_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pack.4.24.txt")
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&qoc(&["--help"])), 0);
    assert_eq!(code(&qoc(&["train-mnist", "--help"])), 0);
    assert_eq!(code(&qoc(&[])), 1);
    assert_eq!(code(&qoc(&["frobnicate"])), 1);
    assert_eq!(code(&qoc(&["gen-basis", "--dim", "3"])), 1);
    assert_eq!(
        code(&qoc(&[
            "gen-basis",
            "--dim",
            "3",
            "--count",
            "4",
            "--max-dot",
            "1.5"
        ])),
        1
    );
    assert_eq!(code(&qoc(&["geometry-demo", "--mode", "polar"])), 1);
}

#[test]
fn gen_basis_orthonormal_case() {
    let ws = Workspace::new();
    let out = ws.path("b.txt");
    let run = qoc(&[
        "gen-basis",
        "--dim",
        "10",
        "--count",
        "10",
        "--max-dot",
        "1e-6",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let set = read_set(fs::read(&out).unwrap().as_slice()).unwrap();
    assert_eq!((set.dim(), set.len()), (10, 10));
    let report = set.validate(1e-6);
    assert!(report.max_abs_dot_observed <= 1e-6);
    assert!((report.min_angle_degrees - 90.0).abs() < 1e-3);
    assert!(String::from_utf8_lossy(&run.stdout).contains("within_epsilon=true"));
}

#[test]
fn gen_basis_unreachable_targets_exit_3() {
    let ws = Workspace::new();
    let out = ws.path("b.txt");
    let run = qoc(&[
        "gen-basis",
        "--dim",
        "2",
        "--count",
        "5",
        "--max-dot",
        "0.05",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&run), 3);
    assert!(stderr(&run).contains("best achieved"), "{}", stderr(&run));
    assert!(!out.exists());

    // Ten lines in R^3 cannot be closer to orthogonal than about 0.686.
    let run = qoc(&[
        "gen-basis",
        "--dim",
        "3",
        "--count",
        "10",
        "--max-dot",
        "0.47",
    ]);
    assert_eq!(code(&run), 3);
    let best: f64 = stderr(&run)
        .rsplit(' ')
        .next()
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(best >= 0.686, "best {best}");
}

#[test]
fn convert_pack_to_basis_and_back() {
    let ws = Workspace::new();
    let basis = ws.path("basis.txt");
    let code_file = ws.path("code.txt");
    let again = ws.path("again.txt");
    let pack = pack_path();
    let run = qoc(&[
        "convert",
        "--in",
        path_str(&pack),
        "--dim",
        "4",
        "--count",
        "24",
        "--to",
        "basis",
        "--out",
        path_str(&basis),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let set = read_set(fs::read(&basis).unwrap().as_slice()).unwrap();
    assert_eq!(set.len(), 12);
    assert_eq!(set.kind(), SetKind::QuasiorthonormalBasis);
    assert!(set.max_abs_dot() <= 0.5 + 1e-9);

    assert_eq!(
        code(&qoc(&[
            "convert",
            "--in",
            path_str(&basis),
            "--to",
            "code",
            "--out",
            path_str(&code_file)
        ])),
        0
    );
    let code_set = read_set(fs::read(&code_file).unwrap().as_slice()).unwrap();
    assert_eq!(
        (code_set.len(), code_set.kind()),
        (24, SetKind::SphericalCode)
    );
    assert_eq!(
        code(&qoc(&[
            "convert",
            "--in",
            path_str(&code_file),
            "--to",
            "basis",
            "--out",
            path_str(&again)
        ])),
        0
    );
    assert_eq!(fs::read(&basis).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn convert_data_errors_exit_2() {
    let ws = Workspace::new();
    let empty = ws.write("empty.txt", "");
    assert_eq!(
        code(&qoc(&[
            "convert",
            "--in",
            path_str(&empty),
            "--dim",
            "4",
            "--count",
            "24",
            "--to",
            "basis"
        ])),
        2
    );
    let bad = ws.write("bad.txt", "1 0 0\n0 2 0\n");
    assert_eq!(
        code(&qoc(&[
            "convert",
            "--in",
            path_str(&bad),
            "--dim",
            "3",
            "--count",
            "2",
            "--to",
            "basis"
        ])),
        2
    );
    let missing = ws.path("missing.txt");
    assert_eq!(
        code(&qoc(&[
            "convert",
            "--in",
            path_str(&missing),
            "--dim",
            "3",
            "--count",
            "2",
            "--to",
            "basis"
        ])),
        2
    );
    // a pack without its shape is a usage error
    let pack = pack_path();
    assert_eq!(
        code(&qoc(&["convert", "--in", path_str(&pack), "--to", "basis"])),
        1
    );
}

#[test]
fn onehot_encoding_of_the_car_column() {
    let ws = Workspace::new();
    let csv = ws.write("cars.csv", CARS);
    let enc = ws.path("enc.csv");
    let run = qoc(&[
        "encode",
        "--csv",
        path_str(&csv),
        "--column",
        "make",
        "--scheme",
        "onehot",
        "--out",
        path_str(&enc),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let text = fs::read_to_string(&enc).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "make_0,make_1,make_2,make_3,make_4");
    assert_eq!(lines.next().unwrap(), "1,0,0,0,0");
    assert_eq!(lines.next().unwrap(), "0,1,0,0,0");
    assert_eq!(lines.count(), 5);
    assert!(ws.path("enc.csv.dict").exists());
}

fn round_trip(ws: &Workspace, scheme_args: &[&str]) {
    let csv = ws.write("cars.csv", CARS);
    let enc = ws.path("enc.csv");
    let dict = ws.path("enc.dict");
    let dec = ws.path("dec.csv");
    let mut args = vec![
        "encode",
        "--csv",
        path_str(&csv),
        "--column",
        "make",
        "--out",
        path_str(&enc),
        "--dict-out",
        path_str(&dict),
    ];
    args.extend_from_slice(scheme_args);
    let run = qoc(&args);
    assert_eq!(code(&run), 0, "{scheme_args:?}: {}", stderr(&run));
    let mut args = vec![
        "decode",
        "--csv",
        path_str(&enc),
        "--dict",
        path_str(&dict),
        "--out",
        path_str(&dec),
    ];
    args.extend_from_slice(scheme_args);
    let run = qoc(&args);
    assert_eq!(code(&run), 0, "{scheme_args:?}: {}", stderr(&run));
    let original: Vec<&str> = CARS.lines().map(|l| l.split(',').next().unwrap()).collect();
    let decoded = fs::read_to_string(&dec).unwrap();
    assert_eq!(
        decoded.lines().collect::<Vec<_>>(),
        original,
        "{scheme_args:?}"
    );
}

#[test]
fn encode_decode_round_trips_for_every_scheme() {
    let ws = Workspace::new();
    let basis = ws.path("basis.txt");
    let code_file = ws.path("code.txt");
    let pack = pack_path();
    assert_eq!(
        code(&qoc(&[
            "convert",
            "--in",
            path_str(&pack),
            "--dim",
            "4",
            "--count",
            "24",
            "--to",
            "basis",
            "--out",
            path_str(&basis)
        ])),
        0
    );
    assert_eq!(
        code(&qoc(&[
            "convert",
            "--in",
            path_str(&pack),
            "--dim",
            "4",
            "--count",
            "24",
            "--to",
            "code",
            "--out",
            path_str(&code_file)
        ])),
        0
    );
    round_trip(&ws, &["--scheme", "ordinal"]);
    round_trip(&ws, &["--scheme", "ordinal", "--offset", "0"]);
    round_trip(&ws, &["--scheme", "onehot"]);
    round_trip(&ws, &["--scheme", "binary"]);
    round_trip(&ws, &["--scheme", "basen", "--base", "3", "--balanced"]);
    round_trip(&ws, &["--scheme", "basen", "--base", "4"]);
    round_trip(&ws, &["--scheme", "hash", "--bits", "12"]);
    round_trip(&ws, &["--scheme", "qoe", "--basis-file", path_str(&basis)]);
    round_trip(
        &ws,
        &[
            "--scheme",
            "spherical",
            "--basis-file",
            path_str(&code_file),
        ],
    );
}

#[test]
fn encode_errors() {
    let ws = Workspace::new();
    let csv = ws.write("cars.csv", CARS);
    let out = ws.path("o.csv");
    let base = ["encode", "--csv", path_str(&csv), "--out", path_str(&out)];
    let run = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        code(&qoc(&a))
    };
    assert_eq!(run(&["--column", "make", "--scheme", "nope"]), 1);
    assert_eq!(run(&["--column", "make", "--scheme", "qoe"]), 1);
    assert_eq!(run(&["--column", "model", "--scheme", "onehot"]), 2);
    assert_eq!(
        run(&[
            "--column",
            "make",
            "--scheme",
            "basen",
            "--base",
            "4",
            "--balanced"
        ]),
        2
    );
    // a code file is not a basis
    let code_file = ws.path("code.txt");
    let pack = pack_path();
    assert_eq!(
        code(&qoc(&[
            "convert",
            "--in",
            path_str(&pack),
            "--dim",
            "4",
            "--count",
            "24",
            "--to",
            "code",
            "--out",
            path_str(&code_file)
        ])),
        0
    );
    assert_eq!(
        run(&[
            "--column",
            "make",
            "--scheme",
            "qoe",
            "--basis-file",
            path_str(&code_file)
        ]),
        2
    );
}

#[test]
fn decode_rejects_unresolvable_rows() {
    let ws = Workspace::new();
    let csv = ws.write("cars.csv", CARS);
    let enc = ws.path("enc.csv");
    let dict = ws.path("enc.dict");
    let run = qoc(&[
        "encode",
        "--csv",
        path_str(&csv),
        "--column",
        "make",
        "--scheme",
        "binary",
        "--out",
        path_str(&enc),
        "--dict-out",
        path_str(&dict),
    ]);
    assert_eq!(code(&run), 0);
    // 5 labels encode as ordinal+1 in 1..=5; (1,1,0) is 6, which no label owns
    let noisy = ws.write("noisy.csv", "make_0,make_1,make_2\n0.7,0.7,0\n");
    let run = qoc(&[
        "decode",
        "--csv",
        path_str(&noisy),
        "--dict",
        path_str(&dict),
        "--scheme",
        "binary",
    ]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("row 0"), "{}", stderr(&run));
}

#[test]
fn geometry_demo_output() {
    let ws = Workspace::new();
    let out = ws.path("pts.csv");
    let run = qoc(&[
        "geometry-demo",
        "--mode",
        "antipodal",
        "--samples",
        "0",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&run), 0);
    assert_eq!(fs::read_to_string(&out).unwrap(), "x,y,out_x,out_y\n");

    for mode in ["ortho", "quasi", "antipodal"] {
        let a = qoc(&[
            "geometry-demo",
            "--mode",
            mode,
            "--samples",
            "200",
            "--seed",
            "9",
        ]);
        let b = qoc(&[
            "geometry-demo",
            "--mode",
            mode,
            "--samples",
            "200",
            "--seed",
            "9",
        ]);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
        let text = String::from_utf8(a.stdout).unwrap();
        let rows: Vec<Vec<f64>> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 200);
        for r in rows {
            assert!(r[0].hypot(r[1]) <= 6.0);
            assert!(r[2].hypot(r[3]) <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn train_mnist_without_data_exits_2() {
    let ws = Workspace::new();
    let run = qoc(&[
        "train-mnist",
        "--data-dir",
        path_str(&ws.path("nowhere")),
        "--epochs",
        "1",
    ]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("nowhere"), "{}", stderr(&run));
    assert_eq!(
        code(&qoc(&["train-mnist", "--scheme", "qoe", "--dim", "5"])),
        1
    );
    assert_eq!(code(&qoc(&["train-mnist", "--epochs", "0"])), 1);
}
