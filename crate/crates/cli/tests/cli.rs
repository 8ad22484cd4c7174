use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use ans_core::tans::{qabs_family, SpreadFunction, TIE_TOLERANCE};

fn ans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ans")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sample_text() -> Vec<u8> {
    b"She sells sea shells by the sea shore; the shells she sells are surely seashells.\n".repeat(200)
}

#[test]
fn compress_decompress_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    fs::write(&input, sample_text()).unwrap();
    for variant in ["tans", "rans", "uabs"] {
        let z = dir.path().join(format!("{variant}.ans"));
        let back = dir.path().join(format!("{variant}.out"));
        stdout(&ans(&["compress", path(&input), path(&z), "--variant", variant, "--table-log", "10"]));
        stdout(&ans(&["decompress", path(&z), path(&back)]));
        assert_eq!(fs::read(&back).unwrap(), sample_text(), "{variant}");
        assert_eq!(&fs::read(&z).unwrap()[..4], b"ANS1");
    }
}

#[test]
fn stdin_to_stdout() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ans"))
        .args(["compress", "-", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&sample_text()).unwrap();
    let z = child.wait_with_output().unwrap();
    assert!(z.status.success());
    assert!(z.stdout.len() < sample_text().len() / 2);

    let mut child = Command::new(env!("CARGO_BIN_EXE_ans"))
        .args(["decompress", "-", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&z.stdout).unwrap();
    assert_eq!(child.wait_with_output().unwrap().stdout, sample_text());
}

#[test]
fn keyed_container() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let z = dir.path().join("in.ans");
    let back = dir.path().join("out.txt");
    fs::write(&input, sample_text()).unwrap();
    stdout(&ans(&["compress", path(&input), path(&z), "--key", "00ff10"]));
    stdout(&ans(&["decompress", path(&z), path(&back), "--key", "00ff10"]));
    assert_eq!(fs::read(&back).unwrap(), sample_text());

    let wrong = ans(&["decompress", path(&z), path(&back), "--key", "00ff11"]);
    if wrong.status.success() {
        assert_ne!(fs::read(&back).unwrap(), sample_text());
    } else {
        assert_eq!(wrong.status.code(), Some(2));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk");
    fs::write(&junk, b"definitely not a container").unwrap();
    let out = dir.path().join("out");

    assert_eq!(ans(&["compress"]).status.code(), Some(1));
    assert_eq!(ans(&["analyze", "--uabs", "-p", "3of10", "-l", "9"]).status.code(), Some(1));
    assert_eq!(ans(&["compress", path(&junk), path(&out), "--key", "zz"]).status.code(), Some(1));
    assert_eq!(ans(&["decompress", path(&junk), path(&out)]).status.code(), Some(2));
    assert_eq!(
        ans(&["analyze", "--tans", "--freqs", "10,5,2", "--exhaustive", "--budget", "1000"]).status.code(),
        Some(3)
    );
    assert_eq!(ans(&["--help"]).status.code(), Some(0));

    let z = dir.path().join("z");
    fs::write(&junk, sample_text()).unwrap();
    stdout(&ans(&["compress", path(&junk), path(&z)]));
    assert_eq!(ans(&["decompress", path(&z), path(&out), "--max-output", "100"]).status.code(), Some(2));
}

#[test]
fn analyze_uabs() {
    let text = stdout(&ans(&["analyze", "--uabs", "-p", "3/10", "-l", "9"]));
    assert!(text.contains("0.886582 bits/symbol"), "{text}");
    assert!(text.contains("dH 0.005291"), "{text}");
    // 9 states, 9..=17
    assert!(text.contains("\n  17 "), "{text}");

    let text = stdout(&ans(&["analyze", "--uabs", "-p", "1/3", "-l", "4"]));
    assert!(text.contains("no stream coder"), "{text}");
}

#[test]
fn analyze_tans_exhaustive() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("search.csv");
    let text = stdout(&ans(&["analyze", "--tans", "--freqs", "10,5,2", "--exhaustive", "--csv", path(&csv)]));
    assert!(text.contains("408408 spreads, min dH 0.0012145, 32 optima, precise_init optimal: true"), "{text}");
    let csv = fs::read_to_string(&csv).unwrap();
    assert!(csv.starts_with("l,enumerated,min_delta_h,optima"), "{csv}");
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn analyze_rans_and_random() {
    let text = stdout(&ans(&["analyze", "--rans", "--freqs", "10,5,2", "-l", "17,34"]));
    assert_eq!(text.lines().count(), 2);
    let text = stdout(&ans(&["analyze", "--tans", "--random", "5", "--symbols", "4"]));
    assert!(text.contains("n=4: median dH ratio"), "{text}");
}

#[test]
fn analyze_qabs_matches_library() {
    let text = stdout(&ans(&["analyze", "--qabs", "--states", "8"]));
    let grid: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
    let family = qabs_family(8, &grid).unwrap();
    let envelope = family.envelope_of(&family.majority_zero(), TIE_TOLERANCE);
    let head = text.lines().next().unwrap();
    assert!(head.contains(&format!("{} on the lower envelope", envelope.len())), "{head}");
    assert_eq!(text.lines().count(), 1 + envelope.len());
}

#[test]
fn table_gen_dump() {
    let text = stdout(&ans(&["table-gen", "--freqs", "10,5,2"]));
    assert!(text.starts_with("17 2 3 10 5 2\n"), "{text}");
    let spread = SpreadFunction::parse_dump(&text).unwrap();
    assert_eq!(spread.assignment().len(), 17);

    let keyed = stdout(&ans(&["table-gen", "--freqs", "10,5,2", "--key", "abcd"]));
    assert_eq!(SpreadFunction::parse_dump(&keyed).unwrap().dist(), spread.dist());
    assert_eq!(keyed, stdout(&ans(&["table-gen", "--freqs", "10,5,2", "--key", "abcd"])));

    // requantized to 32 states
    let text = stdout(&ans(&["table-gen", "--freqs", "10,5,2", "-l", "32"]));
    assert!(text.starts_with("32 2 3 "), "{text}");
}

#[test]
fn bench_reports_every_variant() {
    let text = stdout(&ans(&["bench", "--size", "20000"]));
    assert!(text.contains("source entropy 1.500000"), "{text}");
    for v in ["tans", "rans", "uabs"] {
        assert!(text.contains(&format!("{v}:")), "{text}");
    }
}
