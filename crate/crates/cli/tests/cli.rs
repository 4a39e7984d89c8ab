use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use myte::inventory::MultilingualInventory;
use myte::morphology::{write_scores, MorphemeScore};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unicode_normalization::UnicodeNormalization;

fn myte(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_myte"))
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scores_file(dir: &Path, name: &str, lang: &str, scores: &[(&str, f64)]) {
    let scores: Vec<MorphemeScore> = scores
        .iter()
        .map(|(m, s)| MorphemeScore { morpheme: m.as_bytes().to_vec(), score: *s })
        .collect();
    fs::write(dir.join(format!("{name}.scores")), write_scores(lang, &scores)).unwrap();
}

fn table(dir: &Path, name: &str) -> MultilingualInventory {
    MultilingualInventory::parse_table(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn empty_corpus_fails() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.txt"), "").unwrap();
    let o = myte(dir.path(), &["train", "empty.txt", "-o", "x.model"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("EmptyCorpus"));
}

#[test]
fn invalid_flags_fail() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.txt"), "a b c").unwrap();
    let o = myte(dir.path(), &["train", "c.txt", "-o", "x.model", "--alpha-tol", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = myte(dir.path(), &["train", "c.txt", "-o", "x.model", "--target-morphemes", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn train_writes_model_and_scores() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::new();
    for stem in ["walk", "talk", "jump", "play", "call", "look", "work", "help", "kick", "pull"] {
        for suffix in ["", "s", "ed", "ing", "er", "ers"] {
            text.push_str(&format!("{stem}{suffix} "));
        }
        text.push('\n');
    }
    fs::write(dir.path().join("corpus.txt"), text).unwrap();
    let o = myte(
        dir.path(),
        &[
            "train",
            "corpus.txt",
            "-o",
            "en.model",
            "--target-morphemes",
            "30",
            "--alpha-tol",
            "0.1",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    let count: usize =
        out.lines().find_map(|l| l.strip_prefix("morphemes ")).unwrap().parse().unwrap();
    assert!((27..=33).contains(&count), "{out}");
    assert!(out.contains("alpha ") && out.contains("loss "));
    assert!(fs::read_to_string(dir.path().join("en.model"))
        .unwrap()
        .starts_with("MORFESSOR-MODEL v1 alpha="));
    assert!(fs::read_to_string(dir.path().join("en.model.scores"))
        .unwrap()
        .starts_with("MORPHEME-SCORES v1 lang=en\n"));
}

#[test]
fn build_codec_ranks_one_language() {
    let dir = tempfile::tempdir().unwrap();
    let morphemes: Vec<String> = (0..100).map(|i| format!("m{i:03}x")).collect();
    let scores: Vec<(&str, f64)> =
        morphemes.iter().enumerate().map(|(i, m)| (m.as_str(), 1000.0 - i as f64)).collect();
    scores_file(dir.path(), "la.model", "la", &scores);
    let o = myte(dir.path(), &["build-codec", "la.model", "-o", "t.table"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let inv = table(dir.path(), "t.table");
    assert_eq!(inv.len(), 100);
    for (i, e) in inv.entries().iter().enumerate() {
        assert_eq!(e.group.get(), 0);
        assert_eq!(e.slot.unwrap().rank, i as u32);
        assert_eq!(e.morpheme, morphemes[i].as_bytes());
    }
    let report = String::from_utf8(o.stdout).unwrap();
    let sum: usize = report
        .lines()
        .filter(|l| l.starts_with("group "))
        .map(|l| l.split_whitespace().rev().nth(3).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(sum, 100);
    assert!(report.contains("total 100 morphemes"));
}

#[test]
fn build_codec_merges_shared_morphemes() {
    let dir = tempfile::tempdir().unwrap();
    scores_file(dir.path(), "a.model", "aa", &[("shared", 3.0), ("only", 1.0)]);
    scores_file(dir.path(), "b.model", "bb", &[("shared", 7.5), ("ов", 2.0)]);
    let o = myte(dir.path(), &["build-codec", "a.model", "b.model", "-o", "t.table"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let inv = table(dir.path(), "t.table");
    assert_eq!(inv.len(), 3);
    let shared = inv.entries().iter().find(|e| e.morpheme == b"shared").unwrap();
    assert_eq!(shared.score, 7.5);
    assert_eq!(shared.languages.len(), 2);
    assert_eq!(inv.group_counts()[2], 1);
}

#[test]
fn build_codec_needs_a_model() {
    let dir = tempfile::tempdir().unwrap();
    let o = myte(dir.path(), &["build-codec", "-o", "t.table"]);
    assert!(!o.status.success());
    let o = myte(dir.path(), &["build-codec", "missing.model", "-o", "t.table"]);
    assert_eq!(o.status.code(), Some(1));
}

fn codec_fixture(dir: &Path) {
    scores_file(
        dir,
        "x.model",
        "xx",
        &[("the", 9.0), ("ing", 8.0), ("cat", 7.0), ("ще", 6.0), ("है", 5.0), ("日本", 4.0)],
    );
    let o = myte(dir, &["build-codec", "x.model", "-o", "t.table"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn encode_decode_roundtrip_file() {
    let dir = tempfile::tempdir().unwrap();
    codec_fixture(dir.path());
    let text = "The cat is eating. Ещё щенок! हिन्दी है 日本語\n";
    fs::write(dir.path().join("in.txt"), text).unwrap();
    let o = myte(dir.path(), &["encode", "t.table", "in.txt", "-o", "in.myte"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let encoded = fs::read(dir.path().join("in.myte")).unwrap();
    assert!(encoded.len() < text.len());
    let o = myte(dir.path(), &["decode", "t.table", "in.myte", "-o", "out.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(dir.path().join("out.txt")).unwrap(),
        text.nfkd().collect::<String>()
    );
}

#[test]
fn raw_mode_roundtrips_random_utf8() {
    let dir = tempfile::tempdir().unwrap();
    codec_fixture(dir.path());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut text = String::new();
    for _ in 0..3000 {
        let c = match rng.gen_range(0..4) {
            0 => rng.gen_range('A'..='z'),
            1 => rng.gen_range('\u{80}'..='\u{7FF}'),
            2 => rng.gen_range('\u{800}'..='\u{FFFF}'),
            _ => rng.gen_range('\u{10000}'..='\u{10FFFF}'),
        };
        text.push(c);
        if rng.gen_bool(0.1) {
            text.push_str(["the", "ing", "cat", "ще"][rng.gen_range(0..4)]);
        }
    }
    fs::write(dir.path().join("in.txt"), &text).unwrap();
    let o = myte(dir.path(), &["--no-nfkd", "encode", "t.table", "in.txt", "-o", "in.myte"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = myte(dir.path(), &["--no-nfkd", "decode", "t.table", "in.myte", "-o", "out.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(dir.path().join("out.txt")).unwrap(), text.as_bytes());
}

#[test]
fn decode_reports_truncated_codepoint() {
    let dir = tempfile::tempdir().unwrap();
    codec_fixture(dir.path());
    fs::write(dir.path().join("bad.myte"), b"ab\x4c").unwrap();
    let o = myte(dir.path(), &["decode", "t.table", "bad.myte"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("TruncatedCodepoint at offset 2"), "{}", stderr(&o));
}

#[test]
fn encode_rejects_invalid_utf8() {
    let dir = tempfile::tempdir().unwrap();
    codec_fixture(dir.path());
    fs::write(dir.path().join("bad.txt"), b"ok\xff").unwrap();
    let o = myte(dir.path(), &["encode", "t.table", "bad.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("InvalidUtf8 at offset 2"));
}

fn parity_fixture(dir: &Path, files: &[(&str, &str)], groups: &str) {
    codec_fixture(dir);
    fs::create_dir(dir.join("flores")).unwrap();
    for (name, text) in files {
        fs::write(dir.join("flores").join(name), text).unwrap();
    }
    fs::write(dir.join("groups.txt"), groups).unwrap();
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn parity_pivot_only() {
    let dir = tempfile::tempdir().unwrap();
    parity_fixture(dir.path(), &[("en.txt", "the cat\nsat on it\n")], "");
    let o = myte(dir.path(), &["parity", "t.table", "flores", "groups.txt", "-o", "r.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("r.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "en");
    assert_eq!(rows[0][4], "1.000000");
    assert_eq!(rows[0][5], "1.000000");
    assert!(dir.path().join("r.groups.csv").exists());
}

#[test]
fn parity_of_byte_doubled_language() {
    let dir = tempfile::tempdir().unwrap();
    parity_fixture(
        dir.path(),
        &[("en.devtest", "abc\nhello there\n"), ("xx.devtest", "abcabc\nhello therehello there\n")],
        "xx latin lr unseen-lang\n",
    );
    let o = myte(dir.path(), &["parity", "t.table", "flores", "groups.txt", "-o", "r.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("r.csv"));
    let xx = rows.iter().find(|r| r[0] == "xx").unwrap();
    assert_eq!(xx[4], "2.000000");
    let groups = csv_rows(&dir.path().join("r.groups.csv"));
    let names: Vec<&str> = groups.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["Latin LR", "Unseen Lang", "Unseen"]);
}

#[test]
fn parity_failures() {
    let dir = tempfile::tempdir().unwrap();
    parity_fixture(dir.path(), &[("en.txt", "a\nb\n"), ("xx.txt", "a\n")], "xx latin hr seen\n");
    let o = myte(dir.path(), &["parity", "t.table", "flores", "groups.txt", "-o", "r.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("LengthMismatch"));

    let o = myte(
        dir.path(),
        &["parity", "t.table", "flores", "groups.txt", "-o", "r.csv", "--pivot", "de"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("MissingPivot"));

    fs::write(dir.path().join("flores/xx.txt"), "a\nb\n").unwrap();
    fs::write(dir.path().join("groups.txt"), "").unwrap();
    let o = myte(dir.path(), &["parity", "t.table", "flores", "groups.txt", "-o", "r.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UnlabeledLanguage"));
}

#[test]
fn parity_with_logprobs() {
    let dir = tempfile::tempdir().unwrap();
    parity_fixture(dir.path(), &[("en.txt", "abc\n"), ("xx.txt", "abcd\n")], "xx latin hr seen\n");
    fs::create_dir(dir.path().join("lp")).unwrap();
    fs::write(dir.path().join("lp/xx.txt"), "-1 -1 -1 -1\n").unwrap();
    let o = myte(
        dir.path(),
        &["parity", "t.table", "flores", "groups.txt", "-o", "r.csv", "--logprobs", "lp"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("r.csv"));
    let xx = rows.iter().find(|r| r[0] == "xx").unwrap();
    assert_eq!(xx[7], "1.000000");
    let en = rows.iter().find(|r| r[0] == "en").unwrap();
    assert_eq!(en[7], "");

    fs::write(dir.path().join("lp/xx.txt"), "-1 0.5\n").unwrap();
    let o = myte(
        dir.path(),
        &["parity", "t.table", "flores", "groups.txt", "-o", "r.csv", "--logprobs", "lp"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("PositiveLogProb"));
}
