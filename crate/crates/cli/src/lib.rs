//! Pipeline commands behind the `myte` binary.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use myte::codepage::{ScriptGroupId, GROUP_CAPACITY};
use myte::corpus::{build_lexicon, open_corpus, parse_wordlist, LexiconOptions};
use myte::inventory::{allocate, merge_inventories, MultilingualInventory};
use myte::metrics::{
    aggregate, groups_to_csv, load_logprob_dir, parse_groups, ParallelCorpus, ParityReport,
};
use myte::morphology::{
    fit_alpha, parse_scores, score_morphemes, total_loss, write_scores, FitConfig, MorphemeScore,
    SegmentationModel,
};
use myte::transcoder::{CodecOptions, MyteCodec};

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub target_morphemes: usize,
    pub alpha_tolerance: f64,
    pub lexicon_cap: usize,
    pub seed: u64,
    pub nfkd: bool,
    pub allow_lengthening: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            target_morphemes: 4096,
            alpha_tolerance: 0.05,
            lexicon_cap: 30_000,
            seed: 0,
            nfkd: true,
            allow_lengthening: false,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.target_morphemes > 0, "--target-morphemes must be positive");
        ensure!(self.lexicon_cap > 0, "--lexicon-cap must be positive");
        ensure!(
            self.alpha_tolerance > 0.0 && self.alpha_tolerance < 1.0,
            "--alpha-tol must lie strictly between 0 and 1"
        );
        Ok(())
    }

    pub fn codec_options(&self) -> CodecOptions {
        CodecOptions { nfkd: self.nfkd, allow_lengthening: self.allow_lengthening }
    }
}

/// Path of the scored-morpheme list written next to a model.
pub fn scores_path(model: &Path) -> PathBuf {
    let mut name = model.as_os_str().to_owned();
    name.push(".scores");
    PathBuf::from(name)
}

fn language_of(model: &Path) -> String {
    model
        .file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.split('.').next())
        .filter(|n| !n.is_empty())
        .unwrap_or("und")
        .to_string()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub struct TrainSummary {
    pub morphemes: usize,
    pub alpha: f64,
    pub loss: f64,
}

/// Builds a lexicon, fits alpha to the morpheme target, and writes the model
/// plus its scores sidecar. `language` defaults to the model file stem.
pub fn cmd_train(
    corpus: &Path,
    wordlist: Option<&Path>,
    english_wordlist: Option<&Path>,
    out_model: &Path,
    language: Option<&str>,
    config: &Config,
) -> Result<TrainSummary> {
    config.validate()?;
    let external = wordlist.map(read_text).transpose()?.map(|t| parse_wordlist(&t));
    let english = english_wordlist.map(read_text).transpose()?.map(|t| parse_wordlist(&t));
    let options = LexiconOptions { cap: config.lexicon_cap, nfkd: config.nfkd };
    let (lexicon, stats) =
        build_lexicon(open_corpus(corpus)?, external.as_deref(), english.as_deref(), &options)?;
    log::info!("lexicon: {} entries from {} tokens", lexicon.len(), stats.tokens);

    let fit_config = FitConfig::new(config.target_morphemes, config.alpha_tolerance, config.seed);
    let fit = fit_alpha(&lexicon, &fit_config)?;
    if let Some(w) = &fit.warning {
        log::warn!("alpha search: {w:?}");
    }
    let scores = score_morphemes(&fit.model);
    let language = language.map_or_else(|| language_of(out_model), str::to_string);
    write_file(out_model, fit.model.to_text().as_bytes())?;
    write_file(&scores_path(out_model), write_scores(&language, &scores).as_bytes())?;
    Ok(TrainSummary {
        morphemes: fit.model.num_morphemes(),
        alpha: fit.alpha,
        loss: total_loss(&fit.model)?,
    })
}

fn load_scores(model: &Path) -> Result<(String, Vec<MorphemeScore>)> {
    let sidecar = scores_path(model);
    if sidecar.exists() {
        return parse_scores(&read_text(&sidecar)?)
            .with_context(|| format!("parsing {}", sidecar.display()));
    }
    let parsed = SegmentationModel::parse_text(&read_text(model)?)
        .with_context(|| format!("parsing {}", model.display()))?;
    Ok((language_of(model), score_morphemes(&parsed)))
}

/// Merges the scored inventories of several models into a MYTE table.
pub fn cmd_build_codec(models: &[PathBuf], out_table: &Path) -> Result<MultilingualInventory> {
    ensure!(!models.is_empty(), "at least one model is required");
    let mut per_language: BTreeMap<String, Vec<MorphemeScore>> = BTreeMap::new();
    for m in models {
        let (language, scores) = load_scores(m)?;
        per_language.entry(language).or_default().extend(scores);
    }
    let inventory = allocate(merge_inventories(&per_language))?;
    write_file(out_table, inventory.to_table_string().as_bytes())?;
    Ok(inventory)
}

/// One line per script group with its allocation and free capacity.
pub fn group_report(inventory: &MultilingualInventory) -> String {
    let counts = inventory.group_counts();
    let mut out = String::new();
    for g in ScriptGroupId::all() {
        let n = counts[g.index()];
        out.push_str(&format!(
            "group {} {:<22} {:>7} morphemes, {:>7} free\n",
            g,
            g.info().name,
            n,
            GROUP_CAPACITY as usize - n
        ));
    }
    out.push_str(&format!("total {} morphemes\n", counts.iter().sum::<usize>()));
    out
}

pub fn load_codec(table: &Path, config: &Config) -> Result<MyteCodec> {
    let inventory = MultilingualInventory::parse_table(&read_text(table)?)
        .with_context(|| format!("parsing {}", table.display()))?;
    Ok(MyteCodec::from_inventory(&inventory, config.codec_options())?)
}

fn read_input(input: Option<&Path>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match input {
        Some(p) => buf = fs::read(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            io::stdin().lock().read_to_end(&mut buf).context("reading stdin")?;
        }
    }
    Ok(buf)
}

fn write_output(output: Option<&Path>, data: &[u8]) -> Result<()> {
    match output {
        Some(p) => write_file(p, data),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(data)?;
            out.flush().context("writing stdout")
        }
    }
}

pub fn cmd_encode(
    table: &Path,
    input: Option<&Path>,
    output: Option<&Path>,
    config: &Config,
) -> Result<()> {
    let codec = load_codec(table, config)?;
    let encoded = codec.encode(&read_input(input)?)?;
    write_output(output, &encoded)
}

pub fn cmd_decode(
    table: &Path,
    input: Option<&Path>,
    output: Option<&Path>,
    config: &Config,
) -> Result<()> {
    let codec = load_codec(table, config)?;
    let decoded = codec.decode(&read_input(input)?)?;
    write_output(output, &decoded)
}

/// Grouped summary written beside the per-language report:
/// `report.csv` gets `report.groups.csv`.
pub fn grouped_csv_path(out_csv: &Path) -> PathBuf {
    out_csv.with_extension("groups.csv")
}

pub struct ParityArgs<'a> {
    pub table: &'a Path,
    pub corpus_dir: &'a Path,
    pub groups: &'a Path,
    pub out_csv: &'a Path,
    pub logprob_dir: Option<&'a Path>,
    pub pivot: &'a str,
}

pub fn cmd_parity(args: &ParityArgs<'_>, config: &Config) -> Result<ParityReport> {
    let codec = load_codec(args.table, config)?;
    let corpus = ParallelCorpus::load_dir(args.corpus_dir, args.pivot)?;
    if corpus.is_empty() {
        bail!("parallel corpus in {} has no sentences", args.corpus_dir.display());
    }
    let labels = parse_groups(&read_text(args.groups)?)?;
    let logprobs = args.logprob_dir.map(load_logprob_dir).transpose()?;
    let report = ParityReport::build(&corpus, &codec, logprobs.as_ref())?;
    let groups = aggregate(&report, &labels)?;
    write_file(args.out_csv, report.to_csv().as_bytes())?;
    write_file(&grouped_csv_path(args.out_csv), groups_to_csv(&groups).as_bytes())?;
    Ok(report)
}
