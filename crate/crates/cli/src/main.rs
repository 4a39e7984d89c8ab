use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use myte_cli::{
    cmd_build_codec, cmd_decode, cmd_encode, cmd_parity, cmd_train, group_report, grouped_csv_path,
    Config, ParityArgs,
};

#[derive(Parser)]
#[command(name = "myte", version, about = "Morphology-driven byte encoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Morphemes per language the alpha search aims for.
    #[arg(long, global = true, default_value_t = 4096)]
    target_morphemes: usize,
    /// Accepted relative deviation from the morpheme target.
    #[arg(long = "alpha-tol", global = true, default_value_t = 0.05)]
    alpha_tolerance: f64,
    /// Maximum lexicon size.
    #[arg(long, global = true, default_value_t = 30_000)]
    lexicon_cap: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Skip NFKD decomposition.
    #[arg(long, global = true)]
    no_nfkd: bool,
    /// Also substitute morphemes whose codepoint is longer than they are.
    #[arg(long, global = true)]
    allow_lengthening: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Train a segmentation model on a corpus file or directory of .txt files.
    Train {
        corpus: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Word list whose entries form the lexicon (first column is used).
        #[arg(long)]
        wordlist: Option<PathBuf>,
        /// English words to exclude from the lexicon.
        #[arg(long)]
        english_wordlist: Option<PathBuf>,
        /// Language tag for the scores file; defaults to the model file stem.
        #[arg(long)]
        lang: Option<String>,
    },
    /// Merge trained models into a MYTE table.
    BuildCodec {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Transcode UTF-8 to MYTE.
    Encode {
        table: PathBuf,
        /// Input file; standard input if absent.
        input: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Transcode MYTE back to UTF-8.
    Decode {
        table: PathBuf,
        input: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Length parity, compression and BPEB over a parallel corpus.
    Parity {
        table: PathBuf,
        /// One file per language, one sentence per line.
        corpus_dir: PathBuf,
        /// Lines of `<lang> <latin|non-latin> <hr|lr> <seen|unseen-lang|unseen-script>`.
        groups: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// One file per language of base-2 log-probabilities per sentence.
        #[arg(long)]
        logprobs: Option<PathBuf>,
        #[arg(long, default_value = "en")]
        pivot: String,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = Config {
        target_morphemes: cli.target_morphemes,
        alpha_tolerance: cli.alpha_tolerance,
        lexicon_cap: cli.lexicon_cap,
        seed: cli.seed,
        nfkd: !cli.no_nfkd,
        allow_lengthening: cli.allow_lengthening,
    };
    config.validate()?;
    match cli.command {
        Command::Train { corpus, out, wordlist, english_wordlist, lang } => {
            let s = cmd_train(
                &corpus,
                wordlist.as_deref(),
                english_wordlist.as_deref(),
                &out,
                lang.as_deref(),
                &config,
            )?;
            println!("morphemes {}", s.morphemes);
            println!("alpha {}", s.alpha);
            println!("loss {}", s.loss);
        }
        Command::BuildCodec { models, out } => {
            let inventory = cmd_build_codec(&models, &out)?;
            print!("{}", group_report(&inventory));
        }
        Command::Encode { table, input, out } => {
            cmd_encode(&table, input.as_deref(), out.as_deref(), &config)?;
        }
        Command::Decode { table, input, out } => {
            cmd_decode(&table, input.as_deref(), out.as_deref(), &config)?;
        }
        Command::Parity { table, corpus_dir, groups, out, logprobs, pivot } => {
            let args = ParityArgs {
                table: &table,
                corpus_dir: &corpus_dir,
                groups: &groups,
                out_csv: &out,
                logprob_dir: logprobs.as_deref(),
                pivot: &pivot,
            };
            let report = cmd_parity(&args, &config)?;
            if report.skipped_sentences > 0 {
                eprintln!("skipped {} empty pivot sentences", report.skipped_sentences);
            }
            println!("wrote {} and {}", out.display(), grouped_csv_path(&out).display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
