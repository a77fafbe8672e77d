use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use czsk_asr::alphabet::{Alphabet, Language};
use czsk_asr::ctc::{greedy_decode, read_ctce, write_ctce, BeamConfig, BeamSearchDecoder};
use czsk_asr::eval::{corpus_stats, corpus_wer, read_manifest_file, ManifestEntry, WerReport};
use czsk_asr::lm::{read_arpa, train, write_arpa};
use czsk_asr::normalize::{normalize, normalize_transcript, NormalizationRules};
use czsk_asr::testkit::{synth_emissions, utterance_seed, SynthesisConfig};

/// Czech and Slovak grapheme CTC decoding, n-gram LMs and WER scoring.
#[derive(Parser)]
#[command(name = "czsk-asr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize transcripts line by line from stdin to stdout.
    Normalize {
        /// JSON rules file; built-in rules when omitted.
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Print the frozen alphabet file of a language.
    Alphabet {
        #[arg(long, default_value = "sk")]
        language: Language,
    },
    /// Train a pruned backoff n-gram model and write it as ARPA.
    LmTrain {
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Minimum counts per order, e.g. 10,100,100. No pruning when omitted.
        #[arg(long, value_delimiter = ',')]
        prune: Option<Vec<u64>>,
        /// Corpus, one sentence per line. Lines are normalized before counting.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Perplexity of a text under an ARPA model.
    LmPpl {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Corpus WER of line-aligned reference and hypothesis files.
    Score {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Hours, utterances and words of a manifest.
    Stats {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write synthetic emissions for every manifest entry.
    Synth(SynthArgs),
    /// Decode the emissions of a manifest, one hypothesis per line.
    Decode(DecodeArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    temp: f64,
    #[arg(long, default_value_t = 0.1)]
    blank_prob: f64,
    #[arg(long, default_value_t = 2)]
    frames_per_grapheme: usize,
    #[arg(long, default_value = "sk")]
    language: Language,
    /// Do not force a blank frame between consecutive graphemes.
    #[arg(long)]
    no_interleave: bool,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value = "sk")]
    language: Language,
    /// ARPA model for shallow fusion.
    #[arg(long)]
    lm: Option<PathBuf>,
    /// Best-path decoding instead of beam search.
    #[arg(long)]
    greedy: bool,
    #[arg(long, default_value_t = BeamConfig::default().beam_width)]
    beam_width: usize,
    #[arg(long, default_value_t = BeamConfig::default().lm_weight)]
    alpha: f64,
    #[arg(long, default_value_t = BeamConfig::default().word_bonus)]
    beta: f64,
    #[arg(long, default_value_t = BeamConfig::default().token_min_logp, allow_hyphen_values = true)]
    token_min_logp: f64,
    /// Write hypotheses here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Normalize { rules } => normalize_cmd(rules.as_deref()),
        Command::Alphabet { language } => {
            print!("{}", Alphabet::new(language).to_file_string());
            Ok(())
        }
        Command::LmTrain { order, prune, input, out } => lm_train(order, prune, &input, &out),
        Command::LmPpl { model, input } => lm_ppl(&model, &input),
        Command::Score { reference, hyp, json } => score(&reference, &hyp, json),
        Command::Stats { manifest, json } => stats(&manifest, json),
        Command::Synth(args) => synth(&args),
        Command::Decode(args) => decode(&args),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("cannot open {}", path.display()))?))
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    open(path)?.lines().collect::<io::Result<_>>().with_context(|| format!("cannot read {}", path.display()))
}

fn normalize_cmd(rules: Option<&Path>) -> Result<()> {
    let rules = match rules {
        Some(p) => NormalizationRules::from_file(p).with_context(|| format!("rules file {}", p.display()))?,
        None => NormalizationRules::default(),
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for line in io::stdin().lock().lines() {
        writeln!(out, "{}", normalize_transcript(&line?, &rules))?;
    }
    out.flush()?;
    Ok(())
}

fn lm_train(order: usize, prune: Option<Vec<u64>>, input: &Path, out: &Path) -> Result<()> {
    let thresholds = prune.unwrap_or_else(|| vec![1; order]);
    if thresholds.len() != order {
        bail!("--prune needs {order} thresholds, got {}", thresholds.len());
    }
    let lines: Vec<String> = read_lines(input)?.iter().map(|l| normalize(l)).collect();
    let model = train(&lines, order, &thresholds)?;
    log::info!("trained order-{} model with {} entries", model.order(), model.total_entries());
    let file = File::create(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut sink = BufWriter::new(file);
    write_arpa(&model, &mut sink)?;
    sink.flush()?;
    Ok(())
}

fn lm_ppl(model: &Path, input: &Path) -> Result<()> {
    let model = read_arpa(open(model)?)?;
    let lines: Vec<String> = read_lines(input)?.iter().map(|l| normalize(l)).collect();
    println!("{:.4}", model.perplexity(&lines)?);
    Ok(())
}

fn report_json(r: &WerReport) -> serde_json::Value {
    serde_json::json!({
        "wer": r.wer,
        "errors": r.errors(),
        "ref_words": r.ref_words,
        "hits": r.hits,
        "substitutions": r.substitutions,
        "insertions": r.insertions,
        "deletions": r.deletions,
    })
}

fn score(reference: &Path, hyp: &Path, json: bool) -> Result<()> {
    let refs = read_lines(reference)?;
    let hyps = read_lines(hyp)?;
    if refs.len() != hyps.len() {
        bail!("{} reference lines but {} hypothesis lines", refs.len(), hyps.len());
    }
    let r = corpus_wer(refs.iter().zip(&hyps))?;
    if json {
        println!("{}", report_json(&r));
    } else {
        println!(
            "WER {:.2}% [{} / {}, {} sub, {} ins, {} del]",
            100.0 * r.wer,
            r.errors(),
            r.ref_words,
            r.substitutions,
            r.insertions,
            r.deletions
        );
    }
    Ok(())
}

fn stats(manifest: &Path, json: bool) -> Result<()> {
    let s = corpus_stats(&read_manifest_file(manifest)?);
    if json {
        let cells = s.table_cells();
        println!(
            "{}",
            serde_json::json!({ "hours": s.hours, "utterances": s.utterances, "words": s.words, "cells": cells })
        );
    } else {
        println!("{s}");
    }
    Ok(())
}

/// File stem for an utterance id: anything outside `[A-Za-z0-9._-]` becomes `_`.
fn file_stem(id: &str) -> String {
    let stem: String =
        id.chars().map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' }).collect();
    if stem.is_empty() || stem.starts_with('.') {
        format!("_{stem}")
    } else {
        stem
    }
}

fn synth(args: &SynthArgs) -> Result<()> {
    let entries = read_manifest_file(&args.manifest)?;
    let alphabet = Alphabet::new(args.language);
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let base = SynthesisConfig {
        frames_per_grapheme: args.frames_per_grapheme,
        blank_prob: args.blank_prob,
        confusion_temp: args.temp,
        rng_seed: args.seed,
        interleave_blanks: !args.no_interleave,
    };
    base.validate()?;

    let mut used = HashSet::new();
    let mut updated = Vec::with_capacity(entries.len());
    for (i, entry) in entries.into_iter().enumerate() {
        let name = format!("{}.ctce", file_stem(&entry.id));
        if !used.insert(name.clone()) {
            bail!("utterance {:?} maps to the file name {name} of an earlier entry", entry.id);
        }
        let config = SynthesisConfig { rng_seed: utterance_seed(args.seed, i), ..base };
        let m = synth_emissions(&normalize(&entry.text), &alphabet, &config)
            .with_context(|| format!("utterance {:?}", entry.id))?;
        write_ctce(args.out_dir.join(&name), &m)?;
        updated.push(ManifestEntry { emissions: Some(name), ..entry });
    }

    let path = args.out_dir.join("manifest.jsonl");
    let mut out =
        BufWriter::new(File::create(&path).with_context(|| format!("cannot create {}", path.display()))?);
    for e in &updated {
        writeln!(out, "{}", serde_json::to_string(e)?)?;
    }
    out.flush()?;
    log::info!("wrote {} emission files and {}", updated.len(), path.display());
    Ok(())
}

fn decode(args: &DecodeArgs) -> Result<()> {
    let entries = read_manifest_file(&args.manifest)?;
    let dir = args.manifest.parent().unwrap_or(Path::new("."));
    let alphabet = Alphabet::new(args.language);
    let lm = args
        .lm
        .as_deref()
        .map(|p| read_arpa(open(p)?).with_context(|| format!("model {}", p.display())))
        .transpose()?;
    let config = BeamConfig {
        beam_width: args.beam_width,
        lm_weight: args.alpha,
        word_bonus: args.beta,
        token_min_logp: args.token_min_logp,
        n_best: 1,
    };
    let decoder = BeamSearchDecoder::new(&alphabet, lm.as_ref(), config)?;

    let mut matrices = Vec::with_capacity(entries.len());
    for e in &entries {
        let rel = e.emissions.as_ref().with_context(|| format!("utterance {:?} has no emissions", e.id))?;
        matrices.push(read_ctce(dir.join(rel)).with_context(|| format!("emissions of {:?}", e.id))?);
    }
    let hyps: Vec<String> = if args.greedy {
        matrices
            .iter()
            .map(|m| greedy_decode(m, &alphabet).map(|r| r.transcript))
            .collect::<Result<_, _>>()?
    } else {
        decoder
            .decode_batch(&matrices)
            .into_iter()
            .map(|r| r.map(|mut n| n.swap_remove(0).transcript))
            .collect::<Result<_, _>>()?
    };

    let mut out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    for h in &hyps {
        writeln!(out, "{h}")?;
    }
    out.flush()?;
    Ok(())
}
