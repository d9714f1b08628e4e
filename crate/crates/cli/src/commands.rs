use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use lra::evaluation::{
    evaluate_sat, load_noun_modifiers, load_questions, loocv_nearest_neighbor, ClassGrouping, NounModifierInstance,
};
use lra::patterns::PatternTable;
use lra::pipeline::{run_cached, LraModel, RunManifest, PATTERNS_FILE};
use lra::vsm::{vsm_vector, JoiningTerms};
use lra::{cosine, Corpus, LraConfig, Thesaurus, WordPair};

use crate::{
    Cli, Command, EvalCommand, Format, IndexCommand, Inputs, Measure, NmArgs, PatternsCommand, SatArgs, SimArgs,
    ThesaurusCommand, VsmCommand, VsmEvalCommand,
};

pub fn dispatch(cli: &Cli) -> Result<()> {
    if cli.seed.is_some() {
        log::info!("--seed has no effect: the pipeline is deterministic");
    }
    match &cli.command {
        Command::Index(IndexCommand::Build { corpus, output }) => index_build(corpus, output),
        Command::Thesaurus(ThesaurusCommand::Check { file }) => thesaurus_check(file),
        Command::Run(args) => {
            let mut pairs = Vec::new();
            if let Some(p) = &args.pairs {
                pairs.extend(read_pairs(p)?);
            }
            if let Some(q) = &args.questions {
                pairs.extend(question_pairs(q)?);
            }
            if let Some(n) = &args.nm {
                pairs.extend(nm_pairs(&load_noun_modifiers(n, &ClassGrouping::standard())?)?);
            }
            let (_, manifest) = run(cli, &args.inputs, &pairs)?;
            print_json(&serde_json::to_value(manifest)?)
        }
        Command::Sim(args) => sim(cli, args),
        Command::Eval(EvalCommand::Sat { measure, args }) => eval_sat(cli, *measure, args),
        Command::Eval(EvalCommand::Nm { measure, args }) => eval_nm(cli, *measure, args),
        Command::Vsm(VsmCommand::Eval(VsmEvalCommand::Sat(args))) => eval_sat(cli, Measure::Vsm, args),
        Command::Vsm(VsmCommand::Eval(VsmEvalCommand::Nm(args))) => eval_nm(cli, Measure::Vsm, args),
        Command::Patterns(PatternsCommand::Dump { limit }) => patterns_dump(&cli.out, *limit),
    }
}

fn print_json(value: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn config(cli: &Cli) -> Result<LraConfig> {
    match &cli.config {
        Some(path) => Ok(LraConfig::load(path)?),
        None => Ok(LraConfig::default()),
    }
}

fn open_corpus(path: &Path) -> Result<Corpus> {
    Corpus::open(path).with_context(|| format!("loading corpus {}", path.display()))
}

fn index_build(corpus: &Path, output: &Path) -> Result<()> {
    let c = Corpus::from_path(corpus)?;
    c.save(output)?;
    print_json(&json!({
        "documents": c.num_documents(),
        "tokens": c.num_tokens(),
        "index": output.display().to_string(),
    }))
}

fn thesaurus_check(file: &Path) -> Result<()> {
    let t = Thesaurus::load(file)?;
    let neighbors: usize = t.entries().iter().map(|e| e.neighbors.len()).sum();
    print_json(&json!({
        "file": file.display().to_string(),
        "entries": t.len(),
        "neighbors": neighbors,
    }))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// One pair per line; blank lines and `#` comments are skipped.
fn read_pairs(path: &Path) -> Result<Vec<WordPair>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let pair = WordPair::parse(line).map_err(|e| anyhow::anyhow!("{} line {}: {e}", path.display(), i + 1))?;
        out.push(pair);
    }
    Ok(out)
}

fn question_pairs(path: &Path) -> Result<Vec<WordPair>> {
    Ok(load_questions(path)?
        .into_iter()
        .flat_map(|q| std::iter::once(q.stem).chain(q.choices))
        .collect())
}

fn nm_pairs(instances: &[NounModifierInstance]) -> Result<Vec<WordPair>> {
    Ok(instances.iter().map(|i| i.pair()).collect::<lra::Result<_>>()?)
}

fn run(cli: &Cli, inputs: &Inputs, pairs: &[WordPair]) -> Result<(LraModel, RunManifest)> {
    run_on(cli, &inputs.corpus, &inputs.thesaurus, pairs)
}

fn run_on(cli: &Cli, corpus: &Path, thesaurus: &Path, pairs: &[WordPair]) -> Result<(LraModel, RunManifest)> {
    let config = config(cli)?;
    let corpus = open_corpus(corpus)?;
    let thesaurus = Thesaurus::load(thesaurus)?;
    Ok(run_cached(&config, &corpus, &thesaurus, pairs, &cli.out)?)
}

/// `a:b c:d` or `a b c d` per line.
fn read_comparisons(path: &Path) -> Result<Vec<(WordPair, WordPair)>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [p, q] => WordPair::parse(p).and_then(|p| Ok((p, WordPair::parse(q)?))),
            [a, b, c, d] => WordPair::parse(&format!("{a} {b}")).and_then(|p| Ok((p, WordPair::parse(&format!("{c} {d}"))?))),
            _ => Err("expected two pairs".to_string()),
        };
        out.push(parsed.map_err(|e| anyhow::anyhow!("{} line {}: {e}", path.display(), i + 1))?);
    }
    Ok(out)
}

fn sim(cli: &Cli, args: &SimArgs) -> Result<()> {
    let comparisons = read_comparisons(&args.comparisons)?;
    let pairs: Vec<WordPair> = comparisons.iter().flat_map(|(p, q)| [p.clone(), q.clone()]).collect();
    let (model, _) = run(cli, &args.inputs, &pairs)?;
    let rows = comparisons
        .iter()
        .map(|(p, q)| {
            let r = model.similarity(p, q)?;
            Ok(json!({
                "pair1": p.to_string(),
                "pair2": q.to_string(),
                "similarity": r.value,
                "original_cosine": r.original_cosine,
                "n_qualifying": r.n_qualifying,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    print_json(&Value::Array(rows))
}

fn terms(path: Option<&Path>) -> Result<JoiningTerms> {
    Ok(match path {
        Some(p) => JoiningTerms::load(p)?,
        None => JoiningTerms::default_list(),
    })
}

/// VSM vectors for every distinct pair.
fn vsm_vectors(corpus: &Corpus, terms: &JoiningTerms, pairs: &[WordPair]) -> HashMap<(String, String), Vec<f64>> {
    pairs
        .iter()
        .map(|p| (p.key(), vsm_vector(p, corpus, terms)))
        .collect()
}

fn thesaurus_for(measure: Measure, thesaurus: Option<&Path>) -> Result<&Path> {
    match thesaurus {
        Some(t) => Ok(t),
        None => bail!("--thesaurus is required for --measure {measure:?}"),
    }
}

fn emit(format: Format, report: Value, table: String) -> Result<()> {
    match format {
        Format::Json => print_json(&report),
        Format::Table => {
            print!("{table}");
            Ok(())
        }
    }
}

fn eval_sat(cli: &Cli, measure: Measure, args: &SatArgs) -> Result<()> {
    let questions = load_questions(&args.questions)?;
    let pairs: Vec<WordPair> = questions
        .iter()
        .flat_map(|q| std::iter::once(q.stem.clone()).chain(q.choices.iter().cloned()))
        .collect();
    let report = match measure {
        Measure::Lra => {
            let thesaurus = thesaurus_for(measure, args.thesaurus.as_deref())?;
            let (model, _) = run_on(cli, &args.corpus, thesaurus, &pairs)?;
            evaluate_sat("LRA", &questions, |p, q| Ok(model.similarity(p, q)?.value))?
        }
        Measure::Vsm => {
            let corpus = open_corpus(&args.corpus)?;
            let vectors = vsm_vectors(&corpus, &terms(args.terms.as_deref())?, &pairs);
            evaluate_sat("VSM", &questions, |p, q| Ok(cosine(&vectors[&p.key()], &vectors[&q.key()])))?
        }
    };
    let table = report.to_table();
    emit(args.format, serde_json::to_value(&report)?, table)
}

fn eval_nm(cli: &Cli, measure: Measure, args: &NmArgs) -> Result<()> {
    let grouping = match &args.classes {
        Some(p) => ClassGrouping::parse(&read_text(p)?, &p.display().to_string())?,
        None => ClassGrouping::standard(),
    };
    let instances = load_noun_modifiers(&args.data, &grouping)?;
    let pairs = nm_pairs(&instances)?;
    let report = match measure {
        Measure::Lra => {
            let thesaurus = thesaurus_for(measure, args.thesaurus.as_deref())?;
            let (model, _) = run_on(cli, &args.corpus, thesaurus, &pairs)?;
            loocv_nearest_neighbor("LRA", &instances, |i, j| Ok(model.similarity(&pairs[i], &pairs[j])?.value))?
        }
        Measure::Vsm => {
            let corpus = open_corpus(&args.corpus)?;
            let vectors = vsm_vectors(&corpus, &terms(args.terms.as_deref())?, &pairs);
            loocv_nearest_neighbor("VSM", &instances, |i, j| {
                Ok(cosine(&vectors[&pairs[i].key()], &vectors[&pairs[j].key()]))
            })?
        }
    };
    let table = report.to_table();
    emit(args.format, serde_json::to_value(&report)?, table)
}

fn patterns_dump(out: &Path, limit: Option<usize>) -> Result<()> {
    let path = out.join(PATTERNS_FILE);
    let table = PatternTable::from_tsv(&read_text(&path)?)?;
    let rows: Vec<Value> = table
        .iter()
        .take(limit.unwrap_or(usize::MAX))
        .map(|(p, s)| json!({"pattern": p.to_string(), "support": s}))
        .collect();
    print_json(&Value::Array(rows))
}
