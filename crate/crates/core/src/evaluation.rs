//! Analogy question scoring and leave-one-out nearest neighbour
//! classification of noun-modifier pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pairspace::WordPair;

/// Credit for a skipped question: the expected score of a random guess.
pub const SKIP_CREDIT: f64 = 0.2;

const DEFAULT_GROUPING: &str = include_str!("../data/nm_classes.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalogyQuestion {
    pub stem: WordPair,
    pub choices: Vec<WordPair>,
    pub answer_index: usize,
}

/// Reads questions of seven lines each: the stem pair, five choice pairs
/// and the answer letter `a`–`e`. Blank lines between questions are
/// ignored.
pub fn parse_questions(text: &str, source_name: &str) -> Result<Vec<AnalogyQuestion>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if !lines.len().is_multiple_of(7) {
        let at = lines.len() - lines.len() % 7;
        return Err(Error::parse(source_name, lines[at].0, "incomplete question (need 7 lines)"));
    }
    lines
        .chunks(7)
        .map(|block| {
            let pair = |(lineno, line): (usize, &str)| WordPair::parse(line).map_err(|e| Error::parse(source_name, lineno, e));
            let stem = pair(block[0])?;
            let choices = block[1..6].iter().map(|&l| pair(l)).collect::<Result<Vec<_>>>()?;
            let (lineno, letter) = block[6];
            let answer_index = match letter.to_ascii_lowercase().as_str() {
                "a" => 0,
                "b" => 1,
                "c" => 2,
                "d" => 3,
                "e" => 4,
                other => return Err(Error::parse(source_name, lineno, format!("answer {other:?} is not a-e"))),
            };
            Ok(AnalogyQuestion {
                stem,
                choices,
                answer_index,
            })
        })
        .collect()
}

pub fn load_questions(path: &Path) -> Result<Vec<AnalogyQuestion>> {
    let text = read(path)?;
    parse_questions(&text, &path.display().to_string())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "status", content = "choice")]
pub enum Answer {
    Answered(usize),
    Skipped,
}

/// The index of the largest similarity, lowest index on ties; skipped when
/// every similarity is zero.
pub fn choose(similarities: &[f64]) -> Answer {
    if similarities.iter().all(|&s| s == 0.0) {
        return Answer::Skipped;
    }
    let mut best = 0;
    for (i, &s) in similarities.iter().enumerate() {
        if s > similarities[best] {
            best = i;
        }
    }
    Answer::Answered(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionResult {
    pub stem: String,
    pub answer: Answer,
    pub correct_index: usize,
    pub similarities: Vec<f64>,
}

/// Scores every choice against the stem with `measure` and picks one.
pub fn answer_question<F>(q: &AnalogyQuestion, measure: F) -> Result<QuestionResult>
where
    F: Fn(&WordPair, &WordPair) -> Result<f64>,
{
    let similarities = q.choices.iter().map(|c| measure(&q.stem, c)).collect::<Result<Vec<_>>>()?;
    Ok(QuestionResult {
        stem: q.stem.to_string(),
        answer: choose(&similarities),
        correct_index: q.answer_index,
        similarities,
    })
}

/// `(correct + 0.2 · skipped) / total`
pub fn score_sat(correct: usize, skipped: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    (correct as f64 + SKIP_CREDIT * skipped as f64) / total as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatReport {
    pub measure: String,
    pub correct: usize,
    pub incorrect: usize,
    pub skipped: usize,
    pub total: usize,
    pub score: f64,
    pub questions: Vec<QuestionResult>,
}

impl SatReport {
    pub fn new(measure: &str, questions: Vec<QuestionResult>) -> SatReport {
        let skipped = questions.iter().filter(|q| q.answer == Answer::Skipped).count();
        let correct = questions
            .iter()
            .filter(|q| q.answer == Answer::Answered(q.correct_index))
            .count();
        let total = questions.len();
        SatReport {
            measure: measure.to_string(),
            correct,
            incorrect: total - correct - skipped,
            skipped,
            total,
            score: score_sat(correct, skipped, total),
            questions,
        }
    }

    pub fn to_table(&self) -> String {
        let rows = [
            ("Correct", self.correct.to_string()),
            ("Incorrect", self.incorrect.to_string()),
            ("Skipped", self.skipped.to_string()),
            ("Total", self.total.to_string()),
            ("Score", format!("{:.1}%", 100.0 * self.score)),
        ];
        table(&self.measure, &rows)
    }
}

/// Answers every question in parallel.
pub fn evaluate_sat<F>(measure_name: &str, questions: &[AnalogyQuestion], measure: F) -> Result<SatReport>
where
    F: Fn(&WordPair, &WordPair) -> Result<f64> + Sync,
{
    let results = questions
        .par_iter()
        .map(|q| answer_question(q, &measure))
        .collect::<Result<Vec<_>>>()?;
    Ok(SatReport::new(measure_name, results))
}

fn table(header: &str, rows: &[(&str, String)]) -> String {
    let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let value_w = rows.iter().map(|(_, v)| v.len()).max().unwrap_or(0).max(header.len());
    let mut out = format!("{:label_w$}  {header:>value_w$}\n", "");
    for (label, value) in rows {
        let _ = writeln!(out, "{label:label_w$}  {value:>value_w$}");
    }
    out
}

/// Maps each of the fine-grained noun-modifier relations to its coarse
/// group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGrouping {
    groups: BTreeMap<String, String>,
}

impl ClassGrouping {
    /// The bundled 30 → 5 table.
    pub fn standard() -> ClassGrouping {
        Self::parse(DEFAULT_GROUPING, "nm_classes.tsv").expect("bundled grouping is valid")
    }

    /// `class30<TAB>class5` lines; a `class30 class5` header is allowed.
    pub fn parse(text: &str, source_name: &str) -> Result<ClassGrouping> {
        let mut groups = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("class30")) {
                continue;
            }
            let (fine, coarse) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source_name, i + 1, "expected class30<TAB>class5"))?;
            if groups.insert(fine.trim().to_string(), coarse.trim().to_string()).is_some() {
                return Err(Error::parse(source_name, i + 1, format!("{fine:?} listed twice")));
            }
        }
        Ok(ClassGrouping { groups })
    }

    pub fn group(&self, class30: &str) -> Option<&str> {
        self.groups.get(class30).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn coarse_classes(&self) -> BTreeSet<&str> {
        self.groups.values().map(String::as_str).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NounModifierInstance {
    pub modifier: String,
    pub head: String,
    pub class30: String,
    pub class5: String,
}

impl NounModifierInstance {
    pub fn pair(&self) -> Result<WordPair> {
        WordPair::new(&self.modifier, &self.head)
    }
}

/// CSV rows `modifier,head,class30[,class5]` with an optional header. A
/// missing class5 is looked up in `grouping`. Every class30 must belong to
/// a single class5.
pub fn parse_noun_modifiers(text: &str, source_name: &str, grouping: &ClassGrouping) -> Result<Vec<NounModifierInstance>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    let mut seen: HashMap<String, String> = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        let fields: Vec<&str> = record.iter().collect();
        if i == 0 && fields.first() == Some(&"modifier") {
            continue;
        }
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        let (modifier, head, class30, class5) = match fields.as_slice() {
            [m, h, c30] => {
                let c5 = grouping
                    .group(c30)
                    .ok_or_else(|| Error::parse(source_name, line, format!("unknown class {c30:?}")))?;
                (*m, *h, *c30, c5)
            }
            [m, h, c30, c5] => (*m, *h, *c30, *c5),
            _ => return Err(Error::parse(source_name, line, "expected modifier,head,class30,class5")),
        };
        if [modifier, head, class30, class5].iter().any(|f| f.is_empty()) {
            return Err(Error::parse(source_name, line, "empty field"));
        }
        if let Some(prev) = seen.insert(class30.to_string(), class5.to_string()) {
            if prev != class5 {
                return Err(Error::parse(
                    source_name,
                    line,
                    format!("class {class30:?} assigned to both {prev:?} and {class5:?}"),
                ));
            }
        }
        out.push(NounModifierInstance {
            modifier: modifier.to_lowercase(),
            head: head.to_lowercase(),
            class30: class30.to_string(),
            class5: class5.to_string(),
        });
    }
    Ok(out)
}

pub fn load_noun_modifiers(path: &Path, grouping: &ClassGrouping) -> Result<Vec<NounModifierInstance>> {
    let text = read(path)?;
    parse_noun_modifiers(&text, &path.display().to_string(), grouping)
}

/// Counts indexed by `[actual][predicted]` over sorted class names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl Confusion {
    pub fn from_labels<S: AsRef<str>>(actual: &[S], predicted: &[S]) -> Confusion {
        assert_eq!(actual.len(), predicted.len());
        let classes: Vec<String> = actual
            .iter()
            .chain(predicted)
            .map(|s| s.as_ref().to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let pos: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let mut counts = vec![vec![0; classes.len()]; classes.len()];
        for (a, p) in actual.iter().zip(predicted) {
            counts[pos[a.as_ref()]][pos[p.as_ref()]] += 1;
        }
        Confusion { classes, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum::<usize>() as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassScores {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacroScores {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub per_class: Vec<ClassScores>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class precision, recall and `F = 2PR / (P + R)`, and their
/// unweighted means. An undefined ratio counts as 0.
pub fn macro_f(confusion: &Confusion) -> MacroScores {
    let n = confusion.classes.len();
    let per_class: Vec<ClassScores> = (0..n)
        .map(|c| {
            let tp = confusion.counts[c][c];
            let predicted: usize = (0..n).map(|r| confusion.counts[r][c]).sum();
            let actual: usize = confusion.counts[c].iter().sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, actual);
            let f = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassScores {
                class: confusion.classes[c].clone(),
                precision,
                recall,
                f,
                support: actual,
            }
        })
        .collect();
    let mean = |get: fn(&ClassScores) -> f64| {
        if n == 0 {
            0.0
        } else {
            per_class.iter().map(get).sum::<f64>() / n as f64
        }
    };
    MacroScores {
        precision: mean(|s| s.precision),
        recall: mean(|s| s.recall),
        f: mean(|s| s.f),
        per_class,
    }
}

/// For each instance, the index of its most similar other instance; ties
/// go to the lowest index. `similarity(i, j)` is only asked for `i != j`.
pub fn nearest_neighbors<F>(n: usize, similarity: F) -> Result<Vec<usize>>
where
    F: Fn(usize, usize) -> Result<f64> + Sync,
{
    if n < 2 {
        return Err(Error::Contract("nearest neighbour needs at least two instances".into()));
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(usize, f64)> = None;
            for j in (0..n).filter(|&j| j != i) {
                let s = similarity(i, j)?;
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((j, s));
                }
            }
            Ok(best.expect("n >= 2").0)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub per_class: Vec<ClassScores>,
    pub confusion: Confusion,
}

impl ClassificationReport {
    pub fn new<S: AsRef<str>>(actual: &[S], predicted: &[S]) -> ClassificationReport {
        let confusion = Confusion::from_labels(actual, predicted);
        let scores = macro_f(&confusion);
        ClassificationReport {
            accuracy: confusion.accuracy(),
            precision: scores.precision,
            recall: scores.recall,
            f: scores.f,
            per_class: scores.per_class,
            confusion,
        }
    }

    pub fn to_table(&self, header: &str) -> String {
        let pct = |x: f64| format!("{:.1}%", 100.0 * x);
        table(
            header,
            &[
                ("Accuracy", pct(self.accuracy)),
                ("Precision", pct(self.precision)),
                ("Recall", pct(self.recall)),
                ("F", pct(self.f)),
            ],
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NounModifierReport {
    pub measure: String,
    pub instances: usize,
    pub neighbors: Vec<usize>,
    pub classes30: ClassificationReport,
    pub classes5: ClassificationReport,
}

impl NounModifierReport {
    pub fn to_table(&self) -> String {
        format!(
            "{}\n{}",
            self.classes30.to_table(&format!("{} (30 classes)", self.measure)),
            self.classes5.to_table(&format!("{} (5 classes)", self.measure))
        )
    }
}

/// Leave-one-out single nearest neighbour: every instance takes the labels
/// of its most similar other instance, scored on both label sets.
pub fn loocv_nearest_neighbor<F>(measure_name: &str, instances: &[NounModifierInstance], similarity: F) -> Result<NounModifierReport>
where
    F: Fn(usize, usize) -> Result<f64> + Sync,
{
    let neighbors = nearest_neighbors(instances.len(), similarity)?;
    let labels = |get: fn(&NounModifierInstance) -> &str| -> (Vec<&str>, Vec<&str>) {
        let actual = instances.iter().map(get).collect();
        let predicted = neighbors.iter().map(|&j| get(&instances[j])).collect();
        (actual, predicted)
    };
    let (a30, p30) = labels(|x| &x.class30);
    let (a5, p5) = labels(|x| &x.class5);
    Ok(NounModifierReport {
        measure: measure_name.to_string(),
        instances: instances.len(),
        classes30: ClassificationReport::new(&a30, &p30),
        classes5: ClassificationReport::new(&a5, &p5),
        neighbors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAT: &str = "mason stone\nteacher chalk\ncarpenter wood\nsoldier gun\nphotograph camera\nbook word\nb\n";

    #[test]
    fn parses_question_blocks() {
        let qs = parse_questions(&format!("{SAT}\n\n{SAT}"), "q").unwrap();
        assert_eq!(qs.len(), 2);
        assert_eq!(qs[0].stem.to_string(), "mason:stone");
        assert_eq!(qs[0].choices[1].to_string(), "carpenter:wood");
        assert_eq!(qs[0].answer_index, 1);
        assert!(parse_questions(&SAT.replace("\nb\n", "\nf\n"), "q").is_err());
        assert!(parse_questions("a b\nc d\n", "q").is_err());
    }

    #[test]
    fn choice_rules() {
        assert_eq!(choose(&[0.37, 0.68, 0.39, 0.43, 0.37]), Answer::Answered(1));
        assert_eq!(choose(&[0.0; 5]), Answer::Skipped);
        assert_eq!(choose(&[0.5, 0.5, 0.0, 0.0, 0.0]), Answer::Answered(0));
        assert_eq!(choose(&[-0.2, -0.1, 0.0, 0.0, 0.0]), Answer::Answered(2));
    }

    #[test]
    fn sat_score_edges() {
        assert_eq!(score_sat(10, 0, 10), 1.0);
        assert!((score_sat(0, 10, 10) - 0.2).abs() < 1e-15);
        assert_eq!(score_sat(0, 0, 0), 0.0);
    }

    #[test]
    fn report_counts_add_up() {
        let qs = parse_questions(SAT, "q").unwrap();
        let report = evaluate_sat("toy", &qs, |_, c| Ok(if c.a == "carpenter" { 1.0 } else { 0.5 })).unwrap();
        assert_eq!((report.correct, report.incorrect, report.skipped), (1, 0, 0));
        assert!(report.to_table().contains("Score"));
    }

    #[test]
    fn harmonic_mean_and_empty_classes() {
        let c = Confusion::from_labels(&["a", "a", "b"], &["a", "b", "b"]);
        let m = macro_f(&c);
        let a = &m.per_class[0];
        assert_eq!((a.precision, a.recall), (1.0, 0.5));
        assert!((a.f - 2.0 / 3.0).abs() < 1e-15);
        let never = macro_f(&Confusion::from_labels(&["a", "b"], &["a", "a"]));
        assert_eq!(never.per_class[1].precision, 0.0);
        assert_eq!(never.per_class[1].f, 0.0);
    }

    #[test]
    fn standard_grouping_covers_thirty_classes() {
        let g = ClassGrouping::standard();
        assert_eq!(g.len(), 30);
        assert_eq!(g.coarse_classes().len(), 5);
        assert_eq!(g.group("instrument"), Some("participatory"));
        assert_eq!(g.group("time_at"), Some("temporal"));
    }

    #[test]
    fn noun_modifier_csv() {
        let g = ClassGrouping::standard();
        let rows = parse_noun_modifiers("modifier,head,class30,class5\nflu,virus,cause,causal\nsteel,knife,material\n", "nm", &g).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].class5, "qualitative");
        let err = parse_noun_modifiers("a,b,cause,causal\nc,d,cause,spatial\n", "nm", &g).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_noun_modifiers("a,b,nonsense\n", "nm", &g).is_err());
    }

    #[test]
    fn loocv_never_picks_self() {
        let inst = |c: &str| NounModifierInstance {
            modifier: "m".into(),
            head: "h".into(),
            class30: c.into(),
            class5: "causal".into(),
        };
        let data = [inst("cause"), inst("cause")];
        let report = loocv_nearest_neighbor("x", &data, |i, j| Ok(if i == j { 9.0 } else { 0.1 })).unwrap();
        assert_eq!(report.neighbors, [1, 0]);
        assert_eq!(report.classes30.accuracy, 1.0);
        assert!(nearest_neighbors(1, |_, _| Ok(0.0)).is_err());
    }
}
