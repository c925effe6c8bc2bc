//! Exact-match micro precision, recall and F1.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codecs::category_mentions;
use crate::model::{AnnotatedSentence, EntitySpan, ParsedOutput, TextIndex};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvalCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalCounts {
    pub fn new(tp: usize, fp: usize, fn_: usize) -> Self {
        Self { tp, fp, fn_ }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

impl Add for EvalCounts {
    type Output = EvalCounts;

    fn add(self, o: EvalCounts) -> EvalCounts {
        EvalCounts::new(self.tp + o.tp, self.fp + o.fp, self.fn_ + o.fn_)
    }
}

impl AddAssign for EvalCounts {
    fn add_assign(&mut self, o: EvalCounts) {
        *self = *self + o;
    }
}

impl Sum for EvalCounts {
    fn sum<I: Iterator<Item = EvalCounts>>(iter: I) -> Self {
        iter.fold(EvalCounts::default(), Add::add)
    }
}

/// Result of [`match_spans`]. Each side keeps its input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanMatching<T> {
    pub matched: Vec<T>,
    pub unmatched_gold: Vec<T>,
    pub unmatched_pred: Vec<T>,
}

/// Pairs equal items one-to-one (multiset intersection). Works for spans and
/// for `(label, text)` pairs alike.
pub fn match_spans<T: Clone + Eq + std::hash::Hash>(gold: &[T], pred: &[T]) -> SpanMatching<T> {
    let mut available: HashMap<&T, usize> = HashMap::new();
    for g in gold {
        *available.entry(g).or_insert(0) += 1;
    }
    let mut matched = Vec::new();
    let mut unmatched_pred = Vec::new();
    for p in pred {
        match available.get_mut(p) {
            Some(n) if *n > 0 => {
                *n -= 1;
                matched.push(p.clone());
            }
            _ => unmatched_pred.push(p.clone()),
        }
    }
    // gold left over after matching, first copies consumed first
    let mut consumed: HashMap<&T, usize> = HashMap::new();
    for m in &matched {
        *consumed.entry(m).or_insert(0) += 1;
    }
    let mut unmatched_gold = Vec::new();
    for g in gold {
        match consumed.get_mut(g) {
            Some(n) if *n > 0 => *n -= 1,
            _ => unmatched_gold.push(g.clone()),
        }
    }
    SpanMatching {
        matched,
        unmatched_gold,
        unmatched_pred,
    }
}

/// How category-grouped predictions are compared to gold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CategoryScoring {
    /// Resolved `(start, end, label)` triples, like every other format.
    #[default]
    Positional,
    /// `(label, mention text)` multisets, ignoring positions.
    Multiset,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(flatten)]
    pub counts: EvalCounts,
    pub per_label: BTreeMap<String, EvalCounts>,
}

impl EvalReport {
    pub fn from_per_label(per_label: BTreeMap<String, EvalCounts>) -> Self {
        let counts: EvalCounts = per_label.values().copied().sum();
        Self {
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
            counts,
            per_label,
        }
    }

    /// Aligned plain-text table: one row per label, then the micro totals.
    pub fn to_table(&self) -> String {
        let width = self
            .per_label
            .keys()
            .map(|k| k.chars().count())
            .chain([5])
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let row = |out: &mut String, name: &str, c: &EvalCounts| {
            let _ = writeln!(
                out,
                "{name:<width$}  {:>9.4}  {:>6.4}  {:>6.4}  {:>7}  {:>7}  {:>7}",
                c.precision(),
                c.recall(),
                c.f1(),
                c.tp,
                c.fp,
                c.fn_,
            );
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>6}  {:>6}  {:>7}  {:>7}  {:>7}",
            "label", "precision", "recall", "f1", "tp", "fp", "fn"
        );
        for (label, c) in &self.per_label {
            row(&mut out, label, c);
        }
        row(&mut out, "micro", &self.counts);
        out
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScoreError {
    #[error("prediction for unknown sentence id {0:?}")]
    MismatchedIds(String),
    #[error("sentence id {0:?} appears more than once")]
    DuplicateId(String),
}

fn tally<T: Clone + Eq + std::hash::Hash>(
    gold: &[T],
    pred: &[T],
    label_of: impl Fn(&T) -> &str,
    per_label: &mut BTreeMap<String, EvalCounts>,
) {
    let m = match_spans(gold, pred);
    let mut bump = |item: &T, f: fn(&mut EvalCounts)| {
        f(per_label.entry(label_of(item).to_string()).or_default());
    };
    for x in &m.matched {
        bump(x, |c| c.tp += 1);
    }
    for x in &m.unmatched_pred {
        bump(x, |c| c.fp += 1);
    }
    for x in &m.unmatched_gold {
        bump(x, |c| c.fn_ += 1);
    }
}

/// Per-label counts for one sentence. A missing prediction counts every gold
/// span as a miss.
pub fn score_sentence(
    gold: &AnnotatedSentence,
    pred: Option<&ParsedOutput>,
    mode: CategoryScoring,
) -> BTreeMap<String, EvalCounts> {
    let mut per_label = BTreeMap::new();
    let pred_spans: &[EntitySpan] = pred.map(|p| p.entities()).unwrap_or_default();
    match mode {
        CategoryScoring::Positional => tally(gold.entities(), pred_spans, |s| &s.label, &mut per_label),
        CategoryScoring::Multiset => {
            let index = TextIndex::new(gold.text());
            let pred_pairs: Vec<(String, String)> = pred_spans
                .iter()
                .map(|s| {
                    (
                        s.label.clone(),
                        index.slice(s.start, s.end).unwrap_or_default().to_string(),
                    )
                })
                .collect();
            tally(&category_mentions(gold), &pred_pairs, |(l, _)| l, &mut per_label);
        }
    }
    per_label
}

/// Micro scores over aligned `(gold, prediction)` pairs.
pub fn score_pairs<'a>(
    pairs: impl IntoIterator<Item = (&'a AnnotatedSentence, Option<&'a ParsedOutput>)>,
    mode: CategoryScoring,
) -> EvalReport {
    let mut per_label: BTreeMap<String, EvalCounts> = BTreeMap::new();
    for (gold, pred) in pairs {
        for (label, c) in score_sentence(gold, pred, mode) {
            *per_label.entry(label).or_default() += c;
        }
    }
    EvalReport::from_per_label(per_label)
}

/// Joins predictions to gold sentences by id and scores them.
pub fn score_corpus(
    gold: &[AnnotatedSentence],
    predictions: &[(String, ParsedOutput)],
    mode: CategoryScoring,
) -> Result<EvalReport, ScoreError> {
    let by_id = index_predictions(gold, predictions)?;
    Ok(score_pairs(gold.iter().map(|g| (g, by_id.get(g.id()).copied())), mode))
}

/// Checks ids on both sides and returns predictions keyed by sentence id.
pub fn index_predictions<'a>(
    gold: &[AnnotatedSentence],
    predictions: &'a [(String, ParsedOutput)],
) -> Result<HashMap<&'a str, &'a ParsedOutput>, ScoreError> {
    let mut gold_ids = HashSet::new();
    for g in gold {
        if !gold_ids.insert(g.id()) {
            return Err(ScoreError::DuplicateId(g.id().to_string()));
        }
    }
    let mut by_id = HashMap::new();
    for (id, p) in predictions {
        if !gold_ids.contains(id.as_str()) {
            return Err(ScoreError::MismatchedIds(id.clone()));
        }
        if by_id.insert(id.as_str(), p).is_some() {
            return Err(ScoreError::DuplicateId(id.clone()));
        }
    }
    Ok(by_id)
}
