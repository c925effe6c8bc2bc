//! Error taxonomy for predicted spans.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{AnnotatedSentence, EntitySpan, LabelSchema, ParsedOutput, WarningCode};
use crate::scoring::match_spans;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorType {
    /// Exact extents, label outside the schema.
    OodTypes,
    /// Exact extents, another schema label.
    WrongTypes,
    /// Prediction strictly encloses a gold mention.
    ContainGold,
    /// Prediction lies strictly inside a gold mention.
    ContainedByGold,
    OverlapWithGold,
    /// No overlap with any gold mention.
    CompletelyO,
    /// Predicted text that does not occur in the sentence.
    OodMentions,
    /// Gold mention with no prediction touching it.
    OmittedMentions,
}

impl ErrorType {
    pub const ALL: [ErrorType; 8] = [
        ErrorType::OodTypes,
        ErrorType::WrongTypes,
        ErrorType::ContainGold,
        ErrorType::ContainedByGold,
        ErrorType::OverlapWithGold,
        ErrorType::CompletelyO,
        ErrorType::OodMentions,
        ErrorType::OmittedMentions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorType::OodTypes => "ood-types",
            ErrorType::WrongTypes => "wrong-types",
            ErrorType::ContainGold => "contain-gold",
            ErrorType::ContainedByGold => "contained-by-gold",
            ErrorType::OverlapWithGold => "overlap-with-gold",
            ErrorType::CompletelyO => "completely-o",
            ErrorType::OodMentions => "ood-mentions",
            ErrorType::OmittedMentions => "omitted-mentions",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            ErrorType::OodTypes => "OOD Types",
            ErrorType::WrongTypes => "Wrong Types",
            ErrorType::ContainGold => "Contain Gold",
            ErrorType::ContainedByGold => "Contained by Gold",
            ErrorType::OverlapWithGold => "Overlap with Gold",
            ErrorType::CompletelyO => "Completely-O",
            ErrorType::OodMentions => "OOD Mentions",
            ErrorType::OmittedMentions => "Omitted Mentions",
        }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Correct,
    Error {
        kind: ErrorType,
        /// The gold span the decision was made against, if any.
        gold: Option<EntitySpan>,
    },
}

/// Classifies one predicted span against the gold spans of its sentence.
///
/// Exact extents are checked first, then the gold with the largest character
/// overlap (earliest gold wins ties), then no overlap at all.
pub fn classify_prediction(pred: &EntitySpan, gold: &[EntitySpan], schema: &LabelSchema) -> Classification {
    let mut canonical: Vec<&EntitySpan> = gold.iter().collect();
    canonical.sort_by(|a, b| a.canonical_cmp(b));

    let same: Vec<&EntitySpan> = canonical.iter().copied().filter(|g| g.same_extent(pred)).collect();
    if let Some(first) = same.first() {
        if same.iter().any(|g| g.label == pred.label) {
            return Classification::Correct;
        }
        let kind = if schema.contains(&pred.label) {
            ErrorType::WrongTypes
        } else {
            ErrorType::OodTypes
        };
        return Classification::Error {
            kind,
            gold: Some((*first).clone()),
        };
    }

    let best = canonical
        .iter()
        .copied()
        .filter(|g| g.overlaps(pred))
        .fold(None::<&EntitySpan>, |best, g| match best {
            Some(b) if b.overlap(pred) >= g.overlap(pred) => Some(b),
            _ => Some(g),
        });
    match best {
        Some(g) => {
            let kind = if pred.contains(g) {
                ErrorType::ContainGold
            } else if g.contains(pred) {
                ErrorType::ContainedByGold
            } else {
                ErrorType::OverlapWithGold
            };
            Classification::Error {
                kind,
                gold: Some(g.clone()),
            }
        }
        None => Classification::Error {
            kind: ErrorType::CompletelyO,
            gold: None,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub sentence_id: String,
    pub error_type: ErrorType,
    /// Offending prediction; absent for omitted and hallucinated mentions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction: Option<EntitySpan>,
    /// Related (or missed) gold span.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<EntitySpan>,
    /// Text of the prediction, the missed gold span, or the hallucination.
    pub mention: String,
    /// Label of the prediction, or of the missed gold span.
    pub label: String,
}

/// Error records for one sentence.
///
/// Every unmatched prediction yields one record. A gold span yields an
/// omission only if it is unmatched and no erroneous prediction overlaps it.
/// Mentions the decoder could not find in the text become `OodMentions`.
pub fn classify_sentence(gold: &AnnotatedSentence, pred: &ParsedOutput, schema: &LabelSchema) -> Vec<ErrorRecord> {
    let m = match_spans(gold.entities(), pred.entities());
    let text_of = |s: &EntitySpan| gold.mention(s).unwrap_or_default().to_string();
    let mut records = Vec::new();

    for p in &m.unmatched_pred {
        let (kind, related) = match classify_prediction(p, gold.entities(), schema) {
            // a repeat of a span that was already matched
            Classification::Correct => (
                ErrorType::OverlapWithGold,
                gold.entities().iter().find(|g| *g == p).cloned(),
            ),
            Classification::Error { kind, gold } => (kind, gold),
        };
        records.push(ErrorRecord {
            sentence_id: gold.id().to_string(),
            error_type: kind,
            prediction: Some(p.clone()),
            gold: related,
            mention: text_of(p),
            label: p.label.clone(),
        });
    }

    for w in pred
        .warnings()
        .iter()
        .filter(|w| w.code == WarningCode::MentionNotFound)
    {
        records.push(ErrorRecord {
            sentence_id: gold.id().to_string(),
            error_type: ErrorType::OodMentions,
            prediction: None,
            gold: None,
            mention: w.fragment.clone(),
            label: w.label.clone().unwrap_or_default(),
        });
    }

    for g in &m.unmatched_gold {
        if m.unmatched_pred.iter().any(|p| p.overlaps(g)) {
            continue;
        }
        records.push(ErrorRecord {
            sentence_id: gold.id().to_string(),
            error_type: ErrorType::OmittedMentions,
            prediction: None,
            gold: Some(g.clone()),
            mention: text_of(g),
            label: g.label.clone(),
        });
    }
    records
}

/// Error counts per type and their shares of the total.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ErrorDistribution {
    counts: BTreeMap<ErrorType, usize>,
}

impl ErrorDistribution {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ErrorRecord>) -> Self {
        let mut counts: BTreeMap<ErrorType, usize> = ErrorType::ALL.iter().map(|&t| (t, 0)).collect();
        for r in records {
            *counts.entry(r.error_type).or_insert(0) += 1;
        }
        Self { counts }
    }

    pub fn count(&self, kind: ErrorType) -> usize {
        self.counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Share of `kind` among all errors; 0 when there are none.
    pub fn proportion(&self, kind: ErrorType) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.count(kind) as f64 / t as f64,
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<18}  {:>7}  {:>10}\n", "error type", "count", "proportion");
        for t in ErrorType::ALL {
            out.push_str(&format!(
                "{:<18}  {:>7}  {:>10.4}\n",
                t.title(),
                self.count(t),
                self.proportion(t)
            ));
        }
        out.push_str(&format!("{:<18}  {:>7}\n", "total", self.total()));
        out
    }
}

impl Serialize for ErrorDistribution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let counts: BTreeMap<&str, usize> = ErrorType::ALL.iter().map(|&t| (t.as_str(), self.count(t))).collect();
        let props: BTreeMap<&str, f64> = ErrorType::ALL
            .iter()
            .map(|&t| (t.as_str(), self.proportion(t)))
            .collect();
        let mut s = serializer.serialize_struct("ErrorDistribution", 3)?;
        s.serialize_field("total", &self.total())?;
        s.serialize_field("counts", &counts)?;
        s.serialize_field("proportions", &props)?;
        s.end()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ErrorAnalysis {
    pub records: Vec<ErrorRecord>,
    pub distribution: ErrorDistribution,
}

/// Classifies every error over aligned `(gold, prediction)` pairs. A missing
/// prediction omits every gold span.
pub fn classify_corpus<'a>(
    pairs: impl IntoIterator<Item = (&'a AnnotatedSentence, Option<&'a ParsedOutput>)>,
    schema: &LabelSchema,
) -> ErrorAnalysis {
    let empty = ParsedOutput::new();
    let records: Vec<ErrorRecord> = pairs
        .into_iter()
        .flat_map(|(g, p)| classify_sentence(g, p.unwrap_or(&empty), schema))
        .collect();
    let distribution = ErrorDistribution::from_records(&records);
    ErrorAnalysis { records, distribution }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conll() -> LabelSchema {
        LabelSchema::builtin("conll2003").unwrap()
    }

    #[test]
    fn priority_exact_extent_first() {
        let gold = [EntitySpan::new(0, 5, "ORG")];
        let c = classify_prediction(&EntitySpan::new(0, 5, "LOC"), &gold, &conll());
        assert!(matches!(
            c,
            Classification::Error {
                kind: ErrorType::WrongTypes,
                ..
            }
        ));
        let c = classify_prediction(&EntitySpan::new(0, 5, "TEAM"), &gold, &conll());
        assert!(matches!(
            c,
            Classification::Error {
                kind: ErrorType::OodTypes,
                ..
            }
        ));
        assert_eq!(classify_prediction(&gold[0], &gold, &conll()), Classification::Correct);
    }

    #[test]
    fn largest_overlap_wins() {
        let gold = [EntitySpan::new(0, 4, "PER"), EntitySpan::new(5, 12, "PER")];
        let c = classify_prediction(&EntitySpan::new(2, 10, "PER"), &gold, &conll());
        assert_eq!(
            c,
            Classification::Error {
                kind: ErrorType::OverlapWithGold,
                gold: Some(gold[1].clone())
            }
        );
        // equal overlap goes to the earlier gold
        let c = classify_prediction(&EntitySpan::new(2, 7, "PER"), &gold, &conll());
        assert_eq!(
            c,
            Classification::Error {
                kind: ErrorType::OverlapWithGold,
                gold: Some(gold[0].clone())
            }
        );
    }

    #[test]
    fn empty_distribution_is_zero() {
        let d = ErrorDistribution::from_records(&[]);
        assert_eq!(d.total(), 0);
        assert!(ErrorType::ALL.iter().all(|&t| d.proportion(t) == 0.0));
    }

    #[test]
    fn repeated_correct_span_is_an_overlap_error() {
        let g = AnnotatedSentence::new("1", "Havel", vec![EntitySpan::new(0, 5, "PER")]).unwrap();
        let p = ParsedOutput::from_parts(vec![EntitySpan::new(0, 5, "PER"); 2], vec![]);
        let r = classify_sentence(&g, &p, &conll());
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].error_type, ErrorType::OverlapWithGold);
    }
}
