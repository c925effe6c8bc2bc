//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use genner_core::analysis::ErrorType;
use genner_core::codecs::{decode, DecodeOptions, OutputFormat};
use genner_core::model::{AnnotatedSentence, EntitySpan, LabelSchema, ParsedOutput};
use rand::seq::SliceRandom;
use rand::Rng;

pub const GENIA_TEXT: &str =
    "This is the first demonstration of a specific interaction with PU.1 on a myeloid PU.1 binding site.";
pub const INTER_TEXT: &str = "Inter will be without suspended French defender Joceyln Angloma.";
pub const HAVEL_TEXT: &str = "Havel praises Czech native Albright as friend.";

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn sample(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/samples").join(rel)
}

pub fn genia_sentence() -> AnnotatedSentence {
    AnnotatedSentence::new(
        "genia-example",
        GENIA_TEXT,
        vec![
            EntitySpan::new(63, 67, "Protein"),
            EntitySpan::new(73, 98, "DNA"),
            EntitySpan::new(81, 85, "Protein"),
        ],
    )
    .unwrap()
}

pub fn inter_gold() -> AnnotatedSentence {
    AnnotatedSentence::new(
        "inter",
        INTER_TEXT,
        vec![
            EntitySpan::new(0, 5, "ORG"),
            EntitySpan::new(32, 38, "MISC"),
            EntitySpan::new(48, 63, "PER"),
        ],
    )
    .unwrap()
}

/// Random laminar family over `units` positions: up to `max_spans` spans,
/// nesting depth at most `max_depth`. Spans are returned in unit indices.
pub fn random_laminar<R: Rng>(
    rng: &mut R,
    units: usize,
    max_spans: usize,
    max_depth: usize,
    labels: &[&str],
) -> Vec<(usize, usize, String)> {
    let mut out: BTreeSet<(usize, usize, String)> = BTreeSet::new();
    fill(rng, 0, units, 1, max_depth, max_spans, labels, &mut out);
    out.into_iter().collect()
}

#[allow(clippy::too_many_arguments)]
fn fill<R: Rng>(
    rng: &mut R,
    lo: usize,
    hi: usize,
    depth: usize,
    max_depth: usize,
    max_spans: usize,
    labels: &[&str],
    out: &mut BTreeSet<(usize, usize, String)>,
) {
    if depth > max_depth || hi <= lo || out.len() >= max_spans {
        return;
    }
    let n = rng.gen_range(0..=3usize);
    let mut cuts: Vec<usize> = (0..2 * n).map(|_| rng.gen_range(lo..=hi)).collect();
    cuts.sort_unstable();
    for pair in cuts.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == b || out.len() >= max_spans {
            continue;
        }
        let label = labels.choose(rng).unwrap().to_string();
        if !out.insert((a, b, label.clone())) {
            continue;
        }
        // sometimes stack a second label on the same extent
        if depth < max_depth && out.len() < max_spans && rng.gen_bool(0.1) {
            let other = labels.choose(rng).unwrap().to_string();
            if out.insert((a, b, other)) {
                fill(rng, a, b, depth + 2, max_depth, max_spans, labels, out);
                continue;
            }
        }
        fill(rng, a, b, depth + 1, max_depth, max_spans, labels, out);
    }
}

/// Characters used for generated words: letters, markup characters, JSON
/// specials and non-ASCII.
pub const WORD_CHARS: &[char] = &[
    'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'k', 'm', 'n', 'p', 'r', 's', 't', 'x', 'z', 'A', 'Q', '0', '7', '[', ']',
    '|', '<', '>', '\\', '/', '"', '{', '}', ',', ':', '.', 'é', 'ü', 'ß', 'Ω', '中', '文', '😀',
];

/// A sentence of distinct three-character words and a random laminar family
/// aligned to word boundaries. Every mention occurs exactly once in the text.
pub fn unique_word_sentence<R: Rng>(rng: &mut R, id: usize, schema: &LabelSchema) -> AnnotatedSentence {
    let n_words = rng.gen_range(1..=14);
    let mut seen = HashSet::new();
    let mut words = Vec::with_capacity(n_words);
    while words.len() < n_words {
        let w: String = (0..3).map(|_| *WORD_CHARS.choose(rng).unwrap()).collect();
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    let text = words.join(" ");
    let labels: Vec<&str> = schema.ids().collect();
    let word_spans = random_laminar(rng, n_words, 8, 3, &labels);
    // word i spans chars [4i, 4i + 3)
    let spans = word_spans
        .into_iter()
        .map(|(a, b, l)| EntitySpan::new(4 * a, 4 * b - 1, l))
        .collect();
    AnnotatedSentence::new(id.to_string(), text, spans).unwrap()
}

/// Arbitrary short string over a small alphabet (so mentions repeat) with a
/// random laminar family at character granularity.
pub fn dense_sentence<R: Rng>(rng: &mut R, id: usize, schema: &LabelSchema, max_len: usize) -> AnnotatedSentence {
    const POOL: &[char] = &['a', 'b', ' ', '[', ']', '|', '<', '>', '\\', 'é', '"', '/'];
    let len = rng.gen_range(1..=max_len);
    let text: String = (0..len).map(|_| *POOL.choose(rng).unwrap()).collect();
    let labels: Vec<&str> = schema.ids().collect();
    let spans = random_laminar(rng, len, 8, 3, &labels)
        .into_iter()
        .map(|(a, b, l)| EntitySpan::new(a, b, l))
        .collect();
    AnnotatedSentence::new(id.to_string(), text, spans).unwrap()
}

/// Random (possibly crossing) spans for formats that need no laminarity.
pub fn overlapping_sentence<R: Rng>(rng: &mut R, id: usize, schema: &LabelSchema) -> AnnotatedSentence {
    let base = unique_word_sentence(rng, id, schema);
    let len = base.char_len();
    let labels: Vec<&str> = schema.ids().collect();
    let mut set = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=8) {
        let a = rng.gen_range(0..len);
        let b = rng.gen_range(a + 1..=len);
        set.insert(EntitySpan::new(a, b, *labels.choose(rng).unwrap()));
    }
    base.with_entities(set.into_iter().collect()).unwrap()
}

/// Brute-force laminarity: every pair disjoint or nested.
pub fn laminar_oracle(spans: &[EntitySpan]) -> bool {
    spans.iter().all(|a| {
        spans
            .iter()
            .all(|b| a.end <= b.start || b.end <= a.start || a.contains(b) || b.contains(a))
    })
}

/// Exact-match counts by scanning with "used" flags, independent of the
/// library's matcher.
pub fn count_oracle(gold: &[EntitySpan], pred: &[EntitySpan]) -> (usize, usize, usize) {
    let mut used = vec![false; gold.len()];
    let mut tp = 0;
    for p in pred {
        for (i, g) in gold.iter().enumerate() {
            if !used[i] && g.start == p.start && g.end == p.end && g.label == p.label {
                used[i] = true;
                tp += 1;
                break;
            }
        }
    }
    (tp, pred.len() - tp, gold.len() - tp)
}

/// Micro P/R/F1 from summed counts, written out longhand.
pub fn prf_oracle(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let p = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let r = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Spans from BIO tags by an explicit state machine over token offsets.
pub fn bio_oracle(tokens: &[(&str, &str)]) -> Vec<EntitySpan> {
    enum State {
        Out,
        In { label: String, start: usize },
    }
    let mut spans = Vec::new();
    let mut state = State::Out;
    let mut pos = 0;
    let mut last_end = 0;
    for (i, (tok, tag)) in tokens.iter().enumerate() {
        if i > 0 {
            pos += 1;
        }
        let start = pos;
        pos += tok.chars().count();
        let (kind, label) = if *tag == "O" { ("O", "") } else { tag.split_at(1) };
        let label = label.trim_start_matches('-');
        state = match (state, kind) {
            (State::In { label: l, start: s }, "I") if l == label => State::In { label: l, start: s },
            (prev, k) => {
                if let State::In { label: l, start: s } = prev {
                    spans.push(EntitySpan::new(s, last_end, l));
                }
                if k == "O" {
                    State::Out
                } else {
                    State::In {
                        label: label.to_string(),
                        start,
                    }
                }
            }
        };
        last_end = pos;
    }
    if let State::In { label, start } = state {
        spans.push(EntitySpan::new(start, last_end, label));
    }
    spans.sort_by(|a, b| a.canonical_cmp(b));
    spans
}

/// Greedy-leftmost assignment checked against a brute-force search: for each
/// `(label, text)` group of size m, the lexicographically smallest choice of m
/// pairwise non-overlapping occurrences, enumerated over all substring
/// positions.
pub fn minimal_start_oracle(source: &str, text: &str, m: usize) -> Option<Vec<usize>> {
    let chars: Vec<char> = source.chars().collect();
    let t: Vec<char> = text.chars().collect();
    if t.is_empty() || t.len() > chars.len() {
        return if m == 0 { Some(vec![]) } else { None };
    }
    let positions: Vec<usize> = (0..=chars.len() - t.len())
        .filter(|&i| chars[i..i + t.len()] == t[..])
        .collect();
    fn search(positions: &[usize], width: usize, m: usize, after: usize, acc: &mut Vec<usize>) -> bool {
        if acc.len() == m {
            return true;
        }
        for &p in positions.iter().filter(|&&p| p >= after) {
            acc.push(p);
            if search(positions, width, m, p + width, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let mut acc = Vec::new();
    search(&positions, t.len(), m, 0, &mut acc).then_some(acc)
}

/// Corpus of 100 sentences in which 80 gold spans are predicted, 10 are
/// missed and 20 predictions are spurious, in shuffled order.
pub fn planted_score_corpus<R: Rng>(rng: &mut R) -> (Vec<AnnotatedSentence>, Vec<ParsedOutput>) {
    let mut kinds: Vec<u8> = [vec![0u8; 80], vec![1u8; 10], vec![2u8; 10]].concat();
    kinds.shuffle(rng);
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for (i, k) in kinds.into_iter().enumerate() {
        let text = "Havel praises Czech native";
        let per = EntitySpan::new(0, 5, "PER");
        let (g, p) = match k {
            0 => (vec![per.clone()], vec![per]),
            1 => (vec![per], vec![]),
            _ => (
                vec![],
                vec![EntitySpan::new(6, 13, "LOC"), EntitySpan::new(14, 19, "MISC")],
            ),
        };
        gold.push(AnnotatedSentence::new(i.to_string(), text, g).unwrap());
        pred.push(ParsedOutput::from_parts(p, vec![]));
    }
    (gold, pred)
}

/// Sentences each carrying exactly one planted error: `wrong` wrong-type
/// predictions, `spurious` predictions on entity-free text and `missed`
/// omissions.
pub fn planted_error_corpus<R: Rng>(
    rng: &mut R,
    wrong: usize,
    spurious: usize,
    missed: usize,
) -> (Vec<AnnotatedSentence>, Vec<ParsedOutput>) {
    let mut kinds: Vec<u8> = [vec![0u8; wrong], vec![1u8; spurious], vec![2u8; missed]].concat();
    kinds.shuffle(rng);
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for (i, k) in kinds.into_iter().enumerate() {
        let inter = EntitySpan::new(0, 5, "ORG");
        let angloma = EntitySpan::new(48, 63, "PER");
        let (g, p) = match k {
            0 => (
                vec![inter.clone(), angloma.clone()],
                vec![EntitySpan::new(0, 5, "LOC"), angloma],
            ),
            1 => (vec![inter.clone()], vec![inter, EntitySpan::new(22, 31, "MISC")]),
            _ => (vec![inter.clone(), angloma], vec![inter]),
        };
        gold.push(AnnotatedSentence::new(i.to_string(), INTER_TEXT, g).unwrap());
        pred.push(ParsedOutput::from_parts(p, vec![]));
    }
    (gold, pred)
}

/// Random gold/prediction pairs with known exact counts, for checking the
/// scorer against the counting oracle.
pub fn random_scored_corpus<R: Rng>(
    rng: &mut R,
    n: usize,
    schema: &LabelSchema,
) -> (Vec<AnnotatedSentence>, Vec<ParsedOutput>) {
    let gold: Vec<AnnotatedSentence> = (0..n).map(|i| unique_word_sentence(rng, i, schema)).collect();
    let labels: Vec<&str> = schema.ids().collect();
    let pred = gold
        .iter()
        .map(|s| {
            let mut spans: Vec<EntitySpan> = s.entities().iter().filter(|_| rng.gen_bool(0.75)).cloned().collect();
            let len = s.char_len();
            for _ in 0..rng.gen_range(0..3) {
                let a = rng.gen_range(0..len);
                spans.push(EntitySpan::new(
                    a,
                    rng.gen_range(a + 1..=len),
                    *labels.choose(rng).unwrap(),
                ));
            }
            if rng.gen_bool(0.1) {
                if let Some(e) = s.entities().first() {
                    spans.push(e.clone());
                }
            }
            ParsedOutput::from_parts(spans, vec![])
        })
        .collect();
    (gold, pred)
}

/// The eight rows of the error table, each a full prediction for the sentence.
pub fn inter_rows() -> Vec<(ErrorType, ParsedOutput)> {
    let inter = EntitySpan::new(0, 5, "ORG");
    let french = EntitySpan::new(32, 38, "MISC");
    let angloma = EntitySpan::new(48, 63, "PER");
    let p = |spans: Vec<EntitySpan>| ParsedOutput::from_parts(spans, vec![]);
    let hallucinated = {
        let out = "<ORG>Inter</ORG> will be without suspended <MISC>French</MISC> defender <PER>Joceyln Angloma</PER> <ORG>Milan</ORG>.";
        decode(
            OutputFormat::InlineXml,
            &LabelSchema::builtin("conll2003").unwrap(),
            INTER_TEXT,
            out,
            &DecodeOptions::default(),
        )
    };
    vec![
        (
            ErrorType::OodTypes,
            p(vec![inter.clone(), french.clone(), EntitySpan::new(48, 63, "PLAYER")]),
        ),
        (
            ErrorType::WrongTypes,
            p(vec![EntitySpan::new(0, 5, "LOC"), french.clone(), angloma.clone()]),
        ),
        (
            ErrorType::ContainGold,
            p(vec![inter.clone(), french.clone(), EntitySpan::new(39, 63, "PER")]),
        ),
        (
            ErrorType::ContainedByGold,
            p(vec![inter.clone(), french.clone(), EntitySpan::new(56, 63, "PER")]),
        ),
        (
            ErrorType::OverlapWithGold,
            p(vec![inter.clone(), EntitySpan::new(39, 55, "PER")]),
        ),
        (
            ErrorType::CompletelyO,
            p(vec![
                inter.clone(),
                EntitySpan::new(22, 31, "MISC"),
                french.clone(),
                angloma.clone(),
            ]),
        ),
        (ErrorType::OodMentions, hallucinated),
        (ErrorType::OmittedMentions, p(vec![inter, angloma])),
    ]
}
