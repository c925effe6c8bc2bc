mod common;

use common::*;
use genner_core::analysis::{classify_corpus, classify_prediction, classify_sentence, Classification, ErrorType};
use genner_core::codecs::{decode, encode, DecodeOptions, OutputFormat};
use genner_core::io::{parse_conll, read_conll_columns, read_standoff_json};
use genner_core::model::{AnnotatedSentence, EntitySpan, LabelSchema, WarningCode};
use genner_core::promptgen::{build_instruction, symbolize_dataset, SymbolMode, DEFAULT_ALPHABET};

fn genia() -> LabelSchema {
    LabelSchema::builtin("genia").unwrap()
}

fn conll() -> LabelSchema {
    LabelSchema::builtin("conll2003").unwrap()
}

#[test]
fn genia_example_encodes_to_every_golden() {
    let sent = genia_sentence();
    for f in OutputFormat::ALL {
        let golden = read_fixture(&format!("genia_example/{f}.txt"));
        assert_eq!(encode(f, &genia(), &sent).unwrap(), golden, "{f}");
    }
}

#[test]
fn genia_goldens_decode_to_the_three_spans() {
    let sent = genia_sentence();
    for f in OutputFormat::ALL {
        let golden = read_fixture(&format!("genia_example/{f}.txt"));
        let p = decode(f, &genia(), GENIA_TEXT, &golden, &DecodeOptions::default());
        assert!(p.exact(), "{f}: {:?}", p.warnings());
        assert_eq!(p.entities(), sent.entities(), "{f}");
    }
}

#[test]
fn miscounted_offsets_disagree_with_the_sentence() {
    let printed = read_fixture("genia_example/offset-json.miscounted.txt");
    let strict = decode(
        OutputFormat::OffsetJson,
        &genia(),
        GENIA_TEXT,
        &printed,
        &DecodeOptions::default(),
    );
    assert_eq!(strict.entities(), &[EntitySpan::new(63, 67, "Protein")]);
    let codes: Vec<_> = strict.warnings().iter().map(|w| w.code).collect();
    assert_eq!(
        codes,
        [WarningCode::OffsetTextMismatch, WarningCode::OffsetTextMismatch]
    );

    let lenient = decode(
        OutputFormat::OffsetJson,
        &genia(),
        GENIA_TEXT,
        &printed,
        &DecodeOptions::default().lenient_offsets(),
    );
    assert_eq!(lenient.entities(), genia_sentence().entities());
}

#[test]
fn standoff_sample_holds_the_nested_example() {
    let c = read_standoff_json(sample("genia_example.jsonl")).unwrap();
    assert_eq!(c.sentences, vec![genia_sentence()]);
}

#[test]
fn havel_columns_read_to_three_spans() {
    let cols = "Havel B-PER\npraises O\nCzech B-MISC\nnative O\nAlbright B-PER\nas O\nfriend O\n. O\n";
    let c = parse_conll(cols, "havel").unwrap();
    assert_eq!(
        c.sentences[0].entities(),
        &[
            EntitySpan::new(0, 5, "PER"),
            EntitySpan::new(14, 19, "MISC"),
            EntitySpan::new(27, 35, "PER")
        ]
    );
    let bundled = read_conll_columns(sample("conll_sample.txt")).unwrap();
    assert_eq!(bundled.sentences.len(), 3);
    assert_eq!(bundled.sentences[0].entities(), c.sentences[0].entities());
}

#[test]
fn conll_inline_xml_prompt_is_byte_exact() {
    let expected = read_fixture("conll2003_inline_xml_prompt.txt");
    assert_eq!(build_instruction(OutputFormat::InlineXml, &conll()), expected);
}

#[test]
fn every_prompt_embeds_its_task_description() {
    for name in ["conll2003", "ontonotes5", "genia", "ace2005"] {
        let schema = LabelSchema::builtin(name).unwrap();
        for f in OutputFormat::ALL {
            let desc = read_fixture(&format!("task_descriptions/{f}.txt"));
            let prompt = build_instruction(f, &schema);
            assert!(prompt.starts_with(&desc), "{name} {f}");
            assert_eq!(
                prompt.matches('\n').count(),
                desc.matches('\n').count() + 4 + schema.len()
            );
        }
    }
}

#[test]
fn havel_symbolizes_to_the_reference_output() {
    let sent = AnnotatedSentence::new(
        "havel",
        HAVEL_TEXT,
        vec![
            EntitySpan::new(0, 5, "PER"),
            EntitySpan::new(14, 19, "MISC"),
            EntitySpan::new(27, 35, "PER"),
        ],
    )
    .unwrap();
    for mode in [SymbolMode::Se, SymbolMode::So] {
        let d = symbolize_dataset(std::slice::from_ref(&sent), &conll(), mode, DEFAULT_ALPHABET).unwrap();
        assert_eq!(
            d.examples[0].output,
            "<B>Havel</B> praises <D>Czech</D> native <B>Albright</B> as friend."
        );
        assert!(d
            .instruction
            .starts_with("Your task is to do sequence labeling with labels A, B, C, and D."));
    }
}

#[test]
fn error_rows_classify_to_their_names() {
    let gold = inter_gold();
    for (expected, pred) in inter_rows() {
        let records = classify_sentence(&gold, &pred, &conll());
        let kinds: Vec<ErrorType> = records.iter().map(|r| r.error_type).collect();
        if expected == ErrorType::OverlapWithGold {
            // the row also drops the MISC mention
            assert_eq!(kinds, [ErrorType::OverlapWithGold, ErrorType::OmittedMentions]);
            assert_eq!(records[1].mention, "French");
        } else {
            assert_eq!(kinds, [expected], "{expected:?}");
        }
    }
}

#[test]
fn single_prediction_examples() {
    let gold = inter_gold();
    let kind = |s: EntitySpan| match classify_prediction(&s, gold.entities(), &conll()) {
        Classification::Error { kind, .. } => Some(kind),
        Classification::Correct => None,
    };
    assert_eq!(kind(EntitySpan::new(0, 5, "LOC")), Some(ErrorType::WrongTypes));
    assert_eq!(kind(EntitySpan::new(39, 63, "PER")), Some(ErrorType::ContainGold));
    assert_eq!(kind(EntitySpan::new(56, 63, "PER")), Some(ErrorType::ContainedByGold));
    assert_eq!(kind(EntitySpan::new(22, 31, "MISC")), Some(ErrorType::CompletelyO));
    assert_eq!(kind(EntitySpan::new(48, 63, "PLAYER")), Some(ErrorType::OodTypes));
    assert_eq!(kind(EntitySpan::new(48, 63, "PER")), None);
}

#[test]
fn hallucinated_mention_carries_its_text() {
    let gold = inter_gold();
    let rows = inter_rows();
    let a = classify_corpus(rows.iter().map(|(_, p)| (&gold, Some(p))), &conll());
    let ood: Vec<_> = a
        .records
        .iter()
        .filter(|r| r.error_type == ErrorType::OodMentions)
        .collect();
    assert_eq!(ood.len(), 1);
    assert_eq!((ood[0].mention.as_str(), ood[0].label.as_str()), ("Milan", "ORG"));
    for t in ErrorType::ALL {
        assert!(a.distribution.count(t) >= 1, "{t:?}");
    }
    assert_eq!(a.distribution.total(), 9);
}
