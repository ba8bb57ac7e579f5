mod common;

use std::sync::Arc;

use cpr::model::ProgramInput;
use cpr::perturb::{
    generate_perturbations, random_delete, random_insert, random_swap, synonym_replace, AugmentOp, IdentifierRenamer,
    Lexicon, PerturbationConfig, Perturber, StubTranslator,
};
use cpr::tokenizer::{tokenize_code, tokenize_comment, Language, Stopwords, TokenSequence};
use common::rng;
use proptest::prelude::*;

fn words(texts: &[&str]) -> TokenSequence {
    TokenSequence::comment_from_texts(texts, Stopwords::bundled())
}

#[test]
fn synonym_replacement_is_uniform_over_positions() {
    let heads: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
    let syns: Vec<String> = (0..10).map(|i| format!("s{i}")).collect();
    let pairs: Vec<(&str, Vec<&str>)> = heads.iter().zip(&syns).map(|(h, s)| (h.as_str(), vec![s.as_str()])).collect();
    let lex = Lexicon::from_pairs(pairs.iter().map(|(h, s)| (*h, s.as_slice())));
    let seq = words(&heads.iter().map(String::as_str).collect::<Vec<_>>());

    // Enumeration oracle: share of the C(10, 2) position pairs containing i.
    let mut containing = [0usize; 10];
    let mut total = 0;
    for a in 0..10 {
        for b in a + 1..10 {
            containing[a] += 1;
            containing[b] += 1;
            total += 1;
        }
    }

    let runs = 10_000;
    let mut replaced = [0usize; 10];
    for seed in 0..runs {
        let out = synonym_replace(&seq, 2, &lex, &mut rng(seed));
        assert_eq!(out.retained.iter().filter(|&&k| !k).count(), 2);
        for (i, &kept) in out.retained.iter().enumerate() {
            if !kept {
                replaced[i] += 1;
                assert_eq!(out.seq.tokens()[i].text, syns[i]);
            }
        }
    }
    for i in 0..10 {
        let expected = containing[i] as f64 / total as f64;
        let got = replaced[i] as f64 / runs as f64;
        assert!((got - expected).abs() <= 0.02, "position {i}: {got} vs {expected}");
    }
}

#[test]
fn single_word_insertion_picks_either_slot() {
    let lex = Lexicon::from_pairs([("fast", &["quick"][..])]);
    let seq = words(&["fast"]);
    let runs = 10_000u64;
    let mut before = 0;
    for seed in 0..runs {
        let out = random_insert(&seq, 1, &lex, &mut rng(seed));
        match out.seq.texts().as_slice() {
            ["quick", "fast"] => before += 1,
            ["fast", "quick"] => {}
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(out.retained, [true]);
    }
    // Two insertion slots, equally likely.
    let share = before as f64 / runs as f64;
    assert!((share - 0.5).abs() <= 0.02, "{share}");
}

#[test]
fn deletion_survivor_mean() {
    let texts: Vec<String> = (0..20).map(|i| format!("t{i}")).collect();
    let seq = TokenSequence::code_from_texts(&texts, Language::Other);
    let p: f64 = 0.3;
    let runs = 10_000u64;
    let total: usize = (0..runs)
        .map(|seed| random_delete(&seq, p, &mut rng(seed)).seq.len())
        .sum();
    let mean = total as f64 / runs as f64;
    // Binomial(20, 0.7) plus the keep-one correction when all are deleted.
    let expected = 20.0 * (1.0 - p) + p.powi(20);
    assert!((mean - expected).abs() <= 0.15, "{mean} vs {expected}");
    assert!((expected - 14.0).abs() < 1e-9);
}

#[test]
fn generated_deletion_keeps_expected_comment_share() {
    let comment: Vec<String> = (0..30).map(|i| format!("word{i}")).collect();
    let input = ProgramInput::new(
        tokenize_code("return x ;"),
        TokenSequence::comment_from_texts(&comment, Stopwords::bundled()),
    )
    .unwrap();
    let cfg = PerturbationConfig {
        alpha: 0.1,
        m_dist: 100,
        op: AugmentOp::RD,
        seed: 77,
        ..Default::default()
    };
    let samples = generate_perturbations(&input, &cfg).unwrap();
    assert_eq!(samples.len(), 100);
    let code_len = input.code().len();
    let kept: usize = samples
        .iter()
        .map(|s| s.retained_mask[code_len..].iter().filter(|&&k| k).count())
        .sum();
    let mean = kept as f64 / 100.0;
    assert!((mean - 27.0).abs() <= 0.6, "{mean}");
    for s in &samples {
        assert!(s.retained_mask[..code_len].iter().all(|&k| k));
        assert_eq!(s.code, *input.code());
    }
}

#[test]
fn generation_is_schedule_independent() {
    let input = ProgramInput::new(
        tokenize_code("for ( i = 0 ; i <= n ; i ++ ) total += a [ i ] ;"),
        tokenize_comment("sum the first n values, exclusive of n", Stopwords::bundled()),
    )
    .unwrap();
    for op in AugmentOp::ALL {
        let cfg = PerturbationConfig {
            alpha: 0.3,
            m_dist: 40,
            op,
            seed: 9,
            perturb_code: true,
            perturb_comment: true,
        };
        let p = Perturber::bundled();
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = serial.install(|| p.generate(&input, &cfg)).unwrap();
        let b = wide.install(|| p.generate(&input, &cfg)).unwrap();
        assert_eq!(a, b, "{op:?}");
        let reversed: Vec<_> = (0..cfg.m_dist).rev().map(|i| p.sample(&input, &cfg, i).unwrap()).collect();
        assert!(reversed.into_iter().rev().eq(a.into_iter()));
    }
}

#[test]
fn back_translation_examples() {
    let stub = StubTranslator::from_pairs([("maximum", "largest")]);
    let p = Perturber::new(Arc::new(Lexicon::bundled().clone()), Arc::new(IdentifierRenamer), Arc::new(stub));
    let input = ProgramInput::new(tokenize_code("x"), words(&["returns", "maximum", "value"])).unwrap();
    let cfg = PerturbationConfig {
        op: AugmentOp::BT,
        m_dist: 1,
        ..Default::default()
    };
    let s = p.sample(&input, &cfg, 0).unwrap();
    assert_eq!(s.comment.texts(), ["returns", "largest", "value"]);
    assert_eq!(s.retained_mask, [true, true, false, true]);

    let identity = Perturber::bundled().with_translator(Arc::new(StubTranslator::identity()));
    let s = identity.sample(&input, &cfg, 0).unwrap();
    assert_eq!(s.comment, *input.comment());
    assert!(s.retained_mask.iter().all(|&k| k));
}

#[test]
fn swap_forced_and_degenerate_cases() {
    let pair = words(&["alpha", "beta"]);
    for seed in 0..20 {
        assert_eq!(random_swap(&pair, 1, &mut rng(seed)).seq.texts(), ["beta", "alpha"]);
    }
    let one = words(&["alpha"]);
    assert_eq!(random_swap(&one, 5, &mut rng(0)).seq, one);
    let lex = Lexicon::bundled();
    assert!(random_insert(&words(&[]), 3, lex, &mut rng(0)).seq.is_empty());
    assert_eq!(random_delete(&pair, 1.0, &mut rng(3)).seq.len(), 1);
    assert_eq!(random_delete(&pair, 0.0, &mut rng(3)).seq, pair);
}

fn comment_strategy() -> impl Strategy<Value = String> {
    let vocab: Vec<&str> = vec![
        "the", "loop", "is", "exclusive", "of", "maximum", "value", "returns", "large", "fast", "count", "a", "end",
    ];
    prop::collection::vec(prop::sample::select(vocab), 0..20).prop_map(|w| w.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sample_invariants(
        comment in comment_strategy(),
        alpha in 0.0f64..=1.0,
        op in prop::sample::select(AugmentOp::ALL.to_vec()),
        seed in any::<u64>(),
    ) {
        let input = match ProgramInput::new(
            tokenize_code("if ( a <= b ) return a ;"),
            tokenize_comment(&comment, Stopwords::bundled()),
        ) {
            Ok(i) => i,
            Err(_) => return Ok(()),
        };
        let cfg = PerturbationConfig { alpha, m_dist: 3, op, seed, perturb_code: true, perturb_comment: true };
        for s in Perturber::bundled().generate(&input, &cfg).unwrap() {
            prop_assert_eq!(s.retained_mask.len(), input.len());
            let (code_mask, comment_mask) = s.retained_mask.split_at(input.code().len());
            for (orig, mask, out) in [
                (input.code(), code_mask, &s.code),
                (input.comment(), comment_mask, &s.comment),
            ] {
                for (t, &kept) in orig.tokens().iter().zip(mask) {
                    if kept {
                        prop_assert!(out.texts().contains(&t.text.as_str()));
                    }
                }
                match op {
                    AugmentOp::SR | AugmentOp::RS => prop_assert_eq!(out.len(), orig.len()),
                    AugmentOp::RI => prop_assert!(out.len() >= orig.len()),
                    AugmentOp::RD => prop_assert!(orig.is_empty() || !out.is_empty()),
                    AugmentOp::BT => {}
                }
                if op == AugmentOp::RS {
                    prop_assert!(mask.iter().all(|&k| k));
                }
            }
        }
    }
}
