//! Synthetic corpus generators shared by the integration suites.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use wsd_core::corpus::Dataset;

/// Four senses, each marked by a dedicated keyword present in every one of
/// its sentences and nowhere else. Perfectly separable by the surrounding
/// words source once the keyword clears the selection thresholds.
pub fn unique_keyword_corpus_text(per_sense: usize) -> String {
    let mut text = String::new();
    for sense in 1..=4 {
        for i in 0..per_sense {
            text.push_str(&format!(
                "%% id=s{sense}x{i} word=interest pos=N target=3 sense={sense} morph=singular\n"
            ));
            for word in ["the", &format!("marker{sense}"), "of", "interest", "here"] {
                let tag = if word == "interest" { "NN" } else { "XX" };
                text.push_str(&format!("{word}\t{tag}\t{word}\n"));
            }
            text.push('\n');
        }
    }
    text
}

/// Minimal records realizing an exact sense histogram; sense inventory
/// order follows the listed order.
pub fn sense_histogram_corpus(counts: &[(&str, usize)]) -> Dataset {
    let mut text = String::new();
    let mut serial = 0usize;
    for (sense, count) in counts {
        for _ in 0..*count {
            text.push_str(&format!(
                "%% id=h{serial} word=interest pos=N target=1 sense={sense} morph=singular\n\
                 the\tDT\tthe\ninterest\tNN\tinterest\nrose\tVBD\trise\n\n"
            ));
            serial += 1;
        }
    }
    Dataset::parse(&text).unwrap()
}

const COMMON_WORDS: [&str; 40] = [
    "the", "a", "of", "in", "to", "and", "on", "for", "with", "that", "bank", "year", "company",
    "market", "new", "high", "low", "last", "week", "price", "share", "money", "group", "firm",
    "time", "report", "more", "other", "percent", "value", "sale", "deal", "plan", "fund", "debt",
    "cost", "gain", "loss", "term", "level",
];

const SENSE_WORDS: [[&str; 6]; 6] = [
    [
        "attention",
        "curiosity",
        "keen",
        "attracted",
        "expressed",
        "shown",
    ],
    [
        "quality",
        "causing",
        "appeal",
        "charm",
        "fascination",
        "draw",
    ],
    [
        "hobby", "activity", "pursuit", "pastime", "devoted", "subject",
    ],
    ["advantage", "favor", "benefit", "sake", "behalf", "welfare"],
    [
        "stake",
        "share",
        "equity",
        "holding",
        "acquiring",
        "minority",
    ],
    ["rate", "rates", "paid", "payments", "bonds", "lower"],
];

const SENSE_VERBS: [&str; 6] = ["show", "spark", "pursue", "serve", "acquire", "pay"];

fn tag_for(word: &str) -> &'static str {
    match word.len() % 5 {
        0 => "DT",
        1 => "JJ",
        2 => "NN",
        3 => "IN",
        _ => "RB",
    }
}

/// A noisy six-sense corpus shaped like a financial-news lexical sample:
/// skewed sense distribution, sense-flavored context words, a strong
/// right-neighbor collocation for the dominant sense, and occasional
/// verb-object bracketing.
pub fn interest_like_corpus(n: usize, seed: u64) -> Dataset {
    let weights = [361usize, 11, 67, 178, 499, 1253];
    let total: usize = weights.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();

    for serial in 0..n {
        // First six records fix the sense inventory order.
        let sense = if serial < 6 {
            serial
        } else {
            let mut pick = rng.gen_range(0..total);
            let mut chosen = 0;
            for (i, w) in weights.iter().enumerate() {
                if pick < *w {
                    chosen = i;
                    break;
                }
                pick -= w;
            }
            chosen
        };

        let mut words: Vec<String> = Vec::new();
        let mut tags: Vec<&str> = Vec::new();
        let mut lemmas: Vec<String> = Vec::new();
        let mut ngs: Vec<(usize, usize)> = Vec::new();

        let push = |words: &mut Vec<String>,
                    tags: &mut Vec<&str>,
                    lemmas: &mut Vec<String>,
                    w: &str,
                    t: &'static str| {
            words.push(w.to_string());
            tags.push(t);
            lemmas.push(w.to_lowercase());
        };

        for _ in 0..rng.gen_range(2..8) {
            let w = COMMON_WORDS[rng.gen_range(0..COMMON_WORDS.len())];
            push(&mut words, &mut tags, &mut lemmas, w, tag_for(w));
        }
        // Sense-flavored context word, usually present.
        if rng.gen_bool(0.7) {
            let w = SENSE_WORDS[sense][rng.gen_range(0..6)];
            push(&mut words, &mut tags, &mut lemmas, w, tag_for(w));
        }

        // Optional verb-object bracketing around the target.
        let bracketed = rng.gen_bool(0.3);
        if bracketed {
            let v = if rng.gen_bool(0.7) {
                SENSE_VERBS[sense]
            } else {
                "hold"
            };
            push(&mut words, &mut tags, &mut lemmas, v, "VBD");
            push(&mut words, &mut tags, &mut lemmas, "the", "DT");
        }
        let span_start = words.len() - usize::from(bracketed);
        let target = words.len();
        let plural = rng.gen_bool(0.2);
        words.push(if plural { "interests" } else { "interest" }.to_string());
        tags.push(if plural { "NNS" } else { "NN" });
        lemmas.push("interest".to_string());
        if bracketed {
            ngs.push((span_start, target));
        }

        // The dominant sense often shows up as "interest rate(s)".
        if sense == 5 && rng.gen_bool(0.5) {
            let w = if rng.gen_bool(0.5) { "rate" } else { "rates" };
            push(&mut words, &mut tags, &mut lemmas, w, "NN");
        }
        for _ in 0..rng.gen_range(2..8) {
            let w = COMMON_WORDS[rng.gen_range(0..COMMON_WORDS.len())];
            push(&mut words, &mut tags, &mut lemmas, w, tag_for(w));
        }

        text.push_str(&format!(
            "%% id=i{serial:05} word=interest pos=N target={target} sense={} morph={}\n",
            sense + 1,
            if plural { "plural" } else { "singular" }
        ));
        for i in 0..words.len() {
            text.push_str(&format!("{}\t{}\t{}\n", words[i], tags[i], lemmas[i]));
        }
        for (s, e) in &ngs {
            text.push_str(&format!("%NG {s} {e}\n"));
        }
        text.push('\n');
    }
    Dataset::parse(&text).unwrap()
}
