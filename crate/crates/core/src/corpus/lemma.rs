//! Rule-based fallback lemmatizer for token lines that omit the lemma
//! column. Suffix stripping with undoubling and e-restoration, plus an
//! irregular table covering the frequent English verbs whose inflections
//! the rules cannot recover.

use super::MorphForm;

/// Irregular or rule-resistant verb forms: `(surface, lemma, morph)`.
/// `happen` and `open` are listed as identities so the `-en` rule does not
/// mangle them.
const IRREGULAR_VERBS: &[(&str, &str, MorphForm)] = &[
    ("added", "add", MorphForm::Past),
    ("adding", "add", MorphForm::PresentParticiple),
    ("became", "become", MorphForm::Past),
    ("becoming", "become", MorphForm::PresentParticiple),
    ("brought", "bring", MorphForm::Past),
    ("built", "build", MorphForm::Past),
    ("came", "come", MorphForm::Past),
    ("changed", "change", MorphForm::Past),
    ("changing", "change", MorphForm::PresentParticiple),
    ("determined", "determine", MorphForm::Past),
    ("determining", "determine", MorphForm::PresentParticiple),
    ("drawn", "draw", MorphForm::PastParticiple),
    ("drew", "draw", MorphForm::Past),
    ("fell", "fall", MorphForm::Past),
    ("gave", "give", MorphForm::Past),
    ("going", "go", MorphForm::PresentParticiple),
    ("gone", "go", MorphForm::PastParticiple),
    ("grew", "grow", MorphForm::Past),
    ("grown", "grow", MorphForm::PastParticiple),
    ("happen", "happen", MorphForm::Infinitive),
    ("held", "hold", MorphForm::Past),
    ("indicated", "indicate", MorphForm::Past),
    ("indicating", "indicate", MorphForm::PresentParticiple),
    ("kept", "keep", MorphForm::Past),
    ("knew", "know", MorphForm::Past),
    ("known", "know", MorphForm::PastParticiple),
    ("lain", "lie", MorphForm::PastParticiple),
    ("lay", "lie", MorphForm::Past),
    ("led", "lead", MorphForm::Past),
    ("left", "leave", MorphForm::Past),
    ("lied", "lie", MorphForm::Past),
    ("lost", "lose", MorphForm::Past),
    ("lying", "lie", MorphForm::PresentParticiple),
    ("meant", "mean", MorphForm::Past),
    ("met", "meet", MorphForm::Past),
    ("open", "open", MorphForm::Infinitive),
    ("paid", "pay", MorphForm::Past),
    ("raised", "raise", MorphForm::Past),
    ("raising", "raise", MorphForm::PresentParticiple),
    ("ran", "run", MorphForm::Past),
    ("required", "require", MorphForm::Past),
    ("requiring", "require", MorphForm::PresentParticiple),
    ("rose", "rise", MorphForm::Past),
    ("sat", "sit", MorphForm::Past),
    ("saw", "see", MorphForm::Past),
    ("seen", "see", MorphForm::PastParticiple),
    ("sent", "send", MorphForm::Past),
    ("shown", "show", MorphForm::PastParticiple),
    ("spoke", "speak", MorphForm::Past),
    ("spoken", "speak", MorphForm::PastParticiple),
    ("stood", "stand", MorphForm::Past),
    ("struck", "strike", MorphForm::Past),
    ("thought", "think", MorphForm::Past),
    ("told", "tell", MorphForm::Past),
    ("took", "take", MorphForm::Past),
    ("went", "go", MorphForm::Past),
    ("written", "write", MorphForm::PastParticiple),
    ("wrote", "write", MorphForm::Past),
];

/// Deterministic lemma and morphological form for a surface token.
///
/// The morph form is derived only for tokens whose tag starts with `N`
/// (noun) or `V` (verb); other tags get the lowercased surface back with no
/// morph. Never fails: unrecognized shapes fall back to the identity lemma.
pub fn lemmatize_fallback(surface: &str, pos: &str) -> (String, Option<MorphForm>) {
    let lower = surface.to_lowercase();
    match pos.chars().next().map(|c| c.to_ascii_uppercase()) {
        Some('N') => {
            let (lemma, morph) = noun_lemma(&lower);
            (lemma, Some(morph))
        }
        Some('V') => {
            let (lemma, morph) = verb_lemma(&lower);
            (lemma, Some(morph))
        }
        _ => (lower, None),
    }
}

fn noun_lemma(s: &str) -> (String, MorphForm) {
    if s.len() > 4 && s.ends_with("ies") {
        return (format!("{}y", &s[..s.len() - 3]), MorphForm::Plural);
    }
    if s.len() > 3 && s.ends_with("es") && sibilant_final(&s[..s.len() - 2]) {
        return (s[..s.len() - 2].to_string(), MorphForm::Plural);
    }
    if s.len() > 2 && s.ends_with('s') && !s.ends_with("ss") {
        return (s[..s.len() - 1].to_string(), MorphForm::Plural);
    }
    (s.to_string(), MorphForm::Singular)
}

fn verb_lemma(s: &str) -> (String, MorphForm) {
    if let Ok(i) = IRREGULAR_VERBS.binary_search_by(|probe| probe.0.cmp(s)) {
        let (_, lemma, morph) = IRREGULAR_VERBS[i];
        return (lemma.to_string(), morph);
    }
    if s.len() > 4 && s.ends_with("ies") {
        return (format!("{}y", &s[..s.len() - 3]), MorphForm::Present3sg);
    }
    if s.len() > 3 && s.ends_with("es") && sibilant_final(&s[..s.len() - 2]) {
        return (s[..s.len() - 2].to_string(), MorphForm::Present3sg);
    }
    if s.len() > 2 && s.ends_with('s') && !s.ends_with("ss") {
        return (s[..s.len() - 1].to_string(), MorphForm::Present3sg);
    }
    if s.len() > 4 && s.ends_with("ied") {
        return (format!("{}y", &s[..s.len() - 3]), MorphForm::Past);
    }
    if s.len() > 4 && s.ends_with("ed") {
        return (fix_stem(&s[..s.len() - 2]), MorphForm::Past);
    }
    if s.len() > 5 && s.ends_with("ing") {
        return (fix_stem(&s[..s.len() - 3]), MorphForm::PresentParticiple);
    }
    if s.len() > 4 && s.ends_with("en") {
        return (fix_stem(&s[..s.len() - 2]), MorphForm::PastParticiple);
    }
    (s.to_string(), MorphForm::Infinitive)
}

fn sibilant_final(stem: &str) -> bool {
    stem.ends_with("ss")
        || stem.ends_with('x')
        || stem.ends_with('z')
        || stem.ends_with("ch")
        || stem.ends_with("sh")
        || stem.ends_with('o')
}

/// Repair a stem after stripping `-ed`/`-ing`/`-en`: undo consonant
/// doubling, then restore a dropped final `e` where English regularly
/// requires one.
fn fix_stem(stem: &str) -> String {
    let chars: Vec<char> = stem.chars().collect();
    let n = chars.len();
    if n >= 2
        && chars[n - 1] == chars[n - 2]
        && is_consonant(chars[n - 1])
        && !matches!(chars[n - 1], 'l' | 's' | 'z' | 'f')
    {
        return stem[..stem.len() - 1].to_string();
    }
    if needs_final_e(&chars) {
        return format!("{stem}e");
    }
    stem.to_string()
}

fn needs_final_e(chars: &[char]) -> bool {
    let n = chars.len();
    let last = match chars.last() {
        Some(&c) => c,
        None => return false,
    };
    // Bare -u, -v, -c hardly ever end an English verb stem.
    if matches!(last, 'u' | 'v' | 'c') {
        return true;
    }
    // A single-letter vowel nucleus closed by exactly one consonant
    // (like/lose/take shapes). Longer nuclei (look, wait) and clusters
    // (help, turn) keep their bare form.
    if !is_consonant(last) || matches!(last, 'w' | 'x' | 'y') {
        return false;
    }
    if n < 3 || is_consonant(chars[n - 2]) || !is_consonant(chars[n - 3]) {
        return false;
    }
    // The nucleus must be the stem's only vowel run.
    let runs = chars
        .iter()
        .enumerate()
        .filter(|&(i, &c)| !is_consonant(c) && (i == 0 || is_consonant(chars[i - 1])))
        .count();
    runs == 1
}

fn is_consonant(c: char) -> bool {
    c.is_ascii_alphabetic() && !matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}
