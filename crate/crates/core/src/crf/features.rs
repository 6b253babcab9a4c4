//! Token feature catalog and the symmetric context window.
//!
//! Each token yields `name=value` strings for the catalog in
//! [`TOKEN_FEATURES`] plus `pos=<tag>`. Affix features are omitted when the
//! token is shorter than the affix. The window prefixes every feature of the
//! token at offset `d` with `w[d]:` and emits `w[d]:PAD` past either end.

use crate::corpus::{is_emoticon, TokenRecord};

/// Names of the per-token features, in emission order.
pub const TOKEN_FEATURES: [&str; 36] = [
    "lower", "root", "shape", "shape_short", "prefix1", "prefix2", "prefix3", "prefix4",
    "suffix1", "suffix2", "suffix3", "suffix4", "len", "is_len2", "is_len4", "sent_start",
    "sent_end", "has_upper", "all_lower", "all_upper", "init_cap", "has_digit", "is_digits",
    "len2_digits", "len4_digits", "has_dot", "has_hyphen", "has_paren", "has_punct",
    "has_symbol", "alnum_mix", "has_apostrophe", "is_emoticon", "is_mention", "is_hashtag",
    "is_url",
];

/// Half-width of the default five-token window.
pub const DEFAULT_HALF_WIDTH: usize = 2;

/// Crude stemmer: lowercase and drop one trailing `s`.
pub fn root(lower: &str) -> String {
    match lower.strip_suffix('s') {
        Some(stem) if !stem.is_empty() => stem.to_string(),
        _ => lower.to_string(),
    }
}

/// Character classes: `X` upper, `x` lower, `d` digit, `_` anything else.
pub fn word_shape(token: &str) -> String {
    token
        .chars()
        .map(|c| {
            if c.is_uppercase() {
                'X'
            } else if c.is_lowercase() {
                'x'
            } else if c.is_numeric() {
                'd'
            } else {
                '_'
            }
        })
        .collect()
}

pub fn collapse_runs(shape: &str) -> String {
    let mut out = String::with_capacity(shape.len());
    let mut last = None;
    for c in shape.chars() {
        if last != Some(c) {
            out.push(c);
        }
        last = Some(c);
    }
    out
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn is_symbol(c: char) -> bool {
    matches!(c, '$' | '%' | '&' | '*' | '+' | '<' | '=' | '>' | '^' | '|' | '~' | '@' | '#')
        || (!c.is_ascii() && !c.is_alphanumeric() && !c.is_whitespace())
}

/// Catalog features of the token at `i`, plus its POS.
pub fn extract_token_features(sentence: &[TokenRecord], i: usize) -> Vec<String> {
    let token = sentence[i].surface.as_str();
    let chars: Vec<char> = token.chars().collect();
    let n = chars.len();
    let lower = token.to_lowercase();
    let shape = word_shape(token);
    let alpha = chars.iter().filter(|c| c.is_alphabetic()).count();
    let digits = chars.iter().filter(|c| c.is_ascii_digit()).count();
    let all_digits = n > 0 && digits == n;
    let lower_tok = lower.as_str();

    let mut out = Vec::with_capacity(TOKEN_FEATURES.len() + 1);
    out.push(format!("lower={lower}"));
    out.push(format!("root={}", root(&lower)));
    out.push(format!("shape={shape}"));
    out.push(format!("shape_short={}", collapse_runs(&shape)));
    for k in 1..=4 {
        if n >= k {
            out.push(format!("prefix{k}={}", chars[..k].iter().collect::<String>()));
        }
    }
    for k in 1..=4 {
        if n >= k {
            out.push(format!("suffix{k}={}", chars[n - k..].iter().collect::<String>()));
        }
    }
    out.push(format!("len={n}"));
    let flags: [(&str, bool); 23] = [
        ("is_len2", n == 2),
        ("is_len4", n == 4),
        ("sent_start", i == 0),
        ("sent_end", i + 1 == sentence.len()),
        ("has_upper", chars.iter().any(|c| c.is_uppercase())),
        ("all_lower", alpha > 0 && chars.iter().filter(|c| c.is_alphabetic()).all(|c| c.is_lowercase())),
        ("all_upper", alpha > 0 && chars.iter().filter(|c| c.is_alphabetic()).all(|c| c.is_uppercase())),
        ("init_cap", chars.first().is_some_and(|c| c.is_uppercase())),
        ("has_digit", digits > 0),
        ("is_digits", all_digits),
        ("len2_digits", all_digits && n == 2),
        ("len4_digits", all_digits && n == 4),
        ("has_dot", token.contains('.')),
        ("has_hyphen", token.contains('-')),
        ("has_paren", chars.iter().any(|c| "()[]{}".contains(*c))),
        ("has_punct", chars.iter().any(|c| c.is_ascii_punctuation())),
        ("has_symbol", chars.iter().any(|&c| is_symbol(c))),
        ("alnum_mix", alpha > 0 && digits > 0),
        ("has_apostrophe", token.contains('\'') || token.contains('\u{2019}')),
        ("is_emoticon", is_emoticon(token)),
        ("is_mention", token.starts_with('@') && n > 1),
        ("is_hashtag", token.starts_with('#') && n > 1),
        (
            "is_url",
            lower_tok.starts_with("http://") || lower_tok.starts_with("https://") || lower_tok.starts_with("www."),
        ),
    ];
    for (name, on) in flags {
        out.push(format!("{name}={}", flag(on)));
    }
    out.push(format!("pos={}", sentence[i].pos));
    out
}

fn offset_label(d: isize) -> String {
    format!("w[{d}]:")
}

/// Features of positions `i - half_width ..= i + half_width`, each prefixed
/// with its offset; positions outside the sentence emit `w[d]:PAD`.
pub fn window_features(sentence: &[TokenRecord], i: usize, half_width: usize) -> Vec<String> {
    let hw = half_width as isize;
    let mut out = Vec::new();
    for d in -hw..=hw {
        let j = i as isize + d;
        let label = offset_label(d);
        if j < 0 || j >= sentence.len() as isize {
            out.push(format!("{label}PAD"));
            continue;
        }
        for f in extract_token_features(sentence, j as usize) {
            out.push(format!("{label}{f}"));
        }
    }
    out
}

/// Window features of every position. With `prev` set, each position also
/// gets `prevlevel=<tag>` from the tag sequence of the level below.
pub fn sentence_observations(
    sentence: &[TokenRecord],
    half_width: usize,
    prev: Option<&[String]>,
) -> Vec<Vec<String>> {
    (0..sentence.len())
        .map(|i| {
            let mut f = window_features(sentence, i, half_width);
            if let Some(tags) = prev {
                f.push(format!("prevlevel={}", tags[i]));
            }
            f
        })
        .collect()
}
