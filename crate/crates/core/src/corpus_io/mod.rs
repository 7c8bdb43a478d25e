//! Corpus preparation: normalization, filtering, sentence splitting,
//! line-oriented text files, and the binary embedding format.
//!
//! The normalization pipeline runs in a fixed order — non-printable
//! removal, punctuation normalization, lowercasing — and is idempotent:
//! `preprocess(preprocess(s)) == preprocess(s)` for every input.

mod embeddings;

pub use embeddings::{read_embeddings, write_embeddings, SIDECAR_SUFFIX};

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Which normalization stages [`preprocess`] applies. All stages are on
/// by default; disabling one skips it without reordering the rest.
#[derive(Debug, Clone)]
pub struct PreprocessConfig {
    /// Strip control and zero-width characters.
    pub remove_nonprintable: bool,
    /// Map typographic punctuation to ASCII and collapse space runs.
    pub normalize_punctuation: bool,
    /// Lowercase the result.
    pub lowercase: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            remove_nonprintable: true,
            normalize_punctuation: true,
            lowercase: true,
        }
    }
}

/// Characters [`preprocess`] treats as non-printable: all Unicode
/// control characters plus the common zero-width/format set.
fn is_nonprintable(c: char) -> bool {
    c.is_control()
        || matches!(
            c,
            '\u{00AD}'          // soft hyphen
            | '\u{200B}'..='\u{200F}' // zero-width and directional marks
            | '\u{2028}'        // line separator
            | '\u{2029}'        // paragraph separator
            | '\u{2060}'        // word joiner
            | '\u{FEFF}' // byte-order mark
        )
}

/// The pinned punctuation normalization table (12 mappings):
///
/// | input                   | output |
/// |-------------------------|--------|
/// | U+201C left double quote  | `"`  |
/// | U+201D right double quote | `"`  |
/// | U+201E low double quote   | `"`  |
/// | U+00AB left guillemet     | `"`  |
/// | U+00BB right guillemet    | `"`  |
/// | U+2018 left single quote  | `'`  |
/// | U+2019 right single quote | `'`  |
/// | U+201A low single quote   | `'`  |
/// | U+2013 en dash            | `-`  |
/// | U+2014 em dash            | `-`  |
/// | U+2026 ellipsis           | `...`|
/// | U+00A0 no-break space     | ` `  |
fn normalize_punct_char(c: char, out: &mut String) {
    match c {
        '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{00AB}' | '\u{00BB}' => out.push('"'),
        '\u{2018}' | '\u{2019}' | '\u{201A}' => out.push('\''),
        '\u{2013}' | '\u{2014}' => out.push('-'),
        '\u{2026}' => out.push_str("..."),
        '\u{00A0}' => out.push(' '),
        other => out.push(other),
    }
}

/// Normalizes one sentence. Stage order is fixed: non-printable
/// removal, punctuation normalization (with space-run collapsing and
/// edge trimming), lowercasing. Idempotent for every configuration.
pub fn preprocess(sentence: &str, config: &PreprocessConfig) -> String {
    let mut s: String = if config.remove_nonprintable {
        sentence.chars().filter(|&c| !is_nonprintable(c)).collect()
    } else {
        sentence.to_string()
    };
    if config.normalize_punctuation {
        let mut mapped = String::with_capacity(s.len());
        for c in s.chars() {
            normalize_punct_char(c, &mut mapped);
        }
        let mut collapsed = String::with_capacity(mapped.len());
        let mut last_was_space = true; // swallows leading spaces
        for c in mapped.chars() {
            if c == ' ' {
                if !last_was_space {
                    collapsed.push(' ');
                }
                last_was_space = true;
            } else {
                collapsed.push(c);
                last_was_space = false;
            }
        }
        while collapsed.ends_with(' ') {
            collapsed.pop();
        }
        s = collapsed;
    }
    if config.lowercase {
        s = s.to_lowercase();
    }
    s
}

/// Keeps a sentence when at least `threshold` of its characters are
/// ASCII alphanumerics, spaces, or ASCII punctuation. Empty sentences
/// are always dropped.
pub fn filter_english(sentence: &str, threshold: f64) -> bool {
    let mut total = 0usize;
    let mut common = 0usize;
    for c in sentence.chars() {
        total += 1;
        if c.is_ascii_alphanumeric() || c == ' ' || c.is_ascii_punctuation() {
            common += 1;
        }
    }
    if total == 0 {
        return false;
    }
    common as f64 / total as f64 >= threshold
}

/// Replaces `<br>`, `<br/>` and `<br />` tags (case-insensitive, any
/// interior spacing) with newlines; everything else passes through
/// byte-identically.
pub fn replace_html_linebreaks(text: &str) -> String {
    let bytes = text.as_bytes();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    'outer: while i < bytes.len() {
        if bytes[i] == b'<' && i + 2 < bytes.len() {
            let b = bytes[i + 1].to_ascii_lowercase();
            let r = bytes[i + 2].to_ascii_lowercase();
            if b == b'b' && r == b'r' {
                let mut j = i + 3;
                while j < bytes.len() && (bytes[j] == b' ' || bytes[j] == b'\t') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'/' {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'>' {
                    out.push('\n');
                    i = j + 1;
                    continue 'outer;
                }
            }
        }
        // Safe: we only land on char boundaries because tags are ASCII.
        let c = text[i..].chars().next().expect("char boundary");
        out.push(c);
        i += c.len_utf8();
    }
    out
}

/// Token forms (final period stripped, lowercased) that never end a
/// sentence, shielding abbreviations from the splitter.
const PROTECTED_ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "vs", "e.g", "i.e", "etc", "inc",
    "ltd", "co", "fig", "eq", "approx", "dept", "est",
];

fn is_protected_abbreviation(token: &str) -> bool {
    let lower = token.to_lowercase();
    PROTECTED_ABBREVIATIONS.contains(&lower.as_str())
}

/// Splits text into sentences at `.`, `!` or `?` followed by
/// whitespace and an uppercase letter, opening quote, or digit.
/// Periods ending a protected abbreviation (`Mr.`, `Dr.`, `e.g.`, ...)
/// never split. Sentences are trimmed; all non-whitespace characters
/// are preserved.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if c == '.' || c == '!' || c == '?' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_whitespace() {
                j += 1;
            }
            let has_gap = j > i + 1;
            let starts_sentence = j < chars.len()
                && (chars[j].is_uppercase()
                    || chars[j].is_ascii_digit()
                    || matches!(chars[j], '"' | '\'' | '\u{201C}' | '\u{2018}' | '\u{00AB}'));
            let protected = c == '.' && {
                // Token ending at this period, e.g. `Mr` in `Mr.` or
                // `e.g` in `e.g.` (inner periods included).
                let mut k = i;
                while k > 0 && (chars[k - 1].is_alphanumeric() || chars[k - 1] == '.') {
                    k -= 1;
                }
                let token: String = chars[k..i].iter().collect();
                !token.is_empty() && is_protected_abbreviation(&token)
            };
            if has_gap && starts_sentence && !protected {
                let sentence: String = chars[start..=i].iter().collect();
                let sentence = sentence.trim().to_string();
                if !sentence.is_empty() {
                    sentences.push(sentence);
                }
                start = j;
                i = j;
                continue;
            }
        }
        i += 1;
    }
    let tail: String = chars[start..].iter().collect();
    let tail = tail.trim().to_string();
    if !tail.is_empty() {
        sentences.push(tail);
    }
    sentences
}

/// Reads a UTF-8, LF-delimited corpus, one sentence per line. A lone
/// trailing newline does not produce an empty final sentence; interior
/// empty lines are preserved to keep row alignment.
pub fn read_corpus(path: &Path) -> Result<Vec<String>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Utf8 {
        path: path.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })?;
    let mut lines: Vec<String> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect();
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    Ok(lines)
}

/// Writes a corpus as UTF-8 with LF line endings (one per sentence,
/// trailing newline included).
pub fn write_corpus(path: &Path, sentences: &[String]) -> Result<()> {
    let mut out = String::new();
    for s in sentences {
        out.push_str(s);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
