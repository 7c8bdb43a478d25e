//! Phrase lexicons and token-boundary replacement.
//!
//! A lexicon maps match-phrases to replacements. Matching is
//! case-insensitive and anchored at token boundaries; replacement
//! preserves the casing of the first character of the matched text.
//! Within one sentence, occurrences are chosen greedily: longest match
//! first, leftmost first, never overlapping.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::Pcg32;
use crate::text::{atomize, Atom};

/// How a lexicon's columns are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Only match-phrase -> replacement.
    OneWay,
    /// Both columns match; each maps to the other.
    SwapBothWays,
}

/// One `phrase -> replacement` row as listed in the source file.
#[derive(Debug, Clone)]
pub struct LexiconEntry {
    pub phrase: String,
    pub replacement: String,
}

/// Pattern atom: the matchable skeleton of a phrase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum PatAtom {
    /// Lowercased word; matches a word atom case-insensitively.
    Word(String),
    /// Exact punctuation character.
    Punct(char),
    /// Matches any whitespace run.
    Space,
}

#[derive(Debug, Clone)]
struct Pattern {
    atoms: Vec<PatAtom>,
    replacement: String,
}

/// A compiled replacement dictionary.
#[derive(Debug, Clone)]
pub struct Lexicon {
    name: String,
    direction: Direction,
    entries: Vec<LexiconEntry>,
    patterns: Vec<Pattern>,
    /// First pattern atom -> pattern indices, longest pattern first.
    index: HashMap<PatAtom, Vec<usize>>,
}

fn phrase_atoms(phrase: &str) -> Vec<PatAtom> {
    atomize(phrase)
        .into_iter()
        .map(|(atom, _)| match atom {
            Atom::Word(w) => PatAtom::Word(w.to_lowercase()),
            Atom::Punct(c) => PatAtom::Punct(c),
            Atom::Space(_) => PatAtom::Space,
        })
        .collect()
}

impl Lexicon {
    /// Compiles `entries` into a matcher. Rejects empty or duplicate
    /// match-phrases (for swap-both-ways lexicons the replacement
    /// column is matchable too, but only listed phrases must be
    /// unique; a reversed phrase colliding with an earlier one is
    /// dropped, first mapping wins).
    pub fn new(
        name: impl Into<String>,
        direction: Direction,
        entries: Vec<LexiconEntry>,
    ) -> Result<Self> {
        let name = name.into();
        let mut patterns = Vec::new();
        let mut seen: HashSet<Vec<PatAtom>> = HashSet::new();
        for entry in &entries {
            let atoms = phrase_atoms(&entry.phrase);
            if !atoms.iter().any(|a| *a != PatAtom::Space) {
                return Err(Error::Parse {
                    path: name.clone().into(),
                    line: 0,
                    message: format!("empty match-phrase {:?}", entry.phrase),
                });
            }
            if !seen.insert(atoms.clone()) {
                return Err(Error::DuplicateEntry {
                    lexicon: name.clone(),
                    phrase: entry.phrase.clone(),
                });
            }
            patterns.push(Pattern {
                atoms,
                replacement: entry.replacement.clone(),
            });
        }
        if direction == Direction::SwapBothWays {
            for entry in &entries {
                let atoms = phrase_atoms(&entry.replacement);
                if !atoms.iter().any(|a| *a != PatAtom::Space) {
                    continue;
                }
                if seen.insert(atoms.clone()) {
                    patterns.push(Pattern {
                        atoms,
                        replacement: entry.phrase.clone(),
                    });
                }
            }
        }
        let mut index: HashMap<PatAtom, Vec<usize>> = HashMap::new();
        for (i, pattern) in patterns.iter().enumerate() {
            index.entry(pattern.atoms[0].clone()).or_default().push(i);
        }
        for bucket in index.values_mut() {
            // Longest first; listing order breaks length ties.
            bucket.sort_by_key(|&i| std::cmp::Reverse(patterns[i].atoms.len()));
        }
        Ok(Lexicon {
            name,
            direction,
            entries,
            patterns,
            index,
        })
    }

    /// Parses TSV content (`phrase<TAB>replacement` per line, `#`
    /// comments and blank lines ignored) and compiles it.
    pub fn parse_tsv(
        name: impl Into<String>,
        direction: Direction,
        content: &str,
    ) -> Result<Self> {
        let name = name.into();
        let mut entries = Vec::new();
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let phrase = fields.next().unwrap_or("").trim();
            let replacement = match fields.next() {
                Some(r) => r.trim(),
                None => {
                    return Err(Error::Parse {
                        path: name.clone().into(),
                        line: lineno + 1,
                        message: "expected phrase<TAB>replacement".to_string(),
                    })
                }
            };
            if fields.next().is_some() {
                return Err(Error::Parse {
                    path: name.clone().into(),
                    line: lineno + 1,
                    message: "more than two tab-separated fields".to_string(),
                });
            }
            if phrase.is_empty() {
                return Err(Error::Parse {
                    path: name.clone().into(),
                    line: lineno + 1,
                    message: "empty match-phrase".to_string(),
                });
            }
            entries.push(LexiconEntry {
                phrase: phrase.to_string(),
                replacement: replacement.to_string(),
            });
        }
        Lexicon::new(name, direction, entries)
    }

    /// Loads and compiles a lexicon file.
    pub fn load(path: &Path, direction: Direction) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Lexicon::parse_tsv(path.display().to_string(), direction, &content)
    }

    /// Lexicon name (file path or registry id).
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Reading direction.
    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Rows as listed (excluding reversed forms).
    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    /// Number of distinct matchable phrases (including reversed forms
    /// for swap-both-ways lexicons).
    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }
}

fn atom_matches(pat: &PatAtom, atom: &Atom<'_>) -> bool {
    match (pat, atom) {
        (PatAtom::Word(p), Atom::Word(w)) => w.to_lowercase() == *p,
        (PatAtom::Punct(p), Atom::Punct(c)) => p == c,
        (PatAtom::Space, Atom::Space(_)) => true,
        _ => false,
    }
}

/// True for replacements whose casing is semantic rather than
/// stylistic: at least two cased characters, all uppercase (`ASAP`).
fn is_acronym(text: &str) -> bool {
    let cased: Vec<char> = text
        .chars()
        .filter(|c| c.is_uppercase() || c.is_lowercase())
        .collect();
    cased.len() >= 2 && cased.iter().all(|c| c.is_uppercase())
}

/// Adjusts `replacement` so its first character mirrors the case of
/// the matched text's first character. Acronym replacements keep
/// their capitals even when the matched text was lowercase.
fn adapt_case(matched: &str, replacement: &str) -> String {
    let Some(first_matched) = matched.chars().next() else {
        return replacement.to_string();
    };
    let mut chars = replacement.chars();
    let Some(first_rep) = chars.next() else {
        return String::new();
    };
    let rest: String = chars.collect();
    if first_matched.is_uppercase() && first_rep.is_lowercase() {
        format!("{}{rest}", first_rep.to_uppercase())
    } else if first_matched.is_lowercase() && first_rep.is_uppercase() && !is_acronym(replacement)
    {
        format!("{}{rest}", first_rep.to_lowercase())
    } else {
        replacement.to_string()
    }
}

/// One located occurrence: atom span plus byte span and replacement.
struct Occurrence {
    end_atom: usize,
    byte_range: std::ops::Range<usize>,
    replacement: String,
}

fn find_at(
    lexicon: &Lexicon,
    atoms: &[(Atom<'_>, std::ops::Range<usize>)],
    i: usize,
    sentence: &str,
) -> Option<Occurrence> {
    let key = match &atoms[i].0 {
        Atom::Word(w) => PatAtom::Word(w.to_lowercase()),
        Atom::Punct(c) => PatAtom::Punct(*c),
        Atom::Space(_) => PatAtom::Space,
    };
    let bucket = lexicon.index.get(&key)?;
    'patterns: for &pi in bucket {
        let pattern = &lexicon.patterns[pi];
        let len = pattern.atoms.len();
        if i + len > atoms.len() {
            continue;
        }
        for (offset, pat) in pattern.atoms.iter().enumerate() {
            if !atom_matches(pat, &atoms[i + offset].0) {
                continue 'patterns;
            }
        }
        // Token boundaries: a word atom may not directly touch a word
        // atom outside the match.
        let starts_ok =
            i == 0 || !atoms[i - 1].0.is_word() || !atoms[i].0.is_word();
        let end = i + len;
        let ends_ok =
            end == atoms.len() || !atoms[end].0.is_word() || !atoms[end - 1].0.is_word();
        if !(starts_ok && ends_ok) {
            continue;
        }
        let byte_range = atoms[i].1.start..atoms[end - 1].1.end;
        let matched = &sentence[byte_range.clone()];
        return Some(Occurrence {
            end_atom: end,
            byte_range,
            replacement: adapt_case(matched, &pattern.replacement),
        });
    }
    None
}

/// Replaces occurrences of lexicon phrases in `sentence`.
///
/// Every maximal non-overlapping occurrence is independently replaced
/// with probability `p` (one draw per occurrence, in left-to-right
/// order); `None` replaces unconditionally without consuming draws.
/// Text outside occurrences is copied byte-identically.
pub fn apply_lexical(
    sentence: &str,
    lexicon: &Lexicon,
    p: Option<f64>,
    rng: &mut Pcg32,
) -> String {
    let atoms = atomize(sentence);
    let mut out = String::with_capacity(sentence.len());
    let mut copied = 0usize;
    let mut i = 0usize;
    while i < atoms.len() {
        if let Some(occ) = find_at(lexicon, &atoms, i, sentence) {
            let replace = match p {
                None => true,
                Some(p) => rng.bernoulli(p),
            };
            if replace {
                out.push_str(&sentence[copied..occ.byte_range.start]);
                out.push_str(&occ.replacement);
                copied = occ.byte_range.end;
            }
            // A declined occurrence still blocks overlapping matches.
            i = occ.end_atom;
        } else {
            i += 1;
        }
    }
    out.push_str(&sentence[copied..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(direction: Direction, rows: &[(&str, &str)]) -> Lexicon {
        let entries = rows
            .iter()
            .map(|(p, r)| LexiconEntry {
                phrase: p.to_string(),
                replacement: r.to_string(),
            })
            .collect();
        Lexicon::new("test", direction, entries).unwrap()
    }

    fn rng() -> Pcg32 {
        Pcg32::new(1, 1)
    }

    #[test]
    fn contracts_both_ways() {
        let l = lex(Direction::SwapBothWays, &[("I am", "I'm")]);
        assert_eq!(apply_lexical("I am here", &l, None, &mut rng()), "I'm here");
        assert_eq!(apply_lexical("I'm here", &l, None, &mut rng()), "I am here");
    }

    #[test]
    fn matches_phrases_with_periods() {
        let l = lex(Direction::SwapBothWays, &[("Monday", "Mon.")]);
        assert_eq!(apply_lexical("Monday", &l, None, &mut rng()), "Mon.");
        assert_eq!(apply_lexical("see you Mon. ok", &l, None, &mut rng()), "see you Monday ok");
    }

    #[test]
    fn zero_probability_is_identity() {
        let l = lex(Direction::OneWay, &[("there", "their")]);
        let s = "there is hope there";
        assert_eq!(apply_lexical(s, &l, Some(0.0), &mut rng()), s);
    }

    #[test]
    fn unit_probability_replaces_every_occurrence() {
        let l = lex(Direction::OneWay, &[("there", "their")]);
        assert_eq!(
            apply_lexical("there is hope there", &l, Some(1.0), &mut rng()),
            "their is hope their"
        );
    }

    #[test]
    fn respects_token_boundaries() {
        let l = lex(Direction::OneWay, &[("he", "she")]);
        assert_eq!(
            apply_lexical("he said the theme", &l, None, &mut rng()),
            "she said the theme"
        );
    }

    #[test]
    fn first_character_casing_is_preserved() {
        let l = lex(Direction::OneWay, &[("there", "their")]);
        assert_eq!(apply_lexical("There it is", &l, None, &mut rng()), "Their it is");
        let week = lex(Direction::SwapBothWays, &[("Monday", "Mon.")]);
        assert_eq!(apply_lexical("monday", &week, None, &mut rng()), "mon.");
    }

    #[test]
    fn longest_match_wins() {
        let l = lex(
            Direction::OneWay,
            &[("as soon", "QUICK"), ("as soon as possible", "ASAP")],
        );
        assert_eq!(
            apply_lexical("do it as soon as possible", &l, None, &mut rng()),
            "do it ASAP"
        );
    }

    #[test]
    fn occurrences_do_not_overlap_or_rescan() {
        // Replacement text is never rescanned: a->b, b->c must not chain.
        let l = lex(Direction::OneWay, &[("a", "b"), ("b", "c")]);
        assert_eq!(apply_lexical("a b", &l, None, &mut rng()), "b c");
    }

    #[test]
    fn flexible_whitespace_within_phrases() {
        let l = lex(Direction::OneWay, &[("I am", "I'm")]);
        assert_eq!(apply_lexical("I  am here", &l, None, &mut rng()), "I'm here");
    }

    #[test]
    fn duplicate_phrase_is_rejected_by_name() {
        let err = Lexicon::new(
            "dup",
            Direction::OneWay,
            vec![
                LexiconEntry { phrase: "Hi".into(), replacement: "a".into() },
                LexiconEntry { phrase: "hi".into(), replacement: "b".into() },
            ],
        )
        .unwrap_err();
        match err {
            Error::DuplicateEntry { phrase, .. } => assert_eq!(phrase, "hi"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn tsv_parse_errors_carry_line_numbers() {
        let content = "# comment\ngood\tfine\nbroken-line-without-tab\n";
        match Lexicon::parse_tsv("bad.tsv", Direction::OneWay, content).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn tsv_comments_and_blanks_are_ignored() {
        let content = "# heading\n\nthere\ttheir\n  # indented comment\nhere\thear\n";
        let l = Lexicon::parse_tsv("ok.tsv", Direction::OneWay, content).unwrap();
        assert_eq!(l.entries().len(), 2);
    }

    #[test]
    fn probability_draw_happens_per_occurrence() {
        let l = lex(Direction::OneWay, &[("x", "y")]);
        // With p = 0.5 and many occurrences, some but not all flip.
        let s = vec!["x"; 64].join(" ");
        let out = apply_lexical(&s, &l, Some(0.5), &mut rng());
        assert!(out.contains('y') && out.contains('x'));
    }
}
