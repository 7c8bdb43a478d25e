//! Hard-negative generation for stress-testing alignment search.
//!
//! A hard negative is a minimal, meaning-changing edit of a genuine
//! target sentence: a different number, a flipped causal relation, or a
//! swapped named entity. Appending such candidates to the target pool
//! makes the retrieval task discriminate meaning rather than surface
//! form. All perturbers are deterministic rules driven by an explicit
//! random stream — no model inference is involved.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::{mix, Pcg32};
use crate::text::{atomize, Atom};

/// Attempts per requested variant before a perturber gives up on
/// producing something new (uniform redraws can repeat, so a bounded
/// retry budget is needed to fill the quota on rich sentences while
/// still terminating on poor ones).
const RETRY_FACTOR: usize = 5;

/// Default variants requested per perturber; with all three perturbers
/// at full quota the candidate pool grows by a factor of 43.
pub const DEFAULT_PER_PERTURBER: usize = 14;

// ---------------------------------------------------------------------
// Gazetteer
// ---------------------------------------------------------------------

/// One named entity and its category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GazetteerEntry {
    pub name: String,
    pub category: String,
}

/// A categorized list of proper names used by the entity perturber.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
}

impl Gazetteer {
    /// Parses `name<TAB>category` lines; `#` comments and blank lines
    /// are ignored. Duplicate names are rejected.
    pub fn parse(origin: impl Into<String>, content: &str) -> Result<Self> {
        let origin = origin.into();
        let mut entries: Vec<GazetteerEntry> = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let name = fields.next().unwrap_or("").trim();
            let category = match fields.next() {
                Some(c) => c.trim(),
                None => {
                    return Err(Error::Parse {
                        path: origin.clone().into(),
                        line: lineno + 1,
                        message: "expected name<TAB>category".to_string(),
                    })
                }
            };
            if fields.next().is_some() {
                return Err(Error::Parse {
                    path: origin.clone().into(),
                    line: lineno + 1,
                    message: "more than two tab-separated fields".to_string(),
                });
            }
            if name.is_empty() || category.is_empty() {
                return Err(Error::Parse {
                    path: origin.clone().into(),
                    line: lineno + 1,
                    message: "empty name or category".to_string(),
                });
            }
            if !seen.insert(name.to_string()) {
                return Err(Error::Parse {
                    path: origin.clone().into(),
                    line: lineno + 1,
                    message: format!("duplicate entity name {name:?}"),
                });
            }
            entries.push(GazetteerEntry {
                name: name.to_string(),
                category: category.to_string(),
            });
        }
        Ok(Gazetteer { entries })
    }

    /// Loads a gazetteer from a TSV file.
    pub fn load(path: &Path) -> Result<Self> {
        let content =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
        Gazetteer::parse(path.display().to_string(), &content)
    }

    /// The bundled gazetteer (cities, people, countries).
    pub fn builtin() -> Self {
        Gazetteer::parse("builtin", include_str!("../../data/gazetteer.tsv"))
            .expect("bundled gazetteer is well-formed")
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

// ---------------------------------------------------------------------
// Casing and word-window matching helpers
// ---------------------------------------------------------------------

/// Transfers `template`'s casing onto `replacement`: an all-caps
/// template (two or more cased letters) uppercases the whole
/// replacement; a capitalized first letter carries over; anything else
/// leaves the replacement as written.
fn match_case(template: &str, replacement: &str) -> String {
    let cased: Vec<char> = template.chars().filter(|c| c.is_alphabetic()).collect();
    if cased.len() >= 2 && cased.iter().all(|c| c.is_uppercase()) {
        return replacement.to_uppercase();
    }
    let first_upper = template.chars().next().is_some_and(|c| c.is_uppercase());
    let mut chars = replacement.chars();
    match chars.next() {
        Some(c) if first_upper => c.to_uppercase().collect::<String>() + chars.as_str(),
        _ => replacement.to_string(),
    }
}

/// Byte ranges where `pattern` (one or more space-separated words)
/// occurs as whole words. `fold_case` lowercases both sides first.
fn word_match_ranges(sentence: &str, pattern: &str, fold_case: bool) -> Vec<std::ops::Range<usize>> {
    let atoms = atomize(sentence);
    let words: Vec<(usize, &str, std::ops::Range<usize>)> = atoms
        .iter()
        .enumerate()
        .filter_map(|(i, (a, r))| match a {
            Atom::Word(w) => Some((i, *w, r.clone())),
            _ => None,
        })
        .collect();
    let pat: Vec<String> = pattern
        .split_whitespace()
        .map(|w| if fold_case { w.to_lowercase() } else { w.to_string() })
        .collect();
    let mut ranges = Vec::new();
    'outer: for start in 0..words.len() {
        for (offset, pword) in pat.iter().enumerate() {
            let wi = start + offset;
            if wi >= words.len() {
                continue 'outer;
            }
            let text = if fold_case {
                words[wi].1.to_lowercase()
            } else {
                words[wi].1.to_string()
            };
            if &text != pword {
                continue 'outer;
            }
            // Consecutive pattern words must be separated by
            // whitespace only.
            if offset > 0 {
                let prev_atom = words[wi - 1].0;
                let cur_atom = words[wi].0;
                let only_space = (prev_atom + 1..cur_atom)
                    .all(|k| matches!(atoms[k].0, Atom::Space(_)));
                if cur_atom == prev_atom + 1 || !only_space {
                    continue 'outer;
                }
            }
        }
        let end = words[start + pat.len() - 1].2.end;
        ranges.push(words[start].2.start..end);
    }
    ranges
}

// ---------------------------------------------------------------------
// Perturbers
// ---------------------------------------------------------------------

const NUMBER_WORDS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen",
    "eighteen", "nineteen", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
    "eighty", "ninety", "hundred", "thousand", "million", "billion",
];

/// Replaces a digit run with a same-length run that differs from it.
/// Multi-digit runs keep a nonzero leading digit when the original had
/// one.
fn replace_digit_run(run: &str, rng: &mut Pcg32) -> String {
    let bytes = run.as_bytes();
    let mut out: Vec<u8> = Vec::with_capacity(bytes.len());
    for (i, &b) in bytes.iter().enumerate() {
        let digit = if i == 0 && bytes.len() > 1 && b != b'0' {
            b'1' + rng.next_below(9) as u8
        } else {
            b'0' + rng.next_below(10) as u8
        };
        out.push(digit);
    }
    if out == bytes {
        let last = out.last_mut().expect("digit runs are nonempty");
        *last = b'0' + ((*last - b'0') + 1 + rng.next_below(9) as u8) % 10;
    }
    String::from_utf8(out).expect("digits are ascii")
}

/// Rewrites every number in `sentence` — digit runs and spelled-out
/// number words — to a different value of the same form. Returns
/// `None` when the sentence contains no number.
pub fn perturb_numbers(sentence: &str, rng: &mut Pcg32) -> Option<String> {
    let mut out = String::with_capacity(sentence.len());
    let mut changed = false;
    for (atom, range) in atomize(sentence) {
        match atom {
            Atom::Word(w) => {
                if w.chars().any(|c| c.is_ascii_digit()) {
                    // Replace each digit run inside the token, keeping
                    // any letters around it.
                    let mut rest = w;
                    while let Some(start) = rest.find(|c: char| c.is_ascii_digit()) {
                        out.push_str(&rest[..start]);
                        let after = &rest[start..];
                        let len = after
                            .find(|c: char| !c.is_ascii_digit())
                            .unwrap_or(after.len());
                        out.push_str(&replace_digit_run(&after[..len], rng));
                        changed = true;
                        rest = &after[len..];
                    }
                    out.push_str(rest);
                } else if let Some(idx) =
                    NUMBER_WORDS.iter().position(|n| *n == w.to_lowercase())
                {
                    let mut j = rng.next_below(NUMBER_WORDS.len() as u32 - 1) as usize;
                    if j >= idx {
                        j += 1;
                    }
                    out.push_str(&match_case(w, NUMBER_WORDS[j]));
                    changed = true;
                } else {
                    out.push_str(w);
                }
            }
            _ => out.push_str(&sentence[range]),
        }
    }
    changed.then_some(out)
}

/// Causal connectives paired with a contrastive or concessive
/// counterpart; swaps run in both directions.
const CONNECTIVE_PAIRS: &[(&str, &str)] = &[
    ("because", "although"),
    ("so", "but"),
    ("since", "even though"),
    ("therefore", "nevertheless"),
];

/// Swaps exactly one causal/contrastive connective (uniformly chosen
/// among all occurrences) for its counterpart. Returns `None` when the
/// sentence contains none of the listed connectives.
pub fn perturb_causality(sentence: &str, rng: &mut Pcg32) -> Option<String> {
    let mut candidates: Vec<(std::ops::Range<usize>, &str)> = Vec::new();
    for (a, b) in CONNECTIVE_PAIRS {
        for range in word_match_ranges(sentence, a, true) {
            candidates.push((range, *b));
        }
        for range in word_match_ranges(sentence, b, true) {
            candidates.push((range, *a));
        }
    }
    if candidates.is_empty() {
        return None;
    }
    candidates.sort_by_key(|(r, _)| r.start);
    let (range, replacement) = &candidates[rng.next_below(candidates.len() as u32) as usize];
    let mut out = sentence.to_string();
    out.replace_range(
        range.clone(),
        &match_case(&sentence[range.clone()], replacement),
    );
    Some(out)
}

/// Swaps one named entity — a gazetteer match anywhere, or a
/// capitalized non-sentence-initial token — for a different gazetteer
/// entry (same category when the original is a known entity). Returns
/// `Ok(None)` when the sentence offers no candidate.
pub fn perturb_entities(
    sentence: &str,
    gazetteer: &Gazetteer,
    rng: &mut Pcg32,
) -> Result<Option<String>> {
    if gazetteer.is_empty() {
        return Err(Error::config("entity perturbation needs a nonempty gazetteer"));
    }

    // Known entities first (leftmost, longest on overlap)...
    let mut known: Vec<(std::ops::Range<usize>, usize)> = Vec::new();
    for (idx, entry) in gazetteer.entries().iter().enumerate() {
        for range in word_match_ranges(sentence, &entry.name, false) {
            known.push((range, idx));
        }
    }
    known.sort_by(|(a, _), (b, _)| {
        a.start.cmp(&b.start).then(b.end.cmp(&a.end))
    });
    let mut accepted: Vec<(std::ops::Range<usize>, Option<usize>)> = Vec::new();
    for (range, idx) in known {
        if accepted
            .iter()
            .all(|(r, _)| range.end <= r.start || range.start >= r.end)
        {
            accepted.push((range, Some(idx)));
        }
    }

    // ...then unknown capitalized tokens (skipping the sentence-initial
    // word, pure pronoun "I", and anything containing a digit).
    let words: Vec<(&str, std::ops::Range<usize>)> = atomize(sentence)
        .into_iter()
        .filter_map(|(a, r)| match a {
            Atom::Word(w) => Some((w, r)),
            _ => None,
        })
        .collect();
    for (wi, (w, range)) in words.iter().enumerate() {
        if wi == 0 || *w == "I" {
            continue;
        }
        if !w.chars().next().is_some_and(|c| c.is_uppercase()) {
            continue;
        }
        if w.chars().any(|c| c.is_ascii_digit()) {
            continue;
        }
        if accepted
            .iter()
            .any(|(r, _)| range.start < r.end && r.start < range.end)
        {
            continue;
        }
        accepted.push((range.clone(), None));
    }
    accepted.sort_by_key(|(r, _)| r.start);

    // Attach a replacement pool to each candidate.
    let mut candidates: Vec<(std::ops::Range<usize>, Vec<usize>)> = Vec::new();
    for (range, entry_idx) in accepted {
        let original = &sentence[range.clone()];
        let pool: Vec<usize> = gazetteer
            .entries()
            .iter()
            .enumerate()
            .filter(|(j, e)| {
                e.name != original
                    && match entry_idx {
                        Some(i) => e.category == gazetteer.entries()[i].category && *j != i,
                        None => true,
                    }
            })
            .map(|(j, _)| j)
            .collect();
        if !pool.is_empty() {
            candidates.push((range, pool));
        }
    }
    if candidates.is_empty() {
        return Ok(None);
    }

    let (range, pool) = &candidates[rng.next_below(candidates.len() as u32) as usize];
    let entry = &gazetteer.entries()[pool[rng.next_below(pool.len() as u32) as usize]];
    let mut out = sentence.to_string();
    out.replace_range(range.clone(), &entry.name);
    Ok(Some(out))
}

// ---------------------------------------------------------------------
// Pool construction
// ---------------------------------------------------------------------

/// A target pool enlarged with per-sentence hard negatives.
#[derive(Debug, Clone)]
pub struct HardNegativeSet {
    /// The genuine targets, in input order.
    pub originals: Vec<String>,
    /// Distinct negatives per original (possibly empty for sentences
    /// immune to every perturber).
    pub negatives: Vec<Vec<String>>,
    /// Pool growth: `(originals + negatives) / originals`.
    pub factor: f64,
}

impl HardNegativeSet {
    /// Originals followed by all negatives, in order — the candidate
    /// pool laid out so gold indices stay `0..originals.len()`.
    pub fn augmented_pool(&self) -> Vec<String> {
        let mut pool = self.originals.clone();
        for negs in &self.negatives {
            pool.extend(negs.iter().cloned());
        }
        pool
    }

    pub fn total_negatives(&self) -> usize {
        self.negatives.iter().map(Vec::len).sum()
    }
}

/// Builds up to `per_perturber` distinct negatives per perturber for
/// every target.
///
/// Each target gets its own random stream keyed on its index, so the
/// output is independent of processing order. A perturber is redrawn
/// (within a bounded budget) when it reproduces an already-collected
/// variant; sentences a perturber cannot touch simply contribute fewer
/// negatives.
pub fn build_hard_negatives(
    targets: &[String],
    per_perturber: usize,
    seed: u64,
    gazetteer: &Gazetteer,
) -> Result<HardNegativeSet> {
    if per_perturber == 0 {
        return Err(Error::config("per_perturber must be >= 1"));
    }
    if targets.is_empty() {
        return Err(Error::empty("hard negatives of an empty target list"));
    }
    let mut negatives: Vec<Vec<String>> = Vec::with_capacity(targets.len());
    for (t, target) in targets.iter().enumerate() {
        let mut rng = Pcg32::new(seed, mix(seed, t as u64));
        let mut seen: HashSet<String> = HashSet::new();
        let mut kept: Vec<String> = Vec::new();
        for perturber in 0..3usize {
            let mut produced = 0usize;
            let mut attempts = 0usize;
            while produced < per_perturber && attempts < per_perturber * RETRY_FACTOR {
                attempts += 1;
                let variant = match perturber {
                    0 => perturb_numbers(target, &mut rng),
                    1 => perturb_causality(target, &mut rng),
                    _ => perturb_entities(target, gazetteer, &mut rng)?,
                };
                let Some(variant) = variant else { break };
                if variant != *target && seen.insert(variant.clone()) {
                    kept.push(variant);
                    produced += 1;
                }
            }
        }
        negatives.push(kept);
    }
    let total: usize = negatives.iter().map(Vec::len).sum();
    let factor = (targets.len() + total) as f64 / targets.len() as f64;
    Ok(HardNegativeSet {
        originals: targets.to_vec(),
        negatives,
        factor,
    })
}
