//! Character-level noise: fat-finger typos, leetspeak, and whitespace
//! perturbation.

use std::collections::HashMap;

use crate::rng::Pcg32;

/// Keyboard adjacency used by [`butter_fingers`]: lowercase letter ->
/// physically neighboring keys.
#[derive(Debug, Clone)]
pub struct KeyboardMap {
    map: HashMap<char, Vec<char>>,
}

impl KeyboardMap {
    /// Builds a map from `(key, neighbors)` rows.
    pub fn new(rows: &[(char, &[char])]) -> Self {
        KeyboardMap {
            map: rows.iter().map(|(c, n)| (*c, n.to_vec())).collect(),
        }
    }

    /// Standard QWERTY layout with diagonal neighbors.
    pub fn qwerty() -> Self {
        let rows: &[(char, &[char])] = &[
            ('a', &['q', 'w', 's', 'x', 'z']),
            ('b', &['v', 'g', 'h', 'n']),
            ('c', &['x', 'd', 'f', 'v']),
            ('d', &['s', 'e', 'r', 'f', 'c', 'x']),
            ('e', &['w', 's', 'd', 'r']),
            ('f', &['d', 'r', 't', 'g', 'v', 'c']),
            ('g', &['f', 't', 'y', 'h', 'b', 'v']),
            ('h', &['g', 'y', 'u', 'j', 'n', 'b']),
            ('i', &['u', 'j', 'k', 'o']),
            ('j', &['h', 'u', 'i', 'k', 'n', 'm']),
            ('k', &['j', 'i', 'o', 'l', 'm']),
            ('l', &['k', 'o', 'p']),
            ('m', &['n', 'j', 'k']),
            ('n', &['b', 'h', 'j', 'm']),
            ('o', &['i', 'k', 'l', 'p']),
            ('p', &['o', 'l']),
            ('q', &['w', 'a']),
            ('r', &['e', 'd', 'f', 't']),
            ('s', &['a', 'w', 'e', 'd', 'x', 'z']),
            ('t', &['r', 'f', 'g', 'y']),
            ('u', &['y', 'h', 'j', 'i']),
            ('v', &['c', 'f', 'g', 'b']),
            ('w', &['q', 'a', 's', 'e']),
            ('x', &['z', 's', 'd', 'c']),
            ('y', &['t', 'g', 'h', 'u']),
            ('z', &['a', 's', 'x']),
        ];
        KeyboardMap::new(rows)
    }

    /// Neighbor set for a (lowercase) key, if covered.
    pub fn neighbors(&self, c: char) -> Option<&[char]> {
        self.map.get(&c).map(|v| v.as_slice())
    }

    /// True when every ASCII letter `a..=z` has at least one neighbor.
    pub fn covers_ascii_lowercase(&self) -> bool {
        ('a'..='z').all(|c| self.map.get(&c).is_some_and(|n| !n.is_empty()))
    }
}

impl Default for KeyboardMap {
    fn default() -> Self {
        KeyboardMap::qwerty()
    }
}

/// Glyph substitutions used by [`leet`]: character -> lookalike glyphs
/// (digits, symbols, case flips).
#[derive(Debug, Clone)]
pub struct LeetMap {
    map: HashMap<char, Vec<char>>,
}

impl LeetMap {
    /// Builds a map from `(char, glyphs)` rows.
    pub fn new(rows: &[(char, &[char])]) -> Self {
        LeetMap {
            map: rows.iter().map(|(c, g)| (*c, g.to_vec())).collect(),
        }
    }

    /// Classic leetspeak: digit/symbol lookalikes where they exist,
    /// plus the case-flipped letter for every letter (both cases
    /// covered, so `love` can surface as `l0V3`).
    pub fn classic() -> Self {
        let specials: &[(char, &[char])] = &[
            ('a', &['4', '@']),
            ('b', &['8']),
            ('c', &['(']),
            ('e', &['3']),
            ('g', &['6', '9']),
            ('h', &['#']),
            ('i', &['1', '!']),
            ('l', &['1', '|']),
            ('o', &['0']),
            ('s', &['5', '$']),
            ('t', &['7', '+']),
            ('z', &['2']),
        ];
        let special: HashMap<char, &[char]> = specials.iter().copied().collect();
        let mut map = HashMap::new();
        for lower in 'a'..='z' {
            let upper = lower.to_ascii_uppercase();
            let mut lower_glyphs = vec![upper];
            let mut upper_glyphs = vec![lower];
            if let Some(extra) = special.get(&lower) {
                lower_glyphs.extend_from_slice(extra);
                upper_glyphs.extend_from_slice(extra);
            }
            map.insert(lower, lower_glyphs);
            map.insert(upper, upper_glyphs);
        }
        LeetMap { map }
    }

    /// Glyph set for a character, if covered.
    pub fn glyphs(&self, c: char) -> Option<&[char]> {
        self.map.get(&c).map(|v| v.as_slice())
    }
}

impl Default for LeetMap {
    fn default() -> Self {
        LeetMap::classic()
    }
}

/// Simulates fat-finger typos: each mapped alphabetic character is
/// independently replaced by a uniformly drawn keyboard neighbor with
/// probability `p` (uppercase input yields an uppercase neighbor).
/// Character count is preserved; unmapped characters pass through.
pub fn butter_fingers(sentence: &str, p: f64, keyboard: &KeyboardMap, rng: &mut Pcg32) -> String {
    let mut out = String::with_capacity(sentence.len());
    for c in sentence.chars() {
        let lower = c.to_ascii_lowercase();
        match keyboard.neighbors(lower) {
            Some(neighbors) if c.is_alphabetic() && !neighbors.is_empty() => {
                if rng.bernoulli(p) {
                    let pick = *rng.choose(neighbors);
                    out.push(if c.is_uppercase() {
                        pick.to_ascii_uppercase()
                    } else {
                        pick
                    });
                } else {
                    out.push(c);
                }
            }
            _ => out.push(c),
        }
    }
    out
}

/// Rewrites characters into leetspeak glyphs: each mapped character is
/// independently replaced by a uniformly drawn glyph with probability
/// `p`. Character count is preserved.
pub fn leet(sentence: &str, p: f64, map: &LeetMap, rng: &mut Pcg32) -> String {
    let mut out = String::with_capacity(sentence.len());
    for c in sentence.chars() {
        match map.glyphs(c) {
            Some(glyphs) if !glyphs.is_empty() => {
                if rng.bernoulli(p) {
                    out.push(*rng.choose(glyphs));
                } else {
                    out.push(c);
                }
            }
            _ => out.push(c),
        }
    }
    out
}

/// Perturbs spacing: each existing space is removed with probability
/// `p_remove`, and after each non-space character a space is inserted
/// with probability `p_add`. Inserted spaces never end up leading or
/// trailing, and the multiset of non-space characters is preserved.
pub fn whitespace_perturb(sentence: &str, p_add: f64, p_remove: f64, rng: &mut Pcg32) -> String {
    // (char, was_inserted) so we can trim inserted spaces off the end
    // without touching original whitespace.
    let mut out: Vec<(char, bool)> = Vec::with_capacity(sentence.len() + 4);
    for c in sentence.chars() {
        if c == ' ' {
            if !rng.bernoulli(p_remove) {
                out.push((c, false));
            }
        } else {
            out.push((c, false));
            if rng.bernoulli(p_add) {
                out.push((' ', true));
            }
        }
    }
    while out.last().is_some_and(|&(c, inserted)| c == ' ' && inserted) {
        out.pop();
    }
    out.into_iter().map(|(c, _)| c).collect()
}
