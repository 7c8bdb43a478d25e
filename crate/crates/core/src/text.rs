//! Shared tokenization primitives.
//!
//! All word-level operations in this crate agree on one boundary rule:
//! a word is a maximal run of alphanumeric characters, and everything
//! else (whitespace, punctuation, symbols) delimits. Lexical matching,
//! type/token statistics, and feature hashing all build on the atom
//! stream produced here so their notions of "token" never drift apart.

use std::ops::Range;

/// One lexical atom together with its byte span in the source string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom<'a> {
    /// Maximal alphanumeric run.
    Word(&'a str),
    /// Single non-alphanumeric, non-whitespace character.
    Punct(char),
    /// Maximal whitespace run.
    Space(&'a str),
}

impl Atom<'_> {
    /// True for [`Atom::Word`].
    pub fn is_word(&self) -> bool {
        matches!(self, Atom::Word(_))
    }

    /// True for [`Atom::Space`].
    pub fn is_space(&self) -> bool {
        matches!(self, Atom::Space(_))
    }
}

/// Splits `text` into atoms with their byte ranges, covering every
/// byte exactly once and in order.
pub fn atomize(text: &str) -> Vec<(Atom<'_>, Range<usize>)> {
    let mut atoms = Vec::new();
    let mut iter = text.char_indices().peekable();
    while let Some(&(start, c)) = iter.peek() {
        if c.is_alphanumeric() {
            let mut end = start + c.len_utf8();
            iter.next();
            while let Some(&(i, d)) = iter.peek() {
                if d.is_alphanumeric() {
                    end = i + d.len_utf8();
                    iter.next();
                } else {
                    break;
                }
            }
            atoms.push((Atom::Word(&text[start..end]), start..end));
        } else if c.is_whitespace() {
            let mut end = start + c.len_utf8();
            iter.next();
            while let Some(&(i, d)) = iter.peek() {
                if d.is_whitespace() {
                    end = i + d.len_utf8();
                    iter.next();
                } else {
                    break;
                }
            }
            atoms.push((Atom::Space(&text[start..end]), start..end));
        } else {
            iter.next();
            atoms.push((Atom::Punct(c), start..start + c.len_utf8()));
        }
    }
    atoms
}

/// Lowercased word tokens of `text`, in order. Whitespace and
/// punctuation delimit and are dropped.
pub fn word_tokens(text: &str) -> Vec<String> {
    atomize(text)
        .into_iter()
        .filter_map(|(atom, _)| match atom {
            Atom::Word(w) => Some(w.to_lowercase()),
            _ => None,
        })
        .collect()
}

/// FNV-1a over a byte string; the pinned stable hash used for feature
/// bucketing (never a platform- or version-dependent hasher).
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_cover_all_bytes_in_order() {
        let s = "I'm  fine, thanks — really!";
        let atoms = atomize(s);
        let mut pos = 0;
        for (_, range) in &atoms {
            assert_eq!(range.start, pos);
            pos = range.end;
        }
        assert_eq!(pos, s.len());
    }

    #[test]
    fn apostrophes_split_words() {
        let atoms = atomize("don't");
        let kinds: Vec<_> = atoms.iter().map(|(a, _)| a.clone()).collect();
        assert_eq!(
            kinds,
            vec![Atom::Word("don"), Atom::Punct('\''), Atom::Word("t")]
        );
    }

    #[test]
    fn word_tokens_lowercase_and_drop_punctuation() {
        assert_eq!(
            word_tokens("Hello, World! 42"),
            vec!["hello".to_string(), "world".to_string(), "42".to_string()]
        );
        assert!(word_tokens("  ... !! ").is_empty());
        assert!(word_tokens("").is_empty());
    }

    #[test]
    fn fnv1a64_reference_values() {
        // Published FNV-1a test vectors.
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x8594_4171_f739_67e8);
    }
}
