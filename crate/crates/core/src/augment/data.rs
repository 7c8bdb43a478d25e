//! Bundled default lexicons and the transformation registry.
//!
//! Lexicon data ships as TSV files compiled into the binary, so the
//! toolkit works out of the box; a data directory can override any
//! family's file (same names, `<id>.tsv`).

use std::path::Path;
use std::sync::Arc;

use super::lexicon::{Direction, Lexicon};
use super::transforms::{KeyboardMap, LeetMap};
use super::{TransformId, TransformKind, TransformSpec};
use crate::error::Result;

/// Default per-character/occurrence probabilities per family.
pub(crate) const DEFAULT_ABR1_P: f64 = 0.1;
pub(crate) const DEFAULT_FING_P: f64 = 0.05;
pub(crate) const DEFAULT_HOMO_P: f64 = 0.5;
pub(crate) const DEFAULT_LEET_P: f64 = 0.1;
pub(crate) const DEFAULT_SPAC_P_ADD: f64 = 0.05;
pub(crate) const DEFAULT_SPAC_P_REMOVE: f64 = 0.1;
pub(crate) const DEFAULT_SPEL_P: f64 = 0.2;

const LEXICON_FILES: &[(TransformId, &str)] = &[
    (TransformId::Abr1, include_str!("../../data/abr1.tsv")),
    (TransformId::Abr2, include_str!("../../data/abr2.tsv")),
    (TransformId::Abr3, include_str!("../../data/abr3.tsv")),
    (TransformId::Cont, include_str!("../../data/cont.tsv")),
    (TransformId::Dysl, include_str!("../../data/dysl.tsv")),
    (TransformId::Homo, include_str!("../../data/homo.tsv")),
    (TransformId::Slng, include_str!("../../data/slng.tsv")),
    (TransformId::Spel, include_str!("../../data/spel.tsv")),
    (TransformId::Week, include_str!("../../data/week.tsv")),
];

/// Reading direction of each lexicon-backed family.
pub fn lexicon_direction(id: TransformId) -> Direction {
    match id {
        TransformId::Abr3 | TransformId::Cont | TransformId::Week => Direction::SwapBothWays,
        _ => Direction::OneWay,
    }
}

/// The compiled bundled lexicon for a lexicon-backed family, or `None`
/// for the character-level families (`fing`, `leet`, `spac`).
pub fn builtin_lexicon(id: TransformId) -> Option<Lexicon> {
    LEXICON_FILES.iter().find(|(i, _)| *i == id).map(|(_, tsv)| {
        Lexicon::parse_tsv(id.as_str(), lexicon_direction(id), tsv)
            .expect("bundled lexicon is valid")
    })
}

fn spec_for(id: TransformId, lexicon: Option<Lexicon>) -> TransformSpec {
    let kind = match id {
        TransformId::Fing => TransformKind::ButterFingers {
            p: DEFAULT_FING_P,
            keyboard: Arc::new(KeyboardMap::qwerty()),
        },
        TransformId::Leet => TransformKind::LeetSpeak {
            p: DEFAULT_LEET_P,
            map: Arc::new(LeetMap::classic()),
        },
        TransformId::Spac => TransformKind::Whitespace {
            p_add: DEFAULT_SPAC_P_ADD,
            p_remove: DEFAULT_SPAC_P_REMOVE,
        },
        lexical => {
            let p = match lexical {
                TransformId::Abr1 => Some(DEFAULT_ABR1_P),
                TransformId::Homo => Some(DEFAULT_HOMO_P),
                TransformId::Spel => Some(DEFAULT_SPEL_P),
                _ => None,
            };
            TransformKind::Lexical {
                lexicon: Arc::new(lexicon.expect("lexical family has a lexicon")),
                p,
            }
        }
    };
    TransformSpec { id, kind }
}

/// All twelve transformations with bundled data and default
/// parameters, in canonical order.
pub fn default_transforms() -> Vec<TransformSpec> {
    TransformId::ALL
        .iter()
        .map(|&id| spec_for(id, builtin_lexicon(id)))
        .collect()
}

/// Like [`default_transforms`], but lexicon files found in `dir`
/// (named `<id>.tsv`) override the bundled ones. Missing files fall
/// back silently; unreadable or malformed files are errors.
pub fn default_transforms_from_dir(dir: Option<&Path>) -> Result<Vec<TransformSpec>> {
    let mut specs = Vec::with_capacity(TransformId::ALL.len());
    for &id in &TransformId::ALL {
        let lexicon = match (dir, builtin_lexicon(id)) {
            (Some(dir), Some(builtin)) => {
                let path = dir.join(format!("{id}.tsv"));
                if path.is_file() {
                    Some(Lexicon::load(&path, lexicon_direction(id))?)
                } else {
                    Some(builtin)
                }
            }
            (_, builtin) => builtin,
        };
        specs.push(spec_for(id, lexicon));
    }
    Ok(specs)
}
