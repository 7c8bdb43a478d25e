//! The student encoder: a feature table max-pooled into a hidden
//! vector, followed by a linear projection to the teacher's dimension.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::distill::features::{featurize, FeatureMode, StudentConfig};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::rng::Pcg32;
use crate::text::fnv1a64;
use crate::{cast, Scalar};

/// Magic bytes opening a serialized model file.
pub const MODEL_MAGIC: [u8; 4] = *b"UGCD";
/// Current model file format version.
pub const MODEL_VERSION: u32 = 1;

/// A trainable sentence encoder distilled from a frozen teacher.
///
/// `encode` max-pools the table rows of the sentence's features into a
/// hidden vector and projects it to `out_dim` dimensions. All
/// parameters stay finite; training enforces this each step.
#[derive(Debug, Clone, PartialEq)]
pub struct Student<T> {
    /// `buckets x hidden`, row-major: one feature vector per bucket.
    pub(crate) table: Vec<T>,
    /// `out_dim x hidden`, row-major.
    pub(crate) projection: Vec<T>,
    config: StudentConfig,
}

impl<T: Scalar> Student<T> {
    /// A freshly initialized student: table entries are standard
    /// Gaussian, projection entries Gaussian with variance `1/hidden`,
    /// both drawn from streams derived from `config.seed`.
    pub fn new(config: StudentConfig) -> Result<Self> {
        config.validate()?;
        let mut table_rng = Pcg32::for_item(config.seed, 0);
        let mut proj_rng = Pcg32::for_item(config.seed, 1);
        let table: Vec<T> = (0..config.buckets * config.hidden)
            .map(|_| cast(table_rng.next_gaussian()))
            .collect();
        let scale = 1.0 / (config.hidden as f64).sqrt();
        let projection: Vec<T> = (0..config.out_dim * config.hidden)
            .map(|_| cast(proj_rng.next_gaussian() * scale))
            .collect();
        Ok(Student {
            table,
            projection,
            config,
        })
    }

    pub fn config(&self) -> &StudentConfig {
        &self.config
    }

    /// The feature table, `buckets x hidden` row-major.
    pub fn table(&self) -> &[T] {
        &self.table
    }

    /// The projection, `out_dim x hidden` row-major.
    pub fn projection(&self) -> &[T] {
        &self.projection
    }

    /// Mutable table access, for external optimizers and
    /// finite-difference probes. Finiteness is enforced at the save
    /// and training boundaries, not here.
    pub fn table_mut(&mut self) -> &mut [T] {
        &mut self.table
    }

    /// Mutable projection access; see [`Student::table_mut`].
    pub fn projection_mut(&mut self) -> &mut [T] {
        &mut self.projection
    }

    /// Table row for feature id `id`.
    pub(crate) fn table_row(&self, id: usize) -> &[T] {
        let h = self.config.hidden;
        &self.table[id * h..(id + 1) * h]
    }

    /// Max-pools the sentence's feature vectors. Returns the pooled
    /// hidden vector together with, per coordinate, the feature id the
    /// maximum came from (ties go to the lowest id). `None` when the
    /// sentence has no features.
    pub(crate) fn pool(&self, sentence: &str) -> Option<(Vec<T>, Vec<usize>)> {
        let mut ids = featurize(sentence, &self.config);
        ids.sort_unstable();
        ids.dedup();
        let first = *ids.first()?;
        let mut pooled = self.table_row(first).to_vec();
        let mut winners = vec![first; self.config.hidden];
        for &id in &ids[1..] {
            let row = self.table_row(id);
            for (c, &v) in row.iter().enumerate() {
                if v > pooled[c] {
                    pooled[c] = v;
                    winners[c] = id;
                }
            }
        }
        Some((pooled, winners))
    }

    /// Applies the projection to a hidden vector.
    pub(crate) fn project(&self, hidden: &[T]) -> Vec<T> {
        let h = self.config.hidden;
        self.projection
            .chunks_exact(h)
            .map(|row| row.iter().zip(hidden).map(|(&p, &x)| p * x).sum())
            .collect()
    }

    /// Embeds one sentence. A sentence with no features maps to the
    /// zero vector (the projection applied to a zero hidden vector).
    pub fn encode(&self, sentence: &str) -> Vec<T> {
        match self.pool(sentence) {
            Some((pooled, _)) => self.project(&pooled),
            None => vec![T::zero(); self.config.out_dim],
        }
    }

    /// Embeds a corpus row-per-sentence. Pure, so rows are computed in
    /// parallel; output is independent of worker count.
    pub fn encode_corpus<S: AsRef<str> + Sync>(
        &self,
        sentences: &[S],
    ) -> Result<EmbeddingMatrix<T>> {
        let rows: Vec<Vec<T>> = sentences
            .par_iter()
            .map(|s| self.encode(s.as_ref()))
            .collect();
        EmbeddingMatrix::from_rows(&rows)
    }

    fn config_block(&self) -> Vec<u8> {
        let mode: u8 = match self.config.feature_mode {
            FeatureMode::WordHash => 0,
            FeatureMode::CharNgram => 1,
        };
        let mut block = vec![mode];
        for v in [
            self.config.buckets as u64,
            self.config.hidden as u64,
            self.config.out_dim as u64,
            self.config.seed,
        ] {
            block.extend_from_slice(&v.to_le_bytes());
        }
        block
    }

    /// FNV-1a digest of the configuration block, as 16 hex digits.
    /// Stable across runs; used to pair checkpoints with their config.
    pub fn config_digest(&self) -> String {
        format!("{:016x}", fnv1a64(&self.config_block()))
    }

    /// FNV-1a digest over all parameter bytes (table then projection,
    /// 64-bit little endian). Two models with equal parameters and
    /// config have equal digests.
    pub fn params_digest(&self) -> String {
        let mut bytes = self.config_block();
        for v in self.table.iter().chain(&self.projection) {
            let as64 = v.to_f64().expect("parameters are finite");
            bytes.extend_from_slice(&as64.to_le_bytes());
        }
        format!("{:016x}", fnv1a64(&bytes))
    }
}

impl Student<f64> {
    /// Writes the model as a versioned binary: magic, format version,
    /// config block, then table and projection values as 64-bit little
    /// endian, row-major. Round-trips byte-exactly through [`Student::load`].
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(
            4 + 4 + 33 + 8 * (self.table.len() + self.projection.len()),
        );
        bytes.extend_from_slice(&MODEL_MAGIC);
        bytes.extend_from_slice(&MODEL_VERSION.to_le_bytes());
        bytes.extend_from_slice(&self.config_block());
        for v in self.table.iter().chain(&self.projection) {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }

    /// Reads a model written by [`Student::save`], validating magic,
    /// version, dimensions, exact length, and parameter finiteness.
    pub fn load(path: &Path) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message,
        };
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.len() < 41 {
            return Err(parse_err(format!(
                "file too short for a model header ({} bytes)",
                bytes.len()
            )));
        }
        if bytes[..4] != MODEL_MAGIC {
            return Err(parse_err("bad magic bytes; not a model file".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if version != MODEL_VERSION {
            return Err(parse_err(format!(
                "unsupported format version {version}, expected {MODEL_VERSION}"
            )));
        }
        let feature_mode = match bytes[8] {
            0 => FeatureMode::WordHash,
            1 => FeatureMode::CharNgram,
            other => return Err(parse_err(format!("unknown feature mode byte {other}"))),
        };
        let mut words = bytes[9..41]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")));
        let config = StudentConfig {
            feature_mode,
            buckets: words.next().expect("4 words") as usize,
            hidden: words.next().expect("4 words") as usize,
            out_dim: words.next().expect("4 words") as usize,
            seed: words.next().expect("4 words"),
        };
        config.validate()?;
        let n_table = config.buckets * config.hidden;
        let n_proj = config.out_dim * config.hidden;
        let expected = 41 + 8 * (n_table + n_proj) as u64;
        if bytes.len() as u64 != expected {
            return Err(Error::SizeMismatch {
                path: path.to_path_buf(),
                expected,
                actual: bytes.len() as u64,
            });
        }
        let values: Vec<f64> = bytes[41..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: bad / config.hidden.max(1),
            });
        }
        let table = values[..n_table].to_vec();
        let projection = values[n_table..].to_vec();
        Ok(Student {
            table,
            projection,
            config,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> StudentConfig {
        StudentConfig {
            feature_mode: FeatureMode::WordHash,
            buckets: 64,
            hidden: 8,
            out_dim: 5,
            seed: 11,
        }
    }

    #[test]
    fn initialization_is_deterministic_in_the_seed() {
        let a = Student::<f64>::new(small_config()).unwrap();
        let b = Student::<f64>::new(small_config()).unwrap();
        assert_eq!(a, b);
        let mut other = small_config();
        other.seed = 12;
        let c = Student::<f64>::new(other).unwrap();
        assert_ne!(a.table, c.table);
    }

    #[test]
    fn single_feature_sentence_projects_its_table_row() {
        let model = Student::<f64>::new(small_config()).unwrap();
        let out = model.encode("hello");
        let ids = featurize("hello", model.config());
        assert_eq!(ids.len(), 1);
        let expect = model.project(model.table_row(ids[0]));
        assert_eq!(out, expect);
    }

    #[test]
    fn encode_is_invariant_under_token_permutation() {
        for mode in [FeatureMode::WordHash, FeatureMode::CharNgram] {
            let model = Student::<f64>::new(StudentConfig {
                feature_mode: mode,
                ..small_config()
            })
            .unwrap();
            let a = model.encode("one two three four");
            let b = model.encode("four three one two");
            assert_eq!(a, b, "mode {mode}");
        }
    }

    #[test]
    fn empty_sentence_encodes_to_zero() {
        let model = Student::<f64>::new(small_config()).unwrap();
        assert_eq!(model.encode(""), vec![0.0; 5]);
        assert_eq!(model.encode("!!! ..."), vec![0.0; 5]);
    }

    #[test]
    fn pooled_vector_is_coordinatewise_max() {
        // Two distinct single-token sentences, pooled jointly, must
        // dominate both constituent rows coordinatewise.
        let model = Student::<f64>::new(small_config()).unwrap();
        let (pooled, winners) = model.pool("alpha beta").unwrap();
        let ids = {
            let mut ids = featurize("alpha beta", model.config());
            ids.sort_unstable();
            ids.dedup();
            ids
        };
        assert_eq!(ids.len(), 2, "hash collision in test fixture");
        for c in 0..8 {
            let a = model.table_row(ids[0])[c];
            let b = model.table_row(ids[1])[c];
            assert_eq!(pooled[c], a.max(b));
            // ids is sorted, so the later id only wins by exceeding.
            let expect = if b > a { ids[1] } else { ids[0] };
            assert_eq!(winners[c], expect);
        }
    }

    #[test]
    fn pool_ties_go_to_the_lowest_feature_id() {
        let mut model = Student::<f64>::new(small_config()).unwrap();
        // Force two feature rows to be identical, then check winners.
        let ids = {
            let mut ids = featurize("alpha beta", model.config());
            ids.sort_unstable();
            ids.dedup();
            ids
        };
        let h = model.config().hidden;
        let lo = ids[0];
        let hi = ids[1];
        let row: Vec<f64> = model.table_row(lo).to_vec();
        model.table[hi * h..(hi + 1) * h].copy_from_slice(&row);
        let (_, winners) = model.pool("alpha beta").unwrap();
        assert!(winners.iter().all(|&w| w == lo));
    }

    #[test]
    fn corpus_encoding_matches_single_encoding() {
        let model = Student::<f64>::new(small_config()).unwrap();
        let sentences = vec!["a b".to_string(), "c".to_string(), String::new()];
        let m = model.encode_corpus(&sentences).unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(m.d(), 5);
        for (i, s) in sentences.iter().enumerate() {
            assert_eq!(m.row(i), model.encode(s).as_slice());
        }
    }

    #[test]
    fn save_load_round_trip_is_byte_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let model = Student::<f64>::new(small_config()).unwrap();
        model.save(&path).unwrap();
        let back = Student::<f64>::load(&path).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.params_digest(), model.params_digest());
        let path2 = dir.path().join("model2.bin");
        back.save(&path2).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn load_rejects_corrupted_headers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let model = Student::<f64>::new(small_config()).unwrap();
        model.save(&path).unwrap();

        let good = fs::read(&path).unwrap();
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        fs::write(&path, &bad_magic).unwrap();
        assert!(matches!(
            Student::<f64>::load(&path),
            Err(Error::Parse { .. })
        ));

        let mut bad_version = good.clone();
        bad_version[4] = 9;
        fs::write(&path, &bad_version).unwrap();
        assert!(matches!(
            Student::<f64>::load(&path),
            Err(Error::Parse { .. })
        ));

        fs::write(&path, &good[..good.len() - 8]).unwrap();
        assert!(matches!(
            Student::<f64>::load(&path),
            Err(Error::SizeMismatch { .. })
        ));

        let mut bad_value = good.clone();
        let tail = bad_value.len() - 8;
        bad_value[tail..].copy_from_slice(&f64::NAN.to_le_bytes());
        fs::write(&path, &bad_value).unwrap();
        assert!(matches!(
            Student::<f64>::load(&path),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn digests_distinguish_configs_and_parameters() {
        let a = Student::<f64>::new(small_config()).unwrap();
        let mut cfg = small_config();
        cfg.seed = 99;
        let b = Student::<f64>::new(cfg).unwrap();
        // Same shape, different seed: config digests differ (seed is
        // part of the config) and parameter digests differ too.
        assert_ne!(a.config_digest(), b.config_digest());
        assert_ne!(a.params_digest(), b.params_digest());
        assert_eq!(a.config_digest(), a.clone().config_digest());
    }

    #[test]
    fn f32_student_encodes() {
        let model = Student::<f32>::new(small_config()).unwrap();
        let out = model.encode("tiny test");
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|v| v.is_finite()));
    }
}
