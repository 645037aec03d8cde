//! The associative net core: a zero-initialized knowledge base trained by
//! additive outer-product updates, with correlation-argmax classification,
//! a cluster-membership test, and a versioned text persistence format.
//!
//! Training adds `input x target^T` to the weight matrix, so column `c` is
//! the exact integer sum of every bipolar feature vector trained with class
//! `c`. Classification scores an input by its dot product with each column;
//! the normalized score divides by `counts[c] * dim`, which is 1.0 for a
//! pattern identical to a class's single training sample.

use std::fmt::Write as _;

use thiserror::Error;

use crate::preprocess::FeatureVector;

const KB_MAGIC: &str = "HEBCHAR-KB v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("feature dimension {got} does not match knowledge base dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("class index {index} out of range for {classes} classes")]
    ClassOutOfRange { index: usize, classes: usize },
    #[error("label table must contain at least one label")]
    EmptyLabelTable,
    #[error("invalid label {0:?}: labels must be non-empty and contain no whitespace")]
    InvalidLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unsupported knowledge base version {found:?} (expected {KB_MAGIC:?})")]
    UnsupportedVersion { found: String },
    #[error("corrupt knowledge base file: {detail}")]
    CorruptFile { detail: String },
    #[error("weight data inconsistent with declared dimensions: expected {expected} entries, found {got}")]
    WeightCountMismatch { expected: usize, got: usize },
}

fn corrupt(detail: impl Into<String>) -> NetError {
    NetError::CorruptFile {
        detail: detail.into(),
    }
}

/// Ordered set of distinct class names. Index/label mapping is stable
/// across save and load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTable {
    labels: Vec<String>,
}

impl LabelTable {
    pub fn new(labels: Vec<String>) -> Result<Self, NetError> {
        if labels.is_empty() {
            return Err(NetError::EmptyLabelTable);
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(NetError::InvalidLabel(label.clone()));
            }
            if labels[..i].contains(label) {
                return Err(NetError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// The 52 English letters, A-Z followed by a-z.
    pub fn english_alphabet() -> Self {
        let labels = ('A'..='Z').chain('a'..='z').map(String::from).collect();
        Self { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

/// One-hot class code: 1 at `class_index`, 0 elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetVector {
    class_index: usize,
    classes: usize,
}

impl TargetVector {
    pub fn new(class_index: usize, classes: usize) -> Result<Self, NetError> {
        if class_index >= classes {
            return Err(NetError::ClassOutOfRange {
                index: class_index,
                classes,
            });
        }
        Ok(Self {
            class_index,
            classes,
        })
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn component(&self, class: usize) -> i32 {
        i32::from(class == self.class_index)
    }
}

/// Result of scoring a feature vector against every class column.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    /// Label of the maximal raw score (lowest index on ties).
    pub predicted: String,
    pub predicted_index: usize,
    /// Raw integer correlation per class.
    pub scores: Vec<i64>,
    /// `scores[c] / (counts[c] * dim)`, or 0 for untrained classes.
    pub normalized: Vec<f64>,
    /// Whether the best normalized score reaches the membership threshold.
    pub member: bool,
}

/// The stored weights of the trained net: a `dim x classes` integer matrix
/// plus per-class training counts. Freshly created knowledge bases are all
/// zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    dim: usize,
    labels: LabelTable,
    // Row-major: weights[d * classes + c].
    weights: Vec<i32>,
    counts: Vec<u32>,
}

impl KnowledgeBase {
    pub fn new(dim: usize, labels: LabelTable) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        let classes = labels.len();
        Self {
            dim,
            labels,
            weights: vec![0; dim * classes],
            counts: vec![0; classes],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    pub fn weight(&self, feature: usize, class: usize) -> i32 {
        self.weights[feature * self.classes() + class]
    }

    pub fn count(&self, class: usize) -> u32 {
        self.counts[class]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Adds the outer product of `input` and the one-hot `target` to the
    /// weights: column `target.class_index` increases elementwise by
    /// `input`, all other columns are unchanged.
    pub fn train(&mut self, input: &FeatureVector, target: &TargetVector) -> Result<(), NetError> {
        if input.dim() != self.dim {
            return Err(NetError::DimensionMismatch {
                expected: self.dim,
                got: input.dim(),
            });
        }
        if target.classes() != self.classes() || target.class_index() >= self.classes() {
            return Err(NetError::ClassOutOfRange {
                index: target.class_index(),
                classes: self.classes(),
            });
        }
        let classes = self.classes();
        let class = target.class_index();
        for (d, &v) in input.values().iter().enumerate() {
            self.weights[d * classes + class] += i32::from(v);
        }
        self.counts[class] += 1;
        Ok(())
    }

    /// Scores `input` against every class column and applies the
    /// membership test at `membership_threshold` on the best normalized
    /// score.
    pub fn classify(
        &self,
        input: &FeatureVector,
        membership_threshold: f64,
    ) -> Result<Classification, NetError> {
        if input.dim() != self.dim {
            return Err(NetError::DimensionMismatch {
                expected: self.dim,
                got: input.dim(),
            });
        }
        let classes = self.classes();
        let mut scores = vec![0i64; classes];
        for (d, &v) in input.values().iter().enumerate() {
            let row = &self.weights[d * classes..(d + 1) * classes];
            for (c, &w) in row.iter().enumerate() {
                scores[c] += i64::from(v) * i64::from(w);
            }
        }
        let normalized: Vec<f64> = scores
            .iter()
            .zip(&self.counts)
            .map(|(&s, &n)| {
                if n > 0 {
                    s as f64 / (f64::from(n) * self.dim as f64)
                } else {
                    0.0
                }
            })
            .collect();
        // Lowest index wins ties.
        let mut predicted_index = 0;
        for (c, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[predicted_index] {
                predicted_index = c;
            }
        }
        let best_normalized = normalized.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(Classification {
            predicted: self.labels.label(predicted_index).to_string(),
            predicted_index,
            scores,
            normalized,
            member: best_normalized >= membership_threshold,
        })
    }

    /// Whether `input` belongs to any stored cluster at the given
    /// threshold.
    pub fn is_member(&self, input: &FeatureVector, threshold: f64) -> Result<bool, NetError> {
        Ok(self.classify(input, threshold)?.member)
    }

    /// Serializes to the versioned text format:
    ///
    /// ```text
    /// HEBCHAR-KB v1
    /// dim D classes C
    /// <C labels, space separated>
    /// <C counts, space separated>
    /// <D lines of C signed integers>
    /// ```
    pub fn to_bytes(&self) -> Vec<u8> {
        let classes = self.classes();
        let mut out = String::new();
        writeln!(out, "{KB_MAGIC}").unwrap();
        writeln!(out, "dim {} classes {}", self.dim, classes).unwrap();
        writeln!(out, "{}", self.labels.labels.join(" ")).unwrap();
        let counts: Vec<String> = self.counts.iter().map(u32::to_string).collect();
        writeln!(out, "{}", counts.join(" ")).unwrap();
        for row in self.weights.chunks(classes) {
            let cells: Vec<String> = row.iter().map(i32::to_string).collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
        out.into_bytes()
    }

    /// Parses the format written by [`KnowledgeBase::to_bytes`];
    /// `from_bytes(kb.to_bytes())` reproduces `kb` exactly.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NetError> {
        let text = std::str::from_utf8(bytes).map_err(|_| corrupt("file is not valid UTF-8"))?;
        if !text.ends_with('\n') {
            return Err(corrupt("missing trailing newline"));
        }
        let mut lines = text.lines();
        let version = lines.next().ok_or_else(|| corrupt("empty file"))?;
        if version != KB_MAGIC {
            return Err(NetError::UnsupportedVersion {
                found: version.to_string(),
            });
        }
        let header = lines.next().ok_or_else(|| corrupt("missing header line"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (dim, classes) = match fields.as_slice() {
            ["dim", d, "classes", c] => {
                let dim: usize = d.parse().map_err(|_| corrupt("bad dim field"))?;
                let classes: usize = c.parse().map_err(|_| corrupt("bad classes field"))?;
                (dim, classes)
            }
            _ => return Err(corrupt("malformed header line")),
        };
        if dim == 0 || classes == 0 {
            return Err(corrupt("dim and classes must be positive"));
        }
        let label_line = lines.next().ok_or_else(|| corrupt("missing label line"))?;
        let labels: Vec<String> = label_line.split_whitespace().map(String::from).collect();
        if labels.len() != classes {
            return Err(corrupt(format!(
                "expected {classes} labels, found {}",
                labels.len()
            )));
        }
        let labels = LabelTable::new(labels)?;
        let count_line = lines.next().ok_or_else(|| corrupt("missing counts line"))?;
        let counts: Vec<u32> = count_line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| corrupt(format!("bad count {t:?}"))))
            .collect::<Result<_, _>>()?;
        if counts.len() != classes {
            return Err(corrupt(format!(
                "expected {classes} counts, found {}",
                counts.len()
            )));
        }
        let mut weights = Vec::with_capacity(dim * classes);
        for line in lines {
            for token in line.split_whitespace() {
                let w: i32 = token
                    .parse()
                    .map_err(|_| corrupt(format!("bad weight {token:?}")))?;
                weights.push(w);
            }
        }
        if weights.len() != dim * classes {
            return Err(NetError::WeightCountMismatch {
                expected: dim * classes,
                got: weights.len(),
            });
        }
        Ok(Self {
            dim,
            labels,
            weights,
            counts,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(values: &[i8]) -> FeatureVector {
        FeatureVector::new(values.to_vec())
    }

    /// Independent ledger oracle: the explicit double loop over features
    /// and classes summing `input[d] * target[c]` for every training pair.
    pub(crate) fn outer_product_sum_oracle(
        dim: usize,
        classes: usize,
        pairs: &[(Vec<i8>, usize)],
    ) -> Vec<i32> {
        let mut weights = vec![0i32; dim * classes];
        for (input, class) in pairs {
            for d in 0..dim {
                for c in 0..classes {
                    let target = i32::from(c == *class);
                    weights[d * classes + c] += i32::from(input[d]) * target;
                }
            }
        }
        weights
    }

    fn small_labels(n: usize) -> LabelTable {
        LabelTable::new((0..n).map(|i| format!("c{i}")).collect()).unwrap()
    }

    #[test]
    fn fresh_kb_is_all_zero() {
        let kb = KnowledgeBase::new(48, LabelTable::english_alphabet());
        assert_eq!(kb.dim(), 48);
        assert_eq!(kb.classes(), 52);
        assert!(kb.counts().iter().all(|&n| n == 0));
        for d in 0..48 {
            for c in 0..52 {
                assert_eq!(kb.weight(d, c), 0);
            }
        }
        let result = kb.classify(&fv(&[1; 48]), 0.5).unwrap();
        assert!(result.scores.iter().all(|&s| s == 0));
        assert_eq!(result.predicted_index, 0);
        assert_eq!(result.predicted, "A");
        assert!(!result.member);
    }

    #[test]
    fn minimal_kb() {
        let kb = KnowledgeBase::new(1, small_labels(1));
        assert_eq!(kb.weight(0, 0), 0);
        assert_eq!(kb.count(0), 0);
    }

    #[test]
    fn training_from_zero_copies_input_into_column() {
        let mut kb = KnowledgeBase::new(4, small_labels(3));
        let x = fv(&[1, -1, 1, 1]);
        kb.train(&x, &TargetVector::new(1, 3).unwrap()).unwrap();
        for d in 0..4 {
            assert_eq!(kb.weight(d, 0), 0);
            assert_eq!(kb.weight(d, 1), i32::from(x.values()[d]));
            assert_eq!(kb.weight(d, 2), 0);
        }
        assert_eq!(kb.counts(), &[0, 1, 0]);
    }

    #[test]
    fn training_twice_doubles_column() {
        let mut kb = KnowledgeBase::new(4, small_labels(2));
        let x = fv(&[1, -1, -1, 1]);
        let t = TargetVector::new(0, 2).unwrap();
        kb.train(&x, &t).unwrap();
        kb.train(&x, &t).unwrap();
        for d in 0..4 {
            assert_eq!(kb.weight(d, 0), 2 * i32::from(x.values()[d]));
        }
        assert_eq!(kb.count(0), 2);
    }

    #[test]
    fn two_class_training_matches_oracle() {
        let mut kb = KnowledgeBase::new(4, small_labels(2));
        let x1 = fv(&[1, 1, -1, -1]);
        let x2 = fv(&[-1, 1, 1, -1]);
        kb.train(&x1, &TargetVector::new(0, 2).unwrap()).unwrap();
        kb.train(&x2, &TargetVector::new(1, 2).unwrap()).unwrap();
        let oracle = outer_product_sum_oracle(
            4,
            2,
            &[(x1.values().to_vec(), 0), (x2.values().to_vec(), 1)],
        );
        let actual: Vec<i32> = (0..4)
            .flat_map(|d| (0..2).map(move |c| (d, c)))
            .map(|(d, c)| kb.weight(d, c))
            .collect();
        assert_eq!(actual, oracle);
    }

    #[test]
    fn self_classification_scores_dim() {
        let mut kb = KnowledgeBase::new(48, LabelTable::english_alphabet());
        let values: Vec<i8> = (0..48).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
        let x = fv(&values);
        kb.train(&x, &TargetVector::new(7, 52).unwrap()).unwrap();
        let result = kb.classify(&x, 0.5).unwrap();
        // dot(x, x) = sum of squares of +/-1 = dim.
        let dot: i64 = values.iter().map(|&v| i64::from(v) * i64::from(v)).sum();
        assert_eq!(dot, 48);
        assert_eq!(result.scores[7], 48);
        assert_eq!(result.predicted, "H");
        assert_eq!(result.normalized[7], 1.0);
        assert!(result.member);
    }

    #[test]
    fn orthogonal_patterns_recall_exactly() {
        let x1 = fv(&[1, 1, 1, 1]);
        let x2 = fv(&[1, -1, 1, -1]);
        let dot: i64 = x1
            .values()
            .iter()
            .zip(x2.values())
            .map(|(&a, &b)| i64::from(a) * i64::from(b))
            .sum();
        assert_eq!(dot, 0);
        let mut kb = KnowledgeBase::new(4, small_labels(2));
        kb.train(&x1, &TargetVector::new(0, 2).unwrap()).unwrap();
        kb.train(&x2, &TargetVector::new(1, 2).unwrap()).unwrap();
        let r1 = kb.classify(&x1, 0.5).unwrap();
        assert_eq!(r1.predicted_index, 0);
        assert_eq!(r1.normalized[0], 1.0);
        assert_eq!(r1.normalized[1], 0.0);
        let r2 = kb.classify(&x2, 0.5).unwrap();
        assert_eq!(r2.predicted_index, 1);
        assert_eq!(r2.normalized[1], 1.0);
    }

    #[test]
    fn membership_projections() {
        let mut kb = KnowledgeBase::new(6, small_labels(2));
        let x = fv(&[1, -1, 1, -1, 1, 1]);
        kb.train(&x, &TargetVector::new(0, 2).unwrap()).unwrap();
        assert!(kb.is_member(&x, 0.5).unwrap());

        let fresh = KnowledgeBase::new(6, small_labels(2));
        assert!(!fresh.is_member(&x, 0.5).unwrap());

        let negated = fv(&x.values().iter().map(|&v| -v).collect::<Vec<_>>());
        let r = kb.classify(&negated, 0.5).unwrap();
        assert_eq!(r.normalized[0], -1.0);
        assert!(!r.member);
    }

    #[test]
    fn tie_breaks_to_lowest_index() {
        let mut kb = KnowledgeBase::new(2, small_labels(3));
        let x = fv(&[1, 1]);
        // Same pattern trained on classes 1 and 2: equal scores; class 1 wins.
        kb.train(&x, &TargetVector::new(1, 3).unwrap()).unwrap();
        kb.train(&x, &TargetVector::new(2, 3).unwrap()).unwrap();
        let r = kb.classify(&x, 0.5).unwrap();
        assert_eq!(r.scores[1], r.scores[2]);
        assert_eq!(r.predicted_index, 1);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut kb = KnowledgeBase::new(4, small_labels(2));
        let bad = fv(&[1, -1, 1]);
        assert_eq!(
            kb.train(&bad, &TargetVector::new(0, 2).unwrap()),
            Err(NetError::DimensionMismatch {
                expected: 4,
                got: 3
            })
        );
        assert!(matches!(
            kb.classify(&bad, 0.5),
            Err(NetError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn scores_are_bounded_by_count_times_dim() {
        let mut kb = KnowledgeBase::new(8, small_labels(3));
        let patterns: [[i8; 8]; 5] = [
            [1, 1, 1, 1, -1, -1, -1, -1],
            [1, -1, 1, -1, 1, -1, 1, -1],
            [-1, -1, 1, 1, 1, 1, -1, -1],
            [1, 1, -1, -1, -1, -1, 1, 1],
            [-1, 1, -1, 1, -1, 1, -1, 1],
        ];
        for (i, p) in patterns.iter().enumerate() {
            kb.train(&fv(p), &TargetVector::new(i % 3, 3).unwrap())
                .unwrap();
        }
        for probe in &patterns {
            let result = kb.classify(&fv(probe), 0.5).unwrap();
            for c in 0..3 {
                let bound = i64::from(kb.count(c)) * 8;
                assert!(result.scores[c].abs() <= bound);
                assert!((-1.0..=1.0).contains(&result.normalized[c]));
            }
        }
    }

    #[test]
    fn serialized_form_is_exact() {
        let mut kb = KnowledgeBase::new(2, LabelTable::new(vec!["A".into(), "b".into()]).unwrap());
        kb.train(&fv(&[1, -1]), &TargetVector::new(0, 2).unwrap())
            .unwrap();
        kb.train(&fv(&[-1, -1]), &TargetVector::new(1, 2).unwrap())
            .unwrap();
        kb.train(&fv(&[-1, 1]), &TargetVector::new(1, 2).unwrap())
            .unwrap();
        let expected = "HEBCHAR-KB v1\n\
                        dim 2 classes 2\n\
                        A b\n\
                        1 2\n\
                        1 -2\n\
                        -1 0\n";
        assert_eq!(kb.to_bytes(), expected.as_bytes());
    }

    #[test]
    fn save_load_roundtrip() {
        let mut kb = KnowledgeBase::new(6, small_labels(3));
        for (i, class) in [(0usize, 0usize), (1, 1), (2, 1)] {
            let values: Vec<i8> = (0..6)
                .map(|d| if (d + i) % 2 == 0 { 1 } else { -1 })
                .collect();
            kb.train(&fv(&values), &TargetVector::new(class, 3).unwrap())
                .unwrap();
        }
        let restored = KnowledgeBase::from_bytes(&kb.to_bytes()).unwrap();
        assert_eq!(restored, kb);
    }

    #[test]
    fn load_rejects_unknown_version() {
        let err =
            KnowledgeBase::from_bytes(b"HEBCHAR-KB v9\ndim 1 classes 1\na\n0\n0\n").unwrap_err();
        assert_eq!(
            err,
            NetError::UnsupportedVersion {
                found: "HEBCHAR-KB v9".to_string()
            }
        );
    }

    #[test]
    fn load_rejects_weight_count_mismatch() {
        let err = KnowledgeBase::from_bytes(b"HEBCHAR-KB v1\ndim 2 classes 2\na b\n0 0\n1 1\n")
            .unwrap_err();
        assert_eq!(
            err,
            NetError::WeightCountMismatch {
                expected: 4,
                got: 2
            }
        );
    }

    #[test]
    fn load_rejects_missing_trailing_newline() {
        let mut bytes = KnowledgeBase::new(1, small_labels(1)).to_bytes();
        bytes.pop();
        assert!(matches!(
            KnowledgeBase::from_bytes(&bytes),
            Err(NetError::CorruptFile { .. })
        ));
    }

    #[test]
    fn label_table_validation() {
        assert_eq!(LabelTable::new(vec![]), Err(NetError::EmptyLabelTable));
        assert_eq!(
            LabelTable::new(vec!["a".into(), "a".into()]),
            Err(NetError::DuplicateLabel("a".into()))
        );
        assert_eq!(
            LabelTable::new(vec!["a b".into()]),
            Err(NetError::InvalidLabel("a b".into()))
        );
        let english = LabelTable::english_alphabet();
        assert_eq!(english.len(), 52);
        assert_eq!(english.label(0), "A");
        assert_eq!(english.label(25), "Z");
        assert_eq!(english.label(26), "a");
        assert_eq!(english.label(51), "z");
        assert_eq!(english.index_of("H"), Some(7));
        assert_eq!(english.index_of("?"), None);
    }
}
