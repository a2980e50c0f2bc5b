//! Budgeted exemplar store with prototype-distance retention for
//! true-labeled entries, a confidence gate plus confidence ranking for
//! pseudo-labeled entries, and fixed-ratio replay sampling.
//!
//! Writers are serialized: inserts and evictions take `&mut self`, batch
//! sampling takes `&self` and may run concurrently with other reads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec;
use crate::container;
use crate::error::{Error, Result};
use crate::types::{CompressedSegment, Segment};

/// Label provenance of a buffered entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    TrueLabel,
    PseudoLabel,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::TrueLabel => "true",
            Provenance::PseudoLabel => "pseudo",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "true" => Some(Provenance::TrueLabel),
            "pseudo" => Some(Provenance::PseudoLabel),
            _ => None,
        }
    }
}

/// One stored exemplar: compressed payload, label, provenance, per-window
/// confidences, and an externally computed feature vector used for
/// prototype distances.
#[derive(Debug, Clone, PartialEq)]
pub struct BufferEntry {
    pub payload: CompressedSegment,
    pub label: u32,
    pub provenance: Provenance,
    pub window_confidences: Vec<f64>,
    pub feature: Vec<f32>,
}

impl BufferEntry {
    /// Storage cost in stored scalars.
    pub fn cost(&self) -> u64 {
        self.payload.stored_scalars()
    }

    /// Mean window confidence (zero when no confidences are recorded).
    pub fn mean_confidence(&self) -> f64 {
        if self.window_confidences.is_empty() {
            0.0
        } else {
            self.window_confidences.iter().sum::<f64>() / self.window_confidences.len() as f64
        }
    }
}

/// Per-class mean feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Prototype {
    pub label: u32,
    pub mean: Vec<f64>,
    pub count: usize,
}

/// Coordinate-wise mean of the features of one class. `None` when the class
/// has no members (such a class is skipped in eviction ranking).
pub fn compute_prototype<'a>(
    label: u32,
    entries: impl IntoIterator<Item = &'a BufferEntry>,
) -> Option<Prototype> {
    let mut mean: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for entry in entries {
        if mean.is_empty() {
            mean = vec![0.0; entry.feature.len()];
        }
        for (m, &f) in mean.iter_mut().zip(entry.feature.iter()) {
            *m += f as f64;
        }
        count += 1;
    }
    if count == 0 {
        return None;
    }
    for m in &mut mean {
        *m /= count as f64;
    }
    Some(Prototype { label, mean, count })
}

fn distance_to(feature: &[f32], mean: &[f64]) -> f64 {
    feature
        .iter()
        .zip(mean.iter())
        .map(|(&f, &m)| {
            let d = f as f64 - m;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Why a pseudo-labeled entry was not admitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    /// Too few windows cleared the confidence threshold.
    BelowGate { passing: usize, required: usize },
    /// Missing confidences, provenance mismatch, or a feature-length
    /// mismatch with the buffer.
    Malformed(String),
}

/// Outcome of offering a pseudo-labeled entry to the buffer.
#[derive(Debug, Clone, PartialEq)]
pub enum Admission {
    Accepted { evicted: Vec<BufferEntry> },
    Rejected(RejectReason),
}

/// Buffer limits and replay composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BufferConfig {
    /// Stored-scalar budget of the true-labeled partition.
    pub budget_true: u64,
    /// Stored-scalar budget of the pseudo-labeled partition.
    pub budget_pseudo: u64,
    /// Confidence gate: a window passes when its confidence strictly exceeds
    /// this.
    pub conf_threshold: f64,
    /// Minimum number of passing windows for admission (inclusive).
    pub min_windows: usize,
    /// Replay composition `true : pseudo`.
    pub mix_ratio: (u32, u32),
}

impl BufferConfig {
    pub fn new(budget_true: u64, budget_pseudo: u64) -> Self {
        BufferConfig {
            budget_true,
            budget_pseudo,
            conf_threshold: 0.9,
            min_windows: 15,
            mix_ratio: (8, 2),
        }
    }
}

/// A replayed exemplar, decoded back to a dense segment.
#[derive(Debug, Clone)]
pub struct ReplaySample {
    pub segment: Segment,
    pub label: u32,
    pub provenance: Provenance,
}

/// The budgeted two-partition exemplar store.
#[derive(Debug, Clone)]
pub struct Buffer {
    config: BufferConfig,
    true_partition: Vec<BufferEntry>,
    pseudo_partition: Vec<BufferEntry>,
    feature_len: Option<usize>,
}

impl Buffer {
    pub fn new(config: BufferConfig) -> Self {
        Buffer {
            config,
            true_partition: Vec::new(),
            pseudo_partition: Vec::new(),
            feature_len: None,
        }
    }

    pub fn config(&self) -> &BufferConfig {
        &self.config
    }

    /// Adjust the partition budgets. Shrinking a budget does not evict by
    /// itself; call the eviction routines to re-establish the invariant.
    pub fn set_budgets(&mut self, budget_true: u64, budget_pseudo: u64) {
        self.config.budget_true = budget_true;
        self.config.budget_pseudo = budget_pseudo;
    }

    pub fn true_entries(&self) -> &[BufferEntry] {
        &self.true_partition
    }

    pub fn pseudo_entries(&self) -> &[BufferEntry] {
        &self.pseudo_partition
    }

    pub fn true_cost(&self) -> u64 {
        self.true_partition.iter().map(|e| e.cost()).sum()
    }

    pub fn pseudo_cost(&self) -> u64 {
        self.pseudo_partition.iter().map(|e| e.cost()).sum()
    }

    fn check_feature_len(&mut self, entry: &BufferEntry) -> std::result::Result<(), String> {
        match self.feature_len {
            None => {
                self.feature_len = Some(entry.feature.len());
                Ok(())
            }
            Some(len) if len == entry.feature.len() => Ok(()),
            Some(len) => Err(format!(
                "feature length {} does not match buffer's {len}",
                entry.feature.len()
            )),
        }
    }

    /// Store a true-labeled entry, evicting prototype-distant entries if the
    /// partition overflows its budget. Returns the evicted entries.
    pub fn insert_true(&mut self, entry: BufferEntry) -> Result<Vec<BufferEntry>> {
        if entry.provenance != Provenance::TrueLabel {
            return Err(Error::InvalidData(
                "pseudo-labeled entry offered to the true partition".into(),
            ));
        }
        self.check_feature_len(&entry).map_err(Error::InvalidData)?;
        self.true_partition.push(entry);
        Ok(self.evict_true())
    }

    /// Offer a pseudo-labeled entry to the confidence gate: admitted when
    /// strictly more than `conf_threshold` is reached on at least
    /// `min_windows` windows. Admission may trigger pseudo-partition
    /// eviction.
    pub fn admit_pseudo(&mut self, entry: BufferEntry) -> Admission {
        if entry.provenance != Provenance::PseudoLabel {
            return Admission::Rejected(RejectReason::Malformed(
                "true-labeled entry offered to the pseudo gate".into(),
            ));
        }
        if entry.window_confidences.is_empty() {
            return Admission::Rejected(RejectReason::Malformed(
                "missing window confidences".into(),
            ));
        }
        if entry
            .window_confidences
            .iter()
            .any(|c| !c.is_finite() || !(0.0..=1.0).contains(c))
        {
            return Admission::Rejected(RejectReason::Malformed(
                "confidences must be in [0, 1]".into(),
            ));
        }
        let passing = entry
            .window_confidences
            .iter()
            .filter(|&&c| c > self.config.conf_threshold)
            .count();
        if passing < self.config.min_windows {
            return Admission::Rejected(RejectReason::BelowGate {
                passing,
                required: self.config.min_windows,
            });
        }
        if let Err(msg) = self.check_feature_len(&entry) {
            return Admission::Rejected(RejectReason::Malformed(msg));
        }
        self.pseudo_partition.push(entry);
        let evicted = self.evict_pseudo();
        Admission::Accepted { evicted }
    }

    /// Prototypes of the true partition, keyed by class.
    pub fn true_prototypes(&self) -> BTreeMap<u32, Prototype> {
        let mut labels: Vec<u32> = self.true_partition.iter().map(|e| e.label).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
            .into_iter()
            .filter_map(|label| {
                compute_prototype(label, self.true_partition.iter().filter(|e| e.label == label))
                    .map(|p| (label, p))
            })
            .collect()
    }

    /// Shrink the true partition to its budget: entries are ranked globally
    /// by distance to their class prototype (computed once, before any
    /// removal), and the farthest are evicted until the partition fits.
    /// Ties evict the larger cost first, then the newer entry.
    pub fn evict_true(&mut self) -> Vec<BufferEntry> {
        if self.true_cost() <= self.config.budget_true {
            return Vec::new();
        }
        let prototypes = self.true_prototypes();
        let distances: Vec<f64> = self
            .true_partition
            .iter()
            .map(|e| distance_to(&e.feature, &prototypes[&e.label].mean))
            .collect();
        let costs: Vec<u64> = self.true_partition.iter().map(|e| e.cost()).collect();

        // keep order: closest first, then cheaper, then older
        let mut order: Vec<usize> = (0..self.true_partition.len()).collect();
        order.sort_by(|&a, &b| {
            distances[a]
                .partial_cmp(&distances[b])
                .expect("finite distances")
                .then(costs[a].cmp(&costs[b]))
                .then(a.cmp(&b))
        });
        let keep = fitting_prefix(&order, &costs, self.config.budget_true);
        self.retain_indices(true, &keep)
    }

    /// Shrink the pseudo partition to its budget: entries are ranked by mean
    /// window confidence (descending; ties prefer the lower cost, then the
    /// older entry) and the top-ranked prefix that fits the budget is kept.
    pub fn evict_pseudo(&mut self) -> Vec<BufferEntry> {
        if self.pseudo_cost() <= self.config.budget_pseudo {
            return Vec::new();
        }
        let confidences: Vec<f64> = self.pseudo_partition.iter().map(|e| e.mean_confidence()).collect();
        let costs: Vec<u64> = self.pseudo_partition.iter().map(|e| e.cost()).collect();
        let mut order: Vec<usize> = (0..self.pseudo_partition.len()).collect();
        order.sort_by(|&a, &b| {
            confidences[b]
                .partial_cmp(&confidences[a])
                .expect("finite confidences")
                .then(costs[a].cmp(&costs[b]))
                .then(a.cmp(&b))
        });
        let keep = fitting_prefix(&order, &costs, self.config.budget_pseudo);
        self.retain_indices(false, &keep)
    }

    fn retain_indices(&mut self, true_side: bool, keep: &[bool]) -> Vec<BufferEntry> {
        let partition = if true_side {
            &mut self.true_partition
        } else {
            &mut self.pseudo_partition
        };
        let mut kept = Vec::with_capacity(keep.iter().filter(|&&k| k).count());
        let mut evicted = Vec::new();
        for (i, entry) in partition.drain(..).enumerate() {
            if keep[i] {
                kept.push(entry);
            } else {
                evicted.push(entry);
            }
        }
        *partition = kept;
        evicted
    }

    /// Draw a replay batch: the batch splits by the configured mix ratio
    /// (pseudo count rounded, true takes the remainder), each partition is
    /// sampled uniformly without replacement with the seeded generator, and
    /// a shortfall on one side backfills from the other. Drawn entries are
    /// decoded to dense segments.
    pub fn sample_replay_batch(&self, batch_size: usize, seed: u64) -> Vec<ReplaySample> {
        if batch_size == 0 {
            return Vec::new();
        }
        let (ratio_true, ratio_pseudo) = self.config.mix_ratio;
        let total_ratio = (ratio_true + ratio_pseudo).max(1) as f64;
        let want_pseudo = (batch_size as f64 * ratio_pseudo as f64 / total_ratio).round() as usize;
        let want_true = batch_size - want_pseudo.min(batch_size);

        let have_true = self.true_partition.len();
        let have_pseudo = self.pseudo_partition.len();
        let mut take_true = want_true.min(have_true);
        let mut take_pseudo = want_pseudo.min(have_pseudo);
        let mut shortfall = batch_size - take_true - take_pseudo;
        let extra_true = shortfall.min(have_true - take_true);
        take_true += extra_true;
        shortfall -= extra_true;
        take_pseudo += shortfall.min(have_pseudo - take_pseudo);

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let true_order = shuffled_indices(have_true, &mut rng);
        let pseudo_order = shuffled_indices(have_pseudo, &mut rng);

        let mut batch = Vec::with_capacity(take_true + take_pseudo);
        for &i in true_order.iter().take(take_true) {
            batch.push(decode(&self.true_partition[i]));
        }
        for &i in pseudo_order.iter().take(take_pseudo) {
            batch.push(decode(&self.pseudo_partition[i]));
        }
        batch
    }

    /// Persist the buffer as one container file per entry plus a text index
    /// (`index.tsv`): container path, label, provenance, mean confidence,
    /// and the feature vector as decimal floats.
    pub fn save_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut index = String::new();
        for (i, entry) in self.true_partition.iter().chain(self.pseudo_partition.iter()).enumerate() {
            let name = format!("entry_{i:05}.adcr");
            container::write_container(&dir.join(&name), &entry.payload)?;
            let feature = entry
                .feature
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(",");
            writeln!(
                index,
                "{name}\t{}\t{}\t{}\t{feature}",
                entry.label,
                entry.provenance.as_str(),
                entry.mean_confidence()
            )
            .expect("string write");
        }
        fs::write(dir.join("index.tsv"), index)?;
        Ok(())
    }

    /// Reload a persisted buffer. Entries carry their recorded mean
    /// confidence as a single aggregate window. Budgets of `config` are
    /// enforced by eviction after loading.
    pub fn load_from_dir(dir: &Path, config: BufferConfig) -> Result<Buffer> {
        let index = fs::read_to_string(dir.join("index.tsv"))?;
        let mut buffer = Buffer::new(config);
        for (line_no, line) in index.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 {
                return Err(Error::InvalidData(format!(
                    "index line {}: expected 5 fields, got {}",
                    line_no + 1,
                    fields.len()
                )));
            }
            let payload = container::read_container(&dir.join(fields[0]))?;
            let label: u32 = fields[1]
                .parse()
                .map_err(|_| Error::InvalidData(format!("index line {}: bad label", line_no + 1)))?;
            let provenance = Provenance::parse(fields[2]).ok_or_else(|| {
                Error::InvalidData(format!("index line {}: bad provenance", line_no + 1))
            })?;
            let mean_conf: f64 = fields[3].parse().map_err(|_| {
                Error::InvalidData(format!("index line {}: bad confidence", line_no + 1))
            })?;
            let feature = if fields[4].is_empty() {
                Vec::new()
            } else {
                fields[4]
                    .split(',')
                    .map(|f| f.parse::<f32>())
                    .collect::<std::result::Result<Vec<f32>, _>>()
                    .map_err(|_| {
                        Error::InvalidData(format!("index line {}: bad feature", line_no + 1))
                    })?
            };
            let entry = BufferEntry {
                payload,
                label,
                provenance,
                window_confidences: vec![mean_conf],
                feature,
            };
            buffer.check_feature_len(&entry).map_err(Error::InvalidData)?;
            match provenance {
                Provenance::TrueLabel => buffer.true_partition.push(entry),
                Provenance::PseudoLabel => buffer.pseudo_partition.push(entry),
            }
        }
        buffer.evict_true();
        buffer.evict_pseudo();
        Ok(buffer)
    }
}

/// Mark the longest prefix of `order` whose cumulative cost fits `budget`;
/// the walk stops at the first entry that does not fit.
fn fitting_prefix(order: &[usize], costs: &[u64], budget: u64) -> Vec<bool> {
    let mut keep = vec![false; costs.len()];
    let mut cum = 0u64;
    for &idx in order {
        match cum.checked_add(costs[idx]) {
            Some(next) if next <= budget => {
                keep[idx] = true;
                cum = next;
            }
            _ => break,
        }
    }
    keep
}

fn shuffled_indices(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        indices.swap(i, j);
    }
    indices
}

fn decode(entry: &BufferEntry) -> ReplaySample {
    ReplaySample {
        segment: codec::reconstruct(&entry.payload),
        label: entry.label,
        provenance: entry.provenance,
    }
}
