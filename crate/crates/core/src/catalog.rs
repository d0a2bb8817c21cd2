//! Synthetic prompt-product pools.
//!
//! Each category holds a fixed population of products. Category means are
//! drawn around four model-class means (categories 1-20, 21-40, 41-60, 61-80
//! at 0.778, 0.775, 0.548, 0.668), and each product's `phi` and `sigma` are
//! independent Beta draws with that mean, so `E[q]` equals the category mean.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{CategoryId, QualityObservation};
use crate::rng::{keyed_rng, stream_key, tag, uniform_index};

/// Model-class quality means for the 80-category layout.
pub const CLASS_MEANS: [(usize, usize, f64); 4] = [
    (1, 20, 0.778),
    (21, 40, 0.775),
    (41, 60, 0.548),
    (61, 80, 0.668),
];

const CATEGORY_NAMES: [&str; 80] = [
    "person",
    "bicycle",
    "car",
    "motorcycle",
    "airplane",
    "bus",
    "train",
    "truck",
    "boat",
    "traffic light",
    "fire hydrant",
    "stop sign",
    "parking meter",
    "bench",
    "bird",
    "cat",
    "dog",
    "horse",
    "sheep",
    "cow",
    "elephant",
    "bear",
    "zebra",
    "giraffe",
    "backpack",
    "umbrella",
    "handbag",
    "tie",
    "suitcase",
    "frisbee",
    "skis",
    "snowboard",
    "sports ball",
    "kite",
    "baseball bat",
    "baseball glove",
    "skateboard",
    "surfboard",
    "tennis racket",
    "bottle",
    "wine glass",
    "cup",
    "fork",
    "knife",
    "spoon",
    "bowl",
    "banana",
    "apple",
    "sandwich",
    "orange",
    "broccoli",
    "carrot",
    "hot dog",
    "pizza",
    "donut",
    "cake",
    "chair",
    "couch",
    "potted plant",
    "bed",
    "dining table",
    "toilet",
    "tv",
    "laptop",
    "mouse",
    "remote",
    "keyboard",
    "cell phone",
    "microwave",
    "oven",
    "toaster",
    "sink",
    "refrigerator",
    "book",
    "clock",
    "vase",
    "scissors",
    "teddy bear",
    "hair drier",
    "toothbrush",
];

/// Default display name of a category, when one exists.
pub fn default_label(id: CategoryId) -> Option<&'static str> {
    id.0.checked_sub(1)
        .and_then(|i| CATEGORY_NAMES.get(i))
        .copied()
}

const MEAN_FLOOR: f64 = 0.02;
const MEAN_CEIL: f64 = 0.98;

/// Inclusive 1-based category range sharing a class mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassBound {
    pub first: usize,
    pub last: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoolSpec {
    pub n_categories: usize,
    pub per_category: usize,
    /// Empty means the default four-class layout (see [`default_class_bounds`]).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub class_bounds: Vec<ClassBound>,
    pub jitter: f64,
    pub concentration: f64,
    pub seed: u64,
}

impl Default for PoolSpec {
    fn default() -> Self {
        Self {
            n_categories: 80,
            per_category: 250,
            class_bounds: Vec::new(),
            jitter: 0.05,
            concentration: 10.0,
            seed: 42,
        }
    }
}

/// Four-class layout for `n` categories.
///
/// Up to 80 categories the fixed 20-wide class ranges are truncated at `n`,
/// so category `i` has the same class for every `n ≥ i`. Beyond 80 the four
/// classes are stretched proportionally.
pub fn default_class_bounds(n: usize) -> Vec<ClassBound> {
    if n <= 80 {
        CLASS_MEANS
            .iter()
            .filter(|&&(first, _, _)| first <= n)
            .map(|&(first, last, mean)| ClassBound {
                first,
                last: last.min(n),
                mean,
            })
            .collect()
    } else {
        (0..4)
            .map(|c| ClassBound {
                first: c * n / 4 + 1,
                last: (c + 1) * n / 4,
                mean: CLASS_MEANS[c].2,
            })
            .collect()
    }
}

impl PoolSpec {
    pub fn new(n_categories: usize, seed: u64) -> Self {
        Self {
            n_categories,
            seed,
            ..Self::default()
        }
    }

    pub fn resolved_class_bounds(&self) -> Vec<ClassBound> {
        if self.class_bounds.is_empty() {
            default_class_bounds(self.n_categories)
        } else {
            self.class_bounds.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_categories == 0 {
            return Err(Error::config("n_categories must be >= 1"));
        }
        if self.per_category == 0 {
            return Err(Error::config("per_category must be >= 1"));
        }
        if !(self.jitter.is_finite() && self.jitter >= 0.0) {
            return Err(Error::config(format!(
                "jitter = {} must be >= 0",
                self.jitter
            )));
        }
        if !(self.concentration.is_finite() && self.concentration > 0.0) {
            return Err(Error::config(format!(
                "concentration = {} must be > 0",
                self.concentration
            )));
        }
        let mut bounds = self.resolved_class_bounds();
        bounds.sort_by_key(|b| b.first);
        let mut next = 1;
        for b in &bounds {
            if b.first != next || b.last < b.first {
                return Err(Error::config(format!(
                    "class ranges must partition 1..={}; bad range {}..={}",
                    self.n_categories, b.first, b.last
                )));
            }
            if !(b.mean > 0.0 && b.mean < 1.0) {
                return Err(Error::config(format!(
                    "class mean {} outside (0, 1)",
                    b.mean
                )));
            }
            next = b.last + 1;
        }
        if next != self.n_categories + 1 {
            return Err(Error::config(format!(
                "class ranges cover 1..{} but the pool has {} categories",
                next - 1,
                self.n_categories
            )));
        }
        Ok(())
    }
}

/// Per-category product populations.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptPool {
    categories: Vec<Vec<QualityObservation>>,
    true_mean: Vec<f64>,
    labels: Option<Vec<String>>,
}

fn mean_q(products: &[QualityObservation]) -> f64 {
    products.iter().map(QualityObservation::q).sum::<f64>() / products.len() as f64
}

/// Address of one bundle draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DrawKey {
    pub seed: u64,
    pub t: u64,
    pub category: CategoryId,
}

impl PromptPool {
    pub fn from_categories(categories: Vec<Vec<QualityObservation>>) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::config("pool needs at least one category"));
        }
        if let Some(i) = categories.iter().position(Vec::is_empty) {
            return Err(Error::config(format!("category {} has no products", i + 1)));
        }
        let true_mean = categories.iter().map(|c| mean_q(c)).collect();
        Ok(Self {
            categories,
            true_mean,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.categories.len() {
            return Err(Error::config(format!(
                "{} labels for {} categories",
                labels.len(),
                self.categories.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_categories(&self) -> usize {
        self.categories.len()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn products(&self, category: CategoryId) -> Result<&[QualityObservation]> {
        category
            .0
            .checked_sub(1)
            .and_then(|i| self.categories.get(i))
            .map(Vec::as_slice)
            .ok_or(Error::UnknownCategory(category))
    }

    pub fn true_mean(&self, category: CategoryId) -> Result<f64> {
        self.products(category)?;
        Ok(self.true_mean[category.index()])
    }

    /// Empirical mean quality of every category, in id order.
    pub fn true_means(&self) -> &[f64] {
        &self.true_mean
    }

    /// The first `n` categories.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.categories.len() {
            return Err(Error::config(format!(
                "cannot take {n} categories from a pool of {}",
                self.categories.len()
            )));
        }
        Ok(Self {
            categories: self.categories[..n].to_vec(),
            true_mean: self.true_mean[..n].to_vec(),
            labels: self.labels.as_ref().map(|l| l[..n].to_vec()),
        })
    }

    /// Draws `m` products uniformly with replacement.
    ///
    /// Slot `j` is a pure function of `(seed, t, category, j)`, so any two runs
    /// sharing a seed see the same bundle whenever they pick the same category
    /// at the same iteration.
    pub fn draw_bundle(&self, m: usize, key: DrawKey) -> Result<Vec<QualityObservation>> {
        let products = self.products(key.category)?;
        if m == 0 {
            return Err(Error::config("bundle size must be >= 1"));
        }
        Ok((0..m as u64)
            .map(|slot| {
                let k = stream_key(&[tag::BUNDLE, key.seed, key.t, key.category.0 as u64, slot]);
                products[uniform_index(k, products.len())]
            })
            .collect())
    }
}

pub fn generate_pool(spec: &PoolSpec) -> Result<PromptPool> {
    spec.validate()?;
    let bounds = spec.resolved_class_bounds();
    let kappa = spec.concentration;
    let mut categories = Vec::with_capacity(spec.n_categories);
    for i in 0..spec.n_categories {
        let id = i + 1;
        let class_mean = bounds
            .iter()
            .find(|b| (b.first..=b.last).contains(&id))
            .map(|b| b.mean)
            .expect("validated partition");
        let mut rng = keyed_rng(&[tag::POOL, spec.seed, id as u64]);
        let offset = if spec.jitter > 0.0 {
            rng.random_range(-spec.jitter..=spec.jitter)
        } else {
            0.0
        };
        let mu = (class_mean + offset).clamp(MEAN_FLOOR, MEAN_CEIL);
        let beta = Beta::new(mu * kappa, (1.0 - mu) * kappa)
            .map_err(|e| Error::config(format!("beta({mu}, {kappa}): {e}")))?;
        let products = (0..spec.per_category)
            .map(|_| {
                let phi: f64 = beta.sample(&mut rng);
                let sigma: f64 = beta.sample(&mut rng);
                QualityObservation::new(phi.clamp(0.0, 1.0), sigma.clamp(0.0, 1.0))
            })
            .collect::<Result<Vec<_>>>()?;
        categories.push(products);
    }
    let pool = PromptPool::from_categories(categories)?;
    if spec.n_categories <= CATEGORY_NAMES.len() {
        let labels = CATEGORY_NAMES[..spec.n_categories]
            .iter()
            .map(|s| s.to_string())
            .collect();
        pool.with_labels(labels)
    } else {
        Ok(pool)
    }
}

#[derive(Serialize, Deserialize)]
struct PoolRow {
    category_id: usize,
    prompt_id: usize,
    phi: f64,
    sigma: f64,
}

pub fn write_pool_csv<W: Write>(pool: &PromptPool, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for (i, products) in pool.categories.iter().enumerate() {
        for (j, obs) in products.iter().enumerate() {
            // `f64` Display is the shortest string that round-trips exactly.
            w.serialize(PoolRow {
                category_id: i + 1,
                prompt_id: j + 1,
                phi: obs.phi(),
                sigma: obs.sigma(),
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_pool_csv<R: Read>(input: R) -> Result<PromptPool> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(input);
    let mut by_category: BTreeMap<usize, Vec<QualityObservation>> = BTreeMap::new();
    for (row_no, record) in rdr.deserialize::<PoolRow>().enumerate() {
        // Line 1 is the header.
        let line = row_no as u64 + 2;
        let row = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if row.category_id == 0 {
            return Err(Error::Parse {
                line,
                message: "category_id is 1-based".into(),
            });
        }
        let obs = QualityObservation::new(row.phi, row.sigma).map_err(|e| Error::Parse {
            line,
            message: format!(
                "row category {} prompt {}: {e}",
                row.category_id, row.prompt_id
            ),
        })?;
        by_category.entry(row.category_id).or_default().push(obs);
    }
    if by_category.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no records".into(),
        });
    }
    let n = *by_category.keys().next_back().expect("nonempty");
    if by_category.len() != n {
        let missing = (1..=n).find(|i| !by_category.contains_key(i)).unwrap_or(n);
        return Err(Error::Parse {
            line: 1,
            message: format!("category ids must be contiguous from 1; {missing} is missing"),
        });
    }
    PromptPool::from_categories(by_category.into_values().collect())
}

/// Sidecar path holding the category labels of a pool file.
pub fn labels_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".labels.json");
    PathBuf::from(name)
}

pub fn save_pool(pool: &PromptPool, path: &Path) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    write_pool_csv(pool, file)?;
    if let Some(labels) = pool.labels() {
        let map: BTreeMap<usize, &str> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (i + 1, l.as_str()))
            .collect();
        std::fs::write(
            labels_path(path),
            serde_json::to_string_pretty(&map)? + "\n",
        )?;
    }
    Ok(())
}

pub fn load_pool(path: &Path) -> Result<PromptPool> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::PoolNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(e.into()),
    };
    let pool = read_pool_csv(BufReader::new(file))?;
    let sidecar = labels_path(path);
    if sidecar.exists() {
        let map: BTreeMap<usize, String> =
            serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
        let labels = (1..=pool.n_categories())
            .map(|i| map.get(&i).cloned().unwrap_or_default())
            .collect();
        return pool.with_labels(labels);
    }
    Ok(pool)
}
