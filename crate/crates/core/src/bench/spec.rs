//! Experiment descriptions and the flat `key = value` config format.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::generators::{self, SigmaProfile};
use crate::baselines::MethodKind;
use crate::drm::DrmType;
use crate::error::{Error, Result};
use crate::sketch::Oversampling;
use crate::tensor::{RankTuple, Shape, StructuredTensor};

/// Parse a seed written in decimal or as `0x`-prefixed hex. Underscores are ignored.
pub fn parse_seed(s: &str) -> Result<u64> {
    let clean: String = s.trim().chars().filter(|&c| c != '_').collect();
    let parsed = match clean.strip_prefix("0x").or_else(|| clean.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => clean.parse(),
    };
    parsed.map_err(|_| Error::Config(format!("bad seed {s:?}")))
}

/// Ordered `key = value` pairs. Blank lines and `#` comments are skipped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KvConfig {
    entries: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = KvConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k, v);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Keys are case-insensitive and `-` is read as `_`.
    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(normalize_key(key), value.trim().to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize_key(key)).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse().map_err(|_| Error::Config(format!("bad value {v:?} for {key}"))))
            .transpose()
    }

    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn seed(&self, key: &str) -> Result<Option<u64>> {
        self.get(key).map(parse_seed).transpose()
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.get(key)
            .map(|v| {
                split_top_level(v)
                    .into_iter()
                    .map(|item| item.parse().map_err(|_| Error::Config(format!("bad item {item:?} in {key}"))))
                    .collect()
            })
            .transpose()
    }
}

impl fmt::Display for KvConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// Split on commas that are not inside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.retain(|x| !x.is_empty());
    out
}

/// A uniform rank or an explicit rank tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RankSpec {
    Scalar(usize),
    Tuple(Vec<usize>),
}

impl RankSpec {
    /// Ranks for `shape`, clipped to `min(r, Π_{j≤µ} n_j, Π_{j>µ} n_j)`.
    pub fn resolve(&self, shape: &Shape) -> Result<RankTuple> {
        match self {
            RankSpec::Scalar(r) => RankTuple::clipped(shape, *r),
            RankSpec::Tuple(v) => {
                let t = RankTuple::new(v.clone())?;
                if t.len() + 1 != shape.order() {
                    return Err(Error::InvalidRanks(format!("{} ranks for an order-{} tensor", t.len(), shape.order())));
                }
                RankTuple::new(v.iter().enumerate().map(|(i, &r)| r.min(shape.max_rank(i + 1))).collect())
            }
        }
    }
}

impl fmt::Display for RankSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankSpec::Scalar(r) => write!(f, "{r}"),
            RankSpec::Tuple(v) => {
                let parts: Vec<String> = v.iter().map(usize::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

impl FromStr for RankSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("bad rank {s:?}"));
        if let Some(inner) = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
            let v = inner
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| bad()))
                .collect::<Result<Vec<usize>>>()?;
            return Ok(RankSpec::Tuple(v));
        }
        s.parse().map(RankSpec::Scalar).map_err(|_| bad())
    }
}

/// Parse a rank grid: comma-separated scalars, inclusive ranges `a..b` and tuples `(x,y,z)`.
pub fn parse_rank_grid(s: &str) -> Result<Vec<RankSpec>> {
    let mut out = Vec::new();
    for item in split_top_level(s) {
        if let Some((a, b)) = item.split_once("..") {
            let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad range {item:?}")));
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if a > b {
                return Err(Error::Config(format!("empty range {item:?}")));
            }
            out.extend((a..=b).map(RankSpec::Scalar));
        } else {
            out.push(item.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty rank grid".into()));
    }
    Ok(out)
}

/// How to build the input tensor of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub enum Recipe {
    Hilbert { d: usize, n: usize },
    SqrtSum { d: usize, n: usize, a: f64, b: f64 },
    TtPlusSparse { d: usize, n: usize, rank: usize, nnz: usize },
    SumOfTt { d: usize, n: usize, rank: usize, count: usize, decay: f64 },
    RandomCp { d: usize, n: usize, terms: usize, decay: f64 },
    DecayingTt { d: usize, n: usize, rank: usize, sigma_max: f64, sigma_min: f64 },
}

impl Recipe {
    pub const NAMES: [&'static str; 6] = ["hilbert", "sqrt_sum", "tt_plus_sparse", "sum_of_tt", "random_cp", "decaying_tt"];

    /// Read the recipe named by `recipe`, filling unset parameters with the
    /// standard configuration of that test tensor.
    pub fn from_config(cfg: &KvConfig) -> Result<Self> {
        let kind = cfg.get("recipe").ok_or_else(|| Error::Config("missing key: recipe".into()))?;
        let kind = normalize_key(kind);
        Ok(match kind.as_str() {
            "hilbert" => Recipe::Hilbert {
                d: cfg.parsed_or("d", 7)?,
                n: cfg.parsed_or("n", 5)?,
            },
            "sqrt_sum" | "sqrt" => Recipe::SqrtSum {
                d: cfg.parsed_or("d", 5)?,
                n: cfg.parsed_or("n", 10)?,
                a: cfg.parsed_or("a", 0.2)?,
                b: cfg.parsed_or("b", 2.0)?,
            },
            "tt_plus_sparse" => Recipe::TtPlusSparse {
                d: cfg.parsed_or("d", 5)?,
                n: cfg.parsed_or("n", 10)?,
                rank: cfg.parsed_or("tensor_rank", 5)?,
                nnz: cfg.parsed_or("nnz", 100)?,
            },
            "sum_of_tt" => Recipe::SumOfTt {
                d: cfg.parsed_or("d", 5)?,
                n: cfg.parsed_or("n", 10)?,
                rank: cfg.parsed_or("tensor_rank", 3)?,
                count: cfg.parsed_or("count", 20)?,
                decay: cfg.parsed_or("decay", 10.0)?,
            },
            "random_cp" | "cp" => Recipe::RandomCp {
                d: cfg.parsed_or("d", 5)?,
                n: cfg.parsed_or("n", 10)?,
                terms: cfg.parsed_or("terms", 100)?,
                decay: cfg.parsed_or("decay", 5.0)?,
            },
            "decaying_tt" => {
                let rank = cfg.parsed_or("tensor_rank", 30)?;
                let top = (rank as f64).sqrt();
                Recipe::DecayingTt {
                    d: cfg.parsed_or("d", 5)?,
                    n: cfg.parsed_or("n", 10)?,
                    rank,
                    sigma_max: cfg.parsed_or("sigma_max", top)?,
                    sigma_min: cfg.parsed_or("sigma_min", top * 1e-20)?,
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown recipe {other:?}; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn shape(&self) -> Result<Shape> {
        let (d, n) = match *self {
            Recipe::Hilbert { d, n }
            | Recipe::SqrtSum { d, n, .. }
            | Recipe::TtPlusSparse { d, n, .. }
            | Recipe::SumOfTt { d, n, .. }
            | Recipe::RandomCp { d, n, .. }
            | Recipe::DecayingTt { d, n, .. } => (d, n),
        };
        Shape::uniform(d, n)
    }

    /// Build the tensor. Deterministic recipes ignore `seed`.
    pub fn build(&self, seed: u64) -> Result<StructuredTensor> {
        Ok(match *self {
            Recipe::Hilbert { d, n } => generators::gen_hilbert(d, n)?.into(),
            Recipe::SqrtSum { d, n, a, b } => generators::gen_sqrt_sum(d, n, a, b)?.into(),
            Recipe::TtPlusSparse { d, n, rank, nnz } => generators::tt_plus_sparse(d, n, rank, nnz, seed)?,
            Recipe::SumOfTt { d, n, rank, count, decay } => generators::sum_of_tt(d, n, rank, count, decay, seed)?,
            Recipe::RandomCp { d, n, terms, decay } => generators::random_cp(d, n, terms, decay, seed)?.into(),
            Recipe::DecayingTt { d, n, rank, sigma_max, sigma_min } => {
                let profile = if sigma_max == sigma_min {
                    SigmaProfile::Flat(sigma_max)
                } else {
                    SigmaProfile::Exponential { max: sigma_max, min: sigma_min }
                };
                generators::gen_decaying_tt(d, n, rank, profile, seed)?.into()
            }
        })
    }
}

/// One benchmark: a tensor, the methods to run on it and the grid to sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub recipe: Recipe,
    pub methods: Vec<MethodKind>,
    /// DRM families tried for each randomized method.
    pub drms: Vec<DrmType>,
    pub ranks: Vec<RankSpec>,
    /// Rules tried for each method that oversamples.
    pub oversampling: Vec<Oversampling>,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.ranks.is_empty() {
            return Err(Error::Config("rank grid is empty".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods given".into()));
        }
        if self.drms.is_empty() || self.oversampling.is_empty() {
            return Err(Error::Config("need at least one DRM kind and one oversampling rule".into()));
        }
        Ok(())
    }

    pub fn from_config(cfg: &KvConfig) -> Result<Self> {
        let spec = ExperimentSpec {
            name: cfg.get("name").unwrap_or("experiment").to_string(),
            recipe: Recipe::from_config(cfg)?,
            methods: cfg
                .list("methods")?
                .unwrap_or_else(|| vec![MethodKind::TtSvd, MethodKind::Stta, MethodKind::TtHmt]),
            drms: cfg.list("drm")?.unwrap_or_else(|| vec![DrmType::Gaussian, DrmType::Tt]),
            ranks: parse_rank_grid(cfg.get("ranks").ok_or_else(|| Error::Config("missing key: ranks".into()))?)?,
            oversampling: cfg.list("oversampling")?.unwrap_or_else(|| vec![Oversampling::default()]),
            trials: cfg.parsed_or("trials", 30)?,
            seed: cfg.seed("seed")?.unwrap_or(0),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_config(&KvConfig::load(path)?)
    }
}

const PRESETS: [&str; 9] = [
    "hilbert",
    "sqrt_sum",
    "tt_plus_sparse",
    "sum_of_tt",
    "random_cp",
    "oversampling",
    "order_scaling",
    "otts",
    "timing",
];

/// Desk-scale versions of the standard experiments. `order_scaling` expands
/// to one spec per order. `full_size` only affects `timing`.
pub fn preset(name: &str, full_size: bool) -> Result<Vec<ExperimentSpec>> {
    let mut cfg = KvConfig::default();
    let set = |cfg: &mut KvConfig, pairs: &[(&str, &str)]| pairs.iter().for_each(|(k, v)| cfg.set(k, v));
    set(&mut cfg, &[("name", name), ("seed", "0x5EED"), ("trials", "30")]);
    match normalize_key(name).as_str() {
        "hilbert" => set(&mut cfg, &[("recipe", "hilbert"), ("ranks", "2..6")]),
        "sqrt_sum" => set(&mut cfg, &[("recipe", "sqrt_sum"), ("ranks", "2..8")]),
        "tt_plus_sparse" => set(&mut cfg, &[("recipe", "tt_plus_sparse"), ("ranks", "1..10")]),
        "sum_of_tt" => set(&mut cfg, &[("recipe", "sum_of_tt"), ("ranks", "1..15")]),
        "random_cp" => set(&mut cfg, &[("recipe", "random_cp"), ("ranks", "1..15")]),
        "oversampling" => set(
            &mut cfg,
            &[
                ("recipe", "sum_of_tt"),
                ("ranks", "10"),
                ("methods", "stta"),
                ("drm", "gaussian"),
                ("oversampling", "r+2, r+4, r+6, r+8, r+10, r+12, r+14, r+16, r+18, r+20"),
            ],
        ),
        "otts" => set(
            &mut cfg,
            &[("recipe", "sum_of_tt"), ("ranks", "4, 6, 8"), ("methods", "stta, otts"), ("drm", "gaussian")],
        ),
        "order_scaling" => {
            set(
                &mut cfg,
                &[
                    ("recipe", "decaying_tt"),
                    ("n", "10"),
                    ("tensor_rank", "30"),
                    ("ranks", "10"),
                    ("methods", "tt_svd, stta, tt_hmt"),
                    ("drm", "tt"),
                ],
            );
            return (3..=10)
                .map(|d| {
                    let mut c = cfg.clone();
                    c.set("name", &format!("order_scaling_d{d}"));
                    c.set("d", &d.to_string());
                    ExperimentSpec::from_config(&c)
                })
                .collect();
        }
        "timing" => {
            let (n, r) = if full_size { ("150", "150") } else { ("50", "40") };
            set(
                &mut cfg,
                &[
                    ("recipe", "decaying_tt"),
                    ("n", n),
                    ("tensor_rank", r),
                    ("sigma_max", "1"),
                    ("sigma_min", "1e-10"),
                    ("ranks", if full_size { "10, 25, 50, 75, 100, 150" } else { "5, 10, 20, 30, 40" }),
                    ("methods", "stta, tt_hmt"),
                    ("drm", "tt"),
                    ("oversampling", "r+3, 2r"),
                    ("trials", "20"),
                ],
            );
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    }
    Ok(vec![ExperimentSpec::from_config(&cfg)?])
}

pub fn preset_names() -> &'static [&'static str] {
    &PRESETS
}
