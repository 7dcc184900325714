//! Frozen hash vectors from tests/data/gen_hash_vectors.py.

use tt_sketch::drm::{hash_to_normal, hashed_gaussian_row, mantissa_uniform, mode_seed, splitmix64, DrmChain, Side};
use tt_sketch::tensor::{RankTuple, Shape};

const VECTORS: &str = include_str!("../data/hash_vectors.txt");
const CHAIN_DIMS: [usize; 4] = [4, 3, 5, 2];

fn hex(s: &str) -> u64 {
    u64::from_str_radix(s, 16).unwrap()
}

fn csv(s: &str) -> Vec<usize> {
    s.split(',').map(|x| x.parse().unwrap()).collect()
}

fn as_bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Outcome of replaying every vector: counts per record kind
/// (splitmix64, uniform, normal, row, chain) and the lines that differ.
pub struct VectorReport {
    pub counts: [usize; 5],
    pub mismatches: Vec<String>,
}

pub fn replay_hash_vectors() -> VectorReport {
    let mut report = VectorReport { counts: [0; 5], mismatches: Vec::new() };
    for line in VECTORS.lines().filter(|l| !l.trim().is_empty()) {
        let (lhs, rhs) = line.split_once(" : ").unwrap();
        let f: Vec<&str> = lhs.split_whitespace().collect();
        let want: Vec<u64> = rhs.split_whitespace().map(hex).collect();
        let (slot, got) = match f[0] {
            "splitmix64" => (0, vec![splitmix64(hex(f[1]))]),
            "uniform" => (1, vec![mantissa_uniform(hex(f[1])).to_bits()]),
            "normal" => (2, vec![hash_to_normal(hex(f[1])).to_bits()]),
            "row" => {
                let row = hashed_gaussian_row(&csv(f[1]), &csv(f[2]), f[3].parse().unwrap(), hex(f[4])).unwrap();
                (3, as_bits(&row))
            }
            "chain" => {
                let side = if f[2] == "0" { Side::Left } else { Side::Right };
                let mu: usize = f[3].parse().unwrap();
                let r: usize = f[5].parse().unwrap();
                let shape = Shape::new(CHAIN_DIMS.to_vec()).unwrap();
                let ranks = RankTuple::uniform(CHAIN_DIMS.len(), r).unwrap();
                let chain = DrmChain::gaussian(&shape, &ranks, side, hex(f[1])).unwrap();
                let row = as_bits(&chain.row(mu, &csv(f[4])).unwrap());
                let dims = match side {
                    Side::Left => &CHAIN_DIMS[..mu],
                    Side::Right => &CHAIN_DIMS[mu..],
                };
                let direct = hashed_gaussian_row(&csv(f[4]), dims, r, mode_seed(hex(f[1]), mu, side.tag())).unwrap();
                if as_bits(&direct) != row {
                    report.mismatches.push(format!("{line} (direct row differs from chain row)"));
                }
                (4, row)
            }
            other => panic!("unknown record {other}"),
        };
        report.counts[slot] += 1;
        if got != want {
            report.mismatches.push(line.to_string());
        }
    }
    report
}
