//! Reference computations written independently of the library code paths.
#![allow(dead_code)]

use std::collections::HashMap;

/// `(I, H, H', Î)` in bits, evaluated directly from two label lists.
pub fn direct_overlap(a: &[u32], b: &[u32]) -> (f64, f64, f64, f64) {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let mut joint: HashMap<(u32, u32), u64> = HashMap::new();
    let mut ca: HashMap<u32, u64> = HashMap::new();
    let mut cb: HashMap<u32, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
    }
    let entropy = |m: &HashMap<u32, u64>| {
        -m.values()
            .map(|&c| c as f64 / n)
            .map(|p| p * p.log2())
            .sum::<f64>()
    };
    let mut i = 0.0;
    for (&(x, y), &c) in &joint {
        let p = c as f64 / n;
        i += p * (p / ((ca[&x] as f64 / n) * (cb[&y] as f64 / n))).log2();
    }
    let (h, hp) = (entropy(&ca), entropy(&cb));
    let nmi = if h + hp == 0.0 {
        1.0
    } else {
        2.0 * i / (h + hp)
    };
    (i, h, hp, nmi)
}

/// Same quantities from a table of joint probabilities, via `I = H + H' - H(joint)`.
pub fn overlap_from_joint(p: &[&[f64]]) -> (f64, f64, f64, f64) {
    let plogp = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    let rows: Vec<f64> = p.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..p[0].len())
        .map(|j| p.iter().map(|r| r[j]).sum())
        .collect();
    let h: f64 = rows.iter().map(|&x| plogp(x)).sum();
    let hp: f64 = cols.iter().map(|&x| plogp(x)).sum();
    let hj: f64 = p.iter().flat_map(|r| r.iter()).map(|&x| plogp(x)).sum();
    let i = h + hp - hj;
    let nmi = if h + hp == 0.0 {
        1.0
    } else {
        2.0 * i / (h + hp)
    };
    (i, h, hp, nmi)
}

/// Token labels realizing an integer count table row by row.
pub fn labels_from_counts(counts: &[&[u32]]) -> (Vec<u32>, Vec<u32>) {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (t, row) in counts.iter().enumerate() {
        for (s, &n) in row.iter().enumerate() {
            for _ in 0..n {
                a.push(t as u32);
                b.push(s as u32);
            }
        }
    }
    (a, b)
}

/// Every labeling of `n` tokens over `labels` symbols, in base-`labels` counting order.
pub fn all_labelings(n: usize, labels: u32) -> impl Iterator<Item = Vec<u32>> {
    let total = (labels as usize).pow(n as u32);
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let digit = (code % labels as usize) as u32;
                code /= labels as usize;
                digit
            })
            .collect()
    })
}

/// `x (x+1) ... (x+n-1)`
fn rising(x: f64, n: u32) -> f64 {
    (0..n).map(|i| x + i as f64).product()
}

/// Exact collapsed posterior `P(z | w)` of LDA over every assignment of the flattened
/// tokens, indexed by `Σ_i z_i K^i`. Uses the Dirichlet-multinomial marginal
/// likelihood of whole count tables rather than per-token conditionals.
pub fn exact_collapsed_posterior(
    docs: &[Vec<u32>],
    k: usize,
    v: usize,
    alpha: f64,
    beta: f64,
) -> Vec<f64> {
    let tokens: Vec<(usize, usize)> = docs
        .iter()
        .enumerate()
        .flat_map(|(d, doc)| doc.iter().map(move |&w| (d, w as usize)))
        .collect();
    let n = tokens.len();
    let configs = k.pow(n as u32);
    let mut weights = Vec::with_capacity(configs);
    for code in 0..configs {
        let z: Vec<usize> = (0..n).map(|i| (code / k.pow(i as u32)) % k).collect();
        let mut n_dt = vec![vec![0u32; k]; docs.len()];
        let mut n_tw = vec![vec![0u32; v]; k];
        for (&(d, w), &t) in tokens.iter().zip(&z) {
            n_dt[d][t] += 1;
            n_tw[t][w] += 1;
        }
        let mut p = 1.0;
        for (d, doc) in docs.iter().enumerate() {
            p /= rising(k as f64 * alpha, doc.len() as u32);
            p *= n_dt[d].iter().map(|&c| rising(alpha, c)).product::<f64>();
        }
        for row in &n_tw {
            p /= rising(v as f64 * beta, row.iter().sum());
            p *= row.iter().map(|&c| rising(beta, c)).product::<f64>();
        }
        weights.push(p);
    }
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}

pub fn encode_assignment(z: &[u32], k: usize) -> usize {
    z.iter()
        .enumerate()
        .map(|(i, &t)| t as usize * k.pow(i as u32))
        .sum()
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}
