//! Finitely generated matrix groups and word-ball enumeration.

mod dynamics;
mod limit;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::projlin::{canonical_matrix, row_major, ProjectiveMap, MAP_EQ_TOL};

pub use dynamics::{
    centralizer_fixed_subspace, is_rank_one, minimal_translation_sample, rank_one_approximation, simplex_edge_projection,
    CentralizerSubspace, Component, RankOneApprox, RankOneReport,
};
pub use limit::{
    boundary_orbit_density, cocompactness_radius, convex_core_approx, orbital_limit_set, LimitSetSample, Witness,
    DEFAULT_CLUSTER_TOL, LIMIT_DEPTH,
};
pub(crate) use limit::cluster_signless;

/// Ball elements beyond this count raise a budget error.
pub const DEFAULT_BALL_BUDGET: usize = 2_000_000;

const KEY_QUANTUM: f64 = 1e-6;
const KEY_EDGE: f64 = 1e-8;
/// Normalized lifts closer than this are identified.
pub const DEDUP_TOL: f64 = 1e-9;

/// Enumerated ball, stored layer by layer.
#[derive(Debug)]
pub struct Ball {
    elements: Vec<ProjectiveMap>,
    words: Vec<Vec<u16>>,
    layer_end: Vec<usize>,
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.layer_end.len() - 1
    }

    /// Number of elements of word length ≤ l.
    pub fn count(&self, l: usize) -> usize {
        self.layer_end[l.min(self.radius())]
    }

    pub fn element(&self, i: usize) -> &ProjectiveMap {
        &self.elements[i]
    }

    pub fn word(&self, i: usize) -> &[u16] {
        &self.words[i]
    }

    pub fn word_length(&self, i: usize) -> usize {
        self.words[i].len()
    }
}

/// Elements of word length ≤ `radius`, a prefix of a cached ball.
#[derive(Clone, Debug)]
pub struct BallView {
    ball: Arc<Ball>,
    len: usize,
    radius: usize,
}

impl BallView {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn element(&self, i: usize) -> &ProjectiveMap {
        self.ball.element(i)
    }

    pub fn word(&self, i: usize) -> &[u16] {
        self.ball.word(i)
    }

    pub fn word_length(&self, i: usize) -> usize {
        self.ball.word_length(i)
    }

    pub fn elements(&self) -> &[ProjectiveMap] {
        &self.ball.elements[..self.len]
    }

    /// Index range of the elements of exact word length l.
    pub fn sphere(&self, l: usize) -> std::ops::Range<usize> {
        if l > self.radius {
            return self.len..self.len;
        }
        let start = if l == 0 { 0 } else { self.ball.layer_end[l - 1] };
        start..self.ball.layer_end[l]
    }
}

#[derive(Debug)]
pub struct MatrixGroup {
    generators: Vec<ProjectiveMap>,
    labels: Vec<String>,
    // the given generators come first, appended inverses after
    primary: usize,
    dim: usize,
    budget: usize,
    cache: Mutex<Option<Arc<Ball>>>,
}

impl Clone for MatrixGroup {
    fn clone(&self) -> Self {
        Self {
            generators: self.generators.clone(),
            labels: self.labels.clone(),
            primary: self.primary,
            dim: self.dim,
            budget: self.budget,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

fn inverse_label(l: &str) -> String {
    let mut cs = l.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => c.to_ascii_uppercase().to_string(),
        (Some(c), None) if c.is_ascii_uppercase() => c.to_ascii_lowercase().to_string(),
        _ => match l.strip_suffix("^-1") {
            Some(s) => s.to_string(),
            None => format!("{l}^-1"),
        },
    }
}

impl MatrixGroup {
    /// Group generated by `gens`; missing formal inverses are appended.
    pub fn new(gens: Vec<ProjectiveMap>, labels: Option<Vec<String>>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Precondition("a group needs at least one generator".into()));
        }
        let dim = gens[0].dim();
        if gens.iter().any(|g| g.dim() != dim) {
            return Err(Error::Precondition("generators have different dimensions".into()));
        }
        let labels = match labels {
            Some(l) if l.len() == gens.len() => l,
            Some(l) => return Err(Error::Parse(format!("{} labels for {} generators", l.len(), gens.len()))),
            None => (0..gens.len()).map(|i| default_label(i)).collect(),
        };
        let mut all = gens.clone();
        let mut all_labels = labels.clone();
        for (g, l) in gens.iter().zip(&labels) {
            let inv = g.inverse();
            if !all.iter().any(|h| h.approx_eq(&inv, MAP_EQ_TOL)) {
                all.push(inv);
                all_labels.push(inverse_label(l));
            }
        }
        Ok(Self { generators: all, labels: all_labels, primary: gens.len(), dim, budget: DEFAULT_BALL_BUDGET, cache: Mutex::new(None) })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[ProjectiveMap] {
        &self.generators
    }

    /// Number of generators given at construction.
    pub fn generator_count(&self) -> usize {
        self.primary
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn word_string(&self, word: &[u16]) -> String {
        if word.is_empty() {
            return "id".into();
        }
        let parts: Vec<&str> = word.iter().map(|&i| self.labels[i as usize].as_str()).collect();
        if self.labels.iter().all(|l| l.chars().count() == 1) {
            parts.concat()
        } else {
            parts.join(".")
        }
    }

    /// Parses a word: labels joined by '.', or one label per character.
    pub fn parse_word(&self, s: &str) -> Result<Vec<u16>> {
        let s = s.trim();
        if s.is_empty() || s == "id" {
            return Ok(vec![]);
        }
        let tokens: Vec<String> =
            if s.contains('.') { s.split('.').map(str::to_string).collect() } else { s.chars().map(String::from).collect() };
        tokens
            .iter()
            .map(|t| {
                self.labels
                    .iter()
                    .position(|l| l == t)
                    .map(|i| i as u16)
                    .ok_or_else(|| Error::Parse(format!("unknown generator label `{t}` in word `{s}`")))
            })
            .collect()
    }

    pub fn evaluate(&self, word: &[u16]) -> ProjectiveMap {
        word.iter().fold(ProjectiveMap::identity(self.dim), |acc, &i| acc.compose(&self.generators[i as usize]))
    }

    /// All distinct products of at most `l` generators, in deterministic order.
    pub fn ball(&self, l: usize) -> Result<BallView> {
        let mut guard = self.cache.lock().unwrap();
        if let Some(b) = guard.as_ref() {
            if b.radius() >= l {
                return Ok(BallView { len: b.count(l), radius: l, ball: b.clone() });
            }
        }
        let (mut elements, mut words, mut layer_end) = match guard.take() {
            Some(b) => {
                let b = Arc::try_unwrap(b).unwrap_or_else(|a| Ball {
                    elements: a.elements.clone(),
                    words: a.words.clone(),
                    layer_end: a.layer_end.clone(),
                });
                (b.elements, b.words, b.layer_end)
            }
            None => (vec![ProjectiveMap::identity(self.dim)], vec![vec![]], vec![1]),
        };
        let mut canon: Vec<Vec<f64>> = elements.iter().map(|g| row_major(&canonical_matrix(g.lift()))).collect();
        let mut index: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, c) in canon.iter().enumerate() {
            index.entry(quantize(c)).or_default().push(i);
        }
        let mut status = Ok(());
        while layer_end.len() <= l {
            let start = if layer_end.len() == 1 { 0 } else { layer_end[layer_end.len() - 2] };
            let end = *layer_end.last().unwrap();
            let ng = self.generators.len();
            let cands: Vec<(usize, u16, ProjectiveMap, Vec<f64>)> = (start * ng..end * ng)
                .into_par_iter()
                .map(|k| {
                    let (i, s) = (k / ng, k % ng);
                    let g = elements[i].compose(&self.generators[s]);
                    let c = row_major(&canonical_matrix(g.lift()));
                    (i, s as u16, g, c)
                })
                .collect();
            for (i, s, g, c) in cands {
                if find(&index, &canon, &c).is_some() {
                    continue;
                }
                if elements.len() >= self.budget {
                    status = Err(Error::Budget(format!(
                        "ball enumeration exceeded {} elements while building word length {}",
                        self.budget,
                        layer_end.len()
                    )));
                    break;
                }
                let mut w = words[i].clone();
                w.push(s);
                index.entry(quantize(&c)).or_default().push(elements.len());
                elements.push(g);
                words.push(w);
                canon.push(c);
            }
            if status.is_err() {
                // keep only complete layers in the cache
                let keep = *layer_end.last().unwrap();
                elements.truncate(keep);
                words.truncate(keep);
                break;
            }
            layer_end.push(elements.len());
        }
        let ball = Arc::new(Ball { elements, words, layer_end });
        *guard = Some(ball.clone());
        status?;
        Ok(BallView { len: ball.count(l), radius: l, ball })
    }

    /// Elements with their word lengths.
    pub fn enumerate_ball(&self, l: usize) -> Result<Vec<(ProjectiveMap, usize)>> {
        let b = self.ball(l)?;
        Ok((0..b.len()).map(|i| (b.element(i).clone(), b.word_length(i))).collect())
    }
}

fn default_label(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("g{i}")
    }
}

fn quantize(c: &[f64]) -> Vec<i64> {
    c.iter().map(|x| (x / KEY_QUANTUM).round() as i64).collect()
}

// Keys of every cell within KEY_EDGE of c. Cells are centred on multiples of
// the quantum, so exact zeros never sit on a cell boundary.
fn candidate_keys(c: &[f64]) -> Vec<Vec<i64>> {
    let mut keys = vec![Vec::with_capacity(c.len())];
    for &x in c {
        let q = x / KEY_QUANTUM;
        let r = q.round();
        let frac = q - r;
        let mut opts = vec![r as i64];
        if (0.5 - frac.abs()) * KEY_QUANTUM < KEY_EDGE {
            opts.push(r as i64 + frac.signum() as i64);
        }
        if opts.len() == 1 {
            keys.iter_mut().for_each(|k| k.push(opts[0]));
        } else {
            keys = keys
                .into_iter()
                .flat_map(|k| {
                    opts.iter().map(move |&o| {
                        let mut k2 = k.clone();
                        k2.push(o);
                        k2
                    })
                })
                .collect();
        }
    }
    keys
}

fn find(index: &HashMap<Vec<i64>, Vec<usize>>, canon: &[Vec<f64>], c: &[f64]) -> Option<usize> {
    let neg: Vec<f64> = c.iter().map(|x| -x).collect();
    for v in [c, &neg[..]] {
        for k in candidate_keys(v) {
            if let Some(ids) = index.get(&k) {
                for &i in ids {
                    if canon[i].iter().zip(v).all(|(a, b)| (a - b).abs() <= DEDUP_TOL) {
                        return Some(i);
                    }
                }
            }
        }
    }
    None
}
