//! Flat Brown clustering with the windowed greedy procedure: the `C` most
//! frequent words start as singleton clusters, and every further word is
//! added as a new cluster followed by the merge that loses the least average
//! mutual information.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{IronyError, Result};
use crate::tokenize::TokenizedTweet;

/// Merge losses closer than this are treated as ties.
pub const TIE_EPSILON: f64 = 1e-12;

/// Unigram and within-tweet bigram counts. Word ids are frequency ranks
/// (descending count, then lexicographic).
#[derive(Debug, Clone, PartialEq)]
pub struct BigramStats {
    pub words: Vec<String>,
    pub counts: Vec<u64>,
    /// `successors[w]`: `(x, n(w, x))`, sorted by `x`.
    pub successors: Vec<Vec<(u32, u64)>>,
    /// `predecessors[w]`: `(x, n(x, w))`, sorted by `x`.
    pub predecessors: Vec<Vec<(u32, u64)>>,
    pub total_tokens: u64,
    pub total_bigrams: u64,
}

impl BigramStats {
    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn word_id(&self, word: &str) -> Option<u32> {
        self.words.iter().position(|w| w == word).map(|i| i as u32)
    }

    pub fn bigram(&self, a: u32, b: u32) -> u64 {
        let row = &self.successors[a as usize];
        row.binary_search_by_key(&b, |e| e.0)
            .map(|i| row[i].1)
            .unwrap_or(0)
    }
}

/// Counts words and adjacent pairs. Words seen fewer than `min_count` times
/// are dropped together with every bigram touching them; pairs never span
/// two sentences.
pub fn collect_bigram_stats<'a, I>(sentences: I, min_count: u64) -> Result<BigramStats>
where
    I: IntoIterator<Item = &'a [String]>,
    I::IntoIter: Clone,
{
    let sentences = sentences.into_iter();
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for s in sentences.clone() {
        for w in s {
            *freq.entry(w.as_str()).or_insert(0) += 1;
        }
    }
    let mut vocab: Vec<(&str, u64)> = freq
        .into_iter()
        .filter(|&(_, c)| c >= min_count.max(1))
        .collect();
    if vocab.is_empty() {
        return Err(IronyError::Validation(format!(
            "Brown clustering: empty vocabulary after applying min_count {min_count}"
        )));
    }
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let id: HashMap<&str, u32> = vocab
        .iter()
        .enumerate()
        .map(|(i, (w, _))| (*w, i as u32))
        .collect();

    let mut pairs: HashMap<(u32, u32), u64> = HashMap::new();
    for s in sentences {
        for w in s.windows(2) {
            if let (Some(&a), Some(&b)) = (id.get(w[0].as_str()), id.get(w[1].as_str())) {
                *pairs.entry((a, b)).or_insert(0) += 1;
            }
        }
    }
    let v = vocab.len();
    let mut successors = vec![Vec::new(); v];
    let mut predecessors = vec![Vec::new(); v];
    let mut total_bigrams = 0;
    for (&(a, b), &c) in &pairs {
        successors[a as usize].push((b, c));
        predecessors[b as usize].push((a, c));
        total_bigrams += c;
    }
    for row in successors.iter_mut().chain(predecessors.iter_mut()) {
        row.sort_unstable();
    }
    Ok(BigramStats {
        total_tokens: vocab.iter().map(|e| e.1).sum(),
        words: vocab.iter().map(|e| e.0.to_string()).collect(),
        counts: vocab.iter().map(|e| e.1).collect(),
        successors,
        predecessors,
        total_bigrams,
    })
}

pub fn corpus_bigram_stats(corpus: &[TokenizedTweet], min_count: u64) -> Result<BigramStats> {
    collect_bigram_stats(corpus.iter().map(|t| t.tokens.as_slice()), min_count)
}

/// `p ln(p / (pl pr))` with `p = n / total`, from raw counts.
fn q_term(n: f64, left: f64, right: f64, total: f64) -> f64 {
    if n <= 0.0 {
        0.0
    } else {
        n / total * (n * total / (left * right)).ln()
    }
}

/// Mutual information between the cluster of the left word and the cluster
/// of the right word of a random bigram. `cluster_of[w]` is word `w`'s cluster.
pub fn average_mutual_information(cluster_of: &[u32], stats: &BigramStats) -> f64 {
    let total = stats.total_bigrams as f64;
    let mut joint: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut left: BTreeMap<u32, f64> = BTreeMap::new();
    let mut right: BTreeMap<u32, f64> = BTreeMap::new();
    for (a, row) in stats.successors.iter().enumerate() {
        let ca = cluster_of[a];
        for &(b, n) in row {
            let cb = cluster_of[b as usize];
            let n = n as f64;
            *joint.entry((ca, cb)).or_insert(0.0) += n;
            *left.entry(ca).or_insert(0.0) += n;
            *right.entry(cb).or_insert(0.0) += n;
        }
    }
    joint
        .iter()
        .map(|(&(a, b), &n)| q_term(n, left[&a], right[&b], total))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord {
    /// Cluster id that survives (the smaller one).
    pub kept: u32,
    pub absorbed: u32,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownClustering {
    pub num_clusters: usize,
    pub assignment: BTreeMap<String, u32>,
    /// Vocabulary by descending frequency.
    pub vocab_order: Vec<String>,
    pub frequencies: Vec<u64>,
    pub ami: f64,
    /// Merges in order, using founding-word ranks as cluster ids.
    pub merges: Vec<MergeRecord>,
}

impl BrownClustering {
    pub fn cluster(&self, word: &str) -> Option<u32> {
        self.assignment.get(word).copied()
    }

    pub fn distinct_clusters(&self) -> usize {
        let mut ids: Vec<u32> = self.assignment.values().copied().collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// `word \t cluster \t frequency`, in frequency order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (w, f) in self.vocab_order.iter().zip(&self.frequencies) {
            let _ = writeln!(out, "{w}\t{}\t{f}", self.assignment[w]);
        }
        out
    }

    pub fn export_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| IronyError::io(path, e))
    }

    /// Token counts per cluster; unknown words add nothing.
    pub fn count_block(&self, tokens: &[String]) -> Vec<f64> {
        let mut block = vec![0.0; self.num_clusters];
        for t in tokens {
            if let Some(c) = self.cluster(t) {
                block[c as usize] += 1.0;
            }
        }
        block
    }
}

/// Concatenated per-clustering count blocks.
pub fn cluster_count_block(tokens: &[String], clusterings: &[BrownClustering]) -> Vec<f64> {
    clusterings
        .iter()
        .flat_map(|c| c.count_block(tokens))
        .collect()
}

pub fn train_brown(stats: &BigramStats, num_clusters: usize) -> Result<BrownClustering> {
    if num_clusters == 0 {
        return Err(IronyError::Config(
            "Brown clustering needs at least one cluster".into(),
        ));
    }
    let v = stats.vocab_size();
    let mut engine = Engine::new(stats, num_clusters.min(v) + 1);
    let window = num_clusters.min(v);
    for w in 0..window {
        engine.insert(w as u32, false);
    }
    engine.init_losses();
    for w in window..v {
        engine.insert(w as u32, true);
        engine.merge_best();
    }

    let mut ids: Vec<u32> = (0..engine.cap)
        .filter(|&s| engine.active[s])
        .map(|s| engine.id[s])
        .collect();
    ids.sort_unstable();
    let remap: HashMap<u32, u32> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as u32))
        .collect();
    let mut assignment = BTreeMap::new();
    for s in (0..engine.cap).filter(|&s| engine.active[s]) {
        for &w in &engine.members[s] {
            assignment.insert(stats.words[w as usize].clone(), remap[&engine.id[s]]);
        }
    }
    Ok(BrownClustering {
        num_clusters,
        assignment,
        vocab_order: stats.words.clone(),
        frequencies: stats.counts.clone(),
        ami: engine.ami,
        merges: engine.merges,
    })
}

/// Incremental bookkeeping over at most `C + 1` cluster slots. Objective
/// terms only cover bigrams between words already inserted, while cluster
/// marginals always come from the full bigram distribution.
struct Engine<'a> {
    stats: &'a BigramStats,
    cap: usize,
    total: f64,
    /// Bigram counts between slots, `cap * cap`.
    n: Vec<f64>,
    nl: Vec<f64>,
    nr: Vec<f64>,
    q: Vec<f64>,
    /// Merge loss for slot pairs `s < t`.
    loss: Vec<f64>,
    active: Vec<bool>,
    id: Vec<u32>,
    members: Vec<Vec<u32>>,
    slot_of_word: Vec<Option<usize>>,
    ami: f64,
    merges: Vec<MergeRecord>,
}

impl<'a> Engine<'a> {
    fn new(stats: &'a BigramStats, cap: usize) -> Self {
        Engine {
            stats,
            cap,
            total: stats.total_bigrams as f64,
            n: vec![0.0; cap * cap],
            nl: vec![0.0; cap],
            nr: vec![0.0; cap],
            q: vec![0.0; cap * cap],
            loss: vec![0.0; cap * cap],
            active: vec![false; cap],
            id: vec![0; cap],
            members: vec![Vec::new(); cap],
            slot_of_word: vec![None; stats.vocab_size()],
            ami: 0.0,
            merges: Vec::new(),
        }
    }

    #[inline]
    fn at(&self, s: usize, t: usize) -> usize {
        s * self.cap + t
    }

    fn active_slots(&self) -> Vec<usize> {
        (0..self.cap).filter(|&s| self.active[s]).collect()
    }

    fn qv(&self, a: usize, b: usize) -> f64 {
        self.q[self.at(a, b)]
    }

    fn qf(&self, n: f64, left: f64, right: f64) -> f64 {
        q_term(n, left, right, self.total)
    }

    /// self.qv(s∪t, u) for `u` outside the pair.
    fn q_pair_row(&self, s: usize, t: usize, u: usize) -> f64 {
        let n = self.n[self.at(s, u)] + self.n[self.at(t, u)];
        self.qf(n, self.nl[s] + self.nl[t], self.nr[u])
    }

    /// self.qv(u, s∪t) for `u` outside the pair.
    fn q_pair_col(&self, u: usize, s: usize, t: usize) -> f64 {
        let n = self.n[self.at(u, s)] + self.n[self.at(u, t)];
        self.qf(n, self.nl[u], self.nr[s] + self.nr[t])
    }

    fn q_pair_self(&self, s: usize, t: usize) -> f64 {
        let n = self.n[self.at(s, s)]
            + self.n[self.at(s, t)]
            + self.n[self.at(t, s)]
            + self.n[self.at(t, t)];
        self.qf(n, self.nl[s] + self.nl[t], self.nr[s] + self.nr[t])
    }

    fn refresh_q(&mut self, s: usize, slots: &[usize]) {
        for &u in slots {
            let (su, us) = (self.at(s, u), self.at(u, s));
            self.q[su] = self.qf(self.n[su], self.nl[s], self.nr[u]);
            self.q[us] = self.qf(self.n[us], self.nl[u], self.nr[s]);
        }
    }

    /// Objective lost by merging `s` and `t`, computed from scratch.
    fn pair_loss(&self, s: usize, t: usize, slots: &[usize]) -> f64 {
        let mut before = -(self.qv(s, s) + self.qv(s, t) + self.qv(t, s) + self.qv(t, t));
        let mut after = self.q_pair_self(s, t);
        for &u in slots {
            before += self.qv(s, u) + self.qv(u, s) + self.qv(t, u) + self.qv(u, t);
            if u != s && u != t {
                after += self.q_pair_row(s, t, u) + self.q_pair_col(u, s, t);
            }
        }
        before - after
    }

    fn free_slot(&self) -> usize {
        (0..self.cap)
            .find(|&s| !self.active[s])
            .expect("a free cluster slot")
    }

    /// Adds word `w` as a new singleton cluster. With `update`, existing pair
    /// losses are adjusted and the new cluster's pair losses computed.
    fn insert(&mut self, w: u32, update: bool) {
        let k = self.free_slot();
        self.active[k] = true;
        self.id[k] = w;
        self.members[k] = vec![w];
        self.slot_of_word[w as usize] = Some(k);
        let stats = self.stats;
        for &(x, c) in &stats.successors[w as usize] {
            self.nl[k] += c as f64;
            if let Some(sx) = self.slot_of_word[x as usize] {
                let i = self.at(k, sx);
                self.n[i] += c as f64;
            }
        }
        for &(x, c) in &stats.predecessors[w as usize] {
            self.nr[k] += c as f64;
            if x != w {
                if let Some(sx) = self.slot_of_word[x as usize] {
                    let i = self.at(sx, k);
                    self.n[i] += c as f64;
                }
            }
        }
        let slots = self.active_slots();
        self.refresh_q(k, &slots);
        let gain = slots
            .iter()
            .map(|&u| self.qv(k, u) + self.qv(u, k))
            .sum::<f64>()
            - self.qv(k, k);
        self.ami += gain;
        if !update {
            return;
        }
        let others: Vec<usize> = slots.iter().copied().filter(|&s| s != k).collect();
        for (a, &s) in others.iter().enumerate() {
            for &t in &others[a + 1..] {
                let delta = self.qv(k, s) + self.qv(s, k) + self.qv(k, t) + self.qv(t, k)
                    - self.q_pair_row(s, t, k)
                    - self.q_pair_col(k, s, t);
                let i = self.at(s.min(t), s.max(t));
                self.loss[i] += delta;
            }
        }
        for &s in &others {
            let i = self.at(s.min(k), s.max(k));
            self.loss[i] = self.pair_loss(s, k, &slots);
        }
    }

    fn init_losses(&mut self) {
        let slots = self.active_slots();
        for (a, &s) in slots.iter().enumerate() {
            for &t in &slots[a + 1..] {
                let i = self.at(s, t);
                self.loss[i] = self.pair_loss(s, t, &slots);
            }
        }
    }

    /// Slot pair with minimal loss; near-ties go to the lowest id pair.
    fn best_pair(&self) -> (usize, usize) {
        let slots = self.active_slots();
        let mut min = f64::INFINITY;
        for (a, &s) in slots.iter().enumerate() {
            for &t in &slots[a + 1..] {
                min = min.min(self.loss[self.at(s, t)]);
            }
        }
        let mut best: Option<((u32, u32), (usize, usize))> = None;
        for (a, &s) in slots.iter().enumerate() {
            for &t in &slots[a + 1..] {
                if self.loss[self.at(s, t)] <= min + TIE_EPSILON {
                    let key = (self.id[s].min(self.id[t]), self.id[s].max(self.id[t]));
                    if best.map_or(true, |(k, _)| key < k) {
                        best = Some((key, (s, t)));
                    }
                }
            }
        }
        best.expect("at least two clusters").1
    }

    fn merge_best(&mut self) {
        let (a, b) = self.best_pair();
        let (k, gone) = if self.id[a] < self.id[b] {
            (a, b)
        } else {
            (b, a)
        };
        let slots = self.active_slots();
        let others: Vec<usize> = slots
            .iter()
            .copied()
            .filter(|&s| s != a && s != b)
            .collect();
        let loss = self.loss[self.at(a.min(b), a.max(b))];

        // Merged row/column counts and their q terms against the others.
        let nl_k = self.nl[a] + self.nl[b];
        let nr_k = self.nr[a] + self.nr[b];
        let mut row = vec![0.0; self.cap];
        let mut col = vec![0.0; self.cap];
        for &u in &others {
            row[u] = self.n[self.at(a, u)] + self.n[self.at(b, u)];
            col[u] = self.n[self.at(u, a)] + self.n[self.at(u, b)];
        }
        let qk_row: Vec<f64> = (0..self.cap)
            .map(|u| self.qf(row[u], nl_k, self.nr[u]))
            .collect();
        let qk_col: Vec<f64> = (0..self.cap)
            .map(|u| self.qf(col[u], self.nl[u], nr_k))
            .collect();

        let mut deltas = Vec::with_capacity(others.len() * others.len() / 2);
        for (ia, &s) in others.iter().enumerate() {
            for &t in &others[ia + 1..] {
                let old = self.qv(s, a)
                    + self.qv(s, b)
                    + self.qv(t, a)
                    + self.qv(t, b)
                    + self.qv(a, s)
                    + self.qv(b, s)
                    + self.qv(a, t)
                    + self.qv(b, t);
                let new = qk_col[s] + qk_col[t] + qk_row[s] + qk_row[t];
                let pair_old = self.q_pair_row(s, t, a)
                    + self.q_pair_row(s, t, b)
                    + self.q_pair_col(a, s, t)
                    + self.q_pair_col(b, s, t);
                let pair_new = self.qf(row[s] + row[t], nl_k, self.nr[s] + self.nr[t])
                    + self.qf(col[s] + col[t], self.nl[s] + self.nl[t], nr_k);
                deltas.push((self.at(s, t), -old + new + pair_old - pair_new));
            }
        }
        for (i, d) in deltas {
            self.loss[i] += d;
        }

        let n_kk = self.n[self.at(a, a)]
            + self.n[self.at(a, b)]
            + self.n[self.at(b, a)]
            + self.n[self.at(b, b)];
        for u in 0..self.cap {
            let (gu, ug) = (self.at(gone, u), self.at(u, gone));
            self.n[gu] = 0.0;
            self.n[ug] = 0.0;
            self.q[gu] = 0.0;
            self.q[ug] = 0.0;
        }
        for &u in &others {
            let (ku, uk) = (self.at(k, u), self.at(u, k));
            self.n[ku] = row[u];
            self.n[uk] = col[u];
        }
        let kk = self.at(k, k);
        self.n[kk] = n_kk;
        self.nl[k] = nl_k;
        self.nr[k] = nr_k;
        self.nl[gone] = 0.0;
        self.nr[gone] = 0.0;
        self.active[gone] = false;
        let moved = std::mem::take(&mut self.members[gone]);
        for &w in &moved {
            self.slot_of_word[w as usize] = Some(k);
        }
        self.members[k].extend(moved);

        let slots = self.active_slots();
        self.refresh_q(k, &slots);
        for &s in &others {
            let i = self.at(s.min(k), s.max(k));
            self.loss[i] = self.pair_loss(s, k, &slots);
        }
        self.ami -= loss;
        self.merges.push(MergeRecord {
            kept: self.id[k],
            absorbed: self.id[gone],
            loss,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sents(texts: &[&str]) -> Vec<Vec<String>> {
        texts
            .iter()
            .map(|t| t.split_whitespace().map(String::from).collect())
            .collect()
    }

    fn stats_of(texts: &[&str], min_count: u64) -> Result<BigramStats> {
        let s = sents(texts);
        collect_bigram_stats(s.iter().map(Vec::as_slice), min_count)
    }

    #[test]
    fn bigram_counts_by_hand() {
        let st = stats_of(&["a b a"], 1).unwrap();
        assert_eq!(st.words, ["a", "b"]);
        assert_eq!(st.counts, [2, 1]);
        assert_eq!((st.bigram(0, 1), st.bigram(1, 0)), (1, 1));
        assert_eq!((st.total_tokens, st.total_bigrams), (3, 2));
        assert!(stats_of(&["a b a"], 5).is_err());
    }

    #[test]
    fn bigrams_stop_at_tweet_boundary() {
        let st = stats_of(&["a b", "b a"], 1).unwrap();
        let b = st.word_id("b").unwrap();
        assert_eq!(st.bigram(b, b), 0);
        assert_eq!(st.total_bigrams, 2);
    }

    #[test]
    fn min_count_drops_events() {
        let st = stats_of(&["a rare a", "a a"], 2).unwrap();
        assert_eq!(st.words, ["a"]);
        assert_eq!(st.total_bigrams, 1);
    }

    #[test]
    fn ami_examples() {
        let st = stats_of(&["a b a b"], 1).unwrap();
        assert_eq!(average_mutual_information(&[0, 0], &st), 0.0);
        // Bigrams: (a,b) x2, (b,a) x1. pl(a)=2/3, pl(b)=1/3, pr(b)=2/3, pr(a)=1/3.
        let by_hand = 2.0f64 / 3.0 * ((2.0f64 / 3.0) / (2.0 / 3.0 * 2.0 / 3.0)).ln()
            + 1.0 / 3.0 * ((1.0f64 / 3.0) / (1.0 / 3.0 * 1.0 / 3.0)).ln();
        let got = average_mutual_information(&[0, 1], &st);
        assert!((got - by_hand).abs() < 1e-12);
        assert!((average_mutual_information(&[7, 3], &st) - got).abs() < 1e-15);
    }

    #[test]
    fn small_vocab_all_singletons() {
        let st = stats_of(&["a b c", "c b"], 1).unwrap();
        let b = train_brown(&st, 5).unwrap();
        assert!(b.merges.is_empty());
        assert_eq!(b.distinct_clusters(), 3);
        assert!(train_brown(&st, 0).is_err());
    }

    #[test]
    fn interchangeable_pairs() {
        let texts = ["a x b x a y b y"; 3];
        let st = stats_of(&texts, 1).unwrap();
        let b = train_brown(&st, 2).unwrap();
        assert_eq!(b.cluster("a"), b.cluster("b"));
        assert_eq!(b.cluster("x"), b.cluster("y"));
        assert_ne!(b.cluster("a"), b.cluster("x"));
        let ids = |w: &str| st.word_id(w).unwrap() as usize;
        let mut split = vec![0; 4];
        split[ids("x")] = 1;
        split[ids("y")] = 1;
        let mut other = vec![0; 4];
        other[ids("a")] = 1;
        other[ids("x")] = 1;
        assert!(average_mutual_information(&split, &st) > average_mutual_information(&other, &st));
    }

    #[test]
    fn count_block_counts_tokens() {
        let st = stats_of(&["mum dad went home", "mum and dad"], 1).unwrap();
        let b = train_brown(&st, 2).unwrap();
        let toks = |s: &str| s.split(' ').map(String::from).collect::<Vec<_>>();
        let block = b.count_block(&toks("mum mum zzz"));
        assert_eq!(block.len(), 2);
        assert_eq!(block[b.cluster("mum").unwrap() as usize], 2.0);
        assert_eq!(block.iter().sum::<f64>(), 2.0);
        assert!(b.count_block(&toks("zzz qqq")).iter().all(|&x| x == 0.0));
        let full = cluster_count_block(&toks("dad"), &[b.clone(), b]);
        assert_eq!(full.len(), 4);
    }

    /// Restricted objective over inserted words only, with full marginals.
    fn window_ami(cluster_of: &[Option<u32>], st: &BigramStats) -> f64 {
        let mut joint: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        let mut left: BTreeMap<u32, f64> = BTreeMap::new();
        let mut right: BTreeMap<u32, f64> = BTreeMap::new();
        for (a, row) in st.successors.iter().enumerate() {
            for &(b, n) in row {
                if let Some(ca) = cluster_of[a] {
                    *left.entry(ca).or_default() += n as f64;
                }
                if let Some(cb) = cluster_of[b as usize] {
                    *right.entry(cb).or_default() += n as f64;
                }
                if let (Some(ca), Some(cb)) = (cluster_of[a], cluster_of[b as usize]) {
                    *joint.entry((ca, cb)).or_default() += n as f64;
                }
            }
        }
        let t = st.total_bigrams as f64;
        joint
            .iter()
            .map(|(&(a, b), &n)| n / t * ((n / t) / ((left[&a] / t) * (right[&b] / t))).ln())
            .sum()
    }

    /// Exhaustive greedy: every step evaluates every pair by full recomputation.
    fn oracle(st: &BigramStats, c: usize) -> (Vec<Option<u32>>, Vec<(u32, u32, f64)>) {
        let v = st.vocab_size();
        let mut cluster_of: Vec<Option<u32>> = vec![None; v];
        for (w, slot) in cluster_of.iter_mut().enumerate().take(c.min(v)) {
            *slot = Some(w as u32);
        }
        let mut merges = Vec::new();
        for w in c.min(v)..v {
            cluster_of[w] = Some(w as u32);
            let before = window_ami(&cluster_of, st);
            let mut ids: Vec<u32> = cluster_of.iter().flatten().copied().collect();
            ids.sort_unstable();
            ids.dedup();
            let mut cands = Vec::new();
            for (i, &x) in ids.iter().enumerate() {
                for &y in &ids[i + 1..] {
                    let trial: Vec<Option<u32>> = cluster_of
                        .iter()
                        .map(|c| c.map(|c| if c == y { x } else { c }))
                        .collect();
                    cands.push((before - window_ami(&trial, st), x, y));
                }
            }
            let min = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
            let &(loss, x, y) = cands.iter().find(|c| c.0 <= min + TIE_EPSILON).unwrap();
            for cl in cluster_of.iter_mut().flatten() {
                if *cl == y {
                    *cl = x;
                }
            }
            merges.push((x, y, loss));
        }
        (cluster_of, merges)
    }

    fn check_against_oracle(texts: &[String], c: usize) {
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let st = stats_of(&refs, 1).unwrap();
        let got = train_brown(&st, c).unwrap();
        let (partition, merges) = oracle(&st, c);
        assert_eq!(got.merges.len(), merges.len());
        for (m, &(x, y, loss)) in got.merges.iter().zip(&merges) {
            assert_eq!((m.kept, m.absorbed), (x, y), "{texts:?}");
            assert!((m.loss - loss).abs() < 1e-10);
        }
        for (w, word) in st.words.iter().enumerate() {
            for (w2, word2) in st.words.iter().enumerate() {
                assert_eq!(
                    partition[w] == partition[w2],
                    got.cluster(word) == got.cluster(word2)
                );
            }
        }
        let ids: Vec<u32> = st.words.iter().map(|w| got.cluster(w).unwrap()).collect();
        assert!((got.ami - average_mutual_information(&ids, &st)).abs() < 1e-10);
        assert_eq!(got.distinct_clusters(), c.min(st.vocab_size()));
    }

    #[test]
    fn five_word_toy_matches_oracle() {
        let texts: Vec<String> = [
            "the cat sat",
            "the dog sat",
            "a cat ran",
            "a dog ran",
            "the cat",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        check_against_oracle(&texts, 2);
    }

    fn corpus() -> impl Strategy<Value = Vec<String>> {
        let word = prop::sample::select(vec![
            "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l",
        ]);
        let tweet = prop::collection::vec(word, 1..8).prop_map(|w| w.join(" "));
        prop::collection::vec(tweet, 1..10)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn greedy_matches_exhaustive_oracle(texts in corpus(), c in 1usize..6) {
            check_against_oracle(&texts, c);
        }
    }
}
