//! Counting achievable permutations by depth-first search over operation
//! sequences.
//!
//! The search walks the machine and the pruning automaton in lockstep and
//! only follows letters the automaton accepts. Distinct outputs are
//! collected in a hash set of bit-packed permutations. Work is split into
//! shards by the first `m` output values; each shard is independent, keeps
//! only the last `n − m` outputs of each permutation, and shard counts are
//! summed.

use std::sync::OnceLock;

use dashu_int::IBig;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::automata::{self, Dfa, DEAD};
use crate::series::{binomial_transform, Series};

/// Longest permutation the packed representation supports.
pub const MAX_N: usize = 25;

/// Shard prefix length used for production runs.
pub const DEFAULT_START_LEN: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("permutation store exceeded its budget of {limit} entries")]
    ResourceLimit { limit: usize },
    #[error("invalid shard: {0}")]
    InvalidShard(String),
    #[error("unsupported size n = {0} (max {MAX_N})")]
    TooLarge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Most distinct permutations a single shard may hold at once.
    pub max_stored: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_stored: 1 << 27,
        }
    }
}

/// Search counters, summed across shards.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    /// Operation-sequence prefixes visited.
    pub nodes: u64,
    /// Complete operation sequences reached.
    pub leaves: u64,
}

impl std::ops::AddAssign for EnumStats {
    fn add_assign(&mut self, o: EnumStats) {
        self.nodes += o.nodes;
        self.leaves += o.leaves;
    }
}

/// Permutations of length `n` whose first outputs are `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardSpec {
    pub n: usize,
    pub start: Vec<u8>,
}

impl ShardSpec {
    pub fn new(n: usize, start: Vec<u8>) -> Result<ShardSpec, EnumError> {
        let spec = ShardSpec { n, start };
        spec.validate()?;
        Ok(spec)
    }

    pub fn m(&self) -> usize {
        self.start.len()
    }

    fn validate(&self) -> Result<(), EnumError> {
        if self.n > MAX_N {
            return Err(EnumError::TooLarge(self.n));
        }
        if self.m() > 0 && self.m() >= self.n {
            return Err(EnumError::InvalidShard(format!(
                "start length {} must be below n = {}",
                self.m(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n + 1];
        for &v in &self.start {
            let v = v as usize;
            if v == 0 || v > self.n || seen[v] {
                return Err(EnumError::InvalidShard(format!(
                    "start {:?} is not a sequence of distinct values in 1..={}",
                    self.start, self.n
                )));
            }
            seen[v] = true;
        }
        Ok(())
    }

    /// All shards with start length `m`, in lexicographic order.
    pub fn all(n: usize, m: usize) -> Vec<ShardSpec> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(m);
        let mut used = vec![false; n + 1];
        fn rec(n: usize, m: usize, cur: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<ShardSpec>) {
            if cur.len() == m {
                out.push(ShardSpec { n, start: cur.clone() });
                return;
            }
            for v in 1..=n {
                if !used[v] {
                    used[v] = true;
                    cur.push(v as u8);
                    rec(n, m, cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        rec(n, m, &mut cur, &mut used, &mut out);
        out
    }
}

fn forbidden_word_avoider() -> &'static Dfa {
    static AVOIDER: OnceLock<Dfa> = OnceLock::new();
    AVOIDER.get_or_init(|| {
        let words = automata::find_forbidden_words(automata::FORBIDDEN_WORD_MAX_LEN);
        automata::build_multi_avoiding_dfa(words.iter().map(|w| w.letters()))
    })
}

/// Counting engine for one permutation length. Holds the pruning automaton
/// (or a one-state automaton accepting everything when unpruned), which is
/// shared read-only by every shard.
#[derive(Clone, Debug)]
pub struct Enumerator {
    n: usize,
    dfa: Dfa,
    limits: Limits,
}

impl Enumerator {
    pub fn new(n: usize, pruned: bool) -> Result<Enumerator, EnumError> {
        if n > MAX_N {
            return Err(EnumError::TooLarge(n));
        }
        let dfa = if pruned {
            let gamma = automata::build_gamma(n.max(1));
            automata::intersect(&[&gamma, forbidden_word_avoider()])
        } else {
            Dfa::universal()
        };
        Ok(Enumerator {
            n,
            dfa,
            limits: Limits::default(),
        })
    }

    pub fn with_limits(mut self, limits: Limits) -> Enumerator {
        self.limits = limits;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn automaton(&self) -> &Dfa {
        &self.dfa
    }

    /// Count with no start-sequence restriction.
    pub fn count(&self, increment_avoiding: bool) -> Result<u64, EnumError> {
        self.count_prefix(&[], increment_avoiding).map(|(c, _)| c)
    }

    pub fn count_with_stats(&self, increment_avoiding: bool) -> Result<(u64, EnumStats), EnumError> {
        self.count_prefix(&[], increment_avoiding)
    }

    pub fn count_with_start_sequence(
        &self,
        spec: &ShardSpec,
        increment_avoiding: bool,
    ) -> Result<u64, EnumError> {
        if spec.n != self.n {
            return Err(EnumError::InvalidShard(format!(
                "shard is for n = {}, enumerator for n = {}",
                spec.n, self.n
            )));
        }
        spec.validate()?;
        self.count_prefix(&spec.start, increment_avoiding).map(|(c, _)| c)
    }

    fn count_prefix(&self, prefix: &[u8], increment_avoiding: bool) -> Result<(u64, EnumStats), EnumError> {
        let mut search = Search::new(self.n, self.dfa.table(), prefix, increment_avoiding, self.limits.max_stored);
        if increment_avoiding && prefix.windows(2).any(|w| w[1] == w[0] + 1) {
            return Ok((0, search.stats));
        }
        search.visit(self.dfa.start());
        if search.overflow {
            return Err(EnumError::ResourceLimit {
                limit: self.limits.max_stored,
            });
        }
        Ok((search.seen.len() as u64, search.stats))
    }

    /// Sum over every shard with start length `m`, run on `workers` threads.
    /// `workers == 1` runs the shards in order on the calling thread.
    pub fn enumerate_parallel(
        &self,
        m: usize,
        workers: usize,
        increment_avoiding: bool,
    ) -> Result<u64, EnumError> {
        self.enumerate_parallel_with_stats(m, workers, increment_avoiding)
            .map(|(c, _)| c)
    }

    pub fn enumerate_parallel_with_stats(
        &self,
        m: usize,
        workers: usize,
        increment_avoiding: bool,
    ) -> Result<(u64, EnumStats), EnumError> {
        if m == 0 || m >= self.n {
            return Err(EnumError::InvalidShard(format!(
                "start length must satisfy 1 <= m < n, got m = {m}, n = {}",
                self.n
            )));
        }
        let workers = workers.max(1);
        let shards = ShardSpec::all(self.n, m);
        let run = |spec: &ShardSpec| self.count_prefix(&spec.start, increment_avoiding);
        let results: Vec<(u64, EnumStats)> = if workers == 1 {
            shards.iter().map(run).collect::<Result<_, _>>()?
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .expect("thread pool");
            pool.install(|| shards.par_iter().map(run).collect::<Result<_, _>>())?
        };
        let mut total = 0u64;
        let mut stats = EnumStats::default();
        for (c, s) in results {
            total += c;
            stats += s;
        }
        Ok((total, stats))
    }
}

/// Mutable state of one depth-first search. The input is always `1..=n` in
/// order, so it is just the next label to push.
struct Search<'a> {
    n: u8,
    table: &'a [[u32; 3]],
    prefix: &'a [u8],
    /// Position of each value in `prefix`, or `u8::MAX`.
    prefix_pos: [u8; MAX_N + 1],
    avoid_increments: bool,
    next_input: u8,
    stack1: [u8; MAX_N],
    len1: usize,
    stack2: [u8; MAX_N],
    len2: usize,
    emitted: usize,
    last: u8,
    key: u128,
    bits: u32,
    seen: FxHashSet<u128>,
    limit: usize,
    overflow: bool,
    stats: EnumStats,
}

impl<'a> Search<'a> {
    fn new(n: usize, table: &'a [[u32; 3]], prefix: &'a [u8], avoid_increments: bool, limit: usize) -> Search<'a> {
        let bits = usize::BITS - n.leading_zeros();
        let mut prefix_pos = [u8::MAX; MAX_N + 1];
        for (i, &v) in prefix.iter().enumerate() {
            prefix_pos[v as usize] = i as u8;
        }
        Search {
            n: n as u8,
            table,
            prefix,
            prefix_pos,
            avoid_increments,
            next_input: 1,
            stack1: [0; MAX_N],
            len1: 0,
            stack2: [0; MAX_N],
            len2: 0,
            emitted: 0,
            last: 0,
            key: 0,
            bits: bits.max(1),
            seen: FxHashSet::default(),
            limit,
            overflow: false,
            stats: EnumStats::default(),
        }
    }

    /// Stack 2 empties top-down, so a stack-2 item still owed to the prefix
    /// must have only earlier prefix values above it.
    fn stack2_fits_prefix(&self) -> bool {
        let mut last = -1i32;
        let mut other_above = false;
        for &x in self.stack2[..self.len2].iter().rev() {
            let p = self.prefix_pos[x as usize];
            if p == u8::MAX {
                other_above = true;
            } else {
                if other_above || (p as i32) < last {
                    return false;
                }
                last = p as i32;
            }
        }
        true
    }

    fn visit(&mut self, state: u32) {
        self.stats.nodes += 1;
        if self.emitted == self.n as usize {
            self.stats.leaves += 1;
            if self.seen.insert(self.key) && self.seen.len() > self.limit {
                self.overflow = true;
            }
            return;
        }
        let row = self.table[state as usize];

        if self.next_input <= self.n && row[0] != DEAD {
            self.stack1[self.len1] = self.next_input;
            self.len1 += 1;
            self.next_input += 1;
            self.visit(row[0]);
            self.next_input -= 1;
            self.len1 -= 1;
            if self.overflow {
                return;
            }
        }

        if self.len1 > 0 && row[1] != DEAD {
            self.len1 -= 1;
            let x = self.stack1[self.len1];
            self.stack2[self.len2] = x;
            self.len2 += 1;
            if self.emitted >= self.prefix.len() || self.stack2_fits_prefix() {
                self.visit(row[1]);
            }
            self.len2 -= 1;
            self.stack1[self.len1] = x;
            self.len1 += 1;
            if self.overflow {
                return;
            }
        }

        if self.len2 > 0 && row[2] != DEAD {
            let x = self.stack2[self.len2 - 1];
            let in_prefix = self.emitted < self.prefix.len();
            let allowed = (!in_prefix || self.prefix[self.emitted] == x)
                && !(self.avoid_increments && self.last != 0 && x == self.last + 1);
            if allowed {
                let (last, key) = (self.last, self.key);
                self.len2 -= 1;
                self.emitted += 1;
                self.last = x;
                if !in_prefix {
                    self.key = (self.key << self.bits) | x as u128;
                }
                self.visit(row[2]);
                self.key = key;
                self.last = last;
                self.emitted -= 1;
                self.stack2[self.len2] = x;
                self.len2 += 1;
            }
        }
    }
}

/// Number of achievable permutations of length `n`.
pub fn count_achievable(n: usize, pruned: bool) -> Result<u64, EnumError> {
    Enumerator::new(n, pruned)?.count(false)
}

/// Number of achievable permutations of length `n` with no adjacent pair
/// `v, v+1`.
pub fn count_increment_avoiding(n: usize) -> Result<u64, EnumError> {
    Enumerator::new(n, true)?.count(true)
}

pub fn count_with_start_sequence(spec: &ShardSpec, increment_avoiding: bool) -> Result<u64, EnumError> {
    Enumerator::new(spec.n, true)?.count_with_start_sequence(spec, increment_avoiding)
}

pub fn enumerate_parallel(n: usize, m: usize, workers: usize, increment_avoiding: bool) -> Result<u64, EnumError> {
    Enumerator::new(n, true)?.enumerate_parallel(m, workers, increment_avoiding)
}

/// Options for producing a whole coefficient list.
#[derive(Clone, Copy, Debug)]
pub struct SeriesOptions {
    pub start_len: usize,
    pub workers: usize,
    /// Count increment-avoiding permutations and transform, rather than
    /// counting every achievable permutation directly.
    pub via_increment_avoiding: bool,
    pub limits: Limits,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            start_len: DEFAULT_START_LEN,
            workers: 1,
            via_increment_avoiding: true,
            limits: Limits::default(),
        }
    }
}

fn count_one(n: usize, opts: &SeriesOptions, increment_avoiding: bool) -> Result<u64, EnumError> {
    let e = Enumerator::new(n, true)?.with_limits(opts.limits);
    let m = opts.start_len.min(n.saturating_sub(1));
    if m == 0 {
        e.count(increment_avoiding)
    } else {
        e.enumerate_parallel(m, opts.workers, increment_avoiding)
    }
}

/// Increment-avoiding counts `t_0..=t_max`.
pub fn increment_avoiding_series(max_n: usize, opts: &SeriesOptions) -> Result<Series, EnumError> {
    let mut t = vec![IBig::ONE];
    for n in 1..=max_n {
        t.push(IBig::from(count_one(n, opts, true)?));
    }
    Ok(Series::new("t", t))
}

/// Achievable counts `s_0..=s_max`.
pub fn achievable_series(max_n: usize, opts: &SeriesOptions) -> Result<Series, EnumError> {
    if opts.via_increment_avoiding {
        let t = increment_avoiding_series(max_n, opts)?;
        let mut s = binomial_transform(&t);
        s.name = "s".into();
        return Ok(s);
    }
    let mut s = vec![IBig::ONE];
    for n in 1..=max_n {
        s.push(IBig::from(count_one(n, opts, false)?));
    }
    Ok(Series::new("s", s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{achievable_brute, Permutation};

    #[test]
    fn small_counts() {
        assert_eq!(count_achievable(0, true).unwrap(), 1);
        assert_eq!(count_achievable(1, true).unwrap(), 1);
        assert_eq!(count_achievable(1, false).unwrap(), 1);
        assert_eq!(count_achievable(4, true).unwrap(), 24);
        assert_eq!(count_achievable(7, true).unwrap(), 5018);
        assert_eq!(count_achievable(7, false).unwrap(), 5018);
    }

    #[test]
    fn increment_avoiding_small() {
        assert_eq!(count_increment_avoiding(1).unwrap(), 1);
        assert_eq!(count_increment_avoiding(2).unwrap(), 1);
        assert_eq!(count_increment_avoiding(3).unwrap(), 3);
        assert_eq!(count_increment_avoiding(4).unwrap(), 11);
    }

    #[test]
    fn shard_validation() {
        assert!(ShardSpec::new(5, vec![2, 1]).is_ok());
        assert!(ShardSpec::new(5, vec![2, 2]).is_err());
        assert!(ShardSpec::new(5, vec![6]).is_err());
        assert!(ShardSpec::new(3, vec![1, 2, 3]).is_err());
        assert_eq!(ShardSpec::all(4, 2).len(), 12);
        assert_eq!(ShardSpec::all(4, 2)[0].start, vec![1, 2]);
    }

    #[test]
    fn shard_matches_filtered_brute_force() {
        let brute = achievable_brute(5);
        let spec = ShardSpec::new(5, vec![2, 1]).unwrap();
        let expected = brute.iter().filter(|p| p.values().starts_with(&[2, 1])).count() as u64;
        assert_eq!(count_with_start_sequence(&spec, false).unwrap(), expected);
    }

    #[test]
    fn increasing_start_has_no_increment_avoiding_completion() {
        for m in 2..5 {
            let spec = ShardSpec::new(6, (1..=m as u8).collect()).unwrap();
            assert_eq!(count_with_start_sequence(&spec, true).unwrap(), 0);
        }
    }

    #[test]
    fn shards_partition_the_total() {
        for n in 2..=7 {
            let total = count_achievable(n, true).unwrap();
            let e = Enumerator::new(n, true).unwrap();
            for m in 1..n {
                assert_eq!(e.enumerate_parallel(m, 1, false).unwrap(), total, "n={n} m={m}");
            }
        }
        assert_eq!(enumerate_parallel(7, 1, 1, false).unwrap(), 5018);
    }

    #[test]
    fn wrong_shard_size_is_rejected() {
        let e = Enumerator::new(5, true).unwrap();
        let spec = ShardSpec::new(6, vec![1]).unwrap();
        assert!(matches!(
            e.count_with_start_sequence(&spec, false),
            Err(EnumError::InvalidShard(_))
        ));
        assert!(e.enumerate_parallel(0, 1, false).is_err());
        assert!(e.enumerate_parallel(5, 1, false).is_err());
    }

    #[test]
    fn resource_limit_is_reported() {
        let e = Enumerator::new(6, true).unwrap().with_limits(Limits { max_stored: 100 });
        assert_eq!(e.count(false), Err(EnumError::ResourceLimit { limit: 100 }));
        assert_eq!(e.enumerate_parallel(1, 2, false), Err(EnumError::ResourceLimit { limit: 100 }));
    }

    #[test]
    fn pruning_reduces_work() {
        for n in 4..=7 {
            let (a, pruned) = Enumerator::new(n, true).unwrap().count_with_stats(false).unwrap();
            let (b, full) = Enumerator::new(n, false).unwrap().count_with_stats(false).unwrap();
            assert_eq!(a, b);
            assert!(pruned.nodes < full.nodes, "n={n}: {pruned:?} vs {full:?}");
        }
    }

    #[test]
    fn subpermutations_of_achievable_are_achievable() {
        for n in 2..=7 {
            let smaller = achievable_brute(n - 1);
            for p in achievable_brute(n) {
                for v in 1..=n as u8 {
                    assert!(smaller.contains(&p.delete_value(v)), "{p} minus {v}");
                }
            }
        }
        assert!(achievable_brute(3).contains(&Permutation::new(vec![3, 1, 2]).unwrap()));
    }

    #[test]
    fn series_routes_agree() {
        let opts = SeriesOptions {
            start_len: 2,
            ..Default::default()
        };
        let via_t = achievable_series(8, &opts).unwrap();
        let direct = achievable_series(
            8,
            &SeriesOptions {
                via_increment_avoiding: false,
                ..opts
            },
        )
        .unwrap();
        assert_eq!(via_t.exact, direct.exact);
        let expected: Vec<IBig> = [1u64, 1, 2, 6, 24, 120, 720, 5018, 39374]
            .iter()
            .map(|&v| IBig::from(v))
            .collect();
        assert_eq!(direct.exact, expected);
    }
}
