//! Maximal erasure patterns and Definition-style E-set enumeration, both in
//! deterministic lexicographic order.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::profile::CodeProfile;
use crate::arith::binomial;

/// A maximal erasure pattern: delta erasures per local group, h2 extra per
/// mid group, h1 extra anywhere. All coordinates are global 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasurePattern {
    pub delta_sets: Vec<Vec<usize>>,
    pub gamma_sets: Vec<Vec<usize>>,
    pub global_set: Vec<usize>,
}

impl ErasurePattern {
    /// All erased coordinates, ascending.
    pub fn erased(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .delta_sets
            .iter()
            .chain(self.gamma_sets.iter())
            .flatten()
            .copied()
            .chain(self.global_set.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn total(&self) -> usize {
        self.delta_sets.iter().map(Vec::len).sum::<usize>()
            + self.gamma_sets.iter().map(Vec::len).sum::<usize>()
            + self.global_set.len()
    }
}

struct Slot {
    pool: Vec<usize>,
    sel: Vec<usize>,
    take: usize,
}

impl Slot {
    fn coords(&self) -> Vec<usize> {
        self.sel.iter().map(|&i| self.pool[i]).collect()
    }

    fn reset(&mut self) {
        self.sel = (0..self.take).collect();
    }
}

/// Advance `sel` to the next k-combination of 0..n in lexicographic order.
fn next_combination(sel: &mut [usize], n: usize) -> bool {
    let k = sel.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if sel[i] < n - (k - i) {
            sel[i] += 1;
            for j in i + 1..k {
                sel[j] = sel[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Streaming enumerator of maximal erasure patterns.
pub struct PatternIter {
    profile: CodeProfile,
    h1: usize,
    slots: Vec<Slot>,
    done: bool,
}

impl PatternIter {
    fn new(profile: &CodeProfile, h1: usize) -> Self {
        let p = profile.clone();
        let mut slots = Vec::with_capacity(p.t1 * p.t2 + p.t1 + 1);
        for i in 0..p.t1 {
            for s in 0..p.t2 {
                slots.push(Slot {
                    pool: p.b_group(i, s).collect(),
                    sel: (0..p.delta).collect(),
                    take: p.delta,
                });
            }
        }
        for _ in 0..p.t1 {
            slots.push(Slot {
                pool: Vec::new(),
                sel: (0..p.h2).collect(),
                take: p.h2,
            });
        }
        slots.push(Slot {
            pool: Vec::new(),
            sel: (0..h1).collect(),
            take: h1,
        });
        let mut it = PatternIter {
            profile: p,
            h1,
            slots,
            done: false,
        };
        let m = it.slots.len();
        for j in it.profile.t1 * it.profile.t2..m {
            it.rebuild_pool(j);
        }
        it.done = it.slots.iter().any(|s| s.pool.len() < s.take);
        it
    }

    fn gamma_base(&self) -> usize {
        self.profile.t1 * self.profile.t2
    }

    fn global_slot(&self) -> usize {
        self.slots.len() - 1
    }

    fn rebuild_pool(&mut self, idx: usize) {
        let p = &self.profile;
        let gb = self.gamma_base();
        if idx < gb {
            return; // delta pools are fixed
        }
        if idx < self.global_slot() {
            let i = idx - gb;
            let mut erased = std::collections::HashSet::new();
            for s in 0..p.t2 {
                erased.extend(self.slots[i * p.t2 + s].coords());
            }
            self.slots[idx].pool = p.a_group(i).filter(|c| !erased.contains(c)).collect();
        } else {
            let mut erased = std::collections::HashSet::new();
            for s in &self.slots[..idx] {
                erased.extend(s.coords());
            }
            self.slots[idx].pool = (0..p.n).filter(|c| !erased.contains(c)).collect();
        }
    }

    fn current(&self) -> ErasurePattern {
        let gb = self.gamma_base();
        ErasurePattern {
            delta_sets: self.slots[..gb].iter().map(Slot::coords).collect(),
            gamma_sets: self.slots[gb..self.global_slot()]
                .iter()
                .map(Slot::coords)
                .collect(),
            global_set: self.slots[self.global_slot()].coords(),
        }
    }

    fn advance(&mut self) {
        let m = self.slots.len();
        let mut idx = m;
        loop {
            if idx == 0 {
                self.done = true;
                return;
            }
            idx -= 1;
            let n = self.slots[idx].pool.len();
            let advanced = {
                let slot = &mut self.slots[idx];
                next_combination(&mut slot.sel, n)
            };
            if advanced {
                for j in idx + 1..m {
                    self.rebuild_pool(j);
                    self.slots[j].reset();
                }
                return;
            }
        }
    }

    /// Total patterns this iterator will yield.
    pub fn count_total(&self) -> u128 {
        let p = &self.profile;
        let local = binomial(p.n2 as u64, p.delta as u64);
        let gamma = binomial((p.n1 - p.t2 * p.delta) as u64, p.h2 as u64);
        let rest = p.n - p.t1 * p.t2 * p.delta - p.t1 * p.h2;
        let global = binomial(rest as u64, self.h1 as u64);
        local.pow((p.t1 * p.t2) as u32) * gamma.pow(p.t1 as u32) * global
    }
}

impl Iterator for PatternIter {
    type Item = ErasurePattern;

    fn next(&mut self) -> Option<ErasurePattern> {
        if self.done {
            return None;
        }
        let item = self.current();
        self.advance();
        Some(item)
    }
}

/// Every maximal erasure pattern of the profile, lexicographic by
/// (group, local group, coordinate).
pub fn enumerate_erasure_patterns(p: &CodeProfile) -> PatternIter {
    PatternIter::new(p, p.h1)
}

/// (delta, h2) patterns only: no global layer.
pub fn enumerate_mid_patterns(p: &CodeProfile) -> PatternIter {
    PatternIter::new(p, 0)
}

/// Number of maximal erasure patterns (product of per-scope binomials).
pub fn pattern_count(p: &CodeProfile) -> u128 {
    enumerate_erasure_patterns(p).count_total()
}

/// One uniformly sampled maximal erasure pattern (smoke-test verification).
pub fn sample_pattern(p: &CodeProfile, rng: &mut impl rand::Rng) -> ErasurePattern {
    let pick = |pool: &[usize], take: usize, rng: &mut dyn rand::RngCore| -> Vec<usize> {
        let mut sel = rand::seq::index::sample(rng, pool.len(), take).into_vec();
        sel.sort_unstable();
        sel.into_iter().map(|i| pool[i]).collect()
    };
    let mut delta_sets = Vec::with_capacity(p.t1 * p.t2);
    for i in 0..p.t1 {
        for s in 0..p.t2 {
            let pool: Vec<usize> = p.b_group(i, s).collect();
            delta_sets.push(pick(&pool, p.delta, rng));
        }
    }
    let mut taken: std::collections::HashSet<usize> =
        delta_sets.iter().flatten().copied().collect();
    let mut gamma_sets = Vec::with_capacity(p.t1);
    for i in 0..p.t1 {
        let pool: Vec<usize> = p.a_group(i).filter(|c| !taken.contains(c)).collect();
        let sel = pick(&pool, p.h2, rng);
        taken.extend(sel.iter().copied());
        gamma_sets.push(sel);
    }
    let pool: Vec<usize> = (0..p.n).filter(|c| !taken.contains(c)).collect();
    let global_set = pick(&pool, p.h1, rng);
    ErasurePattern {
        delta_sets,
        gamma_sets,
        global_set,
    }
}

/// E-sets in the punctured-code definitions: E of size k + h1 with
/// |E ∩ B_{i,s}| <= r2 and |E ∩ A_i| = r1; coordinates outside all mid
/// groups are unconstrained.
pub fn enumerate_e_sets(p: &CodeProfile) -> impl Iterator<Item = Vec<usize>> {
    let per_group: Vec<Vec<Vec<usize>>> = (0..p.t1)
        .map(|i| {
            let coords: Vec<usize> = p.a_group(i).collect();
            coords
                .iter()
                .copied()
                .combinations(p.r1)
                .filter(|sel| {
                    (0..p.t2).all(|s| {
                        let b = p.b_group(i, s);
                        sel.iter().filter(|&&c| b.contains(&c)).count() <= p.r2
                    })
                })
                .collect()
        })
        .collect();
    let outside: Vec<usize> = p.outside_cols().collect();
    let rem = (p.k + p.h1).saturating_sub(p.t1 * p.r1);
    let outside_choices: Vec<Vec<usize>> = outside.into_iter().combinations(rem).collect();

    per_group
        .into_iter()
        .multi_cartesian_product()
        .cartesian_product(outside_choices)
        .map(|(groups, out)| {
            let mut e: Vec<usize> = groups.into_iter().flatten().chain(out).collect();
            e.sort_unstable();
            e
        })
}

/// Closed-form count of E-sets (product of per-group composition counts).
pub fn e_set_count(p: &CodeProfile) -> u128 {
    // sum over (e_1..e_t2, e_mid) with e_s <= r2, e_mid <= mid size,
    // sum = r1, of prod C(n2, e_s) * C(mid, e_mid)
    let mid = p.mid_cols(0).len();
    fn rec(p: &CodeProfile, s: usize, left: usize, mid: usize) -> u128 {
        if s == p.t2 {
            return if left <= mid {
                binomial(mid as u64, left as u64)
            } else {
                0
            };
        }
        let mut acc = 0u128;
        for take in 0..=p.r2.min(left).min(p.n2) {
            acc += binomial(p.n2 as u64, take as u64) * rec(p, s + 1, left - take, mid);
        }
        acc
    }
    let per_group = rec(p, 0, p.r1, mid);
    let rem = (p.k + p.h1).saturating_sub(p.t1 * p.r1);
    per_group.pow(p.t1 as u32) * binomial(p.outside_cols().len() as u64, rem as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::profile::CodeProfile;

    #[test]
    fn example_profile_pattern_count() {
        let p = CodeProfile::hl(5, 3, 2, 1, 1, 2).unwrap();
        // independent counting oracle: product of per-layer binomials computed
        // longhand: C(4,2)^4 local, C(4,1)^2 gamma, 6 remaining for the global
        let expected = 6u128.pow(4) * 4u128.pow(2) * 6;
        assert_eq!(pattern_count(&p), expected);
        assert_eq!(expected, 124_416);
    }

    #[test]
    fn pattern_iterator_matches_count_small() {
        for p in [
            CodeProfile::hl(3, 2, 1, 1, 1, 1).unwrap(),
            CodeProfile::hl(2, 1, 1, 1, 1, 1).unwrap(),
            CodeProfile::hdl(2, 2, 1, 1, 0, 1).unwrap(),
            CodeProfile::local(4, 2, 2, 1).unwrap(),
        ] {
            let n = enumerate_erasure_patterns(&p).count() as u128;
            assert_eq!(n, pattern_count(&p), "{p:?}");
        }
    }

    #[test]
    fn patterns_are_distinct_and_lexicographic() {
        let p = CodeProfile::hl(2, 1, 1, 1, 1, 1).unwrap();
        let all: Vec<Vec<usize>> = enumerate_erasure_patterns(&p)
            .map(|pat| {
                let mut key = Vec::new();
                for s in &pat.delta_sets {
                    key.extend(s);
                }
                for s in &pat.gamma_sets {
                    key.extend(s);
                }
                key.extend(&pat.global_set);
                key
            })
            .collect();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(all, sorted);
    }

    #[test]
    fn pattern_sizes_are_exact() {
        let p = CodeProfile::hl(3, 2, 1, 1, 1, 1).unwrap();
        for pat in enumerate_erasure_patterns(&p) {
            assert_eq!(pat.total(), p.n - p.k);
            assert_eq!(pat.erased().len(), p.n - p.k, "layers must be disjoint");
            for ds in &pat.delta_sets {
                assert_eq!(ds.len(), p.delta);
            }
            for gs in &pat.gamma_sets {
                assert_eq!(gs.len(), p.h2);
            }
            assert_eq!(pat.global_set.len(), p.h1);
        }
    }

    #[test]
    fn degenerate_all_zero_layers() {
        let p = CodeProfile::hl(2, 2, 2, 0, 0, 0).unwrap();
        let pats: Vec<_> = enumerate_erasure_patterns(&p).collect();
        assert_eq!(pats.len(), 1);
        assert!(pats[0].erased().is_empty());
        let es: Vec<_> = enumerate_e_sets(&p).collect();
        assert_eq!(es, vec![vec![0, 1]]);
    }

    #[test]
    fn degenerate_single_global_erasure() {
        let p = CodeProfile::hl(3, 2, 2, 1, 0, 0).unwrap();
        let pats: Vec<_> = enumerate_erasure_patterns(&p).collect();
        assert_eq!(pats.len(), p.n);
        for (c, pat) in pats.iter().enumerate() {
            assert_eq!(pat.erased(), vec![c]);
        }
    }

    #[test]
    fn local_only_patterns() {
        let p = CodeProfile::hl(4, 2, 1, 0, 0, 1).unwrap();
        // h1 = h2 = 0: patterns are exactly the delta-subsets per local group
        let count = enumerate_erasure_patterns(&p).count() as u128;
        assert_eq!(count, binomial(p.n2 as u64, 1).pow((p.t1 * p.t2) as u32));
    }

    #[test]
    fn hdl_tiny_hand_count() {
        let p = CodeProfile::hdl(2, 2, 1, 1, 0, 1).unwrap();
        assert_eq!(p.n, 5);
        // E-sets: one coordinate from each of the two local pairs, plus the
        // forced outside parity
        let es: Vec<_> = enumerate_e_sets(&p).collect();
        assert_eq!(es.len(), 4);
        assert_eq!(e_set_count(&p), 4);
        for e in &es {
            assert_eq!(e.len(), p.k + p.h1);
            assert!(e.contains(&4));
        }
        // patterns: 2 * 2 local choices, 3 remaining global spots
        assert_eq!(pattern_count(&p), 12);
        assert_eq!(enumerate_erasure_patterns(&p).count(), 12);
    }

    #[test]
    fn e_sets_match_naive_filter() {
        let p = CodeProfile::hl(2, 1, 1, 1, 1, 1).unwrap();
        let from_enum: Vec<Vec<usize>> = enumerate_e_sets(&p).sorted().collect();
        let naive: Vec<Vec<usize>> = (0..p.n)
            .combinations(p.k + p.h1)
            .filter(|e| {
                (0..p.t1).all(|i| {
                    let a = p.a_group(i);
                    let in_a = e.iter().filter(|&&c| a.contains(&c)).count();
                    in_a == p.r1
                        && (0..p.t2).all(|s| {
                            let b = p.b_group(i, s);
                            e.iter().filter(|&&c| b.contains(&c)).count() <= p.r2
                        })
                })
            })
            .collect();
        assert_eq!(from_enum, naive);
        assert_eq!(from_enum.len() as u128, e_set_count(&p));
    }

    #[test]
    fn example_e_set_count_matches_naive_filter() {
        // the n=16 profile: filter all C(16,6) subsets
        let p = CodeProfile::hl(5, 3, 2, 1, 1, 2).unwrap();
        let naive = (0..p.n)
            .combinations(p.k + p.h1)
            .filter(|e| {
                (0..p.t1).all(|i| {
                    let a = p.a_group(i);
                    e.iter().filter(|&&c| a.contains(&c)).count() == p.r1
                        && (0..p.t2).all(|s| {
                            let b = p.b_group(i, s);
                            e.iter().filter(|&&c| b.contains(&c)).count() <= p.r2
                        })
                })
            })
            .count();
        assert_eq!(naive as u128, e_set_count(&p));
        assert_eq!(enumerate_e_sets(&p).count(), naive);
    }

    #[test]
    fn mid_patterns_have_no_global_layer() {
        let p = CodeProfile::hl(3, 2, 1, 1, 1, 1).unwrap();
        let mids: Vec<_> = enumerate_mid_patterns(&p).collect();
        assert!(mids.iter().all(|m| m.global_set.is_empty()));
        let expected = binomial(p.n2 as u64, p.delta as u64).pow((p.t1 * p.t2) as u32)
            * binomial((p.n1 - p.t2 * p.delta) as u64, p.h2 as u64).pow(p.t1 as u32);
        assert_eq!(mids.len() as u128, expected);
    }
}
