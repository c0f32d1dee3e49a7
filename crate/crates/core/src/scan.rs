//! Exhaustive enumeration of small semi-Cayley graphs.

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{ConnectionSets, Orbit, SemiCayleyGraph};
use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::mintime::{self, CrossOrbitMinTime, IntegralityVerdict, MinTimeReport};
use crate::revival::{detect, DetectOptions, DetectReport};
use crate::tolerance::Tolerances;
use crate::walk::Walk;

/// Upper bound on the number of `(R, L, S)` triples in one scan.
pub const MAX_CANDIDATES: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    /// Groups of every order up to this bound, unless `shapes` is given.
    pub max_order: u32,
    /// Explicit factor lists, overriding `max_order`.
    pub shapes: Option<Vec<Vec<u32>>>,
    pub r_equals_l: bool,
    pub s_min: usize,
    pub s_max: Option<usize>,
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
    /// Largest denominator in the rational sweep of each graph.
    pub max_denominator: Option<u64>,
    /// Keep only the earliest certificate per pairing and kind.
    pub earliest_only: bool,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            max_order: 6,
            shapes: None,
            r_equals_l: true,
            s_min: 0,
            s_max: None,
            workers: None,
            max_denominator: None,
            earliest_only: true,
        }
    }
}

/// Invariant-factor lists `n_1 | n_2 | ... | n_k` with product `order`.
pub fn abelian_shapes(order: u32) -> Vec<Vec<u32>> {
    fn go(remaining: u32, min: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 1 {
            out.push(prefix.clone());
            return;
        }
        for d in 2..=remaining {
            if !remaining.is_multiple_of(d) || d % min != 0 {
                continue;
            }
            prefix.push(d);
            go(remaining / d, d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if order >= 2 {
        go(order, 1, &mut Vec::new(), &mut out);
    }
    out
}

/// Identity-free inverse-closed subsets, in bitmask order over the
/// `{g, -g}` classes.
pub fn symmetric_subsets(group: &FiniteAbelianGroup) -> Vec<Vec<GroupElement>> {
    let mut classes: Vec<Vec<GroupElement>> = Vec::new();
    let mut seen = vec![false; group.order()];
    for g in group.elements() {
        let i = group.index_of(&g);
        if g.is_identity() || seen[i] {
            continue;
        }
        let inv = group.inverse(&g);
        seen[i] = true;
        seen[group.index_of(&inv)] = true;
        if inv == g {
            classes.push(vec![g]);
        } else {
            classes.push(vec![g, inv]);
        }
    }
    (0u64..1 << classes.len())
        .map(|mask| {
            let mut set: Vec<GroupElement> = classes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, c)| c.iter().cloned())
                .collect();
            set.sort_by_key(|g| group.index_of(g));
            set
        })
        .collect()
}

fn all_subsets(group: &FiniteAbelianGroup, min: usize, max: usize) -> Vec<Vec<GroupElement>> {
    let elements: Vec<GroupElement> = group.elements().collect();
    (0u64..1 << elements.len())
        .filter(|mask| (min..=max).contains(&(mask.count_ones() as usize)))
        .map(|mask| {
            elements
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, g)| g.clone())
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CrossOrbitEntry {
    Report(MinTimeReport),
    Impossible {
        a: GroupElement,
        source: Orbit,
        reason: String,
    },
}

#[derive(Debug, Clone)]
pub struct ScanRecord {
    pub walk: Walk,
    pub integrality: IntegralityVerdict,
    /// `M(a)` per order-2 element; empty unless `R = L` and integral.
    pub m_table: Vec<MinTimeReport>,
    /// `N(a)` per element and source orbit; empty unless `R = L` and integral.
    pub n_table: Vec<CrossOrbitEntry>,
    pub detect: DetectReport,
}

struct Job {
    group: FiniteAbelianGroup,
    r: Vec<GroupElement>,
    l: Vec<GroupElement>,
    s: Vec<GroupElement>,
}

impl ScanSpec {
    pub fn groups(&self) -> Result<Vec<FiniteAbelianGroup>> {
        let shapes = match &self.shapes {
            Some(s) => s.clone(),
            None => (2..=self.max_order).flat_map(abelian_shapes).collect(),
        };
        shapes.into_iter().map(FiniteAbelianGroup::new).collect()
    }

    /// Number of `(R, L, S)` triples the scan would visit.
    pub fn candidate_count(&self) -> Result<u128> {
        let mut total: u128 = 0;
        for g in self.groups()? {
            let n = g.order();
            if n > 24 {
                return Err(Error::SizeCap {
                    what: "scan group order",
                    actual: n,
                    cap: 24,
                });
            }
            let classes = symmetric_subsets_count(&g);
            let rl = if self.r_equals_l {
                classes
            } else {
                classes * classes
            };
            let s_max = self.s_max.unwrap_or(n).min(n);
            let s: u128 = (self.s_min..=s_max)
                .map(|k| binomial(n as u128, k as u128))
                .sum();
            total += rl * s;
        }
        Ok(total)
    }

    fn jobs(&self) -> Result<Vec<Job>> {
        let count = self.candidate_count()?;
        if count > MAX_CANDIDATES {
            return Err(Error::SizeCap {
                what: "scan candidates",
                actual: count.min(usize::MAX as u128) as usize,
                cap: MAX_CANDIDATES as usize,
            });
        }
        let mut jobs = Vec::new();
        for group in self.groups()? {
            let sym = symmetric_subsets(&group);
            let s_sets = all_subsets(&group, self.s_min, self.s_max.unwrap_or(group.order()));
            for (ri, r) in sym.iter().enumerate() {
                for (li, l) in sym.iter().enumerate() {
                    if self.r_equals_l && ri != li {
                        continue;
                    }
                    for s in &s_sets {
                        jobs.push(Job {
                            group: group.clone(),
                            r: r.clone(),
                            l: l.clone(),
                            s: s.clone(),
                        });
                    }
                }
            }
        }
        Ok(jobs)
    }
}

fn symmetric_subsets_count(group: &FiniteAbelianGroup) -> u128 {
    let involutions = group.involutions().len();
    let pairs = (group.order() - 1 - involutions) / 2;
    1u128 << (involutions + pairs)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Analyses one graph: integrality, the `M`/`N` tables and detection.
pub fn analyse(walk: Walk, options: &DetectOptions) -> Result<ScanRecord> {
    let integrality = mintime::integrality_check(&walk);
    let mut m_table = Vec::new();
    let mut n_table = Vec::new();
    if walk.graph().r_equals_l() && integrality.integral {
        let group = walk.graph().group().clone();
        for a in group.involutions() {
            m_table.push(mintime::compute_m(&walk, &a)?);
        }
        for a in group.elements() {
            for source in Orbit::both() {
                n_table.push(match mintime::compute_n(&walk, &a, source)? {
                    CrossOrbitMinTime::Report(r) => CrossOrbitEntry::Report(r),
                    CrossOrbitMinTime::Impossible(reason) => CrossOrbitEntry::Impossible {
                        a: a.clone(),
                        source,
                        reason,
                    },
                });
            }
        }
    }
    let detect = detect(&walk, options);
    Ok(ScanRecord {
        walk,
        integrality,
        m_table,
        n_table,
        detect,
    })
}

/// Runs the scan; records come back in enumeration order.
pub fn scan(spec: &ScanSpec, tol: &Tolerances) -> Result<Vec<ScanRecord>> {
    let jobs = spec.jobs()?;
    let options = DetectOptions {
        max_denominator: spec.max_denominator,
        earliest_only: spec.earliest_only,
        ..DetectOptions::default()
    };
    let run = || -> Result<Vec<ScanRecord>> {
        jobs.par_iter()
            .map(|job| {
                let graph = SemiCayleyGraph::build(
                    job.group.clone(),
                    ConnectionSets::new(job.r.clone(), job.l.clone(), job.s.clone()),
                )?;
                analyse(Walk::new(graph, *tol), &options)
            })
            .collect()
    };
    match spec.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Precondition(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revival::{Relation, RevivalKind};

    #[test]
    fn shapes_up_to_eight() {
        assert_eq!(abelian_shapes(4), vec![vec![2, 2], vec![4]]);
        assert_eq!(abelian_shapes(8), vec![vec![2, 2, 2], vec![2, 4], vec![8]]);
        assert_eq!(abelian_shapes(6), vec![vec![6]]);
        assert!(abelian_shapes(1).is_empty());
    }

    #[test]
    fn symmetric_subset_counts() {
        let z4 = FiniteAbelianGroup::cyclic(4).unwrap();
        assert_eq!(symmetric_subsets(&z4).len(), 4);
        assert_eq!(symmetric_subsets_count(&z4), 4);
        let k4 = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        assert_eq!(symmetric_subsets(&k4).len(), 8);
    }

    #[test]
    fn bound_is_enforced() {
        let spec = ScanSpec {
            shapes: Some(vec![vec![22]]),
            r_equals_l: false,
            ..ScanSpec::default()
        };
        assert!(matches!(
            scan(&spec, &Tolerances::default()),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn z2_sweep_recovers_matching_and_four_cycle() {
        let spec = ScanSpec {
            shapes: Some(vec![vec![2]]),
            r_equals_l: false,
            ..ScanSpec::default()
        };
        let records = scan(&spec, &Tolerances::default()).unwrap();
        assert_eq!(records.len(), 2 * 2 * 4);
        let find = |r: &[i64], l: &[i64], s: &[i64]| {
            records
                .iter()
                .find(|rec| {
                    let sets = rec.walk.graph().sets();
                    let res = |x: &[GroupElement]| {
                        x.iter().map(|g| g.residues()[0] as i64).collect::<Vec<_>>()
                    };
                    res(&sets.r) == r && res(&sets.l) == l && res(&sets.s) == s
                })
                .unwrap()
        };
        let matching = find(&[], &[], &[0]);
        assert!(matching
            .detect
            .certificates
            .iter()
            .any(|c| c.relation == Relation::CrossOrbit && c.kind == RevivalKind::Proper));
        let c4 = find(&[], &[], &[0, 1]);
        assert!(c4
            .detect
            .certificates
            .iter()
            .any(|c| c.kind == RevivalKind::PerfectStateTransfer));
        for rec in &records {
            if rec.walk.graph().sets().s.is_empty() {
                assert!(rec
                    .detect
                    .certificates
                    .iter()
                    .all(|c| c.relation == Relation::SameOrbit));
            }
        }
    }

    #[test]
    fn fixed_worker_count_gives_same_order() {
        let spec = ScanSpec {
            shapes: Some(vec![vec![3]]),
            workers: Some(2),
            ..ScanSpec::default()
        };
        let a = scan(&spec, &Tolerances::default()).unwrap();
        let b = scan(
            &ScanSpec {
                workers: Some(1),
                ..spec
            },
            &Tolerances::default(),
        )
        .unwrap();
        let key = |r: &ScanRecord| format!("{:?}", r.walk.graph().sets());
        assert_eq!(
            a.iter().map(key).collect::<Vec<_>>(),
            b.iter().map(key).collect::<Vec<_>>()
        );
    }
}
