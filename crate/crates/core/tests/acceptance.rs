//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semicayley::cayley::{from_cayley, CayleyOverExtension, ExtensionKind};
use semicayley::graph::{ConnectionSets, Orbit, SemiCayleyGraph, Vertex};
use semicayley::group::{FiniteAbelianGroup, GroupElement};
use semicayley::mintime::{self, AuditStatus, CrossOrbitMinTime};
use semicayley::revival::{
    self, detect, DetectOptions, Relation, RevivalCertificate, RevivalKind, RowVerdict,
};
use semicayley::scan::{abelian_shapes, scan, symmetric_subsets, ScanRecord, ScanSpec};
use semicayley::time::Time;
use semicayley::tolerance::Tolerances;
use semicayley::walk::Walk;

const RESIDUAL: f64 = 1e-8;
const UNITARITY: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-10;
const ROOT_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn cyclic_walk(n: u32, r: &[i64], l: &[i64], s: &[i64]) -> Walk {
    let w = |xs: &[i64]| xs.iter().map(|&x| vec![x]).collect::<Vec<_>>();
    let g = SemiCayleyGraph::from_residues(vec![n], &w(r), &w(l), &w(s)).unwrap();
    Walk::new(g, Tolerances::default())
}

fn full_walk(factors: Vec<u32>) -> Walk {
    let group = FiniteAbelianGroup::new(factors).unwrap();
    let all: Vec<GroupElement> = group.elements().collect();
    let g = SemiCayleyGraph::build(group, ConnectionSets::new(vec![], vec![], all)).unwrap();
    Walk::new(g, Tolerances::default())
}

fn all_hits() -> DetectOptions {
    DetectOptions {
        earliest_only: false,
        ..DetectOptions::default()
    }
}

/// Residual of a certificate against the dense exponential.
fn oracle_residual(walk: &Walk, c: &RevivalCertificate) -> f64 {
    let h = walk.oracle(&c.time).unwrap().matrix;
    let g = walk.graph();
    let ui = g.vertex_index(&c.u);
    let vi = g.vertex_index(&c.v);
    (0..g.vertex_count())
        .map(|j| {
            let expected = if j == ui {
                c.pair.alpha
            } else if j == vi {
                c.pair.beta
            } else {
                Complex64::new(0.0, 0.0)
            };
            (h[(ui, j)] - expected).norm()
        })
        .fold(0.0, f64::max)
}

fn antipodal_family() -> Vec<(u32, Walk)> {
    [4u32, 6, 8, 10]
        .into_iter()
        .map(|n| {
            let h = (n / 2) as i64;
            let s: Vec<i64> = (0..n as i64).collect();
            (n, cyclic_walk(n, &[h], &[h], &s))
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (n, walk) in antipodal_family() {
        let start = Instant::now();
        let report = detect(&walk, &DetectOptions::default());
        let elapsed = start.elapsed().as_secs_f64();
        let group = walk.graph().group();
        let u = Vertex::new(group.identity(), Orbit::Right);
        let v = Vertex::new(group.element(&[(n / 2) as i64]).unwrap(), Orbit::Right);
        let angle = TAU / n as f64;
        let want_alpha = Complex64::new(angle.cos(), 0.0);
        let want_beta = Complex64::new(0.0, angle.sin());
        let want_kind = if n == 4 {
            RevivalKind::PerfectStateTransfer
        } else {
            RevivalKind::Proper
        };
        let hit = report
            .certificates
            .iter()
            .find(|c| c.u == u && c.v == v && c.time == Time::Turns { k: 1, m: n as u64 });
        let ok = match hit {
            Some(c) => {
                let residual = oracle_residual(&walk, c);
                (c.pair.alpha - want_alpha).norm() < 1e-9
                    && (c.pair.beta - want_beta).norm() < 1e-9
                    && c.kind == want_kind
                    && residual <= RESIDUAL
                    && elapsed < 1.0
            }
            None => false,
        };
        pass &= ok;
        notes.push(format!(
            "n={n}:{}({elapsed:.3}s)",
            if ok { "ok" } else { "missing" }
        ));
    }
    Outcome::new(pass, notes.join(" "))
}

fn turns(time: &Time) -> (i64, u64) {
    match *time {
        Time::Turns { k, m } => (k, m),
        Time::Radians(_) => panic!("search produced a float time"),
    }
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (n, walk) in antipodal_family() {
        let a = walk.graph().group().element(&[(n / 2) as i64]).unwrap();
        let m = mintime::compute_m(&walk, &a).unwrap().value;
        let certs: Vec<_> = detect(&walk, &all_hits())
            .certificates
            .into_iter()
            .filter(|c| c.relation == Relation::SameOrbit && c.a == a)
            .collect();
        let min = certs
            .iter()
            .map(|c| turns(&c.time))
            .min_by(|x, y| (x.0 * y.1 as i64).cmp(&(y.0 * x.1 as i64)));
        let quantized = certs.iter().all(|c| {
            let (k, mm) = turns(&c.time);
            (k * n as i64) % mm as i64 == 0
        });
        let ok = m == n as u64 && min == Some((1, n as u64)) && quantized;
        pass &= ok;
        notes.push(format!("n={n}:M={m},first={min:?}"));
    }
    Outcome::new(pass, notes.join(" "))
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for factors in [vec![2], vec![3], vec![4], vec![2, 2]] {
        let walk = full_walk(factors.clone());
        let report = detect(&walk, &all_hits());
        let proper = report
            .certificates
            .iter()
            .filter(|c| c.kind == RevivalKind::Proper)
            .count();
        pass &= proper == 0;
        let mut note = format!("{factors:?}:proper={proper}");
        if factors == [2] {
            let group = walk.graph().group();
            let u = Vertex::new(group.identity(), Orbit::Right);
            let v = Vertex::new(group.element(&[1]).unwrap(), Orbit::Right);
            let pst = report.certificates.iter().find(|c| {
                c.kind == RevivalKind::PerfectStateTransfer
                    && c.u == u
                    && c.v == v
                    && c.time == Time::Turns { k: 1, m: 4 }
            });
            let ok = pst.is_some_and(|c| oracle_residual(&walk, c) <= RESIDUAL);
            pass &= ok;
            note.push_str(if ok { ",pst@1/4" } else { ",pst-missing" });
        }
        notes.push(note);
    }
    Outcome::new(pass, notes.join(" "))
}

fn random_subset<R: Rng>(rng: &mut R, items: &[GroupElement]) -> Vec<GroupElement> {
    items
        .iter()
        .filter(|_| rng.random_bool(0.5))
        .cloned()
        .collect()
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let shapes: Vec<Vec<u32>> = (2..=8).flat_map(abelian_shapes).collect();
    let (mut worst_diff, mut worst_unitary) = (0.0f64, 0.0f64);
    let graphs = 60;
    for _ in 0..graphs {
        let shape = shapes[rng.random_range(0..shapes.len())].clone();
        let group = FiniteAbelianGroup::new(shape).unwrap();
        let sym = symmetric_subsets(&group);
        let r = sym[rng.random_range(0..sym.len())].clone();
        let l = sym[rng.random_range(0..sym.len())].clone();
        let all: Vec<GroupElement> = group.elements().collect();
        let s = random_subset(&mut rng, &all);
        let graph = SemiCayleyGraph::build(group, ConnectionSets::new(r, l, s)).unwrap();
        let walk = Walk::new(graph, Tolerances::default());
        for i in 0..10 {
            let time = if i % 2 == 0 {
                Time::Radians(rng.random_range(0.0..12.0))
            } else {
                let m = rng.random_range(1..=24u64);
                Time::Turns {
                    k: rng.random_range(0..(3 * m as i64)),
                    m,
                }
            };
            let closed = walk.spectral().transition_matrix(&time);
            let dense = walk.oracle(&time).unwrap();
            worst_diff = worst_diff.max(closed.max_abs_diff(&dense));
            worst_unitary = worst_unitary.max(closed.unitarity_defect());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    Outcome::new(
        worst_diff <= RESIDUAL && worst_unitary <= UNITARITY && elapsed < 30.0,
        format!(
            "{graphs} graphs x 10 times: max diff {worst_diff:.2e}, unitarity {worst_unitary:.2e}, {elapsed:.2}s"
        ),
    )
}

fn catalog(r_equals_l: bool, shapes: Vec<Vec<u32>>) -> Vec<ScanRecord> {
    let spec = ScanSpec {
        shapes: Some(shapes),
        r_equals_l,
        earliest_only: false,
        ..ScanSpec::default()
    };
    scan(&spec, &Tolerances::default()).unwrap()
}

fn small_shapes() -> Vec<Vec<u32>> {
    vec![vec![3], vec![4], vec![2, 2]]
}

fn criterion_5(records: &[ScanRecord]) -> Outcome {
    let mut worst = 0.0f64;
    let mut modes = 0;
    for rec in records {
        for m in rec.walk.spectral().modes() {
            modes += 1;
            worst = worst.max((m.c_plus + m.c_minus - 1.0).abs());
            worst = worst.max((m.d_plus + m.d_minus - 1.0).abs());
            worst = worst.max((m.e_plus.norm() - 0.5).max(0.0));
            worst = worst.max((m.e_minus.norm() - 0.5).max(0.0));
            if !m.in_x {
                worst = worst.max((m.e_plus + m.e_minus).norm());
            }
            let s2 = m.chi_s.norm_sqr();
            let target = if m.in_x {
                0.0
            } else {
                s2 / (4.0 * s2 + m.x * m.x)
            };
            worst = worst.max((m.c_plus * m.c_minus - target).abs());
            worst = worst.max((m.d_plus * m.d_minus - target).abs());
        }
    }
    Outcome::new(
        worst <= IDENTITY_TOL,
        format!(
            "{} graphs, {modes} characters, max deviation {worst:.2e}",
            records.len()
        ),
    )
}

fn criterion_6(records: &[ScanRecord]) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for rec in records.iter().filter(|r| r.integrality.integral) {
        let walk = &rec.walk;
        let group = walk.graph().group();
        let two_n = 2 * walk.n() as u64;
        for report in &rec.m_table {
            checked += 1;
            if report.value >= 1 && !two_n.is_multiple_of(report.value) {
                failures.push(format!("M={} n={}", report.value, walk.n()));
            }
            let g1 = revival::OrbitPartition::new(group, &report.a).unwrap().g1;
            for z1 in &g1 {
                let v = mintime::compute_m_with_reference(walk, &report.a, z1)
                    .unwrap()
                    .value;
                if v != report.value {
                    failures.push(format!("M depends on z1 ({v} vs {})", report.value));
                }
            }
        }
        for a in group.elements() {
            for source in Orbit::both() {
                let CrossOrbitMinTime::Report(report) =
                    mintime::compute_n(walk, &a, source).unwrap()
                else {
                    continue;
                };
                checked += 1;
                if report.value >= 1 && !two_n.is_multiple_of(report.value) {
                    failures.push(format!("N={} n={}", report.value, walk.n()));
                }
                let h1 = revival::SpokePartition::new(walk.spectral(), &a, source)
                    .unwrap()
                    .h1;
                for z1 in &h1 {
                    let v = match mintime::compute_n_with_reference(walk, &a, source, z1).unwrap() {
                        CrossOrbitMinTime::Report(r) => r.value,
                        CrossOrbitMinTime::Impossible(_) => u64::MAX,
                    };
                    if v != report.value {
                        failures.push(format!("N depends on z1 ({v} vs {})", report.value));
                    }
                }
            }
        }
    }
    Outcome::new(
        failures.is_empty() && checked > 0,
        if failures.is_empty() {
            format!("{checked} invariants checked over {} graphs", records.len())
        } else {
            failures.join("; ")
        },
    )
}

fn proper_certificates(rec: &ScanRecord) -> impl Iterator<Item = &RevivalCertificate> {
    rec.detect
        .certificates
        .iter()
        .filter(|c| c.kind == RevivalKind::Proper)
}

fn criterion_7(records: &[ScanRecord]) -> Outcome {
    let mut carriers = 0;
    let mut bad = 0;
    let non_integral = records.iter().filter(|r| !r.integrality.integral).count();
    for rec in records {
        if proper_certificates(rec).next().is_some() {
            carriers += 1;
            let v = &rec.integrality;
            if !(v.integral && v.chi_r_integral && v.chi_s_abs_integral) {
                bad += 1;
            }
        }
    }
    Outcome::new(
        bad == 0 && carriers > 0,
        format!(
            "{carriers} graphs carry proper revival, {bad} fail integrality ({non_integral} non-integral graphs in scan)"
        ),
    )
}

fn criterion_8(records: &[ScanRecord]) -> Outcome {
    let mut audited = 0;
    let mut informational = 0;
    let mut failed = 0;
    let mut check =
        |walk: &Walk, c: &RevivalCertificate| match mintime::root_of_unity_audit(walk, c) {
            AuditStatus::Pass => audited += 1,
            AuditStatus::Fail(d) => {
                audited += 1;
                failed += usize::from(d > ROOT_TOL);
            }
            AuditStatus::Informational(_) => informational += 1,
        };
    for (_, walk) in antipodal_family() {
        for c in detect(&walk, &DetectOptions::default()).certificates {
            check(&walk, &c);
        }
    }
    for rec in records {
        for c in proper_certificates(rec) {
            check(&rec.walk, c);
        }
    }
    Outcome::new(
        failed == 0 && audited > 0,
        format!("{audited} audited, {failed} failed, {informational} without quantization"),
    )
}

fn criterion_9() -> Outcome {
    let build = |n: u32, kind: ExtensionKind, y: Option<i64>, t1: &[i64], t2: &[i64]| {
        let base = FiniteAbelianGroup::cyclic(n).unwrap();
        let el = |x: i64| base.element(&[x]).unwrap();
        CayleyOverExtension::new(
            base.clone(),
            kind,
            y.map(el),
            t1.iter().map(|&x| el(x)).collect(),
            t2.iter().map(|&x| el(x)).collect(),
        )
        .unwrap()
    };
    let cases = [
        (
            "Dih(Z3)",
            build(3, ExtensionKind::Dihedral, None, &[], &[0, 1, 2]),
        ),
        (
            "Dih(Z6)",
            build(6, ExtensionKind::Dihedral, None, &[3], &[0, 1, 2, 3, 4, 5]),
        ),
        (
            "Dic(Z4,2)",
            build(4, ExtensionKind::Dicyclic, Some(2), &[2], &[0, 1, 2, 3]),
        ),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, ext) in cases {
        let (graph, relabel) = from_cayley(&ext).unwrap();
        let p = relabel.permutation_matrix();
        let permuted = p.transpose() * ext.cayley_adjacency() * &p;
        let ok = permuted == graph.adjacency();
        pass &= ok;
        notes.push(format!("{name}:{}", if ok { "equal" } else { "differs" }));
    }
    Outcome::new(pass, notes.join(" "))
}

fn criterion_10() -> Outcome {
    let shapes = vec![vec![2], vec![3], vec![4], vec![2, 2]];
    let records = catalog(false, shapes);
    let mut distinct_hits = Vec::new();
    let mut cross = 0;
    let mut failures = 0;
    for rec in &records {
        let walk = &rec.walk;
        for c in rec
            .detect
            .certificates
            .iter()
            .filter(|c| c.relation == Relation::CrossOrbit)
        {
            if !walk.graph().r_equals_l() {
                distinct_hits.push(format!("{:?} {} T={}", walk.graph().sets(), c.kind, c.time));
                continue;
            }
            cross += 1;
            let reciprocal = matches!(
                revival::reciprocity_check(walk, c).unwrap(),
                RowVerdict::Certified(_)
            );
            let audit = revival::block_shape_audit(walk, c).unwrap().pass;
            failures += usize::from(!(reciprocal && audit));
        }
    }
    let pass = distinct_hits.is_empty() && failures == 0 && cross > 0;
    let mut detail = format!(
        "{} graphs; {cross} cross-orbit certificates with R=L, {failures} fail reciprocity/block audit; {} with R!=L",
        records.len(),
        distinct_hits.len()
    );
    if let Some(first) = distinct_hits.first() {
        detail.push_str(&format!(" (first: {first})"));
    }
    Outcome::new(pass, detail)
}

fn main() {
    let records = catalog(true, small_shapes());
    let mut everything = catalog(false, small_shapes());
    everything.extend(catalog(true, small_shapes()));
    let results: Vec<(u32, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4()),
        (5, criterion_5(&everything)),
        (6, criterion_6(&records)),
        (7, criterion_7(&records)),
        (8, criterion_8(&records)),
        (9, criterion_9()),
        (10, criterion_10()),
    ];

    let mut failed = 0;
    for (n, o) in &results {
        println!(
            "criterion {n:>2}: {} {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
