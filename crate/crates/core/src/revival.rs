//! Fractional revival: exact row checks, the orbit characterizations and
//! the time-quantized search.
//!
//! `(α, β)`-revival from `u` to `v` at time `t` means the row `H(t)_{u,·}`
//! equals `α·e_u + β·e_v`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Orbit, Vertex};
use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::mintime;
use crate::spectral::{Branch, SpectralData};
use crate::time::Time;
use crate::walk::Walk;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RevivalKind {
    /// Both amplitudes nonzero.
    Proper,
    /// `α = 0`: perfect state transfer.
    PerfectStateTransfer,
    /// `β = 0`: the walk returns to `u`.
    Periodic,
}

impl RevivalKind {
    pub fn label(self) -> &'static str {
        match self {
            RevivalKind::Proper => "proper-fr",
            RevivalKind::PerfectStateTransfer => "pst",
            RevivalKind::Periodic => "periodic",
        }
    }
}

impl fmt::Display for RevivalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalPair {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl RevivalPair {
    /// Checks `|α|² + |β|² = 1` within `norm_tol`.
    pub fn new(alpha: Complex64, beta: Complex64, norm_tol: f64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !(norm - 1.0).abs().le(&norm_tol) {
            return Err(Error::validation(
                "pair",
                format!("|alpha|^2 + |beta|^2 = {norm}, expected 1"),
            ));
        }
        Ok(Self { alpha, beta })
    }

    /// `α = (p + q)/2`, `β = (p - q)/2` for two unit phases.
    pub fn from_phases(p: Complex64, q: Complex64) -> Self {
        Self {
            alpha: (p + q) / 2.0,
            beta: (p - q) / 2.0,
        }
    }

    pub fn kind(&self, amp_tol: f64) -> RevivalKind {
        if self.beta.norm() <= amp_tol {
            RevivalKind::Periodic
        } else if self.alpha.norm() <= amp_tol {
            RevivalKind::PerfectStateTransfer
        } else {
            RevivalKind::Proper
        }
    }

    /// `|αβ̄ + ᾱβ|`, which vanishes for every same-orbit revival.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.alpha * self.beta.conj() + self.alpha.conj() * self.beta).norm()
    }

    /// The pair for the reverse revival `v → u`: `(-ᾱβ/β̄, β)`.
    pub fn reciprocal(&self) -> Self {
        Self {
            alpha: -self.alpha.conj() * self.beta / self.beta.conj(),
            beta: self.beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    SameOrbit,
    CrossOrbit,
}

impl Relation {
    pub fn label(self) -> &'static str {
        match self {
            Relation::SameOrbit => "same-orbit",
            Relation::CrossOrbit => "cross-orbit",
        }
    }

    pub fn of(u: &Vertex, v: &Vertex) -> Self {
        if u.orbit == v.orbit {
            Relation::SameOrbit
        } else {
            Relation::CrossOrbit
        }
    }
}

/// Split of the characters by `χ_z(a) = ±1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPartition {
    pub a: GroupElement,
    pub g0: Vec<GroupElement>,
    pub g1: Vec<GroupElement>,
    in_g1: Vec<bool>,
}

impl OrbitPartition {
    /// Needs `2a = 0`; for `a = 0` the second part is empty.
    pub fn new(group: &FiniteAbelianGroup, a: &GroupElement) -> Result<Self> {
        group.check(a)?;
        if group.order_of(a) > 2 {
            return Err(Error::Precondition(format!(
                "pairing element {a} has order {}, need order 2",
                group.order_of(a)
            )));
        }
        let mut g0 = Vec::new();
        let mut g1 = Vec::new();
        let mut in_g1 = Vec::with_capacity(group.order());
        for z in group.elements() {
            let minus = group.chi(&z, a).re < 0.0;
            in_g1.push(minus);
            if minus {
                g1.push(z);
            } else {
                g0.push(z);
            }
        }
        Ok(Self {
            a: a.clone(),
            g0,
            g1,
            in_g1,
        })
    }

    pub fn in_g1(&self, group: &FiniteAbelianGroup, z: &GroupElement) -> bool {
        self.in_g1[group.index_of(z)]
    }
}

/// Split of the characters by the sign of the spoke coupling against `χ_a`.
///
/// For the source orbit `Right` the key is `e_z^+·χ_a(z)`, for `Left` it is
/// `e_z^+·conj(χ_a(z))`. `H0` collects positive keys and `H1` negative ones.
#[derive(Debug, Clone, PartialEq)]
pub struct SpokePartition {
    pub a: GroupElement,
    pub source: Orbit,
    pub h0: Vec<GroupElement>,
    pub h1: Vec<GroupElement>,
    in_h1: Vec<bool>,
}

impl SpokePartition {
    /// `None` when some `χ_z(S)` vanishes or some key is not real.
    pub fn new(spectral: &SpectralData, a: &GroupElement, source: Orbit) -> Option<Self> {
        let group = spectral.group();
        let tol = spectral.tolerances().phase;
        let mut h0 = Vec::new();
        let mut h1 = Vec::new();
        let mut in_h1 = Vec::new();
        for mode in spectral.modes() {
            if mode.in_x {
                return None;
            }
            let key = spoke_key(group, mode.e_plus, &mode.z, a, source);
            let unit = key / key.norm();
            if (unit - 1.0).norm() <= tol {
                h0.push(mode.z.clone());
                in_h1.push(false);
            } else if (unit + 1.0).norm() <= tol {
                h1.push(mode.z.clone());
                in_h1.push(true);
            } else {
                return None;
            }
        }
        Some(Self {
            a: a.clone(),
            source,
            h0,
            h1,
            in_h1,
        })
    }

    pub fn in_h1(&self, group: &FiniteAbelianGroup, z: &GroupElement) -> bool {
        self.in_h1[group.index_of(z)]
    }
}

fn spoke_key(
    group: &FiniteAbelianGroup,
    e_plus: Complex64,
    z: &GroupElement,
    a: &GroupElement,
    source: Orbit,
) -> Complex64 {
    let chi = group.chi(z, a);
    match source {
        Orbit::Right => e_plus * chi,
        Orbit::Left => e_plus * chi.conj(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Partition {
    Orbit(OrbitPartition),
    Spoke(SpokePartition),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevivalCertificate {
    pub u: Vertex,
    pub v: Vertex,
    pub time: Time,
    pub pair: RevivalPair,
    pub kind: RevivalKind,
    pub relation: Relation,
    /// `v - u` on the group part.
    pub a: GroupElement,
    pub partition: Option<Partition>,
    /// Max-abs deviation of the row from `α·e_u + β·e_v`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refutation {
    pub worst: Vertex,
    pub found: Complex64,
    pub expected: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowVerdict {
    Certified(RevivalCertificate),
    Refuted(Refutation),
}

impl RowVerdict {
    pub fn certificate(self) -> Option<RevivalCertificate> {
        match self {
            RowVerdict::Certified(c) => Some(c),
            RowVerdict::Refuted(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(String),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Evaluates the whole row `H(t)_{u,·}` and compares it with
/// `α·e_u + β·e_v`. Works for any connection sets.
pub fn verify_row(
    walk: &Walk,
    u: &Vertex,
    v: &Vertex,
    time: &Time,
    pair: &RevivalPair,
) -> Result<RowVerdict> {
    let graph = walk.graph();
    graph.check_vertex(u)?;
    graph.check_vertex(v)?;
    if u == v {
        return Err(Error::Precondition("revival needs u != v".into()));
    }
    let spectral = walk.spectral();
    let mut worst: Option<Refutation> = None;
    for w in graph.vertices() {
        let expected = if &w == u {
            pair.alpha
        } else if &w == v {
            pair.beta
        } else {
            Complex64::new(0.0, 0.0)
        };
        let found = spectral.transition_entry(u, &w, time);
        let dev = (found - expected).norm();
        if worst.as_ref().is_none_or(|r| dev > r.residual) {
            worst = Some(Refutation {
                worst: w,
                found,
                expected,
                residual: dev,
            });
        }
    }
    let worst = worst.expect("graph has vertices");
    if worst.residual > walk.tol().residual {
        return Ok(RowVerdict::Refuted(worst));
    }
    let group = graph.group();
    let a = group.difference(&u.element, &v.element);
    let relation = Relation::of(u, v);
    let partition = match relation {
        Relation::SameOrbit => OrbitPartition::new(group, &a).ok().map(Partition::Orbit),
        Relation::CrossOrbit => SpokePartition::new(spectral, &a, u.orbit).map(Partition::Spoke),
    };
    Ok(RowVerdict::Certified(RevivalCertificate {
        u: u.clone(),
        v: v.clone(),
        time: *time,
        pair: *pair,
        kind: pair.kind(walk.tol().amplitude),
        relation,
        a,
        partition,
        residual: worst.residual,
    }))
}

fn unit_label(p: Complex64) -> String {
    format!("{:.6}{:+.6}i", p.re, p.im)
}

/// Same-orbit characterization from a vertex in `orbit`.
///
/// From orbit `Right`, `exp(itλ_z^+)` must equal `α + β` on `G0` and
/// `α - β` on `G1`, and off `X` the same holds for `λ_z^-`. From orbit
/// `Left` the two branches swap roles.
pub fn check_same_orbit(
    walk: &Walk,
    a: &GroupElement,
    time: &Time,
    pair: &RevivalPair,
    orbit: Orbit,
) -> Result<Verdict> {
    let group = walk.graph().group();
    group.check(a)?;
    if group.order_of(a) != 2 {
        return Err(Error::Precondition(format!(
            "pairing element {a} must have order 2"
        )));
    }
    let partition = OrbitPartition::new(group, a)?;
    let spectral = walk.spectral();
    let tol = walk.tol().phase;
    let (always, off_x) = match orbit {
        Orbit::Right => (Branch::Plus, Branch::Minus),
        Orbit::Left => (Branch::Minus, Branch::Plus),
    };
    for mode in spectral.modes() {
        let (target, part) = if partition.in_g1(group, &mode.z) {
            (pair.alpha - pair.beta, "G1")
        } else {
            (pair.alpha + pair.beta, "G0")
        };
        let mut branches = vec![always];
        if !mode.in_x {
            branches.push(off_x);
        }
        for branch in branches {
            let p = spectral.phase(mode.lambda(branch), time);
            if (p - target).norm() > tol {
                let sign = match branch {
                    Branch::Plus => '+',
                    Branch::Minus => '-',
                };
                return Ok(Verdict::Reject(format!(
                    "z = {} in {part}: exp(it lambda^{sign}) = {} differs from {}",
                    mode.z,
                    unit_label(p),
                    unit_label(target)
                )));
            }
        }
    }
    Ok(Verdict::Accept)
}

/// Cross-orbit characterization for revival from `(g, source)` to
/// `(g + a, other)`.
pub fn check_cross_orbit(
    walk: &Walk,
    a: &GroupElement,
    time: &Time,
    pair: &RevivalPair,
    source: Orbit,
) -> Result<Verdict> {
    let group = walk.graph().group();
    group.check(a)?;
    let spectral = walk.spectral();
    if spectral.modes().iter().any(|m| m.in_x) {
        return Ok(Verdict::Reject("X nonempty".into()));
    }
    let tol = walk.tol();
    for mode in spectral.modes() {
        let key = spoke_key(group, mode.e_plus, &mode.z, a, source);
        if key.im.abs() > tol.zero {
            return Ok(Verdict::Reject(format!(
                "z = {}: reality condition fails (imaginary part {:e})",
                mode.z, key.im
            )));
        }
        let chi_bar = group.chi(&mode.z, a).conj();
        let (w_plus, w_minus, coupling) = match source {
            Orbit::Right => (mode.c_minus, mode.c_plus, mode.e_plus),
            Orbit::Left => (mode.d_minus, mode.d_plus, mode.e_plus.conj()),
        };
        let shift = pair.beta * chi_bar / coupling;
        let targets = [
            (Branch::Plus, pair.alpha + w_plus * shift),
            (Branch::Minus, pair.alpha - w_minus * shift),
        ];
        for (branch, target) in targets {
            let p = spectral.phase(mode.lambda(branch), time);
            if (p - target).norm() > tol.phase {
                let sign = match branch {
                    Branch::Plus => '+',
                    Branch::Minus => '-',
                };
                return Ok(Verdict::Reject(format!(
                    "z = {}: exp(it lambda^{sign}) = {} differs from {}",
                    mode.z,
                    unit_label(p),
                    unit_label(target)
                )));
            }
        }
    }
    Ok(Verdict::Accept)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Same,
    Cross,
    Both,
}

impl SearchMode {
    fn same(self) -> bool {
        matches!(self, SearchMode::Same | SearchMode::Both)
    }

    fn cross(self) -> bool {
        matches!(self, SearchMode::Cross | SearchMode::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub a: Option<GroupElement>,
    pub message: String,
    /// Set when two independent evaluations disagreed beyond tolerance.
    pub breach: bool,
}

impl Diagnostic {
    fn note(a: Option<&GroupElement>, message: impl Into<String>) -> Self {
        Self {
            a: a.cloned(),
            message: message.into(),
            breach: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchOutcome {
    pub certificates: Vec<RevivalCertificate>,
    pub diagnostics: Vec<Diagnostic>,
}

fn reduced(k: u64, m: u64) -> Time {
    let g = gcd(k, m).max(1);
    Time::Turns {
        k: (k / g) as i64,
        m: m / g,
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

enum Candidate {
    Same {
        a: GroupElement,
        k: u64,
        m: u64,
        orbit: Orbit,
    },
    Cross {
        a: GroupElement,
        k: u64,
        m: u64,
        source: Orbit,
    },
}

/// Time-quantized search over the characterizations.
///
/// Requires an integral spectrum. Every hit is confirmed by [`verify_row`];
/// a hit that the row check rejects is reported as a breach diagnostic.
pub fn search(walk: &Walk, mode: SearchMode) -> Result<SearchOutcome> {
    let integrality = mintime::integrality_check(walk);
    if let Some(w) = integrality.witnesses.first() {
        return Err(Error::NonIntegral {
            z: w.z.residues().to_vec(),
            eigenvalue: w.eigenvalue,
        });
    }
    let graph = walk.graph();
    let group = graph.group();
    let mut diagnostics = Vec::new();
    let mut candidates = Vec::new();
    if !graph.r_equals_l() {
        diagnostics.push(Diagnostic::note(
            None,
            "quantized search needs R = L; use verify mode or the rational sweep",
        ));
        return Ok(SearchOutcome {
            certificates: Vec::new(),
            diagnostics,
        });
    }
    if mode.same() {
        let involutions = group.involutions();
        if involutions.is_empty() {
            diagnostics.push(Diagnostic::note(
                None,
                "no valid a: no element of order 2, same-orbit revival impossible",
            ));
        }
        for a in involutions {
            let report = mintime::compute_m(walk, &a)?;
            if report.value == 0 {
                diagnostics.push(Diagnostic::note(
                    Some(&a),
                    "M = 0: no time quantization, same-orbit search skipped (use verify mode)",
                ));
                continue;
            }
            for k in 1..report.value {
                for orbit in Orbit::both() {
                    candidates.push(Candidate::Same {
                        a: a.clone(),
                        k,
                        m: report.value,
                        orbit,
                    });
                }
            }
        }
    }
    if mode.cross() {
        if walk.spectral().modes().iter().any(|m| m.in_x) {
            diagnostics.push(Diagnostic::note(
                None,
                "X nonempty: cross-orbit revival impossible",
            ));
        } else {
            for a in group.elements() {
                for source in Orbit::both() {
                    match mintime::compute_n(walk, &a, source)? {
                        mintime::CrossOrbitMinTime::Impossible(reason) => {
                            let _ = reason;
                        }
                        mintime::CrossOrbitMinTime::Report(report) => {
                            if report.value == 0 {
                                diagnostics.push(Diagnostic::note(
                                    Some(&a),
                                    format!(
                                        "N = 0 from orbit {}: no time quantization, cross-orbit search skipped (use verify mode)",
                                        source.index()
                                    ),
                                ));
                                continue;
                            }
                            for k in 1..report.value {
                                candidates.push(Candidate::Cross {
                                    a: a.clone(),
                                    k,
                                    m: report.value,
                                    source,
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    let results: Vec<Result<Option<std::result::Result<RevivalCertificate, Diagnostic>>>> =
        candidates
            .par_iter()
            .map(|c| run_candidate(walk, c))
            .collect();
    let mut certificates = Vec::new();
    for r in results {
        match r? {
            Some(Ok(cert)) => certificates.push(cert),
            Some(Err(d)) => diagnostics.push(d),
            None => {}
        }
    }
    Ok(SearchOutcome {
        certificates,
        diagnostics,
    })
}

fn run_candidate(
    walk: &Walk,
    candidate: &Candidate,
) -> Result<Option<std::result::Result<RevivalCertificate, Diagnostic>>> {
    let spectral = walk.spectral();
    let group = walk.graph().group();
    let identity = group.identity();
    let (a, time, pair, u, v, accepted) = match candidate {
        Candidate::Same { a, k, m, orbit } => {
            let time = reduced(*k, *m);
            let branch = match orbit {
                Orbit::Right => Branch::Plus,
                Orbit::Left => Branch::Minus,
            };
            let partition = OrbitPartition::new(group, a)?;
            let z1 = &partition.g1[0];
            let p = spectral.phase(spectral.mode(&identity).lambda(branch), &time);
            let q = spectral.phase(spectral.mode(z1).lambda(branch), &time);
            let pair = RevivalPair::from_phases(p, q);
            let accepted = check_same_orbit(walk, a, &time, &pair, *orbit)?;
            let u = Vertex::new(identity.clone(), *orbit);
            let v = Vertex::new(a.clone(), *orbit);
            (a, time, pair, u, v, accepted)
        }
        Candidate::Cross { a, k, m, source } => {
            let time = reduced(*k, *m);
            let base = spectral.mode(&identity);
            let p = spectral.phase(base.lambda_plus, &time);
            let q = spectral.phase(base.lambda_minus, &time);
            let pair = RevivalPair::from_phases(p, q);
            if pair.beta.norm() <= walk.tol().amplitude {
                return Ok(None);
            }
            let accepted = check_cross_orbit(walk, a, &time, &pair, *source)?;
            let u = Vertex::new(identity.clone(), *source);
            let v = Vertex::new(a.clone(), source.other());
            (a, time, pair, u, v, accepted)
        }
    };
    if !accepted.is_accept() {
        return Ok(None);
    }
    Ok(Some(match verify_row(walk, &u, &v, &time, &pair)? {
        RowVerdict::Certified(cert) => Ok(cert),
        RowVerdict::Refuted(r) => Err(Diagnostic {
            a: Some(a.clone()),
            message: format!(
                "characterization accepted {u} -> {v} at T = {time} but the row check deviates by {:e}",
                r.residual
            ),
            breach: true,
        }),
    }))
}

/// Threshold below which a row entry counts as zero when reading supports.
const SUPPORT_FLOOR: f64 = 1e-6;

/// All reduced times `T = k/m` with `0 < k < m <= max_den`, in increasing
/// order of `T`.
pub fn rational_times(max_den: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for m in 2..=max_den {
        for k in 1..m {
            if gcd(k, m) == 1 {
                out.push((k, m));
            }
        }
    }
    out.sort_by(|x, y| (x.0 * y.1).cmp(&(y.0 * x.1)));
    out
}

/// Scans the rows from `(0, 0)` and `(0, 1)` at every rational time with
/// denominator up to `max_den`. Any row supported on two vertices (or moved
/// wholesale to another vertex) is confirmed with [`verify_row`]. Rows that
/// stay on `u` are periodic and skipped. Needs no integrality.
pub fn sweep(walk: &Walk, max_den: u64) -> Vec<RevivalCertificate> {
    let times = rational_times(max_den);
    let graph = walk.graph();
    let rows: Vec<Vec<RevivalCertificate>> = times
        .par_iter()
        .map(|&(k, m)| {
            let time = Time::Turns { k: k as i64, m };
            let mut found = Vec::new();
            for orbit in Orbit::both() {
                let u = walk.base_vertex(orbit);
                let row = walk.spectral().transition_row(&u, &time);
                let support: Vec<usize> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| x.norm() > SUPPORT_FLOOR)
                    .map(|(i, _)| i)
                    .collect();
                let ui = graph.vertex_index(&u);
                let others: Vec<usize> = support.iter().copied().filter(|&i| i != ui).collect();
                if others.len() != 1 || support.len() > 2 {
                    continue;
                }
                let v = graph.vertex_at(others[0]);
                let pair = RevivalPair {
                    alpha: row[ui],
                    beta: row[others[0]],
                };
                if let Ok(RowVerdict::Certified(c)) = verify_row(walk, &u, &v, &time, &pair) {
                    found.push(c);
                }
            }
            found
        })
        .collect();
    rows.into_iter().flatten().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    pub mode: SearchMode,
    /// Largest denominator for the rational sweep; `None` means `4n`.
    pub max_denominator: Option<u64>,
    /// Keep only the earliest certificate per `(relation, a, kind)`.
    pub earliest_only: bool,
    pub include_periodic: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            mode: SearchMode::Both,
            max_denominator: None,
            earliest_only: true,
            include_periodic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectReport {
    pub certificates: Vec<RevivalCertificate>,
    pub diagnostics: Vec<Diagnostic>,
    /// Whether the quantized search ran.
    pub quantized: bool,
}

impl DetectReport {
    pub fn has_breach(&self) -> bool {
        self.diagnostics.iter().any(|d| d.breach)
    }
}

fn turns_of(time: &Time) -> Option<(i64, u64)> {
    match *time {
        Time::Turns { k, m } => {
            let g = gcd(k.unsigned_abs(), m).max(1);
            Some((k / g as i64, m / g))
        }
        Time::Radians(_) => None,
    }
}

/// Quantized search plus rational sweep, merged and deduplicated.
pub fn detect(walk: &Walk, options: &DetectOptions) -> DetectReport {
    let mut diagnostics = Vec::new();
    let mut all = Vec::new();
    let quantized = match search(walk, options.mode) {
        Ok(outcome) => {
            all.extend(outcome.certificates);
            diagnostics.extend(outcome.diagnostics);
            true
        }
        Err(e) => {
            diagnostics.push(Diagnostic::note(
                None,
                format!("quantized search unsupported: {e}; rational sweep only"),
            ));
            false
        }
    };
    let max_den = options
        .max_denominator
        .unwrap_or(4 * walk.n() as u64)
        .max(2);
    all.extend(
        sweep(walk, max_den)
            .into_iter()
            .filter(|c| match options.mode {
                SearchMode::Same => c.relation == Relation::SameOrbit,
                SearchMode::Cross => c.relation == Relation::CrossOrbit,
                SearchMode::Both => true,
            }),
    );

    let group = walk.graph().group();
    let mut unique: BTreeMap<(usize, usize, usize, usize, i64, u64), RevivalCertificate> =
        BTreeMap::new();
    for c in all {
        if c.kind == RevivalKind::Periodic && !options.include_periodic {
            continue;
        }
        let (k, m) = turns_of(&c.time).unwrap_or((0, 0));
        let key = (
            c.u.orbit.index(),
            group.index_of(&c.u.element),
            c.v.orbit.index(),
            group.index_of(&c.v.element),
            k,
            m,
        );
        unique.entry(key).or_insert(c);
    }
    let mut certificates: Vec<RevivalCertificate> = unique.into_values().collect();
    certificates.sort_by(|x, y| certificate_order(group, x, y));
    if options.earliest_only {
        let mut seen = std::collections::BTreeSet::new();
        certificates.retain(|c| seen.insert((c.relation, group.index_of(&c.a), c.kind)));
    }
    DetectReport {
        certificates,
        diagnostics,
        quantized,
    }
}

fn certificate_order(
    group: &FiniteAbelianGroup,
    x: &RevivalCertificate,
    y: &RevivalCertificate,
) -> std::cmp::Ordering {
    let t = |c: &RevivalCertificate| turns_of(&c.time).unwrap_or((0, 1));
    let (xk, xm) = t(x);
    let (yk, ym) = t(y);
    (xk as i128 * ym as i128)
        .cmp(&(yk as i128 * xm as i128))
        .then(x.relation.cmp(&y.relation))
        .then(group.index_of(&x.a).cmp(&group.index_of(&y.a)))
        .then(x.u.orbit.cmp(&y.u.orbit))
        .then(x.kind.cmp(&y.kind))
}

/// Outcome of materializing `H(t)` and comparing its block structure.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockAudit {
    pub pass: bool,
    pub max_deviation: f64,
}

/// Checks the whole transition matrix against the shape forced by the
/// certificate: for same-orbit revival the source block is `αI + βQ`, the
/// off-diagonal blocks vanish and the other diagonal block is unitary; for
/// cross-orbit revival the diagonal blocks are `αI` and `(-ᾱβ/β̄)I` and the
/// off-diagonal blocks are `β` times the pairing permutation.
pub fn block_shape_audit(walk: &Walk, cert: &RevivalCertificate) -> Result<BlockAudit> {
    let h = walk.oracle(&cert.time)?.matrix;
    let graph = walk.graph();
    let group = graph.group();
    let n = graph.n();
    let elements: Vec<GroupElement> = group.elements().collect();
    let src = cert.u.orbit.index();
    let dst = cert.v.orbit.index();
    let alpha = cert.pair.alpha;
    let beta = cert.pair.beta;
    let zero = Complex64::new(0.0, 0.0);
    let paired = |i: usize, j: usize| group.add_unchecked(&elements[i], &cert.a) == elements[j];
    let mut dev: f64 = 0.0;
    for bi in 0..2 {
        for bj in 0..2 {
            for i in 0..n {
                for j in 0..n {
                    let expected = match cert.relation {
                        Relation::SameOrbit => {
                            if bi == src && bj == src {
                                let mut e = if i == j { alpha } else { zero };
                                if paired(i, j) {
                                    e += beta;
                                }
                                Some(e)
                            } else if bi != bj {
                                Some(zero)
                            } else {
                                None
                            }
                        }
                        Relation::CrossOrbit => {
                            let diag = if i == j {
                                Complex64::new(1.0, 0.0)
                            } else {
                                zero
                            };
                            if bi == src && bj == src {
                                Some(alpha * diag)
                            } else if bi == dst && bj == dst {
                                Some(cert.pair.reciprocal().alpha * diag)
                            } else if bi == src {
                                Some(if paired(i, j) { beta } else { zero })
                            } else if paired(j, i) {
                                Some(beta)
                            } else {
                                Some(zero)
                            }
                        }
                    };
                    if let Some(e) = expected {
                        dev = dev.max((h[(bi * n + i, bj * n + j)] - e).norm());
                    }
                }
            }
        }
    }
    if cert.relation == Relation::SameOrbit {
        let other = 1 - src;
        let block = h.view((other * n, other * n), (n, n)).into_owned();
        let prod = &block * block.adjoint();
        let eye = nalgebra::DMatrix::<Complex64>::identity(n, n);
        dev = dev.max(crate::spectral::max_abs(&(prod - eye)));
    }
    Ok(BlockAudit {
        pass: dev <= walk.tol().residual,
        max_deviation: dev,
    })
}

/// Re-checks the reverse revival `v → u` with amplitude `-ᾱβ/β̄`.
pub fn reciprocity_check(walk: &Walk, cert: &RevivalCertificate) -> Result<RowVerdict> {
    verify_row(walk, &cert.v, &cert.u, &cert.time, &cert.pair.reciprocal())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SemiCayleyGraph;
    use crate::tolerance::Tolerances;
    use std::f64::consts::PI;

    fn walk(factors: Vec<u32>, r: &[i64], l: &[i64], s: &[i64]) -> Walk {
        let w = |xs: &[i64]| xs.iter().map(|&x| vec![x]).collect::<Vec<_>>();
        let g = SemiCayleyGraph::from_residues(factors, &w(r), &w(l), &w(s)).unwrap();
        Walk::new(g, Tolerances::default())
    }

    fn vx(w: &Walk, g: i64, o: Orbit) -> Vertex {
        Vertex::new(w.graph().group().element(&[g]).unwrap(), o)
    }

    fn el(w: &Walk, g: i64) -> GroupElement {
        w.graph().group().element(&[g]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn full(n: i64) -> Vec<i64> {
        (0..n).collect()
    }

    #[test]
    fn pair_kinds() {
        let tol = 1e-9;
        let p = RevivalPair::new(c(0.5, 0.0), c(0.0, 0.75f64.sqrt()), 1e-10).unwrap();
        assert_eq!(p.kind(tol), RevivalKind::Proper);
        assert!(p.orthogonality_defect() < 1e-12);
        let pst = RevivalPair::new(c(0.0, 0.0), c(-1.0, 0.0), 1e-10).unwrap();
        assert_eq!(pst.kind(tol), RevivalKind::PerfectStateTransfer);
        assert!(RevivalPair::new(c(0.5, 0.0), c(0.5, 0.0), 1e-10).is_err());
    }

    #[test]
    fn reciprocal_amplitude_of_matching_pair() {
        let p = RevivalPair::from_phases(
            Complex64::from_polar(1.0, PI / 3.0),
            Complex64::from_polar(1.0, -PI / 3.0),
        );
        let r = p.reciprocal();
        assert!((r.alpha - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn verify_row_example_6_3() {
        let w = walk(vec![6], &[3], &[3], &full(6));
        let pair = RevivalPair::new(c(0.5, 0.0), c(0.0, 0.75f64.sqrt()), 1e-10).unwrap();
        let t = Time::Turns { k: 1, m: 6 };
        let u = vx(&w, 0, Orbit::Right);
        let cert = verify_row(&w, &u, &vx(&w, 3, Orbit::Right), &t, &pair)
            .unwrap()
            .certificate()
            .unwrap();
        assert!(cert.residual < 1e-12);
        assert_eq!(cert.kind, RevivalKind::Proper);
        assert!(matches!(cert.partition, Some(Partition::Orbit(_))));

        let wrong = verify_row(&w, &u, &vx(&w, 1, Orbit::Right), &t, &pair).unwrap();
        assert!(matches!(wrong, RowVerdict::Refuted(r) if r.residual > 0.5));
        assert!(verify_row(&w, &u, &u, &t, &pair).is_err());
    }

    #[test]
    fn verify_row_on_single_edge_at_any_time() {
        let w = walk(vec![2], &[], &[], &[0]);
        for t in [0.3, 1.0, 2.5] {
            let pair = RevivalPair::new(c(f64::cos(t), 0.0), c(0.0, f64::sin(t)), 1e-10).unwrap();
            let v = verify_row(
                &w,
                &vx(&w, 0, Orbit::Right),
                &vx(&w, 0, Orbit::Left),
                &Time::Radians(t),
                &pair,
            )
            .unwrap();
            assert!(v.certificate().is_some());
        }
    }

    #[test]
    fn same_orbit_checks() {
        let w = walk(vec![6], &[3], &[3], &full(6));
        let t = Time::Turns { k: 1, m: 6 };
        let pair =
            RevivalPair::new(c((PI / 3.0).cos(), 0.0), c(0.0, (PI / 3.0).sin()), 1e-10).unwrap();
        for o in Orbit::both() {
            assert!(check_same_orbit(&w, &el(&w, 3), &t, &pair, o)
                .unwrap()
                .is_accept());
        }
        assert!(!check_same_orbit(
            &w,
            &el(&w, 3),
            &Time::Turns { k: 1, m: 5 },
            &pair,
            Orbit::Right
        )
        .unwrap()
        .is_accept());

        let z3 = walk(vec![3], &[], &[], &full(3));
        for a in 0..3 {
            assert!(matches!(
                check_same_orbit(&z3, &el(&z3, a), &t, &pair, Orbit::Right),
                Err(Error::Precondition(_))
            ));
        }

        let k22 = walk(vec![2], &[], &[], &[0, 1]);
        let pst = RevivalPair::new(c(0.0, 0.0), c(-1.0, 0.0), 1e-10).unwrap();
        assert!(check_same_orbit(
            &k22,
            &el(&k22, 1),
            &Time::Turns { k: 1, m: 4 },
            &pst,
            Orbit::Right
        )
        .unwrap()
        .is_accept());
    }

    #[test]
    fn cross_orbit_checks() {
        let m = walk(vec![2], &[], &[], &[0]);
        let pair = RevivalPair::from_phases(
            Complex64::from_polar(1.0, PI / 3.0),
            Complex64::from_polar(1.0, -PI / 3.0),
        );
        let t = Time::Turns { k: 1, m: 6 };
        for o in Orbit::both() {
            assert!(check_cross_orbit(&m, &el(&m, 0), &t, &pair, o)
                .unwrap()
                .is_accept());
        }

        let z3 = walk(vec![3], &[], &[], &full(3));
        assert_eq!(
            check_cross_orbit(&z3, &el(&z3, 1), &t, &pair, Orbit::Right).unwrap(),
            Verdict::Reject("X nonempty".into())
        );

        let c4 = walk(vec![2], &[1], &[1], &[0]);
        let pst = RevivalPair::new(c(0.0, 0.0), c(-1.0, 0.0), 1e-10).unwrap();
        let quarter = Time::Turns { k: 1, m: 4 };
        for o in Orbit::both() {
            assert!(check_cross_orbit(&c4, &el(&c4, 1), &quarter, &pst, o)
                .unwrap()
                .is_accept());
        }
        let cert = verify_row(
            &c4,
            &vx(&c4, 0, Orbit::Right),
            &vx(&c4, 1, Orbit::Left),
            &quarter,
            &pst,
        )
        .unwrap()
        .certificate()
        .unwrap();
        assert_eq!(cert.kind, RevivalKind::PerfectStateTransfer);
    }

    #[test]
    fn search_example_6_3() {
        let w = walk(vec![6], &[3], &[3], &full(6));
        let out = search(&w, SearchMode::Same).unwrap();
        let proper: Vec<_> = out
            .certificates
            .iter()
            .filter(|c| c.kind == RevivalKind::Proper)
            .collect();
        assert!(!proper.is_empty());
        assert!(out.diagnostics.iter().all(|d| !d.breach));
        let first = proper
            .iter()
            .filter(|c| c.u.orbit == Orbit::Right)
            .min_by(|x, y| x.time.t().partial_cmp(&y.time.t()).unwrap())
            .unwrap();
        assert_eq!(first.time, Time::Turns { k: 1, m: 6 });
        assert_eq!(first.v, vx(&w, 3, Orbit::Right));
        for c in &out.certificates {
            assert!(c.pair.orthogonality_defect() < 1e-10);
            let other = c.u.orbit.other();
            assert!(check_same_orbit(&w, &c.a, &c.time, &c.pair, other)
                .unwrap()
                .is_accept());
        }
    }

    #[test]
    fn search_finds_nothing_on_example_6_2() {
        let w = walk(vec![3], &[], &[], &full(3));
        let out = search(&w, SearchMode::Both).unwrap();
        assert!(out.certificates.is_empty());
    }

    #[test]
    fn search_refuses_non_integral_spectrum() {
        let w = walk(vec![5], &[1, 4], &[1, 4], &[0]);
        match search(&w, SearchMode::Both) {
            Err(Error::NonIntegral { eigenvalue, .. }) => {
                assert!((eigenvalue - eigenvalue.round()).abs() > 0.1)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sweep_finds_four_cycle_pst() {
        let w = walk(vec![2], &[], &[], &[0, 1]);
        let found = sweep(&w, 8);
        assert!(found.iter().any(|c| {
            c.kind == RevivalKind::PerfectStateTransfer
                && c.time == Time::Turns { k: 1, m: 4 }
                && c.v == vx(&w, 1, Orbit::Right)
        }));
    }

    #[test]
    fn detect_reports_one_proper_family_for_example_6_3() {
        let w = walk(vec![6], &[3], &[3], &full(6));
        let report = detect(&w, &DetectOptions::default());
        let proper: Vec<_> = report
            .certificates
            .iter()
            .filter(|c| c.kind == RevivalKind::Proper)
            .collect();
        assert_eq!(proper.len(), 1);
        assert_eq!(proper[0].time, Time::Turns { k: 1, m: 6 });
        assert_eq!(proper[0].u, vx(&w, 0, Orbit::Right));
    }

    #[test]
    fn block_audit_and_reciprocity() {
        let w = walk(vec![6], &[3], &[3], &full(6));
        let pair = RevivalPair::from_phases(
            Complex64::from_polar(1.0, PI / 3.0),
            Complex64::from_polar(1.0, -PI / 3.0),
        );
        let cert = verify_row(
            &w,
            &vx(&w, 0, Orbit::Right),
            &vx(&w, 3, Orbit::Right),
            &Time::Turns { k: 1, m: 6 },
            &pair,
        )
        .unwrap()
        .certificate()
        .unwrap();
        assert!(block_shape_audit(&w, &cert).unwrap().pass);
        let mut bad = cert.clone();
        bad.time = cert.time.perturbed(1e-3);
        assert!(!block_shape_audit(&w, &bad).unwrap().pass);

        let m = walk(vec![2], &[], &[], &[0]);
        let cert = verify_row(
            &m,
            &vx(&m, 0, Orbit::Right),
            &vx(&m, 0, Orbit::Left),
            &Time::Turns { k: 1, m: 6 },
            &pair,
        )
        .unwrap()
        .certificate()
        .unwrap();
        assert!((cert.pair.reciprocal().alpha - c(0.5, 0.0)).norm() < 1e-12);
        assert!(block_shape_audit(&m, &cert).unwrap().pass);
        assert!(reciprocity_check(&m, &cert)
            .unwrap()
            .certificate()
            .is_some());
    }
}
