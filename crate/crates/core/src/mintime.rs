//! Integrality and the gcd invariants `M(a)` and `N(a)` that quantize
//! revival times on graphs with `R = L`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Orbit;
use crate::group::GroupElement;
use crate::revival::{OrbitPartition, Relation, RevivalCertificate, SpokePartition};
use crate::spectral::Branch;
use crate::time::root_of_unity;
use crate::walk::Walk;

/// An eigenvalue that is not within tolerance of an integer.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralityWitness {
    pub z: GroupElement,
    pub branch: Branch,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralityVerdict {
    pub integral: bool,
    pub witnesses: Vec<IntegralityWitness>,
    /// Every `χ_z(R)` is an integer.
    pub chi_r_integral: bool,
    pub chi_l_integral: bool,
    /// Every `|χ_z(S)|` is an integer.
    pub chi_s_abs_integral: bool,
}

fn near_integer(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() <= tol
}

pub fn integrality_check(walk: &Walk) -> IntegralityVerdict {
    let tol = walk.tol().integrality;
    let mut witnesses = Vec::new();
    let (mut r_ok, mut l_ok, mut s_ok) = (true, true, true);
    for mode in walk.spectral().modes() {
        for branch in Branch::both() {
            let lambda = mode.lambda(branch);
            if !near_integer(lambda, tol) {
                witnesses.push(IntegralityWitness {
                    z: mode.z.clone(),
                    branch,
                    eigenvalue: lambda,
                });
            }
        }
        r_ok &= near_integer(mode.chi_r, tol);
        l_ok &= near_integer(mode.chi_l, tol);
        s_ok &= near_integer(mode.chi_s.norm(), tol);
    }
    IntegralityVerdict {
        integral: witnesses.is_empty(),
        witnesses,
        chi_r_integral: r_ok,
        chi_l_integral: l_ok,
        chi_s_abs_integral: s_ok,
    }
}

/// One named gcd input list and its gcd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: &'static str,
    pub values: Vec<i64>,
    pub gcd: u64,
}

impl Component {
    fn new(name: &'static str, values: Vec<i64>) -> Self {
        let gcd = gcd_all(&values);
        Self { name, values, gcd }
    }
}

/// gcd of absolute values, with `gcd(∅) = 0`.
pub fn gcd_all(values: &[i64]) -> u64 {
    values
        .iter()
        .fold(0u64, |acc, &v| crate::revival::gcd(acc, v.unsigned_abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinTimeReport {
    pub a: GroupElement,
    pub relation: Relation,
    /// Source orbit for cross-orbit reports.
    pub source: Orbit,
    pub components: Vec<Component>,
    pub value: u64,
    /// `value` divides `2n`; `None` when `value = 0` (no quantization).
    pub divides_2n: Option<bool>,
    /// `value = 1`: revival of this kind is impossible for this `a`.
    pub no_fr_certified: bool,
}

impl MinTimeReport {
    fn finish(
        walk: &Walk,
        a: &GroupElement,
        relation: Relation,
        source: Orbit,
        components: Vec<Component>,
    ) -> Self {
        let value = components
            .iter()
            .fold(0u64, |acc, c| crate::revival::gcd(acc, c.gcd));
        let two_n = 2 * walk.n() as u64;
        Self {
            a: a.clone(),
            relation,
            source,
            components,
            value,
            divides_2n: (value >= 1).then(|| two_n.is_multiple_of(value)),
            no_fr_certified: value == 1,
        }
    }

    /// Candidate times `T = k/value` for `k = 1..value-1`.
    pub fn candidate_turns(&self) -> Vec<(u64, u64)> {
        (1..self.value).map(|k| (k, self.value)).collect()
    }
}

fn rounded_spectrum(walk: &Walk) -> Result<Vec<(i64, i64)>> {
    let verdict = integrality_check(walk);
    if let Some(w) = verdict.witnesses.first() {
        return Err(Error::NonIntegral {
            z: w.z.residues().to_vec(),
            eigenvalue: w.eigenvalue,
        });
    }
    Ok(walk
        .spectral()
        .modes()
        .iter()
        .map(|m| (m.lambda_plus.round() as i64, m.lambda_minus.round() as i64))
        .collect())
}

fn require_r_equals_l(walk: &Walk) -> Result<()> {
    if walk.graph().r_equals_l() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "minimum-time invariants need R = L".into(),
        ))
    }
}

fn set_sizes(walk: &Walk) -> (i64, i64) {
    let sets = walk.graph().sets();
    (sets.r.len() as i64, sets.s.len() as i64)
}

/// `M(a)` with the smallest element of `G1` as the reference character.
pub fn compute_m(walk: &Walk, a: &GroupElement) -> Result<MinTimeReport> {
    let group = walk.graph().group();
    group.check(a)?;
    if group.order_of(a) != 2 {
        return Err(Error::Precondition(format!(
            "pairing element {a} must have order 2"
        )));
    }
    let partition = OrbitPartition::new(group, a)?;
    let z1 = partition.g1[0].clone();
    compute_m_with_reference(walk, a, &z1)
}

/// `M(a)` with an explicit reference `z1 ∈ G1`.
pub fn compute_m_with_reference(
    walk: &Walk,
    a: &GroupElement,
    z1: &GroupElement,
) -> Result<MinTimeReport> {
    require_r_equals_l(walk)?;
    let group = walk.graph().group();
    let partition = OrbitPartition::new(group, a)?;
    if !partition.in_g1(group, z1) {
        return Err(Error::Precondition(format!("{z1} is not in G1")));
    }
    let spectrum = rounded_spectrum(walk)?;
    let (r, s) = set_sizes(walk);
    let lam = |z: &GroupElement| spectrum[group.index_of(z)];
    let (p1, m1) = lam(z1);
    let components = vec![
        Component::new(
            "M0+",
            partition.g0.iter().map(|z| r + s - lam(z).0).collect(),
        ),
        Component::new(
            "M0-",
            partition.g0.iter().map(|z| r - s - lam(z).1).collect(),
        ),
        Component::new("M1+", partition.g1.iter().map(|z| p1 - lam(z).0).collect()),
        Component::new("M1-", partition.g1.iter().map(|z| m1 - lam(z).1).collect()),
    ];
    Ok(MinTimeReport::finish(
        walk,
        a,
        Relation::SameOrbit,
        Orbit::Right,
        components,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CrossOrbitMinTime {
    Report(MinTimeReport),
    /// Cross-orbit revival with this pairing cannot occur.
    Impossible(String),
}

/// `N(a)` for revival from orbit `source`, with the smallest element of
/// `H1` as the reference.
pub fn compute_n(walk: &Walk, a: &GroupElement, source: Orbit) -> Result<CrossOrbitMinTime> {
    compute_n_inner(walk, a, source, None)
}

pub fn compute_n_with_reference(
    walk: &Walk,
    a: &GroupElement,
    source: Orbit,
    z1: &GroupElement,
) -> Result<CrossOrbitMinTime> {
    compute_n_inner(walk, a, source, Some(z1))
}

fn compute_n_inner(
    walk: &Walk,
    a: &GroupElement,
    source: Orbit,
    z1: Option<&GroupElement>,
) -> Result<CrossOrbitMinTime> {
    require_r_equals_l(walk)?;
    let group = walk.graph().group();
    group.check(a)?;
    if walk.spectral().modes().iter().any(|m| m.in_x) {
        return Ok(CrossOrbitMinTime::Impossible(
            "X nonempty: cross-orbit revival impossible".into(),
        ));
    }
    let Some(partition) = SpokePartition::new(walk.spectral(), a, source) else {
        return Ok(CrossOrbitMinTime::Impossible(format!(
            "cross-orbit revival impossible for a = {a}: spoke characters are not aligned with chi_a"
        )));
    };
    let spectrum = rounded_spectrum(walk)?;
    let (r, s) = set_sizes(walk);
    let lam = |z: &GroupElement| spectrum[group.index_of(z)];
    let reference = match z1 {
        Some(z) => {
            if !partition.in_h1(group, z) {
                return Err(Error::Precondition(format!("{z} is not in H1")));
            }
            Some(z.clone())
        }
        None => partition.h1.first().cloned(),
    };
    let (p1, m1) = reference.as_ref().map(lam).unwrap_or((0, 0));
    let h0 = &partition.h0;
    let h1 = &partition.h1;
    let components = vec![
        Component::new("N0+", h0.iter().map(|z| r + s - lam(z).0).collect()),
        Component::new("N0-", h0.iter().map(|z| r - s - lam(z).1).collect()),
        Component::new("N1+", h1.iter().map(|z| r + s - lam(z).1).collect()),
        Component::new("N1-", h1.iter().map(|z| r - s - lam(z).0).collect()),
        Component::new("N2+", h1.iter().map(|z| p1 - lam(z).0).collect()),
        Component::new("N2-", h1.iter().map(|z| m1 - lam(z).1).collect()),
    ];
    Ok(CrossOrbitMinTime::Report(MinTimeReport::finish(
        walk,
        a,
        Relation::CrossOrbit,
        source,
        components,
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoRevivalCertificate {
    pub a: GroupElement,
    pub relation: Relation,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoRevivalSummary {
    pub certificates: Vec<NoRevivalCertificate>,
    pub notes: Vec<String>,
}

/// Pairings for which `M(a) = 1` or `N(a) = 1` rules revival out.
/// Advisory: larger values do not prove that revival exists.
pub fn no_fr_certificate(walk: &Walk) -> Result<NoRevivalSummary> {
    require_r_equals_l(walk)?;
    let group = walk.graph().group();
    let mut out = NoRevivalSummary::default();
    let involutions = group.involutions();
    if involutions.is_empty() {
        out.notes
            .push("no valid a: no element of order 2, same-orbit revival impossible".into());
    }
    for a in involutions {
        let report = compute_m(walk, &a)?;
        if report.no_fr_certified {
            out.certificates.push(NoRevivalCertificate {
                a,
                relation: Relation::SameOrbit,
                reason: "M = 1".into(),
            });
        }
    }
    for a in group.elements() {
        if let CrossOrbitMinTime::Report(report) = compute_n(walk, &a, Orbit::Right)? {
            if report.no_fr_certified {
                out.certificates.push(NoRevivalCertificate {
                    a,
                    relation: Relation::CrossOrbit,
                    reason: "N = 1".into(),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AuditStatus {
    Pass,
    /// Distance from `exp(it)` to the nearest `2n`-th root of unity.
    Fail(f64),
    Informational(String),
}

/// Checks that `exp(it)` is a `2n`-th root of unity for a certificate on a
/// graph with `R = L`. Certificates whose pairing has no time quantization
/// (value 0) or none at all get an informational status.
pub fn root_of_unity_audit(walk: &Walk, cert: &RevivalCertificate) -> AuditStatus {
    if !walk.graph().r_equals_l() {
        return AuditStatus::Informational("graph has R != L".into());
    }
    let value = match cert.relation {
        Relation::SameOrbit => compute_m(walk, &cert.a).map(|r| r.value),
        Relation::CrossOrbit => match compute_n(walk, &cert.a, cert.u.orbit) {
            Ok(CrossOrbitMinTime::Report(r)) => Ok(r.value),
            Ok(CrossOrbitMinTime::Impossible(reason)) => return AuditStatus::Informational(reason),
            Err(e) => Err(e),
        },
    };
    match value {
        Err(e) => AuditStatus::Informational(e.to_string()),
        Ok(0) => AuditStatus::Informational("no time quantization (value 0)".into()),
        Ok(_) => {
            let two_n = 2 * walk.n() as u64;
            let turns = cert.time.t() / std::f64::consts::TAU * two_n as f64;
            let r = turns.round().rem_euclid(two_n as f64) as u64;
            let nearest = root_of_unity(r, two_n);
            let phase = Complex64::from_polar(1.0, cert.time.t());
            let dist = (phase - nearest).norm();
            if dist <= walk.tol().phase {
                AuditStatus::Pass
            } else {
                AuditStatus::Fail(dist)
            }
        }
    }
}
