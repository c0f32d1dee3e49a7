//! Deterministic JSON and CSV renderings of results.
//!
//! Objects use sorted keys. Floats are written in shortest round-trip form
//! after snapping values below `1e-14` in magnitude to zero.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::graph::Vertex;
use crate::group::GroupElement;
use crate::mintime::{AuditStatus, Component, IntegralityVerdict, MinTimeReport};
use crate::revival::{BlockAudit, Diagnostic, Partition, Refutation, RevivalCertificate};
use crate::scan::{CrossOrbitEntry, ScanRecord};
use crate::spectral::{Branch, SpectralData, TransitionMatrix};
use crate::time::Time;
use crate::walk::Walk;

const SNAP: f64 = 1e-14;

pub fn real(x: f64) -> Value {
    let x = if x.abs() < SNAP { 0.0 } else { x };
    json!(x)
}

pub fn complex(z: Complex64) -> Value {
    json!([real(z.re), real(z.im)])
}

pub fn element(g: &GroupElement) -> Value {
    json!(g.residues())
}

pub fn elements(gs: &[GroupElement]) -> Value {
    Value::Array(gs.iter().map(element).collect())
}

pub fn vertex(v: &Vertex) -> Value {
    json!(v.to_string())
}

/// `{"T": "k/m", "t": radians}` for rational times, `{"T": null, "t": ...,
/// "nonexact": true}` otherwise.
pub fn time_fields(time: &Time, obj: &mut Map<String, Value>) {
    match time {
        Time::Turns { .. } => {
            obj.insert("T".into(), json!(time.to_string()));
        }
        Time::Radians(_) => {
            obj.insert("T".into(), Value::Null);
            obj.insert("nonexact".into(), json!(true));
        }
    }
    obj.insert("t".into(), real(time.t()));
}

fn partition(p: &Partition) -> Value {
    match p {
        Partition::Orbit(o) => json!({"G0": elements(&o.g0), "G1": elements(&o.g1)}),
        Partition::Spoke(s) => json!({"H0": elements(&s.h0), "H1": elements(&s.h1)}),
    }
}

pub fn certificate(c: &RevivalCertificate) -> Value {
    let mut obj = Map::new();
    obj.insert("u".into(), vertex(&c.u));
    obj.insert("v".into(), vertex(&c.v));
    time_fields(&c.time, &mut obj);
    obj.insert("alpha".into(), complex(c.pair.alpha));
    obj.insert("beta".into(), complex(c.pair.beta));
    obj.insert("kind".into(), json!(c.kind.label()));
    obj.insert("relation".into(), json!(c.relation.label()));
    obj.insert("a".into(), element(&c.a));
    obj.insert("residual".into(), real(c.residual));
    obj.insert(
        "partition".into(),
        c.partition.as_ref().map(partition).unwrap_or(Value::Null),
    );
    Value::Object(obj)
}

pub fn refutation(r: &Refutation) -> Value {
    json!({
        "worst_vertex": vertex(&r.worst),
        "found": complex(r.found),
        "expected": complex(r.expected),
        "residual": real(r.residual),
    })
}

pub fn diagnostic(d: &Diagnostic) -> Value {
    json!({
        "a": d.a.as_ref().map(element),
        "message": d.message,
        "breach": d.breach,
    })
}

pub fn block_audit(a: &BlockAudit) -> Value {
    json!({"pass": a.pass, "max_deviation": real(a.max_deviation)})
}

pub fn audit_status(s: &AuditStatus) -> Value {
    match s {
        AuditStatus::Pass => json!({"status": "pass"}),
        AuditStatus::Fail(d) => json!({"status": "fail", "distance": real(*d)}),
        AuditStatus::Informational(why) => json!({"status": "informational", "reason": why}),
    }
}

/// One record per character `z`.
pub fn spectrum(data: &SpectralData) -> Value {
    Value::Array(
        data.modes()
            .iter()
            .map(|m| {
                json!({
                    "z": element(&m.z),
                    "lambda_plus": real(m.lambda_plus),
                    "lambda_minus": real(m.lambda_minus),
                    "c": [real(m.c_plus), real(m.c_minus)],
                    "d": [real(m.d_plus), real(m.d_minus)],
                    "e": [complex(m.e_plus), complex(m.e_minus)],
                    "in_X": m.in_x,
                })
            })
            .collect(),
    )
}

pub fn integrality(v: &IntegralityVerdict) -> Value {
    json!({
        "integral": v.integral,
        "chi_R_integral": v.chi_r_integral,
        "chi_L_integral": v.chi_l_integral,
        "abs_chi_S_integral": v.chi_s_abs_integral,
        "witnesses": v.witnesses.iter().map(|w| json!({
            "z": element(&w.z),
            "branch": match w.branch { Branch::Plus => "+", Branch::Minus => "-" },
            "eigenvalue": real(w.eigenvalue),
        })).collect::<Vec<_>>(),
    })
}

fn component(c: &Component) -> Value {
    json!({"name": c.name, "values": c.values, "gcd": c.gcd})
}

pub fn mintime(r: &MinTimeReport) -> Value {
    json!({
        "a": element(&r.a),
        "kind": r.relation.label(),
        "source_orbit": r.source.index(),
        "components": r.components.iter().map(component).collect::<Vec<_>>(),
        "value": r.value,
        "divides_2n": r.divides_2n,
        "no_fr_certified": r.no_fr_certified,
    })
}

pub fn cross_entry(e: &CrossOrbitEntry) -> Value {
    match e {
        CrossOrbitEntry::Report(r) => mintime(r),
        CrossOrbitEntry::Impossible { a, source, reason } => json!({
            "a": element(a),
            "kind": "cross-orbit",
            "source_orbit": source.index(),
            "impossible": reason,
        }),
    }
}

pub fn graph(walk: &Walk) -> Value {
    let g = walk.graph();
    let sets = g.sets();
    json!({
        "group": g.group().factors(),
        "R": elements(&sets.r),
        "L": elements(&sets.l),
        "S": elements(&sets.s),
    })
}

pub fn scan_record(r: &ScanRecord) -> Value {
    json!({
        "graph": graph(&r.walk),
        "integrality": integrality(&r.integrality),
        "M": r.m_table.iter().map(mintime).collect::<Vec<_>>(),
        "N": r.n_table.iter().map(cross_entry).collect::<Vec<_>>(),
        "certificates": r.detect.certificates.iter().map(certificate).collect::<Vec<_>>(),
        "diagnostics": r.detect.diagnostics.iter().map(diagnostic).collect::<Vec<_>>(),
    })
}

fn complex_cell(z: Complex64) -> String {
    let snap = |x: f64| if x.abs() < SNAP { 0.0 } else { x };
    let (re, im) = (snap(z.re), snap(z.im));
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{re:?}{sign}{:?}j", im.abs())
}

/// The matrix as CSV, one row per line, entries written `re+imj`.
pub fn matrix_csv(m: &TransitionMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.matrix.nrows() {
        let row: Vec<String> = (0..m.matrix.ncols())
            .map(|j| complex_cell(m.matrix[(i, j)]))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `t,fidelity` rows for `|H(t)_{u,v}|²` over a grid of times.
pub fn fidelity_csv(walk: &Walk, u: &Vertex, v: &Vertex, grid: &[Time]) -> String {
    let mut out = String::from("t,fidelity\n");
    for time in grid {
        let f = walk
            .spectral()
            .transition_entry(u, v, time)
            .norm_sqr()
            .clamp(0.0, 1.0);
        let f = if f < SNAP { 0.0 } else { f };
        out.push_str(&format!("{:?},{:?}\n", time.t(), f));
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}
