//! The certificate document (`"schema": 1`) and its verifier.
//!
//! Vertices are written by name. The only free choice in a certificate is
//! the covering walks; everything else is re-derived from the graph and the
//! walks during verification and compared field by field, so a failure names
//! the JSON path that disagrees.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coxeter::CoxeterGroup;
use crate::graph::{induced_complement, DefiningGraph};
use crate::pipeline::{construct, construct_from_walks, skeleton, ConstructOptions, Construction};
use crate::shadow::{shadow_coset_checks, ShadowCosetReport};
use crate::walks::{validate_schedule, CoveringWalk, ExactSolver, WalkSolver, EXACT_HARD_CAP};
use crate::word::{
    closed_form_length, verify_certificate, verify_factor_chains, CertificateReport, Flank, Justification, Key4Entry, SeparationCertificate,
    TwistRecord, PROOF_LEVEL_NOTES,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub schema: u32,
    pub length_policy: String,
    pub graph: GraphDoc,
    pub factors: Vec<Vec<String>>,
    pub tree: TreeDoc,
    pub cross_edges: Vec<CrossEdgeDoc>,
    pub tree_path: Vec<usize>,
    pub walks: Vec<WalkDoc>,
    pub schedule: ScheduleDoc,
    pub gamma: GammaDoc,
    pub hyperplanes: HyperplanesDoc,
    pub key4: Key4Doc,
    pub coverage: CoverageDoc,
    pub proof_level: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub u: String,
    pub v: String,
    pub label: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDoc {
    pub parents: Vec<Option<usize>>,
    pub depths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossEdgeDoc {
    pub parent: usize,
    pub child: usize,
    pub s: String,
    pub t: String,
    pub label: u32,
    pub tau: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkDoc {
    pub factor: usize,
    pub walk: Vec<String>,
    pub length: usize,
    /// The length equals the minimum over covering closed walks.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentDoc {
    pub parent: usize,
    pub child: usize,
    pub l: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub n: usize,
    pub rows: Vec<Vec<String>>,
    pub alignment: Vec<AlignmentDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaDoc {
    pub letters: Vec<String>,
    pub length: usize,
    pub closed_form_length: usize,
    pub factor_boundaries: Vec<usize>,
    pub block_boundaries: Vec<usize>,
    pub prefix_index: Vec<usize>,
    pub twist_l: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneDoc {
    pub d: usize,
    pub l: usize,
    #[serde(rename = "type")]
    pub generator: String,
    pub prefix: usize,
    pub tag: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplanesDoc {
    pub count: usize,
    pub period: usize,
    pub families: Vec<Vec<HyperplaneDoc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlankDoc {
    pub d: usize,
    pub l: usize,
    #[serde(rename = "type")]
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Key4EntryDoc {
    pub factor: usize,
    pub d: usize,
    pub block: usize,
    pub l: usize,
    #[serde(rename = "type")]
    pub generator: String,
    pub prefix: usize,
    pub tag: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistDoc {
    pub block: usize,
    pub from: usize,
    pub to: usize,
    pub l: usize,
    pub s: String,
    pub t: String,
    pub label: u32,
    pub tau: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Key4Doc {
    pub flank_start: FlankDoc,
    pub entries: Vec<Key4EntryDoc>,
    pub flank_end: FlankDoc,
    pub closing_tag: Justification,
    pub twists: Vec<TwistDoc>,
    pub cliques: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub generator: String,
    /// First index in `key4.entries` with this type.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageDoc {
    pub covered: usize,
    pub generators: usize,
    pub witnesses: Vec<WitnessDoc>,
}

fn names(g: &DefiningGraph, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| g.name(v).to_string()).collect()
}

impl Construction {
    pub fn to_document(&self) -> CertificateDoc {
        let g = &self.graph;
        let name = |v: usize| g.name(v).to_string();
        let sep = &self.separation;
        CertificateDoc {
            schema: SCHEMA_VERSION,
            length_policy: self.length_policy.clone(),
            graph: GraphDoc {
                vertices: g.names().to_vec(),
                edges: g.edges().into_iter().map(|(u, v, label)| EdgeDoc { u: name(u), v: name(v), label }).collect(),
            },
            factors: self.factors.iter().map(|f| names(g, f)).collect(),
            tree: TreeDoc {
                parents: self.tree.parents().to_vec(),
                depths: (0..self.tree.k()).map(|p| self.tree.depth(p)).collect(),
            },
            cross_edges: self
                .selection
                .edges()
                .iter()
                .map(|e| CrossEdgeDoc {
                    parent: e.parent,
                    child: e.child,
                    s: name(e.s),
                    t: name(e.t),
                    label: e.label,
                    tau: names(g, &e.tau),
                })
                .collect(),
            tree_path: self.path.clone(),
            walks: self
                .walks
                .iter()
                .map(|w| WalkDoc {
                    factor: w.factor,
                    walk: names(g, &w.vertices),
                    length: w.len(),
                    exact: w.exact,
                })
                .collect(),
            schedule: ScheduleDoc {
                n: self.schedule.n,
                rows: self.schedule.rows.iter().map(|r| names(g, r)).collect(),
                alignment: self
                    .schedule
                    .alignment
                    .iter()
                    .map(|a| AlignmentDoc {
                        parent: a.parent,
                        child: a.child,
                        l: a.l,
                    })
                    .collect(),
            },
            gamma: GammaDoc {
                letters: names(g, &self.gamma.letters),
                length: self.gamma.len(),
                closed_form_length: closed_form_length(&self.schedule, &self.selection, &self.path),
                factor_boundaries: self.gamma.factor_boundaries.clone(),
                block_boundaries: self.gamma.block_boundaries.clone(),
                prefix_index: self.gamma.prefix_index.clone(),
                twist_l: self.gamma.twist_l.clone(),
            },
            hyperplanes: HyperplanesDoc {
                count: self.hyperplanes.total_count(),
                period: self.hyperplanes.period(),
                families: self
                    .hyperplanes
                    .families
                    .iter()
                    .map(|f| {
                        f.iter()
                            .map(|h| HyperplaneDoc {
                                d: h.d,
                                l: h.l,
                                generator: name(h.generator),
                                prefix: h.prefix,
                                tag: h.tag,
                            })
                            .collect()
                    })
                    .collect(),
            },
            key4: Key4Doc {
                flank_start: flank_doc(g, &sep.flank_start),
                entries: sep
                    .entries
                    .iter()
                    .map(|e| Key4EntryDoc {
                        factor: e.factor,
                        d: e.d,
                        block: e.block,
                        l: e.l,
                        generator: name(e.generator),
                        prefix: e.prefix,
                        tag: e.tag,
                    })
                    .collect(),
                flank_end: flank_doc(g, &sep.flank_end),
                closing_tag: sep.closing_tag,
                twists: sep
                    .twists
                    .iter()
                    .map(|t| TwistDoc {
                        block: t.block,
                        from: t.from,
                        to: t.to,
                        l: t.l,
                        s: name(t.s),
                        t: name(t.t),
                        label: t.label,
                        tau: names(g, &t.tau),
                    })
                    .collect(),
                cliques: sep.cliques.iter().map(|c| names(g, c)).collect(),
            },
            coverage: CoverageDoc {
                covered: sep.coverage.len(),
                generators: g.vertex_count(),
                witnesses: sep
                    .coverage
                    .iter()
                    .map(|&(v, index)| WitnessDoc { generator: name(v), index })
                    .collect(),
            },
            proof_level: PROOF_LEVEL_NOTES.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Pretty-printed, byte-stable JSON.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document()).expect("document serializes");
        s.push('\n');
        s
    }
}

fn flank_doc(g: &DefiningGraph, f: &Flank) -> FlankDoc {
    FlankDoc {
        d: f.d,
        l: f.l,
        generator: g.name(f.generator).to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentReport {
    pub failures: Vec<String>,
    pub certificate: Option<CertificateReport>,
    pub shadow: Option<ShadowCosetReport>,
}

impl DocumentReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.certificate.as_ref().is_some_and(CertificateReport::passed)
            && self.shadow.as_ref().is_some_and(ShadowCosetReport::passed)
    }
}

const MAX_DIFFS: usize = 20;

fn diff(path: &str, expected: &Value, found: &Value, out: &mut Vec<String>) {
    if out.len() >= MAX_DIFFS {
        return;
    }
    match (expected, found) {
        (Value::Object(a), Value::Object(b)) => {
            for (key, va) in a {
                let p = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                match b.get(key) {
                    Some(vb) => diff(&p, va, vb, out),
                    None => out.push(format!("{p}: missing")),
                }
            }
            for key in b.keys().filter(|k| !a.contains_key(*k)) {
                out.push(format!("{path}.{key}: unexpected field"));
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                out.push(format!("{path}: length {} (expected {})", b.len(), a.len()));
            }
            for (i, (va, vb)) in a.iter().zip(b).enumerate() {
                diff(&format!("{path}[{i}]"), va, vb, out);
            }
        }
        _ if expected != found => out.push(format!("{path}: found {found} (expected {expected})")),
        _ => {}
    }
}

fn lookup(g: &DefiningGraph, name: &str, path: &str) -> Result<usize, String> {
    g.vertex_id(name).ok_or_else(|| format!("{path}: unknown vertex `{name}`"))
}

fn lookup_all(g: &DefiningGraph, ns: &[String], path: &str) -> Result<Vec<usize>, String> {
    ns.iter().enumerate().map(|(i, n)| lookup(g, n, &format!("{path}[{i}]"))).collect()
}

/// Checks one walk of the document against its factor.
fn check_walk(g: &DefiningGraph, factor: &[usize], w: &WalkDoc, idx: usize) -> Result<CoveringWalk, String> {
    let path = format!("walks[{idx}]");
    if w.factor != idx {
        return Err(format!("{path}.factor: found {} (expected {idx})", w.factor));
    }
    let vertices = lookup_all(g, &w.walk, &format!("{path}.walk"))?;
    if vertices.len() < 3 || vertices.first() != vertices.last() {
        return Err(format!("{path}.walk: not a closed walk"));
    }
    if let Some(p) = vertices.iter().position(|v| !factor.contains(v)) {
        return Err(format!("{path}.walk[{p}]: `{}` lies outside factor {idx}", w.walk[p]));
    }
    if let Some(p) = vertices.windows(2).position(|s| s[0] == s[1] || g.is_edge(s[0], s[1])) {
        return Err(format!("{path}.walk[{}]: step `{}`-`{}` is not a non-edge", p + 1, w.walk[p], w.walk[p + 1]));
    }
    if let Some(v) = factor.iter().find(|v| !vertices.contains(v)) {
        return Err(format!("{path}.walk: misses `{}`", g.name(*v)));
    }
    if w.length != vertices.len() - 1 {
        return Err(format!("{path}.length: found {} (expected {})", w.length, vertices.len() - 1));
    }
    if factor.len() > EXACT_HARD_CAP {
        if w.exact {
            return Err(format!("{path}.exact: minimality cannot be checked above {EXACT_HARD_CAP} vertices"));
        }
    } else {
        let min = ExactSolver.solve(&induced_complement(g, factor)).map_err(|e| format!("{path}: {e}"))?.len();
        if w.exact != (w.length == min) {
            return Err(format!("{path}.exact: found {} but the minimum length is {min}", w.exact));
        }
    }
    Ok(CoveringWalk {
        factor: idx,
        vertices,
        exact: w.exact,
    })
}

fn separation_from_doc(g: &DefiningGraph, doc: &CertificateDoc, r: usize, n: usize, k: usize) -> Result<SeparationCertificate, String> {
    let key4 = &doc.key4;
    let flank = |f: &FlankDoc, p: &str| -> Result<Flank, String> {
        Ok(Flank {
            d: f.d,
            l: f.l,
            generator: lookup(g, &f.generator, p)?,
        })
    };
    let entries = key4
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            Ok(Key4Entry {
                factor: e.factor,
                d: e.d,
                block: e.block,
                l: e.l,
                generator: lookup(g, &e.generator, &format!("key4.entries[{i}].type"))?,
                prefix: e.prefix,
                tag: e.tag,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let twists = key4
        .twists
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let p = format!("key4.twists[{i}]");
            Ok(TwistRecord {
                block: t.block,
                from: t.from,
                to: t.to,
                l: t.l,
                s: lookup(g, &t.s, &format!("{p}.s"))?,
                t: lookup(g, &t.t, &format!("{p}.t"))?,
                label: t.label,
                tau: lookup_all(g, &t.tau, &format!("{p}.tau"))?,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let cliques = key4
        .cliques
        .iter()
        .enumerate()
        .map(|(i, c)| lookup_all(g, c, &format!("key4.cliques[{i}]")))
        .collect::<Result<Vec<_>, String>>()?;
    let coverage = doc
        .coverage
        .witnesses
        .iter()
        .enumerate()
        .map(|(i, w)| Ok((lookup(g, &w.generator, &format!("coverage.witnesses[{i}].generator"))?, w.index)))
        .collect::<Result<Vec<_>, String>>()?;
    Ok(SeparationCertificate {
        n,
        r,
        k,
        path: doc.tree_path.clone(),
        entries,
        flank_start: flank(&key4.flank_start, "key4.flank_start.type")?,
        flank_end: flank(&key4.flank_end, "key4.flank_end.type")?,
        closing_tag: key4.closing_tag,
        coverage,
        total_count: doc.hyperplanes.count,
        cliques,
        twists,
    })
}

/// Verifies a certificate document against the graph it claims to describe.
pub fn verify_document(g: &DefiningGraph, value: &Value) -> DocumentReport {
    let mut report = DocumentReport {
        failures: Vec::new(),
        certificate: None,
        shadow: None,
    };
    let doc: CertificateDoc = match serde_json::from_value(value.clone()) {
        Ok(d) => d,
        Err(e) => {
            report.failures.push(format!("document: {e}"));
            // localize against the default construction
            if let Ok(c) = construct(g, &ConstructOptions::default()) {
                let expected = serde_json::to_value(c.to_document()).expect("document serializes");
                diff("", &expected, value, &mut report.failures);
            }
            return report;
        }
    };
    if doc.schema != SCHEMA_VERSION {
        report.failures.push(format!("schema: found {} (expected {SCHEMA_VERSION})", doc.schema));
        return report;
    }
    let sk = match skeleton(g) {
        Ok(sk) => sk,
        Err(e) => {
            report.failures.push(format!("graph: {e}"));
            return report;
        }
    };
    if doc.walks.len() != sk.factors.len() {
        report.failures.push(format!("walks: {} walks for {} factors", doc.walks.len(), sk.factors.len()));
        return report;
    }
    let mut walks = Vec::new();
    for (idx, (w, f)) in doc.walks.iter().zip(&sk.factors).enumerate() {
        match check_walk(g, f, w, idx) {
            Ok(cw) => walks.push(cw),
            Err(msg) => report.failures.push(msg),
        }
    }
    if !report.failures.is_empty() {
        return report;
    }
    let c = match construct_from_walks(g, walks, &doc.length_policy) {
        Ok(c) => c,
        Err(e) => {
            report.failures.push(format!("length_policy/walks: {e}"));
            return report;
        }
    };

    let expected = serde_json::to_value(c.to_document()).expect("document serializes");
    diff("", &expected, value, &mut report.failures);

    let sched = validate_schedule(&c.schedule, g, &c.factors, &c.selection);
    if !sched.valid {
        report.failures.push(format!("schedule: {}", sched.first_violation.unwrap_or_default()));
    }
    if c.gamma.len() != closed_form_length(&c.schedule, &c.selection, &c.path) {
        report.failures.push("gamma.length: differs from the closed form".into());
    }

    match separation_from_doc(g, &doc, c.gamma.r(), c.schedule.n, c.k()) {
        Ok(sep) => {
            let group = CoxeterGroup::from_graph(g);
            let cert = verify_certificate(&sep, g, &c.schedule, &c.selection, &group);
            report.failures.extend(cert.failures.iter().map(|f| format!("key4: {f}")));
            report
                .failures
                .extend(verify_factor_chains(&c.hyperplanes, &sep, g, &c.schedule, &c.selection, &group));
            let shadow = shadow_coset_checks(&sep, g);
            report.failures.extend(
                shadow
                    .checks
                    .iter()
                    .filter(|s| !s.passed)
                    .map(|s| format!("key4.entries[{}]: W-shadow check failed: {}", s.index, s.statement)),
            );
            report.certificate = Some(cert);
            report.shadow = Some(shadow);
        }
        Err(msg) => report.failures.push(msg),
    }
    report
}
