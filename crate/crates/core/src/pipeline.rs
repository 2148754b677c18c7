//! End-to-end construction: decomposition, tree, walks, schedule, `γ`,
//! hyperplanes and the separation certificate.

use thiserror::Error;

use crate::coxeter::CoxeterGroup;
use crate::graph::{check_hypotheses, induced_complement, join_decompose, ConstructionStatus, DefiningGraph, HypothesisReport};
use crate::quotient::{build_quotient, select_cross_edges, spanning_tree, tree_closed_path, CrossEdgeSelection, QuotientError, RootedTree};
use crate::walks::{
    build_schedule, length_policy, walk_solver, CoveringWalk, ExactSolver, WalkError, WalkSchedule, WalkSolver,
    DEFAULT_EXACT_LIMIT, EXACT_HARD_CAP,
};
use crate::word::{
    assemble_gamma, hyperplane_schedule, key4_sequence, verify_certificate, CertificateReport, GammaWord, HyperplaneSchedule,
    SeparationCertificate,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructOptions {
    pub walk_solver: String,
    pub length_policy: String,
    pub exact_limit: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        Self {
            walk_solver: "auto".into(),
            length_policy: "product".into(),
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("graph is indecomposable; the construction is deferred")]
    Deferred(Box<HypothesisReport>),
    #[error("graph does not satisfy the hypotheses: {}", .0.notes.join("; "))]
    Ineligible(Box<HypothesisReport>),
    #[error("unknown walk solver `{0}`")]
    UnknownSolver(String),
    #[error("unknown length policy `{0}`")]
    UnknownPolicy(String),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("factor {factor}: {source}")]
    Walk { factor: usize, source: WalkError },
    #[error(transparent)]
    Schedule(WalkError),
}

/// Everything derived from an eligible graph. Factor indices are in tree order.
#[derive(Debug, Clone)]
pub struct Construction {
    pub graph: DefiningGraph,
    pub factors: Vec<Vec<usize>>,
    pub tree: RootedTree,
    pub selection: CrossEdgeSelection,
    pub path: Vec<usize>,
    pub walks: Vec<CoveringWalk>,
    pub length_policy: String,
    pub schedule: WalkSchedule,
    pub gamma: GammaWord,
    pub hyperplanes: HyperplaneSchedule,
    pub separation: SeparationCertificate,
}

/// Decomposition, tree order and cross edges; these have no free choices.
pub struct Skeleton {
    pub factors: Vec<Vec<usize>>,
    pub tree: RootedTree,
    pub selection: CrossEdgeSelection,
    pub path: Vec<usize>,
}

pub fn skeleton(g: &DefiningGraph) -> Result<Skeleton, ConstructError> {
    let report = check_hypotheses(g);
    match report.status {
        ConstructionStatus::Eligible => {}
        ConstructionStatus::Deferred => return Err(ConstructError::Deferred(Box::new(report))),
        ConstructionStatus::Ineligible => return Err(ConstructError::Ineligible(Box::new(report))),
    }
    let dec = join_decompose(g);
    let tree = spanning_tree(&build_quotient(&dec, g)?)?;
    let factors = tree.reindex(&dec);
    let selection = select_cross_edges(&tree, &factors, g)?;
    let path = tree_closed_path(&tree);
    Ok(Skeleton {
        factors,
        tree,
        selection,
        path,
    })
}

pub fn construct(g: &DefiningGraph, opts: &ConstructOptions) -> Result<Construction, ConstructError> {
    let sk = skeleton(g)?;
    let solver = walk_solver(&opts.walk_solver, opts.exact_limit).ok_or_else(|| ConstructError::UnknownSolver(opts.walk_solver.clone()))?;
    let walks = sk
        .factors
        .iter()
        .enumerate()
        .map(|(factor, f)| {
            solver
                .solve(&induced_complement(g, f))
                .and_then(|w| certify_exact(g, f, CoveringWalk { factor, ..w }))
                .map_err(|source| ConstructError::Walk { factor, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    assemble(g, sk, walks, &opts.length_policy)
}

/// Sets `exact` to whether the walk length is the minimum, when the factor
/// is small enough for the exact search; larger factors stay uncertified.
pub fn certify_exact(g: &DefiningGraph, factor: &[usize], walk: CoveringWalk) -> Result<CoveringWalk, WalkError> {
    if walk.exact || factor.len() > EXACT_HARD_CAP {
        return Ok(walk);
    }
    let min = ExactSolver.solve(&induced_complement(g, factor))?.len();
    Ok(CoveringWalk {
        exact: walk.len() == min,
        ..walk
    })
}

/// Runs the construction with caller-supplied walks (one per factor, tree order).
pub fn construct_from_walks(g: &DefiningGraph, walks: Vec<CoveringWalk>, policy: &str) -> Result<Construction, ConstructError> {
    assemble(g, skeleton(g)?, walks, policy)
}

fn assemble(g: &DefiningGraph, sk: Skeleton, walks: Vec<CoveringWalk>, policy: &str) -> Result<Construction, ConstructError> {
    let lp = length_policy(policy).ok_or_else(|| ConstructError::UnknownPolicy(policy.into()))?;
    let schedule = build_schedule(&walks, &sk.tree, &sk.selection, lp.as_ref()).map_err(ConstructError::Schedule)?;
    let gamma = assemble_gamma(&schedule, &sk.selection, &sk.path);
    let hyperplanes = hyperplane_schedule(&gamma, &schedule);
    let separation = key4_sequence(&hyperplanes, &schedule, &sk.selection);
    Ok(Construction {
        graph: g.clone(),
        factors: sk.factors,
        tree: sk.tree,
        selection: sk.selection,
        path: sk.path,
        walks,
        length_policy: lp.name().into(),
        schedule,
        gamma,
        hyperplanes,
        separation,
    })
}

impl Construction {
    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn verify(&self) -> CertificateReport {
        let group = CoxeterGroup::from_graph(&self.graph);
        verify_certificate(&self.separation, &self.graph, &self.schedule, &self.selection, &group)
    }
}
