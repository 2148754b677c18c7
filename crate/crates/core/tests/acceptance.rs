//! Acceptance suite: one line per criterion, non-zero exit on any failure.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use artin_wpd::certificate::verify_document;
use artin_wpd::coxeter::{verify_dihedral_lemmas, CoxeterGroup, CoxeterMatrix};
use artin_wpd::graph::{is_irreducible, join_decompose, DefiningGraph, SimpleGraph};
use artin_wpd::pipeline::{construct, ConstructOptions};
use artin_wpd::quotient::build_quotient;
use artin_wpd::shadow::{build_shadow, extract_hyperplanes, product_compare, structural_checks};
use artin_wpd::walks::{ExactSolver, WalkSolver};
use artin_wpd::word::{closed_form_length, descriptor_at, translate_by_gamma};
use common::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn g4() -> DefiningGraph {
    DefiningGraph::from_named(&["a", "b", "c", "d"], &[("a", "c", 3), ("a", "d", 2), ("b", "c", 2), ("b", "d", 2)]).unwrap()
}

fn join_decomposition_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut total, mut agree) = (0usize, 0usize);
    for n in 1..=6 {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0..1u32 << pairs.len() {
            let edges: Vec<(usize, usize, u32)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &(u, v))| (u, v, rng.gen_range(2..=3)))
                .collect();
            let g = DefiningGraph::new((0..n).map(|i| format!("v{i}")), edges).unwrap();
            let oracle = closure_components(n, &|u, v| u != v && !g.is_edge(u, v));
            let got: BTreeSet<Vec<usize>> = join_decompose(&g)
                .factors()
                .iter()
                .map(|f| {
                    let mut f = f.clone();
                    f.sort_unstable();
                    f
                })
                .collect();
            total += 1;
            agree += usize::from(got == oracle);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        agree == total && within(elapsed, Duration::from_secs(10)),
        format!("{agree}/{total} edge patterns on <= 6 vertices agree, {elapsed:.2?} (limit 10 s)"),
    )
}

fn classification_cross_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let (mut agree, mut irreducible) = (0, 0);
    let total = 1000;
    for _ in 0..total {
        let g = random_decomposable_graph(&mut rng, 10);
        let dec = join_decompose(&g);
        let q_connected = build_quotient(&dec, &g).map(|q| q.is_connected()).unwrap_or(false);
        let irr = is_irreducible(&g);
        agree += usize::from(dec.is_decomposable() && irr == q_connected);
        irreducible += usize::from(irr);
    }
    outcome(
        agree == total,
        format!("{agree}/{total} random decomposable graphs agree ({irreducible} irreducible)"),
    )
}

fn worked_example() -> Outcome {
    let g = g4();
    let c = match construct(&g, &ConstructOptions::default()) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("construction failed: {e}")),
    };
    let letters: String = c.gamma.letters.iter().map(|&v| g.name(v)).collect();
    let report = c.verify();
    let checks = [
        ("k = 2", c.k() == 2),
        ("n = 4", c.schedule.n == 4),
        ("r = 2", c.gamma.r() == 2),
        ("gamma = (acabdacbd)^2", letters == "acabdacbd".repeat(2)),
        ("|gamma| = 18", c.gamma.len() == 18),
        ("hyperplanes = 32", c.hyperplanes.total_count() == 32),
        ("key4 length = 16", c.separation.entries.len() == 16),
        ("coverage 4/4", report.covered == 4 && report.generators == 4),
        ("all steps justified", report.passed() && report.justified_steps() == 16 && report.closing.passed),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    outcome(
        failed.is_empty(),
        if failed.is_empty() {
            format!("k=2 n=4 r=2 gamma={letters} |H|=32 key4=16 coverage=4/4, 17/17 steps justified")
        } else {
            format!("failed: {}", failed.join(", "))
        },
    )
}

fn walk_exactness() -> Outcome {
    let start = Instant::now();
    let classes = graphs_up_to_iso(8);
    let (mut total, mut agree) = (0usize, 0usize);
    for class in classes.iter().skip(2) {
        for adj in class.iter().filter(|g| is_connected(g)) {
            let n = adj.len();
            let h = SimpleGraph::new(
                (0..n).collect(),
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| adj[u][v]),
            );
            let walk = ExactSolver.solve(&h).expect("connected graph");
            total += 1;
            agree += usize::from(is_covering_closed_walk(adj, &walk.vertices) && walk.len() == brute_force_min_walk(adj));
        }
    }
    let elapsed = start.elapsed();
    // 1 + 2 + 6 + 21 + 112 + 853 + 11117 connected graphs on 2..=8 vertices
    let expected = 12_112;
    outcome(
        agree == total && total == expected && within(elapsed, Duration::from_secs(60)),
        format!("{agree}/{total} connected iso classes on 2..=8 vertices (expected {expected}), {elapsed:.2?} (limit 60 s)"),
    )
}

fn dihedral_sweep() -> Outcome {
    let start = Instant::now();
    let mut all = true;
    for m in 3..=100 {
        all &= verify_dihedral_lemmas(m).is_ok_and(|r| r.all_passed() && r.group_order == 2 * m as usize);
    }
    let mut orders = true;
    for m in 3..=12u32 {
        let ball = CoxeterGroup::new(CoxeterMatrix::dihedral(m)).enumerate_ball(m as usize + 1, 10_000).unwrap();
        orders &= ball.closed && ball.elements.len() == 2 * m as usize;
    }
    let elapsed = start.elapsed();
    outcome(
        all && orders && within(elapsed, Duration::from_secs(1)),
        format!("98 moduli 3..=100 pass: {all}, |I2(m)| = 2m for m <= 12: {orders}, {elapsed:.2?} (limit 1 s)"),
    )
}

fn tits_reducer() -> Outcome {
    let mut sizes = Vec::new();
    let mut ok = true;
    for m in 2..=12u32 {
        let ball = CoxeterGroup::new(CoxeterMatrix::dihedral(m)).enumerate_ball(20, 10_000).unwrap();
        ok &= ball.closed && ball.elements.len() == 2 * m as usize;
    }
    for (name, matrix, expected) in [("A3", CoxeterMatrix::type_a(3), 24), ("B3", CoxeterMatrix::type_b(3), 48)] {
        let ball = CoxeterGroup::new(matrix).enumerate_ball(20, 10_000).unwrap();
        ok &= ball.closed && ball.elements.len() == expected;
        sizes.push(format!("|W({name})| = {}", ball.elements.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let matrices = [CoxeterMatrix::type_a(3), CoxeterMatrix::type_b(3), CoxeterMatrix::from_graph(&g4()), CoxeterMatrix::dihedral(7)];
    let mut idempotent = 0;
    let trials = 10_000;
    for i in 0..trials {
        let m = &matrices[i % matrices.len()];
        let group = CoxeterGroup::new(m.clone());
        let len = rng.gen_range(0..=12);
        let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..m.rank())).collect();
        let once = group.reduce(&word);
        let twice = group.reduce(once.word());
        idempotent += usize::from(once == twice);
    }
    outcome(
        ok && idempotent == trials,
        format!("|I2(m)| = 2m for m <= 12, {}, idempotent on {idempotent}/{trials} random words", sizes.join(", ")),
    )
}

fn shadow_structure() -> Outcome {
    let pair = DefiningGraph::from_named(&["a", "b"], &[("a", "b", 2)]).unwrap();
    let grid = build_shadow(&pair, 2).unwrap();
    let grid_ok = (grid.vertices.len(), grid.edges.len(), grid.squares.len()) == (9, 12, 4) && extract_hyperplanes(&grid).len() == 4;

    let g = g4();
    let sc = build_shadow(&g, 2).unwrap();
    let oracle_ok = (sc.vertices.len(), sc.edges.len(), sc.squares.len()) == shadow_counts_oracle(&g, 2);
    let report = structural_checks(&sc, &g);
    let link_ok = report.link.checked && report.link.isomorphic;
    let crossing_ok = report.same_type_crossings == 0;

    let square = DefiningGraph::from_named(&["a", "b", "c", "d"], &[("a", "c", 2), ("c", "b", 2), ("b", "d", 2), ("d", "a", 2)]).unwrap();
    let free_join = DefiningGraph::from_named(
        &["a", "b", "c", "d", "e"],
        &[("a", "c", 2), ("a", "d", 2), ("a", "e", 2), ("b", "c", 2), ("b", "d", 2), ("b", "e", 2), ("c", "d", 3)],
    )
    .unwrap();
    let products = [
        product_compare(&pair, (&[0], &[1]), 2),
        product_compare(&square, (&[0, 1], &[2, 3]), 2),
        product_compare(&free_join, (&[0, 1], &[2, 3, 4]), 2),
    ];
    let product_ok = products.iter().all(|r| r.as_ref().is_ok_and(|r| r.passed()));
    let guard_ok = product_compare(&g, (&[0, 1], &[2, 3]), 2).is_err();
    outcome(
        grid_ok && oracle_ok && link_ok && crossing_ok && product_ok && guard_ok,
        format!(
            "grid 9/12/4 with 4 hyperplanes: {grid_ok}; G4 R=2 counts match coset oracle: {oracle_ok}; link = G4: {link_ok}; \
             same-type crossings: {}; product on 3 joins: {product_ok}; label-3 split refused: {guard_ok}",
            report.same_type_crossings
        ),
    )
}

fn mutate(value: &mut serde_json::Value, names: &[String], rng: &mut impl Rng) {
    use serde_json::Value;
    let new = match &*value {
        Value::Bool(b) => Value::Bool(!b),
        Value::Null => Value::from(0),
        Value::Number(n) => Value::from(n.as_u64().map_or(1, |x| if rng.gen_bool(0.5) || x == 0 { x + 1 } else { x - 1 })),
        Value::String(s) if names.contains(s) => {
            let others: Vec<&String> = names.iter().filter(|n| *n != s).collect();
            Value::String(others.choose(rng).unwrap().to_string())
        }
        Value::String(s) => Value::String(format!("{s}x")),
        other => other.clone(),
    };
    *value = new;
}

fn certificate_robustness() -> Outcome {
    let g = g4();
    let c = construct(&g, &ConstructOptions::default()).unwrap();
    let original = serde_json::to_value(c.to_document()).unwrap();
    if !verify_document(&g, &original).passed() {
        return outcome(false, "unmutated certificate rejected");
    }
    let mut paths = Vec::new();
    leaf_paths(&original, "", &mut paths);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let trials = 100;
    let (mut rejected, mut localized) = (0, 0);
    let mut first_miss = None;
    for _ in 0..trials {
        let path = paths.choose(&mut rng).unwrap().clone();
        let mut doc = original.clone();
        mutate(leaf_mut(&mut doc, &path), g.names(), &mut rng);
        let report = verify_document(&g, &doc);
        if !report.passed() {
            rejected += 1;
        }
        if is_localized(&report.failures, &path) {
            localized += 1;
        } else if first_miss.is_none() {
            first_miss = Some(path);
        }
    }
    outcome(
        rejected == trials && localized == trials,
        format!(
            "{rejected}/{trials} mutations rejected, {localized}/{trials} localized to the mutated path{}",
            first_miss.map(|p| format!(" (first miss: {p})")).unwrap_or_default()
        ),
    )
}

fn randomized_end_to_end() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let trials = 200;
    let (mut verified, mut closed_form, mut skewer) = (0, 0, 0);
    let mut ks = [0usize; 5];
    for _ in 0..trials {
        let g = random_eligible_graph(&mut rng, 10);
        let Ok(c) = construct(&g, &ConstructOptions::default()) else {
            continue;
        };
        ks[c.k()] += 1;
        let value = serde_json::to_value(c.to_document()).unwrap();
        verified += usize::from(verify_document(&g, &value).passed());
        closed_form += usize::from(c.gamma.len() == closed_form_length(&c.schedule, &c.selection, &c.path));
        let hs = &c.hyperplanes;
        let period = hs.period() as i64;
        let shifts = (0..c.k()).all(|i| {
            (-period..=2 * period).all(|d| {
                let t = translate_by_gamma(hs, &descriptor_at(hs, i, d));
                t == descriptor_at(hs, i, d + period) && t.d - d == period
            })
        });
        skewer += usize::from(shifts);
    }
    outcome(
        verified == trials && closed_form == trials && skewer == trials,
        format!(
            "construct->verify {verified}/{trials}, closed-form length {closed_form}/{trials}, shift by 2rn {skewer}/{trials} (k=2: {}, k=3: {}, k=4: {})",
            ks[2], ks[3], ks[4]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 join decomposition vs closure oracle", join_decomposition_oracle),
        ("2 irreducible iff quotient connected", classification_cross_check),
        ("3 worked example G4", worked_example),
        ("4 covering-walk exactness", walk_exactness),
        ("5 dihedral sweep", dihedral_sweep),
        ("6 Tits reducer", tits_reducer),
        ("7 shadow structure", shadow_structure),
        ("8 certificate robustness", certificate_robustness),
        ("9 randomized end-to-end", randomized_end_to_end),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let o = run();
        println!("[{}] {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failures += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
