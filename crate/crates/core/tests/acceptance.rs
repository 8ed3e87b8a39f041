//! The nine acceptance criteria. Each test writes one `PASS`/`FAIL` line to
//! stderr (uncaptured, so it shows in plain `cargo test` output) and then
//! asserts.

use std::io::Write as _;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use cfguard::cfc::{cf_number, solve_cfc};
use cfguard::decomposition::{exact_treewidth, min_fill_decomposition};
use cfguard::graph::{
    degeneracy, random_graph, random_partial_ktree, random_tree, verify_conflict_free,
    verify_strong_conflict_free, Graph,
};
use cfguard::oracle::{oracle_cfc, oracle_scfc};
use cfguard::scfc::{solve_scfc, solve_scfc_with_stats};
use cfguard::terrain::{
    cf_guard, onion_peeling, pipeline, random_terrain, same_color_guards_disjoint, strong_guard, verify_guarding,
    GuardMode, Problem, Terrain,
};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let line = format!("acceptance {id} [{}] {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {id} failed: {detail}");
}

#[derive(Debug, Default, Clone, Copy)]
struct Equivalence {
    cases: usize,
    mismatches: usize,
    witnesses: usize,
    bad_witnesses: usize,
    elapsed: Duration,
}

fn equivalence(strong: bool, graphs: u64, sizes: std::ops::RangeInclusive<usize>) -> Equivalence {
    let start = Instant::now();
    let mut e = Equivalence::default();
    let span = sizes.end() - sizes.start() + 1;
    for seed in 1..=graphs {
        let n = sizes.start() + (seed as usize % span);
        let p = if seed % 2 == 0 { 0.3 } else { 0.5 };
        let g = random_graph(n, p, seed).unwrap();
        for k in 1..=3 {
            let (got, want) = if strong {
                (solve_scfc(&g, k).unwrap(), oracle_scfc(&g, k).unwrap())
            } else {
                (solve_cfc(&g, k).unwrap(), oracle_cfc(&g, k).unwrap())
            };
            e.cases += 1;
            if got.is_some() != want.is_some() {
                e.mismatches += 1;
            }
            if let Some(c) = got {
                e.witnesses += 1;
                let verdict = if strong {
                    verify_strong_conflict_free(&g, &c).unwrap()
                } else {
                    verify_conflict_free(&g, &c).unwrap()
                };
                if !verdict.is_ok() || c.colors().iter().any(|&x| x > k) {
                    e.bad_witnesses += 1;
                }
            }
        }
    }
    e.elapsed = start.elapsed();
    e
}

fn cfc_equivalence() -> Equivalence {
    static CELL: OnceLock<Equivalence> = OnceLock::new();
    *CELL.get_or_init(|| equivalence(false, 300, 4..=8))
}

fn scfc_equivalence() -> Equivalence {
    static CELL: OnceLock<Equivalence> = OnceLock::new();
    *CELL.get_or_init(|| equivalence(true, 200, 4..=7))
}

#[test]
fn criterion_1_cfc_oracle_equivalence() {
    let e = cfc_equivalence();
    let pass = e.mismatches == 0 && e.elapsed < Duration::from_secs(120);
    report(
        1,
        "CFC oracle equivalence",
        pass,
        &format!("{}/{} decisions agree in {:.1?}", e.cases - e.mismatches, e.cases, e.elapsed),
    );
}

#[test]
fn criterion_2_scfc_oracle_equivalence() {
    let e = scfc_equivalence();
    let pass = e.mismatches == 0 && e.elapsed < Duration::from_secs(180);
    report(
        2,
        "SCFC oracle equivalence",
        pass,
        &format!("{}/{} decisions agree in {:.1?}", e.cases - e.mismatches, e.cases, e.elapsed),
    );
}

#[test]
fn criterion_3_witness_soundness() {
    let (a, b) = (cfc_equivalence(), scfc_equivalence());
    let bad = a.bad_witnesses + b.bad_witnesses;
    report(
        3,
        "witness soundness",
        bad == 0,
        &format!("{bad} failures over {} witnesses", a.witnesses + b.witnesses),
    );
}

#[test]
fn criterion_4_color_bound() {
    let mut within = 0;
    for seed in 1..=100u64 {
        let n = 3 + (seed as usize % 10);
        let p = [0.2, 0.4, 0.6, 0.8][seed as usize % 4];
        let g = random_graph(n, p, seed).unwrap();
        if cf_number(&g).unwrap().k <= degeneracy(&g).0 + 1 {
            within += 1;
        }
    }
    report(4, "color bound", within == 100, &format!("{within}/100 graphs within degeneracy + 1"));
}

#[test]
fn criterion_5_terrain_guarding() {
    let mut good = 0;
    let mut disjoint = 0;
    for seed in 1..=100u64 {
        let n = 1 + (seed as usize * 13) % 60;
        let t = random_terrain(n, 0, [10, 100, 1000][seed as usize % 3], seed).unwrap();
        let p = onion_peeling(&t).p();
        let strong = strong_guard(&t).coloring;
        let cf = cf_guard(&t).coloring;
        let strong_ok = verify_guarding(&t, &strong, GuardMode::Strong).unwrap().is_ok() && strong.k <= 2 * p;
        let cf_ok = verify_guarding(&t, &cf, GuardMode::ConflictFree).unwrap().is_ok() && cf.k <= p + 1;
        if strong_ok && cf_ok {
            good += 1;
        }
        if same_color_guards_disjoint(&t, &strong) {
            disjoint += 1;
        }
    }
    report(
        5,
        "terrain guarding",
        good == 100 && disjoint == 100,
        &format!("{good}/100 verified within budget, {disjoint}/100 disjoint same-color visibility"),
    );
}

#[test]
fn criterion_6_treewidth_spot_check() {
    let start = Instant::now();
    let mut within = 0;
    for seed in 1..=50u64 {
        let n = 2 + (seed as usize % 11);
        let t = random_terrain(n, 0, [10, 100][seed as usize % 2], seed).unwrap();
        let tw = exact_treewidth(&t.visibility_graph()).unwrap();
        if tw <= 2 * onion_peeling(&t).p() {
            within += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        6,
        "treewidth at most 2p",
        within == 50 && elapsed < Duration::from_secs(60),
        &format!("{within}/50 terrains in {elapsed:.1?}"),
    );
}

#[test]
fn criterion_7_reference_fixture() {
    let land = Terrain::reference();
    let layer: Vec<(i64, i64)> = onion_peeling(&land).layers[0].iter().map(|&i| land.vertex(i)).collect();
    let layer_ok = layer == [(0, 0), (4, 12), (26, 24), (32, 25), (52, 18), (62, 10), (66, 4)];
    let gc = strong_guard(&land).coloring;
    let at = |x, y| gc.colors[land.index_of(x, y).unwrap()];
    let labels_ok = at(32, 25) == 1 && at(4, 12) == 2 && at(62, 10) == 2;
    let verified = verify_guarding(&land, &gc, GuardMode::Strong).unwrap().is_ok();
    report(
        7,
        "reference terrain",
        layer_ok && labels_ok && verified,
        &format!("layer 1 {layer_ok}, apex and flank labels {labels_ok}, strong verifier {verified}"),
    );
}

fn oracle_minimum(g: &Graph) -> usize {
    (1..).find(|&k| oracle_cfc(g, k).unwrap().is_some()).unwrap()
}

#[test]
fn criterion_8_pipeline_consistency() {
    let mut equal = 0;
    for seed in 1..=30u64 {
        let n = 2 + (seed as usize % 11);
        let t = random_terrain(n, 0, [10, 100][seed as usize % 2], seed).unwrap();
        let r = pipeline(&t, Problem::Cfc).unwrap();
        if r.k == oracle_minimum(&t.visibility_graph()) {
            equal += 1;
        }
    }
    report(8, "pipeline consistency", equal == 30, &format!("{equal}/30 minima equal the oracle"));
}

#[test]
fn criterion_9_performance_smoke() {
    let tree = random_tree(100, 1);
    let start = Instant::now();
    let tree_k = cf_number(&tree).unwrap().k;
    let tree_time = start.elapsed();

    let g = random_partial_ktree(40, 3, 0.7, 1).unwrap();
    let width = min_fill_decomposition(&g).width();
    let start = Instant::now();
    let sol = solve_scfc_with_stats(&g, 3).unwrap();
    let scfc_time = start.elapsed();
    let witness_ok = sol
        .coloring
        .as_ref()
        .is_none_or(|c| verify_strong_conflict_free(&g, c).unwrap().is_ok());

    let pass = tree_time < Duration::from_secs(5) && width <= 3 && scfc_time < Duration::from_secs(60) && witness_ok;
    report(
        9,
        "performance smoke",
        pass,
        &format!(
            "tree cf_number k={tree_k} in {tree_time:.1?}; width-{width} n=40 strong k=3 in {scfc_time:.1?} ({} states)",
            sol.stats.states_evaluated
        ),
    );
}
