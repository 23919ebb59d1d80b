//! Acceptance suite. Each test prints one `[PASS]` or `[FAIL]` line; run with
//! `cargo test -p connpart --test acceptance -- --nocapture --test-threads=1`.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use connpart::fixtures::{self, example_graph, example_partition};
use connpart::format::{decimal_string, to_f64};
use connpart::montecarlo::{compare, exact_law, run_trials};
use connpart::oracle::{brute_force_count, brute_force_table, exact_randmst_tree_distribution};
use connpart::prob::{partition_probability, probability_breakdown, two_block_probability};
use connpart::sampler::{sample_spanning_tree, SpanningTree};
use connpart::{
    count_spanning_trees, minor_determinant, EnumerationBudget, Graph, Laplacian, Partition, Probability, RngState,
    TreeMode,
};

const ALPHA: f64 = 0.001;

/// Runs one criterion, prints its verdict line and fails the test on a
/// panic or a blown time limit.
fn criterion(id: &str, title: &str, limit: Option<Duration>, check: impl FnOnce() -> String) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(check));
    let elapsed = start.elapsed();
    let verdict = match &outcome {
        Ok(detail) => match limit {
            Some(l) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}; {detail}")),
            _ => Ok(detail.clone()),
        },
        Err(e) => Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    };
    match verdict {
        Ok(detail) => println!("[PASS] {id} {title} ({elapsed:.2?}): {detail}"),
        Err(why) => {
            println!("[FAIL] {id} {title} ({elapsed:.2?}): {why}");
            panic!("{id} failed: {why}");
        }
    }
}

fn ratio(n: u64, d: u64) -> Probability {
    Probability::new(BigUint::from(n), BigUint::from(d))
}

fn roomy() -> EnumerationBudget {
    EnumerationBudget {
        max_trees: 1_000_000,
        ..Default::default()
    }
}

/// Every set partition of `0..n` as a restricted growth string.
fn all_set_partitions(n: usize) -> Vec<Partition> {
    fn go(labels: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Partition>) {
        if labels.len() == n {
            out.push(Partition::from_labels(labels));
            return;
        }
        for l in 0..=max + 1 {
            labels.push(l);
            go(labels, n, max.max(l), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(&mut vec![0], n, 0, &mut out);
    }
    out
}

fn bin_path() -> &'static str {
    env!("CARGO_BIN_EXE_connpart")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn ac1_example_fixture_exact() {
    criterion("AC1", "example fixture, exact", Some(Duration::from_secs(1)), || {
        let g = example_graph();
        let c = example_partition();
        assert_eq!(count_spanning_trees(&g), BigUint::from(4546u32));
        let b = probability_breakdown(&g, &c).unwrap();
        assert_eq!(b.graph_trees, BigUint::from(4546u32));
        let blocks: Vec<u32> = b.block_trees.iter().map(|t| u32::try_from(t).unwrap()).collect();
        assert_eq!(blocks, [16, 3, 3]);
        assert_eq!(g.contract(&c).unwrap().matrix(), vec![vec![0, 2, 1], vec![2, 0, 2], vec![1, 2, 0]]);
        assert_eq!(b.contracted_trees, BigUint::from(8u32));
        assert_eq!(b.binomial, BigUint::from(36u32));
        assert_eq!(b.probability, ratio(48, 6819));
        assert_eq!(partition_probability(&g, &c).unwrap(), ratio(16 * 3 * 3 * 8, 36 * 4546));
        let shown = decimal_string(&b.probability, 4);
        assert_eq!(shown, "0.0070");
        format!("t(G)=4546, t(U)=[16,3,3], t(M)=8, P={} = 48/6819 ~ {shown}", b.probability)
    });
}

#[test]
fn ac2_normalization() {
    criterion("AC2", "normalization, exact", Some(Duration::from_secs(60)), || {
        let budget = EnumerationBudget::default();
        let mut tables = 0;
        let mut graphs: Vec<(String, Graph, Vec<usize>)> = fixtures::small_suite()
            .into_iter()
            .filter(|(_, g)| g.node_count() <= 6)
            .map(|(name, g)| {
                let ks = (1..=g.node_count()).collect();
                (name, g, ks)
            })
            .collect();
        graphs.push(("example".into(), example_graph(), vec![2, 3]));
        for (name, g, ks) in &graphs {
            for &k in ks {
                let law = exact_law(g, k, TreeMode::UniformTree, &budget).unwrap();
                assert!(!law.is_empty(), "{name} k={k}: empty support");
                let sum: Probability = law.values().cloned().sum();
                assert!(sum.is_one(), "{name} k={k}: sum {sum}");
                tables += 1;
            }
        }
        format!("{tables} (graph, k) tables over {} graphs each sum to 1/1", graphs.len())
    });
}

#[test]
fn ac3_oracle_equivalence() {
    criterion("AC3", "brute force equals closed form", Some(Duration::from_secs(300)), || {
        let budget = roomy();
        let mut graphs: Vec<(String, Graph)> = fixtures::small_suite();
        graphs.push(("example".into(), example_graph()));
        let mut partitions = 0;
        let mut graphs_checked = 0;
        for (name, g) in &graphs {
            if *g.tree_count() > BigUint::from(5000u32) {
                continue;
            }
            graphs_checked += 1;
            for k in 1..=g.node_count() {
                let table = brute_force_table(g, k, &budget).unwrap();
                let law = exact_law(g, k, TreeMode::UniformTree, &budget).unwrap();
                let support: Vec<&Partition> = table.counts.keys().collect();
                assert_eq!(support, law.keys().collect::<Vec<_>>(), "{name} k={k}: support differs");
                for (c, p) in &law {
                    assert_eq!(table.probability(c), *p, "{name} k={k} {c}");
                    assert_eq!(table.counts[c].max_subsets_per_tree, 1, "{name} k={k} {c}");
                }
                partitions += law.len();
            }
        }
        let g = example_graph();
        let c = example_partition();
        let (count, total) = brute_force_count(&g, &c, &budget).unwrap();
        assert_eq!(count.pairs, 1152);
        assert_eq!(count.pairs, 16 * 3 * 3 * 8);
        assert_eq!(total, 4546 * 36);
        assert_eq!(Probability::new(count.pairs.into(), total.into()), ratio(48, 6819));
        format!(
            "{partitions} partitions over {graphs_checked} graphs agree; example partition 1152 of {total} pairs"
        )
    });
}

#[test]
fn ac4_two_block_consistency() {
    criterion("AC4", "two-block route equals general formula", None, || {
        let mut subsets = 0;
        for (name, g) in fixtures::small_suite() {
            let n = g.node_count();
            if n > 6 || n < 2 {
                continue;
            }
            for mask in 1u32..(1 << n) - 1 {
                let s: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                let rest = g.complement(&s).unwrap();
                let c = Partition::new(vec![s.clone(), rest]).unwrap();
                assert_eq!(
                    two_block_probability(&g, &s).unwrap(),
                    partition_probability(&g, &c).unwrap(),
                    "{name} {c}"
                );
                subsets += 1;
            }
        }
        format!("{subsets} proper subsets agree")
    });
}

#[test]
fn ac5_monte_carlo_agreement() {
    criterion("AC5", "Monte Carlo agreement", Some(Duration::from_secs(120)), || {
        let budget = EnumerationBudget::default();
        let g = example_graph();
        let c = example_partition();
        let samples = 500_000u64;
        let tally = run_trials(&g, 3, samples, 20240601, TreeMode::UniformTree).unwrap();
        let p = to_f64(&ratio(1152, 163656));
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        let freq = *tally.get(&c).unwrap_or(&0) as f64 / samples as f64;
        let z = (freq - p) / se;
        assert!(z.abs() <= 4.0, "frequency {freq} vs {p}, z = {z}");
        let law = exact_law(&g, 3, TreeMode::UniformTree, &budget).unwrap();
        assert!(tally.keys().all(|k| law.contains_key(k)), "sample outside support");

        let mut worst = f64::INFINITY;
        for (name, small) in [
            ("triangle", Graph::complete(3)),
            ("cycle4", Graph::cycle(4)),
            ("cycle4+chord", fixtures::cycle_with_chord()),
        ] {
            for k in 2..small.node_count() {
                let law = exact_law(&small, k, TreeMode::UniformTree, &budget).unwrap();
                let n = 20_000 * law.len() as u64;
                let tally = run_trials(&small, k, n, 31 + k as u64, TreeMode::UniformTree).unwrap();
                let report = compare(&tally, &law, n).unwrap();
                assert!(!report.chi_square_rejects(ALPHA), "{name} k={k}: p = {}", report.p_value);
                worst = worst.min(report.p_value);
            }
        }
        format!("example freq {freq:.7} vs {p:.7} (SE {se:.2e}, z {z:+.2}); small-graph chi-square min p {worst:.3}")
    });
}

#[test]
fn ac6_uniform_tree_sampler() {
    criterion("AC6", "uniform spanning-tree sampler", None, || {
        let budget = EnumerationBudget::default();
        let mut graphs: Vec<(String, Graph)> = fixtures::small_suite();
        graphs.push(("triangle".into(), Graph::complete(3)));
        let mut tested = Vec::new();
        for (name, g) in &graphs {
            let t = g.tree_count().clone();
            if t > BigUint::from(32u32) {
                continue;
            }
            let t = u64::try_from(&t).unwrap();
            let trees = connpart::oracle::enumerate_spanning_trees(g, &budget).unwrap();
            assert_eq!(trees.len() as u64, t);
            let samples = 1000 * t;
            let mut rng = RngState::new(500 + t);
            let mut tally: BTreeMap<SpanningTree, u64> = BTreeMap::new();
            for _ in 0..samples {
                *tally.entry(sample_spanning_tree(g, TreeMode::UniformTree, &mut rng).unwrap()).or_default() += 1;
            }
            assert!(tally.keys().all(|tr| trees.binary_search(tr).is_ok()), "{name}: tree outside support");
            if t == 1 {
                tested.push(format!("{name}(t=1)"));
                continue;
            }
            let e = samples as f64 / t as f64;
            let stat: f64 = trees
                .iter()
                .map(|tr| (*tally.get(tr).unwrap_or(&0) as f64 - e).powi(2) / e)
                .sum();
            let p = ChiSquared::new((t - 1) as f64).unwrap().sf(stat);
            assert!(p >= ALPHA, "{name}: chi-square p = {p}");
            tested.push(format!("{name}(t={t}, p={p:.3})"));
        }
        format!("{} graphs: {}", tested.len(), tested.join(" "))
    });
}

#[test]
fn ac7_trivial_laws() {
    criterion("AC7", "trivial laws", None, || {
        let mut graphs: Vec<(String, Graph)> = fixtures::small_suite();
        graphs.push(("example".into(), example_graph()));
        let mut zero_checked = 0;
        for (name, g) in &graphs {
            let n = g.node_count();
            assert!(partition_probability(g, &Partition::whole(n)).unwrap().is_one(), "{name} k=1");
            assert!(partition_probability(g, &Partition::singletons(n)).unwrap().is_one(), "{name} k=n");
            let l = g.laplacian();
            let first = minor_determinant(&l, 0).unwrap();
            for i in 1..n {
                assert_eq!(minor_determinant(&l, i).unwrap(), first, "{name} minor {i}");
            }
            if n <= 6 {
                for c in all_set_partitions(n) {
                    let connected = c.blocks().iter().all(|b| g.induced_subgraph(b).unwrap().0.is_connected());
                    let p = partition_probability(g, &c).unwrap();
                    if connected {
                        assert!(!p.is_zero(), "{name} {c}");
                    } else {
                        assert!(p.is_zero() && p.denom().is_one(), "{name} {c}: {p}");
                        zero_checked += 1;
                    }
                }
            }
        }
        let broken = Partition::new(vec![vec![0, 1, 2, 3, 7], vec![4, 5, 6], vec![8, 9]]).unwrap();
        assert!(partition_probability(&example_graph(), &broken).unwrap().is_zero());
        format!(
            "k=1 and k=n give 1/1 on {} graphs; {} disconnected-block partitions give 0/1; minors invariant",
            graphs.len(),
            zero_checked + 1
        )
    });
}

#[test]
fn ac8_randmst_audit() {
    criterion("AC8", "random-MST mode audit", None, || {
        let g = fixtures::cycle_with_chord();
        assert_eq!(g.edge_count(), 5);
        let law = exact_randmst_tree_distribution(&g, &EnumerationBudget::default()).unwrap();
        let t = u64::try_from(g.tree_count()).unwrap();
        assert_eq!(law.len() as u64, t);
        let total: Probability = law.values().cloned().sum();
        assert!(total.is_one());
        // every mass is a count of the 120 edge rankings
        for p in law.values() {
            assert!((p * BigUint::from(120u32)).is_integer());
        }
        let uniform = ratio(1, t);
        let is_uniform = law.values().all(|p| *p == uniform);
        let masses: Vec<String> = law.values().map(ToString::to_string).collect();

        let out = Command::new(bin_path())
            .args([
                "verify", "--graph", &fixture("cycle4_chord.el"), "--k", "2", "--samples", "100000", "--seed", "8",
                "--mode", "randmst-tree",
            ])
            .env_remove("CONNPART_CI")
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        format!(
            "law over {t} trees from 5! = 120 rankings is {} (masses {}; uniform would be {uniform}); verify in randmst-tree mode passes",
            if is_uniform { "uniform" } else { "NOT uniform" },
            masses.join(" ")
        )
    });
}
