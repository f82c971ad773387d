mod common;

use proptest::prelude::*;

use common::*;
use tablegraph_core::convert::edges_to_graph;
use tablegraph_core::parallel::with_workers;
use tablegraph_core::table::{read_tsv, write_tsv, CmpOp};
use tablegraph_core::{algo, graph_to_edge_table, table_to_graph, ColumnTable, EdgeSpec, Predicate};

fn rows_strategy(max: usize) -> impl Strategy<Value = Vec<Row>> {
    (any::<u64>(), 0..=max, 1i64..20).prop_map(|(seed, n, keys)| random_rows(&mut rng(seed), n, keys))
}

fn edges_strategy(max_n: i64, max_m: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((0..max_n, 0..max_n), 0..max_m)
}

fn split(edges: &[(i64, i64)]) -> (Vec<i64>, Vec<i64>) {
    edges.iter().copied().unzip()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn row_ids_survive_select_order_project(rows in rows_strategy(300), cut in -5i64..25) {
        let t = table_of(&rows);
        let by_id = |t: &ColumnTable| -> Vec<(i64, Vec<Exact>)> {
            t.row_ids().iter().copied().zip(exact_rows(&t.rows())).collect()
        };
        let original = by_id(&t);

        let ordered = t.order(&["x", "s"], false).unwrap();
        let selected = ordered.select(&Predicate::new("k", CmpOp::Lt, cut)).unwrap();
        for (id, row) in by_id(&selected) {
            prop_assert_eq!(&original[id as usize].1, &row);
        }
        let projected = selected.project(&["v"]).unwrap();
        prop_assert_eq!(projected.row_ids(), selected.row_ids());
    }

    #[test]
    fn select_is_idempotent(rows in rows_strategy(300), seed in any::<u64>()) {
        let pred = random_predicate(&mut rng(seed), &rows);
        let once = table_of(&rows).select(&pred).unwrap();
        let twice = once.select(&pred).unwrap();
        prop_assert_eq!(contents(&once), contents(&twice));
    }

    #[test]
    fn order_is_a_sorted_permutation(rows in rows_strategy(300), ascending in any::<bool>()) {
        let t = table_of(&rows);
        let o = t.order(&["k", "x"], ascending).unwrap();
        let mut ids = o.row_ids().to_vec();
        ids.sort_unstable();
        prop_assert!(ids.iter().copied().eq(0..rows.len() as i64));
        let out = o.rows();
        for w in out.windows(2) {
            let ord = compare(&w[0][0], &w[1][0]).then(compare(&w[0][2], &w[1][2]));
            let sorted = if ascending { ord.is_le() } else { ord.is_ge() };
            prop_assert!(sorted);
        }
    }

    #[test]
    fn tsv_round_trip(rows in rows_strategy(200)) {
        let t = table_of(&rows);
        let mut buf = Vec::new();
        write_tsv(&t, &mut buf).unwrap();
        let back = read_tsv(buf.as_slice(), t.schema()).unwrap();
        prop_assert_eq!(exact_rows(&back.rows()), exact_rows(&rows));
    }

    #[test]
    fn conversion_round_trips_and_ignores_workers(edges in edges_strategy(60, 400)) {
        let (src, dst) = split(&edges);
        let table = ColumnTable::from_int_columns([("src", src), ("dst", dst)]).unwrap();
        let g1 = with_workers(1, || table_to_graph(&table, &EdgeSpec::default())).unwrap();
        let g3 = with_workers(3, || table_to_graph(&table, &EdgeSpec::default())).unwrap();
        prop_assert_eq!(&g1, &g3);
        prop_assert!(g1.validate().is_ok());
        prop_assert_eq!(g1.edges(), dedup_sorted(&edges));
        let back = table_to_graph(&graph_to_edge_table(&g1), &EdgeSpec::default()).unwrap();
        prop_assert_eq!(back, g1);
    }

    #[test]
    fn sort_first_matches_incremental_build(edges in edges_strategy(40, 300)) {
        let (src, dst) = split(&edges);
        let mut incremental = tablegraph_core::Graph::new();
        for &(s, d) in &edges {
            incremental.add_edge(s, d);
        }
        prop_assert_eq!(edges_to_graph(&src, &dst), incremental);
    }

    #[test]
    fn pagerank_is_a_distribution(edges in edges_strategy(50, 300)) {
        prop_assume!(!edges.is_empty());
        let (src, dst) = split(&edges);
        let g = edges_to_graph(&src, &dst);
        let ranks = algo::pagerank(&g, 0.85, 10).unwrap();
        prop_assert!((ranks.sum() - 1.0).abs() < 1e-9);
        prop_assert!(ranks.scores().iter().all(|&s| s > 0.0));
    }

    #[test]
    fn scc_condensation_is_acyclic(edges in edges_strategy(40, 120)) {
        let n = 40;
        let g = graph_from(n, &edges);
        let c = algo::scc(&g);
        // an edge leaving a component can never be followed by a path back
        let r = closure(n, &edges);
        for &(s, d) in &edges {
            let (cs, cd) = (c.label(s).unwrap(), c.label(d).unwrap());
            if cs != cd {
                prop_assert!(!r[d as usize][s as usize]);
            }
        }
    }

    #[test]
    fn sssp_agrees_with_bfs(edges in edges_strategy(30, 90), source in 0usize..30) {
        let n = 30;
        let g = graph_from(n, &edges);
        let d = algo::sssp(&g, source as i64).unwrap();
        let expected = bfs(n, &edges, source);
        prop_assert_eq!(d.distances(), expected.as_slice());
    }
}

#[test]
fn next_k_pairs_only_within_groups() {
    let mut r = rng(8);
    let rows = random_rows(&mut r, 500, 7);
    let t = table_of(&rows);
    let out = t.next_k("k", "v", 3).unwrap();
    for row in out.rows() {
        assert!(same(&row[0], &row[4]));
        assert!(compare(&row[3], &row[7]).is_le());
    }
}
