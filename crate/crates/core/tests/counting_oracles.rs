use gccd_core::codec::{capacity, graph_from_word};
use gccd_core::coloring::chromatic_number;
use gccd_core::counting::{
    cross_pairs_exponent, gamma_max, gamma_partition, gamma_total, oracle_fixed_partition_count, oracle_spectrum,
    p1_bound, partitions_into, verify_theorem_bound, PartitionSpec,
};

/// Σ C(x, 2) over the parts.
fn intra_pairs(p: &PartitionSpec) -> u64 {
    p.parts().iter().map(|&x| (x * (x - 1) / 2) as u64).sum()
}

#[test]
fn literal_sum_matches_identity_up_to_30() {
    for m in 1..=30 {
        for n in 1..=m {
            for p in partitions_into(m, n).unwrap() {
                let e = cross_pairs_exponent(&p).unwrap();
                assert_eq!(e, (m * (m - 1) / 2) as u64 - intra_pairs(&p));
            }
        }
    }
}

#[test]
fn fixed_partition_counts_are_exact_up_to_6() {
    for m in 1..=6 {
        for n in 1..=m {
            for p in partitions_into(m, n).unwrap() {
                let brute = oracle_fixed_partition_count(m, &p).unwrap();
                assert_eq!(brute, 1u64 << gamma_partition(&p).unwrap().exponent, "{p}");
            }
        }
    }
}

#[test]
fn hand_checked_partition_counts() {
    // Classes {1,2},{3,4}: pairs a21 and a43 must be absent; the other four are free.
    let two_two = PartitionSpec::new(vec![2, 2]).unwrap();
    let independent = (0..64u64)
        .filter(|&w| {
            let g = graph_from_word(4, w);
            !g.has_edge(1, 2) && !g.has_edge(3, 4)
        })
        .count();
    assert_eq!(independent, 16);
    assert_eq!(oracle_fixed_partition_count(4, &two_two).unwrap(), 16);
    let three_one = PartitionSpec::new(vec![3, 1]).unwrap();
    assert_eq!(oracle_fixed_partition_count(4, &three_one).unwrap(), 8);
}

#[test]
fn theorem_bound_holds_up_to_64_with_characterized_equality() {
    for m in 2..=64 {
        for n in 1..=m {
            let t = verify_theorem_bound(m, n).unwrap();
            assert!(t.holds, "m={m} n={n}");
            assert_eq!(t.y, (m - n) as u64);
            assert_eq!(t.equality, m <= 2 * n, "m={m} n={n}");
        }
    }
}

#[test]
fn argmax_is_balanced_up_to_20() {
    for m in 1..=20 {
        for n in 1..=m {
            let best = partitions_into(m, n)
                .unwrap()
                .into_iter()
                .map(|p| (gamma_partition(&p).unwrap().exponent, p))
                .max_by_key(|(e, _)| *e)
                .unwrap();
            let (count, arg) = gamma_max(m, n).unwrap();
            assert_eq!(count.exponent, best.0);
            assert!(arg.is_balanced());
            assert_eq!(arg, PartitionSpec::balanced(m, n).unwrap());
            // No ties at the maximum.
            let ties = partitions_into(m, n).unwrap().iter().filter(|p| gamma_partition(p).unwrap().exponent == best.0).count();
            assert_eq!(ties, 1);
        }
    }
}

#[test]
fn p1_chain_up_to_64() {
    for m in 1..=64 {
        for n in 1..=m {
            let b = p1_bound(m, n).unwrap();
            assert!(b.p1.neg_exponent >= b.bound.neg_exponent);
            assert_eq!(b.p1.neg_exponent, gamma_total(m).exponent - gamma_max(m, n).unwrap().0.exponent);
        }
    }
}

#[test]
fn spectra_close_and_match_direct_solves() {
    for m in 1..=6 {
        let s = oracle_spectrum(m).unwrap();
        assert_eq!(s.total(), 1u64 << capacity(m));
        let mut direct = vec![0u64; m];
        for w in 0..1u64 << capacity(m) {
            direct[chromatic_number(&graph_from_word(m, w)).unwrap().n - 1] += 1;
        }
        assert_eq!(s.counts, direct);
    }
}

#[test]
fn order4_bipartite_count_by_inclusion_exclusion() {
    // On 4 vertices the only odd cycles are the 4 triangles. Any two share one
    // edge (union 5 edges), any three cover all 6.
    let total = 64i64;
    let one = 4 * (1 << 3);
    let two = 6 * (1 << 1);
    let three = 4;
    let four = 1;
    let triangle_free = total - one + two - three + four;
    assert_eq!(triangle_free, 41);
    assert_eq!(oracle_spectrum(4).unwrap().at_most(2) as i64, triangle_free);
}

#[test]
fn colorable_graphs_exceed_gamma_max() {
    // 41 two-colorable graphs on 4 vertices, but only 16 share one fixed partition.
    let s = oracle_spectrum(4).unwrap();
    assert_eq!(gamma_max(4, 2).unwrap().0.exponent, 4);
    assert!(s.at_most(2) > 16);
}
