//! Property tests for the structural invariants.

use ifnet::expr::VarRef;
use ifnet::gauss::{
    evaluate_gaussian_expr, prop4_capacity, prop5_capacity, psi, FourByThreeParams,
    TwoByTwoParams,
};
use ifnet::graph::{build_message_graph, enumerate_right_sided, is_satellite};
use ifnet::net::{derive_views, parse_network_spec, MessageLabel, NetworkSpec};
use ifnet::oracle::JointPMF;
use ifnet::sumrate::{
    bccm_sumrate_selector, degraded_prune, maccm_region_constraints, maccm_sumrate_messages,
    sumrate_expression, SumRateMode,
};
use proptest::prelude::*;

/// Distinct nonempty transmitter sets over `k1` transmitters, as bitmasks.
fn tx_sets(k1: usize, max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::btree_set(1u32..(1 << k1), 1..=max_len)
        .prop_map(|s| s.into_iter().collect())
}

fn mask_to_label(mask: u32, rx: &[usize]) -> MessageLabel {
    let tx: Vec<usize> = (0..32).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect();
    MessageLabel::new(tx, rx)
}

/// Random small network: message labels over k1 <= 4 transmitters and
/// k2 <= 3 receivers.
fn arbitrary_spec() -> impl Strategy<Value = NetworkSpec> {
    (1usize..=4, 1usize..=3).prop_flat_map(|(k1, k2)| {
        prop::collection::btree_set((1u32..(1 << k1), 1u32..(1 << k2)), 1..=6).prop_map(
            move |labels| {
                let messages = labels
                    .into_iter()
                    .map(|(tx, rx)| {
                        let rx: Vec<usize> =
                            (0..32).filter(|b| rx & (1 << b) != 0).map(|b| b + 1).collect();
                        mask_to_label(tx, &rx)
                    })
                    .collect();
                let spec = NetworkSpec {
                    k1,
                    k2,
                    messages,
                    channel: None,
                    order: None,
                };
                spec.validate().unwrap();
                spec
            },
        )
    })
}

proptest! {
    #[test]
    fn spec_round_trips(spec in arbitrary_spec()) {
        let again = parse_network_spec(&spec.to_json()).unwrap();
        prop_assert_eq!(spec, again);
    }

    #[test]
    fn views_partition_and_match_membership(spec in arbitrary_spec()) {
        let views = derive_views(&spec);
        let total: usize = views.groups.values().map(|g| g.len()).sum();
        prop_assert_eq!(total, spec.messages.len());
        for m in &spec.messages {
            for i in 1..=spec.k1 {
                prop_assert_eq!(views.per_tx[i - 1].contains(m), m.tx.contains(i));
            }
            for j in 1..=spec.k2 {
                prop_assert_eq!(views.per_rx[j - 1].contains(m), m.rx.contains(j));
            }
        }
    }

    #[test]
    fn right_sided_family_is_a_lattice(masks in tx_sets(4, 8)) {
        let labels: Vec<MessageLabel> =
            masks.iter().map(|&m| mask_to_label(m, &[1])).collect();
        let family = enumerate_right_sided(&labels).unwrap();
        // Independent check of every member against the closure definition.
        for omega in &family {
            for m in omega {
                for other in &labels {
                    if other.tx.is_subset(&m.tx) {
                        prop_assert!(omega.contains(other));
                    }
                }
            }
        }
        // Closed under union and intersection.
        let key = |f: &Vec<MessageLabel>| {
            let mut v: Vec<String> = f.iter().map(|m| m.render()).collect();
            v.sort();
            v
        };
        let keys: Vec<_> = family.iter().map(key).collect();
        for a in &family {
            for b in &family {
                let union: Vec<MessageLabel> = {
                    let mut u = a.clone();
                    for m in b {
                        if !u.contains(m) {
                            u.push(m.clone());
                        }
                    }
                    u
                };
                let inter: Vec<MessageLabel> =
                    a.iter().filter(|m| b.contains(m)).cloned().collect();
                prop_assert!(keys.contains(&key(&union)));
                prop_assert!(keys.contains(&key(&inter)));
            }
        }
    }

    #[test]
    fn region_constraint_count_matches_family(masks in tx_sets(4, 8)) {
        let labels: Vec<MessageLabel> =
            masks.iter().map(|&m| mask_to_label(m, &[1])).collect();
        let nonempty = enumerate_right_sided(&labels).unwrap().len() - 1;
        let constraints = maccm_region_constraints(&labels, false).unwrap();
        prop_assert_eq!(constraints.len(), nonempty);
        let han = maccm_region_constraints(&labels, true).unwrap();
        prop_assert_eq!(han.len(), (1usize << labels.len()) - 1);
    }

    #[test]
    fn kept_messages_form_a_maximal_antichain(masks in tx_sets(5, 10)) {
        let labels: Vec<MessageLabel> =
            masks.iter().map(|&m| mask_to_label(m, &[1])).collect();
        let kept = maccm_sumrate_messages(&labels);
        for a in &kept {
            for b in &kept {
                prop_assert!(!is_satellite(a, b));
            }
        }
        for dropped in labels.iter().filter(|m| !kept.contains(m)) {
            prop_assert!(kept.iter().any(|k| is_satellite(dropped, k)));
        }
    }

    #[test]
    fn graph_paths_follow_subsets(masks in tx_sets(5, 9)) {
        let labels: Vec<MessageLabel> =
            masks.iter().map(|&m| mask_to_label(m, &[1])).collect();
        let graph = build_message_graph(&labels, 5).unwrap();
        for a in 0..graph.nodes.len() {
            for b in 0..graph.nodes.len() {
                if a == b {
                    continue;
                }
                prop_assert_eq!(
                    graph.has_path(a, b),
                    graph.nodes[b].tx.is_strict_subset(&graph.nodes[a].tx)
                );
            }
        }
    }

    #[test]
    fn prune_pipeline_invariants(spec in arbitrary_spec()) {
        let order = spec.effective_order();
        let report = degraded_prune(&spec, &order).unwrap();

        // Exactly one survivor per nonempty transmitter-set group.
        let views = derive_views(&spec);
        prop_assert_eq!(report.group_choices.len(), views.groups.len());
        for group in views.groups.values() {
            let survivors = group
                .iter()
                .filter(|m| report.m_tilde.contains(m))
                .count();
            prop_assert_eq!(survivors, 1);
        }

        // Kept within survivors within the message set.
        for m in &report.m_star {
            prop_assert!(report.m_tilde.contains(m));
        }
        for m in &report.m_tilde {
            prop_assert!(spec.messages.contains(m));
        }

        // The partition covers the survivors disjointly.
        let total: usize = report.m_arrow_y.iter().map(|s| s.labels.len()).sum();
        prop_assert_eq!(total, report.m_tilde.len());

        // Kept messages are not satellites of anything decodable at their
        // position or earlier; dropped ones are.
        let position = |j: usize| order.iter().position(|&r| r == j).unwrap() + 1;
        let weakest =
            |m: &MessageLabel| m.rx.iter().map(position).max().unwrap();
        for p in 1..=spec.k2 {
            let pool: Vec<&MessageLabel> = report
                .m_tilde
                .iter()
                .filter(|c| weakest(c) <= p)
                .collect();
            for m in &report.m_star_y[p - 1].labels {
                prop_assert!(!pool.iter().any(|c| is_satellite(m, c)));
            }
            for m in &report.m_cross_y[p - 1].labels {
                prop_assert!(pool.iter().any(|c| is_satellite(m, c)));
            }
        }

        // The expression's info lists partition the kept set.
        let expr = sumrate_expression(&spec, &order, SumRateMode::Pruned).unwrap();
        let mut seen: Vec<VarRef> = Vec::new();
        for t in &expr.terms {
            for v in &t.info {
                prop_assert!(!seen.contains(v));
                seen.push(v.clone());
            }
        }
        prop_assert_eq!(seen.len(), report.m_star.len());
    }

    #[test]
    fn single_group_prune_matches_selector(
        rx_masks in prop::collection::btree_set(1u32..8, 1..=4)
    ) {
        let messages: Vec<MessageLabel> = rx_masks
            .iter()
            .map(|&rx| {
                let rx: Vec<usize> =
                    (0..3).filter(|b| rx & (1 << b) != 0).map(|b| b + 1).collect();
                MessageLabel::new([1], rx)
            })
            .collect();
        let spec = NetworkSpec {
            k1: 1,
            k2: 3,
            messages: messages.clone(),
            channel: None,
            order: None,
        };
        let report = degraded_prune(&spec, &[1, 2, 3]).unwrap();
        let (_, chosen) = bccm_sumrate_selector(&messages, &[1, 2, 3]).unwrap();
        prop_assert_eq!(report.m_star, vec![chosen]);
    }

    #[test]
    fn psi_monotone_and_concave(xs in prop::collection::vec(0.0f64..100.0, 3)) {
        let mut xs = xs;
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert!(psi(xs[0]) <= psi(xs[1]) + 1e-12);
        prop_assert!(psi(xs[1]) <= psi(xs[2]) + 1e-12);
        // Midpoint concavity.
        let mid = 0.5 * (xs[0] + xs[2]);
        prop_assert!(psi(mid) + 1e-12 >= 0.5 * (psi(xs[0]) + psi(xs[2])));
        prop_assert_eq!(psi(0.0), 0.0);
    }

    #[test]
    fn mutual_information_matches_conditional_entropy_route(
        raw in prop::collection::vec(0.01f64..1.0, 16)
    ) {
        // Three binary variables A, B, C with a random joint.
        let total: f64 = raw.iter().take(8).sum();
        let probs: Vec<f64> = raw.iter().take(8).map(|v| v / total).collect();
        let joint = JointPMF::new(
            vec![("A".into(), 2), ("B".into(), 2), ("C".into(), 2)],
            probs.clone(),
        )
        .unwrap();
        let mi = joint.mutual_information(&["A"], &["B"], &["C"]).unwrap();

        // Independent route: H(A|C) - H(A|B,C) from explicit conditionals.
        let p = |a: usize, b: usize, c: usize| probs[a * 4 + b * 2 + c];
        let mut h_a_c = 0.0;
        for c in 0..2 {
            let pc: f64 = (0..2).flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| p(a, b, c)).sum();
            for a in 0..2 {
                let pac: f64 = (0..2).map(|b| p(a, b, c)).sum();
                if pac > 0.0 {
                    h_a_c -= pac * (pac / pc).log2();
                }
            }
        }
        let mut h_a_bc = 0.0;
        for b in 0..2 {
            for c in 0..2 {
                let pbc: f64 = (0..2).map(|a| p(a, b, c)).sum();
                for a in 0..2 {
                    if p(a, b, c) > 0.0 {
                        h_a_bc -= p(a, b, c) * (p(a, b, c) / pbc).log2();
                    }
                }
            }
        }
        prop_assert!((mi - (h_a_c - h_a_bc)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn closed_forms_equal_covariance_integrand(
        alpha in 0.0f64..1.0,
        beta in 0.0f64..1.0,
        p4 in 0.0f64..5.0,
    ) {
        let (alpha, beta) = if alpha * alpha + beta * beta > 1.0 {
            let norm = (alpha * alpha + beta * beta).sqrt();
            (alpha / norm, beta / norm)
        } else {
            (alpha, beta)
        };
        let params = FourByThreeParams {
            a: [1.0, -0.5, 1.2, 0.8],
            b2: 1.4,
            b3: 1.1,
            p: [2.0, 1.0, 0.5, p4],
        };
        let expr = ifnet::expr::RateExpression {
            terms: FourByThreeParams::input_form_terms(),
            law: ifnet::expr::FactorizationLaw {
                time_share: false,
                independent: vec![],
                encoders: vec![],
            },
        };
        let closed = params.objective(alpha, beta);
        let cov = evaluate_gaussian_expr(
            &expr,
            &params.parameterization(alpha, beta),
            &params.channel(),
        )
        .unwrap();
        prop_assert!((closed - cov).abs() < 1e-9, "{closed} vs {cov}");
    }

    #[test]
    fn capacities_nondecreasing_in_power(p in 0.1f64..5.0, extra in 0.1f64..5.0) {
        let mk4 = |p4: f64| FourByThreeParams {
            a: [1.0, 0.7, 1.3, 0.9],
            b2: 1.2,
            b3: 1.5,
            p: [1.0, 2.0, 1.0, p4],
        };
        prop_assert!(
            prop4_capacity(&mk4(p + extra)).unwrap().value
                >= prop4_capacity(&mk4(p)).unwrap().value - 1e-9
        );
        let mk5 = |p1: f64| TwoByTwoParams {
            a: 3.0,
            b: 1.0 / 3.0,
            p1,
            p2: 0.5,
        };
        prop_assert!(
            prop5_capacity(&mk5(p + extra)).unwrap().value
                >= prop5_capacity(&mk5(p)).unwrap().value - 1e-9
        );
    }
}
