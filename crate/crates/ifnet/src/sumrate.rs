//! Sum-rate machinery: capacity-region constraints for single-receiver
//! networks, sum-rate message selection for both network halves, and the
//! degraded-network pruning pipeline with its successive-decoding expression.
//!
//! The pipeline runs in four steps. First, inside each group of messages
//! sharing a transmitter set, only the message aimed at the strongest
//! feasible receiver survives. Second, the survivors are partitioned by their
//! weakest decoding receiver. Third, each part drops every message that is a
//! satellite of a survivor decoded at that receiver or earlier. Last, the
//! kept messages form the transmission set and the per-receiver chain of the
//! sum-rate expression.

use crate::error::{Error, Result};
use crate::expr::{
    canonical_vars, EncoderFactor, FactorizationLaw, MITerm, OutputRef, RateExpression,
    RegionConstraint, VarRef,
};
use crate::graph::{enumerate_right_sided_capped, is_satellite, RIGHT_SIDED_CAP};
use crate::net::{validate_order, MessageLabel, NetworkSpec};
use crate::set::IdxSet;
use serde::Serialize;

/// Capacity-region constraints of a single-receiver network.
///
/// One constraint per nonempty right-sided subset `Ω`:
/// `R_ΣΩ <= I(Ω; Y | M - Ω, Q)`. The Han variant instead ranges over every
/// nonempty subset, one constraint each.
pub fn maccm_region_constraints(
    labels: &[MessageLabel],
    han_variant: bool,
) -> Result<Vec<RegionConstraint>> {
    for m in labels {
        if m.rx.len() != 1 {
            return Err(Error::MultiReceiverLabel(m.rx.to_string()));
        }
    }
    let receiver = labels.first().map_or(1, |m| m.rx.as_slice()[0]);
    let omegas: Vec<Vec<MessageLabel>> = if han_variant {
        if labels.len() > RIGHT_SIDED_CAP {
            return Err(Error::LabelCapExceeded {
                count: labels.len(),
                cap: RIGHT_SIDED_CAP,
            });
        }
        let n = labels.len();
        let mut subsets = Vec::with_capacity(1 << n);
        for mask in 0u32..(1u32 << n) {
            subsets.push(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| labels[i].clone())
                    .collect(),
            );
        }
        subsets
    } else {
        enumerate_right_sided_capped(labels, RIGHT_SIDED_CAP)?
    };
    let mut out = Vec::new();
    for omega in omegas {
        if omega.is_empty() {
            continue;
        }
        let rest: Vec<VarRef> = labels
            .iter()
            .filter(|m| !omega.contains(m))
            .map(|m| VarRef::Message(m.clone()))
            .collect();
        let mut given = canonical_vars(&rest);
        given.push(VarRef::TimeShare);
        let info = canonical_vars(
            &omega
                .iter()
                .map(|m| VarRef::Message(m.clone()))
                .collect::<Vec<_>>(),
        );
        let rate_sum: Vec<MessageLabel> = info
            .iter()
            .map(|v| match v {
                VarRef::Message(m) => m.clone(),
                _ => unreachable!(),
            })
            .collect();
        out.push(RegionConstraint {
            rate_sum,
            rhs: vec![MITerm::new(info, OutputRef::Receiver(receiver), given)],
        });
    }
    // Deterministic report order: fewest rates first, then lexicographic.
    out.sort_by(|a, b| {
        a.rate_sum
            .len()
            .cmp(&b.rate_sum.len())
            .then_with(|| a.rate_sum.cmp(&b.rate_sum))
    });
    Ok(out)
}

/// Messages that must be kept to achieve the sum-rate of a single-receiver
/// network: the labels with no strict transmitter-set superset present.
/// Scanned column by column from the widest down; the result is an antichain.
pub fn maccm_sumrate_messages(labels: &[MessageLabel]) -> Vec<MessageLabel> {
    let mut sorted = labels.to_vec();
    sorted.sort_by(|a, b| b.tx.len().cmp(&a.tx.len()).then_with(|| a.tx.cmp(&b.tx)));
    let mut kept: Vec<MessageLabel> = Vec::new();
    for m in sorted {
        if !kept.iter().any(|k| m.tx.is_strict_subset(&k.tx)) {
            kept.push(m);
        }
    }
    kept
}

/// Position (1-based, strongest first) of receiver `j` under `order`.
fn position(order: &[usize], j: usize) -> usize {
    order.iter().position(|&r| r == j).expect("receiver in order") + 1
}

/// Weakest decoding position of a label under `order`.
fn weakest_position(order: &[usize], m: &MessageLabel) -> usize {
    m.rx.iter().map(|j| position(order, j)).max().unwrap_or(0)
}

/// Single-transmitter selector: the sum-rate of a degraded broadcast network
/// is carried by one message, the one whose weakest receiver is strongest.
///
/// Returns `(theta, label)` where `theta` is the 1-based position of that
/// weakest receiver under `order` (strongest first). Ties go to the first
/// label in declaration order.
pub fn bccm_sumrate_selector(
    labels: &[MessageLabel],
    order: &[usize],
) -> Result<(usize, MessageLabel)> {
    if labels.is_empty() {
        return Err(Error::NoMessages);
    }
    for m in labels {
        if m.tx.len() != 1 || m.tx != labels[0].tx {
            return Err(Error::MultiTransmitterLabel(m.tx.to_string()));
        }
    }
    let k2 = order.len();
    for m in labels {
        if m.rx.upper() > k2 {
            return Err(Error::IndexOutOfRange {
                kind: "receiver",
                index: m.rx.upper(),
                limit: k2,
            });
        }
    }
    let theta = labels
        .iter()
        .map(|m| weakest_position(order, m))
        .min()
        .unwrap();
    let chosen = labels
        .iter()
        .find(|m| weakest_position(order, m) == theta)
        .unwrap();
    Ok((theta, chosen.clone()))
}

/// All intermediate sets of the pruning pipeline. Per-receiver vectors are
/// indexed by position under `order` (strongest first); entry `p` also
/// records which receiver sits at that position.
#[derive(Clone, Debug, Serialize)]
pub struct PruneReport {
    /// Receiver order used, strongest first.
    pub order: Vec<usize>,
    /// Per transmitter set: weakest-feasible position and the survivor.
    pub group_choices: Vec<GroupChoice>,
    /// One survivor per nonempty group, in declaration order.
    pub m_tilde: Vec<MessageLabel>,
    /// Survivors decoded by the receiver at each position.
    pub m_tilde_y: Vec<ReceiverSet>,
    /// Partition of the survivors by weakest decoding position.
    pub m_arrow_y: Vec<ReceiverSet>,
    /// Kept part of each cell of the partition.
    pub m_star_y: Vec<ReceiverSet>,
    /// Dropped (satellite) part of each cell.
    pub m_cross_y: Vec<ReceiverSet>,
    /// Union of the kept parts: the messages actually transmitted.
    pub m_star: Vec<MessageLabel>,
    /// `m_star_x[i-1]` = kept messages carried by transmitter `i`.
    pub m_star_x: Vec<Vec<MessageLabel>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupChoice {
    pub tx: IdxSet,
    pub theta: usize,
    pub chosen: MessageLabel,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReceiverSet {
    pub position: usize,
    pub receiver: usize,
    pub labels: Vec<MessageLabel>,
}

/// Run the full pruning pipeline for a degraded network under `order`
/// (strongest receiver first).
pub fn degraded_prune(spec: &NetworkSpec, order: &[usize]) -> Result<PruneReport> {
    validate_order(order, spec.k2)?;
    let k2 = spec.k2;

    // Step 1: one survivor per transmitter-set group, aimed at the strongest
    // feasible weakest-receiver position. Ties resolved by declaration order.
    let mut group_keys: Vec<IdxSet> = Vec::new();
    for m in &spec.messages {
        if !group_keys.contains(&m.tx) {
            group_keys.push(m.tx.clone());
        }
    }
    group_keys.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut group_choices = Vec::new();
    let mut m_tilde: Vec<MessageLabel> = Vec::new();
    for key in &group_keys {
        let group: Vec<&MessageLabel> = spec.messages.iter().filter(|m| m.tx == *key).collect();
        let theta = group
            .iter()
            .map(|m| weakest_position(order, m))
            .min()
            .unwrap();
        let chosen = group
            .iter()
            .find(|m| weakest_position(order, m) == theta)
            .unwrap();
        group_choices.push(GroupChoice {
            tx: key.clone(),
            theta,
            chosen: (*chosen).clone(),
        });
    }
    // Survivors listed in declaration order.
    for m in &spec.messages {
        if group_choices.iter().any(|g| g.chosen == *m) {
            m_tilde.push(m.clone());
        }
    }

    let receiver_at = |p: usize| order[p - 1];
    let m_tilde_y: Vec<ReceiverSet> = (1..=k2)
        .map(|p| ReceiverSet {
            position: p,
            receiver: receiver_at(p),
            labels: m_tilde
                .iter()
                .filter(|m| m.rx.contains(receiver_at(p)))
                .cloned()
                .collect(),
        })
        .collect();

    // Step 2: partition by weakest decoding position.
    let m_arrow_y: Vec<ReceiverSet> = (1..=k2)
        .map(|p| ReceiverSet {
            position: p,
            receiver: receiver_at(p),
            labels: m_tilde
                .iter()
                .filter(|m| weakest_position(order, m) == p)
                .cloned()
                .collect(),
        })
        .collect();

    // Step 3: within each part, drop every satellite of a survivor that is
    // decoded at this position or a stronger one (weakest position <= p).
    let mut m_star_y = Vec::new();
    let mut m_cross_y = Vec::new();
    for p in 1..=k2 {
        let pool: Vec<&MessageLabel> = m_tilde
            .iter()
            .filter(|c| weakest_position(order, c) <= p)
            .collect();
        let (kept, dropped): (Vec<MessageLabel>, Vec<MessageLabel>) = m_arrow_y[p - 1]
            .labels
            .iter()
            .cloned()
            .partition(|m| !pool.iter().any(|c| is_satellite(m, c)));
        m_star_y.push(ReceiverSet {
            position: p,
            receiver: receiver_at(p),
            labels: kept,
        });
        m_cross_y.push(ReceiverSet {
            position: p,
            receiver: receiver_at(p),
            labels: dropped,
        });
    }

    // Step 4: assemble the transmission set and per-transmitter views.
    let m_star: Vec<MessageLabel> = m_tilde
        .iter()
        .filter(|m| m_star_y.iter().any(|s| s.labels.contains(m)))
        .cloned()
        .collect();
    let m_star_x: Vec<Vec<MessageLabel>> = (1..=spec.k1)
        .map(|i| m_star.iter().filter(|m| m.tx.contains(i)).cloned().collect())
        .collect();

    Ok(PruneReport {
        order: order.to_vec(),
        group_choices,
        m_tilde,
        m_tilde_y,
        m_arrow_y,
        m_star_y,
        m_cross_y,
        m_star,
        m_star_x,
    })
}

/// Which message sets feed the successive-decoding chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumRateMode {
    /// Pruned sets: the exact sum-rate of a degraded network.
    Pruned,
    /// Full per-receiver sets: the unpruned outer-bound chain.
    Full,
}

fn sorted_labels(labels: &[MessageLabel]) -> Vec<VarRef> {
    canonical_vars(
        &labels
            .iter()
            .map(|m| VarRef::Message(m.clone()))
            .collect::<Vec<_>>(),
    )
}

/// Build the successive-decoding chain over per-position message sets,
/// optionally against virtual (suffix-tuple) outputs.
pub(crate) fn chain_expression(
    sets: &[Vec<MessageLabel>],
    order: &[usize],
    virtual_outputs: bool,
    time_share: bool,
) -> Vec<MITerm> {
    let k2 = order.len();
    let mut terms = Vec::new();
    for p in 1..=k2 {
        // Anything decoded again by a weaker receiver conditions this term;
        // its rate is counted where it is decoded last.
        let mut given = Vec::new();
        for later in (p + 1)..=k2 {
            for g in sorted_labels(&sets[later - 1]) {
                if !given.contains(&g) {
                    given.push(g);
                }
            }
        }
        let info: Vec<VarRef> = sorted_labels(&sets[p - 1])
            .into_iter()
            .filter(|v| !given.contains(v))
            .collect();
        if info.is_empty() {
            continue;
        }
        if time_share {
            given.push(VarRef::TimeShare);
        }
        let output = if virtual_outputs {
            OutputRef::Tuple(order[p - 1..].to_vec())
        } else {
            OutputRef::Receiver(order[p - 1])
        };
        terms.push(MITerm::new(info, output, given));
    }
    terms
}

pub(crate) fn law_over(
    messages: &[MessageLabel],
    k1: usize,
    time_share: bool,
) -> FactorizationLaw {
    let independent = sorted_labels(messages);
    let encoders = (1..=k1)
        .map(|i| EncoderFactor {
            input: i,
            given: sorted_labels(
                &messages
                    .iter()
                    .filter(|m| m.tx.contains(i))
                    .cloned()
                    .collect::<Vec<_>>(),
            ),
        })
        .collect();
    FactorizationLaw {
        time_share,
        independent,
        encoders,
    }
}

/// The sum-rate expression of a degraded network under `order`.
///
/// `Pruned` mode emits the exact-capacity chain over the pruning pipeline's
/// kept sets; `Full` mode emits the same chain shape over the unpruned
/// per-receiver sets. The time-share variable is kept only for
/// cost-constrained (Gaussian) networks.
pub fn sumrate_expression(
    spec: &NetworkSpec,
    order: &[usize],
    mode: SumRateMode,
) -> Result<RateExpression> {
    validate_order(order, spec.k2)?;
    let time_share = spec.keeps_time_share();
    match mode {
        SumRateMode::Pruned => {
            let report = degraded_prune(spec, order)?;
            let sets: Vec<Vec<MessageLabel>> = report
                .m_star_y
                .iter()
                .map(|s| s.labels.clone())
                .collect();
            Ok(RateExpression {
                terms: chain_expression(&sets, order, false, time_share),
                law: law_over(&report.m_star, spec.k1, time_share),
            })
        }
        SumRateMode::Full => {
            let sets: Vec<Vec<MessageLabel>> = (1..=spec.k2)
                .map(|p| {
                    let j = order[p - 1];
                    spec.messages
                        .iter()
                        .filter(|m| m.rx.contains(j))
                        .cloned()
                        .collect()
                })
                .collect();
            Ok(RateExpression {
                terms: chain_expression(&sets, order, false, time_share),
                law: law_over(&spec.messages, spec.k1, time_share),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::parse_network_spec;

    fn mac(tx: &[usize]) -> MessageLabel {
        MessageLabel::new(tx, [1])
    }

    fn bc(rx: &[usize]) -> MessageLabel {
        MessageLabel::new([1], rx)
    }

    /// Worked four-transmitter example used throughout the module docs:
    /// `M = {M_{1,2,3}, M_{2,4}, M_{1,2}, M_{3}}`.
    fn worked_maccm() -> Vec<MessageLabel> {
        vec![mac(&[1, 2, 3]), mac(&[2, 4]), mac(&[1, 2]), mac(&[3])]
    }

    #[test]
    fn two_user_region() {
        let labels = vec![mac(&[1, 2]), mac(&[1]), mac(&[2])];
        let cs = maccm_region_constraints(&labels, false).unwrap();
        let rendered: Vec<String> = cs.iter().map(|c| c.render()).collect();
        assert_eq!(
            rendered,
            vec![
                "R_{1} <= I(M_{1}^{1}; Y_1 | M_{1,2}^{1}, M_{2}^{1}, Q)",
                "R_{2} <= I(M_{2}^{1}; Y_1 | M_{1,2}^{1}, M_{1}^{1}, Q)",
                "R_{1} + R_{2} <= I(M_{1}^{1}, M_{2}^{1}; Y_1 | M_{1,2}^{1}, Q)",
                "R_{1,2} + R_{1} + R_{2} <= I(M_{1,2}^{1}, M_{1}^{1}, M_{2}^{1}; Y_1 | Q)",
            ]
        );
    }

    #[test]
    fn worked_region_has_nine_constraints() {
        let cs = maccm_region_constraints(&worked_maccm(), false).unwrap();
        assert_eq!(cs.len(), 9);
    }

    #[test]
    fn han_region_counts_all_subsets() {
        let labels = vec![mac(&[1, 2]), mac(&[1]), mac(&[2])];
        let cs = maccm_region_constraints(&labels, true).unwrap();
        assert_eq!(cs.len(), 7);
    }

    #[test]
    fn single_message_region() {
        let cs = maccm_region_constraints(&[mac(&[1])], false).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].render(), "R_{1} <= I(M_{1}^{1}; Y_1 | Q)");
    }

    #[test]
    fn region_rejects_multi_receiver() {
        let err = maccm_region_constraints(&[MessageLabel::new([1], [1, 2])], false).unwrap_err();
        assert!(matches!(err, Error::MultiReceiverLabel(_)));
    }

    #[test]
    fn sumrate_messages_keep_maximal() {
        let kept = maccm_sumrate_messages(&worked_maccm());
        assert_eq!(kept, vec![mac(&[1, 2, 3]), mac(&[2, 4])]);
        assert_eq!(
            maccm_sumrate_messages(&[mac(&[1, 2]), mac(&[1]), mac(&[2])]),
            vec![mac(&[1, 2])]
        );
        assert_eq!(
            maccm_sumrate_messages(&[mac(&[1]), mac(&[2])]),
            vec![mac(&[1]), mac(&[2])]
        );
    }

    #[test]
    fn bccm_selector() {
        let (theta, chosen) = bccm_sumrate_selector(&[bc(&[1, 3]), bc(&[2])], &[1, 2, 3]).unwrap();
        assert_eq!(theta, 2);
        assert_eq!(chosen, bc(&[2]));

        let (theta, chosen) =
            bccm_sumrate_selector(&[bc(&[1, 2]), bc(&[1]), bc(&[2])], &[1, 2]).unwrap();
        assert_eq!(theta, 1);
        assert_eq!(chosen, bc(&[1]));

        let (theta, _) = bccm_sumrate_selector(&[bc(&[2, 3])], &[1, 2, 3]).unwrap();
        assert_eq!(theta, 3);
    }

    #[test]
    fn bccm_selector_rejects_empty_and_multi_tx() {
        assert!(matches!(
            bccm_sumrate_selector(&[], &[1]),
            Err(Error::NoMessages)
        ));
        assert!(matches!(
            bccm_sumrate_selector(&[MessageLabel::new([1, 2], [1])], &[1]),
            Err(Error::MultiTransmitterLabel(_))
        ));
    }

    /// 4-transmitter / 3-receiver worked network; message declaration order
    /// matters for the tie-breaks, so keep it fixed.
    pub(crate) fn worked_network() -> NetworkSpec {
        parse_network_spec(
            r#"{"k1":4,"k2":3,"messages":[
                {"tx":[1,2,4],"rx":[3]},{"tx":[1,2,4],"rx":[1,3]},{"tx":[1,2,4],"rx":[2,3]},
                {"tx":[1,2],"rx":[2,3]},{"tx":[1,2],"rx":[1,3]},
                {"tx":[3,4],"rx":[1,2]},{"tx":[3,4],"rx":[1,3]},{"tx":[3,4],"rx":[2,3]},
                {"tx":[1],"rx":[1,3]},{"tx":[1],"rx":[2,3]},
                {"tx":[2],"rx":[3]},{"tx":[2],"rx":[1,3]},
                {"tx":[3],"rx":[3]},{"tx":[3],"rx":[2,3]},
                {"tx":[4],"rx":[1]},{"tx":[4],"rx":[2]},{"tx":[4],"rx":[1,2]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn worked_prune_pipeline() {
        let spec = worked_network();
        let report = degraded_prune(&spec, &[1, 2, 3]).unwrap();

        let tilde: Vec<String> = report.m_tilde.iter().map(|m| m.render()).collect();
        assert_eq!(
            tilde,
            vec![
                "M_{1,2,4}^{3}",
                "M_{1,2}^{2,3}",
                "M_{3,4}^{1,2}",
                "M_{1}^{1,3}",
                "M_{2}^{3}",
                "M_{3}^{3}",
                "M_{4}^{1}"
            ]
        );

        let by_rx: Vec<Vec<String>> = report
            .m_tilde_y
            .iter()
            .map(|s| s.labels.iter().map(|m| m.render()).collect())
            .collect();
        assert_eq!(
            by_rx,
            vec![
                vec!["M_{3,4}^{1,2}", "M_{1}^{1,3}", "M_{4}^{1}"],
                vec!["M_{1,2}^{2,3}", "M_{3,4}^{1,2}"],
                vec![
                    "M_{1,2,4}^{3}",
                    "M_{1,2}^{2,3}",
                    "M_{1}^{1,3}",
                    "M_{2}^{3}",
                    "M_{3}^{3}"
                ],
            ]
        );

        let arrow: Vec<Vec<String>> = report
            .m_arrow_y
            .iter()
            .map(|s| s.labels.iter().map(|m| m.render()).collect())
            .collect();
        assert_eq!(
            arrow,
            vec![
                vec!["M_{4}^{1}"],
                vec!["M_{3,4}^{1,2}"],
                vec![
                    "M_{1,2,4}^{3}",
                    "M_{1,2}^{2,3}",
                    "M_{1}^{1,3}",
                    "M_{2}^{3}",
                    "M_{3}^{3}"
                ],
            ]
        );

        let star: Vec<String> = report.m_star.iter().map(|m| m.render()).collect();
        assert_eq!(star, vec!["M_{1,2,4}^{3}", "M_{3,4}^{1,2}", "M_{4}^{1}"]);
    }

    #[test]
    fn worked_sumrate_expression() {
        let spec = worked_network();
        let expr = sumrate_expression(&spec, &[1, 2, 3], SumRateMode::Pruned).unwrap();
        // Symbolic spec: the time-share variable is dropped. Re-render with
        // it for the cost-constrained form checked in the acceptance suite.
        assert_eq!(
            expr.render(),
            "I(M_{4}^{1}; Y_1 | M_{3,4}^{1,2}, M_{1,2,4}^{3}) + \
             I(M_{3,4}^{1,2}; Y_2 | M_{1,2,4}^{3}) + \
             I(M_{1,2,4}^{3}; Y_3)"
        );
        assert_eq!(
            expr.law.render(),
            "P_{M_{1,2,4}^{3}} P_{M_{3,4}^{1,2}} P_{M_{4}^{1}} \
             P_{X_1|M_{1,2,4}^{3}} P_{X_2|M_{1,2,4}^{3}} P_{X_3|M_{3,4}^{1,2}} \
             P_{X_4|M_{1,2,4}^{3},M_{3,4}^{1,2},M_{4}^{1}}"
        );
    }

    #[test]
    fn cic_chain() {
        let spec = parse_network_spec(
            r#"{"k1":3,"k2":3,"messages":[
                {"tx":[1],"rx":[1]},{"tx":[2],"rx":[2]},{"tx":[3],"rx":[3]}]}"#,
        )
        .unwrap();
        let report = degraded_prune(&spec, &[1, 2, 3]).unwrap();
        assert_eq!(report.m_star.len(), 3);
        let expr = sumrate_expression(&spec, &[1, 2, 3], SumRateMode::Pruned).unwrap();
        assert_eq!(
            expr.render(),
            "I(M_{1}^{1}; Y_1 | M_{2}^{2}, M_{3}^{3}) + I(M_{2}^{2}; Y_2 | M_{3}^{3}) + I(M_{3}^{3}; Y_3)"
        );
    }

    #[test]
    fn common_message_2x2_keeps_all_messages() {
        // Both transmitters send private messages to the strong receiver and
        // a cooperative message to the weak one; nothing can be pruned, and
        // the auxiliary (common) message survives into the expression.
        let spec = parse_network_spec(
            r#"{"k1":2,"k2":2,"messages":[
                {"tx":[1,2],"rx":[2]},{"tx":[1],"rx":[1]},{"tx":[2],"rx":[1]}],
                "gaussian":{"gains":[[1.0,15.0],[0.066666666667,1.0]],
                            "powers":[200.0,1.0]}}"#,
        )
        .unwrap();
        let report = degraded_prune(&spec, &[1, 2]).unwrap();
        assert_eq!(report.m_star.len(), 3);
        let expr = sumrate_expression(&spec, &[1, 2], SumRateMode::Pruned).unwrap();
        assert_eq!(
            expr.render(),
            "I(M_{1}^{1}, M_{2}^{1}; Y_1 | M_{1,2}^{2}, Q) + I(M_{1,2}^{2}; Y_2 | Q)"
        );
        assert_eq!(
            expr.law.render(),
            "P_{Q} P_{M_{1,2}^{2}} P_{M_{1}^{1}} P_{M_{2}^{1}} \
             P_{X_1|M_{1,2}^{2},M_{1}^{1},Q} P_{X_2|M_{1,2}^{2},M_{2}^{1},Q}"
        );
    }

    #[test]
    fn bccm_prune_degenerates_to_selector() {
        let spec = parse_network_spec(
            r#"{"k1":1,"k2":3,"messages":[
                {"tx":[1],"rx":[1,3]},{"tx":[1],"rx":[2]}]}"#,
        )
        .unwrap();
        let order = [1, 2, 3];
        let report = degraded_prune(&spec, &order).unwrap();
        let (_, chosen) = bccm_sumrate_selector(&spec.messages, &order).unwrap();
        assert_eq!(report.m_star, vec![chosen]);
    }

    #[test]
    fn prune_invariants_hold() {
        let spec = worked_network();
        let report = degraded_prune(&spec, &[1, 2, 3]).unwrap();
        // Exactly one survivor per nonempty transmitter-set group.
        assert_eq!(report.group_choices.len(), report.m_tilde.len());
        // The partition cells are disjoint and cover the survivors.
        let total: usize = report.m_arrow_y.iter().map(|s| s.labels.len()).sum();
        assert_eq!(total, report.m_tilde.len());
        // Kept and dropped split each cell.
        for p in 0..spec.k2 {
            assert_eq!(
                report.m_star_y[p].labels.len() + report.m_cross_y[p].labels.len(),
                report.m_arrow_y[p].labels.len()
            );
        }
    }

    #[test]
    fn expression_partitions_kept_messages() {
        let spec = worked_network();
        let report = degraded_prune(&spec, &[1, 2, 3]).unwrap();
        let expr = sumrate_expression(&spec, &[1, 2, 3], SumRateMode::Pruned).unwrap();
        let mut seen = Vec::new();
        for t in &expr.terms {
            for v in &t.info {
                assert!(!seen.contains(v));
                seen.push(v.clone());
            }
        }
        assert_eq!(seen.len(), report.m_star.len());
    }
}
