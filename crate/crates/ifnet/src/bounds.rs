//! Unified outer bounds for arbitrary (non-degraded) networks.
//!
//! Grouping the receivers behind suffix tuples turns any network into a
//! degraded virtual one, so the successive-decoding chain over the pruned
//! message sets bounds the sum rate for every receiver order. The same idea
//! applied per message subset yields capacity-region constraint sets, and a
//! collection of structure classifiers recognizes regimes where the bounds
//! are tight.

use crate::error::{Error, Result};
use crate::expr::{
    canonical_vars, EncoderFactor, FactorizationLaw, MITerm, OutputRef, RateExpression, VarRef,
};
use crate::net::{validate_order, ChannelPayload, MessageLabel, NetworkSpec};
use crate::oracle::{chain_factorization_holds, ChainFactor};
use crate::set::IdxSet;
use crate::sumrate::{degraded_prune, maccm_sumrate_messages, sumrate_expression, SumRateMode};
use serde::Serialize;

/// Cap on full receiver-order enumeration (k2! growth).
pub const ORDER_ENUM_CAP: usize = 6;
/// Cap on message-subset enumeration in region bounds.
pub const MESSAGE_CAP: usize = 20;

/// A suffix tuple of receivers acting as one stronger virtual receiver.
#[derive(Clone, Debug, Serialize)]
pub struct VirtualReceiver {
    /// 1-based position under the order.
    pub position: usize,
    /// Receiver indices of the tuple, strongest first.
    pub components: Vec<usize>,
}

/// Virtual receivers of an order: position `p` observes the suffix starting
/// at `p`.
pub fn virtual_receivers(order: &[usize]) -> Vec<VirtualReceiver> {
    (1..=order.len())
        .map(|p| VirtualReceiver {
            position: p,
            components: order[p - 1..].to_vec(),
        })
        .collect()
}

/// Sum-rate outer bound for an arbitrary network under `order`: the pruning
/// pipeline runs on the virtual degraded network, and each chain term
/// observes the suffix tuple at its position.
pub fn sumrate_outer_bound(spec: &NetworkSpec, order: &[usize]) -> Result<RateExpression> {
    validate_order(order, spec.k2)?;
    let time_share = spec.keeps_time_share();
    let report = degraded_prune(spec, order)?;
    let sets: Vec<Vec<MessageLabel>> = report.m_star_y.iter().map(|s| s.labels.clone()).collect();
    Ok(RateExpression {
        terms: crate::sumrate::chain_expression(&sets, order, true, time_share),
        law: crate::sumrate::law_over(&report.m_star, spec.k1, time_share),
    })
}

/// Transmitter grouping of a multiple-access-interference network: group `j`
/// serves receiver `j` only.
#[derive(Clone, Debug, Serialize)]
pub struct MainStructure {
    /// `groups[j-1]` = transmitters serving receiver `j`.
    pub groups: Vec<IdxSet>,
    /// When set, each chain term collapses its virtual tuple to the single
    /// receiver (valid under the per-receiver Markov conditions).
    pub markov_collapse: bool,
}

/// Derive the transmitter grouping from the messages: every message must aim
/// at a single receiver and the groups must partition the transmitters.
pub fn main_structure(spec: &NetworkSpec, markov_collapse: bool) -> Result<MainStructure> {
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); spec.k2];
    for m in &spec.messages {
        if m.rx.len() != 1 {
            return Err(Error::BadStructure(format!(
                "message {} is decoded by several receivers",
                m.render()
            )));
        }
        let j = m.rx.as_slice()[0];
        for i in m.tx.iter() {
            for (other, g) in groups.iter().enumerate() {
                if other + 1 != j && g.contains(&i) {
                    return Err(Error::BadStructure(format!(
                        "transmitter {i} serves receivers {} and {j}",
                        other + 1
                    )));
                }
            }
            if !groups[j - 1].contains(&i) {
                groups[j - 1].push(i);
            }
        }
    }
    let covered: usize = groups.iter().map(|g| g.len()).sum();
    if covered != spec.k1 || groups.iter().any(|g| g.is_empty()) {
        return Err(Error::BadStructure(
            "transmitter groups must partition the transmitters with every receiver served"
                .into(),
        ));
    }
    Ok(MainStructure {
        groups: groups.into_iter().map(IdxSet::new).collect(),
        markov_collapse,
    })
}

fn group_inputs(group: &IdxSet) -> Vec<VarRef> {
    group.iter().map(VarRef::Input).collect()
}

/// Sum-rate outer bound of a grouped network written over the input signals:
/// each chain term carries one transmitter group, conditioned on the later
/// groups. Virtual tuples collapse to single receivers when the structure
/// asserts the Markov conditions.
pub fn main_simplify(
    spec: &NetworkSpec,
    structure: &MainStructure,
    order: &[usize],
) -> Result<RateExpression> {
    validate_order(order, spec.k2)?;
    if structure.groups.len() != spec.k2 {
        return Err(Error::BadStructure(format!(
            "expected {} groups, got {}",
            spec.k2,
            structure.groups.len()
        )));
    }
    let time_share = spec.keeps_time_share();
    let k2 = spec.k2;
    let mut terms = Vec::new();
    for p in 1..=k2 {
        let j = order[p - 1];
        let info = group_inputs(&structure.groups[j - 1]);
        let mut given = Vec::new();
        for later in (p + 1)..=k2 {
            given.extend(group_inputs(&structure.groups[order[later - 1] - 1]));
        }
        if time_share {
            given.push(VarRef::TimeShare);
        }
        let output = if structure.markov_collapse {
            OutputRef::Receiver(j)
        } else {
            OutputRef::Tuple(order[p - 1..].to_vec())
        };
        terms.push(MITerm::new(info, output, given));
    }
    let kept = maccm_sumrate_messages(&spec.messages);
    Ok(RateExpression {
        terms,
        law: crate::sumrate::law_over(&kept, spec.k1, time_share),
    })
}

/// Treating-interference-as-noise condition for an interfered row: the
/// interference coefficients satisfy `sum a_i^2 <= 1`.
pub fn noisy_gain_check(gains: &[f64]) -> bool {
    gains.iter().map(|a| a * a).sum::<f64>() <= 1.0
}

/// Structural regimes the classifier can recognize.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum StructureClass {
    /// Receivers orderable strongest to weakest; successive decoding is
    /// sum-rate optimal.
    Degraded { order: Vec<usize> },
    /// Grouped network where receiver `j` hears groups `1..=j` and each
    /// output degrades the previous one; treating interference as noise is
    /// sum-rate optimal.
    GeneralizedZ,
    /// Grouped network where exactly one receiver experiences interference,
    /// degraded given its own group; treating interference as noise is
    /// sum-rate optimal.
    ManyToOne,
    /// First `eta1` receivers treat interference as noise, the remaining
    /// `eta2` run successive decoding.
    Hybrid { eta1: usize, eta2: usize },
    /// No regime recognized; only the sum-rate outer bound applies.
    None,
}

/// Structure declared by the caller, to be verified against the channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclaredStructure {
    Degraded,
    GeneralizedZ,
    ManyToOne,
    Hybrid { eta1: usize, eta2: usize },
}

/// Classification outcome: the recognized class, the sum-rate expression, and
/// whether that expression is exact (capacity) or only an outer bound.
#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub class: StructureClass,
    pub exact: bool,
    pub expression: Option<RateExpression>,
    /// Which factorization / structural checks passed.
    pub evidence: Vec<String>,
}

pub(crate) fn all_orders(k2: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            acc.push(v);
            rec(rest, acc, out);
            acc.pop();
            rest.insert(i, v);
        }
    }
    let mut rest: Vec<usize> = (1..=k2).collect();
    let mut out = Vec::new();
    rec(&mut rest, &mut Vec::new(), &mut out);
    out
}

fn zero_pattern_ok(gains: &[Vec<f64>], allowed: &dyn Fn(usize, usize) -> bool, tol: f64) -> bool {
    gains.iter().enumerate().all(|(j, row)| {
        row.iter()
            .enumerate()
            .all(|(i, &g)| allowed(j + 1, i + 1) || g.abs() <= tol)
    })
}

/// Discrete factorization template for a grouped network where receiver `j`
/// hears groups `1..=j` and each output degrades the previous one.
fn z_degraded_factors(structure: &MainStructure) -> Vec<ChainFactor> {
    (1..=structure.groups.len())
        .map(|j| ChainFactor {
            target: j,
            out_deps: if j == 1 { vec![] } else { vec![j - 1] },
            in_deps: structure.groups[j - 1].iter().collect(),
        })
        .collect()
}

/// Discrete factorization template for a grouped network where only the last
/// receiver experiences interference and is degraded given its own group.
fn many_to_one_factors(structure: &MainStructure) -> Vec<ChainFactor> {
    let k2 = structure.groups.len();
    (1..=k2)
        .map(|j| ChainFactor {
            target: j,
            out_deps: if j == k2 { (1..k2).collect() } else { vec![] },
            in_deps: structure.groups[j - 1].iter().collect(),
        })
        .collect()
}

/// Discrete factorization template for the hybrid regime: the first `eta1`
/// receivers form a many-to-one front end and the last `eta2` a degraded
/// cascade hanging off receiver `eta1`.
fn hybrid_factors(structure: &MainStructure, eta1: usize) -> Vec<ChainFactor> {
    let k2 = structure.groups.len();
    (1..=k2)
        .map(|j| {
            if j < eta1 {
                ChainFactor {
                    target: j,
                    out_deps: vec![],
                    in_deps: structure.groups[j - 1].iter().collect(),
                }
            } else if j == eta1 {
                ChainFactor {
                    target: j,
                    out_deps: (1..eta1).collect(),
                    in_deps: structure.groups[j - 1].iter().collect(),
                }
            } else if j == eta1 + 1 {
                ChainFactor {
                    target: j,
                    out_deps: vec![eta1],
                    in_deps: (eta1 + 1..=k2)
                        .flat_map(|g| structure.groups[g - 1].iter().collect::<Vec<_>>())
                        .collect(),
                }
            } else {
                ChainFactor {
                    target: j,
                    out_deps: vec![j - 1],
                    in_deps: vec![],
                }
            }
        })
        .collect()
}

/// Treating-interference-as-noise sum: one term per receiver over its own
/// group, nothing conditioned away.
fn tin_expression(spec: &NetworkSpec, structure: &MainStructure) -> RateExpression {
    let time_share = spec.keeps_time_share();
    let terms = (1..=spec.k2)
        .map(|j| {
            let mut given = Vec::new();
            if time_share {
                given.push(VarRef::TimeShare);
            }
            MITerm::new(
                group_inputs(&structure.groups[j - 1]),
                OutputRef::Receiver(j),
                given,
            )
        })
        .collect();
    let kept = maccm_sumrate_messages(&spec.messages);
    RateExpression {
        terms,
        law: crate::sumrate::law_over(&kept, spec.k1, time_share),
    }
}

/// Mixed expression for the hybrid regime: plain terms for the first `eta1`
/// receivers, a successive-decoding chain over the rest.
fn hybrid_expression(
    spec: &NetworkSpec,
    structure: &MainStructure,
    eta1: usize,
) -> RateExpression {
    let time_share = spec.keeps_time_share();
    let k2 = spec.k2;
    let mut terms = Vec::new();
    for j in 1..=k2 {
        let mut given = Vec::new();
        if j > eta1 {
            for later in (j + 1)..=k2 {
                given.extend(group_inputs(&structure.groups[later - 1]));
            }
        }
        if time_share {
            given.push(VarRef::TimeShare);
        }
        terms.push(MITerm::new(
            group_inputs(&structure.groups[j - 1]),
            OutputRef::Receiver(j),
            given,
        ));
    }
    let kept = maccm_sumrate_messages(&spec.messages);
    RateExpression {
        terms,
        law: crate::sumrate::law_over(&kept, spec.k1, time_share),
    }
}

/// Recognize the network's structural regime and, when one applies, emit its
/// exact sum-rate expression. With no recognized structure the report falls
/// back to the sum-rate outer bound under the spec's order, flagged inexact.
///
/// Detection is conservative: a class is returned only when every required
/// factorization or zero-pattern test passes at `tol`. A declared structure
/// is verified against the channel and rejected on mismatch.
pub fn classify_and_bound(
    spec: &NetworkSpec,
    declared: Option<DeclaredStructure>,
    tol: f64,
) -> Result<ClassifyReport> {
    let mut evidence = Vec::new();
    if let Some(decl) = declared {
        return verify_declared(spec, decl, tol);
    }
    match &spec.channel {
        Some(ChannelPayload::Gaussian(g)) => {
            if let Some(chain) = crate::gauss::check_rank_one_degraded(g, tol)? {
                evidence.push("gain matrix has rank one".into());
                let expr = sumrate_expression(spec, &chain.order, SumRateMode::Pruned)?;
                return Ok(ClassifyReport {
                    class: StructureClass::Degraded { order: chain.order },
                    exact: true,
                    expression: Some(expr),
                    evidence,
                });
            }
            if let Ok(structure) = main_structure(spec, false) {
                if gaussian_many_to_one(g, &structure, tol) {
                    evidence.push(
                        "direct links are identity and the interfered row passes the noisy-gain check"
                            .into(),
                    );
                    return Ok(ClassifyReport {
                        class: StructureClass::ManyToOne,
                        exact: true,
                        expression: Some(tin_expression(spec, &structure)),
                        evidence,
                    });
                }
            }
        }
        Some(ChannelPayload::Discrete(d)) => {
            let mut orders = vec![spec.effective_order()];
            if spec.k2 <= ORDER_ENUM_CAP {
                orders.extend(all_orders(spec.k2));
            }
            for order in orders {
                if crate::oracle::is_physically_degraded(d, &order, tol) {
                    evidence.push(format!("degraded along order {order:?}"));
                    let expr = sumrate_expression(spec, &order, SumRateMode::Pruned)?;
                    return Ok(ClassifyReport {
                        class: StructureClass::Degraded { order },
                        exact: true,
                        expression: Some(expr),
                        evidence,
                    });
                }
            }
            if let Ok(structure) = main_structure(spec, false) {
                if chain_factorization_holds(d, &z_degraded_factors(&structure), tol) {
                    evidence.push("chain factorization with per-receiver degradation".into());
                    return Ok(ClassifyReport {
                        class: StructureClass::GeneralizedZ,
                        exact: true,
                        expression: Some(tin_expression(spec, &structure)),
                        evidence,
                    });
                }
                if chain_factorization_holds(d, &many_to_one_factors(&structure), tol) {
                    evidence.push("single interfered receiver, degraded given its group".into());
                    return Ok(ClassifyReport {
                        class: StructureClass::ManyToOne,
                        exact: true,
                        expression: Some(tin_expression(spec, &structure)),
                        evidence,
                    });
                }
                for eta1 in 1..spec.k2 {
                    if chain_factorization_holds(d, &hybrid_factors(&structure, eta1), tol) {
                        let eta2 = spec.k2 - eta1;
                        evidence.push(format!(
                            "hybrid factorization with {eta1} noise-treating and {eta2} successive receivers"
                        ));
                        return Ok(ClassifyReport {
                            class: StructureClass::Hybrid { eta1, eta2 },
                            exact: true,
                            expression: Some(hybrid_expression(spec, &structure, eta1)),
                            evidence,
                        });
                    }
                }
            }
        }
        None => {}
    }
    let order = spec.effective_order();
    let expression = sumrate_outer_bound(spec, &order).ok();
    Ok(ClassifyReport {
        class: StructureClass::None,
        exact: false,
        expression,
        evidence,
    })
}

fn gaussian_many_to_one(
    g: &crate::net::GaussianChannel,
    structure: &MainStructure,
    tol: f64,
) -> bool {
    let k2 = structure.groups.len();
    // Non-interfered rows must be exactly their own unit link.
    let own = |j: usize, i: usize| structure.groups[j - 1].contains(i);
    for j in 1..k2 {
        for (i, &gain) in g.gains[j - 1].iter().enumerate() {
            let expect = if own(j, i + 1) { 1.0 } else { 0.0 };
            if (gain - expect).abs() > tol {
                return false;
            }
        }
    }
    let interference: Vec<f64> = g.gains[k2 - 1]
        .iter()
        .enumerate()
        .filter(|(i, _)| !own(k2, i + 1))
        .map(|(_, &gain)| gain)
        .collect();
    noisy_gain_check(&interference)
}

fn verify_declared(
    spec: &NetworkSpec,
    decl: DeclaredStructure,
    tol: f64,
) -> Result<ClassifyReport> {
    let mut evidence = vec!["structure declared by caller".to_string()];
    let check = |ok: bool, what: &str| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::StructureMismatch(what.into()))
        }
    };
    match decl {
        DeclaredStructure::Degraded => {
            let order = spec.effective_order();
            match &spec.channel {
                Some(ChannelPayload::Discrete(d)) => {
                    check(
                        crate::oracle::is_physically_degraded(d, &order, tol),
                        "channel is not degraded along the declared order",
                    )?;
                    evidence.push("verified against the channel table".into());
                }
                Some(ChannelPayload::Gaussian(g)) => {
                    check(
                        crate::gauss::check_rank_one_degraded(g, tol)?.is_some(),
                        "gain matrix does not have rank one",
                    )?;
                    evidence.push("verified against the gain matrix".into());
                }
                None => {}
            }
            let expr = sumrate_expression(spec, &order, SumRateMode::Pruned)?;
            Ok(ClassifyReport {
                class: StructureClass::Degraded { order },
                exact: true,
                expression: Some(expr),
                evidence,
            })
        }
        DeclaredStructure::GeneralizedZ => {
            let structure = main_structure(spec, false)?;
            match &spec.channel {
                Some(ChannelPayload::Discrete(d)) => {
                    check(
                        chain_factorization_holds(d, &z_degraded_factors(&structure), tol),
                        "channel does not factor as a degraded Z structure",
                    )?;
                    evidence.push("verified against the channel table".into());
                }
                Some(ChannelPayload::Gaussian(g)) => {
                    check(
                        zero_pattern_ok(
                            &g.gains,
                            &|j, i| (1..=j).any(|l| structure.groups[l - 1].contains(i)),
                            tol,
                        ),
                        "gain matrix is not lower block triangular",
                    )?;
                    evidence.push("zero pattern verified against the gain matrix".into());
                }
                None => {}
            }
            Ok(ClassifyReport {
                class: StructureClass::GeneralizedZ,
                exact: true,
                expression: Some(tin_expression(spec, &structure)),
                evidence,
            })
        }
        DeclaredStructure::ManyToOne => {
            let structure = main_structure(spec, false)?;
            match &spec.channel {
                Some(ChannelPayload::Discrete(d)) => {
                    check(
                        chain_factorization_holds(d, &many_to_one_factors(&structure), tol),
                        "channel does not factor as a degraded many-to-one structure",
                    )?;
                    evidence.push("verified against the channel table".into());
                }
                Some(ChannelPayload::Gaussian(g)) => {
                    check(
                        gaussian_many_to_one(g, &structure, tol),
                        "gain matrix is not a noisy many-to-one instance",
                    )?;
                    evidence.push("verified against the gain matrix".into());
                }
                None => {}
            }
            Ok(ClassifyReport {
                class: StructureClass::ManyToOne,
                exact: true,
                expression: Some(tin_expression(spec, &structure)),
                evidence,
            })
        }
        DeclaredStructure::Hybrid { eta1, eta2 } => {
            if eta1 + eta2 != spec.k2 || eta1 == 0 || eta2 == 0 {
                return Err(Error::BadStructure(format!(
                    "hybrid split {eta1}+{eta2} must cover all {} receivers",
                    spec.k2
                )));
            }
            let structure = main_structure(spec, false)?;
            if let Some(ChannelPayload::Discrete(d)) = &spec.channel {
                check(
                    chain_factorization_holds(d, &hybrid_factors(&structure, eta1), tol),
                    "channel does not factor as the declared hybrid structure",
                )?;
                evidence.push("verified against the channel table".into());
            }
            Ok(ClassifyReport {
                class: StructureClass::Hybrid { eta1, eta2 },
                exact: true,
                expression: Some(hybrid_expression(spec, &structure, eta1)),
                evidence,
            })
        }
    }
}

/// Which receiver orders a region bound ranges over.
#[derive(Clone, Debug)]
pub enum OrderSelection {
    /// Every permutation (requires `k2 <= ORDER_ENUM_CAP`).
    All,
    Given(Vec<Vec<usize>>),
}

impl OrderSelection {
    fn resolve(&self, spec: &NetworkSpec) -> Result<Vec<Vec<usize>>> {
        match self {
            OrderSelection::All => {
                if spec.k2 > ORDER_ENUM_CAP {
                    return Err(Error::OrderCapExceeded {
                        k2: spec.k2,
                        cap: ORDER_ENUM_CAP,
                    });
                }
                Ok(all_orders(spec.k2))
            }
            OrderSelection::Given(orders) => {
                for o in orders {
                    validate_order(o, spec.k2)?;
                }
                Ok(orders.clone())
            }
        }
    }
}

/// One partial-sum constraint of a region outer bound.
#[derive(Clone, Debug, Serialize)]
pub struct BoundConstraint {
    /// Bound family: 2 for the sum-rate bound, 6 for the per-subset region
    /// bound, 7 for the aggregated-group variant.
    pub family: u8,
    /// Messages whose rates are summed on the left.
    pub rate_sum: Vec<MessageLabel>,
    /// Receiver order the virtual tuples are built from.
    pub order: Vec<usize>,
    /// Aggregated transmitter set, for family-7 constraints.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregated: Option<IdxSet>,
    pub rhs: Vec<MITerm>,
}

impl BoundConstraint {
    pub fn render(&self) -> String {
        let lhs: Vec<String> = self
            .rate_sum
            .iter()
            .map(|m| format!("R_{{{}}}^{{{}}}", m.tx, m.rx))
            .collect();
        let rhs: Vec<String> = self.rhs.iter().map(|t| t.render()).collect();
        format!("{} <= {}", lhs.join(" + "), rhs.join(" + "))
    }
}

/// A constraint set together with the law its terms are maximized over.
#[derive(Debug, Serialize)]
pub struct BoundSet {
    pub family: u8,
    pub law: FactorizationLaw,
    pub constraints: Vec<BoundConstraint>,
}

fn nonempty_subsets(messages: &[MessageLabel]) -> Result<Vec<Vec<MessageLabel>>> {
    if messages.len() > MESSAGE_CAP {
        return Err(Error::LabelCapExceeded {
            count: messages.len(),
            cap: MESSAGE_CAP,
        });
    }
    let n = messages.len();
    let mut out = Vec::with_capacity((1usize << n) - 1);
    for mask in 1u32..(1u32 << n) {
        out.push(
            (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| messages[i].clone())
                .collect(),
        );
    }
    Ok(out)
}

fn sorted_message_vars(labels: &[&MessageLabel]) -> Vec<VarRef> {
    canonical_vars(
        &labels
            .iter()
            .map(|m| VarRef::Message((*m).clone()))
            .collect::<Vec<_>>(),
    )
}

/// Region outer bound: for every nonempty message subset and every selected
/// receiver order, one constraint chains the subset's per-receiver slices
/// against the virtual tuples, with everything outside the subset conditioned
/// everywhere.
pub fn region_bound_constraints(spec: &NetworkSpec, orders: &OrderSelection) -> Result<BoundSet> {
    let order_list = orders.resolve(spec)?;
    let omegas = nonempty_subsets(&spec.messages)?;
    let time_share = spec.keeps_time_share();
    let mut constraints = Vec::new();
    for omega in &omegas {
        for order in &order_list {
            let k2 = spec.k2;
            let outside: Vec<&MessageLabel> =
                spec.messages.iter().filter(|m| !omega.contains(m)).collect();
            let mut terms = Vec::new();
            for p in 1..=k2 {
                let decoded_here: Vec<&MessageLabel> = omega
                    .iter()
                    .filter(|m| m.rx.contains(order[p - 1]))
                    .collect();
                let mut given: Vec<VarRef> = Vec::new();
                for later in (p + 1)..=k2 {
                    for m in omega.iter().filter(|m| m.rx.contains(order[later - 1])) {
                        let v = VarRef::Message(m.clone());
                        if !given.contains(&v) {
                            given.push(v);
                        }
                    }
                }
                let info: Vec<VarRef> = sorted_message_vars(&decoded_here)
                    .into_iter()
                    .filter(|v| !given.contains(v))
                    .collect();
                if info.is_empty() {
                    continue;
                }
                given.extend(sorted_message_vars(&outside));
                if time_share {
                    given.push(VarRef::TimeShare);
                }
                terms.push(MITerm::new(
                    info,
                    OutputRef::Tuple(order[p - 1..].to_vec()),
                    given,
                ));
            }
            constraints.push(BoundConstraint {
                family: 6,
                rate_sum: omega.clone(),
                order: order.clone(),
                aggregated: None,
                rhs: terms,
            });
        }
    }
    Ok(BoundSet {
        family: 6,
        law: crate::sumrate::law_over(&spec.messages, spec.k1, time_share),
        constraints,
    })
}

/// Aggregated-group region bound: for each (subset, order, transmitter set)
/// triple, the messages of that transmitter set collapse into one codeword
/// variable, which either enters the chain at the strongest position where
/// the subset still needs it, or is conditioned everywhere when the subset
/// misses the group entirely. Constraints keep exactly `k2` terms.
pub fn aggregated_bound_constraints(
    spec: &NetworkSpec,
    orders: &OrderSelection,
) -> Result<BoundSet> {
    let order_list = orders.resolve(spec)?;
    let omegas = nonempty_subsets(&spec.messages)?;
    let time_share = spec.keeps_time_share();
    let mut group_keys: Vec<IdxSet> = Vec::new();
    for m in &spec.messages {
        if !group_keys.contains(&m.tx) {
            group_keys.push(m.tx.clone());
        }
    }
    group_keys.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));

    let mut constraints = Vec::new();
    for omega in &omegas {
        for order in &order_list {
            let k2 = spec.k2;
            let position = |j: usize| order.iter().position(|&r| r == j).unwrap() + 1;
            for delta in &group_keys {
                let group: Vec<&MessageLabel> =
                    spec.messages.iter().filter(|m| m.tx == *delta).collect();
                let in_omega: Vec<&&MessageLabel> =
                    group.iter().filter(|m| omega.contains(**m)).collect();
                // Strongest position at which the subset still needs the
                // group: best weakest-receiver position among its members,
                // or past the chain when the subset misses the group.
                let theta = in_omega
                    .iter()
                    .map(|m| m.rx.iter().map(position).max().unwrap())
                    .min()
                    .unwrap_or(k2 + 1);
                let aggregate = VarRef::Codeword(delta.clone());
                let outside: Vec<&MessageLabel> = spec
                    .messages
                    .iter()
                    .filter(|m| !omega.contains(m) && m.tx != *delta)
                    .collect();
                let mut terms = Vec::new();
                for p in 1..=k2 {
                    let mut given: Vec<VarRef> = Vec::new();
                    for later in (p + 1)..=k2 {
                        for m in omega
                            .iter()
                            .filter(|m| m.tx != *delta && m.rx.contains(order[later - 1]))
                        {
                            let v = VarRef::Message(m.clone());
                            if !given.contains(&v) {
                                given.push(v);
                            }
                        }
                    }
                    let mut info: Vec<VarRef> = sorted_message_vars(
                        &omega
                            .iter()
                            .filter(|m| m.tx != *delta && m.rx.contains(order[p - 1]))
                            .collect::<Vec<_>>(),
                    )
                    .into_iter()
                    .filter(|v| !given.contains(v))
                    .collect();
                    given.extend(sorted_message_vars(&outside));
                    if p == theta {
                        info.push(aggregate.clone());
                    } else if p < theta {
                        // Conditioned until the group enters the chain; with
                        // theta = k2+1 that is every term.
                        given.push(aggregate.clone());
                    }
                    if time_share {
                        given.push(VarRef::TimeShare);
                    }
                    terms.push(MITerm::new(
                        info,
                        OutputRef::Tuple(order[p - 1..].to_vec()),
                        given,
                    ));
                }
                constraints.push(BoundConstraint {
                    family: 7,
                    rate_sum: omega.clone(),
                    order: order.clone(),
                    aggregated: Some(delta.clone()),
                    rhs: terms,
                });
            }
        }
    }
    // Law: one aggregate codeword per transmitter set, deterministic inputs.
    let independent: Vec<VarRef> = group_keys
        .iter()
        .map(|d| VarRef::Codeword(d.clone()))
        .collect();
    let encoders = (1..=spec.k1)
        .map(|i| EncoderFactor {
            input: i,
            given: group_keys
                .iter()
                .filter(|d| d.contains(i))
                .map(|d| VarRef::Codeword(d.clone()))
                .collect(),
        })
        .collect();
    Ok(BoundSet {
        family: 7,
        law: FactorizationLaw {
            time_share,
            independent,
            encoders,
        },
        constraints,
    })
}
