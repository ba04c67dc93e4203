//! Network descriptions: message labels, channel payloads, and derived views.
//!
//! A network is a set of transmitters `1..=k1`, receivers `1..=k2`, and
//! messages labelled by the pair (transmitter set, receiver set). The channel
//! payload is optional; every structural operation in the crate works on a
//! purely symbolic spec.

use crate::error::{Error, Result};
use crate::set::IdxSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A message `M_{tx}^{rx}`: sent cooperatively by the transmitters in `tx`,
/// decoded by every receiver in `rx`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MessageLabel {
    pub tx: IdxSet,
    pub rx: IdxSet,
}

impl MessageLabel {
    pub fn new(tx: impl Into<IdxSet>, rx: impl Into<IdxSet>) -> Self {
        MessageLabel {
            tx: tx.into(),
            rx: rx.into(),
        }
    }

    /// `M_{1,2,4}^{3}` rendering used in reports and DOT output.
    pub fn render(&self) -> String {
        format!("M_{{{}}}^{{{}}}", self.tx, self.rx)
    }
}

impl fmt::Display for MessageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for MessageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Real-gain additive-noise channel: `Y = gains * X + Z`, unit noise variance,
/// per-transmitter average power limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianChannel {
    pub gains: Vec<Vec<f64>>,
    pub powers: Vec<f64>,
}

/// Finite-alphabet channel given as a flat conditional table.
///
/// Row index encodes the joint input `(x_1,..,x_k1)` in mixed-radix order with
/// `x_1` most significant; column index encodes the joint output the same way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteChannel {
    pub in_alphabets: Vec<usize>,
    pub out_alphabets: Vec<usize>,
    pub pmf: Vec<Vec<f64>>,
}

impl DiscreteChannel {
    pub fn n_inputs(&self) -> usize {
        self.in_alphabets.iter().product()
    }

    pub fn n_outputs(&self) -> usize {
        self.out_alphabets.iter().product()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelPayload {
    Gaussian(GaussianChannel),
    Discrete(DiscreteChannel),
}

/// A parsed and validated network description.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    pub k1: usize,
    pub k2: usize,
    /// Declaration order is preserved; it is the tie-break order wherever the
    /// pruning pipeline has to pick one of several equivalent messages.
    pub messages: Vec<MessageLabel>,
    pub channel: Option<ChannelPayload>,
    /// Receiver permutation, strongest first, if the file declares one.
    pub order: Option<Vec<usize>>,
}

/// Serialized form of [`NetworkSpec`].
#[derive(Serialize, Deserialize)]
struct SpecDoc {
    k1: usize,
    k2: usize,
    messages: Vec<MessageLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussian: Option<GaussianChannel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    discrete: Option<DiscreteChannel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<Vec<usize>>,
}

/// Parse a JSON network document and validate every invariant.
pub fn parse_network_spec(text: &str) -> Result<NetworkSpec> {
    let doc: SpecDoc = serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))?;
    let channel = match (doc.gaussian, doc.discrete) {
        (Some(_), Some(_)) => {
            return Err(Error::Syntax(
                "spec declares both gaussian and discrete payloads".into(),
            ))
        }
        (Some(g), None) => Some(ChannelPayload::Gaussian(g)),
        (None, Some(d)) => Some(ChannelPayload::Discrete(d)),
        (None, None) => None,
    };
    let spec = NetworkSpec {
        k1: doc.k1,
        k2: doc.k2,
        messages: doc.messages,
        channel,
        order: doc.order,
    };
    spec.validate()?;
    Ok(spec)
}

impl NetworkSpec {
    pub fn to_json(&self) -> String {
        let doc = SpecDoc {
            k1: self.k1,
            k2: self.k2,
            messages: self.messages.clone(),
            gaussian: match &self.channel {
                Some(ChannelPayload::Gaussian(g)) => Some(g.clone()),
                _ => None,
            },
            discrete: match &self.channel {
                Some(ChannelPayload::Discrete(d)) => Some(d.clone()),
                _ => None,
            },
            order: self.order.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("spec serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        if self.k1 == 0 || self.k2 == 0 {
            return Err(Error::Invalid("k1 and k2 must be at least 1".into()));
        }
        let mut seen: Vec<&MessageLabel> = Vec::new();
        for m in &self.messages {
            if m.tx.is_empty() {
                return Err(Error::EmptyLabelSet("tx"));
            }
            if m.rx.is_empty() {
                return Err(Error::EmptyLabelSet("rx"));
            }
            for i in m.tx.iter() {
                if i == 0 || i > self.k1 {
                    return Err(Error::IndexOutOfRange {
                        kind: "transmitter",
                        index: i,
                        limit: self.k1,
                    });
                }
            }
            for j in m.rx.iter() {
                if j == 0 || j > self.k2 {
                    return Err(Error::IndexOutOfRange {
                        kind: "receiver",
                        index: j,
                        limit: self.k2,
                    });
                }
            }
            if seen.iter().any(|s| **s == *m) {
                return Err(Error::DuplicateLabel {
                    tx: m.tx.to_string(),
                    rx: m.rx.to_string(),
                });
            }
            seen.push(m);
        }
        if let Some(order) = &self.order {
            validate_order(order, self.k2)?;
        }
        match &self.channel {
            Some(ChannelPayload::Gaussian(g)) => self.validate_gaussian(g)?,
            Some(ChannelPayload::Discrete(d)) => self.validate_discrete(d)?,
            None => {}
        }
        Ok(())
    }

    fn validate_gaussian(&self, g: &GaussianChannel) -> Result<()> {
        if g.gains.len() != self.k2 || g.gains.iter().any(|r| r.len() != self.k1) {
            return Err(Error::BadGainShape {
                k2: self.k2,
                k1: self.k1,
                rows: g.gains.len(),
                cols: g.gains.first().map_or(0, |r| r.len()),
            });
        }
        for (r, row) in g.gains.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteGain { row: r, col: c });
                }
            }
        }
        if g.powers.len() != self.k1 {
            return Err(Error::Invalid(format!(
                "expected {} powers, got {}",
                self.k1,
                g.powers.len()
            )));
        }
        for (i, &p) in g.powers.iter().enumerate() {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::NegativePower { index: i });
            }
        }
        Ok(())
    }

    fn validate_discrete(&self, d: &DiscreteChannel) -> Result<()> {
        if d.in_alphabets.len() != self.k1 || d.out_alphabets.len() != self.k2 {
            return Err(Error::Invalid(format!(
                "expected {} input and {} output alphabets",
                self.k1, self.k2
            )));
        }
        if d.in_alphabets.contains(&0) || d.out_alphabets.contains(&0) {
            return Err(Error::Invalid("alphabet sizes must be positive".into()));
        }
        let (rows, cols) = (d.n_inputs(), d.n_outputs());
        if d.pmf.len() != rows || d.pmf.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid(format!(
                "pmf table must be {rows}x{cols}"
            )));
        }
        for (r, row) in d.pmf.iter().enumerate() {
            let mut sum = 0.0;
            for (c, &v) in row.iter().enumerate() {
                if v < 0.0 {
                    return Err(Error::NegativePmfEntry { row: r, col: c });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::NonStochasticRow { row: r, sum });
            }
        }
        Ok(())
    }

    /// Coverage warnings: a transmitter or receiver mentioned by no message.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 1..=self.k1 {
            if !self.messages.iter().any(|m| m.tx.contains(i)) {
                out.push(format!("transmitter {i} sends no message"));
            }
        }
        for j in 1..=self.k2 {
            if !self.messages.iter().any(|m| m.rx.contains(j)) {
                out.push(format!("receiver {j} decodes no message"));
            }
        }
        out
    }

    /// Effective receiver order: the declared `order` if present, identity
    /// otherwise.
    pub fn effective_order(&self) -> Vec<usize> {
        self.order
            .clone()
            .unwrap_or_else(|| (1..=self.k2).collect())
    }

    pub fn gaussian(&self) -> Result<&GaussianChannel> {
        match &self.channel {
            Some(ChannelPayload::Gaussian(g)) => Ok(g),
            _ => Err(Error::MissingChannel("gaussian")),
        }
    }

    pub fn discrete(&self) -> Result<&DiscreteChannel> {
        match &self.channel {
            Some(ChannelPayload::Discrete(d)) => Ok(d),
            _ => Err(Error::MissingChannel("discrete")),
        }
    }

    /// Time-share variable handling: cost-constrained (Gaussian) networks keep
    /// the variable, discrete and symbolic ones drop it.
    pub fn keeps_time_share(&self) -> bool {
        matches!(&self.channel, Some(ChannelPayload::Gaussian(_)))
    }
}

pub fn validate_order(order: &[usize], k2: usize) -> Result<()> {
    if order.len() != k2 {
        return Err(Error::BadOrder { k2 });
    }
    let mut seen = vec![false; k2 + 1];
    for &j in order {
        if j == 0 || j > k2 || seen[j] {
            return Err(Error::BadOrder { k2 });
        }
        seen[j] = true;
    }
    Ok(())
}

/// Per-terminal and per-transmitter-set views of a message set.
#[derive(Clone, Debug)]
pub struct MessageViews {
    /// `per_tx[i-1]` = messages carried by transmitter `i`.
    pub per_tx: Vec<Vec<MessageLabel>>,
    /// `per_rx[j-1]` = messages decoded by receiver `j`.
    pub per_rx: Vec<Vec<MessageLabel>>,
    /// Messages grouped by transmitter set, keyed deterministically.
    pub groups: BTreeMap<IdxSet, Vec<MessageLabel>>,
}

/// Split a spec's messages into per-transmitter, per-receiver, and
/// per-transmitter-set views. Declaration order is preserved inside each view.
pub fn derive_views(spec: &NetworkSpec) -> MessageViews {
    let mut per_tx = vec![Vec::new(); spec.k1];
    let mut per_rx = vec![Vec::new(); spec.k2];
    let mut groups: BTreeMap<IdxSet, Vec<MessageLabel>> = BTreeMap::new();
    for m in &spec.messages {
        for i in m.tx.iter() {
            per_tx[i - 1].push(m.clone());
        }
        for j in m.rx.iter() {
            per_rx[j - 1].push(m.clone());
        }
        groups.entry(m.tx.clone()).or_default().push(m.clone());
    }
    MessageViews {
        per_tx,
        per_rx,
        groups,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_user_maccm() -> &'static str {
        r#"{"k1":2,"k2":1,"messages":[
            {"tx":[1,2],"rx":[1]},{"tx":[1],"rx":[1]},{"tx":[2],"rx":[1]}]}"#
    }

    #[test]
    fn parses_two_user_maccm() {
        let spec = parse_network_spec(two_user_maccm()).unwrap();
        assert_eq!(spec.k1, 2);
        assert_eq!(spec.k2, 1);
        assert_eq!(spec.messages.len(), 3);
        assert!(spec.warnings().is_empty());
    }

    #[test]
    fn parses_point_to_point() {
        let spec = parse_network_spec(r#"{"k1":1,"k2":1,"messages":[{"tx":[1],"rx":[1]}]}"#)
            .unwrap();
        assert_eq!(spec.messages.len(), 1);
    }

    #[test]
    fn rejects_duplicate_label() {
        let err = parse_network_spec(
            r#"{"k1":1,"k2":1,"messages":[{"tx":[1],"rx":[1]},{"tx":[1],"rx":[1]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel { .. }));
    }

    #[test]
    fn rejects_out_of_range_index() {
        let err = parse_network_spec(r#"{"k1":1,"k2":1,"messages":[{"tx":[2],"rx":[1]}]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { .. }));
    }

    #[test]
    fn rejects_non_stochastic_row() {
        let err = parse_network_spec(
            r#"{"k1":1,"k2":1,"messages":[{"tx":[1],"rx":[1]}],
                "discrete":{"in_alphabets":[2],"out_alphabets":[2],
                            "pmf":[[0.5,0.4],[0.0,1.0]]}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonStochasticRow { .. }));
    }

    #[test]
    fn round_trip_preserves_spec() {
        let text = r#"{"k1":2,"k2":2,"messages":[
            {"tx":[1,2],"rx":[2]},{"tx":[1],"rx":[1]},{"tx":[2],"rx":[1]}],
            "gaussian":{"gains":[[1.0,15.0],[0.066666,1.0]],"powers":[1.0,2.0]},
            "order":[1,2]}"#;
        let spec = parse_network_spec(text).unwrap();
        let again = parse_network_spec(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn views_are_membership_consistent() {
        let spec = parse_network_spec(two_user_maccm()).unwrap();
        let views = derive_views(&spec);
        for m in &spec.messages {
            for i in 1..=spec.k1 {
                assert_eq!(views.per_tx[i - 1].contains(m), m.tx.contains(i));
            }
            for j in 1..=spec.k2 {
                assert_eq!(views.per_rx[j - 1].contains(m), m.rx.contains(j));
            }
        }
        let total: usize = views.groups.values().map(|g| g.len()).sum();
        assert_eq!(total, spec.messages.len());
    }

    #[test]
    fn views_group_worked_network() {
        // 17 messages over 7 distinct transmitter sets.
        let spec = parse_network_spec(
            r#"{"k1":4,"k2":3,"messages":[
                {"tx":[1,2,4],"rx":[3]},{"tx":[1,2,4],"rx":[1,3]},{"tx":[1,2,4],"rx":[2,3]},
                {"tx":[1,2],"rx":[2,3]},{"tx":[1,2],"rx":[1,3]},
                {"tx":[3,4],"rx":[1,2]},{"tx":[3,4],"rx":[1,3]},{"tx":[3,4],"rx":[2,3]},
                {"tx":[1],"rx":[1,3]},{"tx":[1],"rx":[2,3]},
                {"tx":[2],"rx":[3]},{"tx":[2],"rx":[1,3]},
                {"tx":[3],"rx":[3]},{"tx":[3],"rx":[2,3]},
                {"tx":[4],"rx":[1]},{"tx":[4],"rx":[2]},{"tx":[4],"rx":[1,2]}]}"#,
        )
        .unwrap();
        let views = derive_views(&spec);
        assert_eq!(views.groups.len(), 7);
        assert_eq!(views.groups[&IdxSet::from([1, 2, 4])].len(), 3);
        assert_eq!(views.groups[&IdxSet::from([1, 2])].len(), 2);
        assert_eq!(views.groups[&IdxSet::from([4])].len(), 3);
    }

    #[test]
    fn warns_on_idle_terminal() {
        let spec = parse_network_spec(r#"{"k1":2,"k2":1,"messages":[{"tx":[1],"rx":[1]}]}"#)
            .unwrap();
        assert_eq!(spec.warnings(), vec!["transmitter 2 sends no message"]);
    }
}
