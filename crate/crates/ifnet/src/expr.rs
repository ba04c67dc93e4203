//! Symbolic rate expressions: conditional mutual-information terms plus the
//! probability law they are maximized over.

use crate::net::MessageLabel;
use crate::set::IdxSet;
use serde::Serialize;
use std::fmt;

/// A random variable that can appear in a mutual-information term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarRef {
    /// A message `M_Δ^∇`.
    Message(MessageLabel),
    /// A codeword `W_Δ` (aggregates everything a transmitter set encodes).
    Codeword(IdxSet),
    /// An input symbol `X_i`.
    Input(usize),
    /// The time-share variable `Q`.
    TimeShare,
}

impl VarRef {
    pub fn render(&self) -> String {
        match self {
            VarRef::Message(m) => m.render(),
            VarRef::Codeword(d) => {
                if d.len() == 1 {
                    format!("X_{}", d.as_slice()[0])
                } else {
                    format!("W_{{{d}}}")
                }
            }
            VarRef::Input(i) => format!("X_{i}"),
            VarRef::TimeShare => "Q".into(),
        }
    }

    /// Sort key: messages by (|Δ| desc, Δ, ∇), then codewords, inputs, Q.
    fn key(&self) -> (u8, usize, IdxSet, IdxSet) {
        match self {
            VarRef::Message(m) => (0, usize::MAX - m.tx.len(), m.tx.clone(), m.rx.clone()),
            VarRef::Codeword(d) => (1, usize::MAX - d.len(), d.clone(), IdxSet::empty()),
            VarRef::Input(i) => (2, *i, IdxSet::empty(), IdxSet::empty()),
            VarRef::TimeShare => (3, 0, IdxSet::empty(), IdxSet::empty()),
        }
    }
}

impl fmt::Debug for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for VarRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

/// Canonical ordering with duplicates removed; keeps term strings
/// byte-deterministic.
pub fn canonical_vars(vars: &[VarRef]) -> Vec<VarRef> {
    let mut v = vars.to_vec();
    v.sort_by_key(|x| x.key());
    v.dedup();
    v
}

/// The channel output a term observes: one receiver, or a suffix tuple of
/// receivers acting as a single stronger virtual receiver.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OutputRef {
    Receiver(usize),
    /// Ordered receiver indices, e.g. `(Y_2,Y_3)`.
    Tuple(Vec<usize>),
}

impl OutputRef {
    pub fn render(&self) -> String {
        match self {
            OutputRef::Receiver(j) => format!("Y_{j}"),
            OutputRef::Tuple(js) if js.len() == 1 => format!("Y_{}", js[0]),
            OutputRef::Tuple(js) => {
                let parts: Vec<String> = js.iter().map(|j| format!("Y_{j}")).collect();
                format!("({})", parts.join(","))
            }
        }
    }

    pub fn receivers(&self) -> Vec<usize> {
        match self {
            OutputRef::Receiver(j) => vec![*j],
            OutputRef::Tuple(js) => js.clone(),
        }
    }
}

impl Serialize for OutputRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

/// One conditional mutual-information term `I(info ; output | given)`.
#[derive(Clone, PartialEq, Debug)]
pub struct MITerm {
    pub info: Vec<VarRef>,
    pub output: OutputRef,
    pub given: Vec<VarRef>,
}

impl MITerm {
    pub fn new(info: Vec<VarRef>, output: OutputRef, given: Vec<VarRef>) -> Self {
        debug_assert!(info.iter().all(|v| !given.contains(v)));
        MITerm {
            info,
            output,
            given,
        }
    }

    pub fn render(&self) -> String {
        let info: Vec<String> = self.info.iter().map(|v| v.render()).collect();
        // Vacuous terms keep their slot in fixed-length chains.
        let info = if info.is_empty() {
            "-".to_string()
        } else {
            info.join(", ")
        };
        if self.given.is_empty() {
            format!("I({}; {})", info, self.output.render())
        } else {
            let given: Vec<String> = self.given.iter().map(|v| v.render()).collect();
            format!(
                "I({}; {} | {})",
                info,
                self.output.render(),
                given.join(", ")
            )
        }
    }
}

impl Serialize for MITerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

/// Deterministic encoder factor `X_i = f_i(given, Q)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EncoderFactor {
    pub input: usize,
    pub given: Vec<VarRef>,
}

impl EncoderFactor {
    pub fn render(&self, with_time_share: bool) -> String {
        let mut given: Vec<String> = self.given.iter().map(|v| v.render()).collect();
        if with_time_share {
            given.push("Q".into());
        }
        if given.is_empty() {
            format!("P_{{X_{}}}", self.input)
        } else {
            format!("P_{{X_{}|{}}}", self.input, given.join(","))
        }
    }
}

/// The admissible joint law of a rate expression: independent uniform message
/// factors plus a deterministic encoder per transmitter, with the time-share
/// variable present or dropped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationLaw {
    pub time_share: bool,
    pub independent: Vec<VarRef>,
    pub encoders: Vec<EncoderFactor>,
}

impl FactorizationLaw {
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.time_share {
            parts.push("P_{Q}".to_string());
        }
        for v in &self.independent {
            parts.push(format!("P_{{{}}}", v.render()));
        }
        for e in &self.encoders {
            parts.push(e.render(self.time_share));
        }
        parts.join(" ")
    }
}

/// A sum of mutual-information terms together with its law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateExpression {
    pub terms: Vec<MITerm>,
    pub law: FactorizationLaw,
}

impl RateExpression {
    pub fn render(&self) -> String {
        let terms: Vec<String> = self.terms.iter().map(|t| t.render()).collect();
        terms.join(" + ")
    }

    /// Rewrite message variables as codeword variables (`W_Δ`, with `X_i` for
    /// singleton sets). Pure symbol substitution; no simplification.
    pub fn to_encoding_form(&self) -> RateExpression {
        let map = |v: &VarRef| match v {
            VarRef::Message(m) => VarRef::Codeword(m.tx.clone()),
            other => other.clone(),
        };
        RateExpression {
            terms: self
                .terms
                .iter()
                .map(|t| MITerm {
                    info: t.info.iter().map(map).collect(),
                    output: t.output.clone(),
                    given: t.given.iter().map(map).collect(),
                })
                .collect(),
            law: FactorizationLaw {
                time_share: self.law.time_share,
                independent: self.law.independent.iter().map(map).collect(),
                encoders: self
                    .law
                    .encoders
                    .iter()
                    .map(|e| EncoderFactor {
                        input: e.input,
                        given: canonical_vars(&e.given.iter().map(map).collect::<Vec<_>>()),
                    })
                    .collect(),
            },
        }
    }

    /// Every message appearing anywhere in the terms.
    pub fn messages(&self) -> Vec<MessageLabel> {
        let mut out = Vec::new();
        for t in &self.terms {
            for v in t.info.iter().chain(t.given.iter()) {
                if let VarRef::Message(m) = v {
                    if !out.contains(m) {
                        out.push(m.clone());
                    }
                }
            }
        }
        out
    }
}

/// A partial-sum constraint `R_ΣΩ <= rhs` over one or more terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionConstraint {
    /// The messages whose rates are summed on the left.
    pub rate_sum: Vec<MessageLabel>,
    pub rhs: Vec<MITerm>,
}

impl RegionConstraint {
    /// `R_{3} + R_{1,2} <= I(...)`; single-receiver sets render by
    /// transmitter set only.
    pub fn render(&self) -> String {
        let single_rx = self
            .rate_sum
            .iter()
            .all(|m| m.rx.len() == 1 && m.rx == self.rate_sum[0].rx);
        let lhs: Vec<String> = self
            .rate_sum
            .iter()
            .map(|m| {
                if single_rx {
                    format!("R_{{{}}}", m.tx)
                } else {
                    format!("R_{{{}}}^{{{}}}", m.tx, m.rx)
                }
            })
            .collect();
        let rhs: Vec<String> = self.rhs.iter().map(|t| t.render()).collect();
        format!("{} <= {}", lhs.join(" + "), rhs.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(tx: &[usize], rx: &[usize]) -> VarRef {
        VarRef::Message(MessageLabel::new(tx, rx))
    }

    #[test]
    fn term_rendering() {
        let t = MITerm::new(
            vec![msg(&[4], &[1])],
            OutputRef::Receiver(1),
            vec![msg(&[3, 4], &[1, 2]), msg(&[1, 2, 4], &[3]), VarRef::TimeShare],
        );
        assert_eq!(
            t.render(),
            "I(M_{4}^{1}; Y_1 | M_{3,4}^{1,2}, M_{1,2,4}^{3}, Q)"
        );
    }

    #[test]
    fn canonical_ordering() {
        let vars = vec![
            VarRef::TimeShare,
            msg(&[3], &[1]),
            msg(&[1, 2, 3], &[1]),
            msg(&[2, 4], &[1]),
            msg(&[1, 2], &[1]),
        ];
        let sorted = canonical_vars(&vars);
        let rendered: Vec<String> = sorted.iter().map(|v| v.render()).collect();
        assert_eq!(
            rendered,
            vec![
                "M_{1,2,3}^{1}",
                "M_{1,2}^{1}",
                "M_{2,4}^{1}",
                "M_{3}^{1}",
                "Q"
            ]
        );
    }

    #[test]
    fn tuple_output_rendering() {
        assert_eq!(OutputRef::Tuple(vec![2, 3]).render(), "(Y_2,Y_3)");
        assert_eq!(OutputRef::Tuple(vec![3]).render(), "Y_3");
    }

    #[test]
    fn encoding_form_substitutes_codewords() {
        let e = RateExpression {
            terms: vec![MITerm::new(
                vec![msg(&[1, 2], &[1])],
                OutputRef::Receiver(1),
                vec![VarRef::TimeShare],
            )],
            law: FactorizationLaw {
                time_share: true,
                independent: vec![msg(&[1, 2], &[1])],
                encoders: vec![EncoderFactor {
                    input: 1,
                    given: vec![msg(&[1, 2], &[1])],
                }],
            },
        };
        let enc = e.to_encoding_form();
        assert_eq!(enc.terms[0].render(), "I(W_{1,2}; Y_1 | Q)");
        assert_eq!(enc.law.encoders[0].render(true), "P_{X_1|W_{1,2},Q}");
    }
}
