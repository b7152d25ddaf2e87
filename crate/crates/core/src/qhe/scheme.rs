use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{is_unitary, unitarity_deviation, CMatrix, Ket, Layout, Register};

/// Who a register belongs to before encryption, and what it is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Input,
    Key,
    AncA,
    AncB,
    ResA,
    ResB,
}

impl Role {
    pub fn starts_with_alice(self) -> bool {
        matches!(self, Role::Input | Role::Key | Role::AncA | Role::ResA)
    }
}

/// A unitary together with the registers it acts on, in matrix order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalOp {
    pub footprint: Vec<String>,
    pub matrix: CMatrix,
}

impl LocalOp {
    pub fn new<S: Into<String>>(footprint: impl IntoIterator<Item = S>, matrix: CMatrix) -> Self {
        Self {
            footprint: footprint.into_iter().map(Into::into).collect(),
            matrix,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub id: String,
    /// Bob's registers touched by `U_c`; all of Bob's registers at `t1` when
    /// omitted from a scheme file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub footprint: Option<Vec<String>>,
    #[serde(rename = "U_c")]
    pub u_c: CMatrix,
    #[serde(rename = "W_c")]
    pub w_c: CMatrix,
}

/// Registers held by each party at one instant, both in layout order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ownership {
    pub alice: Vec<String>,
    pub bob: Vec<String>,
}

/// Key generation, encryption, evaluation family and decryption, wired onto
/// named registers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScheme", into = "RawScheme")]
pub struct QheScheme {
    raw: RawScheme,
    layout: Layout,
    input: String,
    key_registers: Vec<String>,
    resource_registers: Vec<String>,
    initial: Ownership,
    t1: Ownership,
    t2: Ownership,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScheme {
    pub name: String,
    pub registers: Vec<(String, usize)>,
    pub roles: BTreeMap<String, Role>,
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key_state: Option<Ket>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resource_state: Option<Ket>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ancilla_states: BTreeMap<String, Ket>,
    pub encryption: LocalOp,
    pub decryption: LocalOp,
    pub evaluations: Vec<Evaluation>,
    pub send_to_bob: Vec<String>,
    pub return_to_alice: Vec<String>,
}

impl TryFrom<RawScheme> for QheScheme {
    type Error = Error;

    fn try_from(raw: RawScheme) -> Result<Self> {
        QheScheme::new(raw)
    }
}

impl From<QheScheme> for RawScheme {
    fn from(s: QheScheme) -> Self {
        s.raw
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidScheme(msg.into())
}

fn check_op(what: &str, layout: &Layout, op: &LocalOp, allowed: &[String]) -> Result<()> {
    for l in &op.footprint {
        if !allowed.contains(l) {
            return Err(invalid(format!("{what} touches `{l}`, which its owner does not hold")));
        }
    }
    let unique: BTreeSet<&String> = op.footprint.iter().collect();
    if unique.len() != op.footprint.len() {
        return Err(invalid(format!("{what} lists a register twice")));
    }
    let d = layout.dim_of_all(&op.footprint)?;
    if op.matrix.rows() != d || op.matrix.cols() != d {
        return Err(invalid(format!(
            "{what} is {}x{} but its footprint has dimension {d}",
            op.matrix.rows(),
            op.matrix.cols()
        )));
    }
    if !is_unitary(&op.matrix, 1e-10) {
        return Err(Error::NotUnitary {
            what: what.into(),
            deviation: unitarity_deviation(&op.matrix)?,
        });
    }
    Ok(())
}

fn check_subset(what: &str, labels: &[String], pool: &[String]) -> Result<()> {
    let unique: BTreeSet<&String> = labels.iter().collect();
    if unique.len() != labels.len() {
        return Err(invalid(format!("{what} lists a register twice")));
    }
    match labels.iter().find(|l| !pool.contains(l)) {
        Some(l) => Err(invalid(format!("{what} includes `{l}`, which the sender does not hold"))),
        None => Ok(()),
    }
}

fn minus(a: &[String], b: &[String]) -> Vec<String> {
    a.iter().filter(|l| !b.contains(l)).cloned().collect()
}

impl QheScheme {
    pub fn new(mut raw: RawScheme) -> Result<Self> {
        let layout = Layout::new(raw.registers.iter().map(|(l, d)| (l.clone(), *d)))?;
        let labels = layout.labels();
        for l in raw.roles.keys() {
            layout.position(l)?;
        }
        if let Some(l) = labels.iter().find(|l| !raw.roles.contains_key(*l)) {
            return Err(invalid(format!("register `{l}` has no role")));
        }
        let with_role = |r: Role| -> Vec<String> { labels.iter().filter(|l| raw.roles[*l] == r).cloned().collect() };
        let inputs = with_role(Role::Input);
        let [input] = inputs.as_slice() else {
            return Err(invalid(format!("expected exactly one input register, found {}", inputs.len())));
        };
        let input = input.clone();
        let key_registers = with_role(Role::Key);
        let mut resource_registers = with_role(Role::ResA);
        resource_registers.extend(with_role(Role::ResB));
        let resource_registers = layout.in_layout_order(&resource_registers)?;

        let expect_state = |what: &str, regs: &[String], state: &Option<Ket>| -> Result<()> {
            match (regs.is_empty(), state) {
                (true, None) => Ok(()),
                (true, Some(_)) => Err(invalid(format!("{what} given but no register carries that role"))),
                (false, None) => Err(invalid(format!("{what} missing"))),
                (false, Some(k)) => {
                    let d = layout.dim_of_all(regs)?;
                    if k.dim() == d {
                        Ok(())
                    } else {
                        Err(invalid(format!("{what} has dimension {} but its registers need {d}", k.dim())))
                    }
                }
            }
        };
        expect_state("key_state", &key_registers, &raw.key_state)?;
        expect_state("resource_state", &resource_registers, &raw.resource_state)?;
        for (l, k) in &raw.ancilla_states {
            if !matches!(raw.roles.get(l), Some(Role::AncA | Role::AncB)) {
                return Err(invalid(format!("ancilla state given for non-ancilla `{l}`")));
            }
            if k.dim() != layout.dim_of(l)? {
                return Err(invalid(format!("ancilla state for `{l}` has the wrong dimension")));
            }
        }

        let initial = Ownership {
            alice: labels.iter().filter(|l| raw.roles[*l].starts_with_alice()).cloned().collect(),
            bob: labels.iter().filter(|l| !raw.roles[*l].starts_with_alice()).cloned().collect(),
        };
        check_op("U_e", &layout, &raw.encryption, &initial.alice)?;
        check_subset("send_to_bob", &raw.send_to_bob, &initial.alice)?;
        let t1 = Ownership {
            alice: minus(&initial.alice, &raw.send_to_bob),
            bob: layout.in_layout_order(&[initial.bob.clone(), raw.send_to_bob.clone()].concat())?,
        };
        check_subset("return_to_alice", &raw.return_to_alice, &t1.bob)?;
        if raw.return_to_alice.is_empty() {
            return Err(invalid("return_to_alice is empty; Bob must send a message"));
        }
        let t2 = Ownership {
            alice: layout.in_layout_order(&[t1.alice.clone(), raw.return_to_alice.clone()].concat())?,
            bob: minus(&t1.bob, &raw.return_to_alice),
        };
        check_op("U_d", &layout, &raw.decryption, &t2.alice)?;
        if !t2.alice.contains(&raw.output) {
            return Err(invalid(format!("output `{}` is not held by Alice after decryption", raw.output)));
        }
        let d_in = layout.dim_of(&input)?;
        if layout.dim_of(&raw.output)? != d_in {
            return Err(invalid("output and input registers differ in dimension"));
        }
        if raw.evaluations.is_empty() {
            return Err(invalid("no evaluations"));
        }
        let mut ids = BTreeSet::new();
        for ev in &mut raw.evaluations {
            if !ids.insert(ev.id.clone()) {
                return Err(invalid(format!("duplicate circuit id `{}`", ev.id)));
            }
            let footprint = ev.footprint.clone().unwrap_or_else(|| t1.bob.clone());
            check_op(&format!("U_c[{}]", ev.id), &layout, &LocalOp::new(footprint, ev.u_c.clone()), &t1.bob)?;
            if ev.w_c.rows() != d_in || ev.w_c.cols() != d_in {
                return Err(invalid(format!("W_c[{}] does not act on the plaintext space", ev.id)));
            }
            if !is_unitary(&ev.w_c, 1e-10) {
                return Err(Error::NotUnitary {
                    what: format!("W_c[{}]", ev.id),
                    deviation: unitarity_deviation(&ev.w_c)?,
                });
            }
        }
        Ok(Self {
            raw,
            layout,
            input,
            key_registers,
            resource_registers,
            initial,
            t1,
            t2,
        })
    }

    pub fn name(&self) -> &str {
        &self.raw.name
    }

    pub fn raw(&self) -> &RawScheme {
        &self.raw
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn registers(&self) -> &[Register] {
        self.layout.registers()
    }

    pub fn role(&self, label: &str) -> Option<Role> {
        self.raw.roles.get(label).copied()
    }

    pub fn input(&self) -> &str {
        &self.input
    }

    pub fn output(&self) -> &str {
        &self.raw.output
    }

    pub fn plaintext_dim(&self) -> usize {
        self.layout.dim_of(&self.input).expect("validated")
    }

    pub fn encryption(&self) -> &LocalOp {
        &self.raw.encryption
    }

    pub fn decryption(&self) -> &LocalOp {
        &self.raw.decryption
    }

    pub fn evaluations(&self) -> &[Evaluation] {
        &self.raw.evaluations
    }

    pub fn evaluation(&self, id: &str) -> Result<&Evaluation> {
        self.raw
            .evaluations
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::UnknownCircuit(id.to_string()))
    }

    pub fn circuit_ids(&self) -> Vec<String> {
        self.raw.evaluations.iter().map(|e| e.id.clone()).collect()
    }

    /// `U_c` footprint with the default filled in.
    pub fn evaluation_footprint(&self, ev: &Evaluation) -> Vec<String> {
        ev.footprint.clone().unwrap_or_else(|| self.t1.bob.clone())
    }

    pub fn initial_ownership(&self) -> &Ownership {
        &self.initial
    }

    pub fn ownership_t1(&self) -> &Ownership {
        &self.t1
    }

    pub fn ownership_t2(&self) -> &Ownership {
        &self.t2
    }

    /// Bob's message: registers returned to Alice, in layout order.
    pub fn message_registers(&self) -> Vec<String> {
        self.layout.in_layout_order(&self.raw.return_to_alice).expect("validated")
    }

    /// Alice's registers after decryption other than the output.
    pub fn alice_remainder(&self) -> Vec<String> {
        minus(&self.t2.alice, std::slice::from_ref(&self.raw.output))
    }

    /// Global pure state before encryption: plaintext, key, resource and
    /// ancillas, in layout order.
    pub fn initial_state(&self, psi: &Ket) -> Result<Ket> {
        if psi.dim() != self.plaintext_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.plaintext_dim(),
                found: psi.dim(),
            });
        }
        let mut parts: Vec<(Vec<String>, &Ket)> = vec![(vec![self.input.clone()], psi)];
        if let Some(k) = &self.raw.key_state {
            parts.push((self.key_registers.clone(), k));
        }
        if let Some(r) = &self.raw.resource_state {
            parts.push((self.resource_registers.clone(), r));
        }
        for (l, k) in &self.raw.ancilla_states {
            parts.push((vec![l.clone()], k));
        }
        self.layout.assemble(&parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::gates;

    fn toy() -> RawScheme {
        RawScheme {
            name: "toy".into(),
            registers: vec![("in".into(), 2), ("tag".into(), 2)],
            roles: [("in".to_string(), Role::Input), ("tag".to_string(), Role::AncB)].into(),
            output: "in".into(),
            key_state: None,
            resource_state: None,
            ancilla_states: BTreeMap::new(),
            encryption: LocalOp::new(["in"], CMatrix::identity(2)),
            decryption: LocalOp::new(["in"], CMatrix::identity(2)),
            evaluations: vec![Evaluation {
                id: "X".into(),
                footprint: Some(vec!["in".into()]),
                u_c: gates::pauli_x(),
                w_c: gates::pauli_x(),
            }],
            send_to_bob: vec!["in".into()],
            return_to_alice: vec!["in".into()],
        }
    }

    #[test]
    fn ownership_follows_transfers() {
        let s = QheScheme::new(toy()).unwrap();
        assert_eq!(s.initial_ownership().alice, vec!["in"]);
        assert_eq!(s.ownership_t1().bob, vec!["in", "tag"]);
        assert_eq!(s.ownership_t2().alice, vec!["in"]);
        assert_eq!(s.ownership_t2().bob, vec!["tag"]);
        assert!(s.alice_remainder().is_empty());
    }

    #[test]
    fn rejects_bad_wiring() {
        let mut r = toy();
        r.encryption = LocalOp::new(["tag"], CMatrix::identity(2));
        assert!(QheScheme::new(r).is_err(), "Alice cannot touch Bob's ancilla");

        let mut r = toy();
        r.evaluations[0].u_c = CMatrix::identity(2).scale_real(2.0);
        assert!(matches!(QheScheme::new(r), Err(Error::NotUnitary { .. })));

        let mut r = toy();
        r.evaluations[0].w_c = CMatrix::identity(4);
        assert!(QheScheme::new(r).is_err());

        let mut r = toy();
        r.send_to_bob.clear();
        assert!(QheScheme::new(r).is_err(), "Bob cannot return what he never held");

        let mut r = toy();
        r.roles.insert("tag".into(), Role::Input);
        assert!(QheScheme::new(r).is_err());

        let mut r = toy();
        r.key_state = Some(Ket::basis(2, 0));
        assert!(QheScheme::new(r).is_err());
    }

    #[test]
    fn json_round_trip_and_located_errors() {
        let s = QheScheme::new(toy()).unwrap();
        let text = serde_json::to_string_pretty(&s).unwrap();
        let back: QheScheme = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let broken = text.replacen("\"U_c\"", "\"U_x\"", 1);
        let err = serde_json::from_str::<QheScheme>(&broken).unwrap_err();
        assert!(err.line() > 0, "{err}");
    }

    #[test]
    fn missing_footprint_defaults_to_bob() {
        let mut r = toy();
        r.evaluations[0].footprint = None;
        r.evaluations[0].u_c = gates::pauli_x().kron(&CMatrix::identity(2));
        let s = QheScheme::new(r).unwrap();
        assert_eq!(s.evaluation_footprint(&s.evaluations()[0]), vec!["in", "tag"]);
    }
}
