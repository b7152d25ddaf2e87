//! Concrete schemes and localisation problems, plus a catalog pairing each
//! with the verdicts it should receive.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localiser::{self, LocalisationProblem};
use crate::qhe::{self, Evaluation, LocalOp, QheScheme, RawScheme, Role, Verdict};
use crate::tensor::{derive_seed, gates, random_ket, random_unitary, CMatrix, Ket, C64};

pub type Params = BTreeMap<String, String>;

/// A named target unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub id: String,
    pub matrix: CMatrix,
}

fn letter(c: char) -> Result<CMatrix> {
    Ok(match c {
        'I' => CMatrix::identity(2),
        'X' => gates::pauli_x(),
        'Y' => gates::pauli_y(),
        'Z' => gates::pauli_z(),
        'H' => gates::hadamard(),
        _ => return Err(Error::UnknownCircuit(c.to_string())),
    })
}

/// Matrix product of single-qubit letters, leftmost applied last.
fn word(w: &str) -> Result<CMatrix> {
    if w.is_empty() {
        return Err(Error::UnknownCircuit(w.into()));
    }
    w.chars().try_fold(CMatrix::identity(2), |acc, c| Ok(&acc * &letter(c)?))
}

/// One circuit token on `n` qubits. For `n = 1` the token is a word such as
/// `XZ` (the product X·Z). For `n > 1` it is `SWAP` (two qubits), one letter
/// per qubit (`XI`), or per-qubit words joined by `_` (`XZ_I`).
pub fn parse_circuit(n: usize, token: &str) -> Result<Circuit> {
    let t = token.trim();
    let unknown = || Error::UnknownCircuit(t.to_string());
    let matrix = if n == 1 {
        word(t).map_err(|_| unknown())?
    } else if t == "SWAP" {
        if n != 2 {
            return Err(unknown());
        }
        gates::swap()
    } else {
        let parts: Vec<&str> = if t.contains('_') {
            t.split('_').collect()
        } else {
            t.char_indices().map(|(i, c)| &t[i..i + c.len_utf8()]).collect()
        };
        if parts.len() != n {
            return Err(unknown());
        }
        parts
            .iter()
            .try_fold(CMatrix::identity(1), |acc, p| Ok(acc.kron(&word(p)?)))
            .map_err(|_: Error| unknown())?
    };
    Ok(Circuit { id: t.to_string(), matrix })
}

/// Id of `X^a Z^b` on one qubit.
fn pauli_word(a: usize, b: usize) -> &'static str {
    ["I", "Z", "X", "XZ"][a * 2 + b]
}

/// The `4^n` Paulis `X^x Z^z` (masks over qubits, most significant first),
/// ordered by `x * 2^n + z`.
pub fn paulis(n: usize) -> Vec<Circuit> {
    let m = 1 << n;
    (0..m * m)
        .map(|k| {
            let (x, z) = (k / m, k % m);
            let id = (0..n)
                .map(|q| {
                    let bit = n - 1 - q;
                    pauli_word((x >> bit) & 1, (z >> bit) & 1)
                })
                .collect::<Vec<_>>()
                .join("_");
            Circuit {
                id,
                matrix: gates::pauli_xz(n, x, z),
            }
        })
        .collect()
}

/// Comma-separated tokens; for `n = 1` a string without commas is read one
/// letter per circuit (`IXZ`). `paulis` expands to every Pauli.
pub fn parse_circuit_set(n: usize, spec: &str) -> Result<Vec<Circuit>> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("paulis") {
        return Ok(paulis(n));
    }
    let tokens: Vec<String> = if spec.contains(',') {
        spec.split(',').map(|s| s.trim().to_string()).collect()
    } else if n == 1 {
        spec.chars().map(String::from).collect()
    } else {
        vec![spec.to_string()]
    };
    let circuits = tokens.iter().map(|t| parse_circuit(n, t)).collect::<Result<Vec<_>>>()?;
    if circuits.is_empty() {
        return Err(Error::BadParameters("empty circuit set".into()));
    }
    Ok(circuits)
}

fn check_n(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::BadParameters(format!("n must lie in 1..={max}, got {n}")));
    }
    Ok(())
}

fn roles(pairs: &[(&str, Role)]) -> BTreeMap<String, Role> {
    pairs.iter().map(|(l, r)| (l.to_string(), *r)).collect()
}

fn s(l: &str) -> String {
    l.to_string()
}

/// Negative control: no encryption, Bob holds the plaintext and applies
/// `W_c` to it directly.
pub fn build_identity_scheme(n: usize, circuits: &[Circuit]) -> Result<QheScheme> {
    check_n(n, 3)?;
    let d = 1 << n;
    QheScheme::new(RawScheme {
        name: format!("identity-n{n}"),
        registers: vec![(s("input"), d)],
        roles: roles(&[("input", Role::Input)]),
        output: s("input"),
        key_state: None,
        resource_state: None,
        ancilla_states: BTreeMap::new(),
        encryption: LocalOp::new(["input"], CMatrix::identity(d)),
        decryption: LocalOp::new(["input"], CMatrix::identity(d)),
        evaluations: circuits
            .iter()
            .map(|c| Evaluation {
                id: c.id.clone(),
                footprint: Some(vec![s("input")]),
                u_c: c.matrix.clone(),
                w_c: c.matrix.clone(),
            })
            .collect(),
        send_to_bob: vec![s("input")],
        return_to_alice: vec![s("input")],
    })
}

/// `sum_k |k><k| (x) op(k)` on (key, input) with `k = x * 2^n + z`.
fn key_controlled(n: usize, op: impl Fn(usize, usize) -> CMatrix) -> CMatrix {
    let m = 1 << n;
    let mut out = CMatrix::zeros(m * m * m, m * m * m);
    for k in 0..m * m {
        let p = op(k / m, k % m);
        for i in 0..m {
            for j in 0..m {
                out[(k * m + i, k * m + j)] = p[(i, j)];
            }
        }
    }
    out
}

/// Quantum one-time pad: a maximally entangled key and purifier pick a
/// Pauli `X^x Z^z` that hides the plaintext. Evaluations are the Paulis
/// themselves; `with_hadamard` adds `H` on every qubit, which the pad cannot
/// decrypt.
pub fn build_qotp_scheme(n: usize, with_hadamard: bool) -> Result<QheScheme> {
    check_n(n, 2)?;
    let m = 1 << n;
    let keys = m * m;
    let mut key = vec![C64::new(0.0, 0.0); keys * keys];
    for k in 0..keys {
        key[k * keys + k] = C64::new(1.0 / m as f64, 0.0);
    }
    let mut evaluations: Vec<Evaluation> = paulis(n)
        .into_iter()
        .map(|c| Evaluation {
            id: c.id,
            footprint: Some(vec![s("input")]),
            u_c: c.matrix.clone(),
            w_c: c.matrix,
        })
        .collect();
    if with_hadamard {
        let h = (0..n).fold(CMatrix::identity(1), |acc, _| acc.kron(&gates::hadamard()));
        evaluations.push(Evaluation {
            id: "H".repeat(n),
            footprint: Some(vec![s("input")]),
            u_c: h.clone(),
            w_c: h,
        });
    }
    QheScheme::new(RawScheme {
        name: format!("qotp-n{n}{}", if with_hadamard { "-hadamard" } else { "" }),
        registers: vec![(s("input"), m), (s("key"), keys), (s("key_purifier"), keys)],
        roles: roles(&[("input", Role::Input), ("key", Role::Key), ("key_purifier", Role::Key)]),
        output: s("input"),
        key_state: Some(Ket::new(key)?),
        resource_state: None,
        ancilla_states: BTreeMap::new(),
        encryption: LocalOp::new(["key", "input"], key_controlled(n, |x, z| gates::pauli_xz(n, x, z))),
        decryption: LocalOp::new(["key", "input"], key_controlled(n, |x, z| gates::pauli_xz(n, x, z).dagger())),
        evaluations,
        send_to_bob: vec![s("input")],
        return_to_alice: vec![s("input")],
    })
}

/// Alice moves the plaintext into a private vault and ships `|0>`; Bob
/// returns a classical tag naming the circuit, which Alice applies.
pub fn build_tag_evaluate_scheme(n: usize, circuits: &[Circuit]) -> Result<QheScheme> {
    check_n(n, 2)?;
    if circuits.is_empty() || circuits.len() > 16 {
        return Err(Error::BadParameters(format!("need 1..=16 circuits, got {}", circuits.len())));
    }
    let d = 1 << n;
    let t = circuits.len();
    let swap = CMatrix::permutation(&(0..d * d).map(|i| (i % d) * d + i / d).collect::<Vec<_>>());
    let mut decrypt = CMatrix::zeros(t * d, t * d);
    for (c, circ) in circuits.iter().enumerate() {
        if circ.matrix.rows() != d {
            return Err(Error::BadParameters(format!("circuit `{}` does not act on {n} qubits", circ.id)));
        }
        for i in 0..d {
            for j in 0..d {
                decrypt[(c * d + i, c * d + j)] = circ.matrix[(i, j)];
            }
        }
    }
    QheScheme::new(RawScheme {
        name: format!("tag-evaluate-n{n}"),
        registers: vec![(s("input"), d), (s("vault"), d), (s("tag"), t)],
        roles: roles(&[("input", Role::Input), ("vault", Role::AncA), ("tag", Role::AncB)]),
        output: s("vault"),
        key_state: None,
        resource_state: None,
        ancilla_states: BTreeMap::new(),
        encryption: LocalOp::new(["input", "vault"], swap),
        decryption: LocalOp::new(["tag", "vault"], decrypt),
        evaluations: circuits
            .iter()
            .enumerate()
            .map(|(c, circ)| Evaluation {
                id: circ.id.clone(),
                footprint: Some(vec![s("tag")]),
                u_c: gates::shift(t, c),
                w_c: circ.matrix.clone(),
            })
            .collect(),
        send_to_bob: vec![s("input")],
        return_to_alice: vec![s("tag")],
    })
}

fn check_problem_dims(dims: (usize, usize, usize)) -> Result<()> {
    let (a1, a2, b) = dims;
    if a1 == 0 || a2 == 0 || b == 0 || a1 * a2 * b > 1 << 12 {
        return Err(Error::BadParameters(format!("dims {dims:?} must be positive with product at most 4096")));
    }
    Ok(())
}

/// `U = (V_A (x) I_B)(I_A1 (x) W_A2B)` with seeded Haar factors and fixed
/// states: Bob's share only ever sees `phi` and `gamma`.
pub fn build_constructed_secure_problem(dims: (usize, usize, usize), seed: u64) -> Result<LocalisationProblem> {
    check_problem_dims(dims)?;
    let (a1, a2, b) = dims;
    let va = random_unitary(a1 * a2, derive_seed(seed, 0));
    let w = random_unitary(a2 * b, derive_seed(seed, 1));
    let u = &va.kron(&CMatrix::identity(b)) * &CMatrix::identity(a1).kron(&w);
    LocalisationProblem::new(dims, u, random_ket(a2, derive_seed(seed, 2)), random_ket(b, derive_seed(seed, 3)))
}

/// Split `B = B1 (x) B2` with `dim B1 = d_A1`. The plaintext is swapped into
/// `B1` and copied back onto `A1` by a controlled shift, leaving
/// `sum_x psi_x |x>_A1 |x>_B1`; seeded Haar unitaries then act on each side.
pub fn build_leaky_problem(dims: (usize, usize, usize), seed: u64) -> Result<LocalisationProblem> {
    check_problem_dims(dims)?;
    let (a1, a2, b) = dims;
    if b % a1 != 0 {
        return Err(Error::BadParameters(format!("d_A1 = {a1} must divide d_B = {b}")));
    }
    let b2 = b / a1;
    // Basis index (x, m, y, z) over (A1, A2, B1, B2) maps to ((x + y) mod a1, m, x, z).
    let index = |x: usize, m: usize, y: usize, z: usize| ((x * a2 + m) * a1 + y) * b2 + z;
    let mut perm = vec![0; a1 * a2 * b];
    for x in 0..a1 {
        for m in 0..a2 {
            for y in 0..a1 {
                for z in 0..b2 {
                    perm[index(x, m, y, z)] = index((x + y) % a1, m, x, z);
                }
            }
        }
    }
    let va = random_unitary(a1 * a2, derive_seed(seed, 0));
    let vb = random_unitary(b, derive_seed(seed, 1));
    let u = &va.kron(&vb) * &CMatrix::permutation(&perm);
    LocalisationProblem::new(dims, u, random_ket(a2, derive_seed(seed, 2)), Ket::basis(b, 0))
}

fn param<'a>(params: &'a Params, key: &str) -> Option<&'a str> {
    params.get(key).map(String::as_str)
}

fn param_usize(params: &Params, key: &str, default: Option<usize>) -> Result<usize> {
    match param(params, key) {
        Some(v) => v.trim().parse().map_err(|_| Error::BadParameters(format!("`{key}` must be an integer, got `{v}`"))),
        None => default.ok_or_else(|| Error::BadParameters(format!("missing parameter `{key}`"))),
    }
}

fn param_bool(params: &Params, key: &str) -> Result<bool> {
    match param(params, key) {
        None => Ok(false),
        Some("true" | "1" | "yes") => Ok(true),
        Some("false" | "0" | "no") => Ok(false),
        Some(v) => Err(Error::BadParameters(format!("`{key}` must be a boolean, got `{v}`"))),
    }
}

fn param_dims(params: &Params) -> Result<(usize, usize, usize)> {
    let v = param(params, "dims").ok_or_else(|| Error::BadParameters("missing parameter `dims`".into()))?;
    let parts: Vec<usize> = v
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::BadParameters(format!("`dims` must be three integers, got `{v}`")))?;
    match parts.as_slice() {
        [a, b, c] => Ok((*a, *b, *c)),
        _ => Err(Error::BadParameters(format!("`dims` must be three integers, got `{v}`"))),
    }
}

fn reject_unknown(params: &Params, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::BadParameters(format!("unknown parameter `{k}`"))),
        None => Ok(()),
    }
}

pub const SCHEME_BUILDERS: &[&str] = &["identity", "qotp", "tag-evaluate"];
pub const PROBLEM_BUILDERS: &[&str] = &["constructed-secure", "leaky"];

/// Build a scheme by name: `identity` (n, S), `qotp` (n, hadamard),
/// `tag-evaluate` (n, S).
pub fn build_scheme(name: &str, params: &Params) -> Result<QheScheme> {
    match name {
        "identity" => {
            reject_unknown(params, &["n", "S"])?;
            let n = param_usize(params, "n", Some(1))?;
            let set = param(params, "S").unwrap_or(if n == 2 { "II,SWAP" } else { "paulis" });
            build_identity_scheme(n, &parse_circuit_set(n, set)?)
        }
        "qotp" => {
            reject_unknown(params, &["n", "hadamard"])?;
            build_qotp_scheme(param_usize(params, "n", Some(1))?, param_bool(params, "hadamard")?)
        }
        "tag-evaluate" => {
            reject_unknown(params, &["n", "S"])?;
            let n = param_usize(params, "n", Some(1))?;
            build_tag_evaluate_scheme(n, &parse_circuit_set(n, param(params, "S").unwrap_or("paulis"))?)
        }
        _ => Err(Error::BadParameters(format!(
            "unknown scheme builder `{name}`; expected one of {}",
            SCHEME_BUILDERS.join(", ")
        ))),
    }
}

/// Build a localisation problem by name; `seed` applies unless `params`
/// carries its own.
pub fn build_problem(name: &str, params: &Params, seed: u64) -> Result<LocalisationProblem> {
    reject_unknown(params, &["dims", "seed"])?;
    let seed = match param(params, "seed") {
        Some(v) => v.trim().parse().map_err(|_| Error::BadParameters(format!("`seed` must be an integer, got `{v}`")))?,
        None => seed,
    };
    match name {
        "constructed-secure" => build_constructed_secure_problem(param_dims(params)?, seed),
        "leaky" => build_leaky_problem(param_dims(params)?, seed),
        _ => Err(Error::BadParameters(format!(
            "unknown problem builder `{name}`; expected one of {}",
            PROBLEM_BUILDERS.join(", ")
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "kebab-case")]
pub enum Expectation {
    Scheme {
        security: Verdict,
        completeness: Verdict,
        theorem1: Verdict,
    },
    Problem {
        localised: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeCatalogEntry {
    pub name: String,
    pub builder: String,
    pub params: Params,
    pub expected: Expectation,
}

fn entry(name: &str, builder: &str, params: &[(&str, &str)], expected: Expectation) -> SchemeCatalogEntry {
    SchemeCatalogEntry {
        name: name.into(),
        builder: builder.into(),
        params: params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        expected,
    }
}

fn scheme(security: Verdict, completeness: Verdict, theorem1: Verdict) -> Expectation {
    Expectation::Scheme {
        security,
        completeness,
        theorem1,
    }
}

pub fn catalog() -> Vec<SchemeCatalogEntry> {
    use Verdict::*;
    vec![
        entry("identity-n1", "identity", &[("n", "1"), ("S", "I,X")], scheme(Fail, Pass, Inapplicable)),
        entry("identity-n2", "identity", &[("n", "2"), ("S", "II,SWAP")], scheme(Fail, Pass, Inapplicable)),
        entry("qotp-n1", "qotp", &[("n", "1")], scheme(Pass, Pass, Inapplicable)),
        entry("qotp-n2", "qotp", &[("n", "2")], scheme(Pass, Pass, Inapplicable)),
        entry("qotp-n1-hadamard", "qotp", &[("n", "1"), ("hadamard", "true")], scheme(Pass, Fail, Inapplicable)),
        entry("tag-evaluate-ixz", "tag-evaluate", &[("n", "1"), ("S", "I,X,Z")], scheme(Pass, Pass, Pass)),
        entry("tag-evaluate-paulis", "tag-evaluate", &[("n", "1"), ("S", "I,X,Z,XZ")], scheme(Pass, Pass, Pass)),
        entry("tag-evaluate-n2", "tag-evaluate", &[("n", "2"), ("S", "II,SWAP,XZ,HH")], scheme(Pass, Pass, Pass)),
        entry(
            "constructed-secure-222",
            "constructed-secure",
            &[("dims", "2,2,2"), ("seed", "7")],
            Expectation::Problem { localised: true },
        ),
        entry("leaky-222", "leaky", &[("dims", "2,2,2"), ("seed", "1")], Expectation::Problem { localised: false }),
    ]
}

/// Tolerance used when verifying catalog entries.
pub const CATALOG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogOutcome {
    pub name: String,
    pub expected: Expectation,
    pub actual: Expectation,
    pub matches: bool,
}

/// Run the checkers an entry makes claims about and compare.
pub fn verify_entry(e: &SchemeCatalogEntry) -> Result<CatalogOutcome> {
    let actual = match &e.expected {
        Expectation::Scheme { .. } => {
            let s = build_scheme(&e.builder, &e.params)?;
            let psi = Ket::basis(s.plaintext_dim(), 0);
            Expectation::Scheme {
                security: qhe::check_security(&s, CATALOG_TOL)?.verdict,
                completeness: qhe::check_completeness(&s, CATALOG_TOL)?.verdict,
                theorem1: qhe::check_theorem1(&s, &psi, CATALOG_TOL)?.verdict,
            }
        }
        Expectation::Problem { .. } => {
            let p = build_problem(&e.builder, &e.params, 0)?;
            match localiser::localise(&p) {
                Ok(_) => Expectation::Problem { localised: true },
                Err(Error::Leakage { .. }) => Expectation::Problem { localised: false },
                Err(other) => return Err(other),
            }
        }
    };
    Ok(CatalogOutcome {
        name: e.name.clone(),
        matches: actual == e.expected,
        expected: e.expected.clone(),
        actual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qhe::{check_completeness, check_security, check_theorem1, run_pipeline, ReasonCode};
    use crate::qinfo::{mutual_information, DensityOp};
    use crate::localiser::{check_zero_leakage, A1, A2};
    use crate::tensor::{fidelity_pure, eig_hermitian, unitaries_equal_up_to_phase};

    #[test]
    fn circuit_parsing() {
        let set = parse_circuit_set(1, "IXZ").unwrap();
        assert_eq!(set.iter().map(|c| c.id.as_str()).collect::<Vec<_>>(), ["I", "X", "Z"]);
        let xz = parse_circuit(1, "XZ").unwrap();
        assert_eq!(xz.matrix, &gates::pauli_x() * &gates::pauli_z());
        let two = parse_circuit_set(2, "II,SWAP,XZ").unwrap();
        assert_eq!(two[1].matrix, gates::swap());
        assert_eq!(two[2].matrix, gates::pauli_x().kron(&gates::pauli_z()));
        assert_eq!(parse_circuit(2, "XZ_I").unwrap().matrix, xz.matrix.kron(&CMatrix::identity(2)));
        assert!(parse_circuit(1, "Q").is_err());
        assert!(parse_circuit(2, "X").is_err());
        assert!(parse_circuit(3, "SWAP").is_err());
        assert_eq!(parse_circuit_set(2, "paulis").unwrap().len(), 16);
    }

    #[test]
    fn pauli_ids_match_matrices() {
        for c in paulis(2) {
            let again = parse_circuit(2, &c.id).unwrap();
            assert!(unitaries_equal_up_to_phase(&again.matrix, &c.matrix, 1e-12).unwrap(), "{}", c.id);
        }
    }

    #[test]
    fn identity_scheme_examples() {
        let s = build_identity_scheme(1, &parse_circuit_set(1, "I,X").unwrap()).unwrap();
        let c = check_completeness(&s, 1e-12).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        let sec = check_security(&s, 1e-9).unwrap();
        assert_eq!(sec.verdict, Verdict::Fail);
        assert!((sec.worst_metric - 1.0).abs() < 1e-12);
        let t = run_pipeline(&s, "I", &Ket::basis(2, 0)).unwrap();
        assert!((t.output.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);

        let s2 = build_identity_scheme(2, &parse_circuit_set(2, "II,SWAP").unwrap()).unwrap();
        let psi = Ket::basis(2, 0).kron(&Ket::uniform(2));
        let t = run_pipeline(&s2, "SWAP", &psi).unwrap();
        let want = Ket::uniform(2).kron(&Ket::basis(2, 0)).projector();
        assert_eq!(t.output.matrix().max_abs_diff(&want).unwrap(), 0.0);
        let r = check_theorem1(&s2, &Ket::basis(4, 0), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Inapplicable);
        assert_eq!(r.reason, Some(ReasonCode::SecurityPreconditionFailed));
    }

    /// Averages the plaintext's image over the key branches by hand.
    fn qotp_branch_average(n: usize, psi: &Ket) -> CMatrix {
        let m = 1 << n;
        let mut acc = CMatrix::zeros(m, m);
        for x in 0..m {
            for z in 0..m {
                let k = psi.evolve(&gates::pauli_xz(n, x, z)).unwrap();
                acc = &acc + &k.projector();
            }
        }
        acc.scale_real(1.0 / (m * m) as f64)
    }

    #[test]
    fn qotp_ciphertext_is_maximally_mixed() {
        for n in 1..=2 {
            let s = build_qotp_scheme(n, false).unwrap();
            let m = 1 << n;
            let mixed = CMatrix::identity(m).scale_real(1.0 / m as f64);
            for p in localiser::probe_states(m) {
                let t = run_pipeline(&s, &s.circuit_ids()[0], &p).unwrap();
                assert!(t.rho_b1.matrix().max_abs_diff(&mixed).unwrap() <= 1e-10);
                assert!(qotp_branch_average(n, &p).max_abs_diff(&mixed).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn qotp_examples() {
        let s = build_qotp_scheme(1, false).unwrap();
        let t = run_pipeline(&s, "X", &Ket::basis(2, 0)).unwrap();
        assert!(t.output.matrix().max_abs_diff(&Ket::basis(2, 1).projector()).unwrap() <= 1e-9);
        assert_eq!(check_security(&s, 1e-10).unwrap().verdict, Verdict::Pass);
        assert_eq!(check_completeness(&s, 1e-9).unwrap().verdict, Verdict::Pass);
        let r = check_theorem1(&s, &Ket::basis(2, 0), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Inapplicable);
        assert_eq!(r.reason, Some(ReasonCode::MessageCorrelatedWithRetainedKey));
        assert!(r.worst_metric > 0.5);
    }

    #[test]
    fn qotp_hadamard_breaks_completeness() {
        let s = build_qotp_scheme(1, true).unwrap();
        let t = run_pipeline(&s, "H", &Ket::basis(2, 0)).unwrap();
        let plus = Ket::uniform(2);
        let f = plus.amplitudes().iter().zip(t.output.matrix().apply(plus.amplitudes()).unwrap()).map(|(a, b)| a.conj() * b).sum::<C64>();
        assert!((f.re - 0.5).abs() < 1e-12);
        assert_eq!(check_completeness(&s, 1e-9).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn qotp_t1_localisation_recovers_plaintext() {
        let s = build_qotp_scheme(1, false).unwrap();
        let p = qhe::t1_localisation_problem(&s).unwrap();
        assert_eq!(p.dims(), (2, 8, 2));
        let res = localiser::localise(&p).unwrap();
        let psi = random_ket(2, 17);
        let t = run_pipeline(&s, "I", &psi).unwrap();
        let rho_a1 = DensityOp::new(p.layout().sub_layout(&[A1, A2]).unwrap(), t.rho_a1().unwrap().matrix().clone()).unwrap();
        let ex = localiser::extract_plaintext(&res, &rho_a1).unwrap();
        assert!(fidelity_pure(&ex.plaintext, &psi).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn tag_evaluate_examples() {
        let s = build_tag_evaluate_scheme(1, &parse_circuit_set(1, "I,X,Z").unwrap()).unwrap();
        assert_eq!(s.layout().dim_of("tag").unwrap(), 3);
        assert_eq!(check_security(&s, 1e-12).unwrap().verdict, Verdict::Pass);
        assert_eq!(check_completeness(&s, 1e-9).unwrap().verdict, Verdict::Pass);
        let r = check_theorem1(&s, &Ket::basis(2, 0), 1e-10).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.worst_metric.abs() <= 1e-12);
        for c in s.circuit_ids() {
            let psi = random_ket(2, 5);
            let t = run_pipeline(&s, &c, &psi).unwrap();
            let want = psi.evolve(&s.evaluation(&c).unwrap().w_c).unwrap();
            let f = want.amplitudes().iter().zip(t.output.matrix().apply(want.amplitudes()).unwrap()).map(|(a, b)| a.conj() * b).sum::<C64>();
            assert!(f.re >= 1.0 - 1e-9);
        }
        let s4 = build_tag_evaluate_scheme(1, &parse_circuit_set(1, "I,X,Z,XZ").unwrap()).unwrap();
        let tag = s4.layout().dim_of("tag").unwrap();
        let audit = qhe::audit_dimension(&num_bigint::BigUint::from(4u32)).unwrap();
        assert_eq!(1u64 << audit.qubits_required, tag as u64);
    }

    #[test]
    fn constructed_problem_examples() {
        let p = build_constructed_secure_problem((2, 2, 2), 7).unwrap();
        let c = check_zero_leakage(&p, 1e-10).unwrap();
        assert!(c.passed);
        assert!(localiser::localise(&p).unwrap().reconstruction_residual <= 1e-8);

        // Rank equals that of Bob's share of W(phi (x) gamma), computed directly.
        let p = build_constructed_secure_problem((3, 2, 4), 3).unwrap();
        let w = random_unitary(8, derive_seed(3, 1));
        let inner = p.phi().kron(p.gamma()).evolve(&w).unwrap();
        let l = crate::tensor::Layout::new([("A2", 2), ("B", 4)]).unwrap();
        let rho_b = l.reduce_ket(&inner, &["B"]).unwrap();
        let rank = eig_hermitian(&rho_b).unwrap().values.iter().filter(|&&x| x > 1e-10).count();
        assert_eq!(localiser::localise(&p).unwrap().rank_r, rank);
    }

    #[test]
    fn leaky_problem_examples() {
        for seed in 0..5 {
            let p = build_leaky_problem((2, 2, 2), seed).unwrap();
            let c = check_zero_leakage(&p, 1e-9).unwrap();
            assert!(!c.passed && c.max_deviation >= 0.99);
            assert!(matches!(localiser::localise(&p), Err(Error::Leakage { .. })));
            let out = p.output(&Ket::uniform(2)).unwrap();
            let rho = DensityOp::from_ket(p.layout().clone(), &out).unwrap();
            let mi = mutual_information(&rho, &[A1, A2]).unwrap();
            assert!(mi > 0.9, "{mi}");
        }
        assert!(build_leaky_problem((3, 2, 4), 0).is_err());
    }

    #[test]
    fn builders_are_deterministic() {
        assert_eq!(build_constructed_secure_problem((2, 4, 2), 9).unwrap(), build_constructed_secure_problem((2, 4, 2), 9).unwrap());
        assert_eq!(build_leaky_problem((2, 2, 8), 9).unwrap(), build_leaky_problem((2, 2, 8), 9).unwrap());
        assert_eq!(build_qotp_scheme(2, false).unwrap(), build_qotp_scheme(2, false).unwrap());
    }

    #[test]
    fn registry_rejects_bad_parameters() {
        let mut p = Params::new();
        p.insert("n".into(), "4".into());
        assert!(build_scheme("qotp", &p).is_err());
        p.insert("n".into(), "1".into());
        p.insert("bogus".into(), "1".into());
        assert!(build_scheme("qotp", &p).is_err());
        assert!(build_scheme("nope", &Params::new()).is_err());
        let mut q = Params::new();
        q.insert("dims".into(), "2,2".into());
        assert!(build_problem("leaky", &q, 0).is_err());
    }

    #[test]
    fn catalog_verdicts_hold() {
        for e in catalog() {
            let out = verify_entry(&e).unwrap();
            assert!(out.matches, "{}: expected {:?}, got {:?}", e.name, out.expected, out.actual);
        }
    }

    #[test]
    fn catalog_entries_use_valid_builders() {
        for e in catalog() {
            match e.expected {
                Expectation::Scheme { .. } => assert!(build_scheme(&e.builder, &e.params).is_ok(), "{}", e.name),
                Expectation::Problem { .. } => assert!(build_problem(&e.builder, &e.params, 0).is_ok(), "{}", e.name),
            }
        }
    }
}
