//! Parameterized circuits with named parameters shared across gate
//! occurrences.
//!
//! Each parameterized gate refers to its parameter by name and carries a
//! stable occurrence id, a sign multiplier and an additive shift. The angle a
//! gate executes with is `sign * value + shift`.
//!
//! # Text format
//!
//! One gate per line: `KIND q0[,q1] [angle|@param[±shift][*sign]]`. `H` and
//! `CNOT` take no angle. Lines starting with `#` are comments, except for two
//! directives that carry the register size and parameter values:
//!
//! ```text
//! # qubits 2
//! # param theta 0.3
//! RX 0 @theta
//! RX 1 @theta+1.5707963267948966*-1
//! RZZ 0,1 -0.2
//! CNOT 0,1
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::simcore::{Gate, GateKind, StateVector, C64, MAX_QUBITS};

/// Largest register for which [`ParamCircuit::unitary_of`] builds a matrix.
pub const MAX_UNITARY_QUBITS: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct ParamRef {
    pub name: String,
    pub occurrence: usize,
    pub sign: f64,
    pub shift: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AngleSource {
    /// `H` and `CNOT`.
    None,
    Literal(f64),
    Param(ParamRef),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateInstance {
    pub kind: GateKind,
    qubits: [usize; 2],
    pub angle: AngleSource,
}

impl GateInstance {
    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn occurrence(&self) -> Option<usize> {
        match &self.angle {
            AngleSource::Param(r) => Some(r.occurrence),
            _ => None,
        }
    }
}

/// Where a parameter occurs in a circuit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Occurrence {
    pub id: usize,
    pub gate_index: usize,
    pub sign: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamCircuit {
    n_qubits: usize,
    gates: Vec<GateInstance>,
    params: Vec<(String, f64)>,
    next_occurrence: usize,
}

impl ParamCircuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount {
                got: n_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(ParamCircuit {
            n_qubits,
            gates: Vec::new(),
            params: Vec::new(),
            next_occurrence: 0,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Two-qubit cost in CNOTs when each RZZ is compiled as CNOT·RZ·CNOT.
    pub fn cnot_equivalent_count(&self) -> usize {
        self.count(GateKind::CNOT) + 2 * self.count(GateKind::RZZ)
    }

    /// Declared parameters in declaration order.
    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    /// Declares `name` with `value`. Re-declaring with the same value is a
    /// no-op; a different value is an error.
    pub fn declare(&mut self, name: &str, value: f64) -> Result<()> {
        match self.value(name) {
            Some(v) if v.to_bits() == value.to_bits() => Ok(()),
            Some(v) => Err(Error::ParameterConflict {
                name: name.to_string(),
                first: v,
                second: value,
            }),
            None => {
                check_name(name)?;
                self.params.push((name.to_string(), value));
                Ok(())
            }
        }
    }

    pub fn set_value(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = self
            .params
            .iter_mut()
            .find(|(n, _)| n == name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        slot.1 = value;
        Ok(())
    }

    fn check_qubits(&self, kind: GateKind, qubits: &[usize]) -> Result<[usize; 2]> {
        if qubits.len() != kind.arity() {
            return Err(Error::Arity {
                kind: kind.name(),
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitIndex {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok([qubits[0], *qubits.last().unwrap()])
    }

    /// Appends `H` or `CNOT`.
    pub fn add_fixed(&mut self, kind: GateKind, qubits: &[usize]) -> Result<()> {
        if kind.is_parameterized() {
            return Err(Error::InvalidValue(format!("{kind} needs an angle")));
        }
        let qubits = self.check_qubits(kind, qubits)?;
        self.gates.push(GateInstance {
            kind,
            qubits,
            angle: AngleSource::None,
        });
        Ok(())
    }

    pub fn add_literal(&mut self, kind: GateKind, qubits: &[usize], angle: f64) -> Result<()> {
        if !kind.is_parameterized() {
            return Err(Error::InvalidValue(format!("{kind} takes no angle")));
        }
        let qubits = self.check_qubits(kind, qubits)?;
        self.gates.push(GateInstance {
            kind,
            qubits,
            angle: AngleSource::Literal(angle),
        });
        Ok(())
    }

    /// Appends a gate driven by the declared parameter `name`, scaled by
    /// `sign`. Returns the new occurrence id.
    pub fn add_param(
        &mut self,
        kind: GateKind,
        qubits: &[usize],
        name: &str,
        sign: f64,
    ) -> Result<usize> {
        self.add_param_shifted(kind, qubits, name, sign, 0.0)
    }

    fn add_param_shifted(
        &mut self,
        kind: GateKind,
        qubits: &[usize],
        name: &str,
        sign: f64,
        shift: f64,
    ) -> Result<usize> {
        if !kind.is_parameterized() {
            return Err(Error::InvalidValue(format!("{kind} takes no angle")));
        }
        if self.value(name).is_none() {
            return Err(Error::UnknownParameter(name.to_string()));
        }
        let qubits = self.check_qubits(kind, qubits)?;
        let occurrence = self.next_occurrence;
        self.next_occurrence += 1;
        self.gates.push(GateInstance {
            kind,
            qubits,
            angle: AngleSource::Param(ParamRef {
                name: name.to_string(),
                occurrence,
                sign,
                shift,
            }),
        });
        Ok(occurrence)
    }

    /// Occurrences of `name`, in gate order.
    pub fn occurrences(&self, name: &str) -> Vec<Occurrence> {
        self.gates
            .iter()
            .enumerate()
            .filter_map(|(gate_index, g)| match &g.angle {
                AngleSource::Param(r) if r.name == name => Some(Occurrence {
                    id: r.occurrence,
                    gate_index,
                    sign: r.sign,
                }),
                _ => None,
            })
            .collect()
    }

    /// Returns a copy with every parameter set from `values`. The map must
    /// name each declared parameter and nothing else.
    pub fn bind(&self, values: &HashMap<String, f64>) -> Result<Self> {
        if let Some(unknown) = values.keys().find(|k| self.value(k).is_none()) {
            return Err(Error::UnknownParameter(unknown.clone()));
        }
        let mut out = self.clone();
        for (name, value) in out.params.iter_mut() {
            *value = *values
                .get(name)
                .ok_or_else(|| Error::MissingParameter(name.clone()))?;
        }
        Ok(out)
    }

    /// Returns a copy in which only occurrence `id` executes with its angle
    /// offset by `delta`.
    pub fn shift_occurrence(&self, id: usize, delta: f64) -> Result<Self> {
        let mut out = self.clone();
        let gate = out
            .gates
            .iter_mut()
            .find(|g| match &g.angle {
                AngleSource::Param(r) => r.occurrence == id,
                _ => false,
            })
            .ok_or(Error::UnknownOccurrence(id))?;
        if let AngleSource::Param(r) = &mut gate.angle {
            r.shift += delta;
        }
        Ok(out)
    }

    /// [`shift_occurrence`](Self::shift_occurrence) addressed by gate index,
    /// which also reports literal gates.
    pub fn shift_gate(&self, gate_index: usize, delta: f64) -> Result<Self> {
        match self.gates.get(gate_index).map(|g| &g.angle) {
            Some(AngleSource::Param(r)) => self.shift_occurrence(r.occurrence, delta),
            Some(_) => Err(Error::LiteralShift(gate_index)),
            None => Err(Error::UnknownOccurrence(gate_index)),
        }
    }

    /// Circuit implementing the entrywise complex conjugate of this
    /// circuit's unitary, built gate by gate: RX, P and RZZ flip their angle,
    /// RY, H and CNOT are real and stay.
    pub fn conjugate(&self) -> Self {
        let mut out = self.clone();
        for g in &mut out.gates {
            if matches!(g.kind, GateKind::RX | GateKind::P | GateKind::RZZ) {
                negate(&mut g.angle);
            }
        }
        out
    }

    /// Inverse circuit: reversed order, negated angles. Occurrence ids are
    /// kept.
    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        out.gates.reverse();
        for g in &mut out.gates {
            negate(&mut g.angle);
        }
        out
    }

    /// Appends `other` with its qubits moved up by `offset`. Parameters are
    /// merged by name and `other`'s occurrences get fresh ids.
    pub fn append(&mut self, other: &ParamCircuit, offset: usize) -> Result<()> {
        if other.n_qubits + offset > self.n_qubits {
            return Err(Error::Dimension(format!(
                "cannot place a {}-qubit circuit at offset {offset} in a {}-qubit register",
                other.n_qubits, self.n_qubits
            )));
        }
        for (name, value) in &other.params {
            self.declare(name, *value)?;
        }
        for g in &other.gates {
            let qubits: Vec<usize> = g.qubits().iter().map(|q| q + offset).collect();
            match &g.angle {
                AngleSource::None => self.add_fixed(g.kind, &qubits)?,
                AngleSource::Literal(a) => self.add_literal(g.kind, &qubits, *a)?,
                AngleSource::Param(r) => {
                    self.add_param_shifted(g.kind, &qubits, &r.name, r.sign, r.shift)?;
                }
            }
        }
        Ok(())
    }

    /// Same gates with every parameter reference replaced by its current
    /// angle. The result has no parameters.
    pub fn frozen(&self) -> Result<Self> {
        let mut out = ParamCircuit::new(self.n_qubits)?;
        for (g, r) in self.gates.iter().zip(self.resolved()?) {
            match g.angle {
                AngleSource::None => out.add_fixed(g.kind, g.qubits())?,
                _ => out.add_literal(g.kind, g.qubits(), r.angle)?,
            }
        }
        Ok(out)
    }

    /// Executed angle of gate `i`.
    pub fn angle_of(&self, i: usize) -> Result<f64> {
        match &self.gates[i].angle {
            AngleSource::None => Ok(0.0),
            AngleSource::Literal(a) => Ok(*a),
            AngleSource::Param(r) => {
                let v = self
                    .value(&r.name)
                    .ok_or_else(|| Error::UnknownParameter(r.name.clone()))?;
                Ok(r.sign * v + r.shift)
            }
        }
    }

    /// Gates with their angles resolved.
    pub fn resolved(&self) -> Result<Vec<Gate>> {
        let lookup: HashMap<&str, f64> =
            self.params.iter().map(|(n, v)| (n.as_str(), *v)).collect();
        self.gates
            .iter()
            .map(|g| {
                let angle = match &g.angle {
                    AngleSource::None => 0.0,
                    AngleSource::Literal(a) => *a,
                    AngleSource::Param(r) => {
                        let v = lookup
                            .get(r.name.as_str())
                            .ok_or_else(|| Error::UnknownParameter(r.name.clone()))?;
                        r.sign * v + r.shift
                    }
                };
                Ok(Gate {
                    kind: g.kind,
                    qubits: g.qubits,
                    angle,
                })
            })
            .collect()
    }

    pub fn run(&self, input: &StateVector) -> Result<StateVector> {
        if input.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "{}-qubit circuit applied to a {}-qubit state",
                self.n_qubits,
                input.n_qubits()
            )));
        }
        let mut state = input.clone();
        for gate in self.resolved()? {
            state.apply(&gate)?;
        }
        Ok(state)
    }

    /// Dense unitary; column `j` is the circuit applied to basis state `j`.
    pub fn unitary_of(&self) -> Result<CMatrix> {
        if self.n_qubits > MAX_UNITARY_QUBITS {
            return Err(Error::QubitCount {
                got: self.n_qubits,
                max: MAX_UNITARY_QUBITS,
            });
        }
        let gates = self.resolved()?;
        let dim = 1 << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut s = StateVector::basis(self.n_qubits, j)?;
            for g in &gates {
                s.apply(g)?;
            }
            m.set_column(
                j,
                &nalgebra::DVector::<C64>::from_column_slice(s.amplitudes()),
            );
        }
        Ok(m)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn negate(angle: &mut AngleSource) {
    match angle {
        AngleSource::None => {}
        AngleSource::Literal(a) => *a = -*a,
        AngleSource::Param(r) => {
            r.sign = -r.sign;
            r.shift = -r.shift;
        }
    }
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::InvalidValue(format!(
            "parameter name `{name}` must be non-empty [A-Za-z0-9_]"
        )));
    }
    Ok(())
}

impl fmt::Display for ParamCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# qubits {}", self.n_qubits)?;
        for (name, value) in &self.params {
            writeln!(f, "# param {name} {value:?}")?;
        }
        for g in &self.gates {
            let qs: Vec<String> = g.qubits().iter().map(|q| q.to_string()).collect();
            write!(f, "{} {}", g.kind, qs.join(","))?;
            match &g.angle {
                AngleSource::None => {}
                AngleSource::Literal(a) => write!(f, " {a:?}")?,
                AngleSource::Param(r) => {
                    write!(f, " @{}", r.name)?;
                    if r.shift != 0.0 {
                        write!(f, "{:+?}", r.shift)?;
                    }
                    if r.sign != 1.0 {
                        write!(f, "*{:?}", r.sign)?;
                    }
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for ParamCircuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        struct Line<'a> {
            no: usize,
            kind: GateKind,
            qubits: Vec<usize>,
            angle: Option<&'a str>,
        }
        let perr = |no: usize, msg: String| Error::Parse { line: no, msg };

        let mut declared_n = None;
        let mut params: Vec<(String, f64)> = Vec::new();
        let mut lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let words: Vec<&str> = comment.split_whitespace().collect();
                match words.as_slice() {
                    ["qubits", n] => {
                        declared_n = Some(n.parse::<usize>().map_err(|e| perr(no, e.to_string()))?)
                    }
                    ["param", name, value] => {
                        let v = value.parse::<f64>().map_err(|e| perr(no, e.to_string()))?;
                        params.push((name.to_string(), v));
                    }
                    _ => {}
                }
                continue;
            }
            let mut words = line.split_whitespace();
            let kind_word = words.next().unwrap_or_default();
            let kind = GateKind::from_name(kind_word)
                .ok_or_else(|| perr(no, format!("unknown gate `{kind_word}`")))?;
            let qubits = words
                .next()
                .ok_or_else(|| perr(no, "missing qubit list".into()))?
                .split(',')
                .map(|q| {
                    q.parse::<usize>()
                        .map_err(|e| perr(no, format!("qubit `{q}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let angle = words.next();
            if words.next().is_some() {
                return Err(perr(no, "trailing tokens".into()));
            }
            lines.push(Line {
                no,
                kind,
                qubits,
                angle,
            });
        }

        let inferred = lines
            .iter()
            .flat_map(|l| l.qubits.iter().copied())
            .max()
            .map_or(1, |m| m + 1);
        let mut circ = ParamCircuit::new(declared_n.unwrap_or(inferred))?;
        for (name, value) in &params {
            circ.declare(name, *value)
                .map_err(|e| perr(0, e.to_string()))?;
        }
        for l in lines {
            let wrap = |e: Error| perr(l.no, e.to_string());
            match (l.kind.is_parameterized(), l.angle) {
                (false, None) => circ.add_fixed(l.kind, &l.qubits).map_err(wrap)?,
                (false, Some(_)) => return Err(perr(l.no, format!("{} takes no angle", l.kind))),
                (true, None) => return Err(perr(l.no, format!("{} needs an angle", l.kind))),
                (true, Some(a)) => {
                    if let Some(reference) = a.strip_prefix('@') {
                        let (body, sign) = match reference.rsplit_once('*') {
                            Some((b, s)) => (
                                b,
                                s.parse::<f64>()
                                    .map_err(|e| perr(l.no, format!("sign `{s}`: {e}")))?,
                            ),
                            None => (reference, 1.0),
                        };
                        let split = body.find(['+', '-']).unwrap_or(body.len());
                        let (name, shift_text) = body.split_at(split);
                        let shift = if shift_text.is_empty() {
                            0.0
                        } else {
                            shift_text
                                .parse::<f64>()
                                .map_err(|e| perr(l.no, format!("shift `{shift_text}`: {e}")))?
                        };
                        circ.add_param_shifted(l.kind, &l.qubits, name, sign, shift)
                            .map_err(wrap)?;
                    } else {
                        let v = a
                            .parse::<f64>()
                            .map_err(|e| perr(l.no, format!("angle `{a}`: {e}")))?;
                        circ.add_literal(l.kind, &l.qubits, v).map_err(wrap)?;
                    }
                }
            }
        }
        Ok(circ)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{conj, frobenius_dist, identity};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn one_rx() -> ParamCircuit {
        let mut c = ParamCircuit::new(1).unwrap();
        c.declare("theta", 0.5).unwrap();
        c.add_param(GateKind::RX, &[0], "theta", 1.0).unwrap();
        c
    }

    fn bind1(c: &ParamCircuit, name: &str, v: f64) -> ParamCircuit {
        c.bind(&HashMap::from([(name.to_string(), v)])).unwrap()
    }

    #[test]
    fn bind_zero_is_identity_and_rebind() {
        let c = one_rx();
        let b = bind1(&c, "theta", 0.0);
        assert!(frobenius_dist(&b.unitary_of().unwrap(), &identity(2)) < 1e-15);
        let b2 = bind1(&b, "theta", PI);
        let mut lit = ParamCircuit::new(1).unwrap();
        lit.add_literal(GateKind::RX, &[0], PI).unwrap();
        assert!(frobenius_dist(&b2.unitary_of().unwrap(), &lit.unitary_of().unwrap()) < 1e-15);
        // source untouched
        assert_eq!(c.value("theta"), Some(0.5));
    }

    #[test]
    fn bind_errors() {
        let c = one_rx();
        assert!(matches!(
            c.bind(&HashMap::new()),
            Err(Error::MissingParameter(_))
        ));
        let extra = HashMap::from([("theta".to_string(), 0.1), ("phi".to_string(), 0.2)]);
        assert!(matches!(c.bind(&extra), Err(Error::UnknownParameter(_))));
    }

    #[test]
    fn shared_parameter_binds_everywhere() {
        let mut c = ParamCircuit::new(2).unwrap();
        c.declare("theta", 0.0).unwrap();
        c.add_param(GateKind::RX, &[0], "theta", 1.0).unwrap();
        c.add_param(GateKind::RY, &[1], "theta", 1.0).unwrap();
        let b = bind1(&c, "theta", 0.42);
        assert_eq!(b.angle_of(0).unwrap(), 0.42);
        assert_eq!(b.angle_of(1).unwrap(), 0.42);
    }

    #[test]
    fn shift_single_occurrence() {
        let mut c = ParamCircuit::new(2).unwrap();
        c.declare("theta", 0.3).unwrap();
        let g1 = c.add_param(GateKind::RX, &[0], "theta", 1.0).unwrap();
        c.add_param(GateKind::RX, &[1], "theta", 1.0).unwrap();
        let s = c.shift_occurrence(g1, FRAC_PI_2).unwrap();
        assert!((s.angle_of(0).unwrap() - (0.3 + FRAC_PI_2)).abs() < 1e-15);
        assert_eq!(s.angle_of(1).unwrap(), 0.3);
        let back = s.shift_occurrence(g1, -FRAC_PI_2).unwrap();
        assert_eq!(back.angle_of(0).unwrap(), 0.3);
        assert!(matches!(
            c.shift_occurrence(99, 0.1),
            Err(Error::UnknownOccurrence(99))
        ));
        c.add_literal(GateKind::RX, &[0], 0.1).unwrap();
        assert!(matches!(c.shift_gate(2, 0.1), Err(Error::LiteralShift(2))));
    }

    #[test]
    fn conjugate_rules() {
        let mut c = ParamCircuit::new(2).unwrap();
        c.add_literal(GateKind::RX, &[0], 0.7).unwrap();
        c.add_fixed(GateKind::CNOT, &[0, 1]).unwrap();
        let cc = c.conjugate();
        assert_eq!(cc.gates()[0].angle, AngleSource::Literal(-0.7));
        assert_eq!(cc.gates()[1], c.gates()[1]);
        let u = c.unitary_of().unwrap();
        assert!(frobenius_dist(&cc.unitary_of().unwrap(), &conj(&u)) < 1e-14);
        assert!(frobenius_dist(&cc.conjugate().unitary_of().unwrap(), &u) < 1e-15);
    }

    #[test]
    fn unitary_examples() {
        let empty = ParamCircuit::new(2).unwrap();
        assert!(frobenius_dist(&empty.unitary_of().unwrap(), &identity(4)) < 1e-15);

        let mut h = ParamCircuit::new(1).unwrap();
        h.add_fixed(GateKind::H, &[0]).unwrap();
        let m = h.unitary_of().unwrap();
        let r = FRAC_1_SQRT_2;
        for (idx, want) in [r, r, r, -r].iter().enumerate() {
            assert!((m[(idx / 2, idx % 2)].re - want).abs() < 1e-15);
        }

        let theta = 0.61;
        let mut rzz = ParamCircuit::new(2).unwrap();
        rzz.add_literal(GateKind::RZZ, &[0, 1], theta).unwrap();
        let m = rzz.unitary_of().unwrap();
        let phases = [theta / 2.0, -theta / 2.0, -theta / 2.0, theta / 2.0];
        for (i, ph) in phases.iter().enumerate() {
            assert!((m[(i, i)] - C64::from_polar(1.0, *ph)).norm() < 1e-14);
        }

        let big = ParamCircuit::new(7).unwrap();
        assert!(matches!(big.unitary_of(), Err(Error::QubitCount { .. })));
    }

    #[test]
    fn run_inverse_restores_input() {
        let mut c = ParamCircuit::new(2).unwrap();
        c.add_fixed(GateKind::H, &[0]).unwrap();
        c.add_literal(GateKind::RY, &[1], 0.4).unwrap();
        c.add_fixed(GateKind::CNOT, &[0, 1]).unwrap();
        c.add_literal(GateKind::P, &[1], 1.1).unwrap();
        let input = StateVector::basis(2, 1).unwrap();
        let out = c.run(&input).unwrap();
        let back = c.adjoint().run(&out).unwrap();
        for (a, b) in back.amplitudes().iter().zip(input.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(ParamCircuit::new(2).unwrap().run(&input).unwrap() == input);
        assert!(c.run(&StateVector::zero(3).unwrap()).is_err());
    }

    #[test]
    fn arity_and_qubit_checks() {
        let mut c = ParamCircuit::new(2).unwrap();
        assert!(matches!(
            c.add_literal(GateKind::RZZ, &[0], 0.1),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            c.add_fixed(GateKind::CNOT, &[1, 1]),
            Err(Error::DuplicateQubit(1))
        ));
        assert!(c.add_literal(GateKind::H, &[0], 0.1).is_err());
        assert!(matches!(
            c.add_param(GateKind::RX, &[0], "nope", 1.0),
            Err(Error::UnknownParameter(_))
        ));
    }

    #[test]
    fn text_round_trip() {
        let mut c = ParamCircuit::new(2).unwrap();
        c.declare("theta", 0.3).unwrap();
        c.add_param(GateKind::RX, &[0], "theta", 1.0).unwrap();
        c.add_fixed(GateKind::CNOT, &[0, 1]).unwrap();
        c.add_literal(GateKind::RZZ, &[0, 1], -0.2).unwrap();
        let c = c.adjoint().shift_occurrence(0, FRAC_PI_2).unwrap();
        let text = c.to_text();
        assert!(text.contains("@theta-1.5707963267948966*-1.0") || text.contains("@theta"));
        let parsed: ParamCircuit = text.parse().unwrap();
        assert_eq!(parsed.to_text(), text);
        assert!(frobenius_dist(&parsed.unitary_of().unwrap(), &c.unitary_of().unwrap()) < 1e-15);
    }

    #[test]
    fn parse_errors_have_lines() {
        let err = "H 0\nFOO 1\n".parse::<ParamCircuit>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = "RX 0\n".parse::<ParamCircuit>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = "RX 0 @ghost\n".parse::<ParamCircuit>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
