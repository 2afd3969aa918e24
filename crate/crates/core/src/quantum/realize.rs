//! Explicit matrices for a handful of states: `Π_a = |a⟩⟨a| ⊗ π_a ⊗ |0…0⟩⟨0…0|`
//! on an agent register (one basis vector per state) times `n` external qubits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::QuantumModel;
use crate::state::StateExpr;
use crate::{Error, Result};

type CMatrix = DMatrix<Complex64>;
type CVector = DVector<Complex64>;

/// Tolerance for idempotence, Hermiticity and orthogonality.
pub const PROJECTOR_TOL: f64 = 1e-12;
/// Tolerance for traces.
pub const TRACE_TOL: f64 = 1e-9;
/// Tolerance for residuals of constructed maps.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitBudget {
    pub external_qubits: u32,
    pub agent_dim: usize,
}

impl Default for QubitBudget {
    fn default() -> Self {
        QubitBudget {
            external_qubits: 3,
            agent_dim: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExplicitRealization {
    pub external_qubits: u32,
    pub agent_dim: usize,
    pub states: Vec<StateExpr>,
    /// `π_a` on the full external register.
    pub qubit_parts: Vec<CMatrix>,
    /// `Π_a` on agent ⊗ external.
    pub projectors: Vec<CMatrix>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Orthonormal basis of the column span, by two passes of modified Gram–Schmidt.
fn orthonormal_columns(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > tol {
            basis.push(v / c(norm));
        }
    }
    basis
}

fn projector_onto(basis: &[CVector], dim: usize) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    for b in basis {
        p += b * b.adjoint();
    }
    p
}

/// Projector of rank `d` onto a seeded pseudo-random subspace of the first
/// `len` qubits, tensored with `|0⟩⟨0|` on the remaining `n - len`.
fn random_qubit_part(d: usize, len: u32, n: u32, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    let local = 1usize << len;
    let mut basis = Vec::new();
    while basis.len() < d {
        let m = CMatrix::from_fn(local, d, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        basis = orthonormal_columns(&m, 1e-6);
    }
    let small = projector_onto(&basis, local);
    let rest = 1usize << (n - len);
    let mut zero = CMatrix::zeros(rest, rest);
    zero[(0, 0)] = c(1.0);
    Ok(small.kronecker(&zero))
}

fn agent_projector(i: usize, agent_dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(agent_dim, agent_dim);
    m[(i, i)] = c(1.0);
    m
}

/// Build explicit projectors for `states`, seeded by `seed`.
pub fn realize(
    model: &QuantumModel,
    states: &[StateExpr],
    budget: QubitBudget,
    seed: u64,
) -> Result<ExplicitRealization> {
    let mut parts = Vec::with_capacity(states.len());
    let mut n = 1u32;
    let mut dims = Vec::new();
    for s in states {
        let len = model.state_len(s)?;
        let d = model.state_dim(s)?;
        if len > u64::from(budget.external_qubits) {
            return Err(Error::BudgetExceeded(format!(
                "state {s} needs {len} qubits, budget is {}",
                budget.external_qubits
            )));
        }
        n = n.max(len as u32);
        dims.push((d.to_usize().expect("fits the budget"), len as u32));
    }
    if states.is_empty() || states.len() > budget.agent_dim {
        return Err(Error::BudgetExceeded(format!(
            "{} agent labels, budget is {}",
            states.len(),
            budget.agent_dim
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &(d, len) in &dims {
        parts.push(random_qubit_part(d, len, n, &mut rng)?);
    }
    Ok(ExplicitRealization::from_parts(states.to_vec(), parts, n))
}

impl ExplicitRealization {
    /// Assemble `Π_a = |a⟩⟨a| ⊗ π_a` from given qubit parts on `n` qubits.
    pub fn from_parts(states: Vec<StateExpr>, qubit_parts: Vec<CMatrix>, n: u32) -> Self {
        let agent_dim = states.len();
        let projectors = qubit_parts
            .iter()
            .enumerate()
            .map(|(i, p)| agent_projector(i, agent_dim).kronecker(p))
            .collect();
        ExplicitRealization {
            external_qubits: n,
            agent_dim,
            states,
            qubit_parts,
            projectors,
        }
    }

    /// Two one-dimensional states on one qubit with `⟨ψ_a|ψ_b⟩ = 1/√2`.
    pub fn non_orthogonal_pair(a: StateExpr, b: StateExpr) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi_a = CVector::from_vec(vec![c(1.0), c(0.0)]);
        let psi_b = CVector::from_vec(vec![c(h), c(h)]);
        let parts = vec![&psi_a * psi_a.adjoint(), &psi_b * psi_b.adjoint()];
        ExplicitRealization::from_parts(vec![a, b], parts, 1)
    }

    pub fn dimension(&self) -> usize {
        self.agent_dim << self.external_qubits
    }

    pub fn index_of(&self, s: &StateExpr) -> Option<usize> {
        self.states.iter().position(|t| t == s)
    }

    /// `Π_E = Σ_{a ∈ E} Π_a` over the given state indices.
    pub fn eidostate_projector(&self, members: &[usize]) -> CMatrix {
        let dim = self.dimension();
        members
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, &i| acc + &self.projectors[i])
    }

    pub fn trace(m: &CMatrix) -> f64 {
        m.trace().re
    }

    /// Numerical rank from an orthonormal basis of the column span.
    pub fn rank(m: &CMatrix) -> usize {
        orthonormal_columns(m, 1e-8).len()
    }

    /// Check Hermiticity, idempotence, mutual orthogonality and traces
    /// against the declared dimensions.
    pub fn verify(&self, model: &QuantumModel) -> Result<()> {
        for (i, p) in self.projectors.iter().enumerate() {
            let herm = (p - p.adjoint()).norm();
            let idem = (p * p - p).norm();
            if herm > PROJECTOR_TOL || idem > PROJECTOR_TOL {
                return Err(Error::RankDeficient(format!(
                    "Π for {} is not a projector (hermiticity {herm:e}, idempotence {idem:e})",
                    self.states[i]
                )));
            }
            let d = model.state_dim(&self.states[i])?.to_f64().unwrap_or(f64::NAN);
            if (Self::trace(p) - d).abs() > TRACE_TOL {
                return Err(Error::RankDeficient(format!(
                    "trace of Π for {} is {}, expected {d}",
                    self.states[i],
                    Self::trace(p)
                )));
            }
            for (j, q) in self.projectors.iter().enumerate().skip(i + 1) {
                let overlap = (p * q).norm();
                if overlap > PROJECTOR_TOL {
                    return Err(Error::RankDeficient(format!(
                        "Π for {} and {} overlap ({overlap:e})",
                        self.states[i], self.states[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(|a⟩|ψ_a⟩ + |b⟩|ψ_b⟩)/√2` for one-dimensional states `a`, `b`.
    pub fn entangled_vector(&self, a: usize, b: usize) -> Option<CVector> {
        let va = self.pure_vector(a)?;
        let vb = self.pure_vector(b)?;
        Some((va + vb) / c(std::f64::consts::SQRT_2))
    }

    /// `|a⟩ ⊗ |χ⟩` with `χ ⟂ ψ_a`: a legitimate vector outside every eidostate
    /// subspace built from these states when the parts are one-dimensional.
    pub fn agent_is_wrong_vector(&self, a: usize) -> Option<CVector> {
        let part = &self.qubit_parts[a];
        let local = part.nrows();
        let complement = CMatrix::identity(local, local) - part;
        let chi = orthonormal_columns(&complement, 1e-8).into_iter().next()?;
        let mut agent = CVector::zeros(self.agent_dim);
        agent[a] = c(1.0);
        Some(agent.kronecker(&chi))
    }

    fn pure_vector(&self, a: usize) -> Option<CVector> {
        let basis = orthonormal_columns(&self.qubit_parts[a], 1e-8);
        if basis.len() != 1 {
            return None;
        }
        let mut agent = CVector::zeros(self.agent_dim);
        agent[a] = c(1.0);
        Some(agent.kronecker(&basis[0]))
    }

    /// Largest entrywise deviation between `Π_E / d_E` and `Σ P(a|E) Π_a / d_a`.
    pub fn mixture_residual(&self, members: &[usize], probabilities: &[f64]) -> f64 {
        let pe = self.eidostate_projector(members);
        let de = Self::trace(&pe);
        let rho_e = pe / c(de);
        let dim = self.dimension();
        let mut mix = CMatrix::zeros(dim, dim);
        for (&i, &p) in members.iter().zip(probabilities) {
            let pa = &self.projectors[i];
            mix += pa * c(p / Self::trace(pa));
        }
        (rho_e - mix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// A linear map taking `𝒮_A` isometrically into `𝒮_B`, when `d_A ≤ d_B`.
///
/// Builds orthonormal bases `{a_i}` of `𝒮_A` and `{b_j}` of `𝒮_B` and returns
/// `U = Σ_i |b_i⟩⟨a_i|`, after checking that `(1 − Π_B) U Π_A` vanishes and
/// that `U` preserves inner products on `𝒮_A`.
pub fn find_isometry(pi_a: &CMatrix, pi_b: &CMatrix) -> Result<Option<CMatrix>> {
    let dim = pi_a.nrows();
    let basis_a = orthonormal_columns(pi_a, 1e-8);
    let basis_b = orthonormal_columns(pi_b, 1e-8);
    for (basis, p, label) in [(&basis_a, pi_a, "A"), (&basis_b, pi_b, "B")] {
        let tr = ExplicitRealization::trace(p);
        if (basis.len() as f64 - tr).abs() > TRACE_TOL {
            return Err(Error::RankDeficient(format!(
                "subspace {label}: rank {} but trace {tr}",
                basis.len()
            )));
        }
    }
    if basis_a.len() > basis_b.len() {
        return Ok(None);
    }
    let mut u = CMatrix::zeros(dim, dim);
    for (a, b) in basis_a.iter().zip(&basis_b) {
        u += b * a.adjoint();
    }
    let leak = (CMatrix::identity(dim, dim) - pi_b) * &u * pi_a;
    let gram = u.adjoint() * &u * pi_a - pi_a;
    if leak.norm() > RESIDUAL_TOL || gram.norm() > RESIDUAL_TOL {
        return Err(Error::RankDeficient(format!(
            "isometry residuals {:e}, {:e}",
            leak.norm(),
            gram.norm()
        )));
    }
    Ok(Some(u))
}

/// Frobenius norm of `(1 − Π_B) U Π_A`.
pub fn leak_residual(u: &CMatrix, pi_a: &CMatrix, pi_b: &CMatrix) -> f64 {
    let dim = pi_a.nrows();
    ((CMatrix::identity(dim, dim) - pi_b) * u * pi_a).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::QuantumModel;

    #[test]
    fn random_projectors_are_valid() {
        let m = QuantumModel::new();
        let states: Vec<_> = [1, 3, 8, 5].iter().map(|&k| QuantumModel::d(k)).collect();
        let real = realize(&m, &states, QubitBudget::default(), 7).unwrap();
        real.verify(&m).unwrap();
        assert_eq!(real.dimension(), 4 * 8);
        let pe = real.eidostate_projector(&[0, 1, 2, 3]);
        assert_eq!(ExplicitRealization::rank(&pe), 17);
    }

    #[test]
    fn realization_is_reproducible() {
        let m = QuantumModel::new();
        let states = vec![QuantumModel::d(2), QuantumModel::d(3)];
        let a = realize(&m, &states, QubitBudget::default(), 11).unwrap();
        let b = realize(&m, &states, QubitBudget::default(), 11).unwrap();
        assert_eq!(a.projectors, b.projectors);
    }

    #[test]
    fn budget_is_enforced() {
        let m = QuantumModel::new();
        assert!(matches!(
            realize(&m, &[QuantumModel::d(9)], QubitBudget::default(), 0),
            Err(Error::BudgetExceeded(_))
        ));
        let many: Vec<_> = (1..=9).map(|_| QuantumModel::d(1)).collect();
        assert!(realize(&m, &many, QubitBudget::default(), 0).is_err());
    }

    #[test]
    fn non_orthogonal_parts_still_give_orthogonal_projectors() {
        let m = QuantumModel::new();
        let real = ExplicitRealization::non_orthogonal_pair(
            QuantumModel::d(1),
            StateExpr::pair(QuantumModel::d(1), QuantumModel::d(1)),
        );
        let overlap = real.qubit_parts[0].clone() * &real.qubit_parts[1];
        assert!(overlap.norm() > 0.1);
        real.verify(&m).unwrap();
        let pe = real.eidostate_projector(&[0, 1]);
        assert_eq!(ExplicitRealization::rank(&pe), 2);

        let psi = real.entangled_vector(0, 1).unwrap();
        assert!((&pe * &psi - &psi).norm() < 1e-12);
        for i in 0..2 {
            let p = &real.projectors[i];
            assert!((p * &psi - &psi).norm() > 0.1);
        }

        let wrong = real.agent_is_wrong_vector(0).unwrap();
        assert!((&pe * &wrong).norm() < 1e-12);
        assert!((wrong.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isometry_exists_iff_dimension_fits() {
        let m = QuantumModel::new();
        let states = vec![QuantumModel::d(2), QuantumModel::d(3)];
        let real = realize(&m, &states, QubitBudget::default(), 3).unwrap();
        let (pa, pb) = (&real.projectors[0], &real.projectors[1]);
        let u = find_isometry(pa, pb).unwrap().unwrap();
        assert!(leak_residual(&u, pa, pb) <= RESIDUAL_TOL);
        assert!(find_isometry(pb, pa).unwrap().is_none());
        let id = find_isometry(pa, pa).unwrap().unwrap();
        assert!(leak_residual(&id, pa, pa) <= RESIDUAL_TOL);
    }

    #[test]
    fn mixture_identity() {
        let m = QuantumModel::new();
        let states = vec![QuantumModel::d(1), QuantumModel::d(3), QuantumModel::d(4)];
        let real = realize(&m, &states, QubitBudget::default(), 5).unwrap();
        let probs = [1.0 / 8.0, 3.0 / 8.0, 4.0 / 8.0];
        assert!(real.mixture_residual(&[0, 1, 2], &probs) < 1e-10);
        assert!(real.mixture_residual(&[0, 1, 2], &[1.0 / 3.0; 3]) > 1e-3);
    }
}
