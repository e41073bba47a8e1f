// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum-state primitives: density matrices, unitaries and the Bloch-z
//! readout quantities.
//!
//! Qubit ordering convention: qubit 0 is the most significant bit of a basis
//! index, i.e. the leftmost tensor factor.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, dagger, hermitian_eig, hermiticity_defect, is_finite, qubit_count,
    tensor_product, trace, unitarity_defect, CMatrix,
};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const UNITARITY_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = -1e-10;
/// Slack admitted on measured polarisations before they count as unphysical.
pub const POLARISATION_EPS: f64 = 1e-9;

/// Bloch-z polarisation `f = tr(rho sigma_z)` of a single qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarisation(f64);

impl Polarisation {
    pub fn new(f: f64) -> Result<Self> {
        if !f.is_finite() || f.abs() > 1.0 + POLARISATION_EPS {
            return Err(Error::Domain(format!(
                "polarisation {f} outside [-1-eps, 1+eps]"
            )));
        }
        Ok(Polarisation(f))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Value clamped into the physical interval `[-1, 1]`.
    pub fn clamped(self) -> f64 {
        self.0.clamp(-1.0, 1.0)
    }
}

/// Unitary operator over `n` qubits, validated as `max|U†U - 1| <= tol`.
#[derive(Debug, Clone)]
pub struct UnitaryMatrix {
    num_qubits: usize,
    mat: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        Self::new_with_tolerance(mat, UNITARITY_TOL)
    }

    /// Looser tolerance for long products of unitaries, where roundoff
    /// accumulates past the single-gate bound.
    pub fn new_with_tolerance(mat: CMatrix, tol: f64) -> Result<Self> {
        let num_qubits = qubit_count(mat.nrows())?;
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "unitary must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let defect = unitarity_defect(&mat);
        if !defect.is_finite() || defect > tol {
            return Err(Error::InvalidMatrix {
                kind: "unitary",
                detail: format!("max|U†U - 1| = {defect:.3e} exceeds {tol:.1e}"),
            });
        }
        Ok(UnitaryMatrix { num_qubits, mat })
    }

    pub fn identity(num_qubits: usize) -> Self {
        UnitaryMatrix {
            num_qubits,
            mat: linalg::identity(1 << num_qubits),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dagger(&self) -> UnitaryMatrix {
        UnitaryMatrix {
            num_qubits: self.num_qubits,
            mat: dagger(&self.mat),
        }
    }

    /// `other * self` as a circuit composition: `self` acts first.
    pub fn then(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "composing unitaries of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(UnitaryMatrix {
            num_qubits: self.num_qubits,
            mat: other.mat.dot(&self.mat),
        })
    }

    /// Embeds this gate into an `n`-qubit register as a full-dimension
    /// unitary; `qubits[0]` is the gate's most significant qubit.
    pub fn embed(&self, qubits: &[usize], n: usize) -> Result<UnitaryMatrix> {
        let layout = TargetLayout::new(qubits, self.num_qubits, n)?;
        let d = 1usize << n;
        let dg = 1usize << self.num_qubits;
        let mut out: CMatrix = Array2::zeros((d, d));
        for &base in &layout.bases {
            for a in 0..dg {
                let row = base | layout.spread[a];
                for b in 0..dg {
                    out[(row, base | layout.spread[b])] = self.mat[(a, b)];
                }
            }
        }
        Ok(UnitaryMatrix {
            num_qubits: n,
            mat: out,
        })
    }
}

/// Precomputed index maps for a gate acting on a subset of qubits.
struct TargetLayout {
    spread: Vec<usize>,
    bases: Vec<usize>,
}

impl TargetLayout {
    fn new(qubits: &[usize], gate_qubits: usize, n: usize) -> Result<Self> {
        if qubits.len() != gate_qubits {
            return Err(Error::InvalidArgument(format!(
                "gate acts on {gate_qubits} qubits but {} targets given",
                qubits.len()
            )));
        }
        let mut seen = vec![false; n];
        for &q in qubits {
            if q >= n {
                return Err(Error::InvalidArgument(format!(
                    "target qubit {q} out of range for {n} qubits"
                )));
            }
            if seen[q] {
                return Err(Error::InvalidArgument(format!("duplicate target qubit {q}")));
            }
            seen[q] = true;
        }
        let k = qubits.len();
        let bitpos: Vec<usize> = qubits.iter().map(|&q| n - 1 - q).collect();
        let mut target_mask = 0usize;
        for &p in &bitpos {
            target_mask |= 1 << p;
        }
        let spread: Vec<usize> = (0..(1usize << k))
            .map(|a| {
                let mut idx = 0usize;
                for (x, &p) in bitpos.iter().enumerate() {
                    if (a >> (k - 1 - x)) & 1 == 1 {
                        idx |= 1 << p;
                    }
                }
                idx
            })
            .collect();
        let d = 1usize << n;
        let bases: Vec<usize> = (0..d).filter(|idx| idx & target_mask == 0).collect();
        Ok(TargetLayout { spread, bases })
    }
}

/// Hermitian, unit-trace density operator over `n` qubits.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    num_qubits: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and finiteness. Positivity is
    /// spectral and therefore checked separately by [`Self::validate_psd`].
    pub fn new(mat: CMatrix) -> Result<Self> {
        let num_qubits = qubit_count(mat.nrows())?;
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if !is_finite(&mat) {
            return Err(Error::InvalidMatrix {
                kind: "density matrix",
                detail: "non-finite entries".into(),
            });
        }
        let herm = hermiticity_defect(&mat);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidMatrix {
                kind: "density matrix",
                detail: format!("Hermiticity defect {herm:.3e}"),
            });
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidMatrix {
                kind: "density matrix",
                detail: format!("trace {tr} != 1"),
            });
        }
        Ok(DensityMatrix { num_qubits, mat })
    }

    pub(crate) fn from_parts_unchecked(num_qubits: usize, mat: CMatrix) -> Self {
        debug_assert!(is_finite(&mat));
        DensityMatrix { num_qubits, mat }
    }

    /// Pure computational-basis state `|index><index|`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        let d = 1usize << num_qubits;
        if index >= d {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut mat: CMatrix = Array2::zeros((d, d));
        mat[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { num_qubits, mat })
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        let mat = linalg::identity(d).mapv(|z| z / d as f64);
        DensityMatrix { num_qubits, mat }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// `self (x) other`, self as the most significant factor.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let mat = tensor_product(&self.mat, &other.mat)?;
        Ok(DensityMatrix {
            num_qubits: self.num_qubits + other.num_qubits,
            mat,
        })
    }

    /// `U rho U†` with a full-register unitary.
    pub fn apply_unitary(&self, u: &UnitaryMatrix) -> Result<DensityMatrix> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "unitary dim {} vs state dim {}",
                u.dim(),
                self.dim()
            )));
        }
        let mat = u.mat.dot(&self.mat).dot(&dagger(&u.mat));
        Ok(DensityMatrix::from_parts_unchecked(self.num_qubits, mat))
    }

    /// `U rho U†` where the gate acts only on `qubits`; the rest of the
    /// register is untouched. Never materializes the full-dimension unitary.
    pub fn apply_gate(&self, gate: &UnitaryMatrix, qubits: &[usize]) -> Result<DensityMatrix> {
        let layout = TargetLayout::new(qubits, gate.num_qubits(), self.num_qubits)?;
        let d = self.dim();
        let dg = gate.dim();
        let g = &gate.mat;
        let mut out = self.mat.clone();

        // rows: out <- G out on the target subspace
        let mut amp = vec![Complex64::new(0.0, 0.0); dg];
        for col in 0..d {
            for &base in &layout.bases {
                for (a, &off) in layout.spread.iter().enumerate() {
                    amp[a] = out[(base | off, col)];
                }
                for (a, &off) in layout.spread.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (b, &v) in amp.iter().enumerate() {
                        acc += g[(a, b)] * v;
                    }
                    out[(base | off, col)] = acc;
                }
            }
        }
        // columns: out <- out G†
        for row in 0..d {
            for &base in &layout.bases {
                for (b, &off) in layout.spread.iter().enumerate() {
                    amp[b] = out[(row, base | off)];
                }
                for (a, &off) in layout.spread.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (b, &v) in amp.iter().enumerate() {
                        acc += g[(a, b)].conj() * v;
                    }
                    out[(row, base | off)] = acc;
                }
            }
        }
        Ok(DensityMatrix::from_parts_unchecked(self.num_qubits, out))
    }

    /// Reduced state over `keep`, in the original relative qubit order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument(
                "partial_trace needs a nonempty keep set".into(),
            ));
        }
        let n = self.num_qubits;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&q) = keep.iter().find(|&&q| q >= n) {
            return Err(Error::InvalidArgument(format!(
                "keep qubit {q} out of range for {n} qubits"
            )));
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let nk = keep.len();
        let nt = traced.len();
        let dk = 1usize << nk;
        let dt = 1usize << nt;

        let place = |qubits: &[usize], sub: usize| -> usize {
            let k = qubits.len();
            let mut idx = 0usize;
            for (x, &q) in qubits.iter().enumerate() {
                if (sub >> (k - 1 - x)) & 1 == 1 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            idx
        };
        let kept_part: Vec<usize> = (0..dk).map(|i| place(&keep, i)).collect();
        let traced_part: Vec<usize> = (0..dt).map(|m| place(&traced, m)).collect();

        let mut out: CMatrix = Array2::zeros((dk, dk));
        for i in 0..dk {
            for j in 0..dk {
                let mut acc = Complex64::new(0.0, 0.0);
                for &t in &traced_part {
                    acc += self.mat[(kept_part[i] | t, kept_part[j] | t)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(DensityMatrix::from_parts_unchecked(nk, out))
    }

    /// `f = tr(rho sigma_z)` of a single-qubit state.
    pub fn polarisation(&self) -> Result<Polarisation> {
        if self.num_qubits != 1 {
            return Err(Error::InvalidArgument(format!(
                "polarisation is defined for one qubit; got {} (partial_trace first)",
                self.num_qubits
            )));
        }
        let z = self.mat[(0, 0)] - self.mat[(1, 1)];
        if z.im.abs() > 1e-12 {
            return Err(Error::InvalidMatrix {
                kind: "density matrix",
                detail: format!("imaginary polarisation residue {:.3e}", z.im),
            });
        }
        Polarisation::new(z.re)
    }

    /// Spectrum, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.mat)?.values)
    }

    /// Checks positive semidefiniteness within the `-1e-10` tolerance.
    pub fn validate_psd(&self) -> Result<()> {
        let min = self
            .eigenvalues()?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < PSD_TOL {
            return Err(Error::InvalidMatrix {
                kind: "density matrix",
                detail: format!("negative eigenvalue {min:.3e}"),
            });
        }
        Ok(())
    }
}

/// `rho = 1/2 + f sigma_z / 2 = diag((1+f)/2, (1-f)/2)`.
pub fn state_from_f(f: f64) -> Result<DensityMatrix> {
    if !f.is_finite() || f.abs() > 1.0 {
        return Err(Error::Domain(format!("polarisation {f} outside [-1, 1]")));
    }
    let mut mat: CMatrix = Array2::zeros((2, 2));
    mat[(0, 0)] = Complex64::new((1.0 + f) / 2.0, 0.0);
    mat[(1, 1)] = Complex64::new((1.0 - f) / 2.0, 0.0);
    Ok(DensityMatrix::from_parts_unchecked(1, mat))
}

/// Von Neumann entropy in bits of the qubit state with polarisation `f`,
/// with the `0 log 0 = 0` convention.
pub fn von_neumann_entropy(f: f64) -> Result<f64> {
    if !f.is_finite() || f.abs() > 1.0 + POLARISATION_EPS {
        return Err(Error::Domain(format!("polarisation {f} outside [-1, 1]")));
    }
    let f = f.clamp(-1.0, 1.0);
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term((1.0 + f) / 2.0) + term((1.0 - f) / 2.0))
}

/// Trace distance `(1/2)||a - b||_1` via the spectrum of the difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "trace_distance between dims {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = &a.mat - &b.mat;
    let eig = hermitian_eig(&diff)?;
    Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::linalg::{identity, max_abs_diff, sigma_x};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_state_marginals() {
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let reduced = rho.partial_trace(&[0]).unwrap();
        let expect = DensityMatrix::basis_state(1, 0).unwrap();
        assert!(max_abs_diff(reduced.matrix(), expect.matrix()) < 1e-15);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let bell = bell_phi_plus();
        let reduced = bell.partial_trace(&[0]).unwrap();
        assert!(max_abs_diff(reduced.matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
        assert_abs_diff_eq!(reduced.polarisation().unwrap().value(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(rho.partial_trace(&[]).is_err());
    }

    #[test]
    fn partial_trace_of_product_recovers_left_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (na, nb) in [(1usize, 1usize), (2, 1), (3, 3)] {
            let a = random_density(na, &mut rng);
            let b = random_density(nb, &mut rng);
            let joint = a.tensor(&b).unwrap();
            let keep: Vec<usize> = (0..na).collect();
            let reduced = joint.partial_trace(&keep).unwrap();
            assert!(
                max_abs_diff(reduced.matrix(), a.matrix()) < 1e-12,
                "left-factor recovery failed at ({na},{nb})"
            );
        }
    }

    #[test]
    fn polarisation_examples() {
        assert_abs_diff_eq!(
            DensityMatrix::basis_state(1, 0)
                .unwrap()
                .polarisation()
                .unwrap()
                .value(),
            1.0
        );
        assert_abs_diff_eq!(
            DensityMatrix::maximally_mixed(1)
                .polarisation()
                .unwrap()
                .value(),
            0.0
        );
        let round = state_from_f(0.3).unwrap().polarisation().unwrap().value();
        assert_abs_diff_eq!(round, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn polarisation_rejects_multi_qubit() {
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(rho.polarisation().is_err());
    }

    #[test]
    fn state_from_f_examples() {
        let pure = state_from_f(1.0).unwrap();
        assert!(max_abs_diff(pure.matrix(), DensityMatrix::basis_state(1, 0).unwrap().matrix()) < 1e-15);
        let mixed = state_from_f(0.0).unwrap();
        assert!(max_abs_diff(mixed.matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
        let half = state_from_f(0.5).unwrap();
        assert_abs_diff_eq!(half.matrix()[(0, 0)].re, 0.75);
        assert_abs_diff_eq!(half.matrix()[(1, 1)].re, 0.25);
        assert!(state_from_f(1.0 + 1e-6).is_err());
    }

    #[test]
    fn round_trip_polarisation_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let f = rand::Rng::gen_range(&mut rng, -1.0..1.0);
            let back = state_from_f(f).unwrap().polarisation().unwrap().value();
            assert!((back - f).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_values() {
        assert_abs_diff_eq!(von_neumann_entropy(0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(von_neumann_entropy(1.0).unwrap(), 0.0, epsilon = 1e-15);
        // high-precision evaluation of the binary-entropy form at f = 0.5
        assert_abs_diff_eq!(
            von_neumann_entropy(0.5).unwrap(),
            0.811278124459132864,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            von_neumann_entropy(0.3).unwrap(),
            0.934068055375491006,
            epsilon = 1e-15
        );
    }

    #[test]
    fn entropy_symmetry_and_monotonicity() {
        let mut prev = f64::INFINITY;
        for k in 0..=100 {
            let f = k as f64 / 100.0;
            let s = von_neumann_entropy(f).unwrap();
            assert!((s - von_neumann_entropy(-f).unwrap()).abs() < 1e-12);
            assert!(s <= prev + 1e-15, "entropy not decreasing at f={f}");
            prev = s;
        }
        assert!(von_neumann_entropy(0.0).unwrap() >= von_neumann_entropy(0.01).unwrap());
    }

    #[test]
    fn trace_distance_examples() {
        let p0 = DensityMatrix::basis_state(1, 0).unwrap();
        let p1 = DensityMatrix::basis_state(1, 1).unwrap();
        assert_abs_diff_eq!(trace_distance(&p0, &p0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(trace_distance(&p0, &p1).unwrap(), 1.0, epsilon = 1e-14);
        let mixed = DensityMatrix::maximally_mixed(1);
        let f02 = state_from_f(0.2).unwrap();
        assert_abs_diff_eq!(trace_distance(&mixed, &f02).unwrap(), 0.1, epsilon = 1e-14);
    }

    #[test]
    fn trace_distance_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let a = random_density(2, &mut rng);
            let b = random_density(2, &mut rng);
            let c = random_density(2, &mut rng);
            let ab = trace_distance(&a, &b).unwrap();
            let bc = trace_distance(&b, &c).unwrap();
            let ac = trace_distance(&a, &c).unwrap();
            assert!(ac <= ab + bc + 1e-10);
            assert!((0.0..=1.0 + 1e-12).contains(&ab));
        }
    }

    #[test]
    fn apply_preserves_trace_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let gen = sigma_x().mapv(|z| z * Complex64::new(0.0, -0.7));
        let u1 = UnitaryMatrix::new(crate::linalg::expm_skew_hermitian(&gen).unwrap()).unwrap();
        for _ in 0..20 {
            let rho = random_density(3, &mut rng);
            let evolved = rho.apply_gate(&u1, &[1]).unwrap();
            let tr = trace(evolved.matrix());
            assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
            assert!(hermiticity_defect(evolved.matrix()) < 1e-12);
            evolved.validate_psd().unwrap();
        }
    }

    #[test]
    fn gate_kernel_matches_embedded_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let swap = crate::homogeniser::partial_swap_unitary(0.43);
        for targets in [[0usize, 2], [2, 0], [1, 3]] {
            let rho = random_density(4, &mut rng);
            let kernel = rho.apply_gate(&swap, &targets).unwrap();
            let full = swap.embed(&targets, 4).unwrap();
            let direct = rho.apply_unitary(&full).unwrap();
            assert!(max_abs_diff(kernel.matrix(), direct.matrix()) < 1e-13);
        }
    }

    #[test]
    fn density_validation_rejects_bad_inputs() {
        let mut mat: CMatrix = identity(2);
        mat[(0, 1)] = Complex64::new(0.5, 0.0); // not Hermitian vs (1,0)=0
        assert!(DensityMatrix::new(mat).is_err());
        let half = identity(2).mapv(|z| z * 0.7);
        assert!(DensityMatrix::new(half).is_err()); // trace != 1
    }
}
