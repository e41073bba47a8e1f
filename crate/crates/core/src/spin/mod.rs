// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! The crotonic-acid NMR processor: per-spin resonance offsets, scalar
//! couplings, collective control operators and the proton-environment
//! Hamiltonian ensemble.
//!
//! Frequencies and couplings are stored in Hz exactly as tabulated; the 2 pi
//! conversion to angular frequency happens only when a Hamiltonian is
//! assembled.

mod config;

pub use config::{parse_spin_config, ParsedSpinConfig};

use ndarray::Array2;

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{identity, sigma_x, sigma_y, sigma_z, tensor_product_all, CMatrix};

/// Per-spin resonance offsets (Hz from the transmitter) and the symmetric
/// scalar-coupling table (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    labels: Vec<String>,
    frequencies_hz: Vec<f64>,
    couplings_hz: Array2<f64>,
}

impl SpinSystem {
    pub fn new(
        labels: Vec<String>,
        frequencies_hz: Vec<f64>,
        couplings_hz: Array2<f64>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidArgument("spin system needs at least one spin".into()));
        }
        if frequencies_hz.len() != n || couplings_hz.dim() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "{} labels, {} frequencies, {:?} coupling matrix",
                n,
                frequencies_hz.len(),
                couplings_hz.dim()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidArgument(format!("duplicate spin label `{l}`")));
            }
        }
        for i in 0..n {
            if couplings_hz[(i, i)] != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "self-coupling on `{}` must be zero",
                    labels[i]
                )));
            }
            for j in 0..n {
                let v = couplings_hz[(i, j)];
                if !v.is_finite() || !frequencies_hz[i].is_finite() {
                    return Err(Error::InvalidArgument("non-finite spin parameter".into()));
                }
                if v != couplings_hz[(j, i)] {
                    return Err(Error::InvalidArgument(format!(
                        "coupling table asymmetric between `{}` and `{}`",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(SpinSystem {
            labels,
            frequencies_hz,
            couplings_hz,
        })
    }

    /// The four-carbon crotonic-acid system at 600 MHz proton frequency.
    pub fn crotonic_default() -> SpinSystem {
        let labels = ["A", "B", "C", "D"].map(String::from).to_vec();
        let frequencies_hz = vec![-11962.2, 7306.0, 3972.1, 10626.1];
        let pairs = [
            (0, 1, 41.6),
            (0, 2, 1.5),
            (0, 3, 7.1),
            (1, 2, 69.6),
            (1, 3, 1.2),
            (2, 3, 72.3),
        ];
        let mut couplings_hz = Array2::zeros((4, 4));
        for (i, j, v) in pairs {
            couplings_hz[(i, j)] = v;
            couplings_hz[(j, i)] = v;
        }
        SpinSystem {
            labels,
            frequencies_hz,
            couplings_hz,
        }
    }

    pub fn n_spins(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn frequency_hz(&self, spin: usize) -> f64 {
        self.frequencies_hz[spin]
    }

    pub fn coupling_hz(&self, a: usize, b: usize) -> f64 {
        self.couplings_hz[(a, b)]
    }

    /// Copy with each resonance offset shifted by `shifts_hz`.
    pub fn with_frequency_shifts(&self, shifts_hz: &[f64]) -> Result<SpinSystem> {
        if shifts_hz.len() != self.n_spins() {
            return Err(Error::DimensionMismatch(format!(
                "{} shifts for {} spins",
                shifts_hz.len(),
                self.n_spins()
            )));
        }
        let frequencies_hz = self
            .frequencies_hz
            .iter()
            .zip(shifts_hz)
            .map(|(f, s)| f + s)
            .collect();
        Ok(SpinSystem {
            labels: self.labels.clone(),
            frequencies_hz,
            couplings_hz: self.couplings_hz.clone(),
        })
    }
}

/// Scalar-coupling form used in the internal Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingModel {
    /// Full scalar coupling `2 pi J (IxIx + IyIy + IzIz)`.
    Isotropic,
    /// Secular truncation `2 pi J IzIz`.
    Weak,
}

impl std::str::FromStr for CouplingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isotropic" => Ok(CouplingModel::Isotropic),
            "weak" => Ok(CouplingModel::Weak),
            other => Err(Error::InvalidArgument(format!(
                "unknown coupling model `{other}` (expected `isotropic` or `weak`)"
            ))),
        }
    }
}

/// Spin-half operator `sigma/2` embedded at spin `k` of `n`.
fn single_spin_op(pauli: &CMatrix, k: usize, n: usize) -> CMatrix {
    let half = pauli.mapv(|z| z * 0.5);
    let eye = identity(2);
    let factors: Vec<&CMatrix> = (0..n).map(|j| if j == k { &half } else { &eye }).collect();
    tensor_product_all(&factors).expect("spin register under the dense cap")
}

/// Internal Hamiltonian in rad/s:
/// `H0 = sum_k 2 pi nu_k Iz_k + sum_{k<l} 2 pi J_kl C_kl`.
pub fn build_internal_hamiltonian(sys: &SpinSystem, model: CouplingModel) -> CMatrix {
    let n = sys.n_spins();
    let d = 1usize << n;
    let sx = sigma_x();
    let sy = sigma_y();
    let sz = sigma_z();
    let mut h: CMatrix = Array2::zeros((d, d));
    for k in 0..n {
        let term = single_spin_op(&sz, k, n).mapv(|z| z * (TAU * sys.frequency_hz(k)));
        h = h + term;
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let j = sys.coupling_hz(k, l);
            if j == 0.0 {
                continue;
            }
            let zz = single_spin_op(&sz, k, n).dot(&single_spin_op(&sz, l, n));
            let coupling = match model {
                CouplingModel::Weak => zz,
                CouplingModel::Isotropic => {
                    let xx = single_spin_op(&sx, k, n).dot(&single_spin_op(&sx, l, n));
                    let yy = single_spin_op(&sy, k, n).dot(&single_spin_op(&sy, l, n));
                    xx + yy + zz
                }
            };
            h = h + coupling.mapv(|z| z * (TAU * j));
        }
    }
    h
}

/// Collective `Ix`, `Iy`, `Iz` over all spins.
#[derive(Debug, Clone)]
pub struct ControlOperators {
    pub ix: CMatrix,
    pub iy: CMatrix,
    pub iz: CMatrix,
}

pub fn control_operators(n_spins: usize) -> ControlOperators {
    let collective = |pauli: &CMatrix| {
        let d = 1usize << n_spins;
        let mut out: CMatrix = Array2::zeros((d, d));
        for k in 0..n_spins {
            out = out + single_spin_op(pauli, k, n_spins);
        }
        out
    };
    ControlOperators {
        ix: collective(&sigma_x()),
        iy: collective(&sigma_y()),
        iz: collective(&sigma_z()),
    }
}

/// Diagonal of collective `Iz` as plain reals: total magnetic quantum number
/// per computational basis state, qubit 0 as the most significant bit.
pub fn iz_diagonal(n_spins: usize) -> Vec<f64> {
    let d = 1usize << n_spins;
    (0..d)
        .map(|idx| {
            (0..n_spins)
                .map(|k| {
                    if (idx >> (n_spins - 1 - k)) & 1 == 0 {
                        0.5
                    } else {
                        -0.5
                    }
                })
                .sum()
        })
        .collect()
}

/// Static proton environment: heteronuclear couplings of each proton to each
/// observed spin, plus which protons form a permutation-equivalent methyl
/// group.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtonEnvironment {
    pub labels: Vec<String>,
    /// Row per proton, column per observed spin, in Hz.
    pub couplings_hz: Array2<f64>,
    /// Indices (into `labels`) of the methyl protons.
    pub methyl: Vec<usize>,
}

/// One effective Hamiltonian of the environment ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleMember {
    pub system: SpinSystem,
    /// Number of proton eigenstates collapsing onto this member.
    pub weight: u32,
}

/// Effective spin systems induced by static proton z-eigenstates, with
/// permutation-equivalent methyl configurations merged.
#[derive(Debug, Clone)]
pub struct EnvironmentEnsemble {
    members: Vec<EnsembleMember>,
}

impl EnvironmentEnsemble {
    /// Degenerate single-member ensemble.
    pub fn single(system: SpinSystem) -> Self {
        EnvironmentEnsemble {
            members: vec![EnsembleMember { system, weight: 1 }],
        }
    }

    pub fn from_members(members: Vec<EnsembleMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("ensemble needs at least one member".into()));
        }
        Ok(EnvironmentEnsemble { members })
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_weight(&self) -> u32 {
        self.members.iter().map(|m| m.weight).sum()
    }
}

fn binomial(n: usize, k: usize) -> u32 {
    let mut out = 1u64;
    for i in 0..k {
        out = out * (n - i) as u64 / (i + 1) as u64;
    }
    out as u32
}

/// Enumerates proton z-eigenstate configurations. Each proton contributes
/// `m_p J_pc` (m_p = +-1/2) to the effective offset of spin `c`; methyl
/// configurations with the same total moment are merged with binomial
/// multiplicities.
pub fn environment_ensemble(
    sys: &SpinSystem,
    hc_couplings_hz: &Array2<f64>,
    methyl_group: &[usize],
) -> Result<EnvironmentEnsemble> {
    let n_protons = hc_couplings_hz.nrows();
    let n_spins = sys.n_spins();
    if hc_couplings_hz.ncols() != n_spins {
        return Err(Error::DimensionMismatch(format!(
            "heteronuclear table has {} columns for {} spins",
            hc_couplings_hz.ncols(),
            n_spins
        )));
    }
    if n_protons == 0 {
        return Ok(EnvironmentEnsemble::single(sys.clone()));
    }
    let mut methyl = methyl_group.to_vec();
    methyl.sort_unstable();
    methyl.dedup();
    if methyl.len() != methyl_group.len() {
        return Err(Error::InvalidArgument("duplicate methyl proton index".into()));
    }
    if let Some(&p) = methyl.iter().find(|&&p| p >= n_protons) {
        return Err(Error::InvalidArgument(format!(
            "methyl proton index {p} out of range for {n_protons} protons"
        )));
    }
    // permutation merging is exact only if the methyl protons couple
    // identically to every observed spin
    if let Some(&first) = methyl.first() {
        for &p in &methyl[1..] {
            for c in 0..n_spins {
                if hc_couplings_hz[(p, c)] != hc_couplings_hz[(first, c)] {
                    return Err(Error::InvalidArgument(format!(
                        "methyl protons {first} and {p} have different couplings to spin {c}"
                    )));
                }
            }
        }
    }
    let free: Vec<usize> = (0..n_protons).filter(|p| !methyl.contains(p)).collect();
    let k = methyl.len();
    let mut members = Vec::with_capacity((1usize << free.len()) * (k + 1));
    for pattern in 0..(1u32 << free.len()) {
        let mut free_shift = vec![0.0f64; n_spins];
        for (bit, &p) in free.iter().enumerate() {
            let m = if (pattern >> bit) & 1 == 0 { 0.5 } else { -0.5 };
            for c in 0..n_spins {
                free_shift[c] += m * hc_couplings_hz[(p, c)];
            }
        }
        for up in 0..=k {
            // total methyl moment for `up` spins up out of k
            let total_m = up as f64 - k as f64 / 2.0;
            let mut shift = free_shift.clone();
            if let Some(&first) = methyl.first() {
                for c in 0..n_spins {
                    shift[c] += total_m * hc_couplings_hz[(first, c)];
                }
            }
            members.push(EnsembleMember {
                system: sys.with_frequency_shifts(&shift)?,
                weight: binomial(k, up),
            });
        }
    }
    EnvironmentEnsemble::from_members(members)
}

/// The crotonic proton environment shape: five protons, three of them the
/// methyl group, couplings supplied by the caller.
pub fn crotonic_proton_environment(hc_couplings_hz: Array2<f64>) -> Result<ProtonEnvironment> {
    if hc_couplings_hz.dim() != (5, 4) {
        return Err(Error::DimensionMismatch(format!(
            "crotonic proton table must be 5x4, got {:?}",
            hc_couplings_hz.dim()
        )));
    }
    Ok(ProtonEnvironment {
        labels: ["M1", "M2", "M3", "H1", "H2"].map(String::from).to_vec(),
        couplings_hz: hc_couplings_hz,
        methyl: vec![0, 1, 2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_defect, max_abs, max_abs_diff, trace};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn crotonic_table_values() {
        let sys = SpinSystem::crotonic_default();
        assert_eq!(sys.n_spins(), 4);
        assert_abs_diff_eq!(sys.frequency_hz(0), -11962.2);
        assert_abs_diff_eq!(sys.frequency_hz(1), 7306.0);
        assert_abs_diff_eq!(sys.frequency_hz(2), 3972.1);
        assert_abs_diff_eq!(sys.frequency_hz(3), 10626.1);
        assert_abs_diff_eq!(sys.coupling_hz(2, 3), 72.3);
        assert_abs_diff_eq!(sys.coupling_hz(1, 3), 1.2);
        assert_abs_diff_eq!(sys.coupling_hz(0, 1), 41.6);
        assert_abs_diff_eq!(sys.coupling_hz(1, 0), 41.6);
    }

    #[test]
    fn rejects_asymmetric_couplings() {
        let mut couplings = Array2::zeros((2, 2));
        couplings[(0, 1)] = 10.0;
        couplings[(1, 0)] = 11.0;
        let err = SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![0.0, 0.0],
            couplings,
        );
        assert!(err.is_err());
    }

    #[test]
    fn single_spin_hamiltonian() {
        let sys = SpinSystem::new(vec!["X".into()], vec![100.0], Array2::zeros((1, 1))).unwrap();
        let h = build_internal_hamiltonian(&sys, CouplingModel::Weak);
        let expect = sigma_z().mapv(|z| z * (TAU * 100.0 / 2.0));
        assert!(max_abs_diff(&h, &expect) < 1e-12);
    }

    #[test]
    fn two_spin_weak_coupling_diagonal() {
        let mut couplings = Array2::zeros((2, 2));
        couplings[(0, 1)] = 10.0;
        couplings[(1, 0)] = 10.0;
        let sys =
            SpinSystem::new(vec!["X".into(), "Y".into()], vec![0.0, 0.0], couplings).unwrap();
        let h = build_internal_hamiltonian(&sys, CouplingModel::Weak);
        let q = TAU * 10.0 / 4.0;
        for (idx, sign) in [(0, 1.0), (1, -1.0), (2, -1.0), (3, 1.0)] {
            assert_abs_diff_eq!(h[(idx, idx)].re, sign * q, epsilon = 1e-12);
        }
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .map(|(i, j)| h[(i, j)].norm())
            .sum();
        assert!(off < 1e-14);
    }

    /// Independent assembly: matrix elements straight from bit arithmetic,
    /// no tensor products.
    fn brute_force_crotonic_isotropic() -> CMatrix {
        let sys = SpinSystem::crotonic_default();
        let n = 4;
        let d = 16;
        let zbit = |idx: usize, k: usize| -> f64 {
            if (idx >> (n - 1 - k)) & 1 == 0 {
                0.5
            } else {
                -0.5
            }
        };
        let mut h: CMatrix = Array2::zeros((d, d));
        for i in 0..d {
            let mut diag = 0.0;
            for k in 0..n {
                diag += TAU * sys.frequency_hz(k) * zbit(i, k);
            }
            for k in 0..n {
                for l in (k + 1)..n {
                    diag += TAU * sys.coupling_hz(k, l) * zbit(i, k) * zbit(i, l);
                }
            }
            h[(i, i)] = Complex64::new(diag, 0.0);
            for j in 0..d {
                if i == j {
                    continue;
                }
                let flipped = i ^ j;
                if flipped.count_ones() != 2 {
                    continue;
                }
                let bits: Vec<usize> = (0..n).filter(|k| (flipped >> (n - 1 - k)) & 1 == 1).collect();
                let (k, l) = (bits[0], bits[1]);
                // flip-flop term requires opposite z projections
                if zbit(i, k) + zbit(i, l) == 0.0 {
                    h[(i, j)] = Complex64::new(TAU * sys.coupling_hz(k, l) / 2.0, 0.0);
                }
            }
        }
        h
    }

    #[test]
    fn crotonic_isotropic_matches_brute_force_assembly() {
        let sys = SpinSystem::crotonic_default();
        let h = build_internal_hamiltonian(&sys, CouplingModel::Isotropic);
        let brute = brute_force_crotonic_isotropic();
        assert!(max_abs_diff(&h, &brute) < 1e-9 * max_abs(&h));
    }

    #[test]
    fn crotonic_spectrum_matches_independent_diagonalization() {
        let h = brute_force_crotonic_isotropic();
        let mine = crate::linalg::hermitian_eig(&h).unwrap().values;

        let na = nalgebra::DMatrix::from_fn(16, 16, |i, j| h[(i, j)]);
        let mut reference: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in mine.iter().zip(reference.iter()) {
            assert!((a - b).abs() <= 1e-8 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_and_traceless() {
        let sys = SpinSystem::crotonic_default();
        for model in [CouplingModel::Isotropic, CouplingModel::Weak] {
            let h = build_internal_hamiltonian(&sys, model);
            assert!(hermiticity_defect(&h) < 1e-12 * max_abs(&h).max(1.0));
            assert!(trace(&h).norm() <= 1e-9 * max_abs(&h));
        }
    }

    #[test]
    fn weak_and_isotropic_agree_in_weak_coupling_regime() {
        // |nu_1 - nu_2| = 5000 Hz >= 100 * J = 1000 Hz
        let mut couplings = Array2::zeros((2, 2));
        couplings[(0, 1)] = 10.0;
        couplings[(1, 0)] = 10.0;
        let sys =
            SpinSystem::new(vec!["X".into(), "Y".into()], vec![0.0, 5000.0], couplings).unwrap();
        let iso = build_internal_hamiltonian(&sys, CouplingModel::Isotropic);
        let weak = build_internal_hamiltonian(&sys, CouplingModel::Weak);
        let mut ei = crate::linalg::hermitian_eig(&iso).unwrap().values;
        let mut ew = crate::linalg::hermitian_eig(&weak).unwrap().values;
        ei.sort_by(f64::total_cmp);
        ew.sort_by(f64::total_cmp);
        for (a, b) in ei.iter().zip(ew.iter()) {
            assert!((a - b).abs() <= TAU * 0.5, "{a} vs {b}");
        }
    }

    #[test]
    fn control_operator_examples() {
        let one = control_operators(1);
        assert!(max_abs_diff(&one.ix, &sigma_x().mapv(|z| z * 0.5)) < 1e-15);
        let two = control_operators(2);
        let expect = (tensor_product_all(&[&sigma_x(), &identity(2)]).unwrap()
            + tensor_product_all(&[&identity(2), &sigma_x()]).unwrap())
        .mapv(|z| z * 0.5);
        assert!(max_abs_diff(&two.ix, &expect) < 1e-15);
    }

    #[test]
    fn su2_commutator_holds_up_to_four_spins() {
        for n in 1..=4 {
            let ops = control_operators(n);
            let comm = ops.ix.dot(&ops.iy) - ops.iy.dot(&ops.ix);
            let expect = ops.iz.mapv(|z| z * Complex64::new(0.0, 1.0));
            assert!(max_abs_diff(&comm, &expect) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn iz_diagonal_matches_operator() {
        for n in 1..=4 {
            let ops = control_operators(n);
            let diag = iz_diagonal(n);
            for (i, &m) in diag.iter().enumerate() {
                assert_abs_diff_eq!(ops.iz[(i, i)].re, m, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn crotonic_ensemble_has_sixteen_members_weighing_thirty_two() {
        let sys = SpinSystem::crotonic_default();
        let hc = Array2::zeros((5, 4));
        let env = crotonic_proton_environment(hc.clone()).unwrap();
        let ensemble = environment_ensemble(&sys, &env.couplings_hz, &env.methyl).unwrap();
        assert_eq!(ensemble.len(), 16);
        assert_eq!(ensemble.total_weight(), 32);
        // zero couplings: every member degenerates to the bare system
        for member in ensemble.members() {
            assert_eq!(member.system, sys);
        }
    }

    #[test]
    fn single_proton_toy_splitting() {
        let sys = SpinSystem::crotonic_default();
        let mut hc = Array2::zeros((1, 4));
        hc[(0, 0)] = 125.0;
        let ensemble = environment_ensemble(&sys, &hc, &[]).unwrap();
        assert_eq!(ensemble.len(), 2);
        let mut shifts: Vec<f64> = ensemble
            .members()
            .iter()
            .map(|m| m.system.frequency_hz(0) - sys.frequency_hz(0))
            .collect();
        shifts.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(shifts[0], -62.5);
        assert_abs_diff_eq!(shifts[1], 62.5);
        for m in ensemble.members() {
            for c in 1..4 {
                assert_abs_diff_eq!(m.system.frequency_hz(c), sys.frequency_hz(c));
            }
        }
    }

    #[test]
    fn ensemble_rejects_unequal_methyl_rows() {
        let sys = SpinSystem::crotonic_default();
        let mut hc = Array2::zeros((5, 4));
        hc[(0, 0)] = 1.0;
        hc[(1, 0)] = 2.0;
        assert!(environment_ensemble(&sys, &hc, &[0, 1, 2]).is_err());
    }

    #[test]
    fn ensemble_rejects_wrong_dimensions() {
        let sys = SpinSystem::crotonic_default();
        let hc = Array2::zeros((3, 2));
        assert!(environment_ensemble(&sys, &hc, &[]).is_err());
    }
}
