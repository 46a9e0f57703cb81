//! Dense exact-diagonalization oracle.
//!
//! Materializes check-matrix operators as `2^N x 2^N` matrices and computes
//! ground states inside specified stabilizer sectors. This is the validation
//! surface for everything the perturbative pipeline produces; it does not
//! scale past desk sizes by design. Full Hermitian diagonalization is used up
//! to ten qubits, a matrix-free Lanczos iteration beyond that.

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};
use crate::stabilizer::GroundStateSpec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Hard qubit cap for dense materialization.
pub const DENSE_QUBIT_CAP: usize = 14;
/// Above this, `sector_ground_state` switches to the iterative path.
pub const FULL_DIAG_QUBIT_CAP: usize = 10;

/// Explicit matrix with its qubit count.
#[derive(Clone)]
pub struct DenseOperator {
    n: usize,
    mat: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn nqubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        for i in 0..d {
            for j in i..d {
                if (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Apply one Heisenberg-Weyl string to a state vector.
///
/// `T^(x,z) |s> = i^(x·z) (-1)^(z·s) |s xor x>`.
fn apply_term(term: &PauliTerm, state: &[Complex64], out: &mut [Complex64], weight: Complex64) {
    let n = term.nqubits();
    let mut x_mask: u64 = 0;
    let mut z_mask: u64 = 0;
    let mut xz_overlap = 0u32;
    for w in 0..term.x_words().len() {
        xz_overlap += (term.x_words()[w] & term.z_words()[w]).count_ones();
    }
    for site in 0..n {
        if term.x_bit(site) {
            x_mask |= 1 << site;
        }
        if term.z_bit(site) {
            z_mask |= 1 << site;
        }
    }
    let global = match xz_overlap % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    } * weight;
    for (s, amp) in state.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let sign = if (z_mask & s as u64).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[s ^ x_mask as usize] += global * sign * amp;
    }
}

/// Matrix-free action of a check-matrix operator on a state vector.
pub fn apply_sum(op: &PauliSum, state: &[Complex64], out: &mut [Complex64]) {
    out.fill(Complex64::new(0.0, 0.0));
    for (c, t) in op.terms() {
        apply_term(&t, state, out, c);
    }
}

/// Materialize an operator as a dense matrix.
pub fn to_dense(op: &PauliSum) -> Result<DenseOperator> {
    let n = op.nqubits();
    if n > DENSE_QUBIT_CAP {
        return Err(Error::DenseCapExceeded { n, cap: DENSE_QUBIT_CAP });
    }
    let dim = 1usize << n;
    let mut mat = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut basis = vec![Complex64::new(0.0, 0.0); dim];
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    for s in 0..dim {
        basis.fill(Complex64::new(0.0, 0.0));
        basis[s] = Complex64::new(1.0, 0.0);
        apply_sum(op, &basis, &mut col);
        for r in 0..dim {
            mat[(r, s)] = col[r];
        }
    }
    Ok(DenseOperator { n, mat })
}

/// `<state| O |state>`.
pub fn exact_expectation(op: &DenseOperator, state: &DVector<Complex64>) -> Result<Complex64> {
    if op.dim() != state.len() {
        return Err(Error::SizeMismatch { left: op.dim(), right: state.len() });
    }
    Ok(state.dotc(&(&op.mat * state)))
}

/// Matrix-free `<state| O |state>` straight from the check matrix.
pub fn expectation_sparse(op: &PauliSum, state: &[Complex64]) -> Complex64 {
    let mut tmp = vec![Complex64::new(0.0, 0.0); state.len()];
    apply_sum(op, state, &mut tmp);
    state
        .iter()
        .zip(&tmp)
        .map(|(a, b)| a.conj() * b)
        .sum()
}

fn project_sector(sector: &[(i8, PauliTerm)], state: &mut Vec<Complex64>) {
    let mut tmp = vec![Complex64::new(0.0, 0.0); state.len()];
    for (sign, g) in sector {
        tmp.fill(Complex64::new(0.0, 0.0));
        apply_term(g, state, &mut tmp, Complex64::new(f64::from(*sign), 0.0));
        for (s, t) in state.iter_mut().zip(&tmp) {
            *s = 0.5 * (*s + t);
        }
    }
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in v.iter_mut() {
            *c /= norm;
        }
    }
    norm
}

/// Lowest eigenpair by Lanczos iteration with full reorthogonalization.
///
/// `project` is applied after every matrix application to keep the Krylov
/// space inside an invariant subspace.
fn lanczos_lowest<F, P>(
    dim: usize,
    apply: F,
    project: P,
    seed: u64,
) -> Result<(f64, Vec<Complex64>)>
where
    F: Fn(&[Complex64], &mut [Complex64]),
    P: Fn(&mut Vec<Complex64>),
{
    let max_iter = 400.min(dim);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut v0: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    project(&mut v0);
    if normalize(&mut v0) < 1e-12 {
        return Err(Error::InvalidInput("sector projector annihilates the start vector".into()));
    }

    let mut basis: Vec<Vec<Complex64>> = vec![v0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut prev_eval = f64::INFINITY;

    for k in 0..max_iter {
        apply(&basis[k], &mut w);
        let mut wv: Vec<Complex64> = w.clone();
        project(&mut wv);
        let alpha = basis[k]
            .iter()
            .zip(&wv)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>();
        alphas.push(alpha);
        // full reorthogonalization against the whole basis, twice
        for _ in 0..2 {
            for b in &basis {
                let overlap: Complex64 = b.iter().zip(&wv).map(|(a, c)| a.conj() * c).sum();
                for (t, s) in wv.iter_mut().zip(b) {
                    *t -= overlap * s;
                }
            }
        }
        let beta = normalize(&mut wv);

        // smallest eigenvalue of the running tridiagonal matrix
        let m = alphas.len();
        let mut tri = DMatrix::zeros(m, m);
        for i in 0..m {
            tri[(i, i)] = alphas[i];
            if i + 1 < m {
                tri[(i, i + 1)] = betas.get(i).copied().unwrap_or(0.0);
                tri[(i + 1, i)] = tri[(i, i + 1)];
            }
        }
        let eig = tri.clone().symmetric_eigen();
        let (mut best, mut best_val) = (0, f64::INFINITY);
        for (i, &val) in eig.eigenvalues.iter().enumerate() {
            if val < best_val {
                best_val = val;
                best = i;
            }
        }

        let converged = beta < 1e-13 || (prev_eval - best_val).abs() < 1e-13;
        if converged || k + 1 == max_iter {
            let coeffs = eig.eigenvectors.column(best);
            let mut state = vec![Complex64::new(0.0, 0.0); dim];
            for (ci, b) in coeffs.iter().zip(&basis) {
                for (s, amp) in state.iter_mut().zip(b) {
                    *s += Complex64::new(*ci, 0.0) * amp;
                }
            }
            project(&mut state);
            normalize(&mut state);
            return Ok((best_val, state));
        }
        prev_eval = best_val;
        betas.push(beta);
        basis.push(wv);
    }
    unreachable!("loop returns on the final iteration");
}

/// Lowest eigenpair of `H` restricted to the joint eigenspace selected by the
/// signed sector operators.
///
/// Dispatches to full diagonalization for small systems and Lanczos above
/// [`FULL_DIAG_QUBIT_CAP`] qubits. The sector operators must commute with `H`
/// and with each other.
pub fn sector_ground_state(
    h: &PauliSum,
    sector: &[(i8, PauliTerm)],
) -> Result<(f64, DVector<Complex64>)> {
    if sector.is_empty() {
        return Err(Error::InvalidInput("empty sector".into()));
    }
    for (i, (_, a)) in sector.iter().enumerate() {
        for (j, (_, b)) in sector.iter().enumerate().skip(i + 1) {
            if !a.commutes_with(b)? {
                return Err(Error::NonCommutingPair { i, j });
            }
        }
        let as_sum = PauliSum::from_terms(h.nqubits(), &[(Complex64::new(1.0, 0.0), a.clone())]);
        if !h.commutator(&as_sum)?.is_empty() {
            return Err(Error::NonCommutingStabilizer { index: i });
        }
    }
    lowest_eigenpair(h, sector)
}

/// Global ground state, no sector restriction (used for pinned-field oracles).
pub fn ground_state(h: &PauliSum) -> Result<(f64, DVector<Complex64>)> {
    lowest_eigenpair(h, &[])
}

fn lowest_eigenpair(
    h: &PauliSum,
    sector: &[(i8, PauliTerm)],
) -> Result<(f64, DVector<Complex64>)> {
    let n = h.nqubits();
    if n > DENSE_QUBIT_CAP {
        return Err(Error::DenseCapExceeded { n, cap: DENSE_QUBIT_CAP });
    }
    let dim = 1usize << n;
    if n <= FULL_DIAG_QUBIT_CAP {
        let dense = to_dense(h)?;
        let mut mat = dense.mat;
        // project H into the sector: P H P with P = prod (1 + sign*g)/2
        for (sign, g) in sector {
            let gd = to_dense(&PauliSum::from_terms(
                n,
                &[(Complex64::new(f64::from(*sign), 0.0), g.clone())],
            ))?;
            let p = (DMatrix::identity(dim, dim) + gd.mat) * Complex64::new(0.5, 0.0);
            mat = &p * mat * &p;
        }
        let eig = mat.symmetric_eigen();
        let mut best = None;
        for (i, &val) in eig.eigenvalues.iter().enumerate() {
            // states outside the sector are annihilated by P, showing up at 0;
            // reject eigenvectors that the projector kills
            let vec = eig.eigenvectors.column(i);
            let mut v: Vec<Complex64> = vec.iter().copied().collect();
            let mut vv = v.clone();
            project_sector(sector, &mut vv);
            let retained = vv.iter().map(|c| c.norm_sqr()).sum::<f64>();
            if retained < 0.5 {
                continue;
            }
            v = vv;
            normalize(&mut v);
            if best.as_ref().map_or(true, |&(b, _): &(f64, _)| val < b) {
                best = Some((val, DVector::from_vec(v)));
            }
        }
        best.ok_or_else(|| Error::InvalidInput("sector selects an empty subspace".into()))
    } else {
        let (val, state) = lanczos_lowest(
            dim,
            |v, out| apply_sum(h, v, out),
            |v| project_sector(sector, v),
            0x5eed,
        )?;
        Ok((val, DVector::from_vec(state)))
    }
}

/// Dense ground-space projector of a signed stabilizer set,
/// `prod_i (1 + sign_i g_i)/2`.
pub fn stabilizer_projector(n: usize, rows: &[(i8, PauliTerm)]) -> Result<DenseOperator> {
    if n > DENSE_QUBIT_CAP {
        return Err(Error::DenseCapExceeded { n, cap: DENSE_QUBIT_CAP });
    }
    let dim = 1usize << n;
    let mut mat = DMatrix::identity(dim, dim);
    for (sign, g) in rows {
        let gd = to_dense(&PauliSum::from_terms(
            n,
            &[(Complex64::new(f64::from(*sign), 0.0), g.clone())],
        ))?;
        let p = (DMatrix::identity(dim, dim) + gd.mat) * Complex64::new(0.5, 0.0);
        mat = &p * mat;
    }
    Ok(DenseOperator { n, mat })
}

/// Projector onto the ground space described by a full ground-state spec.
pub fn spec_projector(spec: &GroundStateSpec) -> Result<DenseOperator> {
    stabilizer_projector(spec.nqubits(), &spec.signed_rows())
}
