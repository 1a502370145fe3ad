//! Non-commutative reduction of `ℋ = c^{AB} η_A η_B + c^A η_A` to the
//! operator `c^{AB} ℓ_A ℓ_B + c^A ℓ_A` on the carrier space over Q, its
//! spectrum, reconstruction of group-side solutions, and the Wigner-basis
//! oracle.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    casimir_apply, haar_grid, nested_apply, right_field_apply, Axis, GroupElement,
};
use crate::lambda::{ell_matrix, factor_kernel, kernel_closed_form, QFunction, QGrid, QMeasure};
use crate::lie::OrbitLabel;
use crate::scalar::{cabs, lit, real, Real};
use crate::special::{wigner_d, WignerIndex};

/// Coefficients of `ℋ`: symmetric `c^{AB}` and linear `c^A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec<T> {
    #[serde(rename = "cAB")]
    pub c_ab: [[T; 3]; 3],
    #[serde(rename = "cA")]
    pub c_a: [T; 3],
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn new(c_ab: [[T; 3]; 3], c_a: [T; 3]) -> Result<Self> {
        for a in 0..3 {
            for b in 0..3 {
                if c_ab[a][b] != c_ab[b][a] {
                    return Err(Error::Invalid(format!(
                        "cAB is not symmetric at ({a}, {b})"
                    )));
                }
                if !c_ab[a][b].is_finite() {
                    return Err(Error::Invalid("cAB has non-finite entries".into()));
                }
            }
        }
        if c_a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("cA has non-finite entries".into()));
        }
        Ok(Self { c_ab, c_a })
    }

    /// `c^{AB} = −diag(a, a, b)`, `c^A = 0`; energies `a j(j+1) + (b−a) n²`.
    pub fn symmetric_top(a: T, b: T) -> Self {
        let z = T::zero();
        Self {
            c_ab: [[-a, z, z], [z, -a, z], [z, z, -b]],
            c_a: [z; 3],
        }
    }

    pub fn is_quadratic(&self) -> bool {
        self.c_a.iter().all(|v| *v == T::zero())
    }
}

/// `c^{AB} ℓ_A ℓ_B + c^A ℓ_A` on the basis `e^{−inq}`.
pub fn reduced_operator<T: Real>(spec: &HamiltonianSpec<T>, j: OrbitLabel) -> DMatrix<Complex<T>> {
    let l: Vec<DMatrix<Complex<T>>> = Axis::ALL.iter().map(|a| ell_matrix(*a, j)).collect();
    let dim = j.dim();
    let mut h = DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()));
    for a in 0..3 {
        for b in 0..3 {
            if spec.c_ab[a][b] != T::zero() {
                h += (&l[a] * &l[b]) * real(spec.c_ab[a][b]);
            }
        }
        if spec.c_a[a] != T::zero() {
            h += &l[a] * real(spec.c_a[a]);
        }
    }
    h
}

/// Eigenpair of the reduced operator, normalised under `μ_j`.
#[derive(Debug, Clone)]
pub struct ReducedSolution<T: Real> {
    pub j: OrbitLabel,
    /// Real for `c^A = 0`; the linear term is anti-Hermitian and makes it
    /// complex otherwise.
    pub energy: Complex<T>,
    pub psi: QFunction<T>,
}

fn cmp_complex<T: Real>(a: &Complex<T>, b: &Complex<T>) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}

/// Eigenpairs sorted by energy (real part, then imaginary part).
pub fn reduced_spectrum<T: Real>(
    spec: &HamiltonianSpec<T>,
    j: OrbitLabel,
) -> Result<Vec<ReducedSolution<T>>> {
    if j.j() > 20 {
        return Err(Error::Invalid(format!(
            "reduced spectrum supports j <= 20 (got {})",
            j.j()
        )));
    }
    let h = reduced_operator(spec, j);
    let measure = QMeasure::<T>::exact(j);
    let dim = j.dim();
    let sq: Vec<T> = (0..dim).map(|k| measure.gram[(k, k)].re.sqrt()).collect();
    let mut out = Vec::with_capacity(dim);
    if spec.is_quadratic() {
        let ht = DMatrix::from_fn(dim, dim, |r, c| h[(r, c)] * (sq[r] / sq[c]));
        let ht = (&ht + ht.adjoint()) * real::<T>(lit(0.5));
        let eig = ht.symmetric_eigen();
        for k in 0..dim {
            let y = eig.eigenvectors.column(k);
            let coeffs: Vec<Complex<T>> = (0..dim).map(|r| y[r] / sq[r]).collect();
            let psi = normalise(QFunction::new(j, coeffs)?, &measure);
            out.push(ReducedSolution {
                j,
                energy: real(eig.eigenvalues[k]),
                psi,
            });
        }
    } else {
        let eigs = h
            .clone()
            .schur()
            .eigenvalues()
            .ok_or_else(|| Error::Numerical("Schur eigenvalue extraction failed".into()))?;
        for e in eigs.iter() {
            let shifted = &h - DMatrix::identity(dim, dim) * *e;
            let svd = shifted.svd(false, true);
            let v_t = svd
                .v_t
                .ok_or_else(|| Error::Numerical("SVD failed".into()))?;
            let (k, _) = svd.singular_values.iter().enumerate().fold(
                (0, T::max_value().unwrap_or(T::one())),
                |(bk, bv), (k, v)| if *v < bv { (k, *v) } else { (bk, bv) },
            );
            let coeffs: Vec<Complex<T>> = (0..dim).map(|r| v_t[(k, r)].conj()).collect();
            let psi = normalise(QFunction::new(j, coeffs)?, &measure);
            out.push(ReducedSolution { j, energy: *e, psi });
        }
    }
    out.sort_by(|a, b| cmp_complex(&a.energy, &b.energy));
    Ok(out)
}

fn normalise<T: Real>(psi: QFunction<T>, measure: &QMeasure<T>) -> QFunction<T> {
    let n = psi.norm(measure);
    psi.scale(real(T::one() / n))
}

/// `∫_Q ψ(q′) 𝒟^j_{qq̄′}(g⁻¹) dμ_j(q′)`.
pub fn reconstruct_solution<T: Real>(
    psi: &QFunction<T>,
    q: Complex<T>,
    g: &GroupElement<T>,
    grid: &QGrid<T>,
) -> Complex<T> {
    let j = psi.j;
    grid.integrate_seq(|qp| psi.eval(qp) * kernel_closed_form(q, qp.conj(), g, j))
}

/// Factorised form `U(q, g) ψ(q∘g⁻¹)`.
pub fn reconstruct_factorized<T: Real>(
    psi: &QFunction<T>,
    q: Complex<T>,
    g: &GroupElement<T>,
) -> Result<Complex<T>> {
    let (u, moved) = factor_kernel(q, g, psi.j)?;
    Ok(u * psi.eval(moved))
}

/// `max_a |η_a φ_ψ − φ_{ℓ_a ψ}|` at `g`.
pub fn intertwining_residual<T: Real>(
    psi: &QFunction<T>,
    q: Complex<T>,
    g: &GroupElement<T>,
    grid: &QGrid<T>,
) -> Result<T> {
    let mut worst = T::zero();
    for a in Axis::ALL {
        let f = |x: &GroupElement<T>| reconstruct_solution(psi, q, x, grid);
        let lhs = right_field_apply(a, &f, g)?;
        let rhs = reconstruct_solution(&psi.apply(&ell_matrix(a, psi.j)), q, g, grid);
        worst = worst.max(cabs(lhs - rhs));
    }
    Ok(worst)
}

/// `ℋ F (g)` with nested finite differences of the `η` fields.
pub fn apply_hamiltonian<T, F>(
    spec: &HamiltonianSpec<T>,
    f: &F,
    g: &GroupElement<T>,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T>,
{
    let mut acc = Complex::new(T::zero(), T::zero());
    for (a, ax) in Axis::ALL.iter().enumerate() {
        for (b, bx) in Axis::ALL.iter().enumerate() {
            if spec.c_ab[a][b] != T::zero() {
                acc += nested_apply(false, *ax, *bx, f, g)? * spec.c_ab[a][b];
            }
        }
        if spec.c_a[a] != T::zero() {
            acc += right_field_apply(*ax, f, g)? * spec.c_a[a];
        }
    }
    Ok(acc)
}

/// `|ℋ φ − E φ|` for the reconstructed solution, relative to `max(1, |φ|)`.
pub fn schrodinger_residual<T: Real>(
    spec: &HamiltonianSpec<T>,
    sol: &ReducedSolution<T>,
    q: Complex<T>,
    g: &GroupElement<T>,
    grid: &QGrid<T>,
) -> Result<T> {
    let f = |x: &GroupElement<T>| reconstruct_solution(&sol.psi, q, x, grid);
    let hf = apply_hamiltonian(spec, &f, g)?;
    let v = f(g);
    Ok(cabs(hf - v * sol.energy) / cabs(v).max(T::one()))
}

/// `|K(−iξ) φ − j(j+1) φ|`, relative to `max(1, |φ|)`.
pub fn casimir_eigen_check<T: Real>(
    sol: &ReducedSolution<T>,
    q: Complex<T>,
    g: &GroupElement<T>,
    grid: &QGrid<T>,
) -> Result<T> {
    let f = |x: &GroupElement<T>| reconstruct_solution(&sol.psi, q, x, grid);
    let k = casimir_apply(true, &f, g)?;
    let v = f(g);
    let jj: T = lit((sol.j.j() * (sol.j.j() + 1)) as f64);
    Ok(cabs(k - v * jj) / cabs(v).max(T::one()))
}

/// `|U(q, g)|`; identically 1 would make the NI solutions generalized
/// coherent states.
pub fn coherence_criterion<T: Real>(
    sol: &ReducedSolution<T>,
    q: Complex<T>,
    g: &GroupElement<T>,
) -> Result<T> {
    let (u, _) = factor_kernel(q, g, sol.j)?;
    Ok(cabs(u))
}

/// Group-side ground truth: the fields `η_A` projected onto the Wigner basis
/// `D^j_{mn}` with Haar quadrature. The span is invariant under right
/// translation, so `η_A η_B` is the matrix product and any `ℋ` is assembled
/// without new derivatives.
#[derive(Debug, Clone)]
pub struct WignerOracle {
    pub j: u32,
    quad: [[DMatrix<Complex<f64>>; 3]; 3],
    lin: [DMatrix<Complex<f64>>; 3],
}

impl WignerOracle {
    pub fn new(j: u32) -> Result<Self> {
        let n = (2 * j + 2) as usize;
        let grid = haar_grid::<f64>(n, n, n)?;
        let basis: Vec<WignerIndex> = WignerIndex::all(j).collect();
        let dim = basis.len();
        let norm = (2 * j + 1) as f64;
        // conj(D_b(g_k)) w_k
        let dual: Vec<Vec<Complex<f64>>> = basis
            .iter()
            .map(|idx| {
                grid.nodes
                    .iter()
                    .zip(&grid.weights)
                    .map(|(g, w)| wigner_d(*idx, g).map(|d| d.conj() * *w * norm))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        // columns[k][a]: projection of η_a applied to basis k
        let columns: Vec<Vec<Vec<Complex<f64>>>> = basis
            .par_iter()
            .map(|idx| {
                let f = |g: &GroupElement<f64>| {
                    wigner_d(*idx, g).unwrap_or_else(|_| Complex::new(f64::NAN, f64::NAN))
                };
                let mut vals = vec![vec![Complex::new(0.0, 0.0); grid.len()]; 3];
                for (k, g) in grid.nodes.iter().enumerate() {
                    for (a, ax) in Axis::ALL.iter().enumerate() {
                        vals[a][k] = right_field_apply(*ax, &f, g)?;
                    }
                }
                Ok(vals
                    .iter()
                    .map(|v| {
                        dual.iter()
                            .map(|d| d.iter().zip(v).map(|(x, y)| x * y).sum())
                            .collect()
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        let mat = |slot: usize| DMatrix::from_fn(dim, dim, |r, c| columns[c][slot][r]);
        let lin = [mat(0), mat(1), mat(2)];
        let quad = std::array::from_fn(|a| std::array::from_fn(|b| &lin[a] * &lin[b]));
        Ok(Self { j, quad, lin })
    }

    /// Matrix of `ℋ` in the Wigner basis (column = input).
    pub fn hamiltonian(&self, spec: &HamiltonianSpec<f64>) -> DMatrix<Complex<f64>> {
        let dim = self.lin[0].nrows();
        let mut h = DMatrix::from_element(dim, dim, Complex::new(0.0, 0.0));
        for a in 0..3 {
            for b in 0..3 {
                h += &self.quad[a][b] * Complex::new(spec.c_ab[a][b], 0.0);
            }
            h += &self.lin[a] * Complex::new(spec.c_a[a], 0.0);
        }
        h
    }

    /// Largest entry of [`hamiltonian`](Self::hamiltonian) coupling
    /// `D^j_{mn}` to `D^j_{m'n'}` with `m ≠ m'`. Right fields leave the first
    /// index alone, so this is quadrature and finite-difference noise.
    pub fn block_leakage(&self, spec: &HamiltonianSpec<f64>) -> f64 {
        let h = self.hamiltonian(spec);
        let b = (2 * self.j + 1) as usize;
        let mut worst = 0.0f64;
        for r in 0..h.nrows() {
            for c in 0..h.ncols() {
                if r / b != c / b {
                    worst = worst.max(h[(r, c)].norm());
                }
            }
        }
        worst
    }

    /// Eigenvalues of [`hamiltonian`](Self::hamiltonian), sorted: the union
    /// of the spectra of its `2j+1` diagonal blocks, one per `m`. Fails when
    /// the blocks leak into each other by more than `1e-8`.
    pub fn spectrum(&self, spec: &HamiltonianSpec<f64>) -> Result<Vec<Complex<f64>>> {
        let leak = self.block_leakage(spec);
        if leak > 1e-8 {
            return Err(Error::Numerical(format!(
                "oracle blocks couple at {leak:e}"
            )));
        }
        let h = self.hamiltonian(spec);
        let b = (2 * self.j + 1) as usize;
        let mut e = Vec::with_capacity(b * b);
        for m in 0..b {
            let block = h.view((m * b, m * b), (b, b)).into_owned();
            let eigs = block
                .schur()
                .eigenvalues()
                .ok_or_else(|| Error::Numerical("Schur eigenvalue extraction failed".into()))?;
            e.extend(eigs.iter().copied());
        }
        e.sort_by(cmp_complex);
        Ok(e)
    }
}

/// Oracle spectrum for a single Hamiltonian.
pub fn wigner_oracle_spectrum(spec: &HamiltonianSpec<f64>, j: u32) -> Result<Vec<Complex<f64>>> {
    WignerOracle::new(j)?.spectrum(spec)
}

/// Each reduced energy repeated `2j+1` times, sorted.
pub fn with_multiplicity<T: Real>(sols: &[ReducedSolution<T>]) -> Vec<Complex<T>> {
    let mut e: Vec<Complex<T>> = sols
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.energy, s.j.dim()))
        .collect();
    e.sort_by(cmp_complex);
    e
}

/// Largest distance between two multisets of eigenvalues under greedy
/// nearest matching; infinite when the sizes differ.
pub fn spectrum_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, c| {
                if c.1 < best.1 {
                    c
                } else {
                    best
                }
            });
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}
