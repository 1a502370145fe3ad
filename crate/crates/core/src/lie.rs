//! Lie-algebra layer: structure constants, the Poisson–Lie bracket, the
//! coadjoint action and the so(3) Casimir.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Integer weight `j >= 1` labelling the coadjoint orbit through `(j, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitLabel(u32);

impl OrbitLabel {
    pub fn new(j: i64) -> Result<Self> {
        if j >= 1 && j <= u32::MAX as i64 {
            Ok(Self(j as u32))
        } else {
            Err(Error::InvalidOrbit(j))
        }
    }

    pub fn j(self) -> u32 {
        self.0
    }

    /// Dimension `2j + 1` of the carrier space.
    pub fn dim(self) -> usize {
        2 * self.0 as usize + 1
    }

    /// Covector `(j, 0, 0)` through which the orbit passes.
    pub fn covector<T: Real>(self) -> Covector<T> {
        Covector(vec![lit(self.0 as f64), T::zero(), T::zero()])
    }
}

/// Element `f = f_A e^A` of the dual of the algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector<T>(pub Vec<T>);

impl<T: Real> Covector<T> {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// Structure constants `C^C_AB`, stored densely with index order `[A][B][C]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants<T> {
    dim: usize,
    c: Vec<T>,
}

impl<T: Real> StructureConstants<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            c: vec![T::zero(); dim * dim * dim],
        }
    }

    /// Build from a dense `[A][B][C]` tensor.
    pub fn from_dense(dim: usize, c: Vec<T>) -> Result<Self> {
        if dim == 0 || c.len() != dim * dim * dim {
            return Err(Error::Shape(format!(
                "expected {0}x{0}x{0} = {1} entries, got {2}",
                dim,
                dim * dim * dim,
                c.len()
            )));
        }
        Ok(Self { dim, c })
    }

    /// `C^c_ab = ε_abc`, the basis fixed for so(3) throughout the crate.
    pub fn so3() -> Self {
        let mut s = Self::zeros(3);
        for (a, b, c, sign) in [
            (0, 1, 2, 1.0),
            (1, 2, 0, 1.0),
            (2, 0, 1, 1.0),
            (1, 0, 2, -1.0),
            (2, 1, 0, -1.0),
            (0, 2, 1, -1.0),
        ] {
            s.set(a, b, c, lit(sign));
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> T {
        self.c[(a * self.dim + b) * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: T) {
        let d = self.dim;
        self.c[(a * d + b) * d + c] = v;
    }

    /// Parse `{ "dim": n, "entries": [[A, B, C, value], ...] }` (0-based,
    /// zero entries omitted).
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StructureJson = serde_json::from_str(text)?;
        let mut s = Self::zeros(doc.dim);
        if doc.dim == 0 {
            return Err(Error::Shape("dim must be positive".into()));
        }
        for e in doc.entries {
            let [a, b, c, v] = e;
            let idx = |x: f64| -> Result<usize> {
                if x.fract() != 0.0 || x < 0.0 || x as usize >= doc.dim {
                    Err(Error::Shape(format!(
                        "index {x} out of range for dim {}",
                        doc.dim
                    )))
                } else {
                    Ok(x as usize)
                }
            };
            s.set(idx(a)?, idx(b)?, idx(c)?, lit(v));
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let mut entries = Vec::new();
        for a in 0..self.dim {
            for b in 0..self.dim {
                for c in 0..self.dim {
                    let v = self.get(a, b, c);
                    if v != T::zero() {
                        let v: f64 = nalgebra::try_convert(v).unwrap_or(f64::NAN);
                        entries.push([a as f64, b as f64, c as f64, v]);
                    }
                }
            }
        }
        serde_json::to_string(&StructureJson {
            dim: self.dim,
            entries,
        })
        .expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    dim: usize,
    entries: Vec<[f64; 4]>,
}

/// Outcome of [`validate_structure`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport<T> {
    pub antisymmetry_residual: T,
    pub jacobi_residual: T,
    pub antisymmetric: bool,
    pub jacobi: bool,
}

impl<T: Real> ValidityReport<T> {
    pub fn pass(&self) -> bool {
        self.antisymmetric && self.jacobi
    }

    pub fn max_residual(&self) -> T {
        self.antisymmetry_residual.max(self.jacobi_residual)
    }
}

/// Check antisymmetry and the Jacobi identity; `tol` bounds both residuals.
pub fn validate_structure_with_tol<T: Real>(
    c: &StructureConstants<T>,
    tol: T,
) -> ValidityReport<T> {
    let n = c.dim();
    let mut anti = T::zero();
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                anti = anti.max((c.get(a, b, k) + c.get(b, a, k)).abs());
            }
        }
    }
    let mut jac = T::zero();
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                for e in 0..n {
                    let mut s = T::zero();
                    for d in 0..n {
                        s += c.get(a, b, d) * c.get(d, k, e)
                            + c.get(b, k, d) * c.get(d, a, e)
                            + c.get(k, a, d) * c.get(d, b, e);
                    }
                    jac = jac.max(s.abs());
                }
            }
        }
    }
    ValidityReport {
        antisymmetry_residual: anti,
        jacobi_residual: jac,
        antisymmetric: anti <= tol,
        jacobi: jac <= tol,
    }
}

/// [`validate_structure_with_tol`] with a zero tolerance scaled for roundoff.
pub fn validate_structure<T: Real>(c: &StructureConstants<T>) -> ValidityReport<T> {
    validate_structure_with_tol(c, T::default_epsilon() * lit(16.0))
}

/// `{Φ1, Φ2}(f) = C^C_AB f_C ∂_A Φ1 ∂_B Φ2` from caller-supplied gradients.
pub fn poisson_lie_bracket<T: Real>(
    c: &StructureConstants<T>,
    grad1: &[T],
    grad2: &[T],
    f: &Covector<T>,
) -> Result<T> {
    let n = c.dim();
    if grad1.len() != n || grad2.len() != n || f.dim() != n {
        return Err(Error::Shape(format!(
            "bracket operands must have length {n}, got {}, {}, {}",
            grad1.len(),
            grad2.len(),
            f.dim()
        )));
    }
    let mut s = T::zero();
    for a in 0..n {
        for b in 0..n {
            let gg = grad1[a] * grad2[b];
            if gg == T::zero() {
                continue;
            }
            for k in 0..n {
                s += c.get(a, b, k) * f.0[k] * gg;
            }
        }
    }
    Ok(s)
}

/// Central-difference gradient with step `1e-6`, for functions without an
/// analytic gradient.
pub fn numeric_gradient<T: Real>(phi: impl Fn(&[T]) -> T, f: &Covector<T>) -> Vec<T> {
    let h: T = lit(1e-6);
    let mut x = f.0.clone();
    (0..x.len())
        .map(|i| {
            let x0 = x[i];
            x[i] = x0 + h;
            let fp = phi(&x);
            x[i] = x0 - h;
            let fm = phi(&x);
            x[i] = x0;
            (fp - fm) / (h + h)
        })
        .collect()
}

/// `Ad*_g f` for the adjoint matrix `(Ad_g)^B_A` (row `B`, column `A`):
/// `⟨Ad*_g f, X⟩ = ⟨f, Ad_{g⁻¹} X⟩`, i.e. `Ad*_g f = (Ad_g)^{-T} f`.
pub fn coadjoint_apply<T: Real>(ad_matrix: &[Vec<T>], f: &Covector<T>) -> Result<Covector<T>> {
    let n = f.dim();
    if ad_matrix.len() != n || ad_matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("adjoint matrix must be {n}x{n}")));
    }
    let m = nalgebra::DMatrix::from_fn(n, n, |i, k| ad_matrix[i][k]);
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::InvalidGroupElement("adjoint matrix is singular".into()))?;
    let fv = nalgebra::DVector::from_column_slice(&f.0);
    let out = inv.transpose() * fv;
    Ok(Covector(out.iter().copied().collect()))
}

/// `K(f) = f1² + f2² + f3²`.
pub fn casimir_value<T: Real>(f: &Covector<T>) -> Result<T> {
    if f.dim() != 3 {
        return Err(Error::Shape(format!(
            "so(3) Casimir needs 3 components, got {}",
            f.dim()
        )));
    }
    Ok(f.0.iter().fold(T::zero(), |s, x| s + *x * *x))
}
