//! Brute-force density-matrix oracle for two-qubit isotropic states.
//!
//! Qubit `0` is the most significant bit of a basis index.

#![allow(dead_code)]

use num_complex::Complex64 as C;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<C>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C::new(1.0, 0.0);
        }
        m
    }

    /// `|v><v|`.
    pub fn projector(v: &[C]) -> Self {
        let mut m = Self::zeros(v.len());
        for i in 0..v.len() {
            for j in 0..v.len() {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        let mut out = Self::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                for k in 0..b {
                    for l in 0..b {
                        out[(i * b + k, j * b + l)] = self[(i, j)] * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.mul(self).mul(&u.dagger())
    }

    pub fn trace(&self) -> C {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `<v| M |v>`.
    pub fn expectation(&self, v: &[C]) -> C {
        let n = self.dim;
        let mut acc = C::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += v[i].conj() * self[(i, j)] * v[j];
            }
        }
        acc
    }

    /// Keeps the qubits in `keep` (ascending) of an `n`-qubit operator.
    pub fn partial_trace(&self, n: usize, keep: &[usize]) -> Self {
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let compose = |kept: usize, rest: usize| {
            let mut idx = 0;
            for (pos, &q) in keep.iter().enumerate() {
                idx |= ((kept >> (keep.len() - 1 - pos)) & 1) << (n - 1 - q);
            }
            for (pos, &q) in traced.iter().enumerate() {
                idx |= ((rest >> (traced.len() - 1 - pos)) & 1) << (n - 1 - q);
            }
            idx
        };
        let m = 1 << keep.len();
        let mut out = Self::zeros(m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = C::new(0.0, 0.0);
                for r in 0..(1 << traced.len()) {
                    acc += self[(compose(i, r), compose(j, r))];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.dim + j]
    }
}

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Bell states in the order Phi+, Phi-, Psi+, Psi-.
pub fn bell_states() -> [[C; 4]; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        [c(h), c(0.0), c(0.0), c(h)],
        [c(h), c(0.0), c(0.0), c(-h)],
        [c(0.0), c(h), c(h), c(0.0)],
        [c(0.0), c(h), c(-h), c(0.0)],
    ]
}

pub fn phi_plus() -> [C; 4] {
    bell_states()[0]
}

/// `f |Phi+><Phi+| + (1 - f)/3 (I - |Phi+><Phi+|)`.
pub fn isotropic(f: f64) -> Matrix {
    let p = Matrix::projector(&phi_plus());
    let rest = Matrix::identity(4).add(&p.scale(-1.0));
    p.scale(f).add(&rest.scale((1.0 - f) / 3.0))
}

pub fn fidelity(rho: &Matrix) -> f64 {
    rho.expectation(&phi_plus()).re
}

pub fn paulis() -> [Matrix; 4] {
    let mut x = Matrix::zeros(2);
    x[(0, 1)] = c(1.0);
    x[(1, 0)] = c(1.0);
    let mut y = Matrix::zeros(2);
    y[(0, 1)] = C::new(0.0, -1.0);
    y[(1, 0)] = C::new(0.0, 1.0);
    let mut z = Matrix::zeros(2);
    z[(0, 0)] = c(1.0);
    z[(1, 1)] = c(-1.0);
    [Matrix::identity(2), x, y, z]
}

/// Checks the density-matrix axioms; positivity is probed with `probes`.
pub fn assert_valid_state(rho: &Matrix, probes: &[Vec<C>]) {
    assert!(rho.max_abs_diff(&rho.dagger()) < 1e-12, "not Hermitian");
    assert!((rho.trace() - c(1.0)).norm() < 1e-12, "trace is not one");
    for v in probes {
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        assert!(rho.expectation(v).re >= -1e-12 * norm, "not positive semidefinite");
    }
}

/// Joins pairs A-B1 and B2-C by a Bell measurement on B1 B2 followed by
/// the Pauli correction on C that is exact for perfect inputs. Returns the
/// outcome-averaged A-C state.
pub fn swap_oracle(rho1: &Matrix, rho2: &Matrix) -> Matrix {
    let joint = rho1.kron(rho2); // qubits A, B1, B2, C
    let perfect = isotropic(1.0).kron(&isotropic(1.0));
    let id2 = Matrix::identity(2);
    let mut average = Matrix::zeros(4);
    for bell in bell_states() {
        let proj = id2.kron(&Matrix::projector(&bell)).kron(&id2);
        // Correction chosen once from perfect inputs, then applied to all.
        let ideal = perfect.conjugate_by(&proj).partial_trace(4, &[0, 3]);
        let correction = paulis()
            .into_iter()
            .map(|p| id2.kron(&p))
            .max_by(|a, b| {
                fidelity(&ideal.conjugate_by(a))
                    .partial_cmp(&fidelity(&ideal.conjugate_by(b)))
                    .unwrap()
            })
            .unwrap();
        let outcome = joint.conjugate_by(&proj).partial_trace(4, &[0, 3]);
        average = average.add(&outcome.conjugate_by(&correction));
    }
    average
}

fn cnot(n: usize, control: usize, target: usize) -> Matrix {
    let dim = 1 << n;
    let mut m = Matrix::zeros(dim);
    for i in 0..dim {
        let j = if (i >> (n - 1 - control)) & 1 == 1 {
            i ^ (1 << (n - 1 - target))
        } else {
            i
        };
        m[(j, i)] = c(1.0);
    }
    m
}

/// Bilateral CNOT from pair A1-B1 onto A2-B2, Z measurement of the target
/// pair and post-selection on equal outcomes. Returns the normalized A1-B1
/// state and the success probability.
pub fn purify_oracle(rho1: &Matrix, rho2: &Matrix) -> (Matrix, f64) {
    // Qubit order: A1, B1, A2, B2.
    let joint = rho1.kron(rho2);
    let gates = cnot(4, 0, 2).mul(&cnot(4, 1, 3));
    let after = joint.conjugate_by(&gates);
    let mut kept = Matrix::zeros(4);
    for outcome in [0usize, 3] {
        let mut proj = Matrix::zeros(16);
        for i in 0..16 {
            if i & 3 == outcome {
                proj[(i, i)] = c(1.0);
            }
        }
        kept = kept.add(&after.conjugate_by(&proj).partial_trace(4, &[0, 1]));
    }
    let p = kept.trace().re;
    (kept.scale(1.0 / p), p)
}
