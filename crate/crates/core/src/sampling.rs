//! Seeded pseudo-random sampling.
//!
//! All randomness in the crate goes through [`Sampler`], so a fixed seed
//! reproduces every sample bit for bit on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{Matrix, SymMatrix, Vector};

/// Generator algorithm recorded in reports.
pub const GENERATOR: &str = "rand_chacha-0.3/ChaCha8Rng";

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent child stream; used to give every instance of a suite its
    /// own generator regardless of how many draws earlier instances made.
    pub fn fork(&mut self) -> Sampler {
        Sampler::new(self.rng.gen())
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.gen::<f64>()
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.gen_range(0..upper)
    }

    pub fn int_in(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (self.uniform(lo.ln(), hi.ln())).exp()
    }

    /// Standard normal draw (Box–Muller).
    pub fn normal(&mut self) -> f64 {
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen::<f64>();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn vector_in_box(&mut self, n: usize, lo: f64, hi: f64) -> Vector {
        let mut v = Vector::zeros(n);
        for i in 0..n {
            v[i] = self.uniform(lo, hi);
        }
        v
    }

    pub fn unit_vector(&mut self, n: usize) -> Vector {
        loop {
            let mut v = Vector::zeros(n);
            for i in 0..n {
                v[i] = self.normal();
            }
            let r = v.norm();
            if r > 1e-8 {
                return v.scale(1.0 / r);
            }
        }
    }

    /// Point with log-uniform radius in `[r_min, r_max]` around `center`.
    pub fn point_in_shell(&mut self, center: &Vector, r_min: f64, r_max: f64) -> Vector {
        let dir = self.unit_vector(center.dim());
        let r = self.log_uniform(r_min, r_max);
        center.axpy(r, &dir)
    }

    /// Entries uniform in `[-1, 1]`.
    pub fn symmetric_matrix(&mut self, n: usize) -> SymMatrix {
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                a.set(i, j, self.uniform(-1.0, 1.0));
            }
        }
        a
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.uniform(-1.0, 1.0));
            }
        }
        m
    }

    /// `n × k` matrix with orthonormal columns (modified Gram–Schmidt, two passes).
    pub fn orthonormal_columns(&mut self, n: usize, k: usize) -> Matrix {
        assert!(k <= n);
        loop {
            let mut cols: Vec<Vector> = Vec::with_capacity(k);
            let mut ok = true;
            for _ in 0..k {
                let mut v = self.unit_vector(n);
                for _ in 0..2 {
                    for c in &cols {
                        v = v.axpy(-v.dot(c), c);
                    }
                }
                let r = v.norm();
                if r < 1e-6 {
                    ok = false;
                    break;
                }
                cols.push(v.scale(1.0 / r));
            }
            if ok {
                return Matrix::from_columns(&cols);
            }
        }
    }

    pub fn orthogonal(&mut self, n: usize) -> Matrix {
        self.orthonormal_columns(n, n)
    }
}
