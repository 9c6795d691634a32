use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

/// Pulay DIIS over Fock matrices with commutator error vectors.
#[derive(Debug, Clone)]
pub struct Diis {
    depth: usize,
    focks: VecDeque<DMatrix<f64>>,
    errors: VecDeque<DMatrix<f64>>,
}

impl Diis {
    pub fn new(depth: usize) -> Self {
        Self { depth, focks: VecDeque::new(), errors: VecDeque::new() }
    }

    pub fn len(&self) -> usize {
        self.focks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.focks.is_empty()
    }

    /// Stores the pair and returns the extrapolated Fock matrix.
    pub fn extrapolate(&mut self, fock: DMatrix<f64>, error: DMatrix<f64>) -> DMatrix<f64> {
        if self.focks.len() == self.depth {
            self.focks.pop_front();
            self.errors.pop_front();
        }
        self.focks.push_back(fock);
        self.errors.push_back(error);
        let m = self.focks.len();
        if m < 2 {
            return self.focks[0].clone();
        }
        let mut b = DMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..=i {
                let v = self.errors[i].dot(&self.errors[j]);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        // scale the error block so tiny residuals do not make B singular
        let scale = (0..m).map(|i| b[(i, i)]).fold(0.0, f64::max);
        if scale > 0.0 {
            for i in 0..m {
                for j in 0..m {
                    b[(i, j)] /= scale;
                }
            }
        }
        let mut rhs = DVector::zeros(m + 1);
        rhs[m] = -1.0;
        match b.lu().solve(&rhs) {
            Some(c) if c.iter().all(|v| v.is_finite()) => {
                let mut f = &self.focks[0] * c[0];
                for i in 1..m {
                    f += &self.focks[i] * c[i];
                }
                f
            }
            _ => {
                // drop the oldest entry and fall back to the newest Fock
                self.focks.pop_front();
                self.errors.pop_front();
                self.focks.back().unwrap().clone()
            }
        }
    }
}
