//! Small fixed-capacity vectors for points and directions in dimension 2 or 3.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// A vector in `R^n` with `n <= 3`. Unused components stay zero, so dot
/// products and norms can ignore the dimension tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VecN {
    c: [f64; 3],
    dim: usize,
}

impl VecN {
    pub fn new(c: &[f64]) -> Self {
        assert!(c.len() >= 2 && c.len() <= 3, "dimension must be 2 or 3");
        let mut v = [0.0; 3];
        v[..c.len()].copy_from_slice(c);
        VecN { c: v, dim: c.len() }
    }

    pub fn zero(dim: usize) -> Self {
        assert!((2..=3).contains(&dim));
        VecN { c: [0.0; 3], dim }
    }

    /// The n-th coordinate unit vector `e_n` (the "vertical" direction).
    pub fn e_last(dim: usize) -> Self {
        let mut v = Self::zero(dim);
        v[dim - 1] = 1.0;
        v
    }

    pub fn axis(dim: usize, k: usize) -> Self {
        let mut v = Self::zero(dim);
        v[k] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dot(&self, other: &VecN) -> f64 {
        self.c[0] * other.c[0] + self.c[1] * other.c[1] + self.c[2] * other.c[2]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> VecN {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        *self * (1.0 / n)
    }

    /// Last ("vertical") component.
    pub fn last(&self) -> f64 {
        self.c[self.dim - 1]
    }

    pub fn comps(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }
}

impl Index<usize> for VecN {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        debug_assert!(i < self.dim);
        &self.c[i]
    }
}

impl IndexMut<usize> for VecN {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        debug_assert!(i < self.dim);
        &mut self.c[i]
    }
}

impl Add for VecN {
    type Output = VecN;
    fn add(self, o: VecN) -> VecN {
        debug_assert_eq!(self.dim, o.dim);
        VecN {
            c: [self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2]],
            dim: self.dim,
        }
    }
}

impl Sub for VecN {
    type Output = VecN;
    fn sub(self, o: VecN) -> VecN {
        debug_assert_eq!(self.dim, o.dim);
        VecN {
            c: [self.c[0] - o.c[0], self.c[1] - o.c[1], self.c[2] - o.c[2]],
            dim: self.dim,
        }
    }
}

impl Mul<f64> for VecN {
    type Output = VecN;
    fn mul(self, t: f64) -> VecN {
        VecN {
            c: [self.c[0] * t, self.c[1] * t, self.c[2] * t],
            dim: self.dim,
        }
    }
}

impl Neg for VecN {
    type Output = VecN;
    fn neg(self) -> VecN {
        self * -1.0
    }
}
