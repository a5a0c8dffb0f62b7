use std::ops::{Add, Mul, Sub};

/// Truncated Taylor expansion `c_0 + c_1 h + ... + c_K h^K` at a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        Jet { coeffs }
    }

    /// The jet of `a + b h`.
    pub fn linear(a: f64, b: f64, order: usize) -> Self {
        let mut j = Self::constant(a, order);
        if order >= 1 {
            j.coeffs[1] = b;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `1 / self`; requires `c_0 != 0`.
    pub fn recip(&self) -> Self {
        let c0 = self.coeffs[0];
        assert!(c0 != 0.0, "reciprocal of a jet with zero constant term");
        let k = self.order();
        let mut r = vec![0.0; k + 1];
        r[0] = 1.0 / c0;
        for n in 1..=k {
            let s: f64 = (1..=n).map(|m| self.coeffs[m] * r[n - m]).sum();
            r[n] = -s / c0;
        }
        Jet { coeffs: r }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Self::constant(1.0, self.order());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// `(sin self, cos self)` from `n s_n = sum k x_k c_{n-k}`,
    /// `n c_n = -sum k x_k s_{n-k}`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let k = self.order();
        let x = &self.coeffs;
        let mut s = vec![0.0; k + 1];
        let mut c = vec![0.0; k + 1];
        s[0] = x[0].sin();
        c[0] = x[0].cos();
        for n in 1..=k {
            let mut sn = 0.0;
            let mut cn = 0.0;
            for m in 1..=n {
                sn += m as f64 * x[m] * c[n - m];
                cn -= m as f64 * x[m] * s[n - m];
            }
            s[n] = sn / n as f64;
            c[n] = cn / n as f64;
        }
        (Jet { coeffs: s }, Jet { coeffs: c })
    }

    /// Horner evaluation at `h`.
    pub fn eval(&self, h: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * h + c)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let k = self.order().min(rhs.order());
        let coeffs = (0..=k)
            .map(|n| (0..=n).map(|m| self.coeffs[m] * rhs.coeffs[n - m]).sum())
            .collect();
        Jet { coeffs }
    }
}
