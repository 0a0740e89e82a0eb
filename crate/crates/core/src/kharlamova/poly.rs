use nalgebra::DMatrix;
use serde::Serialize;

/// `c0 + c1 x + c2 x^2 + c3 x^3 + c4 x^4`
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuarticPolynomial {
    pub coeffs: [f64; 5],
}

/// A polished real root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealRoot {
    pub x: f64,
    pub multiplicity: usize,
}

/// Imaginary parts below this (relative) are treated as roundoff.
const IMAG_TOL: f64 = 1e-5;
/// Roots closer than this (relative) are resolved together.
const CLUSTER_TOL: f64 = 1e-5;
const NEWTON_ITERS: usize = 60;

impl QuarticPolynomial {
    pub fn new(coeffs: [f64; 5]) -> Self {
        Self { coeffs }
    }

    /// Index of the highest nonzero coefficient.
    pub fn degree(&self) -> usize {
        (0..5).rev().find(|&k| self.coeffs[k] != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (1..5)
            .rev()
            .fold(0.0, |acc, k| acc * x + k as f64 * self.coeffs[k])
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        (2..5).rev().fold(0.0, |acc, k| {
            acc * x + (k * (k - 1)) as f64 * self.coeffs[k]
        })
    }

    /// `sum |c_k| |x|^k`, the natural size of `P(x)`.
    pub fn magnitude(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * x.abs().powi(k as i32))
            .sum()
    }

    /// `sum k |c_k| |x|^(k-1)`, the natural size of `P'(x)`.
    pub fn derivative_scale(&self, x: f64) -> f64 {
        (1..5)
            .map(|k| k as f64 * self.coeffs[k].abs() * x.abs().powi(k as i32 - 1))
            .sum()
    }

    /// Quotient of synthetic division by `(x - r)`, remainder dropped.
    pub fn deflate(&self, r: f64) -> Self {
        let mut q = [0.0; 5];
        let mut carry = 0.0;
        for k in (1..5).rev() {
            carry = carry * r + self.coeffs[k];
            q[k - 1] = carry;
        }
        Self::new(q)
    }

    fn newton<F, D>(f: F, df: D, mut x: f64) -> f64
    where
        F: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        for _ in 0..NEWTON_ITERS {
            let d = df(x);
            if d == 0.0 {
                break;
            }
            let step = f(x) / d;
            if !step.is_finite() {
                break;
            }
            x -= step;
            if step.abs() <= 1e-16 * (1.0 + x.abs()) {
                break;
            }
        }
        x
    }

    fn bisect(&self, mut a: f64, mut b: f64) -> f64 {
        let mut fa = self.eval(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            let fm = self.eval(m);
            if fm == 0.0 {
                return m;
            }
            if (fm > 0.0) == (fa > 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Real roots in increasing order, from companion-matrix eigenvalues with
    /// Newton polish. Nearly coincident roots are resolved through the
    /// critical point between them; a critical value that vanishes within
    /// roundoff yields a single root of multiplicity two.
    pub fn real_roots(&self) -> Vec<RealRoot> {
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[d];
        let companion = DMatrix::from_fn(d, d, |r, c| {
            if r == 0 {
                -self.coeffs[d - 1 - c] / lead
            } else if r == c + 1 {
                1.0
            } else {
                0.0
            }
        });
        let mut candidates: Vec<f64> = companion
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.im.abs() <= IMAG_TOL * (1.0 + z.re.abs()))
            .map(|z| z.re)
            .collect();
        candidates.sort_by(|a, b| a.total_cmp(b));

        let mut clusters: Vec<Vec<f64>> = Vec::new();
        for x in candidates {
            match clusters.last_mut() {
                Some(c) if (x - c[c.len() - 1]).abs() <= CLUSTER_TOL * (1.0 + x.abs()) => c.push(x),
                _ => clusters.push(vec![x]),
            }
        }

        let f = |x: f64| self.eval(x);
        let df = |x: f64| self.derivative(x);
        let ddf = |x: f64| self.second_derivative(x);
        let mut roots = Vec::new();
        for c in clusters {
            if c.len() == 1 {
                let x = Self::newton(f, df, c[0]);
                if self.eval(x).abs() <= 1e-9 * self.magnitude(x).max(1.0) {
                    roots.push(RealRoot { x, multiplicity: 1 });
                }
                continue;
            }
            let center = c.iter().sum::<f64>() / c.len() as f64;
            let xc = Self::newton(df, ddf, center);
            let value = self.eval(xc);
            let tol = 1e-13 * self.magnitude(xc).max(1.0);
            if value.abs() <= tol {
                roots.push(RealRoot {
                    x: xc,
                    multiplicity: c.len(),
                });
            } else if (value > 0.0) == (self.second_derivative(xc) < 0.0) {
                // two simple roots straddling the extremum
                let width = (c[c.len() - 1] - c[0])
                    .abs()
                    .max(CLUSTER_TOL * (1.0 + xc.abs()))
                    * 4.0;
                let mut lo = xc - width;
                while (self.eval(lo) > 0.0) == (value > 0.0) {
                    lo -= width;
                }
                let mut hi = xc + width;
                while (self.eval(hi) > 0.0) == (value > 0.0) {
                    hi += width;
                }
                roots.push(RealRoot {
                    x: self.bisect(lo, xc),
                    multiplicity: 1,
                });
                roots.push(RealRoot {
                    x: self.bisect(xc, hi),
                    multiplicity: 1,
                });
            }
        }
        roots.sort_by(|a, b| a.x.total_cmp(&b.x));
        roots
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_derivatives() {
        let p = QuarticPolynomial::new([1.0, -2.0, 0.5, 3.0, -1.0]);
        let x: f64 = 0.7;
        let direct = 1.0 - 2.0 * x + 0.5 * x * x + 3.0 * x.powi(3) - x.powi(4);
        assert!((p.eval(x) - direct).abs() < 1e-15);
        let d = -2.0 + x + 9.0 * x * x - 4.0 * x.powi(3);
        assert!((p.derivative(x) - d).abs() < 1e-14);
    }

    #[test]
    fn simple_roots() {
        // -(x+2)(x+0.5)(x-1)(x-3)
        let p = QuarticPolynomial::new([-3.0, -3.5, 6.0, 1.5, -1.0]);
        let r: Vec<f64> = p.real_roots().iter().map(|r| r.x).collect();
        for (a, b) in r.iter().zip([-2.0, -0.5, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-13, "{r:?}");
        }
    }

    #[test]
    fn double_root_is_merged() {
        // -(x-1)^2 (x+1)(x-2) = -(x^4 - 3x^3 + x^2 + 3x - 2)
        let p = QuarticPolynomial::new([2.0, -3.0, -1.0, 3.0, -1.0]);
        let r = p.real_roots();
        assert_eq!(r.len(), 3, "{r:?}");
        assert_eq!(r[1].multiplicity, 2);
        assert!((r[1].x - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lower_degree_embedding() {
        let p = QuarticPolynomial::new([1.0, 0.0, -1.0, 0.0, 0.0]);
        let r: Vec<f64> = p.real_roots().iter().map(|r| r.x).collect();
        assert_eq!(r.len(), 2);
        assert!((r[0] + 1.0).abs() < 1e-15 && (r[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deflation() {
        let p = QuarticPolynomial::new([-3.0, -3.5, 6.0, 1.5, -1.0]);
        let q = p.deflate(1.0).deflate(3.0);
        // -(x+2)(x+0.5) = -x^2 - 2.5x - 1
        assert_eq!(q.coeffs, [-1.0, -2.5, -1.0, 0.0, 0.0]);
    }
}
