//! Dense LU factorization with partial pivoting for small fixed-size systems.

/// `P A = L U` packed into one matrix, with the row permutation alongside.
#[derive(Debug, Clone)]
pub struct Lu<const N: usize> {
    lu: [[f64; N]; N],
    perm: [usize; N],
}

impl<const N: usize> Lu<N> {
    /// Factorizes `a`. Returns `None` when a pivot is zero or not finite, or
    /// smaller than `rel_pivot_tol` times the largest absolute entry of `a`.
    pub fn factor(a: &[[f64; N]; N], rel_pivot_tol: f64) -> Option<Self> {
        let scale = a
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if !(scale > 0.0) || !scale.is_finite() {
            return None;
        }
        let mut lu = *a;
        let mut perm = [0usize; N];
        for (k, p) in perm.iter_mut().enumerate() {
            *p = k;
        }

        for k in 0..N {
            let (p, pivot) = (k..N)
                .map(|r| (r, lu[r][k].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if !(pivot > rel_pivot_tol * scale) || !pivot.is_finite() {
                return None;
            }
            if p != k {
                lu.swap(p, k);
                perm.swap(p, k);
            }
            let inv = 1.0 / lu[k][k];
            for r in (k + 1)..N {
                let factor = lu[r][k] * inv;
                lu[r][k] = factor;
                if factor != 0.0 {
                    for c in (k + 1)..N {
                        lu[r][c] -= factor * lu[k][c];
                    }
                }
            }
        }
        Some(Lu { lu, perm })
    }

    /// Solves `a x = b` where `a` is the matrix this factorization came
    /// from, followed by refinement steps with compensated residuals.
    pub fn solve_refined(&self, a: &[[f64; N]; N], b: &[f64; N], steps: usize) -> [f64; N] {
        let mut x = self.solve(b);
        for _ in 0..steps {
            let mut r = [0.0; N];
            for (i, ri) in r.iter_mut().enumerate() {
                *ri = dot2(&a[i], &x, -b[i]);
            }
            let dx = self.solve(&r);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi -= d;
            }
        }
        x
    }

    pub fn solve(&self, b: &[f64; N]) -> [f64; N] {
        let mut x = [0.0; N];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = b[self.perm[i]];
        }
        // forward substitution, unit lower triangle
        for i in 0..N {
            let mut s = x[i];
            for k in 0..i {
                s -= self.lu[i][k] * x[k];
            }
            x[i] = s;
        }
        for i in (0..N).rev() {
            let mut s = x[i];
            for k in (i + 1)..N {
                s -= self.lu[i][k] * x[k];
            }
            x[i] = s / self.lu[i][i];
        }
        x
    }
}

/// `a x`, each row accumulated with a compensated dot product.
pub fn mat_vec<const N: usize>(a: &[[f64; N]; N], x: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for (o, row) in out.iter_mut().zip(a) {
        *o = dot2(row, x, 0.0);
    }
    out
}

/// `init + sum a_i b_i` in twice the working precision (Ogita, Rump, Oishi).
pub fn dot2(a: &[f64], b: &[f64], init: f64) -> f64 {
    let mut s = init;
    let mut c = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        let pe = x.mul_add(y, -p);
        let t = s + p;
        let z = t - s;
        let se = (s - (t - z)) + (p - z);
        s = t;
        c += pe + se;
    }
    s + c
}
