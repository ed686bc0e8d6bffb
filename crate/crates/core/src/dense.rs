//! Small dense LU with partial pivoting, used for the reference-element
//! functional systems and the 1D node-basis changes. Sizes stay below ~40.

#[derive(Debug, Clone)]
pub(crate) struct DenseLu {
    n: usize,
    a: Vec<f64>, // row-major, overwritten by L\U
    piv: Vec<usize>,
}

impl DenseLu {
    /// Factor a row-major `n x n` matrix. Returns `None` if a pivot vanishes.
    pub fn new(mut a: Vec<f64>, n: usize) -> Option<Self> {
        assert_eq!(a.len(), n * n);
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let mut ip = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    ip = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            piv[k] = ip;
            if ip != k {
                for j in 0..n {
                    a.swap(k * n + j, ip * n + j);
                }
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let m = a[i * n + k] / pivot;
                a[i * n + k] = m;
                for j in k + 1..n {
                    a[i * n + j] -= m * a[k * n + j];
                }
            }
        }
        Some(Self { n, a, piv })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            for i in k + 1..n {
                b[i] -= self.a[i * n + k] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..n {
                s -= self.a[k * n + j] * b[j];
            }
            b[k] = s / self.a[k * n + k];
        }
    }

    #[cfg(test)]
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
