use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct KrylovOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Final residual relative to `|b|`.
    pub relative_residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations, started from zero.
pub fn gmres<A>(mut apply: A, b: &[f64], rel_tol: f64, restart: usize, max_iters: usize) -> Result<KrylovOutcome>
where
    A: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(KrylovOutcome { solution: x, iterations: 0, relative_residual: 0.0, converged: true });
    }
    let restart = restart.max(1);
    let target = rel_tol * bnorm;
    let mut total = 0;
    let mut r = b.to_vec();
    let mut rnorm = bnorm;
    while total < max_iters {
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / rnorm).collect()];
        let mut hess: Vec<Vec<f64>> = Vec::new();
        let (mut cs, mut sn): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
        let mut g = vec![rnorm];
        let mut estimate = rnorm;
        for j in 0..restart.min(max_iters - total) {
            let mut w = apply(&basis[j])?;
            let mut col = vec![0.0; j + 2];
            for (i, q) in basis.iter().enumerate() {
                let hij = dot(&w, q);
                col[i] = hij;
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= hij * b);
            }
            let wn = norm(&w);
            col[j + 1] = wn;
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let rho = col[j].hypot(col[j + 1]);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (col[j] / rho, col[j + 1] / rho) };
            col[j] = rho;
            col[j + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g.push(-s * g[j]);
            g[j] *= c;
            estimate = g[j + 1].abs();
            hess.push(col);
            total += 1;
            if estimate <= target || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        let k = hess.len();
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = ((i + 1)..k).map(|l| hess[l][i] * y[l]).sum();
            y[i] = (g[i] - s) / hess[i][i];
        }
        for (yi, q) in y.iter().zip(&basis) {
            x.iter_mut().zip(q).for_each(|(a, b)| *a += yi * b);
        }
        let ax = apply(&x)?;
        r = b.iter().zip(&ax).map(|(a, c)| a - c).collect();
        rnorm = norm(&r);
        if rnorm <= target || estimate <= target && rnorm <= 2.0 * target {
            return Ok(KrylovOutcome { solution: x, iterations: total, relative_residual: rnorm / bnorm, converged: true });
        }
        if rnorm == 0.0 || !rnorm.is_finite() {
            break;
        }
    }
    Ok(KrylovOutcome { solution: x, iterations: total, relative_residual: rnorm / bnorm, converged: rnorm <= target })
}
