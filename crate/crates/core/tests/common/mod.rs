//! Independent oracles shared by the integration and acceptance suites.
//! Nothing here calls into the code paths it is used to check.
#![allow(dead_code)]

/// Standard normal cdf from the Maclaurin series of erf (small |x|) and the
/// continued fraction of erfc elsewhere, so neither tail suffers cancellation.
pub fn oracle_normal_cdf(x: f64) -> f64 {
    let z = x / std::f64::consts::SQRT_2;
    if z.abs() < 0.5 {
        // erf(z) = 2/sqrt(pi) * sum_k (-1)^k z^(2k+1) / (k! (2k+1))
        let mut term = z;
        let mut sum = z;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -z * z / k;
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        0.5 * (1.0 + 2.0 / std::f64::consts::PI.sqrt() * sum)
    } else {
        // erfc(|z|) via Lentz continued fraction
        let a = z.abs();
        let mut f = a;
        let mut c = a;
        let mut d = 0.0;
        for n in 1..100_000 {
            let an = n as f64 / 2.0;
            d = a + an * d;
            d = 1.0 / d;
            c = a + an / c;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let erfc = (-a * a).exp() / (f * std::f64::consts::PI.sqrt());
        if z > 0.0 {
            1.0 - 0.5 * erfc
        } else {
            0.5 * erfc
        }
    }
}

/// Bisection inverse of [`oracle_normal_cdf`], run on the lower tail.
pub fn oracle_normal_quantile(p: f64) -> f64 {
    if p > 0.5 {
        return -oracle_normal_quantile(1.0 - p);
    }
    let (mut lo, mut hi) = (-40.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if oracle_normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest sample value `t` with `#{s <= t} / N >= level`, by direct scan.
pub fn oracle_quantile(samples: &[f64], level: f64) -> f64 {
    let n = samples.len() as f64;
    let mut best = f64::INFINITY;
    for &t in samples {
        let count = samples.iter().filter(|&&s| s <= t).count() as f64;
        if count / n >= level && t < best {
            best = t;
        }
    }
    best
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[piv][k].abs() < 1e-11 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// `min c'x  s.t.  G x <= h` by enumerating every vertex (all subsets of `dim`
/// tight rows). Returns the best objective and point, or `None` if no vertex
/// is feasible.
pub fn vertex_enumeration(c: &[f64], g: &[Vec<f64>], h: &[f64]) -> Option<(f64, Vec<f64>)> {
    let dim = c.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for_each_subset(g.len(), dim, &mut |rows| {
        let a: Vec<Vec<f64>> = rows.iter().map(|&r| g[r].clone()).collect();
        let b: Vec<f64> = rows.iter().map(|&r| h[r]).collect();
        if let Some(x) = solve_dense(a, b) {
            let feasible = g.iter().zip(h).all(|(row, hi)| {
                let v: f64 = row.iter().zip(&x).map(|(p, q)| p * q).sum();
                v <= hi + 1e-9 * (1.0 + hi.abs())
            });
            if feasible {
                let obj: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                if best.as_ref().map_or(true, |(b, _)| obj < *b) {
                    best = Some((obj, x));
                }
            }
        }
    });
    best
}

/// Dantzig program `min ||b||_1  s.t.  |G b - c|_inf <= t`, written with
/// bound variables `u >= |b|` and solved by vertex enumeration over `(b, u)`.
pub fn dantzig_by_vertices(gram: &[Vec<f64>], corr: &[f64], t: f64) -> Option<(f64, Vec<f64>)> {
    let p = corr.len();
    let mut g = Vec::new();
    let mut h = Vec::new();
    for j in 0..p {
        let mut up = vec![0.0; 2 * p];
        up[..p].copy_from_slice(&gram[j]);
        g.push(up.clone());
        h.push(corr[j] + t);
        g.push(up.iter().map(|v| -v).collect());
        h.push(t - corr[j]);
    }
    for k in 0..p {
        let mut a = vec![0.0; 2 * p];
        a[k] = 1.0;
        a[p + k] = -1.0;
        g.push(a);
        h.push(0.0);
        let mut b = vec![0.0; 2 * p];
        b[k] = -1.0;
        b[p + k] = -1.0;
        g.push(b);
        h.push(0.0);
    }
    let mut c = vec![0.0; 2 * p];
    c[p..].iter_mut().for_each(|v| *v = 1.0);
    vertex_enumeration(&c, &g, &h).map(|(obj, x)| (obj, x[..p].to_vec()))
}

/// Random normalized regression sample: `n x p` design with correlated
/// columns scaled to `E_n[z^2] = 1`, and `y = z'beta + noise`.
pub fn random_regression(rng: &mut Lcg, n: usize, p: usize, beta: &[f64], noise: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let rho = rng.uniform(0.0, 0.8);
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let f = rng.normal();
            (0..p).map(|_| rho.sqrt() * f + (1.0 - rho).sqrt() * rng.normal()).collect()
        })
        .collect();
    for j in 0..p {
        let s = (rows.iter().map(|r| r[j] * r[j]).sum::<f64>() / n as f64).sqrt();
        rows.iter_mut().for_each(|r| r[j] /= s);
    }
    let y = rows
        .iter()
        .map(|r| r.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>() + noise * rng.normal())
        .collect();
    (rows, y)
}

/// `Z'Z/n` and `Z'y/n` by explicit loops.
pub fn moments(rows: &[Vec<f64>], y: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = rows.len() as f64;
    let p = rows[0].len();
    let mut g = vec![vec![0.0; p]; p];
    let mut c = vec![0.0; p];
    for (r, yi) in rows.iter().zip(y) {
        for j in 0..p {
            c[j] += r[j] * yi / n;
            for k in 0..p {
                g[j][k] += r[j] * r[k] / n;
            }
        }
    }
    (g, c)
}

/// Grid minimum of `max_j |(G delta)_j| / norm(delta)` over unit directions
/// of the plane in the cone of `beta` (`p = 2`). `component = None` uses the
/// prediction norm.
pub fn kappa_grid_2d(gram: &[Vec<f64>], beta: [f64; 2], component: Option<usize>, steps: usize) -> f64 {
    let mut best = f64::INFINITY;
    for s in 0..steps {
        let th = 2.0 * std::f64::consts::PI * s as f64 / steps as f64;
        let d = [th.cos(), th.sin()];
        let l1_change: f64 = (0..2)
            .map(|j| if beta[j] != 0.0 { beta[j].signum() * d[j] } else { d[j].abs() })
            .sum();
        if l1_change > 1e-12 {
            continue;
        }
        let gd = [
            gram[0][0] * d[0] + gram[0][1] * d[1],
            gram[1][0] * d[0] + gram[1][1] * d[1],
        ];
        let num = gd[0].abs().max(gd[1].abs());
        let den = match component {
            Some(j) => d[j].abs(),
            None => (gd[0] * d[0] + gd[1] * d[1]).max(0.0).sqrt(),
        };
        if den > 1e-12 {
            best = best.min(num / den);
        }
    }
    best
}

/// Simple deterministic LCG for generating fixtures without the crate's RNG.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Box-Muller normal.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.next_f64().max(1e-300);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
