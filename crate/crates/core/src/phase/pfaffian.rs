use crate::expr::Jet;
use crate::scalar::Scalar;

/// Largest dimension handled by cofactor expansion; larger matrices use skew elimination.
const EXPANSION_LIMIT: usize = 8;

/// Pfaffian of an antisymmetric matrix of jets (value and partials propagate together).
pub fn pfaffian<S: Scalar>(m: Vec<Vec<Jet<S>>>) -> Jet<S> {
    let n = m.len();
    let width = m.first().and_then(|r| r.first()).map_or(0, Jet::dim);
    if n % 2 == 1 {
        return Jet::constant(S::zero(), width);
    }
    if n == 0 {
        return Jet::constant(S::one(), width);
    }
    if n <= EXPANSION_LIMIT {
        let idx: Vec<usize> = (0..n).collect();
        expand(&m, &idx)
    } else {
        eliminate(m)
    }
}

pub fn pfaffian_values<S: Scalar>(m: &[Vec<S>]) -> S {
    let jets = m.iter().map(|r| r.iter().map(|&v| Jet::constant(v, 0)).collect()).collect();
    pfaffian(jets).value
}

fn expand<S: Scalar>(m: &[Vec<Jet<S>>], idx: &[usize]) -> Jet<S> {
    if idx.len() == 2 {
        return m[idx[0]][idx[1]].clone();
    }
    let first = idx[0];
    let mut acc: Option<Jet<S>> = None;
    for k in 1..idx.len() {
        let a = &m[first][idx[k]];
        if a.value == S::zero() && a.is_constant() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&r| r != idx[k]).collect();
        let term = a * &expand(m, &rest);
        acc = Some(match acc {
            None if k % 2 == 1 => term,
            None => -term,
            Some(s) if k % 2 == 1 => s + term,
            Some(s) => s - term,
        });
    }
    acc.unwrap_or_else(|| Jet::constant(S::zero(), m[first][first].dim()))
}

/// Congruence elimination `A -> M A M^T` with unit-determinant `M`, pivoting on values.
fn eliminate<S: Scalar>(mut a: Vec<Vec<Jet<S>>>) -> Jet<S> {
    let n = a.len();
    let width = a[0][0].dim();
    let mut pf = Jet::constant(S::one(), width);
    let mut k = 0;
    while k + 1 < n {
        let pivot = (k + 1..n)
            .max_by(|&x, &y| a[k][x].value.abs().partial_cmp(&a[k][y].value.abs()).unwrap())
            .unwrap();
        if pivot != k + 1 {
            a.swap(k + 1, pivot);
            for row in a.iter_mut() {
                row.swap(k + 1, pivot);
            }
            pf = -pf;
        }
        let p = a[k][k + 1].clone();
        if p.value == S::zero() {
            return Jet::constant(S::zero(), width);
        }
        pf = &pf * &p;
        let alpha: Vec<Jet<S>> = (k + 2..n).map(|i| &a[k][i] / &p).collect();
        let beta: Vec<Jet<S>> = (k + 2..n).map(|i| -(&a[k + 1][i] / &p)).collect();
        let mut next = a.clone();
        for (ii, i) in (k + 2..n).enumerate() {
            for (jj, j) in (k + 2..n).enumerate() {
                let mut v = a[i][j].clone();
                v = &v - &(&alpha[ii] * &a[k + 1][j]);
                v = &v - &(&beta[ii] * &a[k][j]);
                v = &v - &(&alpha[jj] * &a[i][k + 1]);
                v = &v - &(&beta[jj] * &a[i][k]);
                let cross = &(&beta[ii] * &alpha[jj]) - &(&alpha[ii] * &beta[jj]);
                v = &v + &(&cross * &p);
                next[i][j] = v;
            }
        }
        a = next;
        k += 2;
    }
    pf
}
