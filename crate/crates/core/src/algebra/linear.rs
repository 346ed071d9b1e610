//! Dense linear systems over an exact field.

use super::scalar::Scalar;

/// Some solution of `M v = rhs`, where `cols[k]` is the `k`-th column of `M`
/// (columns may have different lengths; missing entries are zero).
pub fn solve_columns<C: Scalar>(cols: &[Vec<C>], rhs: &[C]) -> Option<Vec<C>> {
    let n = cols.len();
    let rows = cols.iter().map(Vec::len).chain([rhs.len()]).max().unwrap_or(0);
    let mut m: Vec<Vec<C>> = (0..rows)
        .map(|i| {
            let mut row: Vec<C> =
                cols.iter().map(|c| c.get(i).cloned().unwrap_or_else(C::zero)).collect();
            row.push(rhs.get(i).cloned().unwrap_or_else(C::zero));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let lead = m[r][col].clone();
        for v in m[r].iter_mut() {
            *v = v.clone() / lead.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=n {
                    let t = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - t;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut out = vec![C::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = m[i][n].clone();
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn solves_and_detects_inconsistency() {
        // x + y = 3, x - y = 1
        let cols = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        assert_eq!(solve_columns(&cols, &[q(3), q(1)]), Some(vec![q(2), q(1)]));
        // x = 1, 2x = 3
        assert_eq!(solve_columns(&[vec![q(1), q(2)]], &[q(1), q(3)]), None);
        // underdetermined: x + y = 2
        let s = solve_columns(&[vec![q(1)], vec![q(1)]], &[q(2)]).unwrap();
        assert_eq!(&s[0] + &s[1], q(2));
    }
}
