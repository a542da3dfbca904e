//! Integer row lattices: Hermite normal form, Smith invariants, membership.

pub type IntMatrix = Vec<Vec<i64>>;

fn mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b)
        .expect("integer overflow in lattice arithmetic")
}

fn sub(a: i64, b: i64) -> i64 {
    a.checked_sub(b)
        .expect("integer overflow in lattice arithmetic")
}

/// `row -= q * pivot_row`.
fn axpy(row: &mut [i64], q: i64, pivot_row: &[i64]) {
    if q == 0 {
        return;
    }
    for (x, p) in row.iter_mut().zip(pivot_row) {
        *x = sub(*x, mul(q, *p));
    }
}

/// Row Hermite normal form with the zero rows removed.
///
/// Pivot columns strictly increase down the rows, pivots are positive and
/// every entry above a pivot lies in `[0, pivot)`. Two matrices span the same
/// row lattice iff their normal forms coincide.
pub fn hnf(mat: &[Vec<i64>]) -> IntMatrix {
    let ncols = mat.first().map_or(0, Vec::len);
    assert!(
        mat.iter().all(|r| r.len() == ncols),
        "ragged integer matrix"
    );
    let mut rows: IntMatrix = mat
        .iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .cloned()
        .collect();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        // Smallest nonzero entry in this column at or below row r.
        while let Some(best) = (r..rows.len())
            .filter(|&i| rows[i][col] != 0)
            .min_by_key(|&i| rows[i][col].unsigned_abs())
        {
            rows.swap(r, best);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[r][col]);
                    let (head, tail) = rows.split_at_mut(i);
                    axpy(&mut tail[0], q, &head[r]);
                    if tail[0][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if rows[r][col] == 0 {
            continue;
        }
        if rows[r][col] < 0 {
            rows[r].iter_mut().for_each(|x| *x = -*x);
        }
        let p = rows[r][col];
        for i in 0..r {
            let q = rows[i][col].div_euclid(p);
            let (head, tail) = rows.split_at_mut(r);
            axpy(&mut head[i], q, &tail[0]);
        }
        r += 1;
    }
    rows.truncate(r);
    rows.retain(|row| row.iter().any(|&x| x != 0));
    rows
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Nonzero diagonal of the Smith normal form, each entry dividing the next.
pub fn snf_divisors(mat: &[Vec<i64>]) -> Vec<i64> {
    let mut m: IntMatrix = mat.to_vec();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..nrows.min(ncols) {
        loop {
            let pivot = (t..nrows)
                .flat_map(|i| (t..ncols).map(move |j| (i, j)))
                .filter(|&(i, j)| m[i][j] != 0)
                .min_by_key(|&(i, j)| m[i][j].unsigned_abs());
            let Some((pi, pj)) = pivot else {
                break;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..nrows {
                let q = m[i][t].div_euclid(p);
                let (head, tail) = m.split_at_mut(i);
                axpy(&mut tail[0], q, &head[t]);
                clean &= tail[0][t] == 0;
            }
            for j in t + 1..ncols {
                let q = m[t][j].div_euclid(p);
                if q != 0 {
                    for row in m.iter_mut() {
                        row[j] = sub(row[j], mul(q, row[t]));
                    }
                }
                clean &= m[t][j] == 0;
            }
            if clean {
                diag.push(p.abs());
                break;
            }
        }
        if diag.len() <= t {
            break;
        }
    }
    // diag(a, b) ≅ diag(gcd, lcm) restores the divisibility chain.
    let n = diag.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (diag[i], diag[j]);
            let g = gcd(a, b);
            diag[i] = g;
            diag[j] = mul(a / g, b);
        }
    }
    diag
}

/// Is `v` in the row span of `h`? `h` must be in Hermite normal form.
pub fn in_row_span(h: &[Vec<i64>], v: &[i64]) -> bool {
    let mut v = v.to_vec();
    let mut next_col = 0;
    for row in h {
        let pc = row
            .iter()
            .position(|&x| x != 0)
            .expect("HNF rows are nonzero");
        if v[next_col..pc].iter().any(|&x| x != 0) {
            return false;
        }
        if v[pc] % row[pc] != 0 {
            return false;
        }
        let q = v[pc] / row[pc];
        axpy(&mut v, q, row);
        next_col = pc + 1;
    }
    v.iter().all(|&x| x == 0)
}
