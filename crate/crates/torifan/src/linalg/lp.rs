//! Exact rational linear-program feasibility via a phase-1 simplex with
//! Bland's rule. No floating point, no tolerances; termination is guaranteed
//! by the pivoting rule.

use num_traits::{One, Signed, Zero};

use super::{dot_rat, Rat};

/// Outcome of a phase-1 run on `{x >= 0 : A x = b}`. The infeasible branch
/// carries a Farkas certificate `y` with `y^T A <= 0` and `y^T b > 0`.
pub enum Feasibility {
    Feasible(Vec<Rat>),
    Infeasible(Vec<Rat>),
}

/// Decide feasibility of `{x >= 0 : A x = b}` exactly. `a` holds the rows.
pub fn feasible_eq_nonneg(a: &[Vec<Rat>], b: &[Rat]) -> Feasibility {
    let m = a.len();
    assert_eq!(b.len(), m, "rhs length must match row count");
    let k = a.first().map_or(0, Vec::len);

    // Flip rows so the right-hand side is nonnegative.
    let mut flip = vec![false; m];
    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for i in 0..m {
        assert_eq!(a[i].len(), k, "ragged constraint rows");
        let neg = b[i].is_negative();
        flip[i] = neg;
        let row: Vec<Rat> = a[i]
            .iter()
            .map(|v| if neg { -v.clone() } else { v.clone() })
            .collect();
        tab.push(row);
        rhs.push(if neg { -b[i].clone() } else { b[i].clone() });
    }
    // Artificial columns form an identity block; total columns = k + m.
    for (i, row) in tab.iter_mut().enumerate() {
        for j in 0..m {
            row.push(if i == j { Rat::one() } else { Rat::zero() });
        }
    }
    let total = k + m;
    let mut basis: Vec<usize> = (k..total).collect();

    // Reduced costs for minimizing the sum of artificials, with the
    // artificial identity basis: r_j = -sum_i T[i][j] for structural j, 0 for
    // artificials.
    let mut red: Vec<Rat> = (0..total)
        .map(|j| {
            if j < k {
                let mut s = Rat::zero();
                for row in tab.iter() {
                    s += &row[j];
                }
                -s
            } else {
                Rat::zero()
            }
        })
        .collect();

    loop {
        // Bland: entering = lowest index with negative reduced cost.
        let Some(enter) = (0..total).find(|&j| red[j].is_negative()) else {
            break;
        };
        // Ratio test; ties broken by smallest basic variable (Bland).
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &rhs[i] / &tab[i][enter];
            match &leave {
                Some((li, best)) => {
                    if &ratio < best || (&ratio == best && basis[i] < basis[*li]) {
                        leave = Some((i, ratio));
                    }
                }
                None => leave = Some((i, ratio)),
            }
        }
        let Some((li, _)) = leave else {
            // Phase-1 objective is bounded below by zero, so an unbounded
            // pivot column cannot happen on well-formed input.
            unreachable!("phase-1 simplex cannot be unbounded");
        };

        // Pivot on (li, enter).
        let pivot = tab[li][enter].clone();
        let inv = pivot.recip();
        for j in 0..total {
            tab[li][j] = &tab[li][j] * &inv;
        }
        rhs[li] = &rhs[li] * &inv;
        for i in 0..m {
            if i == li || tab[i][enter].is_zero() {
                continue;
            }
            let f = tab[i][enter].clone();
            for j in 0..total {
                let sub = &f * &tab[li][j];
                tab[i][j] = &tab[i][j] - &sub;
            }
            let sub = &f * &rhs[li];
            rhs[i] = &rhs[i] - &sub;
        }
        if !red[enter].is_zero() {
            let f = red[enter].clone();
            for j in 0..total {
                let sub = &f * &tab[li][j];
                red[j] = &red[j] - &sub;
            }
        }
        basis[li] = enter;
    }

    let objective: Rat = (0..m)
        .filter(|&i| basis[i] >= k)
        .map(|i| rhs[i].clone())
        .sum();
    if objective.is_zero() {
        let mut x = vec![Rat::zero(); k];
        for i in 0..m {
            if basis[i] < k {
                x[basis[i]] = rhs[i].clone();
            }
        }
        Feasibility::Feasible(x)
    } else {
        // Dual values: y_i = 1 - r_{artificial i}, undoing the row flips.
        let mut y = Vec::with_capacity(m);
        for i in 0..m {
            let v = Rat::one() - &red[k + i];
            y.push(if flip[i] { -v } else { v });
        }
        Feasibility::Infeasible(y)
    }
}

/// Nonnegative solution of `A x = b`, if one exists.
pub fn nonnegative_solution(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    match feasible_eq_nonneg(a, b) {
        Feasibility::Feasible(x) => Some(x),
        Feasibility::Infeasible(_) => None,
    }
}

/// Find `w` with `<w, v> >= 1` for every input vector, if the vectors span a
/// pointed cone lying in an open half-space; `None` otherwise.
///
/// Runs the dual system `{lambda >= 0, sum lambda = 1 : sum lambda_i v_i = 0}`
/// whose infeasibility certificate yields `w` directly; this keeps the row
/// count at `dim + 1` regardless of how many vectors are given.
pub fn strictly_positive_functional(dim: usize, vectors: &[Vec<Rat>]) -> Option<Vec<Rat>> {
    if vectors.is_empty() {
        return Some(vec![Rat::zero(); dim]);
    }
    let k = vectors.len();
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(dim + 1);
    for coord in 0..dim {
        rows.push(vectors.iter().map(|v| v[coord].clone()).collect());
    }
    rows.push(vec![Rat::one(); k]);
    let mut b = vec![Rat::zero(); dim];
    b.push(Rat::one());

    match feasible_eq_nonneg(&rows, &b) {
        Feasibility::Feasible(_) => None,
        Feasibility::Infeasible(y) => {
            let t = y[dim].clone();
            debug_assert!(t.is_positive(), "Farkas certificate must have positive offset");
            let w: Vec<Rat> = (0..dim).map(|i| -(&y[i] / &t)).collect();
            debug_assert!(
                vectors.iter().all(|v| dot_rat(&w, v) >= Rat::one()),
                "extracted functional must satisfy every constraint"
            );
            Some(w)
        }
    }
}

/// Feasibility of a general system `A_eq x = b_eq`, `A_ge x >= b_ge` with
/// free variables; returns a witness `x` when feasible.
pub fn feasible_linear_system(
    eqs: &[(Vec<Rat>, Rat)],
    ges: &[(Vec<Rat>, Rat)],
) -> Option<Vec<Rat>> {
    let dim = eqs
        .first()
        .map(|(r, _)| r.len())
        .or_else(|| ges.first().map(|(r, _)| r.len()))?;
    let m = eqs.len() + ges.len();
    // x = p - q with p, q >= 0; slack s >= 0 for each inequality row.
    let cols = 2 * dim + ges.len();
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut b: Vec<Rat> = Vec::with_capacity(m);
    for (row, rhs) in eqs {
        let mut r = vec![Rat::zero(); cols];
        for j in 0..dim {
            r[j] = row[j].clone();
            r[dim + j] = -row[j].clone();
        }
        a.push(r);
        b.push(rhs.clone());
    }
    for (gi, (row, rhs)) in ges.iter().enumerate() {
        let mut r = vec![Rat::zero(); cols];
        for j in 0..dim {
            r[j] = row[j].clone();
            r[dim + j] = -row[j].clone();
        }
        r[2 * dim + gi] = -Rat::one();
        a.push(r);
        b.push(rhs.clone());
    }
    nonnegative_solution(&a, &b).map(|x| {
        (0..dim).map(|j| &x[j] - &x[dim + j]).collect()
    })
}
