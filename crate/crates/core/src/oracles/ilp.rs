//! Exact integer feasibility for small systems `A·n (= | ≥) b`, `n ≥ 0`.
//!
//! Used as a sound refutation: only `Infeasible` is ever trusted. The LP
//! relaxation is solved with an exact rational simplex (Bland's rule), the
//! integer lattice is checked with column Hermite reduction (after pinning
//! the variables and rows the relaxation leaves no room for), and a capped
//! branch-and-bound handles the rest.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<BigInt>,
    pub rel: Relation,
    pub rhs: BigInt,
}

/// Integer solvability of the equality rows alone, over ℤ.
fn lattice_feasible(rows: &[Row], nvars: usize) -> bool {
    let eqs: Vec<&Row> = rows.iter().filter(|r| r.rel == Relation::Eq).collect();
    let mut a: Vec<Vec<BigInt>> = eqs.iter().map(|r| r.coeffs.clone()).collect();
    let b: Vec<BigInt> = eqs.iter().map(|r| r.rhs.clone()).collect();
    let m = a.len();
    let mut pivots: Vec<Option<usize>> = vec![None; m];
    let mut next_col = 0usize;
    for i in 0..m {
        loop {
            let nonzero: Vec<usize> = (next_col..nvars).filter(|&c| !a[i][c].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let best = *nonzero.iter().min_by_key(|&&c| a[i][c].abs()).unwrap();
            for row in a.iter_mut() {
                row.swap(best, next_col);
            }
            if nonzero.len() == 1 {
                pivots[i] = Some(next_col);
                next_col += 1;
                break;
            }
            let p = a[i][next_col].clone();
            for c in next_col + 1..nvars {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&p);
                for row in a.iter_mut() {
                    let delta = &q * &row[next_col];
                    row[c] -= delta;
                }
            }
        }
    }
    let mut y: Vec<BigInt> = vec![BigInt::zero(); nvars];
    for i in 0..m {
        let s: BigInt = (0..next_col)
            .filter(|&c| Some(c) != pivots[i])
            .map(|c| &a[i][c] * &y[c])
            .sum();
        let rest = &b[i] - s;
        match pivots[i] {
            Some(p) => {
                let (q, r) = rest.div_rem(&a[i][p]);
                if !r.is_zero() {
                    return false;
                }
                y[p] = q;
            }
            None => {
                if !rest.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Phase-one simplex on `rows` with `x ≥ 0`. Returns a vertex or `None`
/// when the relaxation is infeasible.
fn lp_feasible(rows: &[Row], nvars: usize) -> Option<Vec<BigRational>> {
    // Columns: originals, one slack per inequality, one artificial per row.
    let m = rows.len();
    let nslack = rows.iter().filter(|r| r.rel != Relation::Eq).count();
    let ncols = nvars + nslack + m;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = nvars;
    for (i, r) in rows.iter().enumerate() {
        let mut line: Vec<BigRational> = vec![BigRational::zero(); ncols + 1];
        for (j, c) in r.coeffs.iter().enumerate() {
            line[j] = BigRational::from_integer(c.clone());
        }
        match r.rel {
            Relation::Eq => {}
            Relation::Ge => {
                line[slack] = -BigRational::one();
                slack += 1;
            }
            Relation::Le => {
                line[slack] = BigRational::one();
                slack += 1;
            }
        }
        line[ncols] = BigRational::from_integer(r.rhs.clone());
        if line[ncols].is_negative() {
            for e in line.iter_mut() {
                *e = -e.clone();
            }
        }
        line[nvars + nslack + i] = BigRational::one();
        basis.push(nvars + nslack + i);
        tab.push(line);
    }
    let art_start = nvars + nslack;
    // Objective: minimize the sum of artificials, expressed in reduced costs.
    let mut obj: Vec<BigRational> = vec![BigRational::zero(); ncols + 1];
    for line in &tab {
        for j in 0..=ncols {
            if j < art_start || j == ncols {
                obj[j] -= &line[j];
            }
        }
    }
    loop {
        let entering = (0..ncols).find(|&j| obj[j].is_negative());
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, line) in tab.iter().enumerate() {
            if line[e].is_positive() {
                let ratio = &line[ncols] / &line[e];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leave else { break };
        let piv = tab[l][e].clone();
        for x in tab[l].iter_mut() {
            *x /= &piv;
        }
        let pivot_row = tab[l].clone();
        for (i, line) in tab.iter_mut().enumerate() {
            if i != l && !line[e].is_zero() {
                let f = line[e].clone();
                for j in 0..=ncols {
                    line[j] -= &f * &pivot_row[j];
                }
            }
        }
        let f = obj[e].clone();
        for j in 0..=ncols {
            obj[j] -= &f * &pivot_row[j];
        }
        basis[l] = e;
    }
    if !obj[ncols].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); nvars];
    for (i, &b) in basis.iter().enumerate() {
        if b < nvars {
            x[b] = tab[i][ncols].clone();
        }
    }
    Some(x)
}

/// Adds as equalities the inequality rows and variables that the relaxation
/// pins to a single integer value. Returns `None` when some variable is
/// pinned strictly between two integers, or the relaxation is infeasible.
fn tighten(rows: &[Row], nvars: usize) -> Option<Vec<Row>> {
    let x = lp_feasible(rows, nvars)?;
    let mut out = rows.to_vec();
    let probe = |extra: Row| {
        let mut r = rows.to_vec();
        r.push(extra);
        lp_feasible(&r, nvars).is_none()
    };
    for j in 0..nvars {
        let mut unit = vec![BigInt::zero(); nvars];
        unit[j] = BigInt::one();
        let above: BigInt = x[j].floor().to_integer() + 1;
        let below: BigInt = x[j].ceil().to_integer() - 1;
        let no_above = probe(Row {
            coeffs: unit.clone(),
            rel: Relation::Ge,
            rhs: above,
        });
        let no_below = below.is_negative()
            || probe(Row {
                coeffs: unit.clone(),
                rel: Relation::Le,
                rhs: below,
            });
        if no_above && no_below {
            if !x[j].is_integer() {
                return None;
            }
            out.push(Row {
                coeffs: unit,
                rel: Relation::Eq,
                rhs: x[j].to_integer(),
            });
        }
    }
    for r in rows.iter().filter(|r| r.rel != Relation::Eq) {
        let strict = match r.rel {
            Relation::Ge => Row {
                rhs: &r.rhs + 1,
                ..r.clone()
            },
            _ => Row {
                rhs: &r.rhs - 1,
                ..r.clone()
            },
        };
        if probe(strict) {
            out.push(Row {
                rel: Relation::Eq,
                ..r.clone()
            });
        }
    }
    Some(out)
}

/// Decides whether some `n ∈ ℕ^nvars` satisfies all rows, exploring at most
/// `node_cap` branch-and-bound nodes.
pub fn integer_feasible(rows: &[Row], nvars: usize, node_cap: usize) -> Feasibility {
    let Some(rows) = tighten(rows, nvars) else {
        return Feasibility::Infeasible;
    };
    if !lattice_feasible(&rows, nvars) {
        return Feasibility::Infeasible;
    }
    let mut stack: Vec<Vec<Row>> = vec![rows];
    let mut nodes = 0usize;
    let mut abstained = false;
    while let Some(current) = stack.pop() {
        nodes += 1;
        if nodes > node_cap {
            return Feasibility::Unknown;
        }
        let Some(x) = lp_feasible(&current, nvars) else {
            continue;
        };
        match x.iter().position(|v| !v.is_integer()) {
            None => return Feasibility::Feasible,
            Some(j) => {
                let floor = x[j].floor().to_integer();
                let mut unit = vec![BigInt::zero(); nvars];
                unit[j] = BigInt::one();
                let mut low = current.clone();
                low.push(Row {
                    coeffs: unit.clone(),
                    rel: Relation::Le,
                    rhs: floor.clone(),
                });
                let mut high = current;
                high.push(Row {
                    coeffs: unit,
                    rel: Relation::Ge,
                    rhs: floor + 1,
                });
                if stack.len() > node_cap {
                    abstained = true;
                    break;
                }
                stack.push(high);
                stack.push(low);
            }
        }
    }
    if abstained {
        Feasibility::Unknown
    } else {
        Feasibility::Infeasible
    }
}
