//! Exact-rational linear programming.
//!
//! Programs are in equality form: `A x = b`, `x >= 0`, optionally maximising
//! `c . x`. The solver is a dense two-phase tableau simplex with Bland's rule,
//! so it always terminates and its output depends only on the input order.
//!
//! Every outcome carries a witness that is re-checked exactly before it is
//! returned: a feasible point, an optimal point together with a dual
//! solution, a Farkas certificate `y` with `yᵀA <= 0` and `yᵀb > 0`, or an
//! improving ray. A witness that fails its check is reported as
//! [`Error::Verification`]; [`verification_counts`] exposes how many checks
//! ran in this process.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

static VERIFIED: AtomicUsize = AtomicUsize::new(0);
static REJECTED: AtomicUsize = AtomicUsize::new(0);

/// `(passed, failed)` witness checks performed by the solver so far.
pub fn verification_counts() -> (usize, usize) {
    (VERIFIED.load(Ordering::SeqCst), REJECTED.load(Ordering::SeqCst))
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    num_vars: usize,
    rows: Vec<Vec<(usize, Rational)>>,
    rhs: Vec<Rational>,
    objective: Option<Vec<Rational>>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Adds `Σ coeff·x[var] = rhs`. Repeated variables are summed.
    ///
    /// Panics if a variable index is out of range.
    pub fn add_equality<I>(&mut self, coeffs: I, rhs: Rational)
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut row: Vec<(usize, Rational)> = Vec::new();
        for (var, c) in coeffs {
            assert!(var < self.num_vars, "variable {var} out of range");
            row.push((var, c));
        }
        row.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
        for (v, c) in row {
            match merged.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.rows.push(merged);
        self.rhs.push(rhs);
    }

    /// Dense objective to maximise. Panics on a length mismatch.
    pub fn set_objective(&mut self, c: Vec<Rational>) {
        assert_eq!(c.len(), self.num_vars, "objective length mismatch");
        self.objective = Some(c);
    }

    pub fn objective(&self) -> Option<&[Rational]> {
        self.objective.as_deref()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[(usize, Rational)], &Rational)> {
        self.rows.iter().map(|r| r.as_slice()).zip(self.rhs.iter())
    }

    fn row_dot(&self, i: usize, x: &[Rational]) -> Rational {
        self.rows[i]
            .iter()
            .fold(Rational::zero(), |acc, (j, c)| acc + c * &x[*j])
    }

    /// `yᵀA` as a dense vector.
    fn transpose_dot(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.num_vars];
        for (i, row) in self.rows.iter().enumerate() {
            if y[i].is_zero() {
                continue;
            }
            for (j, c) in row {
                out[*j] += c * &y[i];
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Feasible {
        x: Vec<Rational>,
    },
    Optimal {
        value: Rational,
        x: Vec<Rational>,
        /// Row multipliers with `Aᵀy >= c` and `bᵀy = value`.
        dual: Vec<Rational>,
    },
    /// Row multipliers with `yᵀA <= 0` and `yᵀb > 0`.
    Infeasible {
        certificate: Vec<Rational>,
    },
    Unbounded {
        x: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

impl LpOutcome {
    /// Exact check of the attached witness against `lp`.
    pub fn verify(&self, lp: &LinearProgram) -> std::result::Result<(), String> {
        let n = lp.num_vars;
        let check_point = |x: &[Rational]| -> std::result::Result<(), String> {
            if x.len() != n {
                return Err(format!("point has {} entries, expected {n}", x.len()));
            }
            if let Some(j) = x.iter().position(|v| v.is_negative()) {
                return Err(format!("x[{j}] is negative"));
            }
            for i in 0..lp.rows.len() {
                if lp.row_dot(i, x) != lp.rhs[i] {
                    return Err(format!("row {i} is not satisfied"));
                }
            }
            Ok(())
        };
        match self {
            LpOutcome::Feasible { x } => check_point(x),
            LpOutcome::Optimal { value, x, dual } => {
                check_point(x)?;
                let c = lp.objective.as_ref().ok_or("optimal outcome without objective")?;
                if dual.len() != lp.rows.len() {
                    return Err("dual has wrong length".into());
                }
                let primal: Rational = c.iter().zip(x).map(|(a, b)| a * b).sum();
                if &primal != value {
                    return Err("objective value does not match the point".into());
                }
                let by: Rational = dual.iter().zip(&lp.rhs).map(|(a, b)| a * b).sum();
                if &by != value {
                    return Err("dual objective differs from primal".into());
                }
                let aty = lp.transpose_dot(dual);
                for j in 0..n {
                    if aty[j] < c[j] {
                        return Err(format!("dual infeasible at column {j}"));
                    }
                    if x[j].is_positive() && aty[j] != c[j] {
                        return Err(format!("complementary slackness fails at column {j}"));
                    }
                }
                Ok(())
            }
            LpOutcome::Infeasible { certificate: y } => {
                if y.len() != lp.rows.len() {
                    return Err("certificate has wrong length".into());
                }
                if let Some(j) = lp.transpose_dot(y).iter().position(|v| v.is_positive()) {
                    return Err(format!("certificate positive at column {j}"));
                }
                let by: Rational = y.iter().zip(&lp.rhs).map(|(a, b)| a * b).sum();
                if !by.is_positive() {
                    return Err("certificate does not separate the right-hand side".into());
                }
                Ok(())
            }
            LpOutcome::Unbounded { x, ray } => {
                check_point(x)?;
                let c = lp.objective.as_ref().ok_or("unbounded outcome without objective")?;
                if ray.len() != n || ray.iter().any(|v| v.is_negative()) {
                    return Err("ray is not a nonnegative direction".into());
                }
                for i in 0..lp.rows.len() {
                    if !lp.row_dot(i, ray).is_zero() {
                        return Err(format!("ray leaves row {i}"));
                    }
                }
                let gain: Rational = c.iter().zip(ray).map(|(a, b)| a * b).sum();
                if !gain.is_positive() {
                    return Err("ray does not improve the objective".into());
                }
                Ok(())
            }
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible { .. })
    }
}

fn checked(outcome: LpOutcome, lp: &LinearProgram) -> Result<LpOutcome> {
    match outcome.verify(lp) {
        Ok(()) => {
            VERIFIED.fetch_add(1, Ordering::SeqCst);
            Ok(outcome)
        }
        Err(msg) => {
            REJECTED.fetch_add(1, Ordering::SeqCst);
            Err(Error::Verification(msg))
        }
    }
}

/// Phase 1 only: a feasible point or a Farkas certificate.
pub fn solve_feasibility(lp: &LinearProgram) -> Result<LpOutcome> {
    let mut t = Tableau::phase_one(lp);
    t.run(true);
    let outcome = match t.phase_one_verdict() {
        Some(certificate) => LpOutcome::Infeasible { certificate },
        None => LpOutcome::Feasible { x: t.primal() },
    };
    checked(outcome, lp)
}

/// Maximises the objective (a zero objective if none was set).
pub fn maximize(lp: &LinearProgram) -> Result<LpOutcome> {
    let mut t = Tableau::phase_one(lp);
    t.run(true);
    if let Some(certificate) = t.phase_one_verdict() {
        return checked(LpOutcome::Infeasible { certificate }, lp);
    }
    let zero = vec![Rational::zero(); lp.num_vars];
    let c = lp.objective.as_deref().unwrap_or(&zero);
    t.phase_two(c);
    let outcome = match t.run(false) {
        Some(entering) => {
            let x = t.primal();
            let ray = t.ray(entering);
            LpOutcome::Unbounded { x, ray }
        }
        None => LpOutcome::Optimal {
            value: t.objective_value(),
            x: t.primal(),
            dual: t.dual(),
        },
    };
    let mut outcome = outcome;
    if lp.objective.is_none() {
        if let LpOutcome::Optimal { x, .. } = outcome {
            outcome = LpOutcome::Feasible { x };
        }
    }
    checked(outcome, lp)
}

/// Dense tableau over `[x | artificials | rhs]`.
struct Tableau {
    n: usize,
    m: usize,
    /// `-1` where the original row was negated to make its rhs nonnegative.
    sign: Vec<bool>,
    rows: Vec<Vec<Rational>>,
    /// Reduced costs, then `-z` in the last slot.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn phase_one(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let m = lp.rows.len();
        let width = n + m + 1;
        let mut rows = Vec::with_capacity(m);
        let mut sign = Vec::with_capacity(m);
        let mut obj = vec![Rational::zero(); width];
        for (i, (row, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let flip = b.is_negative();
            let mut r = vec![Rational::zero(); width];
            for (j, c) in row {
                r[*j] = if flip { -c } else { c.clone() };
            }
            r[n + i] = Rational::one();
            r[n + m] = if flip { -b } else { b.clone() };
            for j in 0..n {
                if !r[j].is_zero() {
                    obj[j] += &r[j];
                }
            }
            obj[n + m] += &r[n + m];
            rows.push(r);
            sign.push(flip);
        }
        log::trace!("phase 1: {m} rows, {n} columns");
        Tableau {
            n,
            m,
            sign,
            rows,
            obj,
            basis: (n..n + m).collect(),
            pivots: 0,
        }
    }

    fn rhs(&self) -> usize {
        self.n + self.m
    }

    /// Pivots until optimal. Returns the entering column of an unbounded ray.
    fn run(&mut self, allow_artificial: bool) -> Option<usize> {
        let limit = if allow_artificial { self.n + self.m } else { self.n };
        loop {
            let entering = (0..limit).find(|&j| self.obj[j].is_positive())?;
            let rhs = self.rhs();
            let mut leave: Option<usize> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][entering];
                if !a.is_positive() {
                    continue;
                }
                leave = match leave {
                    None => Some(i),
                    Some(k) => {
                        // compare rows[i].rhs / a against rows[k].rhs / rows[k][entering]
                        let lhs = &self.rows[i][rhs] * &self.rows[k][entering];
                        let rhs_ = &self.rows[k][rhs] * a;
                        if lhs < rhs_ || (lhs == rhs_ && self.basis[i] < self.basis[k]) {
                            Some(i)
                        } else {
                            Some(k)
                        }
                    }
                };
            }
            match leave {
                Some(r) => self.pivot(r, entering),
                None => return Some(entering),
            }
        }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        self.pivots += 1;
        log::trace!(
            "pivot {}: column {} enters, column {} leaves (row {}), -z = {}",
            self.pivots,
            s,
            self.basis[r],
            r,
            self.obj[self.rhs()]
        );
        let inv = self.rows[r][s].recip();
        let pivot_row = &mut self.rows[r];
        let mut support = Vec::new();
        for (j, v) in pivot_row.iter_mut().enumerate() {
            if !v.is_zero() {
                *v *= &inv;
                support.push(j);
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[s].clone();
            if f.is_zero() {
                return;
            }
            for &j in &support {
                row[j] -= &f * &pivot_row[j];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = pivot_row;
        self.basis[r] = s;
    }

    /// Farkas certificate if phase 1 ended with a positive infeasibility.
    fn phase_one_verdict(&self) -> Option<Vec<Rational>> {
        // obj[rhs] = -z and z = -(sum of artificials) at the phase-1 optimum
        if self.obj[self.rhs()].is_zero() {
            return None;
        }
        // d_a(i) = -1 - u_i and y = -u on the sign-normalised rows
        Some(
            (0..self.m)
                .map(|i| {
                    let y = Rational::one() + &self.obj[self.n + i];
                    if self.sign[i] {
                        -y
                    } else {
                        y
                    }
                })
                .collect(),
        )
    }

    fn phase_two(&mut self, c: &[Rational]) {
        // drive zero-valued artificials out of the basis; drop redundant rows
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.n {
                match (0..self.n).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        let width = self.n + self.m + 1;
        let mut obj = vec![Rational::zero(); width];
        obj[..self.n].clone_from_slice(c);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if !row[j].is_zero() {
                    obj[j] -= cb * &row[j];
                }
            }
        }
        self.obj = obj;
        log::trace!("phase 2: {} rows after dropping redundancy", self.rows.len());
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        let rhs = self.rhs();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n {
                x[b] = row[rhs].clone();
            }
        }
        x
    }

    fn ray(&self, entering: usize) -> Vec<Rational> {
        let mut d = vec![Rational::zero(); self.n];
        d[entering] = Rational::one();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n {
                d[b] = -&row[entering];
            }
        }
        d
    }

    fn objective_value(&self) -> Rational {
        -&self.obj[self.rhs()]
    }

    /// Phase-2 duals: artificial costs are zero, so `u_i = -d_a(i)`.
    fn dual(&self) -> Vec<Rational> {
        (0..self.m)
            .map(|i| {
                let u = -&self.obj[self.n + i];
                if self.sign[i] {
                    -u
                } else {
                    u
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn lp_from(rows: &[(&[i64], i64)], c: Option<&[i64]>) -> LinearProgram {
        let n = rows.first().map(|r| r.0.len()).unwrap_or(0);
        let mut lp = LinearProgram::new(n);
        for (coeffs, b) in rows {
            lp.add_equality(coeffs.iter().enumerate().map(|(j, &v)| (j, int(v))), int(*b));
        }
        if let Some(c) = c {
            lp.set_objective(c.iter().map(|&v| int(v)).collect());
        }
        lp
    }

    #[test]
    fn simple_feasible() {
        let lp = lp_from(&[(&[1, 1], 1)], None);
        match solve_feasibility(&lp).unwrap() {
            LpOutcome::Feasible { x } => assert_eq!(&x[0] + &x[1], int(1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sign_contradiction_certificate() {
        let lp = lp_from(&[(&[1], -1)], None);
        assert_eq!(
            solve_feasibility(&lp).unwrap(),
            LpOutcome::Infeasible {
                certificate: vec![int(-1)]
            }
        );
    }

    #[test]
    fn maximize_small() {
        let lp = lp_from(&[(&[1, 1], 1)], Some(&[1, 0]));
        match maximize(&lp).unwrap() {
            LpOutcome::Optimal { value, x, .. } => {
                assert_eq!(value, int(1));
                assert_eq!(x, vec![int(1), int(0)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn maximize_infeasible_and_unbounded() {
        let lp = lp_from(&[(&[1, 1], -2)], Some(&[1, 0]));
        assert!(matches!(maximize(&lp).unwrap(), LpOutcome::Infeasible { .. }));
        let lp = lp_from(&[(&[1, -1], 1)], Some(&[1, 0]));
        assert!(matches!(maximize(&lp).unwrap(), LpOutcome::Unbounded { .. }));
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let lp = lp_from(
            &[(&[1, 1, 0], 1), (&[2, 2, 0], 2), (&[0, 1, 1], 1), (&[1, 2, 1], 2)],
            Some(&[0, 1, 2]),
        );
        match maximize(&lp).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_constraints() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![int(-1), int(0)]);
        match maximize(&lp).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(0)),
            other => panic!("{other:?}"),
        }
        let mut lp = LinearProgram::new(1);
        lp.set_objective(vec![int(1)]);
        assert!(matches!(maximize(&lp).unwrap(), LpOutcome::Unbounded { .. }));
    }

    #[test]
    fn fractional_optimum() {
        // x + 2y + s = 3 ; 3x + y + t = 4 ; max x + y  ->  x = 1, y = 1
        let lp = lp_from(&[(&[1, 2, 1, 0], 3), (&[3, 1, 0, 1], 4)], Some(&[1, 1, 0, 0]));
        match maximize(&lp).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(2)),
            other => panic!("{other:?}"),
        }
        let lp = lp_from(&[(&[2, 3, 1, 0], 1), (&[3, 2, 0, 1], 1)], Some(&[1, 1, 0, 0]));
        match maximize(&lp).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, ratio(2, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tampered_witnesses_fail_verification() {
        let lp = lp_from(&[(&[1, 1], 1)], Some(&[1, 0]));
        let bad = LpOutcome::Feasible {
            x: vec![int(1), int(1)],
        };
        assert!(bad.verify(&lp).is_err());
        let bad = LpOutcome::Infeasible {
            certificate: vec![int(1)],
        };
        assert!(bad.verify(&lp).is_err());
        let bad = LpOutcome::Optimal {
            value: int(1),
            x: vec![int(1), int(0)],
            dual: vec![int(0)],
        };
        assert!(bad.verify(&lp).is_err());
    }

    #[test]
    fn deterministic_output() {
        let lp = lp_from(
            &[(&[1, 1, 1, 0], 2), (&[1, -1, 0, 1], 0), (&[0, 1, 1, 1], 2)],
            Some(&[1, 1, 1, 1]),
        );
        assert_eq!(maximize(&lp).unwrap(), maximize(&lp).unwrap());
    }
}
