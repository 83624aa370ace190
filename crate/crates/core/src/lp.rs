//! Exact linear programming.
//!
//! A dense two-phase primal simplex over [`Rational`] with Bland's pivot rule.
//! Every verdict carries a certificate that can be checked by substitution
//! with [`verify_certificates`]:
//!
//! * `Optimal`: primal point, row multipliers and bound multipliers with zero
//!   duality gap.
//! * `Infeasible`: a Farkas combination of rows and bounds that reads `0 >= c`
//!   with `c > 0`.
//! * `Unbounded`: a feasible point and an improving recession direction.
//!
//! Multiplier signs follow the minimization convention: rows `>=` carry
//! multipliers `>= 0`, rows `<=` carry multipliers `<= 0`, equality rows are
//! free, lower-bound multipliers are `>= 0` and upper-bound multipliers
//! `<= 0`. At an optimum `c = A^T y + lower + upper`. For a maximization all
//! sign conditions are reversed while the identities stay the same.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{dot, Extended, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// A single linear row `coeffs . x (relation) rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn ge(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Ge, rhs)
    }

    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Le, rhs)
    }

    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Eq, rhs)
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        self.relation.holds(&dot(&self.coeffs, x), &self.rhs)
    }

    /// Same row with the homogeneous right-hand side `0`.
    pub fn homogenized(&self) -> Self {
        Constraint::new(self.coeffs.clone(), self.relation, Rational::zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarBounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl VarBounds {
    pub fn free() -> Self {
        Self::default()
    }

    pub fn nonnegative() -> Self {
        VarBounds {
            lower: Some(Rational::zero()),
            upper: None,
        }
    }

    fn contains(&self, v: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| v >= l) && self.upper.as_ref().is_none_or(|u| v <= u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    /// One entry per variable; variables are free unless bounded here.
    pub bounds: Vec<VarBounds>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![VarBounds::free(); n],
        }
    }

    pub fn minimize(objective: Vec<Rational>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    pub fn maximize(objective: Vec<Rational>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    /// Pure feasibility problem over `n` free variables.
    pub fn feasibility(n: usize) -> Self {
        Self::minimize(vec![Rational::zero(); n])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn with_constraints(mut self, rows: impl IntoIterator<Item = Constraint>) -> Self {
        self.constraints.extend(rows);
        self
    }

    pub fn with_bounds(mut self, var: usize, bounds: VarBounds) -> Self {
        self.bounds[var] = bounds;
        self
    }

    pub fn with_nonnegative(self, var: usize) -> Self {
        self.with_bounds(var, VarBounds::nonnegative())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::dims("variable bounds", n, self.bounds.len()));
        }
        for row in &self.constraints {
            if row.coeffs.len() != n {
                return Err(Error::dims("constraint row", n, row.coeffs.len()));
            }
        }
        Ok(())
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.constraints.iter().all(|c| c.is_satisfied_by(x))
            && self.bounds.iter().zip(x).all(|(b, v)| b.contains(v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalSolution {
    pub value: Rational,
    pub primal: Vec<Rational>,
    /// One multiplier per constraint row.
    pub row_duals: Vec<Rational>,
    pub lower_duals: Vec<Rational>,
    pub upper_duals: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub row_multipliers: Vec<Rational>,
    pub lower_multipliers: Vec<Rational>,
    pub upper_multipliers: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnboundedRay {
    /// A feasible point.
    pub point: Vec<Rational>,
    /// A recession direction that strictly improves the objective.
    pub ray: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(OptimalSolution),
    Infeasible(FarkasCertificate),
    Unbounded(UnboundedRay),
}

impl LpOutcome {
    /// Optimal value on the extended line, in the orientation of `sense`.
    pub fn extended_value(&self, sense: Sense) -> Extended {
        match (self, sense) {
            (LpOutcome::Optimal(sol), _) => Extended::Finite(sol.value.clone()),
            (LpOutcome::Infeasible(_), Sense::Minimize) => Extended::PosInfinity,
            (LpOutcome::Infeasible(_), Sense::Maximize) => Extended::NegInfinity,
            (LpOutcome::Unbounded(_), Sense::Minimize) => Extended::NegInfinity,
            (LpOutcome::Unbounded(_), Sense::Maximize) => Extended::PosInfinity,
        }
    }

    pub fn optimal(&self) -> Option<&OptimalSolution> {
        match self {
            LpOutcome::Optimal(sol) => Some(sol),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible(_))
    }
}

// ---------------------------------------------------------------------------
// Standard form

#[derive(Clone, Debug)]
enum Column {
    /// `x = shift + x'`
    Shifted { col: usize, shift: Rational },
    /// `x = shift - x'`
    Reflected { col: usize, shift: Rational },
    /// `x = x+ - x-`
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, Debug)]
enum Origin {
    Row(usize),
    Upper(usize),
}

struct StdRow {
    origin: Origin,
    /// The standard row equals `factor` times the original (shifted) row.
    factor: Rational,
    coeffs: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    obj: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn load_objective(&mut self, costs: &[Rational]) {
        let mut obj = costs.to_vec();
        obj.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (o, t) in obj.iter_mut().zip(&self.rows[i]) {
                if !t.is_zero() {
                    *o -= cb * t;
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v / &piv;
            }
        }
        let support: Vec<usize> = (0..=self.width)
            .filter(|&k| !self.rows[r][k].is_zero())
            .collect();
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &k in &support {
                let delta = &f * &pivot_row[k];
                row[k] -= delta;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Bland's rule over columns `< eligible`. On unboundedness returns the
    /// entering column that has no positive entry.
    fn run(&mut self, eligible: usize) -> std::result::Result<(), usize> {
        loop {
            let Some(enter) = (0..eligible).find(|&j| self.obj[j].is_negative()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Err(enter),
            }
        }
    }

    /// `c_B^T B^{-1}`, read off the artificial columns which started as `I`.
    fn row_prices(&self, costs: &[Rational], art_start: usize) -> Vec<Rational> {
        let m = self.rows.len();
        (0..m)
            .map(|k| {
                self.basis
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| !costs[b].is_zero())
                    .fold(Rational::zero(), |acc, (i, &b)| {
                        acc + &costs[b] * &self.rows[i][art_start + k]
                    })
            })
            .collect()
    }

    fn column_values(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.width];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs(i).clone();
        }
        x
    }
}

struct StandardForm {
    columns: Vec<Column>,
    n_struct: usize,
    rows: Vec<StdRow>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> std::result::Result<StandardForm, FarkasCertificate> {
        let n = lp.num_vars();
        let mut columns = Vec::with_capacity(n);
        let mut n_struct = 0;
        for b in &lp.bounds {
            let column = match (&b.lower, &b.upper) {
                (Some(l), _) => Column::Shifted {
                    col: n_struct,
                    shift: l.clone(),
                },
                (None, Some(u)) => Column::Reflected {
                    col: n_struct,
                    shift: u.clone(),
                },
                (None, None) => {
                    n_struct += 1;
                    Column::Split {
                        pos: n_struct - 1,
                        neg: n_struct,
                    }
                }
            };
            n_struct += 1;
            columns.push(column);
        }

        let mut rows = Vec::new();
        for (i, c) in lp.constraints.iter().enumerate() {
            let Some(lead) = c.coeffs.iter().find(|v| !v.is_zero()) else {
                if c.relation.holds(&Rational::zero(), &c.rhs) {
                    continue;
                }
                // 0 (rel) rhs is violated: the row alone is the certificate.
                let mut row_multipliers = vec![Rational::zero(); lp.constraints.len()];
                row_multipliers[i] = match c.relation {
                    Relation::Ge => Rational::from_integer(1.into()),
                    Relation::Le => Rational::from_integer((-1).into()),
                    Relation::Eq => Rational::from_integer(c.rhs.signum().to_integer()),
                };
                return Err(FarkasCertificate {
                    row_multipliers,
                    lower_multipliers: vec![Rational::zero(); n],
                    upper_multipliers: vec![Rational::zero(); n],
                });
            };
            let mut factor = lead.abs().recip();
            let mut coeffs = vec![Rational::zero(); n_struct];
            let mut rhs = c.rhs.clone();
            for (a, column) in c.coeffs.iter().zip(&columns) {
                if a.is_zero() {
                    continue;
                }
                match column {
                    Column::Shifted { col, shift } => {
                        coeffs[*col] += a;
                        rhs -= a * shift;
                    }
                    Column::Reflected { col, shift } => {
                        coeffs[*col] -= a;
                        rhs -= a * shift;
                    }
                    Column::Split { pos, neg } => {
                        coeffs[*pos] += a;
                        coeffs[*neg] -= a;
                    }
                }
            }
            let mut relation = c.relation;
            if (&rhs * &factor).is_negative() {
                factor = -factor;
                relation = relation.flipped();
            }
            for v in coeffs.iter_mut() {
                *v = &*v * &factor;
            }
            rows.push(StdRow {
                origin: Origin::Row(i),
                rhs: rhs * &factor,
                factor,
                coeffs,
                relation,
            });
        }
        for (j, (b, column)) in lp.bounds.iter().zip(&columns).enumerate() {
            if let (Column::Shifted { col, shift }, Some(u)) = (column, &b.upper) {
                let mut coeffs = vec![Rational::zero(); n_struct];
                let mut rhs = u - shift;
                let mut relation = Relation::Le;
                let mut factor = Rational::from_integer(1.into());
                if rhs.is_negative() {
                    factor = -factor;
                    relation = Relation::Ge;
                    rhs = -rhs;
                }
                coeffs[*col] = factor.clone();
                rows.push(StdRow {
                    origin: Origin::Upper(j),
                    factor,
                    coeffs,
                    relation,
                    rhs,
                });
            }
        }
        Ok(StandardForm {
            columns,
            n_struct,
            rows,
        })
    }

    fn costs(&self, objective: &[Rational], width: usize) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); width];
        for (cj, column) in objective.iter().zip(&self.columns) {
            match column {
                Column::Shifted { col, .. } => c[*col] = cj.clone(),
                Column::Reflected { col, .. } => c[*col] = -cj,
                Column::Split { pos, neg } => {
                    c[*pos] = cj.clone();
                    c[*neg] = -cj;
                }
            }
        }
        c
    }

    fn point(&self, x: &[Rational], with_shift: bool) -> Vec<Rational> {
        self.columns
            .iter()
            .map(|column| match column {
                Column::Shifted { col, shift } => {
                    if with_shift {
                        shift + &x[*col]
                    } else {
                        x[*col].clone()
                    }
                }
                Column::Reflected { col, shift } => {
                    if with_shift {
                        shift - &x[*col]
                    } else {
                        -&x[*col]
                    }
                }
                Column::Split { pos, neg } => &x[*pos] - &x[*neg],
            })
            .collect()
    }

    /// Map standard-row prices back to multipliers on the original rows and
    /// bounds; `target` is the objective for optimality certificates and zero
    /// for Farkas certificates.
    fn multipliers(
        &self,
        lp: &LinearProgram,
        prices: &[Rational],
        target: &[Rational],
    ) -> (Vec<Rational>, Vec<Rational>, Vec<Rational>) {
        let n = lp.num_vars();
        let mut row = vec![Rational::zero(); lp.constraints.len()];
        let mut lower = vec![Rational::zero(); n];
        let mut upper = vec![Rational::zero(); n];
        for (std_row, y) in self.rows.iter().zip(prices) {
            if y.is_zero() {
                continue;
            }
            let mult = y * &std_row.factor;
            match std_row.origin {
                Origin::Row(i) => row[i] += mult,
                Origin::Upper(j) => upper[j] += mult,
            }
        }
        for (j, column) in self.columns.iter().enumerate() {
            let mut g = upper[j].clone();
            for (c, y) in lp.constraints.iter().zip(&row) {
                if !y.is_zero() && !c.coeffs[j].is_zero() {
                    g += y * &c.coeffs[j];
                }
            }
            let residual = &target[j] - g;
            match column {
                Column::Shifted { .. } => lower[j] = residual,
                Column::Reflected { .. } => upper[j] = residual,
                Column::Split { .. } => debug_assert!(residual.is_zero()),
            }
        }
        (row, lower, upper)
    }
}

/// Solve `lp` exactly. Deterministic for a fixed instance.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();
    let sf = match StandardForm::build(lp) {
        Ok(sf) => sf,
        Err(cert) => return Ok(LpOutcome::Infeasible(cert)),
    };
    let m = sf.rows.len();
    let n_slack = sf
        .rows
        .iter()
        .filter(|r| r.relation != Relation::Eq)
        .count();
    let art_start = sf.n_struct + n_slack;
    let width = art_start + m;

    let mut rows = Vec::with_capacity(m);
    let mut slack = sf.n_struct;
    for (i, r) in sf.rows.iter().enumerate() {
        let mut t = vec![Rational::zero(); width + 1];
        t[..sf.n_struct].clone_from_slice(&r.coeffs);
        match r.relation {
            Relation::Le => {
                t[slack] = Rational::from_integer(1.into());
                slack += 1;
            }
            Relation::Ge => {
                t[slack] = Rational::from_integer((-1).into());
                slack += 1;
            }
            Relation::Eq => {}
        }
        t[art_start + i] = Rational::from_integer(1.into());
        t[width] = r.rhs.clone();
        rows.push(t);
    }
    let mut tab = Tableau {
        rows,
        obj: Vec::new(),
        basis: (art_start..width).collect(),
        width,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1 = vec![Rational::zero(); width];
    for c in phase1.iter_mut().skip(art_start) {
        *c = Rational::from_integer(1.into());
    }
    tab.load_objective(&phase1);
    tab.run(width)
        .expect("phase one objective is bounded below by zero");
    let infeasibility: Rational = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= art_start)
        .fold(Rational::zero(), |acc, (i, _)| acc + tab.rhs(i));
    if infeasibility.is_positive() {
        let prices = tab.row_prices(&phase1, art_start);
        let zero = vec![Rational::zero(); n];
        let (row, lower, upper) = sf.multipliers(lp, &prices, &zero);
        return Ok(LpOutcome::Infeasible(FarkasCertificate {
            row_multipliers: row,
            lower_multipliers: lower,
            upper_multipliers: upper,
        }));
    }
    for r in 0..m {
        if tab.basis[r] >= art_start {
            if let Some(c) = (0..art_start).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, c);
            }
        }
    }

    // Phase 2 in minimization form.
    let objective: Vec<Rational> = match lp.sense {
        Sense::Minimize => lp.objective.clone(),
        Sense::Maximize => lp.objective.iter().map(|c| -c).collect(),
    };
    let costs = sf.costs(&objective, width);
    tab.load_objective(&costs);
    if let Err(enter) = tab.run(art_start) {
        let x = tab.column_values();
        let mut dir = vec![Rational::zero(); width];
        dir[enter] = Rational::from_integer(1.into());
        for (i, &b) in tab.basis.iter().enumerate() {
            dir[b] = -&tab.rows[i][enter];
        }
        return Ok(LpOutcome::Unbounded(UnboundedRay {
            point: sf.point(&x, true),
            ray: sf.point(&dir, false),
        }));
    }
    let x = tab.column_values();
    let primal = sf.point(&x, true);
    let prices = tab.row_prices(&costs, art_start);
    let (mut row, mut lower, mut upper) = sf.multipliers(lp, &prices, &objective);
    if lp.sense == Sense::Maximize {
        for v in row.iter_mut().chain(lower.iter_mut()).chain(upper.iter_mut()) {
            *v = -&*v;
        }
    }
    Ok(LpOutcome::Optimal(OptimalSolution {
        value: dot(&lp.objective, &primal),
        primal,
        row_duals: row,
        lower_duals: lower,
        upper_duals: upper,
    }))
}

fn bound_terms(lp: &LinearProgram, lower: &[Rational], upper: &[Rational]) -> Option<Rational> {
    let mut total = Rational::zero();
    for ((b, l), u) in lp.bounds.iter().zip(lower).zip(upper) {
        if !l.is_zero() {
            total += l * b.lower.as_ref()?;
        }
        if !u.is_zero() {
            total += u * b.upper.as_ref()?;
        }
    }
    Some(total)
}

/// Multiplier sign check in the minimization convention.
fn row_sign_ok(rel: Relation, y: &Rational) -> bool {
    match rel {
        Relation::Ge => !y.is_negative(),
        Relation::Le => !y.is_positive(),
        Relation::Eq => true,
    }
}

fn combined_columns(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let mut g = vec![Rational::zero(); lp.num_vars()];
    for (c, yi) in lp.constraints.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (gj, a) in g.iter_mut().zip(&c.coeffs) {
            if !a.is_zero() {
                *gj += yi * a;
            }
        }
    }
    g
}

/// Check every certificate carried by `out` against `lp` by direct
/// substitution. No tolerance is involved.
pub fn verify_certificates(lp: &LinearProgram, out: &LpOutcome) -> bool {
    if lp.validate().is_err() {
        return false;
    }
    let n = lp.num_vars();
    let m = lp.constraints.len();
    match out {
        LpOutcome::Optimal(sol) => {
            if sol.primal.len() != n
                || sol.row_duals.len() != m
                || sol.lower_duals.len() != n
                || sol.upper_duals.len() != n
                || !lp.is_feasible_point(&sol.primal)
                || dot(&lp.objective, &sol.primal) != sol.value
            {
                return false;
            }
            // Bring maximization multipliers to the minimization convention.
            let flip = |v: &Rational| match lp.sense {
                Sense::Minimize => v.clone(),
                Sense::Maximize => -v,
            };
            let y: Vec<Rational> = sol.row_duals.iter().map(flip).collect();
            let lower: Vec<Rational> = sol.lower_duals.iter().map(flip).collect();
            let upper: Vec<Rational> = sol.upper_duals.iter().map(flip).collect();
            let c: Vec<Rational> = lp.objective.iter().map(flip).collect();
            if !lp
                .constraints
                .iter()
                .zip(&y)
                .all(|(row, yi)| row_sign_ok(row.relation, yi))
                || lower.iter().any(Signed::is_negative)
                || upper.iter().any(Signed::is_positive)
            {
                return false;
            }
            let g = combined_columns(lp, &y);
            let stationary = (0..n).all(|j| c[j] == &g[j] + &lower[j] + &upper[j]);
            let Some(bounds) = bound_terms(lp, &lower, &upper) else {
                return false;
            };
            let rhs: Vec<Rational> = lp.constraints.iter().map(|r| r.rhs.clone()).collect();
            let dual_value = dot(&rhs, &y) + bounds;
            stationary && dual_value == flip(&sol.value)
        }
        LpOutcome::Infeasible(cert) => {
            if cert.row_multipliers.len() != m
                || cert.lower_multipliers.len() != n
                || cert.upper_multipliers.len() != n
            {
                return false;
            }
            if !lp
                .constraints
                .iter()
                .zip(&cert.row_multipliers)
                .all(|(row, yi)| row_sign_ok(row.relation, yi))
                || cert.lower_multipliers.iter().any(Signed::is_negative)
                || cert.upper_multipliers.iter().any(Signed::is_positive)
            {
                return false;
            }
            let g = combined_columns(lp, &cert.row_multipliers);
            let cancels = (0..n)
                .all(|j| (&g[j] + &cert.lower_multipliers[j] + &cert.upper_multipliers[j]).is_zero());
            let Some(bounds) = bound_terms(lp, &cert.lower_multipliers, &cert.upper_multipliers)
            else {
                return false;
            };
            let rhs: Vec<Rational> = lp.constraints.iter().map(|r| r.rhs.clone()).collect();
            cancels && (dot(&rhs, &cert.row_multipliers) + bounds).is_positive()
        }
        LpOutcome::Unbounded(ray) => {
            if ray.point.len() != n || ray.ray.len() != n || !lp.is_feasible_point(&ray.point) {
                return false;
            }
            let recedes = lp.constraints.iter().all(|c| {
                c.relation
                    .holds(&dot(&c.coeffs, &ray.ray), &Rational::zero())
            }) && lp.bounds.iter().zip(&ray.ray).all(|(b, d)| {
                (b.lower.is_none() || !d.is_negative()) && (b.upper.is_none() || !d.is_positive())
            });
            let slope = dot(&lp.objective, &ray.ray);
            let improves = match lp.sense {
                Sense::Minimize => slope.is_negative(),
                Sense::Maximize => slope.is_positive(),
            };
            recedes && improves
        }
    }
}
