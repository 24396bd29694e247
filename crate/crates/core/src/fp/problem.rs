//! Multi-ratio problem description: ratio terms, combiner and feasible set.

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{FpError, Result};
use crate::numerics::linalg::{hpd_solve, quad_form, re_inner, CMat, CVec};
use crate::numerics::projection::{
    project_ball_groups_in_place, project_box_in_place, project_capped_simplex_in_place,
};

/// Scalar ratio `A(x) / B(x)` with `A >= 0`, `B > 0` on the feasible set.
pub trait RatioTerm: Send + Sync {
    fn numerator(&self, x: &[f64]) -> f64;
    fn denominator(&self, x: &[f64]) -> f64;
    fn numerator_gradient(&self, x: &[f64], grad: &mut [f64]);
    fn denominator_gradient(&self, x: &[f64], grad: &mut [f64]);
}

type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// [`RatioTerm`] built from closures.
pub struct FnRatio {
    pub numerator: ScalarFn,
    pub denominator: ScalarFn,
    pub numerator_gradient: GradFn,
    pub denominator_gradient: GradFn,
}

impl FnRatio {
    pub fn new(
        numerator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        denominator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        numerator_gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        denominator_gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            numerator: Box::new(numerator),
            denominator: Box::new(denominator),
            numerator_gradient: Box::new(numerator_gradient),
            denominator_gradient: Box::new(denominator_gradient),
        }
    }
}

impl RatioTerm for FnRatio {
    fn numerator(&self, x: &[f64]) -> f64 {
        (self.numerator)(x)
    }
    fn denominator(&self, x: &[f64]) -> f64 {
        (self.denominator)(x)
    }
    fn numerator_gradient(&self, x: &[f64], grad: &mut [f64]) {
        (self.numerator_gradient)(x, grad)
    }
    fn denominator_gradient(&self, x: &[f64], grad: &mut [f64]) {
        (self.denominator_gradient)(x, grad)
    }
}

/// Multidimensional ratio `a(x)^H B(x)^{-1} a(x)` with `B(x)` Hermitian positive definite.
pub trait MatrixRatioTerm: Send + Sync {
    fn numerator(&self, x: &[f64]) -> CVec;
    fn denominator(&self, x: &[f64]) -> CMat;
    /// Gradient in `x` of `2 Re{y^H a(x)} - y^H B(x) y` for fixed `y`.
    fn transformed_gradient(&self, x: &[f64], y: &CVec, grad: &mut [f64]);
}

pub enum Term {
    Scalar(Box<dyn RatioTerm>),
    Matrix(Box<dyn MatrixRatioTerm>),
}

/// Per-term auxiliary variable of the quadratic transform.
#[derive(Debug, Clone, PartialEq)]
pub enum AuxValue {
    Scalar(f64),
    Vector(CVec),
}

/// Auxiliary variables `y_m`, one per ratio term.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuxiliaryVector {
    pub values: Vec<AuxValue>,
}

impl AuxiliaryVector {
    /// The scalar `y_m`, if every term is scalar.
    pub fn scalars(&self) -> Option<Vec<f64>> {
        self.values
            .iter()
            .map(|v| match v {
                AuxValue::Scalar(y) => Some(*y),
                AuxValue::Vector(_) => None,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn term_error(m: usize, detail: String) -> FpError {
    FpError::domain(format!("ratio term {m}"), detail)
}

impl Term {
    /// Ratio value at `x`, checking the numerator/denominator domain.
    pub fn ratio(&self, m: usize, x: &[f64]) -> Result<f64> {
        match self {
            Term::Scalar(t) => {
                let (a, b) = (t.numerator(x), t.denominator(x));
                if !(a >= 0.0) {
                    return Err(term_error(m, format!("numerator {a} is negative")));
                }
                if !(b > 0.0) {
                    return Err(term_error(m, format!("denominator {b} is not positive")));
                }
                Ok(a / b)
            }
            Term::Matrix(t) => {
                let (a, b) = (t.numerator(x), t.denominator(x));
                let y = hpd_solve(&b, &a).map_err(|e| term_error(m, e.to_string()))?;
                Ok(re_inner(&a, &y))
            }
        }
    }

    /// Optimal auxiliary variable at `x`: `sqrt(A)/B`, or `B^{-1} a`.
    pub fn optimal_aux(&self, m: usize, x: &[f64]) -> Result<AuxValue> {
        match self {
            Term::Scalar(t) => {
                let (a, b) = (t.numerator(x), t.denominator(x));
                if !(a >= 0.0) || !(b > 0.0) {
                    return Err(term_error(m, format!("A = {a}, B = {b} outside A >= 0, B > 0")));
                }
                Ok(AuxValue::Scalar(a.sqrt() / b))
            }
            Term::Matrix(t) => {
                let y = hpd_solve(&t.denominator(x), &t.numerator(x)).map_err(|e| term_error(m, e.to_string()))?;
                Ok(AuxValue::Vector(y))
            }
        }
    }

    /// Transformed value for a fixed auxiliary variable. NaN outside the domain.
    pub fn transformed(&self, x: &[f64], y: &AuxValue) -> f64 {
        match (self, y) {
            (Term::Scalar(t), AuxValue::Scalar(y)) => {
                let a = t.numerator(x);
                if a < 0.0 {
                    return f64::NAN;
                }
                2.0 * y * a.sqrt() - y * y * t.denominator(x)
            }
            (Term::Matrix(t), AuxValue::Vector(y)) => {
                2.0 * re_inner(y, &t.numerator(x)) - quad_form(&t.denominator(x), y)
            }
            _ => f64::NAN,
        }
    }

    /// Adds `scale * grad_x transformed(x, y)` into `grad`.
    pub fn add_transformed_gradient(&self, x: &[f64], y: &AuxValue, scale: f64, grad: &mut [f64], work: &mut [f64]) {
        match (self, y) {
            (Term::Scalar(t), AuxValue::Scalar(y)) => {
                if *y != 0.0 {
                    // d/dx 2y sqrt(A) = y grad A / sqrt(A); floor A so the boundary stays finite
                    let a = t.numerator(x).max(1e-300);
                    t.numerator_gradient(x, work);
                    let ca = scale * y / a.sqrt();
                    for (g, w) in grad.iter_mut().zip(work.iter()) {
                        *g += ca * w;
                    }
                    t.denominator_gradient(x, work);
                    let cb = scale * y * y;
                    for (g, w) in grad.iter_mut().zip(work.iter()) {
                        *g -= cb * w;
                    }
                }
            }
            (Term::Matrix(t), AuxValue::Vector(y)) => {
                t.transformed_gradient(x, y, work);
                for (g, w) in grad.iter_mut().zip(work.iter()) {
                    *g += scale * w;
                }
            }
            _ => {}
        }
    }
}

impl Term {
    /// Adds `scale * grad_x` of the ratio itself. Scalar terms use
    /// `grad A / B - A grad B / B^2`, which stays correct at `A = 0` where the
    /// optimal auxiliary vanishes and the transformed gradient is flat.
    fn add_ratio_gradient(&self, x: &[f64], y: &AuxValue, scale: f64, grad: &mut [f64], work: &mut [f64]) {
        match self {
            Term::Scalar(t) => {
                let (a, b) = (t.numerator(x), t.denominator(x));
                t.numerator_gradient(x, work);
                for (g, w) in grad.iter_mut().zip(work.iter()) {
                    *g += scale * w / b;
                }
                t.denominator_gradient(x, work);
                let c = scale * a / (b * b);
                for (g, w) in grad.iter_mut().zip(work.iter()) {
                    *g -= c * w;
                }
            }
            Term::Matrix(_) => self.add_transformed_gradient(x, y, scale, grad, work),
        }
    }
}

/// Nondecreasing concave outer function `f_m` and its derivative.
pub struct OuterFunction {
    pub value: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub derivative: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl OuterFunction {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Box::new(value),
            derivative: Box::new(derivative),
        }
    }

    pub fn identity() -> Self {
        Self::new(|r| r, |_| 1.0)
    }

    /// `w ln(1 + r)`, the weighted rate of an SINR.
    pub fn weighted_log1p(w: f64) -> Self {
        Self::new(move |r| w * r.ln_1p(), move |r| w / (1.0 + r))
    }
}

pub enum Combiner {
    Sum,
    SumOfFunctions(Vec<OuterFunction>),
    MaxMin,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleKind {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Coordinate groups, each confined to a Euclidean ball of the given radius.
    PerGroupBall { groups: Vec<Range<usize>>, radii: Vec<f64> },
    /// Coordinate groups, each confined to `{x >= 0, sum(x) <= budget}`.
    SimplexSum { groups: Vec<Range<usize>>, budgets: Vec<f64> },
}

/// Convex feasible set of a ratio problem.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    kind: FeasibleKind,
    dimension: usize,
}

fn check_groups(groups: &[Range<usize>], sizes: &[f64], dimension: usize, what: &str) -> Result<()> {
    if groups.len() != sizes.len() {
        return Err(FpError::Dimension {
            context: "feasible set groups",
            expected: groups.len(),
            got: sizes.len(),
        });
    }
    for (g, &s) in groups.iter().zip(sizes) {
        if g.end > dimension || g.start > g.end {
            return Err(FpError::domain("feasible set", format!("group {g:?} exceeds dimension {dimension}")));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(FpError::domain("feasible set", format!("{what} must be positive and finite, got {s}")));
        }
    }
    Ok(())
}

impl FeasibleSet {
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(FpError::Dimension {
                context: "box bounds",
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u)) {
            return Err(FpError::domain("box bounds", "bounds must be finite with lower <= upper"));
        }
        Ok(Self {
            dimension: lower.len(),
            kind: FeasibleKind::Box { lower, upper },
        })
    }

    pub fn group_balls(dimension: usize, groups: Vec<Range<usize>>, radii: Vec<f64>) -> Result<Self> {
        check_groups(&groups, &radii, dimension, "radius")?;
        Ok(Self {
            dimension,
            kind: FeasibleKind::PerGroupBall { groups, radii },
        })
    }

    pub fn simplex_sums(dimension: usize, groups: Vec<Range<usize>>, budgets: Vec<f64>) -> Result<Self> {
        check_groups(&groups, &budgets, dimension, "budget")?;
        Ok(Self {
            dimension,
            kind: FeasibleKind::SimplexSum { groups, budgets },
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &FeasibleKind {
        &self.kind
    }

    pub fn project(&self, x: &mut [f64]) {
        match &self.kind {
            FeasibleKind::Box { lower, upper } => project_box_in_place(x, lower, upper),
            FeasibleKind::PerGroupBall { groups, radii } => project_ball_groups_in_place(x, groups, radii),
            FeasibleKind::SimplexSum { groups, budgets } => {
                for (g, &b) in groups.iter().zip(budgets) {
                    project_capped_simplex_in_place(&mut x[g.clone()], b);
                }
            }
        }
    }

    /// Membership test with relative tolerance `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dimension || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match &self.kind {
            FeasibleKind::Box { lower, upper } => x.iter().zip(lower.iter().zip(upper)).all(|(&v, (&l, &u))| {
                let slack = tol * (1.0 + l.abs().max(u.abs()));
                v >= l - slack && v <= u + slack
            }),
            FeasibleKind::PerGroupBall { groups, radii } => groups.iter().zip(radii).all(|(g, &r)| {
                x[g.clone()].iter().map(|v| v * v).sum::<f64>().sqrt() <= r * (1.0 + tol)
            }),
            FeasibleKind::SimplexSum { groups, budgets } => groups.iter().zip(budgets).all(|(g, &b)| {
                let s = &x[g.clone()];
                s.iter().all(|&v| v >= -tol * b) && s.iter().sum::<f64>() <= b * (1.0 + tol)
            }),
        }
    }
}

/// A multi-ratio fractional program.
pub struct RatioProblem {
    terms: Vec<Term>,
    combiner: Combiner,
    feasible_set: FeasibleSet,
}

impl RatioProblem {
    pub fn new(terms: Vec<Term>, combiner: Combiner, feasible_set: FeasibleSet) -> Result<Self> {
        if terms.is_empty() {
            return Err(FpError::Usage("a ratio problem needs at least one term".into()));
        }
        if let Combiner::SumOfFunctions(fs) = &combiner {
            if fs.len() != terms.len() {
                return Err(FpError::Dimension {
                    context: "outer functions per term",
                    expected: terms.len(),
                    got: fs.len(),
                });
            }
        }
        Ok(Self {
            terms,
            combiner,
            feasible_set,
        })
    }

    /// Single scalar ratio maximized over `feasible_set`.
    pub fn single(term: impl RatioTerm + 'static, feasible_set: FeasibleSet) -> Self {
        Self {
            terms: vec![Term::Scalar(Box::new(term))],
            combiner: Combiner::Sum,
            feasible_set,
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn combiner(&self) -> &Combiner {
        &self.combiner
    }

    pub fn feasible_set(&self) -> &FeasibleSet {
        &self.feasible_set
    }

    pub fn dimension(&self) -> usize {
        self.feasible_set.dimension()
    }

    pub fn ratios(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.terms.iter().enumerate().map(|(m, t)| t.ratio(m, x)).collect()
    }

    /// Objective in the original ratio metric.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let r = self.ratios(x)?;
        Ok(match &self.combiner {
            Combiner::Sum => r.iter().sum(),
            Combiner::SumOfFunctions(fs) => r.iter().zip(fs).map(|(&r, f)| (f.value)(r)).sum(),
            Combiner::MaxMin => r.iter().cloned().fold(f64::INFINITY, f64::min),
        })
    }

    pub fn optimal_aux(&self, x: &[f64]) -> Result<AuxiliaryVector> {
        let values = self
            .terms
            .iter()
            .enumerate()
            .map(|(m, t)| t.optimal_aux(m, x))
            .collect::<Result<_>>()?;
        Ok(AuxiliaryVector { values })
    }

    /// Gradient of the original objective for the smooth combiners. `None` for
    /// max-min.
    pub fn objective_gradient(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        let aux = self.optimal_aux(x)?;
        let n = x.len();
        let mut grad = vec![0.0; n];
        let mut work = vec![0.0; n];
        match &self.combiner {
            Combiner::Sum => {
                for (t, y) in self.terms.iter().zip(&aux.values) {
                    t.add_ratio_gradient(x, y, 1.0, &mut grad, &mut work);
                }
            }
            Combiner::SumOfFunctions(fs) => {
                let r = self.ratios(x)?;
                for ((t, y), (f, &r)) in self.terms.iter().zip(&aux.values).zip(fs.iter().zip(&r)) {
                    t.add_ratio_gradient(x, y, (f.derivative)(r), &mut grad, &mut work);
                }
            }
            Combiner::MaxMin => return Ok(None),
        }
        Ok(Some(grad))
    }
}

/// Complex numerator helper for tests and simple problems: embeds a real vector as complex.
pub fn real_to_cvec(x: &[f64]) -> CVec {
    CVec::from_iterator(x.len(), x.iter().map(|&v| Complex64::new(v, 0.0)))
}
