//! Shifted power potential `φ_κ(t) = ∫₀ᵗ (κ+s)^{p−2} s ds`, the associated
//! tensors `S(ξ) = (κ+|ξ|)^{p−2} ξ` and `V(ξ) = (κ+|ξ|)^{(p−2)/2} ξ`, and the
//! energy `J(u) = ∫ φ_κ(|εu|)`.
//!
//! Matrix magnitudes `|ξ|` are Frobenius norms everywhere.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::TensorField;

/// Exponent `p > 1` and shift `κ ≥ 0` of the potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    p: f64,
    kappa: f64,
}

impl PotentialParams {
    pub fn new(p: f64, kappa: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::Domain(format!("exponent p must be > 1, got {p}")));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::Domain(format!("shift kappa must be >= 0, got {kappa}")));
        }
        Ok(Self { p, kappa })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Conjugate exponent `p' = p/(p−1)`.
    pub fn p_conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// The potential shifted once more by `a ≥ 0`. For the power family the
    /// shift of `φ_κ` by `a` is again a member: `(φ_κ)_a = φ_{κ+a}`.
    pub fn shifted(&self, a: f64) -> Self {
        Self {
            p: self.p,
            kappa: self.kappa + a.abs(),
        }
    }
}

/// Real 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Matrix2(pub [[f64; 2]; 2]);

impl Matrix2 {
    pub const ZERO: Matrix2 = Matrix2([[0.0; 2]; 2]);
    pub const IDENTITY: Matrix2 = Matrix2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Matrix2([[a11, a12], [a21, a22]])
    }

    /// Frobenius inner product `A : B`.
    pub fn dot(&self, other: &Matrix2) -> f64 {
        let (a, b) = (&self.0, &other.0);
        a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn transpose(&self) -> Matrix2 {
        let a = &self.0;
        Matrix2([[a[0][0], a[1][0]], [a[0][1], a[1][1]]])
    }

    /// Symmetric part `(A + Aᵀ)/2`.
    pub fn sym(&self) -> Matrix2 {
        (*self + self.transpose()) * 0.5
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, rhs: Matrix2) -> Matrix2 {
        let (a, b) = (self.0, rhs.0);
        Matrix2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl AddAssign for Matrix2 {
    fn add_assign(&mut self, rhs: Matrix2) {
        *self = *self + rhs;
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, rhs: Matrix2) -> Matrix2 {
        self + (-rhs)
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        self * -1.0
    }
}

impl Mul<f64> for Matrix2 {
    type Output = Matrix2;
    fn mul(self, s: f64) -> Matrix2 {
        let a = self.0;
        Matrix2([[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]])
    }
}

fn check_argument(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("potential argument must be >= 0, got {t}")));
    }
    Ok(())
}

/// `φ_κ(t)`.
///
/// The closed form `(κ+t)^p/p − κ(κ+t)^{p−1}/(p−1) + κ^p/(p(p−1))` cancels
/// catastrophically for `t ≪ κ`. Writing `a = κ+t` and `y = t/a` it equals
/// `a^p f(y) / (p(p−1))` with `f(y) = (1−y)^p − 1 + p y`, and `f` is summed
/// as its binomial series `Σ_{k≥2} C(p,k)(−y)^k` when `y` is small.
pub fn phi(params: &PotentialParams, t: f64) -> Result<f64> {
    check_argument(t)?;
    Ok(phi_unchecked(params, t))
}

pub(crate) fn phi_unchecked(params: &PotentialParams, t: f64) -> f64 {
    let PotentialParams { p, kappa } = *params;
    if p == 2.0 {
        return 0.5 * t * t;
    }
    let a = kappa + t;
    if a == 0.0 {
        return 0.0;
    }
    let y = t / a;
    let f = if y < 0.25 {
        let mut term = 0.5 * p * (p - 1.0) * y * y;
        let mut sum = term;
        let mut k = 2.0;
        while term != 0.0 && term.abs() > 1e-18 * sum.abs() && k < 200.0 {
            term *= -(p - k) / (k + 1.0) * y;
            sum += term;
            k += 1.0;
        }
        sum
    } else {
        (kappa / a).powf(p) - 1.0 + p * y
    };
    a.powf(p) * f / (p * (p - 1.0))
}

/// `φ_κ'(t) = (κ+t)^{p−2} t`.
pub fn phi_prime(params: &PotentialParams, t: f64) -> Result<f64> {
    check_argument(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok((params.kappa + t).powf(params.p - 2.0) * t)
}

/// `φ_κ''(t) = (κ+t)^{p−2} (1 + (p−2) t/(κ+t))`.
///
/// Singular at `t = 0` when `κ = 0` and `p < 2`.
pub fn phi_second(params: &PotentialParams, t: f64) -> Result<f64> {
    check_argument(t)?;
    let PotentialParams { p, kappa } = *params;
    let a = kappa + t;
    if a == 0.0 {
        return if p < 2.0 {
            Err(Error::Singular(format!(
                "phi'' is unbounded at t = 0 for kappa = 0 and p = {p} < 2"
            )))
        } else if p == 2.0 {
            Ok(1.0)
        } else {
            Ok(0.0)
        };
    }
    Ok(a.powf(p - 2.0) * (1.0 + (p - 2.0) * t / a))
}

/// Scalar factor `(κ+|ξ|)^{p−2}` with the continuous extension at `ξ = 0`.
fn stress_factor(params: &PotentialParams, magnitude: f64) -> f64 {
    if magnitude == 0.0 {
        return 0.0;
    }
    (params.kappa + magnitude).powf(params.p - 2.0)
}

/// `S(ξ) = (κ+|ξ|)^{p−2} ξ`, with `S(0) = 0`.
pub fn s_tensor(params: &PotentialParams, xi: &Matrix2) -> Matrix2 {
    *xi * stress_factor(params, xi.norm())
}

/// `V(ξ) = (κ+|ξ|)^{(p−2)/2} ξ`, with `V(0) = 0`.
pub fn v_tensor(params: &PotentialParams, xi: &Matrix2) -> Matrix2 {
    let t = xi.norm();
    if t == 0.0 {
        return Matrix2::ZERO;
    }
    *xi * (params.kappa + t).powf(0.5 * (params.p - 2.0))
}

/// Directional derivative `DS(ξ)[η]` of the stress, i.e. the integrand of the
/// second Gateaux derivative of `J`:
/// `(φ'(t)/t) η + (φ''(t) − φ'(t)/t) (ξ/t : η) ξ/t` with `t = |ξ|`.
///
/// `kappa_floor` replaces `κ` inside the derivative when it is larger; it
/// regularises the degenerate case `κ = 0`, `p < 2`.
pub(crate) fn stress_derivative(params: &PotentialParams, kappa_floor: f64, xi: &Matrix2, eta: &Matrix2) -> Matrix2 {
    let p = params.p;
    let kappa = params.kappa.max(kappa_floor);
    let t = xi.norm();
    let a = kappa + t;
    if a == 0.0 {
        // p ≥ 2 here (the floor is positive otherwise).
        return if p == 2.0 { *eta } else { Matrix2::ZERO };
    }
    let linear = a.powf(p - 2.0);
    if t == 0.0 {
        return *eta * linear;
    }
    let radial = (p - 2.0) * a.powf(p - 3.0) / t;
    *eta * linear + *xi * (radial * xi.dot(eta))
}

/// `J = Σ_nodes w · φ_κ(|ξ|)`, the trapezoidal quadrature of `∫ φ_κ(|εu|)`.
pub fn energy(params: &PotentialParams, eps: &TensorField) -> f64 {
    let grid = eps.grid();
    let mut total = 0.0;
    for (k, xi) in eps.iter().enumerate() {
        total += grid.weight_at(k) * phi_unchecked(params, xi.norm());
    }
    total
}

/// Worst-case constant and margin of one sampled inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub delta: f64,
    /// Smallest admissible constant `C_δ ≥ 1` over the samples.
    pub constant: f64,
    /// `min (right-hand side − left-hand side)` with that constant.
    pub margin: f64,
}

/// Sampled monotonicity bracket and inequality constants for one potential.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub params: PotentialParams,
    pub samples: usize,
    /// Number of pairs with `P = Q` (or `V(P) = V(Q)`) excluded from the bracket.
    pub degenerate: usize,
    /// Bracket of `(S(P)−S(Q)):(P−Q) / |V(P)−V(Q)|²`.
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub young: Vec<InequalityCheck>,
    pub change_of_shift: InequalityCheck,
    /// Matrix norm used for `|ξ|`.
    pub norm: &'static str,
}

pub const YOUNG_DELTAS: [f64; 3] = [0.1, 0.5, 1.0];
pub const SHIFT_DELTA: f64 = 0.5;

fn random_matrix(rng: &mut ChaCha8Rng) -> Matrix2 {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    let mut m = [[0.0; 2]; 2];
    for x in m.iter_mut().flatten() {
        *x = scale * rng.sample::<f64, _>(StandardNormal);
    }
    Matrix2(m)
}

/// Monotonicity ratio of a single pair; `None` for the excluded 0/0 case.
pub fn equivalence_ratio(params: &PotentialParams, p_mat: &Matrix2, q_mat: &Matrix2) -> Option<f64> {
    let num = (s_tensor(params, p_mat) - s_tensor(params, q_mat)).dot(&(*p_mat - *q_mat));
    let den = (v_tensor(params, p_mat) - v_tensor(params, q_mat)).norm_sq();
    if den == 0.0 || p_mat == q_mat {
        None
    } else {
        Some(num / den)
    }
}

/// Samples random matrix pairs/triples and measures the bracket of
/// `(S(P)−S(Q)):(P−Q) / |V(P)−V(Q)|²` together with the Young-type and
/// change-of-shift constants.
pub fn inequality_report(params: &PotentialParams, n_samples: usize, rng_seed: u64) -> Result<InequalityReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    let mut degenerate = 0;

    // (lhs, a, b) triples per Young delta are not needed: the constant is a
    // running maximum and the margin is evaluated in a second pass.
    let mut young_terms = Vec::with_capacity(n_samples);
    let mut shift_terms = Vec::with_capacity(n_samples);

    for _ in 0..n_samples {
        let p_mat = random_matrix(&mut rng);
        let q_mat = random_matrix(&mut rng);
        let r_mat = random_matrix(&mut rng);
        let t = 10f64.powf(rng.random_range(-3.0..3.0));

        match equivalence_ratio(params, &p_mat, &q_mat) {
            Some(r) => {
                ratio_min = ratio_min.min(r);
                ratio_max = ratio_max.max(r);
            }
            None => degenerate += 1,
        }

        let vp = v_tensor(params, &p_mat);
        let vq = v_tensor(params, &q_mat);
        let vr = v_tensor(params, &r_mat);
        let a = (vp - vq).norm_sq();
        let b = (vr - vq).norm_sq();
        let lhs = (s_tensor(params, &p_mat) - s_tensor(params, &q_mat)).dot(&(r_mat - q_mat));
        young_terms.push((lhs, a, b));

        let shifted_p = phi_unchecked(&params.shifted(p_mat.norm()), t);
        let shifted_q = phi_unchecked(&params.shifted(q_mat.norm()), t);
        shift_terms.push((shifted_p, a, shifted_q));
    }

    let young = YOUNG_DELTAS
        .iter()
        .map(|&delta| {
            let constant = young_terms
                .iter()
                .filter(|(_, _, b)| *b > 0.0)
                .map(|(lhs, a, b)| (lhs - delta * a) / b)
                .fold(1.0f64, f64::max);
            let margin = young_terms
                .iter()
                .map(|(lhs, a, b)| delta * a + constant * b - lhs)
                .fold(f64::INFINITY, f64::min);
            InequalityCheck { delta, constant, margin }
        })
        .collect();

    let delta = SHIFT_DELTA;
    let constant = shift_terms
        .iter()
        .filter(|(_, _, q)| *q > 0.0)
        .map(|(pp, a, q)| (pp - delta * a) / q)
        .fold(1.0f64, f64::max);
    let margin = shift_terms
        .iter()
        .map(|(pp, a, q)| constant * q + delta * a - pp)
        .fold(f64::INFINITY, f64::min);

    Ok(InequalityReport {
        params: *params,
        samples: n_samples,
        degenerate,
        ratio_min,
        ratio_max,
        young,
        change_of_shift: InequalityCheck { delta, constant, margin },
        norm: "frobenius",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use proptest::prelude::*;

    fn params(p: f64, kappa: f64) -> PotentialParams {
        PotentialParams::new(p, kappa).unwrap()
    }

    /// Composite Gauss–Legendre (5 points) quadrature of `∫₀ᵗ (κ+s)^{p−2} s ds`.
    fn phi_quadrature(p: f64, kappa: f64, t: f64) -> f64 {
        let nodes = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        let weights = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let panels = 2000;
        let width = t / panels as f64;
        let mut sum = 0.0;
        for k in 0..panels {
            let mid = (k as f64 + 0.5) * width;
            for (x, w) in nodes.iter().zip(weights) {
                let s = mid + 0.5 * width * x;
                sum += 0.5 * width * w * (kappa + s).powf(p - 2.0) * s;
            }
        }
        sum
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&params(2.0, 5.0), 2.0).unwrap(), 2.0);
        assert!((phi(&params(3.0, 1.0), 1.0).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert!((phi_quadrature(3.0, 1.0, 1.0) - 5.0 / 6.0).abs() < 1e-13);
        assert_eq!(phi(&params(2.0, 0.0), 0.0).unwrap(), 0.0);
        assert!(matches!(phi(&params(2.0, 0.0), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_matches_quadrature_including_small_t() {
        for &(p, kappa) in &[(1.5, 1.0), (2.5, 0.01), (3.0, 2.0), (4.5, 1e-3), (1.2, 0.0)] {
            for &t in &[1e-6_f64, 1e-3, 0.3, 1.0, 7.5] {
                // The integrand is singular at 0 for κ = 0, p < 2; use t^p/p there.
                let exact = if kappa == 0.0 { t.powf(p) / p } else { phi_quadrature(p, kappa, t) };
                let got = phi(&params(p, kappa), t).unwrap();
                assert!((got - exact).abs() <= 1e-11 * exact.abs(), "p={p} k={kappa} t={t}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(phi_prime(&params(2.0, 7.0), 3.0).unwrap(), 3.0);
        assert_eq!(phi_prime(&params(3.0, 1.0), 2.0).unwrap(), 6.0);
        assert_eq!(phi_second(&params(2.0, 0.0), 5.0).unwrap(), 1.0);
        assert!(matches!(phi_second(&params(1.5, 0.0), 0.0), Err(Error::Singular(_))));
        assert!(phi_second(&params(1.5, 0.1), 0.0).unwrap().is_finite());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(PotentialParams::new(1.0, 0.0).is_err());
        assert!(PotentialParams::new(2.0, -1.0).is_err());
        assert!(PotentialParams::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn tensor_examples() {
        let a = Matrix2::new(1.0, -2.0, 0.5, 3.0);
        assert_eq!(s_tensor(&params(2.0, 0.0), &a), a);
        let s = s_tensor(&params(3.0, 0.0), &Matrix2::IDENTITY);
        let r2 = 2f64.sqrt();
        assert!((s - Matrix2::IDENTITY * r2).norm() < 1e-15);
        for pr in [params(1.5, 0.0), params(3.0, 1.0), params(2.0, 0.0)] {
            assert_eq!(v_tensor(&pr, &Matrix2::ZERO), Matrix2::ZERO);
            assert_eq!(s_tensor(&pr, &Matrix2::ZERO), Matrix2::ZERO);
        }
    }

    #[test]
    fn energy_examples() {
        let grid = Grid::new(8).unwrap();
        let pr = params(2.0, 0.0);
        assert_eq!(energy(&pr, &TensorField::zeros(grid)), 0.0);
        let xi = Matrix2::new(0.6, 0.0, 0.0, 0.8);
        let constant = TensorField::from_fn(grid, |_, _| xi);
        assert!((energy(&pr, &constant) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn energy_matches_scalar_quadrature_oracle() {
        let grid = Grid::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let field = TensorField::from_fn(grid, |_, _| random_matrix(&mut rng));
        let pr = params(3.0, 0.5);
        let n = grid.n();
        let h = grid.h();
        let mut oracle = 0.0;
        for j in 0..=n {
            for i in 0..=n {
                let wi = if i == 0 || i == n { 0.5 } else { 1.0 };
                let wj = if j == 0 || j == n { 0.5 } else { 1.0 };
                let xi = field.get(i, j);
                let t = xi.norm();
                // p = 3: ∫₀ᵗ (κ+s)s ds = κt²/2 + t³/3.
                oracle += h * h * wi * wj * (0.25 * t * t + t * t * t / 3.0);
            }
        }
        let got = energy(&pr, &field);
        assert!((got - oracle).abs() <= 1e-12 * oracle, "{got} vs {oracle}");
    }

    #[test]
    fn equivalence_bracket_examples() {
        let rep = inequality_report(&params(2.0, 0.0), 20_000, 1).unwrap();
        assert!((rep.ratio_min - 1.0).abs() < 1e-12 && (rep.ratio_max - 1.0).abs() < 1e-12);
        let pq = Matrix2::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(equivalence_ratio(&params(3.0, 0.0), &pq, &pq), None);

        let rep = inequality_report(&params(3.0, 0.0), 100_000, 2).unwrap();
        assert!(rep.ratio_min > 0.0 && rep.ratio_max.is_finite());
        assert!(rep.ratio_min <= rep.ratio_max);
        for check in rep.young.iter().chain(std::iter::once(&rep.change_of_shift)) {
            assert!(check.constant >= 1.0 && check.constant.is_finite());
            assert!(check.margin >= -1e-9, "{check:?}");
        }
    }

    #[test]
    fn equivalence_bracket_is_stable_between_disjoint_runs() {
        let pr = params(3.0, 0.0);
        let a = inequality_report(&pr, 100_000, 100).unwrap();
        let b = inequality_report(&pr, 100_000, 200).unwrap();
        assert!((a.ratio_min - b.ratio_min).abs() <= 0.2 * a.ratio_min.min(b.ratio_min));
        assert!((a.ratio_max - b.ratio_max).abs() <= 0.2 * a.ratio_max.min(b.ratio_max));
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(inequality_report(&params(2.0, 0.0), 0, 0).is_err());
    }

    fn arb_params() -> impl Strategy<Value = PotentialParams> {
        (1.05f64..6.0, prop_oneof![Just(0.0), 1e-4f64..10.0]).prop_map(|(p, k)| params(p, k))
    }

    proptest! {
        #[test]
        fn phi_is_convex(pr in arb_params(), t1 in 0.0f64..20.0, t2 in 0.0f64..20.0, theta in 0.0f64..1.0) {
            let mid = phi_unchecked(&pr, theta * t1 + (1.0 - theta) * t2);
            let chord = theta * phi_unchecked(&pr, t1) + (1.0 - theta) * phi_unchecked(&pr, t2);
            prop_assert!(mid <= chord + 1e-12 * chord.abs().max(1.0));
        }

        #[test]
        fn phi_prime_matches_central_differences(pr in arb_params(), t in 0.1f64..10.0) {
            let step = 1e-5;
            let fd = (phi_unchecked(&pr, t + step) - phi_unchecked(&pr, t - step)) / (2.0 * step);
            let exact = phi_prime(&pr, t).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs());
        }

        #[test]
        fn scaling_identity(pr in arb_params(), t in 0.0f64..50.0) {
            let lhs = phi_unchecked(&pr, 2.0 * t);
            let half = params(pr.p(), 0.5 * pr.kappa());
            let rhs = 2f64.powf(pr.p()) * phi_unchecked(&half, t);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
        }

        #[test]
        fn power_sandwich(pr in arb_params(), t in 0.0f64..100.0) {
            let (p, k) = (pr.p(), pr.kappa());
            let value = phi_unchecked(&pr, t);
            let upper = (k + t).powf(p) / p + k.powf(p) / (p * (p - 1.0));
            let lower = (k + t).powf(p) / (2.0 * p) - (2f64.powf(p - 1.0) - 1.0) * k.powf(p) / (p * (p - 1.0));
            let slack = 1e-12 * upper;
            prop_assert!(lower <= value + slack && value <= upper + slack);
        }

        #[test]
        fn s_and_v_are_compatible(pr in arb_params(), a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0) {
            let xi = Matrix2::new(a, b, c, d);
            let lhs = s_tensor(&pr, &xi).dot(&xi);
            let rhs = v_tensor(&pr, &xi).norm_sq();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(f64::MIN_POSITIVE));
        }
    }
}
