//! Closed-form upper and lower estimates of ν_p^l built from classical
//! logarithmic norms, matrix norms and Hermitian eigenvalues.
//!
//! Each entry records the formula it evaluates and when it applies; an
//! entry that does not apply to the given (p, l, m) is left empty.

use serde::Serialize;

use super::validate_l;
use crate::eigen::lambda_max_trusted;
use crate::error::Result;
use crate::lognorm::mu_square;
use crate::matrix::ComplexMatrix;
use crate::norm::NormKind;
use crate::system::SdeSystem;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub value: Option<f64>,
    pub formula: &'static str,
    pub applies_when: &'static str,
}

impl Bound {
    fn new(formula: &'static str, applies_when: &'static str, value: Option<f64>) -> Self {
        Self {
            value,
            formula,
            applies_when,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub p: NormKind,
    pub l: u32,
    pub channels: usize,
    /// Hermitian-eigenvalue upper bound for a single channel.
    pub main12_upper: Bound,
    /// Value claimed for B = I from the eigenvalue expansion.
    pub main12_exact_b_eq_i: Bound,
    /// μ₂ / ‖·‖₂ form of the single-channel upper bound.
    pub msest_upper: Bound,
    /// Values claimed for B = I with l = 1 and l = 2.
    pub beq1_identity: Bound,
    pub lpest1_upper: Bound,
    pub lpest_upper: Bound,
    pub lpest_upper_squared: Bound,
    /// Upper estimate from the direct expectation formula.
    pub mu_upper: Bound,
    /// Lower estimate from the direct expectation formula.
    pub mu_lower: Bound,
    /// Bound on |ν|.
    pub abs_bound: Bound,
    pub multi_channel_upper_2: Bound,
    pub multi_channel_upper: Bound,
}

impl BoundsReport {
    /// (name, bound) pairs in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, &Bound)> {
        vec![
            ("main12_upper", &self.main12_upper),
            ("main12_exact_b_eq_i", &self.main12_exact_b_eq_i),
            ("msest_upper", &self.msest_upper),
            ("beq1_identity", &self.beq1_identity),
            ("lpest1_upper", &self.lpest1_upper),
            ("lpest_upper", &self.lpest_upper),
            ("lpest_upper_squared", &self.lpest_upper_squared),
            ("mu_upper", &self.mu_upper),
            ("mu_lower", &self.mu_lower),
            ("abs_bound", &self.abs_bound),
            ("multi_channel_upper_2", &self.multi_channel_upper_2),
            ("multi_channel_upper", &self.multi_channel_upper),
        ]
    }
}

fn lmax(h: &ComplexMatrix) -> f64 {
    lambda_max_trusted(h)
}

/// λ_max(M + Mᴴ) = 2μ₂(M).
fn lmax_sym(m: &ComplexMatrix) -> f64 {
    2.0 * mu_square(m, NormKind::Two)
}

/// Evaluates every bound that applies to (sys, p, l).
pub fn bounds_report(sys: &SdeSystem, p: NormKind, l: u32) -> Result<BoundsReport> {
    validate_l(l)?;
    let lf = f64::from(l);
    let a = sys.drift();
    let n = sys.dim();
    let m = sys.channels();
    let zero = ComplexMatrix::zeros(n);
    // m = 0 is the single-channel formulas with B = 0
    let single: Option<&ComplexMatrix> = match m {
        0 => Some(&zero),
        1 => Some(&sys.diffusions()[0]),
        _ => None,
    };
    let mu_p = |x: &ComplexMatrix| mu_square(x, p);
    let mu_2 = |x: &ComplexMatrix| mu_square(x, NormKind::Two);
    let squares: Vec<ComplexMatrix> = sys.diffusions().iter().map(|b| b * b).collect();

    let main12 = single.filter(|_| p == NormKind::Two).map(|b| {
        let s = lmax_sym(b);
        let mut v = 0.5 * lf * lmax_sym(a)
            + 0.25 * lf * (s + lmax_sym(&-b))
            + 0.5 * lf * lmax(&b.adjoint().matmul(b).expect("square"));
        if l > 2 {
            v += lf * (lf - 2.0) / 8.0 * s * s;
        }
        v
    });

    let b_is_identity = m == 1 && sys.diffusions()[0].is_identity();
    let main12_exact =
        (p == NormKind::Two && b_is_identity).then(|| 0.5 * lf * lmax_sym(a) + 0.5 * lf + 0.5 * lf * (lf - 2.0));

    let msest = single.filter(|_| p == NormKind::Two).map(|b| {
        let nb = b.norm(NormKind::Two);
        let mut v = mu_2(a) + 0.5 * nb * nb + 0.5 * (mu_2(b) + mu_2(&-b));
        if l > 2 {
            v += 0.5 * (lf - 2.0) * mu_2(b).powi(2);
        }
        lf * v
    });

    let beq1 = (p == NormKind::Two && b_is_identity && l <= 2).then(|| match l {
        1 => mu_2(a),
        _ => 2.0 * mu_2(a) + 1.0,
    });

    let lpest1 = single.map(|b| {
        let nb = b.norm(p);
        lf * mu_p(a) + 0.5 * lf * mu_p(&-&(b * b)) + lf * (lf + 1.0) / 4.0 * nb * nb + lf * nb
    });
    let lpest = single.map(|b| {
        let nb = b.norm(p);
        lf * mu_p(a) + lf * nb * (1.0 + (lf + 3.0) / 4.0 * nb)
    });
    let lpest_sq = single.map(|b| {
        let nb = b.norm(p);
        lf * mu_p(a) + lf * (1.0 + (lf + 3.0) / 4.0 * nb).powi(2)
    });

    let spread: f64 = sys.diffusions().iter().map(|b| mu_p(b) + mu_p(&-b)).sum();
    let mu_upper = lf * mu_p(a) + 0.5 * lf * (squares.iter().map(|s| mu_p(&-s)).sum::<f64>() + spread);
    let mu_lower = lf * mu_p(a) - 0.5 * lf * (squares.iter().map(&mu_p).sum::<f64>() + spread);
    let abs_bound = lf * sys.ito_drift().norm(p) + lf * sys.diffusions().iter().map(|b| b.norm(p)).sum::<f64>();

    let multi2 = (p == NormKind::Two && l >= 2 && m > 1).then(|| {
        let b = sys.diffusions();
        lf * mu_2(a)
            + 0.5 * lf * b.iter().map(|x| x.norm(NormKind::Two).powi(2)).sum::<f64>()
            + 0.5 * lf * b.iter().map(|x| mu_2(x) + mu_2(&-x)).sum::<f64>()
            + 0.5 * lf * (lf - 2.0) * b.iter().map(|x| mu_2(x).powi(2)).sum::<f64>()
    });

    let multi = (m > 1).then(|| {
        let b = sys.diffusions();
        let mut total = ComplexMatrix::zeros(n);
        for x in b {
            total.add_scaled(1.0, x);
        }
        let mut cross = 0.0;
        for (i, bi) in b.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                if i != j {
                    cross += (bi * bj).norm(p);
                }
            }
        }
        lf * mu_p(a) - 0.5 * lf * mu_p(&total)
            + lf * b.iter().map(|x| x.norm(p)).sum::<f64>()
            + 0.5 * lf * b.iter().map(|x| x.norm(p).powi(2)).sum::<f64>()
            + lf / std::f64::consts::SQRT_2 * cross
    });

    Ok(BoundsReport {
        p,
        l,
        channels: m,
        main12_upper: Bound::new(
            "(l/2)λmax(A+Aᴴ) + (l/4)(λmax(B+Bᴴ) + λmax(−B−Bᴴ)) + (l/2)λmax(BᴴB) [+ (l(l−2)/8)λmax(B+Bᴴ)² if l>2]",
            "p = 2, m <= 1",
            main12,
        ),
        main12_exact_b_eq_i: Bound::new("(l/2)λmax(A+Aᴴ) + l/2 + l(l−2)/2", "p = 2, m = 1, B = I", main12_exact),
        msest_upper: Bound::new(
            "l(μ₂(A) + ½‖B‖₂² + ½(μ₂(B)+μ₂(−B)) [+ ((l−2)/2)μ₂(B)² if l>2])",
            "p = 2, m <= 1",
            msest,
        ),
        beq1_identity: Bound::new("l=1: μ₂(A); l=2: 2μ₂(A)+1", "p = 2, m = 1, B = I, l <= 2", beq1),
        lpest1_upper: Bound::new("lμ_p(A) + (l/2)μ_p(−B²) + (l(l+1)/4)‖B‖² + l‖B‖", "m <= 1", lpest1),
        lpest_upper: Bound::new("lμ_p(A) + l‖B‖(1 + ((l+3)/4)‖B‖)", "m <= 1", lpest),
        lpest_upper_squared: Bound::new("lμ_p(A) + l(1 + ((l+3)/4)‖B‖)²", "m <= 1", lpest_sq),
        mu_upper: Bound::new(
            "lμ_p(A) + (l/2)Σᵢ(μ_p(−Bᵢ²) + μ_p(Bᵢ) + μ_p(−Bᵢ))",
            "always",
            Some(mu_upper),
        ),
        mu_lower: Bound::new(
            "lμ_p(A) − (l/2)Σᵢ(μ_p(Bᵢ²) + μ_p(Bᵢ) + μ_p(−Bᵢ))",
            "always",
            Some(mu_lower),
        ),
        abs_bound: Bound::new("l‖A − ½ΣᵢBᵢ²‖_p + lΣᵢ‖Bᵢ‖_p", "always (bounds |ν|)", Some(abs_bound)),
        multi_channel_upper_2: Bound::new(
            "lμ₂(A) + (l/2)Σ‖Bⱼ‖₂² + (l/2)Σ(μ₂(Bⱼ)+μ₂(−Bⱼ)) + (l(l−2)/2)Σμ₂(Bᵢ)²",
            "p = 2, l >= 2, m > 1",
            multi2,
        ),
        multi_channel_upper: Bound::new(
            "lμ_p(A) − (l/2)μ_p(ΣBᵢ) + lΣ‖Bᵢ‖ + (l/2)Σ‖Bᵢ‖² + (l/√2)Σ_{i≠j}‖BᵢBⱼ‖",
            "m > 1",
            multi,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(a: ComplexMatrix, b: ComplexMatrix) -> SdeSystem {
        SdeSystem::single(a, b).unwrap()
    }

    #[test]
    fn scalar_case_hand_values() {
        // A = -100, B = 10, p = 2, l = 2
        let s = sys(
            ComplexMatrix::from_real_rows([[-100.0]]),
            ComplexMatrix::from_real_rows([[10.0]]),
        );
        let r = bounds_report(&s, NormKind::Two, 2).unwrap();
        assert_eq!(r.mu_upper.value, Some(-300.0));
        assert_eq!(r.mu_lower.value, Some(-300.0));
        assert_eq!(r.msest_upper.value, Some(-100.0));
        // (l/2)(-200) + (l/4)(20 - 20) + (l/2)(100)
        assert_eq!(r.main12_upper.value, Some(-100.0));
        assert_eq!(r.abs_bound.value, Some(2.0 * 150.0 + 2.0 * 10.0));
        assert_eq!(r.main12_exact_b_eq_i.value, None);
        assert_eq!(r.multi_channel_upper.value, None);
    }

    #[test]
    fn table_case_i_mu_bounds() {
        let s = sys(
            ComplexMatrix::from_real_rows([[-100.0, 0.0], [0.0, -1.0]]),
            ComplexMatrix::from_real_rows([[0.0, 2.0], [2.0, 0.0]]),
        );
        let r = bounds_report(&s, NormKind::Two, 2).unwrap();
        assert!((r.mu_upper.value.unwrap() + 2.0).abs() < 1e-12);
        assert!((r.mu_lower.value.unwrap() + 10.0).abs() < 1e-12);
    }

    #[test]
    fn zero_diffusion_collapses_to_l_mu() {
        let a = ComplexMatrix::from_real_rows([[-1.0, 3.0], [0.5, -2.0]]);
        for m in [0, 1] {
            let s = if m == 0 {
                SdeSystem::deterministic(a.clone()).unwrap()
            } else {
                sys(a.clone(), ComplexMatrix::zeros(2))
            };
            for p in NormKind::ALL {
                let r = bounds_report(&s, p, 3).unwrap();
                let target = 3.0 * mu_square(&a, p);
                for (name, b) in r.entries() {
                    // the squared form keeps its constant term l
                    if name == "lpest_upper_squared" || name == "abs_bound" {
                        continue;
                    }
                    if let Some(v) = b.value {
                        assert!((v - target).abs() < 1e-12, "{name}: {v} vs {target}");
                    }
                }
            }
        }
    }

    #[test]
    fn identity_diffusion_entries() {
        let a = ComplexMatrix::from_real_rows([[-2.0, 0.0], [0.0, -5.0]]);
        let s = sys(a, ComplexMatrix::identity(2));
        let r2 = bounds_report(&s, NormKind::Two, 2).unwrap();
        assert_eq!(r2.beq1_identity.value, Some(-3.0));
        assert_eq!(r2.main12_exact_b_eq_i.value, Some(-4.0 + 1.0));
        let r1 = bounds_report(&s, NormKind::Two, 1).unwrap();
        assert_eq!(r1.beq1_identity.value, Some(-2.0));
        let r3 = bounds_report(&s, NormKind::Two, 3).unwrap();
        assert_eq!(r3.beq1_identity.value, None);
        let rinf = bounds_report(&s, NormKind::Inf, 2).unwrap();
        assert_eq!(rinf.beq1_identity.value, None);
        assert_eq!(rinf.msest_upper.value, None);
    }

    #[test]
    fn multi_channel_entries_present() {
        let a = ComplexMatrix::from_real_rows([[-3.0, 1.0], [0.0, -2.0]]);
        let b1 = ComplexMatrix::from_real_rows([[0.5, 0.0], [0.1, 0.2]]);
        let b2 = ComplexMatrix::from_real_rows([[0.0, 0.3], [-0.3, 0.0]]);
        let s = SdeSystem::new(a, vec![b1, b2]).unwrap();
        let r = bounds_report(&s, NormKind::Two, 2).unwrap();
        assert!(r.multi_channel_upper.value.is_some());
        assert!(r.multi_channel_upper_2.value.is_some());
        assert!(r.main12_upper.value.is_none());
        assert!(r.lpest_upper.value.is_none());
        let r1 = bounds_report(&s, NormKind::One, 1).unwrap();
        assert!(r1.multi_channel_upper_2.value.is_none());
    }
}
