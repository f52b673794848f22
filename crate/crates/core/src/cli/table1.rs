//! The nine benchmark systems and the values printed for them.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::matrix::ComplexMatrix;
use crate::mc::substream;
use crate::system::SdeSystem;

/// Published Lbound, ν₂² and Ubound for one case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Printed {
    pub lbound: f64,
    pub nu: f64,
    pub ubound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// Compared against the printed ν within max(1%, 3σ).
    Reference,
    /// Compared against the exact value of the direct formula.
    Exact,
    /// Printed ν disagrees with the direct formula.
    KnownDiscrepancy,
    /// Random system: run for timing only.
    Smoke,
}

pub struct Case {
    pub label: char,
    pub system: SdeSystem,
    pub printed: Printed,
    pub kind: CaseKind,
    /// Value the direct estimator is checked against.
    pub target: Option<f64>,
    pub note: Option<&'static str>,
}

pub const LABELS: [char; 9] = ['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i'];

/// Side length of the random case.
pub const RANDOM_DIM: usize = 100;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real2(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> SdeSystem {
    SdeSystem::single(ComplexMatrix::from_real_rows(a), ComplexMatrix::from_real_rows(b)).expect("2x2")
}

/// Upper block-triangular [[d1, off], [0, d2]] from 3×3 blocks.
fn block_upper(d1: [[f64; 3]; 3], off: [[f64; 3]; 3], d2: [[f64; 3]; 3]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(6);
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = c(d1[i][j], 0.0);
            m[(i, j + 3)] = c(off[i][j], 0.0);
            m[(i + 3, j + 3)] = c(d2[i][j], 0.0);
        }
    }
    m
}

fn random_case(seed: u64) -> SdeSystem {
    // stream index far from any Monte Carlo sample index
    let mut rng = substream(seed, u64::MAX);
    let n = RANDOM_DIM;
    let mut draw = || {
        let data: Vec<f64> = (0..n * n).map(|_| 100.0 * rng.random::<f64>()).collect();
        ComplexMatrix::from_real(n, n, &data).expect("finite")
    };
    let a = draw();
    let b = draw();
    SdeSystem::single(a, b).expect("square")
}

pub fn case(label: char, seed: u64) -> Option<Case> {
    let reference = |system, lbound, nu, ubound| Case {
        label,
        system,
        printed: Printed { lbound, nu, ubound },
        kind: CaseKind::Reference,
        target: Some(nu),
        note: None,
    };
    let case = match label {
        'a' => Case {
            kind: CaseKind::KnownDiscrepancy,
            target: Some(-225.0),
            note: Some(
                "printed value -104.70 disagrees with the direct formula; \
                 E max(-112.5 + 5ζ, -218 + 6ζ) = -112.5 since the second branch never dominates, \
                 so ν = -225",
            ),
            ..reference(
                real2([[-100.0, 0.0], [0.0, -200.0]], [[5.0, 0.0], [0.0, 6.0]]),
                -112.39,
                -104.70,
                -40.393,
            )
        },
        'b' => reference(
            real2([[-100.0, 0.0], [200.0, -200.0]], [[5.0, 2.0], [0.0, 6.0]]),
            -119.19,
            -114.68,
            -31.393,
        ),
        'c' => reference(
            real2([[-100.0, 20.0], [0.0, -200.0]], [[5.0, 2.0], [0.0, 6.0]]),
            -240.82,
            -224.15,
            -153.02,
        ),
        'd' => reference(
            SdeSystem::single(
                ComplexMatrix::from_rows([[c(-100.0, 20.0), c(0.0, 0.0)], [c(2.0, 0.0), c(-200.0, 1.0)]]),
                ComplexMatrix::from_rows([[c(5.0, 1.0), c(0.0, 0.0)], [c(0.0, 2.0), c(-6.0, -10.0)]]),
            )
            .expect("2x2"),
            -224.90,
            -223.54,
            -59.075,
        ),
        'e' => reference(
            real2([[-100.0, 20.0], [7.0, -200.0]], [[5.0, 2.0], [4.0, 6.0]]),
            -268.37,
            -232.32,
            -121.915,
        ),
        'f' => Case {
            kind: CaseKind::Exact,
            target: Some(-300.0),
            note: Some("direct formula is exactly -300; the printed -300.26 carries Monte Carlo error"),
            ..reference(
                SdeSystem::single(
                    ComplexMatrix::from_real_rows([[-100.0]]),
                    ComplexMatrix::from_real_rows([[10.0]]),
                )
                .expect("1x1"),
                -300.00,
                -300.26,
                -100.00,
            )
        },
        'g' => {
            let a = block_upper(
                [[0.1, 4.0, 20.0], [0.0, 0.1, 5.0], [0.0, 0.0, 0.1]],
                [
                    [2.2857e-2, -2.3547e-2, -6.8279e-2],
                    [9.3914e-2, -9.6719e-2, -2.8049e-1],
                    [2.8585e-1, -2.9443e-1, -8.5382e-1],
                ],
                [[-0.2, 3.0, 100.0], [0.0, -0.2, 50.0], [0.0, 0.0, -0.2]],
            );
            let b = block_upper(
                [[2.0, 30.0, 10.0], [0.0, 2.0, 50.0], [0.0, 0.0, 2.0]],
                [
                    [1.2606e-1, -4.6007e-1, 7.0963e-3],
                    [1.8156e-1, -6.6259e-1, 1.0235e-2],
                    [1.4481e-1, -5.2845e-1, 8.1625e-3],
                ],
                [[4.0, 6.0, 20.0], [0.0, 4.0, 40.0], [0.0, 0.0, 4.0]],
            );
            reference(SdeSystem::single(a, b).expect("6x6"), -918.52, 924.53, 4839.8)
        }
        'h' => Case {
            kind: CaseKind::Smoke,
            target: None,
            note: Some("random matrices with no reference seed; run for timing only"),
            ..reference(random_case(seed), -2.5191e7, 1.2369e5, 2.5330e7)
        },
        'i' => reference(
            real2([[-100.0, 0.0], [0.0, -1.0]], [[0.0, 2.0], [2.0, 0.0]]),
            -6.0,
            -5.91409,
            -2.0,
        ),
        _ => return None,
    };
    Some(case)
}

/// Acceptance rule for a reference case: within max(1%·|printed|, 3σ).
pub fn within_reference(value: f64, std_error: f64, target: f64) -> bool {
    (value - target).abs() <= (0.01 * target.abs()).max(3.0 * std_error)
}

/// Acceptance rule for an exact target: within 3σ, with a rounding floor
/// for zero-variance statistics.
pub fn within_exact(value: f64, std_error: f64, target: f64) -> bool {
    (value - target).abs() <= 3.0 * std_error + 1e-12 * target.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_cases_build() {
        for l in LABELS {
            let c = case(l, 42).unwrap();
            assert_eq!(c.label, l);
            assert_eq!(c.system.channels(), 1);
        }
        assert!(case('j', 0).is_none());
        assert_eq!(case('g', 0).unwrap().system.dim(), 6);
        assert_eq!(case('h', 0).unwrap().system.dim(), RANDOM_DIM);
    }

    #[test]
    fn random_case_depends_on_seed_only() {
        assert_eq!(case('h', 5).unwrap().system, case('h', 5).unwrap().system);
        assert_ne!(case('h', 5).unwrap().system, case('h', 6).unwrap().system);
    }

    #[test]
    fn tolerance_rules() {
        assert!(within_reference(-114.0, 0.01, -114.68));
        assert!(!within_reference(-110.0, 0.01, -114.68));
        assert!(within_reference(-110.0, 2.0, -114.68));
        assert!(within_exact(-300.0, 0.0, -300.0));
        assert!(!within_exact(-300.1, 0.0, -300.0));
    }
}
