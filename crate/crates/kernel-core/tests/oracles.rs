//! Independent oracles for the exact engine.

use kernel_core::families::{random_irreducible, random_multi_class};
use kernel_core::invariant::{generator_residual, null_space_dim};
use kernel_core::{
    absorbing_decomposition, invariant_measures, resolvent, semigroup, uniqueness_verdict,
    DiscreteMeasure, RateMatrix, Verdict,
};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// exp(tL) by Taylor series with scaling and squaring.
fn taylor_exp(l: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let n = l.nrows();
    let norm = (l * t).abs().row_sum().max();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let a = l * (t / 2f64.powi(squarings as i32));
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// α∫_0^T e^{-αt} P_t dt by composite Gauss–Legendre, with T making the tail < 1e-10.
fn quadrature_resolvent(l: &RateMatrix, alpha: f64) -> DMatrix<f64> {
    let n = l.n();
    let horizon = 24.0 / alpha;
    let panel = 0.25f64.min(1.0 / l.max_exit_rate().max(1.0));
    let panels = (horizon / panel).ceil() as usize;
    let h = horizon / panels as f64;
    let (xs, ws) = gauss_legendre(8);
    let mut acc = DMatrix::zeros(n, n);
    for p in 0..panels {
        let a = p as f64 * h;
        for (x, w) in xs.iter().zip(&ws) {
            let t = a + (x + 1.0) * h / 2.0;
            let pt = semigroup(l, t).unwrap();
            acc += pt.matrix() * (w * h / 2.0 * alpha * (-alpha * t).exp());
        }
    }
    acc
}

/// Stationary law by replacing one balance equation with normalization.
fn lu_stationary(l: &RateMatrix) -> Vec<f64> {
    let n = l.n();
    let mut a = l.matrix().transpose();
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu().solve(&b).unwrap().iter().copied().collect()
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
fn exact_rank(m: &[[i64; 3]; 3]) -> usize {
    let mut a = *m;
    let mut rank = 0;
    let mut prev = 1i64;
    for col in 0..3 {
        let Some(p) = (rank..3).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..3 {
            for c in col + 1..3 {
                a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
            }
            a[r][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
    }
    rank
}

fn sup(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

#[test]
fn semigroup_matches_series_and_closed_form() {
    let l2 = RateMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
    for &t in &[0.05, 0.7, 3.0, 12.0] {
        let p = semigroup(&l2, t).unwrap();
        let series = taylor_exp(l2.matrix(), t);
        assert!(sup(p.matrix(), &series) < 1e-12);
        assert!((series[(0, 0)] - (1.0 + (-2.0 * t).exp()) / 2.0).abs() < 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [3, 7, 15] {
        let l = random_irreducible(n, &mut rng);
        for &t in &[0.1, 1.0, 6.0] {
            let p = semigroup(&l, t).unwrap();
            assert!(sup(p.matrix(), &taylor_exp(l.matrix(), t)) < 1e-10, "n={n} t={t}");
        }
    }
}

#[test]
fn resolvent_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [2, 5] {
        let l = random_irreducible(n, &mut rng);
        for &alpha in &[0.5, 1.0, 4.0] {
            let r = resolvent(&l, alpha).unwrap();
            let q = quadrature_resolvent(&l, alpha);
            assert!(sup(r.matrix(), &q) < 1e-6, "n={n} α={alpha}: {}", sup(r.matrix(), &q));
        }
    }
}

#[test]
fn two_state_resolvent_symbolic() {
    // α(αI − L)^{-1} for L = [[-1,1],[1,-1]]: R(0,0) = (α+1)/(α+2).
    let l = RateMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
    for &alpha in &[0.1, 2.0, 1e3] {
        let r = resolvent(&l, alpha).unwrap();
        assert!((r.get(0, 0) - (alpha + 1.0) / (alpha + 2.0)).abs() < 1e-14);
    }
}

#[test]
fn irreducible_stationary_matches_linear_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let l = random_irreducible(10, &mut rng);
        let ms = invariant_measures(&l).unwrap();
        assert_eq!(ms.len(), 1);
        let oracle = lu_stationary(&l);
        let err = ms[0]
            .weights()
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "err {err}");
        assert_eq!(null_space_dim(&l), 1);
    }
}

#[test]
fn exhaustive_three_state_grid() {
    let mut checked = 0;
    for code in 0..3usize.pow(6) {
        let mut digits = code;
        let mut int = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    int[i][j] = (digits % 3) as i64;
                    digits /= 3;
                }
            }
            int[i][i] = -(int[i].iter().sum::<i64>());
        }
        let rows: Vec<Vec<f64>> = int.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        let l = RateMatrix::from_rows(&rows).unwrap();
        let exact_dim = 3 - exact_rank(&int);
        let ms = invariant_measures(&l).unwrap();
        assert_eq!(ms.len(), exact_dim, "generator {int:?}");
        assert_eq!(null_space_dim(&l), exact_dim, "svd, generator {int:?}");
        for mu in &ms {
            let res = generator_residual(&l, mu.weights());
            assert!(res <= 1e-10, "{int:?}: {res:e}");
        }
        checked += 1;
    }
    assert_eq!(checked, 729);
}

#[test]
fn absorbing_state_with_leak_is_unique() {
    let l = RateMatrix::from_rows(&[
        vec![-1.5, 1.0, 0.5],
        vec![1.0, -1.0, 0.0],
        vec![0.0, 0.0, 0.0],
    ])
    .unwrap();
    let report = uniqueness_verdict(&l, &DiscreteMeasure::dirac(3, 2), 1.0).unwrap();
    assert_eq!(report.verdict, Verdict::Unique);
    assert!(report.irreducible && report.domination_holds);
    assert_eq!(report.measures[0].weights(), &[0.0, 0.0, 1.0]);
}

#[test]
fn one_way_leak_into_closed_class_is_psi_irreducible() {
    use kernel_core::classes::reachable_from;
    use kernel_core::psi_irreducible;
    let a = RateMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
    let b = RateMatrix::from_rows(&[vec![-2.0, 2.0], vec![2.0, -2.0]]).unwrap();
    let mut m = RateMatrix::block_diagonal(&[a, b]).unwrap().matrix().clone();
    m[(0, 2)] = 0.3;
    m[(0, 0)] -= 0.3;
    let l = RateMatrix::new(m).unwrap();
    let psi = DiscreteMeasure::uniform_on(4, &[2, 3]).unwrap();
    let bfs = (0..4).all(|x| {
        let seen = reachable_from(&l, x);
        seen[2] && seen[3]
    });
    assert!(bfs);
    assert_eq!(psi_irreducible(&l, &psi).unwrap(), bfs);
    assert!(!psi_irreducible(&l, &DiscreteMeasure::counting(4)).unwrap());
}

#[test]
fn closed_class_count_equals_invariant_dim() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for k in 2..5 {
        let sizes: Vec<usize> = (0..k).map(|i| 1 + i % 3).collect();
        let lay = random_multi_class(&sizes, 2, &mut rng);
        let report = uniqueness_verdict(&lay.generator, &DiscreteMeasure::counting(lay.generator.n()), 1.0).unwrap();
        assert_eq!(report.invariant_dim, k);
        assert_eq!(report.verdict, Verdict::Multiple);
        let (x, y) = report.witness.unwrap();
        let class_of = |s: usize| lay.closed.iter().position(|c| c.contains(&s));
        assert_ne!(class_of(x), class_of(y));
    }
}

#[test]
fn two_class_decomposition_without_transients() {
    let a = RateMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
    let b = RateMatrix::from_rows(&[vec![-2.0, 2.0], vec![2.0, -2.0]]).unwrap();
    let l = RateMatrix::block_diagonal(&[a, b]).unwrap();
    let ms = invariant_measures(&l).unwrap();
    let d = absorbing_decomposition(&l, 1.0, &ms[0], &ms[1]).unwrap();
    assert_eq!(d.b_plus, vec![0, 1]);
    assert_eq!(d.b_minus, vec![2, 3]);
    assert!(d.residual.is_empty());
}
