mod common;

use std::time::Instant;

use fracstiff::benchmarks::{self, Formulation, Ordering};
use fracstiff::linalg::{
    BandMatrix, Coupling, CouplingKind, DenseLu, DenseMatrix, HeadMatrix, Scalar, SparseRow, Structure,
};
use fracstiff::radau::LinearSolver;
use fracstiff::structured::{materialize_dense, reduced_head, ReducedHead, StructuredLu};
use fracstiff::{augment, BlockSpec, Error, LinalgMode, StructuredJacobian, StructuredSolver};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{random_instance, soe_from_terms};

fn inf_norm<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.modulus()).fold(0.0, f64::max)
}

fn compare<T: Scalar>(jac: &StructuredJacobian, mass: &[f64], s: T, rhs: &[T], mode: LinalgMode) -> f64 {
    let mut fast = rhs.to_vec();
    StructuredLu::factorize(jac, mass, s, mode).unwrap().solve_in_place(&mut fast).unwrap();
    let mut slow = rhs.to_vec();
    DenseLu::factor(materialize_dense(jac, mass, s, 5000).unwrap()).unwrap().solve_in_place(&mut slow);
    let diff: Vec<T> = fast.iter().zip(&slow).map(|(a, b)| *a - *b).collect();
    inf_norm(&diff) / inf_norm(&slow)
}

#[test]
fn random_instances_match_dense_lu() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let (jac, mass) = random_instance(&mut rng);
        let n = jac.total_dim();
        let s = rng.gen_range(0.1..5.0);
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let err = compare(&jac, &mass, s, &rhs, LinalgMode::DenseHead);
        assert!(err <= 1e-10, "real shift: {err:e}");

        let s = Complex64::new(rng.gen_range(0.1..5.0), rng.gen_range(-5.0..5.0));
        let rhs: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let err = compare(&jac, &mass, s, &rhs, LinalgMode::DenseHead);
        assert!(err <= 1e-10, "complex shift: {err:e}");
    }
}

fn single_block_jacobian(order: f64, weights: &[f64], exponents: &[f64]) -> StructuredJacobian {
    let alpha0 = order - order.ceil() + 1.0;
    let block = BlockSpec::new(order, soe_from_terms(alpha0, weights, exponents), 1).unwrap();
    let mut head = HeadMatrix::zeros(Structure::Dense, 1);
    head.set(0, 0, -1.0);
    let mut coupling = Coupling::zeros(CouplingKind::Dense, 1, 1);
    coupling.set(0, 0, 1.0);
    let mut g = SparseRow::zeros(0, 1);
    g.set(0, 1.0);
    StructuredJacobian { head, coupling, gradients: vec![g], blocks: vec![block].into() }
}

#[test]
fn block_response_single_exponential() {
    let jac = single_block_jacobian(0.5, &[2.0], &[3.0]);
    let lu = StructuredLu::factorize(&jac, &[1.0, 1.0], 1.0, LinalgMode::DenseHead).unwrap();
    assert_eq!(lu.chat(), &[0.5]);
}

#[test]
fn block_response_closed_forms() {
    let mut rng = StdRng::seed_from_u64(5);
    for m in 1..=3usize {
        for _ in 0..20 {
            let n = rng.gen_range(1..=8usize);
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..3.0)).collect();
            let mut g: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0f64..5.0).exp()).collect();
            g.sort_by(f64::total_cmp);
            let order = rng.gen_range(0.1..0.9) + (m - 1) as f64;
            let jac = single_block_jacobian(order, &c, &g);
            let prefactor = jac.blocks[0].prefactor();
            let s = Complex64::new(rng.gen_range(0.01..10.0), rng.gen_range(-10.0..10.0));
            let mass = vec![1.0; jac.total_dim()];
            let lu = StructuredLu::factorize(&jac, &mass, s, LinalgMode::DenseHead).unwrap();
            // ĉ = p Σ c_i (m-1)! (s + γ_i)^(-m)
            let fact: f64 = (1..m).map(|k| k as f64).product();
            let exact: Complex64 =
                c.iter().zip(&g).map(|(&ci, &gi)| (s + gi).powi(-(m as i32)) * ci * fact).sum::<Complex64>() * prefactor;
            let tol = if m == 1 { 1e-14 } else { 1e-13 };
            assert!((lu.chat()[0] - exact).norm() <= tol * exact.norm(), "m={m}");
        }
    }
}

#[test]
fn trivial_systems() {
    let mut head = HeadMatrix::zeros(Structure::Dense, 3);
    for i in 0..3 {
        head.set(i, i, -1.0);
    }
    let jac = StructuredJacobian {
        head,
        coupling: Coupling::zeros(CouplingKind::Dense, 3, 0),
        gradients: vec![],
        blocks: Vec::new().into(),
    };
    let lu = StructuredLu::factorize(&jac, &[1.0; 3], 1.0, LinalgMode::DenseHead).unwrap();
    let mut a = vec![2.0, -4.0, 6.0];
    lu.solve_in_place(&mut a).unwrap();
    assert_eq!(a, vec![1.0, -2.0, 3.0]);

    let mut rng = StdRng::seed_from_u64(1);
    let (jac, mass) = random_instance(&mut rng);
    let lu = StructuredLu::factorize(&jac, &mass, 2.0, LinalgMode::DenseHead).unwrap();
    let mut zero = vec![0.0; jac.total_dim()];
    lu.solve_in_place(&mut zero).unwrap();
    assert!(zero.iter().all(|&v| v == 0.0));
    let mut short = vec![0.0; jac.total_dim() + 1];
    assert!(matches!(lu.solve_in_place(&mut short), Err(Error::Dimension { .. })));
}

#[test]
fn materialized_arrow_pattern() {
    let jac = single_block_jacobian(0.5, &[2.0, 5.0], &[3.0, 7.0]);
    let s = 1.5;
    let a = materialize_dense(&jac, &[0.0, 1.0, 1.0], s, 10).unwrap();
    let expected = [[1.0, -2.0, -5.0], [-1.0, s + 3.0, 0.0], [-1.0, 0.0, s + 7.0]];
    for (i, row) in expected.iter().enumerate() {
        assert_eq!(a.row(i), row);
    }
    assert!(matches!(materialize_dense(&jac, &[0.0, 1.0, 1.0], s, 2), Err(Error::TooLarge { dim: 3, cap: 2 })));
}

#[test]
fn mode_and_singularity_errors() {
    let jac = single_block_jacobian(0.5, &[2.0], &[3.0]);
    assert!(matches!(
        StructuredLu::factorize(&jac, &[1.0, 1.0], 1.0, LinalgMode::FullDense),
        Err(Error::IncompatibleMode { .. })
    ));
    assert!(matches!(
        StructuredLu::factorize(&jac, &[1.0, 1.0], 1.0, LinalgMode::BandedHead),
        Err(Error::IncompatibleMode { .. })
    ));
    // algebraic row with no dependence on anything
    let mut singular = single_block_jacobian(0.5, &[2.0], &[3.0]);
    singular.head.set(0, 0, 0.0);
    singular.gradients[0].set(0, 0.0);
    assert!(matches!(
        StructuredLu::factorize(&singular, &[0.0, 1.0], 1.0, LinalgMode::DenseHead),
        Err(Error::Singular { pivot: 0 })
    ));
}

/// Dense Schur complement `A00 - A01 A11^(-1) A10` of the materialized matrix.
fn dense_schur(jac: &StructuredJacobian, mass: &[f64], s: f64) -> DenseMatrix<f64> {
    let a = materialize_dense(jac, mass, s, 5000).unwrap();
    let (d, n) = (jac.head_dim(), jac.total_dim());
    let mut tail = DenseMatrix::zeros(n - d, n - d);
    for i in d..n {
        for j in d..n {
            tail[(i - d, j - d)] = a[(i, j)];
        }
    }
    let lu = DenseLu::factor(tail).unwrap();
    let mut schur = DenseMatrix::zeros(d, d);
    for c in 0..d {
        let mut col: Vec<f64> = (d..n).map(|i| a[(i, c)]).collect();
        lu.solve_in_place(&mut col);
        for r in 0..d {
            let coupled: f64 = (d..n).map(|k| a[(r, k)] * col[k - d]).sum();
            schur[(r, c)] = a[(r, c)] - coupled;
        }
    }
    schur
}

fn banded_cases() -> Vec<(fracstiff::AugmentedSystem, Vec<f64>)> {
    let mut rng = StdRng::seed_from_u64(9);
    let problems = [
        benchmarks::pde1d(1.0 / 3.0, 5.0 / 3.0, 7).unwrap().ivp,
        benchmarks::pde1d(1.5, 5.0 / 3.0, 6).unwrap().ivp,
        benchmarks::reaction_diffusion(0.5, 4, Ordering::ByGridpoint).unwrap().ivp,
        benchmarks::reaction_diffusion(0.5, 4, Ordering::BySpecies).unwrap().ivp,
    ];
    problems
        .iter()
        .map(|p| {
            let sys = augment(p, 1e-2, 5.0).unwrap();
            let state: Vec<f64> = (0..sys.total_dim()).map(|_| rng.gen_range(0.0..1.0)).collect();
            (sys, state)
        })
        .collect()
}

#[test]
fn banded_reduction_keeps_bandwidths() {
    for (sys, state) in banded_cases() {
        let jac = sys.jacobian(0.7, &state);
        let HeadMatrix::Banded(head) = &jac.head else { panic!("expected a banded head") };
        let s = 3.0;
        let ReducedHead::Banded(reduced): ReducedHead<f64> =
            reduced_head(&jac, sys.mass(), s, LinalgMode::BandedHead).unwrap()
        else {
            panic!("expected a banded reduction")
        };
        assert_eq!((reduced.lower(), reduced.upper()), (head.lower(), head.upper()));
        let schur = dense_schur(&jac, sys.mass(), s);
        let scale = (0..schur.rows()).flat_map(|i| schur.row(i).to_vec()).map(f64::abs).fold(0.0, f64::max);
        for i in 0..schur.rows() {
            for j in 0..schur.cols() {
                let banded = if reduced.in_band(i, j) { reduced.get(i, j) } else { 0.0 };
                assert!((schur[(i, j)] - banded).abs() <= 1e-12 * scale, "({i},{j})");
            }
        }
    }
}

#[test]
fn banded_and_dense_head_modes_agree() {
    let mut rng = StdRng::seed_from_u64(4);
    for (sys, state) in banded_cases() {
        let jac = sys.jacobian(0.2, &state);
        let n = sys.total_dim();
        let s = Complex64::new(2.0, 1.5);
        let rhs: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.3)).collect();
        assert!(compare(&jac, sys.mass(), s, &rhs, LinalgMode::BandedHead) <= 1e-10);
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        assert!(compare(&jac, sys.mass(), 0.5, &rhs, LinalgMode::BandedHead) <= 1e-10);
    }
}

#[test]
fn example1_interior_step_matches_dense() {
    let b = benchmarks::example1(0.5, Formulation::Auto).unwrap();
    let sys = augment(&b.ivp, 1e-7, 1.0).unwrap();
    let mut rng = StdRng::seed_from_u64(2);
    let state: Vec<f64> = (0..sys.total_dim()).map(|_| rng.gen_range(0.0..0.3)).collect();
    let jac = sys.jacobian(0.5, &state);
    let rhs: Vec<f64> = (0..sys.total_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    for s in [0.3, 40.0, 1e4] {
        assert!(compare(&jac, sys.mass(), s, &rhs, LinalgMode::DenseHead) <= 1e-12, "s={s}");
    }
}

#[test]
fn solver_handle_in_all_modes() {
    let b = benchmarks::multiterm(0.5).unwrap();
    let sys = augment(&b.ivp, 1e-3, 10.0).unwrap();
    let jac = sys.jacobian(1.0, sys.y0());
    let n = sys.total_dim();
    let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
    let shift = Complex64::new(2.0, 3.0);
    let mut results = Vec::new();
    for mode in [LinalgMode::FullDense, LinalgMode::DenseHead] {
        let mut solver = StructuredSolver::new(mode);
        solver.factorize(&jac, sys.mass(), 4.0, shift).unwrap();
        let mut x = rhs.clone();
        solver.solve_real(&mut x);
        let (mut re, mut im) = (rhs.clone(), vec![0.5; n]);
        solver.solve_complex(&mut re, &mut im);
        results.push((x, re, im));
    }
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-10 * (1.0 + y.abs()));
    assert!(close(&results[0].0, &results[1].0));
    assert!(close(&results[0].1, &results[1].1));
    assert!(close(&results[0].2, &results[1].2));

    let mut capped = StructuredSolver::new(LinalgMode::FullDense).with_dense_cap(10);
    assert!(matches!(capped.factorize(&jac, sys.mass(), 4.0, shift), Err(Error::TooLarge { .. })));
}

/// Best of several timed batches of factorize + solve.
fn time_solves(jac: &StructuredJacobian, mass: &[f64], mode: LinalgMode, reps: usize) -> f64 {
    let n = jac.total_dim();
    let mut best = f64::INFINITY;
    for _ in 0..7 {
        let start = Instant::now();
        for r in 0..reps {
            let s = Complex64::new(2.0 + r as f64 * 1e-3, 1.0);
            let lu = StructuredLu::factorize(jac, mass, s, mode).unwrap();
            let mut a = vec![Complex64::new(1.0, 0.0); n];
            lu.solve_in_place(&mut a).unwrap();
            std::hint::black_box(&a);
        }
        best = best.min(start.elapsed().as_secs_f64());
    }
    best
}

fn tail_heavy(d: usize, n_exp: usize) -> (StructuredJacobian, Vec<f64>) {
    let mut head = HeadMatrix::zeros(Structure::Dense, d);
    for i in 0..d {
        head.set(i, i, -2.0);
    }
    let weights = vec![0.5; n_exp];
    let exponents: Vec<f64> = (0..n_exp).map(|i| (i as f64 * 0.01).exp()).collect();
    let mut coupling = Coupling::zeros(CouplingKind::Dense, d, d);
    let mut gradients = Vec::new();
    let mut blocks = Vec::new();
    let kernel = soe_from_terms(0.5, &weights, &exponents);
    for j in 0..d {
        coupling.set(j, j, 1.0);
        let mut g = SparseRow::zeros(0, d);
        g.set(j, 1.0);
        gradients.push(g);
        blocks.push(BlockSpec::new(0.5, kernel.clone(), d + j * n_exp).unwrap());
    }
    let mass = vec![1.0; d + d * n_exp];
    (StructuredJacobian { head, coupling, gradients, blocks: blocks.into() }, mass)
}

#[test]
fn cost_is_linear_in_the_tail() {
    let (small, m1) = tail_heavy(4, 20_000);
    let (large, m2) = tail_heavy(4, 40_000);
    let t1 = time_solves(&small, &m1, LinalgMode::DenseHead, 5);
    let t2 = time_solves(&large, &m2, LinalgMode::DenseHead, 5);
    let ratio = t2 / t1;
    assert!((1.0..=3.0).contains(&ratio), "doubling D: ratio {ratio:.2}");
}

#[test]
fn banded_cost_is_linear_in_the_grid() {
    let jac_for = |d: usize| {
        let p = benchmarks::pde1d(1.0 / 3.0, 5.0 / 3.0, d).unwrap().ivp;
        let sys = augment(&p, 1e-6, 1000.0).unwrap();
        let jac = sys.jacobian(1.0, sys.y0());
        (jac, sys.mass().to_vec())
    };
    let (j1, m1) = jac_for(2000);
    let (j2, m2) = jac_for(4000);
    let t1 = time_solves(&j1, &m1, LinalgMode::BandedHead, 3);
    let t2 = time_solves(&j2, &m2, LinalgMode::BandedHead, 3);
    let ratio = t2 / t1;
    assert!((1.0..=3.0).contains(&ratio), "doubling d: ratio {ratio:.2}");
}

#[test]
fn band_storage_round_trip() {
    let mut b = BandMatrix::<f64>::zeros(5, 1, 2);
    b.set(2, 1, 3.0);
    b.set(2, 4, -1.0);
    let dense = b.to_dense();
    assert_eq!(dense[(2, 1)], 3.0);
    assert_eq!(dense[(2, 4)], -1.0);
    assert_eq!(dense[(4, 0)], 0.0);
}
