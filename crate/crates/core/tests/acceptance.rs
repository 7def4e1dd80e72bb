//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use newton_forge::ardn::{weight_upper_bound, weighted_directional_term, weighted_merit};
use newton_forge::jacobian::finite_difference_jacobian;
use newton_forge::linalg::norm2;
use newton_forge::pinl::{build_projectors, collect_training_data, Training};
use newton_forge::problems::{self, BenchmarkSpec, ConvectionDiffusion};
use newton_forge::{ardn_solve, inb_solve, pinl_solve, InnerSolver, NonlinearSystem, SolveReport, SolverOptions};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn within(value: usize, target: f64, band: f64) -> bool {
    let v = value as f64;
    v >= target * (1.0 - band) && v <= target * (1.0 + band)
}

fn inb(spec: &BenchmarkSpec, opts: &SolverOptions) -> SolveReport {
    inb_solve(&*spec.system, &spec.initial_guess, opts).expect("INB solve")
}

fn ardn(spec: &BenchmarkSpec, opts: &SolverOptions) -> SolveReport {
    ardn_solve(&*spec.system, &spec.initial_guess, opts).expect("ARDN solve")
}

fn brief(r: &SolveReport) -> String {
    format!("N_ite={} N_sta={} conv={}", r.n_ite, r.n_sta, r.converged)
}

/// Benchmarks at the smallest sizes used in the scalability table.
fn scalable_specs() -> Vec<(BenchmarkSpec, f64, f64)> {
    vec![
        (problems::modified_rosenbrock(60).unwrap(), 80.0, 55.0),
        (problems::augmented_rosenbrock(6000).unwrap(), 11.0, 10.0),
        (problems::tridiagonal(60).unwrap(), 77.0, 53.0),
        (problems::five_diagonal(100).unwrap(), 117.0, 49.0),
        (problems::tridimensional_valley(1200).unwrap(), 39.0, 32.0),
    ]
}

fn chemical_breakdown() -> Outcome {
    let spec = problems::chemical_equilibrium();
    let opts = SolverOptions { g_max: 36, ..spec.options.clone() };
    let start = Instant::now();
    let a = inb(&spec, &opts);
    let b = ardn(&spec, &opts);
    let secs = start.elapsed().as_secs_f64();
    let pass = !a.converged && a.n_ite == 200 && b.converged && b.n_ite <= 60 && b.n_sta < a.n_sta && secs < 1.0;
    Outcome::new(pass, format!("INB {} | ARDN {} | {secs:.3}s", brief(&a), brief(&b)))
}

fn learning_rate_robustness() -> Outcome {
    let spec = problems::chemical_equilibrium();
    let counts: Vec<usize> = [0.03, 0.06, 0.24, 1.00]
        .iter()
        .map(|&a| ardn(&spec, &SolverOptions { g_max: 12, initial_learning_rate: a, ..spec.options.clone() }).n_ite)
        .collect();
    let (lo, hi) = (*counts.iter().min().unwrap(), *counts.iter().max().unwrap());
    let pass = hi - lo <= 2 && counts.iter().all(|&c| within(c, 71.0, 0.5));
    Outcome::new(pass, format!("N_ite across alpha* = {counts:?} (target 71 +-50%, spread <= 2)"))
}

fn sigma_degeneracy() -> Outcome {
    let spec = problems::chemical_equilibrium();
    let opts = SolverOptions { g_max: 12, sigma1: 100.0, sigma2: 0.25, ..spec.options.clone() };
    let a = inb(&spec, &opts);
    let b = ardn(&spec, &opts);
    let pass = a.n_ite.abs_diff(b.n_ite) <= 2;
    Outcome::new(pass, format!("INB {} | ARDN(sigma1=100) {}", brief(&a), brief(&b)))
}

fn pinl_chemical() -> Outcome {
    let spec = problems::chemical_equilibrium();
    let base = SolverOptions { g_max: 36, pinl_training_size: 8, pinl_components: 2, ..spec.options.clone() };
    let r = pinl_solve(&*spec.system, &spec.initial_guess, &base, InnerSolver::Inb).expect("PIN^L solve");
    let phases = r.pinl.clone().expect("phases");
    let phase_ok = phases.training_iterations == 8
        && phases.subspace_converged
        && phases.subspace_iterations <= 20
        && r.converged
        && r.n_ite <= 62;

    let rows = [(6, 2), (7, 1), (7, 2), (8, 1), (8, 2), (9, 1), (10, 1), (16, 1), (16, 2)];
    let mut wins = 0;
    let mut table = Vec::new();
    for (s, d) in rows {
        let opts = SolverOptions { g_max: 42, pinl_training_size: s, pinl_components: d, ..spec.options.clone() };
        let plain = pinl_solve(&*spec.system, &spec.initial_guess, &opts, InnerSolver::Inb).expect("PIN^L");
        let mixed = pinl_solve(&*spec.system, &spec.initial_guess, &opts, InnerSolver::Ardn).expect("PIN^L+ARDN");
        if mixed.n_ite < plain.n_ite {
            wins += 1;
        }
        table.push(format!("({s},{d}):{}/{}", plain.n_ite, mixed.n_ite));
    }
    Outcome::new(
        phase_ok && wins >= 7,
        format!(
            "training={} subspace={} (converged={}) global {} | PIN^L+ARDN better in {wins}/9 [{}]",
            phases.training_iterations,
            phases.subspace_iterations,
            phases.subspace_converged,
            brief(&r),
            table.join(" ")
        ),
    )
}

fn convection_diffusion() -> Outcome {
    let mid = problems::convection_diffusion(100.0, 50).unwrap();
    let a = inb(&mid, &mid.options);
    let b = ardn(&mid, &mid.options);
    let mid_ok = b.n_ite < a.n_ite
        && 2 * b.n_sta <= a.n_sta
        && within(a.n_ite, 121.0, 0.5)
        && within(b.n_ite, 73.0, 0.5);

    let hard = problems::convection_diffusion(140.0, 50).unwrap();
    let c = inb(&hard, &hard.options);
    let d = ardn(&hard, &hard.options);
    let hard_ok = !c.converged && c.n_ite == 200 && d.converged;
    let slowest = [&a, &b, &c, &d].iter().map(|r| r.wall_time).fold(0.0, f64::max);
    Outcome::new(
        mid_ok && hard_ok && slowest < 60.0,
        format!(
            "C=100: INB {} ARDN {} | C=140: INB {} ARDN {} | slowest {slowest:.2}s",
            brief(&a),
            brief(&b),
            brief(&c),
            brief(&d)
        ),
    )
}

fn scalable_suite() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (spec, target_inb, target_ardn) in scalable_specs() {
        let a = inb(&spec, &spec.options);
        let b = ardn(&spec, &spec.options);
        let ok = a.converged
            && b.converged
            && b.n_ite <= a.n_ite
            && b.n_sta <= a.n_sta
            && within(a.n_ite, target_inb, 0.5)
            && within(b.n_ite, target_ardn, 0.5);
        pass &= ok;
        parts.push(format!(
            "{}{} {}/{} sta {}/{}",
            if ok { "" } else { "!" },
            spec.name,
            a.n_ite,
            b.n_ite,
            a.n_sta,
            b.n_sta
        ));
    }
    Outcome::new(pass, format!("INB/ARDN: {}", parts.join("; ")))
}

fn all_benchmarks() -> Vec<BenchmarkSpec> {
    let mut specs = vec![
        problems::chemical_equilibrium(),
        problems::convection_diffusion(100.0, 50).unwrap(),
        problems::convection_diffusion(140.0, 50).unwrap(),
    ];
    specs.extend(scalable_specs().into_iter().map(|(s, _, _)| s));
    specs
}

fn weight_bound() -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut pass = true;
    for spec in all_benchmarks() {
        let opts = &spec.options;
        let r = ardn(&spec, opts);
        let w0 = opts.initial_weight_vector(spec.system.dimension());
        let bound = weight_upper_bound(w0.iter().cloned().fold(0.0, f64::max), opts);
        for rec in &r.history {
            let (lo, hi) = (rec.weight_min.unwrap(), rec.weight_max.unwrap());
            pass &= lo >= 0.0 && hi <= bound;
            worst = worst.max(hi / bound);
            checked += 1;
        }
    }
    Outcome::new(pass, format!("{checked} iterations checked, max weight / bound = {worst:.4}"))
}

fn frozen_weights() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for spec in [problems::chemical_equilibrium(), problems::tridiagonal(60).unwrap()] {
        let a = inb(&spec, &spec.options);
        let b = ardn(&spec, &SolverOptions { freeze_weights: true, ..spec.options.clone() });
        let max_diff = a
            .final_point
            .iter()
            .zip(&b.final_point)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let same_path = a.residual_norms() == b.residual_norms();
        pass &= max_diff == 0.0 && same_path && a.n_ite == b.n_ite;
        parts.push(format!("{}: max |dx| = {max_diff:e}, identical history = {same_path}", spec.name));
    }
    Outcome::new(pass, parts.join("; "))
}

fn replay_conditions() -> Outcome {
    let mut steps = 0;
    let mut solves = 0;
    let mut bad = Vec::new();
    for spec in all_benchmarks() {
        let opts = SolverOptions { verify_linear_solves: true, ..spec.options.clone() };
        for r in [inb(&spec, &opts), ardn(&spec, &opts)] {
            for rec in &r.history {
                if rec.line_search_satisfied {
                    steps += 1;
                    let rhs = rec.merit_before + opts.armijo_alpha * rec.step_length * rec.directional_term;
                    if rec.merit_after > rhs {
                        bad.push(format!("{} {} k={} Armijo", spec.name, r.solver, rec.k));
                    }
                }
                if rec.gmres_relative_residual <= rec.forcing_term {
                    solves += 1;
                    let check = rec.linear_residual_check.expect("verification enabled");
                    if check > rec.forcing_term * (1.0 + 1e-6) {
                        bad.push(format!("{} {} k={} linear {check:e} > {:e}", spec.name, r.solver, rec.k, rec.forcing_term));
                    }
                }
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("{steps} accepted steps and {solves} linear solves replayed; violations: {bad:?}"),
    )
}

fn perturbations(x0: &[f64], rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut points = vec![x0.to_vec()];
    for _ in 0..5 {
        points.push(x0.iter().map(|&x| x + 0.1 * x.abs().max(1.0) * rng.gen_range(-1.0..1.0)).collect());
    }
    points
}

fn analytic_jacobian_column(system: &dyn NonlinearSystem, x: &[f64], j: usize) -> Vec<f64> {
    let n = system.dimension();
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    let mut col = vec![0.0; n];
    assert!(system.analytic_jacobian_product(x, &e, &mut col), "no analytic derivative");
    col
}

fn derivative_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let systems: Vec<(String, Box<dyn NonlinearSystem>, Vec<f64>)> = {
        let mut v: Vec<(String, Box<dyn NonlinearSystem>, Vec<f64>)> = vec![(
            "chemical".into(),
            Box::new(problems::ChemicalEquilibrium::with_analytic_jacobian()),
            vec![0.0; 5],
        )];
        for spec in [
            problems::convection_diffusion(100.0, 8).unwrap(),
            problems::modified_rosenbrock(20).unwrap(),
            problems::augmented_rosenbrock(20).unwrap(),
            problems::tridiagonal(20).unwrap(),
            problems::five_diagonal(20).unwrap(),
            problems::tridimensional_valley(21).unwrap(),
        ] {
            v.push((spec.name, spec.system, spec.initial_guess));
        }
        v
    };

    let mut worst_jac = 0.0f64;
    for (_, sys, x0) in &systems {
        for x in perturbations(x0, &mut rng) {
            let fd = finite_difference_jacobian(sys.as_ref(), &x).unwrap();
            let scale = fd.amax().max(1.0);
            for j in 0..sys.dimension() {
                let col = analytic_jacobian_column(sys.as_ref(), &x, j);
                for (i, v) in col.iter().enumerate() {
                    worst_jac = worst_jac.max((fd[(i, j)] - v).abs() / scale);
                }
            }
        }
    }

    let mut worst_slope = 0.0f64;
    for case in 0..20 {
        let (_, sys, x0) = &systems[case % systems.len()];
        let n = sys.dimension();
        let x: Vec<f64> = x0.iter().map(|&v| v + 0.2 * rng.gen_range(-1.0..1.0)).collect();
        let s: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let fx = sys.eval(&x);
        let mut js = vec![0.0; n];
        assert!(sys.analytic_jacobian_product(&x, &s, &mut js));
        let analytic = weighted_directional_term(Some(&w), &fx, &js);
        let h = 1e-6 / norm2(&s).max(1.0);
        let at = |t: f64| {
            let y: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a + t * b).collect();
            weighted_merit(Some(&w), &sys.eval(&y))
        };
        let fd = (at(h) - at(-h)) / (2.0 * h);
        worst_slope = worst_slope.max((fd - analytic).abs() / analytic.abs().max(1e-8));
    }

    Outcome::new(
        worst_jac <= 1e-4 && worst_slope <= 1e-4,
        format!("max Jacobian rel. error {worst_jac:.2e}; max merit-slope rel. error {worst_slope:.2e} (20 cases)"),
    )
}

fn grid_l2_truncation(c: f64, grid_n: usize) -> f64 {
    let sys = ConvectionDiffusion::new(c, grid_n).unwrap();
    let r = sys.eval(&sys.exact_samples());
    sys.mesh_width() * norm2(&r)
}

fn discretization_consistency() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for c in [0.0, 80.0] {
        let ratio = grid_l2_truncation(c, 25) / grid_l2_truncation(c, 50);
        pass &= (3.0..=5.0).contains(&ratio);
        parts.push(format!("C={c}: ratio {ratio:.3}"));
    }
    Outcome::new(pass, parts.join("; "))
}

fn top_eigen_energy(m: &DMatrix<f64>, d: usize) -> f64 {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.transpose() * m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.iter().take(d).sum()
}

fn projector_quality() -> Outcome {
    let spec = problems::chemical_equilibrium();
    let Training::Data(data) =
        collect_training_data(InnerSolver::Inb, &*spec.system, &spec.initial_guess, 8, &spec.options).unwrap()
    else {
        return Outcome::new(false, "chemical training converged early");
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let random = DMatrix::from_fn(200, 10, |_, _| rng.gen_range(-1.0..1.0));

    let mut orth = 0.0f64;
    let mut energy = 0.0f64;
    for (r, s, d) in [(&data.residuals, &data.solutions, 2), (&random, &random, 4)] {
        let training = newton_forge::pinl::TrainingData {
            residuals: r.clone(),
            solutions: s.clone(),
            ..data.clone()
        };
        let pair = build_projectors(&training, d).unwrap();
        for (basis, m) in [(&pair.p, r), (&pair.q, s)] {
            let gram = basis.transpose() * basis;
            orth = orth.max((gram - DMatrix::identity(d, d)).amax());
            let captured = (basis.transpose() * m).norm_squared();
            let oracle = top_eigen_energy(m, d);
            let svd: f64 = {
                let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
                sv.sort_by(|a, b| b.total_cmp(a));
                sv.iter().take(d).map(|v| v * v).sum()
            };
            energy = energy.max((captured - oracle).abs() / oracle).max((captured - svd).abs() / svd);
        }
    }
    Outcome::new(
        orth <= 1e-10 && energy <= 1e-8,
        format!("max |P^T P - I|, |Q^T Q - I| = {orth:.2e}; max energy rel. error {energy:.2e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("chemical g_max=36: INB stalls, ARDN converges fast", chemical_breakdown),
        ("chemical g_max=12: ARDN robust to alpha*", learning_rate_robustness),
        ("sigma1=100 collapses ARDN onto INB", sigma_degeneracy),
        ("PIN^L phases and PIN^L+ARDN gains on chemical", pinl_chemical),
        ("convection-diffusion C=100 and C=140 on 50x50", convection_diffusion),
        ("P1-P5 orderings and +-50% bands", scalable_suite),
        ("weight multipliers stay within their bound", weight_bound),
        ("frozen weights reproduce INB exactly", frozen_weights),
        ("Armijo and inexact Newton conditions replay", replay_conditions),
        ("analytic vs finite-difference derivatives", derivative_agreement),
        ("convection-diffusion truncation error is O(h^2)", discretization_consistency),
        ("PCA projectors orthonormal with optimal energy", projector_quality),
    ];

    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = Vec::new();
    for (i, (title, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        println!(
            "criterion {id:>2} {} {title} -- {} [{:.1}s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        if !outcome.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
