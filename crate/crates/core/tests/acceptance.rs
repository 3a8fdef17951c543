//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::process::ExitCode;

use common::{brute_force_distance, floor, planar_arm, tip_contact, tip_on_floor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slideplan::constraint::{ConstraintSet, ContactSpec, Mode};
use slideplan::geom::{distance_to_mesh, make_box, make_icosphere, Point3, TriMesh, Vector3};
use slideplan::planner::{solve, validate_path, Path, PlanResult, PlannerConfig, PlannerKind, PlanningProblem};
use slideplan::robot::Configuration;
use slideplan::sampler::{rng_from_seed, sample_constrained, sample_transition_modes, sample_uniform_configuration};
use slideplan::scenario::{build_constraint_graph, BUILTIN_NAMES};
use slideplan::Scenario;
use web_time::Instant;

const TOLERANCE: f64 = 1e-4;
const SEEDS: std::ops::Range<u64> = 0..10;
/// χ² quantiles at 0.99 for 2 and 8 degrees of freedom.
const CHI2_DF2: f64 = 9.210;
const CHI2_DF8: f64 = 20.090;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// A solved path together with the problem it must replay against.
struct Emitted {
    label: String,
    problem: PlanningProblem,
    tolerance: f64,
    path: Path,
}

#[derive(Default)]
struct Runs {
    results: Vec<PlanResult>,
}

impl Runs {
    fn successes(&self) -> usize {
        self.results.iter().filter(|r| r.solved()).count()
    }

    fn timeouts(&self) -> usize {
        self.results.len() - self.successes()
    }

    /// Median over every run; a timeout counts with its full elapsed time.
    fn median_time(&self) -> f64 {
        let mut t: Vec<f64> = self.results.iter().map(|r| r.time_s).collect();
        t.sort_by(f64::total_cmp);
        let n = t.len();
        if n % 2 == 1 {
            t[n / 2]
        } else {
            0.5 * (t[n / 2 - 1] + t[n / 2])
        }
    }

    /// Mean over successful runs.
    fn mean_time(&self) -> f64 {
        let t: Vec<f64> = self.results.iter().filter(|r| r.solved()).map(|r| r.time_s).collect();
        t.iter().sum::<f64>() / t.len().max(1) as f64
    }

    fn describe(&self) -> String {
        format!("{}/{} solved, median {:.3} s", self.successes(), self.results.len(), self.median_time())
    }
}

fn run(name: &str, kind: PlannerKind, budget: f64, emitted: &mut Vec<Emitted>) -> Runs {
    let s = Scenario::builtin(name).unwrap();
    let problem = s.problem();
    let config = PlannerConfig { time_budget: budget, ..s.planner_config() };
    let mut runs = Runs::default();
    for seed in SEEDS {
        let r = solve(&problem, kind, &config, seed).unwrap();
        if let Some(path) = r.path.clone() {
            emitted.push(Emitted {
                label: format!("{name}/{kind}/seed {seed}"),
                problem: problem.clone(),
                tolerance: config.goal_tolerance,
                path,
            });
        }
        runs.results.push(r);
    }
    runs
}

fn constraint_satisfaction() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for name in BUILTIN_NAMES {
        let s = Scenario::builtin(name).unwrap();
        let mut set = s.constraints().clone();
        let mut rng = rng_from_seed(1);
        let clock = Instant::now();
        let (mut ok, mut worst) = (0, 0.0f64);
        for _ in 0..10_000 {
            let smp = sample_constrained(&mut set, &mut rng).unwrap();
            if smp.success {
                ok += 1;
                worst = worst.max(smp.max_residual());
            }
        }
        let secs = clock.elapsed().as_secs_f64();
        pass &= ok > 0 && worst <= TOLERANCE && secs < 60.0;
        notes.push(format!("{name} {ok} ok, worst {worst:.2e}, {secs:.1} s"));
    }
    outcome(pass, notes.join("; "))
}

fn chi2(counts: &[usize], total: usize) -> f64 {
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

fn mode_uniformity() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (k, name) in BUILTIN_NAMES.iter().enumerate() {
        let mut set = Scenario::builtin(name).unwrap().constraints().clone();
        let slots: Vec<usize> = (0..set.len()).filter(|&i| set.specs()[i].is_transition()).collect();
        let mut counts = vec![[0usize; 3]; slots.len()];
        let mut rng = rng_from_seed(10 + k as u64);
        for _ in 0..9000 {
            let m = sample_transition_modes(&mut set, &mut rng);
            for (c, &i) in counts.iter_mut().zip(&slots) {
                c[m[i].index()] += 1;
            }
        }
        for c in &counts {
            let x = chi2(c, 9000);
            pass &= x < CHI2_DF2;
            notes.push(format!("{name} χ²={x:.2}"));
        }
    }

    // two transition contacts; modes as drawn before projection
    let chain = planar_arm(&[1.0, 1.0], vec![tip_contact(0, 0, 1.0), tip_contact(1, 1, 1.0)]);
    let f = floor();
    let specs = (0..2).map(|i| ContactSpec::transition(i, f.clone(), f.clone())).collect();
    let mut set = ConstraintSet::new(chain, specs, TOLERANCE).unwrap();
    let mut rng = rng_from_seed(3);
    let mut joint = [0usize; 9];
    let mut marginal = [[0usize; 3]; 2];
    for _ in 0..9000 {
        let m = sample_constrained(&mut set, &mut rng).unwrap().modes;
        joint[3 * m[0].index() + m[1].index()] += 1;
        marginal[0][m[0].index()] += 1;
        marginal[1][m[1].index()] += 1;
    }
    let xj = chi2(&joint, 9000);
    let (x0, x1) = (chi2(&marginal[0], 9000), chi2(&marginal[1], 9000));
    pass &= xj < CHI2_DF8 && x0 < CHI2_DF2 && x1 < CHI2_DF2;
    notes.push(format!("two specs χ²={x0:.2},{x1:.2} joint χ²={xj:.2}"));
    outcome(pass, notes.join("; "))
}

fn random_mesh(rng: &mut ChaCha8Rng, i: usize) -> TriMesh {
    let mut pt = |s: f64| Point3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s));
    match i % 3 {
        0 => {
            let c = pt(1.0);
            let h = pt(1.0).coords.abs() + Vector3::repeat(0.05);
            make_box(c, h).unwrap()
        }
        1 => make_icosphere(pt(1.0), 0.2 + pt(1.0).x.abs(), i % 4).unwrap(),
        _ => {
            let vertices: Vec<Point3> = (0..10).map(|_| pt(1.5)).collect();
            let faces = (0..8).map(|k| [k, k + 1, k + 2]).collect();
            TriMesh::new("soup", vertices, faces).unwrap()
        }
    }
}

fn distance_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    for i in 0..500 {
        let mesh = random_mesh(&mut rng, i);
        let p = Point3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if distance_to_mesh(&p, &mesh).unwrap().distance != brute_force_distance(&p, &mesh) {
            mismatches += 1;
        }
    }

    // the sphere of the sphere scenario
    let (center, r) = (Point3::new(0.0, 0.0, -0.5), 0.5);
    let sphere = make_icosphere(center, r, 3).unwrap();
    let mut widest: f64 = 0.0;
    for f in sphere.faces() {
        for k in 0..3 {
            let a = (sphere.vertices()[f[k]] - center).normalize();
            let b = (sphere.vertices()[f[(k + 1) % 3]] - center).normalize();
            widest = widest.max(a.dot(&b).clamp(-1.0, 1.0).acos());
        }
    }
    let edge_chord = r * (1.0 - (widest / 2.0).cos());
    // largest gap between a flat face and the sphere
    let face_gap = sphere
        .triangles()
        .map(|t| r - t.normal().dot(&(t.a - center)).abs())
        .fold(0.0, f64::max);
    let pole = center + Vector3::new(0.0, 0.0, 2.0 * r);
    let d_pole = distance_to_mesh(&pole, &sphere).unwrap().distance;
    let mut sphere_ok = (r - edge_chord..=r).contains(&d_pole);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let dir = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).normalize();
        let p = center + dir * rng.gen_range(1.05 * r..4.0 * r);
        let analytic = (p - center).norm() - r;
        let err = distance_to_mesh(&p, &sphere).unwrap().distance - analytic;
        worst = worst.max(err);
        sphere_ok &= err >= -1e-12 && err <= face_gap + 1e-12;
    }
    outcome(
        mismatches == 0 && sphere_ok,
        format!(
            "{mismatches}/500 mismatches; pole d={d_pole:.6} (edge chord {edge_chord:.2e}); worst excess {worst:.2e} ≤ face gap {face_gap:.2e}"
        ),
    )
}

fn projection_properties() -> Outcome {
    let mut pass = true;
    let (mut tried, mut succeeded, mut worst_drift, mut worst_residual) = (0, 0, 0.0f64, 0.0f64);
    let mut rng = rng_from_seed(5);
    for name in ["rect2dof", "rect7dof", "firstJointSliding", "lastJointSliding"] {
        let s = Scenario::builtin(name).unwrap();
        let set = s.constraints();
        let slots: Vec<usize> = (0..set.len()).filter(|&i| set.specs()[i].is_transition()).collect();
        for _ in 0..300 {
            let q = sample_uniform_configuration(set.chain(), &mut rng);
            let mut modes = set.modes();
            for &i in &slots {
                modes[i] = Mode::ALL[rng.gen_range(0..3)];
            }
            tried += 1;
            let p = set.project_with(&q, &modes).unwrap();
            if !p.success {
                continue;
            }
            succeeded += 1;
            let res = set.evaluate_with(&p.q, &modes).unwrap().amax();
            let again = set.project_with(&p.q, &modes).unwrap();
            worst_residual = worst_residual.max(res);
            worst_drift = worst_drift.max(again.q.distance(&p.q));
            pass &= res <= TOLERANCE && again.success && again.q.distance(&p.q) <= 1e-9;
        }
    }

    let set = tip_on_floor();
    let p = set.project(&Configuration::new(vec![0.3, 0.4])).unwrap();
    let step = 0.002;
    let n = (1.5 / step) as i32;
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for i in -n..=n {
        for j in -n..=n {
            let g = [0.3 + i as f64 * step, 0.4 + j as f64 * step];
            if (g[0].sin() + (g[0] + g[1]).sin()).abs() <= step {
                let d = (g[0] - 0.3).hypot(g[1] - 0.4);
                if d < best.0 {
                    best = (d, g);
                }
            }
        }
    }
    let gap = (p.q[0] - best.1[0]).hypot(p.q[1] - best.1[1]);
    pass &= p.success && gap <= 0.05;
    outcome(
        pass && succeeded > 0,
        format!(
            "{succeeded}/{tried} projected, worst residual {worst_residual:.2e}, worst re-projection drift {worst_drift:.1e}; grid gap {gap:.4} rad"
        ),
    )
}

fn constraint_graph() -> Outcome {
    let g = build_constraint_graph(2, 2).unwrap();
    let cycles = g.contains_path(&[&[1, 1], &[0, 1], &[2, 1]]) && g.contains_path(&[&[1, 1], &[1, 0], &[1, 2]]);
    let direct = g.edges().iter().any(|&(i, j)| {
        let (a, b) = (&g.states()[i], &g.states()[j]);
        a.iter().zip(b).any(|(x, y)| (*x == 1 && *y == 2) || (*x == 2 && *y == 1))
    });
    outcome(
        g.states().len() == 9 && cycles && !direct,
        format!("{} states, {} edges, cycles present: {cycles}, direct 1-2 edge: {direct}", g.states().len(), g.edges().len()),
    )
}

fn replay(emitted: &[Emitted]) -> Outcome {
    let mut failures = Vec::new();
    let mut fuzzed = 0;
    for e in emitted {
        if let Err(v) = validate_path(&e.problem, &e.path, e.tolerance) {
            failures.push(format!("{}: {v}", e.label));
            continue;
        }
        let mid = e.path.waypoints.len() / 2;
        let mut bent = e.path.clone();
        bent.waypoints[mid].q.as_mut_slice()[0] += 10.0 * e.tolerance + 0.1;
        if validate_path(&e.problem, &bent, e.tolerance).is_ok() {
            failures.push(format!("{}: perturbed waypoint {mid} accepted", e.label));
        }

        let slot = (0..e.problem.constraints.len())
            .find(|&i| e.problem.constraints.specs()[i].is_transition())
            .unwrap();
        let at = (1..e.path.waypoints.len())
            .rev()
            .find(|&i| e.path.waypoints[i].modes[slot] == Mode::Start)
            .unwrap_or(0);
        let mut jumped = e.path.clone();
        jumped.waypoints[at].modes[slot] = Mode::Goal;
        if validate_path(&e.problem, &jumped, e.tolerance).is_ok() {
            failures.push(format!("{}: 1→2 jump at waypoint {at} accepted", e.label));
        }
        fuzzed += 1;
    }
    let detail = if failures.is_empty() {
        format!("{} paths replayed, {fuzzed} × 2 corruptions rejected", emitted.len())
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty() && !emitted.is_empty(), detail)
}

fn main() -> ExitCode {
    let mut emitted = Vec::new();
    let mut lines: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |id: usize, title: &'static str, o: Outcome| {
        println!("[{}] {id:>2} {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        lines.push((id, title, o));
    };

    report(1, "constraint satisfaction", constraint_satisfaction());
    report(2, "mode uniformity", mode_uniformity());
    report(3, "distance oracle", distance_oracle());
    report(4, "projection properties", projection_properties());
    report(5, "constraint graph", constraint_graph());

    let r2_rrt = run("rect2dof", PlannerKind::Rrt, 2.0, &mut emitted);
    let r2_prm = run("rect2dof", PlannerKind::Prm, 2.0, &mut emitted);
    let ok = [&r2_rrt, &r2_prm].iter().all(|r| r.successes() >= 8 && r.median_time() < 1.0);
    report(6, "rect2dof", outcome(ok, format!("rrt {}; prm {}", r2_rrt.describe(), r2_prm.describe())));

    let r7_rrt = run("rect7dof", PlannerKind::Rrt, 20.0, &mut emitted);
    let r7_prm = run("rect7dof", PlannerKind::Prm, 20.0, &mut emitted);
    let ok = r7_rrt.successes() >= 7 && r7_prm.successes() >= 7;
    report(7, "rect7dof", outcome(ok, format!("rrt {}; prm {}", r7_rrt.describe(), r7_prm.describe())));

    let sp = run("sphere3dof", PlannerKind::Prm, 30.0, &mut emitted);
    let ratio = sp.mean_time() / r2_prm.mean_time();
    let ok = sp.successes() >= 7 && ratio >= 3.0;
    report(
        8,
        "sphere3dof",
        outcome(
            ok,
            format!("prm {}, mean {:.3} s = {ratio:.1}× rect2dof prm mean {:.3} s", sp.describe(), sp.mean_time(), r2_prm.mean_time()),
        ),
    );

    let mut ok = true;
    let mut notes = Vec::new();
    for kind in PlannerKind::ALL {
        let first = run("firstJointSliding", kind, 5.0, &mut emitted);
        let last = run("lastJointSliding", kind, 5.0, &mut emitted);
        ok &= first.median_time() < last.median_time() || last.timeouts() > first.timeouts();
        notes.push(format!("{kind}: first {} vs last {}", first.describe(), last.describe()));
    }
    report(9, "root placement asymmetry", outcome(ok, notes.join("; ")));

    report(10, "path replay", replay(&emitted));

    let failed: Vec<usize> = lines.iter().filter(|l| !l.2.pass).map(|l| l.0).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", lines.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
