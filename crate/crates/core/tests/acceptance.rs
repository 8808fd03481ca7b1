//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crystalquant::energy_model::{c6, c_n, Alpha, Precision, ALPHA_BAR};
use crystalquant::experiments::{halving_sequence, mixed_starts, LATTICE_SIGMA, TABLE1};
use crystalquant::geometry::{ConvexPolygon, Moments, Point2};
use crystalquant::laguerre::{laguerre_diagram, WeightedSite};
use crystalquant::lloyd_solver::{lloyd_step, solve, Init, SolveResult, SolverConfig};
use crystalquant::proof_verifier::run_all;
use crystalquant::quantization::{merge_delta, partition_energy_from_moments, Frame};
use crystalquant::stability::analyze;

// pinned tolerances
const VERIFY_MAX_SECONDS: f64 = 5.0;
const MIN_CLAIMS: usize = 30;
const TABLE_STARTS: usize = 8;
const RATIO_FLOOR: f64 = 0.999;
const RATIO_SLACK: f64 = 2e-3;
const TABLE_MAX_SECONDS: f64 = 1800.0;
const CRYSTAL_DELTA: f64 = 2.1107719443098e-4;
const CRYSTAL_EPSILON: f64 = 0.05;
const HEXAGON_FRACTION: f64 = 0.90;
const WINDOW_FRACTION: f64 = 0.80;
const MOMENT_SAMPLES: usize = 500;
const MOMENT_SLACK: f64 = 1e-10;
const MERGE_PAIRS: usize = 200;
const MERGE_REL: f64 = 1e-10;
const SQUARE_MOMENT_TOL: f64 = 1e-14;
const HEXAGON_MOMENT_TOL: f64 = 1e-12;
const PARALLEL_AXIS_SAMPLES: usize = 1000;
const PARALLEL_AXIS_REL: f64 = 1e-10;
const AREA_SAMPLES: usize = 200;
const AREA_REL: f64 = 1e-9;
const POSITION_RESIDUAL: f64 = 1e-8;
const MASS_RESIDUAL: f64 = 1e-8;
const HALVING_START: f64 = 2.1108e-4;
const HALVINGS: usize = 4;
const VOLUME_PER_PARTICLE_TOL: f64 = 0.05;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, o: &Outcome) -> bool {
    println!("criterion {id} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    o.pass
}

/// Convex polygon with `n` vertices on a random rotated ellipse.
fn random_convex(rng: &mut ChaCha8Rng, n: usize) -> ConvexPolygon {
    loop {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        angles.sort_by(f64::total_cmp);
        let (a, b) = (rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0));
        let rot = rng.gen_range(0.0..PI);
        let c = Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let pts: Vec<Point2> = angles
            .iter()
            .map(|t| {
                let (x, y) = (a * t.cos(), b * t.sin());
                c + Point2::new(x * rot.cos() - y * rot.sin(), x * rot.sin() + y * rot.cos())
            })
            .collect();
        if let Ok(p) = ConvexPolygon::new(pts) {
            if p.edge_count() == n && p.area() > 1e-3 {
                return p;
            }
        }
    }
}

/// `∫_P |x − p|²` by a fan of triangles rooted at `p`, with signed areas.
fn fan_moment(poly: &ConvexPolygon, p: Point2) -> f64 {
    poly.edges()
        .map(|(a, b)| {
            let (u, v) = (a - p, b - p);
            let t = u.cross(v) / 2.0;
            t / 6.0 * (u.norm2() + v.norm2() + u.dot(v))
        })
        .sum()
}

fn criterion_verifier() -> Outcome {
    let clock = Instant::now();
    let double = run_all(Precision::Double);
    let secs = clock.elapsed().as_secs_f64();
    let comp = run_all(Precision::Compensated);
    let same = double.claims.iter().zip(&comp.claims).all(|(a, b)| a.pass == b.pass);
    let failed: Vec<&str> = double.failures().map(|c| c.id.as_str()).collect();
    let thin = double.thin().count();
    Outcome {
        pass: double.all_pass && comp.all_pass && same && double.claims.len() >= MIN_CLAIMS && secs < VERIFY_MAX_SECONDS,
        detail: format!(
            "{} claims, {} failed {:?}, {} thin, modes agree {same}, {secs:.2}s",
            double.claims.len(),
            failed.len(),
            failed,
            thin
        ),
    }
}

struct TableRun {
    alpha: f64,
    delta: f64,
    paper: f64,
    runs: Vec<SolveResult>,
    best: usize,
}

fn run_table() -> (Vec<TableRun>, f64) {
    let clock = Instant::now();
    let dom = ConvexPolygon::unit_square();
    let rows = TABLE1
        .iter()
        .map(|&(alpha, delta, paper)| {
            let jobs = mixed_starts(Alpha::new(alpha).unwrap(), delta, TABLE_STARTS, 0);
            let runs: Vec<SolveResult> = jobs.iter().map(|c| solve(c, &dom).expect("solve")).collect();
            let best = (0..runs.len())
                .min_by(|&a, &b| runs[a].energy.total.total_cmp(&runs[b].energy.total).then(a.cmp(&b)))
                .unwrap();
            TableRun { alpha, delta, paper, runs, best }
        })
        .collect();
    (rows, clock.elapsed().as_secs_f64())
}

fn criterion_table(rows: &[TableRun], secs: f64) -> Outcome {
    let mut pass = secs < TABLE_MAX_SECONDS;
    let mut detail = Vec::new();
    for (k, r) in rows.iter().enumerate() {
        let best = &r.runs[r.best];
        let ratio = best.energy.rescaled_ratio;
        let ok = (RATIO_FLOOR..=r.paper + RATIO_SLACK).contains(&ratio);
        let lattice_starts = r.runs.iter().step_by(2).count();
        pass &= ok && r.runs.len() >= TABLE_STARTS && lattice_starts > 0;
        if k % 3 > 0 {
            let prev = rows[k - 1].runs[rows[k - 1].best].energy.rescaled_ratio;
            pass &= rows[k - 1].alpha == r.alpha && rows[k - 1].delta > r.delta && ratio < prev;
        }
        detail.push(format!("a={} d={:.3e} N={} {:.6}/{:.6}{}", r.alpha, r.delta, best.n_final(), ratio, r.paper, if ok { "" } else { "!" }));
    }
    Outcome { pass, detail: format!("{}; {secs:.1}s", detail.join(", ")) }
}

fn crystal_run(rows: &[TableRun]) -> &SolveResult {
    let row = rows
        .iter()
        .find(|r| r.alpha == ALPHA_BAR && r.delta == CRYSTAL_DELTA)
        .expect("row present");
    // slot 0 is the jittered-lattice start
    &row.runs[0]
}

fn criterion_crystal(run: &SolveResult) -> Outcome {
    let rep = analyze(&run.final_config.positions(), &run.final_config.domain, run.volume, CRYSTAL_EPSILON).unwrap();
    let hex = rep.hexagon_fraction();
    let win = rep.window_pass_fraction();
    Outcome {
        pass: run.converged && hex >= HEXAGON_FRACTION && win >= WINDOW_FRACTION,
        detail: format!(
            "converged {}, N={}, hexagons {}/{} ({hex:.3}), windows {win:.3}, eps_hat {:.2e}",
            run.converged, rep.n, rep.hexagon_interior, rep.interior_cells, rep.eps_hat
        ),
    }
}

fn criterion_moment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut violations = 0;
    let mut worst: f64 = f64::INFINITY;
    for _ in 0..MOMENT_SAMPLES {
        let n = rng.gen_range(3..=9);
        let poly = random_convex(&mut rng, n);
        let (lo, hi) = poly.bounding_box().unwrap();
        let p = Point2::new(rng.gen_range(lo.x - 1.0..hi.x + 1.0), rng.gen_range(lo.y - 1.0..hi.y + 1.0));
        let slack = poly.second_moment_about(p) - c_n(n as f64).unwrap() * poly.area().powi(2);
        worst = worst.min(slack);
        violations += usize::from(slack < -MOMENT_SLACK);
    }
    let mut equality: f64 = 0.0;
    for n in 3..=9 {
        let reg = ConvexPolygon::regular(n, 1.3, Point2::new(0.2, -0.1)).unwrap();
        let dev = reg.second_moment_about(Point2::new(0.2, -0.1)) - c_n(n as f64).unwrap() * 1.69;
        equality = equality.max(dev.abs());
    }
    Outcome {
        pass: violations == 0 && equality <= MOMENT_SLACK,
        detail: format!("{violations} violations in {MOMENT_SAMPLES}, min slack {worst:.3e}, regular deviation {equality:.2e}"),
    }
}

fn criterion_merge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    while pairs < MERGE_PAIRS {
        let alpha = Alpha::new(rng.gen_range(-1.0..0.95)).unwrap();
        let frame = if rng.gen_bool(0.5) {
            Frame::rescaled(alpha).unwrap()
        } else {
            Frame::physical(alpha, rng.gen_range(1e-4..1e-1)).unwrap()
        };
        let side = rng.gen_range(1.0..6.0);
        let dom = ConvexPolygon::unit_square().scale(side);
        let sites: Vec<WeightedSite> = (0..rng.gen_range(4..30))
            .map(|_| {
                WeightedSite::new(
                    Point2::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side)),
                    rng.gen_range(-0.05..0.05) * side * side,
                )
            })
            .collect();
        let Ok(d) = laguerre_diagram(&dom, &sites) else { continue };
        let edges: Vec<(usize, usize)> = d.adjacency.iter().copied().collect();
        if edges.is_empty() {
            continue;
        }
        let (i, j) = edges[rng.gen_range(0..edges.len())];
        let moments: Vec<Moments> = d
            .cells
            .iter()
            .map(|c| c.centroid().map(|g| c.moments_about(g)).unwrap_or_default())
            .collect();
        let before = partition_energy_from_moments(&moments, &dom, &frame).unwrap().total;
        let gi = d.cells[i].centroid().unwrap();
        let gj = d.cells[j].centroid().unwrap();
        let mid = gi.lerp(gj, 0.5);
        let merged = d.cells[i].moments_about(mid).merge(&d.cells[j].moments_about(mid)).unwrap();
        let mut after_regions: Vec<Moments> =
            moments.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, m)| *m).collect();
        after_regions.push(merged);
        let after = partition_energy_from_moments(&after_regions, &dom, &frame).unwrap().total;
        let direct = after - before;
        let formula = merge_delta(d.cells[i].area(), d.cells[j].area(), gi, gj, &frame).unwrap();
        worst = worst.max((formula - direct).abs() / direct.abs());
        pairs += 1;
    }
    Outcome { pass: worst <= MERGE_REL, detail: format!("{pairs} pairs, worst relative error {worst:.2e}") }
}

fn criterion_geometry() -> Outcome {
    let square = (ConvexPolygon::unit_square().central_second_moment() - 1.0 / 6.0).abs();
    let hexagon = (ConvexPolygon::regular(6, 1.0, Point2::ORIGIN).unwrap().central_second_moment() - c6()).abs();
    let c6_closed = (c6() - 5.0 / (18.0 * 3f64.sqrt())).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut parallel: f64 = 0.0;
    for _ in 0..PARALLEL_AXIS_SAMPLES {
        let n = rng.gen_range(3..=12);
        let poly = random_convex(&mut rng, n);
        let p = Point2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let g = poly.centroid().unwrap();
        let lhs = fan_moment(&poly, p);
        let rhs = poly.central_second_moment() + poly.area() * p.dist(g).powi(2);
        parallel = parallel.max((lhs - rhs).abs() / lhs.abs());
    }

    let mut area: f64 = 0.0;
    for _ in 0..AREA_SAMPLES {
        let sides = rng.gen_range(3..=8);
        let dom = random_convex(&mut rng, sides);
        let (lo, hi) = dom.bounding_box().unwrap();
        let scale = (hi - lo).norm2();
        let sites: Vec<WeightedSite> = (0..rng.gen_range(1..60))
            .map(|_| {
                WeightedSite::new(
                    Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y)),
                    rng.gen_range(-0.02..0.02) * scale,
                )
            })
            .collect();
        let d = laguerre_diagram(&dom, &sites).unwrap();
        let total: f64 = d.areas().iter().sum();
        area = area.max((total - dom.area()).abs() / dom.area());
    }
    Outcome {
        pass: square <= SQUARE_MOMENT_TOL
            && hexagon <= HEXAGON_MOMENT_TOL
            && c6_closed <= HEXAGON_MOMENT_TOL
            && parallel <= PARALLEL_AXIS_REL
            && area <= AREA_REL,
        detail: format!(
            "square {square:.1e}, hexagon {hexagon:.1e}, parallel axis {parallel:.1e}, area {area:.1e}"
        ),
    }
}

fn criterion_contracts(rows: &[TableRun]) -> Outcome {
    let mut runs = 0;
    let mut monotone = true;
    let mut converged = 0;
    let mut residual_ok = true;
    for run in rows.iter().flat_map(|r| &r.runs) {
        runs += 1;
        monotone &= run.trace_is_monotone();
        if !run.converged {
            continue;
        }
        converged += 1;
        let area = run.final_config.domain.area();
        let step = lloyd_step(&run.final_config).unwrap();
        residual_ok &= step.kept.len() == run.n_final()
            && step.max_move <= POSITION_RESIDUAL * area.sqrt()
            && step.max_mass_change <= MASS_RESIDUAL * area / run.n_final() as f64;
    }
    Outcome {
        pass: monotone && residual_ok,
        detail: format!("{runs} runs, traces monotone {monotone}, {converged} converged, residuals within bounds {residual_ok}"),
    }
}

fn criterion_asymptotics() -> Outcome {
    let dom = ConvexPolygon::unit_square();
    let mut trend = Vec::new();
    let mut last = f64::INFINITY;
    for delta in halving_sequence(HALVING_START, HALVINGS) {
        let cfg = SolverConfig::new(Alpha::bar(), delta, Init::LatticePerturbed { sigma: LATTICE_SIGMA });
        let r = solve(&cfg, &dom).unwrap();
        last = r.volume / r.n_final() as f64 - 1.0;
        trend.push(format!("V={:.0} N={} {:+.4}", r.volume, r.n_final(), last));
    }
    Outcome { pass: last.abs() <= VOLUME_PER_PARTICLE_TOL, detail: trend.join(", ") }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report(1, "verifier suite", &criterion_verifier());
    let (rows, secs) = run_table();
    ok &= report(2, "table reproduction", &criterion_table(&rows, secs));
    ok &= report(3, "crystallization", &criterion_crystal(crystal_run(&rows)));
    ok &= report(4, "moment lemma", &criterion_moment());
    ok &= report(5, "merge oracle", &criterion_merge());
    ok &= report(6, "geometry oracles", &criterion_geometry());
    ok &= report(7, "solver contracts", &criterion_contracts(&rows));
    ok &= report(8, "asymptotic trend", &criterion_asymptotics());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
