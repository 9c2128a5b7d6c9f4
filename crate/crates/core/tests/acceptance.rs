//! Acceptance suite: one PASS/FAIL line per criterion, tolerances as specified.
//!
//! Run with `cargo test -p tempered-geometry --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tempered_geometry::cli;
use tempered_geometry::diffapprox::{
    diff_hilbert_gradient_values, diff_hilbert_values, lse_error_bounds, lse_t,
    random_cosimplex_values, relative_error_histogram, SmoothingConfig,
};
use tempered_geometry::embed::{
    generate_dataset, optimize_embedding, sample_in_geometry, DatasetSource, EmbedConfig,
    GeometryKind,
};
use tempered_geometry::hypmodels::{
    fractional_point, klein_distance, klein_to_poincare, poincare_distance, tempered_klein,
    tempered_poincare, DiskPoint, Model,
};
use tempered_geometry::tcalculus::{
    const_t_derivative_solution, const_t_second_derivative_solution, t_derivative,
    t_geodesic_point, t_integral_numeric, t_length, Curve,
};
use tempered_geometry::temparam::{
    constrained_dual, constrained_link, lagrange_lambda, minimal_dual, minimal_inverse_link,
    minimal_link, natural_inverse_link, natural_link, normal, tangent_projection, tempered_softmax,
    tempered_softmax_raw, unconstrained_dual, NaturalParams,
};
use tempered_geometry::tgeometry::{
    check_contraction, coarse_grain, isometry_constrained, isometry_unconstrained,
    t_funk_cosimplex, t_funk_domain, t_hilbert_cosimplex, t_hilbert_domain, t_hilbert_raw,
    ConvexDomain,
};
use tempered_geometry::{exp_t, log_t, t_add, t_sub, CoSimplexPoint, Temperature};

fn temp(t: f64) -> Temperature {
    Temperature::new(t).unwrap()
}

struct Outcome {
    checks: Vec<(String, bool)>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { checks: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    fn within(&mut self, label: &str, elapsed: Duration, limit_secs: u64) {
        self.check(
            format!("{label} {:.1}s ≤ {limit_secs}s", elapsed.as_secs_f64()),
            elapsed.as_secs() < limit_secs,
        );
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// A lifted flat-Dirichlet draw; for temperatures near 2 the lift underflows the
/// co-simplex floor, and the point is projected from a bounded raw vector instead.
fn random_point(rng: &mut impl Rng, d: usize, t: Temperature) -> CoSimplexPoint {
    for _ in 0..8 {
        if let Ok(p) = CoSimplexPoint::new(random_cosimplex_values(rng, d, t), t) {
            return p;
        }
    }
    let raw: Vec<f64> = (0..d).map(|_| rng.random_range(0.01..1.0)).collect();
    CoSimplexPoint::from_raw(&raw, t).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Central differences of `f` at the positive vector `x`, stepping each coordinate by
/// `rel · x_i` so small components are not stepped across zero.
fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], rel: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = rel * x[i];
            y[i] = x[i] + h;
            let up = f(&y);
            y[i] = x[i] - h;
            let down = f(&y);
            y[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // unit-scale inputs: for t near 2, ratios far from 1 put ⊖ intermediates next to the pole,
    // where 1 + (1−t)y cancels and relative agreement degrades past 1e-12
    let draw = |rng: &mut ChaCha8Rng| 10f64.powf(rng.random_range(-1.0..1.0));
    for t in [0.5, 0.8, 1.0, 1.2, 1.5, 1.999] {
        let tp = temp(t);
        let (mut round, mut prod, mut quot, mut assoc, mut neutral, mut comp) = (0, 0, 0, 0, 0, 0);
        for _ in 0..100_000 {
            let (a, b, c, w) = (
                draw(&mut rng),
                draw(&mut rng),
                draw(&mut rng),
                draw(&mut rng),
            );
            let (la, lb, lc, lw) = (
                log_t(a, tp).unwrap(),
                log_t(b, tp).unwrap(),
                log_t(c, tp).unwrap(),
                log_t(w, tp).unwrap(),
            );
            let scale = |v: f64| 1e-12 * v.abs().max(1.0);
            if (exp_t(la, tp) - a).abs() > 1e-12 * a.max(1.0) {
                round += 1;
            }
            let ab = log_t(a * b, tp).unwrap();
            if (t_add(la, lb, tp).unwrap() - ab).abs() > scale(ab) {
                prod += 1;
            }
            let q = log_t(a / b, tp).unwrap();
            if (t_sub(la, lb, tp).unwrap() - q).abs() > scale(q) {
                quot += 1;
            }
            let left = t_add(t_add(la, lb, tp).unwrap(), lc, tp).unwrap();
            let right = t_add(la, t_add(lb, lc, tp).unwrap(), tp).unwrap();
            if (left - right).abs() > scale(left) {
                assoc += 1;
            }
            if t_add(la, 0.0, tp).unwrap() != la || t_sub(la, la, tp).unwrap().abs() > scale(la) {
                neutral += 1;
            }
            // (x ⊖ w) ⊖ (y ⊖ z) = x ⊖ w ⊖ y ⊕ z with x = a, y = b, z = c
            let lhs = t_sub(t_sub(la, lw, tp).unwrap(), t_sub(lb, lc, tp).unwrap(), tp).unwrap();
            let rhs = t_add(t_sub(t_sub(la, lw, tp).unwrap(), lb, tp).unwrap(), lc, tp).unwrap();
            if (lhs - rhs).abs() > scale(lhs) {
                comp += 1;
            }
        }
        out.check(
            format!("t={t}: round {round}, sum-product {prod}, quotient {quot}, associativity {assoc}, neutral {neutral}, composition {comp} failures"),
            round + prod + quot + assoc + neutral + comp == 0,
        );
    }
    let mut worst: f64 = 0.0;
    for off in [1e-8, -1e-8, 1e-9, -1e-9] {
        for x in [1e-3, 0.5, 2.0, 1e3] {
            worst = worst.max((log_t(x, temp(1.0 + off)).unwrap() - x.ln()).abs());
        }
    }
    out.check(format!("t→1 continuity {worst:.1e} ≤ 1e-6"), worst <= 1e-6);
    out.within("runtime", start.elapsed(), 10);
    out
}

/// Worst relative gap between each dual's finite-difference gradient and its inverse link.
/// Steps shrink with the distance `|1 + (1−t)θ|` to the pole of `exp_t`.
fn dual_gradient_error(
    minimal: &[f64],
    natural: &[f64],
    constrained: &[f64],
    tp: Temperature,
) -> f64 {
    let fd = |f: &dyn Fn(&[f64]) -> f64, x: &[f64]| -> Vec<f64> {
        let mut y = x.to_vec();
        (0..x.len())
            .map(|i| {
                let h = 1e-5 * (1.0 + tp.one_minus() * x[i]).abs().min(1.0);
                y[i] = x[i] + h;
                let up = f(&y);
                y[i] = x[i] - h;
                let down = f(&y);
                y[i] = x[i];
                (up - down) / (2.0 * h)
            })
            .collect()
    };
    let rel = |fd: &[f64], g: &[f64]| max_abs_diff(fd, g) / max_abs(g);
    let g = minimal_inverse_link(minimal, tp).unwrap();
    let e1 = rel(
        &fd(&|x| minimal_dual(x, tp).unwrap(), minimal),
        &g.values()[..minimal.len()],
    );
    let unconstrained = |x: &[f64]| {
        unconstrained_dual(&NaturalParams {
            theta: x.to_vec(),
            temp: tp,
        })
        .unwrap()
    };
    let g: Vec<f64> = natural.iter().map(|&x| exp_t(x, tp)).collect();
    let e2 = rel(&fd(&unconstrained, natural), &g);
    let g = tempered_softmax_raw(constrained, tp).unwrap();
    let e3 = rel(&fd(&|x| constrained_dual(x, tp).unwrap(), constrained), &g);
    e1.max(e2).max(e3)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut round, mut grad, mut shift, mut proj) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for t in [0.5, 0.8, 1.0, 1.2, 1.5] {
        let tp = temp(t);
        for d in [2, 3, 8, 64] {
            for _ in 0..20 {
                let p = random_point(&mut rng, d, tp);
                let m = minimal_link(&p);
                let back = minimal_inverse_link(&m.theta_hat, tp).unwrap();
                round = round.max(max_abs_diff(back.values(), p.values()));
                let n = natural_link(&p);
                round = round.max(max_abs_diff(
                    natural_inverse_link(&n).unwrap().values(),
                    p.values(),
                ));
                let c = constrained_link(&p);
                let soft = tempered_softmax(&c.theta_check, tp).unwrap();
                round = round.max(max_abs_diff(soft.values(), p.values()));

                if d <= 8 {
                    grad = grad.max(dual_gradient_error(
                        &m.theta_hat,
                        &n.theta,
                        &c.theta_check,
                        tp,
                    ));
                }
                let mut unit = |k: usize| -> Vec<f64> {
                    (0..k).map(|_| rng.random_range(-1.0..1.0)).collect()
                };
                let (a, b, c2) = (unit(d - 1), unit(d), unit(d));
                grad = grad.max(dual_gradient_error(&a, &b, &c2, tp));

                let nrm = normal(&p);
                let r = rng.random_range(-0.5..0.5) / max_abs(&nrm);
                let moved: Vec<f64> = c
                    .theta_check
                    .iter()
                    .zip(&nrm)
                    .map(|(x, n)| x + r * n)
                    .collect();
                if let Ok(s) = tempered_softmax(&moved, tp) {
                    shift = shift.max(max_abs_diff(s.values(), p.values()));
                }

                let pm = tangent_projection(&p);
                for i in 0..d {
                    let row_theta: f64 = (0..d).map(|j| pm[i][j] * c.theta_check[j]).sum();
                    proj = proj.max((row_theta - c.theta_check[i]).abs());
                    for j in 0..d {
                        let pp: f64 = (0..d).map(|k| pm[i][k] * pm[k][j]).sum();
                        proj = proj.max((pp - pm[i][j]).abs());
                    }
                }
            }
        }
    }
    out.check(
        format!("link round trips {round:.1e} ≤ 1e-9"),
        round <= 1e-9,
    );
    out.check(
        format!("dual gradients vs finite differences {grad:.1e} ≤ 1e-6"),
        grad <= 1e-6,
    );
    out.check(
        format!("softmax shift invariance {shift:.1e} ≤ 1e-9"),
        shift <= 1e-9,
    );
    out.check(
        format!("projector idempotence and fixed point {proj:.1e} ≤ 1e-9"),
        proj <= 1e-9,
    );

    let mut lam: f64 = 0.0;
    for t in [0.5, 0.8, 1.2, 1.5] {
        for d in [2, 5, 64] {
            let u = CoSimplexPoint::uniform(d, temp(t)).unwrap();
            let c = u.values()[0];
            lam = lam.max((lagrange_lambda(&u) - log_t(1.0 / c, temp(t)).unwrap()).abs());
        }
    }
    out.check(
        format!("uniform multiplier closed form {lam:.1e} ≤ 1e-6"),
        lam <= 1e-6,
    );
    let mut geo: f64 = 0.0;
    for _ in 0..50 {
        let probs = {
            let p = random_point(&mut rng, 6, Temperature::ONE);
            p.values().to_vec()
        };
        let want = -probs.iter().map(|v| v.ln()).sum::<f64>() / probs.len() as f64;
        for t in [1.0, 1.0 + 1e-8, 1.0 - 1e-8] {
            let p = CoSimplexPoint::from_probability(&probs, temp(t)).unwrap();
            geo = geo.max((lagrange_lambda(&p) - want).abs());
        }
    }
    out.check(
        format!("t=1 log-inverse geometric mean limit {geo:.1e} ≤ 1e-6"),
        geo <= 1e-6,
    );
    out.within("runtime", start.elapsed(), 30);
    out
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut asym, mut proj) = (0usize, 0.0f64);
    // co-simplex points at t = 1.9 fall below the interior floor once d ≳ 15
    for t in [0.5, 0.8, 1.0, 1.2, 1.5, 1.7] {
        let tp = temp(t);
        for _ in 0..2000 {
            let d = rng.random_range(2..=16);
            let p = random_point(&mut rng, d, tp);
            let q = random_point(&mut rng, d, tp);
            if t_hilbert_cosimplex(&p, &q).unwrap() != t_hilbert_cosimplex(&q, &p).unwrap() {
                asym += 1;
            }
            let k = 10f64.powf(rng.random_range(-3.0..3.0));
            let kq: Vec<f64> = q.values().iter().map(|v| k * v).collect();
            let kp: Vec<f64> = p.values().iter().map(|v| k * v).collect();
            proj = proj.max(t_hilbert_raw(p.values(), &kp, tp)).max(
                (t_hilbert_raw(p.values(), &kq, tp) - t_hilbert_cosimplex(&p, &q).unwrap()).abs(),
            );
        }
    }
    out.check(format!("symmetry: {asym} inexact pairs"), asym == 0);
    out.check(format!("projectivity {proj:.1e} ≤ 1e-10"), proj <= 1e-10);

    let triples: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..10_000)
        .map(|_| {
            let d = rng.random_range(2..=8);
            let mut raw = || {
                (0..d)
                    .map(|_| rng.random_range(0.01..1.0))
                    .collect::<Vec<f64>>()
            };
            (raw(), raw(), raw())
        })
        .collect();
    let slack = |v: f64| 1e-12 * (1.0 + v.abs());
    for t in [1.0, 1.2, 1.5, 1.9] {
        let tp = temp(t);
        let bad = triples
            .iter()
            .filter(|(p, q, r)| {
                let rhs = t_hilbert_raw(p, q, tp) + t_hilbert_raw(q, r, tp);
                t_hilbert_raw(p, r, tp) > rhs + slack(rhs)
            })
            .count();
        out.check(
            format!("triangle inequality t={t}: {bad} violations"),
            bad == 0,
        );
    }
    for t in [0.5, 0.8] {
        let tp = temp(t);
        let bad = triples
            .iter()
            .filter(|(p, q, r)| {
                let rhs = tp.add(t_hilbert_raw(p, q, tp), t_hilbert_raw(q, r, tp));
                t_hilbert_raw(p, r, tp) > rhs + slack(rhs)
            })
            .count();
        out.check(
            format!("t-triangle inequality t={t}: {bad} violations"),
            bad == 0,
        );
    }
    let tp = temp(0.5);
    let mut found = None;
    for k in 0..100_000 {
        let d = rng.random_range(2..=6);
        let mut raw = || {
            (0..d)
                .map(|_| rng.random_range(0.01..1.0))
                .collect::<Vec<f64>>()
        };
        let (p, q, r) = (raw(), raw(), raw());
        let rhs = t_hilbert_raw(&p, &q, tp) + t_hilbert_raw(&q, &r, tp);
        if t_hilbert_raw(&p, &r, tp) > rhs + slack(rhs) {
            found = Some(k + 1);
            break;
        }
    }
    out.check(
        format!("ordinary triangle violation at t=0.5 found after {found:?} draws"),
        found.is_some(),
    );
    out.within("runtime", start.elapsed(), 60);
    out
}

fn random_partition(rng: &mut impl Rng, d: usize) -> Vec<Vec<usize>> {
    let k = rng.random_range(1..=d);
    let mut blocks: Vec<Vec<usize>> = (0..k).map(|b| vec![b]).collect();
    for j in k..d {
        blocks[rng.random_range(0..k)].push(j);
    }
    // shuffle labels so blocks are not aligned with index order
    let mut perm: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    blocks
        .into_iter()
        .map(|b| b.into_iter().map(|j| perm[j]).collect())
        .collect()
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let temps = [0.5, 0.8, 1.0, 1.2, 1.5, 1.7];
    let (mut funk, mut hilbert) = (0, 0);
    for k in 0..10_000 {
        let tp = temp(temps[k % temps.len()]);
        let d = rng.random_range(2..=32);
        let p = random_point(&mut rng, d, tp);
        let q = random_point(&mut rng, d, tp);
        let part = random_partition(&mut rng, d);
        let (cp, cq) = (
            coarse_grain(&p, &part).unwrap(),
            coarse_grain(&q, &part).unwrap(),
        );
        let slack = |v: f64| 1e-12 * (1.0 + v.abs());
        let f = t_funk_cosimplex(&p, &q).unwrap();
        if t_funk_cosimplex(&cp, &cq).unwrap() > f + slack(f) {
            funk += 1;
        }
        let h = t_hilbert_cosimplex(&p, &q).unwrap();
        if t_hilbert_cosimplex(&cp, &cq).unwrap() > h + slack(h) {
            hilbert += 1;
        }
    }
    out.check(format!("t-Funk: {funk} violations"), funk == 0);
    out.check(format!("t-Hilbert: {hilbert} violations"), hilbert == 0);
    out
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let temps = [0.5, 0.8, 1.0, 1.2, 1.5, 1.7];
    let mut worst: f64 = 0.0;
    for k in 0..10_000 {
        let tp = temp(temps[k % temps.len()]);
        let d = rng.random_range(2..=16);
        let p = random_point(&mut rng, d, tp);
        let q = random_point(&mut rng, d, tp);
        let direct = t_hilbert_cosimplex(&p, &q).unwrap();
        let unconstrained = isometry_unconstrained(&p, &q).unwrap();
        let constrained = isometry_constrained(&p, &q).unwrap();
        // classical Hilbert distance of the co-densities on the simplex, scaled by t*
        let simplex = ConvexDomain::Simplex { dim: d };
        let classical =
            t_hilbert_domain(&simplex, &p.codensity(), &q.codensity(), Temperature::ONE).unwrap();
        let linked = tp.log_exp(tp.t_star() * classical);
        let scale = direct.abs().max(1.0);
        worst = worst
            .max((unconstrained - direct).abs() / scale)
            .max((constrained - direct).abs() / scale)
            .max((linked - direct).abs() / scale);
    }
    out.check(format!("route agreement {worst:.1e} ≤ 1e-9"), worst <= 1e-9);
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut expansions, mut ordered, mut trials) = (0, 0, 0);
    for _ in 0..10_000 {
        let d = rng.random_range(2..=8);
        let a: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..d).map(|_| rng.random_range(0.1..10.0)).collect())
            .collect();
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(0.01..1.0)).collect();
        let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.01..1.0)).collect();
        let mut kappa = [0.0; 2];
        for (slot, t) in [1.0, 1.5].into_iter().enumerate() {
            let tp = temp(t);
            let p = CoSimplexPoint::from_raw(&v, tp).unwrap();
            let q = CoSimplexPoint::from_raw(&w, tp).unwrap();
            let (before, after) = check_contraction(&a, &p, &q).unwrap();
            if after > before * (1.0 + 1e-12) {
                expansions += 1;
            }
            kappa[slot] = after / before;
        }
        for t in [0.5, 0.8, 1.2, 1.9] {
            let tp = temp(t);
            let p = CoSimplexPoint::from_raw(&v, tp).unwrap();
            let q = CoSimplexPoint::from_raw(&w, tp).unwrap();
            let (before, after) = check_contraction(&a, &p, &q).unwrap();
            if after > before * (1.0 + 1e-12) {
                expansions += 1;
            }
        }
        trials += 1;
        if kappa[1] >= kappa[0] * (1.0 - 1e-12) {
            ordered += 1;
        }
    }
    out.check(format!("{expansions} expansion events"), expansions == 0);
    let frac = ordered as f64 / trials as f64;
    out.check(
        format!("κ(1.5) ≥ κ(1) in {:.2}% of trials ≥ 99%", 100.0 * frac),
        frac >= 0.99,
    );
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let temps = [0.5, 0.8, 1.0, 1.2, 1.5, 1.9];
    let (mut dlog, mut konst) = (0.0f64, 0.0f64);
    for t in temps {
        let tp = temp(t);
        for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let d = t_derivative(|u| log_t(u, tp).unwrap(), x, tp, 1e-5).unwrap();
            dlog = dlog.max((d - 1.0 / x).abs());
        }
        for k in [-0.5, 0.3, 1.2] {
            let f = const_t_derivative_solution(k, tp);
            let g = const_t_second_derivative_solution(k, tp);
            for x in [0.1, 0.4] {
                konst = konst.max((t_derivative(&f, x, tp, 1e-5).unwrap() - k).abs());
                let dg = |u: f64| t_derivative(&g, u, tp, 1e-4).unwrap();
                konst = konst.max((t_derivative(dg, x, tp, 1e-3).unwrap() - k).abs());
            }
        }
    }
    out.check(format!("D_t log_t = 1/x: {dlog:.1e} ≤ 1e-6"), dlog <= 1e-6);
    out.check(
        format!("constant t-derivative solutions: {konst:.1e} ≤ 1e-6"),
        konst <= 1e-6,
    );

    let mut min_order = f64::INFINITY;
    for t in temps {
        let tp = temp(t);
        let exact = log_t(2.0, tp).unwrap();
        let err = |n| (t_integral_numeric(|x| 1.0 / x, 1.0, 2.0, tp, n).unwrap() - exact).abs();
        let errs: Vec<f64> = [100, 1000, 10_000].into_iter().map(err).collect();
        for w in errs.windows(2) {
            min_order = min_order.min((w[0] / w[1]).log10());
        }
    }
    // exactly first order; the observed slope approaches 1 up to rounding of the estimate
    out.check(
        format!("t-integral of 1/x: observed order {min_order:.4} ≥ 1 − 1e-2"),
        min_order >= 1.0 - 1e-2,
    );

    let mut ray: f64 = 0.0;
    let disk = ConvexDomain::unit_ball(2);
    let simplex = ConvexDomain::Simplex { dim: 3 };
    for t in temps {
        let tp = temp(t);
        for (dom, r, s) in [
            (&disk, vec![-0.2, 0.1], vec![0.5, 0.3]),
            (&disk, vec![0.0, 0.0], vec![0.0, -0.9]),
            (&simplex, vec![0.2, 0.3, 0.5], vec![0.6, 0.3, 0.1]),
        ] {
            let exact = t_funk_domain(dom, &r, &s, tp).unwrap();
            let len = t_length(dom, &Curve::segment(r, s), tp, 100_000).unwrap();
            ray = ray.max((len - exact).abs());
        }
    }
    out.check(
        format!("straight-ray t-length vs t-Funk: {ray:.1e} ≤ 1e-4"),
        ray <= 1e-4,
    );

    let mut speed: f64 = 0.0;
    for t in temps {
        let tp = temp(t);
        for _ in 0..200 {
            let r = vec![rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
            let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let xi = vec![angle.cos(), angle.sin()];
            let cap = if t > 1.0 { 0.9 / (t - 1.0) } else { 5.0 };
            let tau = rng.random_range(0.01..cap.min(5.0));
            let x = t_geodesic_point(&disk, &r, &xi, tau, tp).unwrap();
            speed = speed.max((t_funk_domain(&disk, &r, &x, tp).unwrap() - tau).abs());
        }
    }
    out.check(
        format!("t-geodesic unit speed: {speed:.1e} ≤ 1e-9"),
        speed <= 1e-9,
    );
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut violations, mut evaluated, mut skipped) = (0, 0, 0);
    let mut k = 0usize;
    let grid: Vec<(f64, f64, usize)> = [0.5, 0.8, 1.0, 1.2, 1.5]
        .into_iter()
        .flat_map(|t| {
            [1.0, 10.0, 100.0]
                .into_iter()
                .flat_map(move |tt| [2, 8, 64].map(|d| (t, tt, d)))
        })
        .collect();
    while evaluated < 10_000 {
        let (t, smoothing, d) = grid[k % grid.len()];
        k += 1;
        let tp = temp(t);
        let p = random_cosimplex_values(&mut rng, d, tp);
        let q = random_cosimplex_values(&mut rng, d, tp);
        let x: Vec<f64> = p
            .iter()
            .zip(&q)
            .map(|(a, b)| tp.log_exp(a.ln() - b.ln()))
            .collect();
        match (
            lse_t(&x, smoothing, tp),
            lse_error_bounds(&x, smoothing, tp),
        ) {
            (Ok(v), Ok((lo, hi))) if lo.is_finite() && hi.is_finite() => {
                evaluated += 1;
                let slack = 1e-12 * (1.0 + v.abs());
                if v < lo - slack || v > hi + slack {
                    violations += 1;
                }
            }
            _ => skipped += 1,
        }
    }
    out.check(
        format!("sandwich bounds: {violations} violations over {evaluated} draws ({skipped} more skipped: variation norm undefined)"),
        violations == 0,
    );

    // For t < 1 the large-T limit of LSE_t is the power mean ‖x₊‖_{1/(1−t)} of the positive
    // entries, which equals max_i x_i only at t = 1; the gap to that norm is reported
    // alongside so a failure here can be told apart from an implementation error.
    for t in [0.5, 0.8, 0.9, 1.0] {
        let tp = temp(t);
        let (mut worst, mut to_norm): (f64, f64) = (0.0, 0.0);
        for k in 0..1000 {
            let d = [2, 8][k % 2];
            let p = random_cosimplex_values(&mut rng, d, tp);
            let q = random_cosimplex_values(&mut rng, d, tp);
            let x: Vec<f64> = p
                .iter()
                .zip(&q)
                .map(|(a, b)| tp.log_exp(a.ln() - b.ln()))
                .collect();
            let top = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let v = lse_t(&x, 1e3, tp).unwrap();
            worst = worst.max((v - top).abs());
            if t < 1.0 {
                let r = 1.0 / tp.one_minus();
                let norm = x
                    .iter()
                    .filter(|&&v| v > 0.0)
                    .map(|v| v.powf(r))
                    .sum::<f64>()
                    .powf(1.0 / r);
                to_norm = to_norm.max((v - norm).abs());
            }
        }
        let note = if t < 1.0 {
            format!(" (distance to the power-mean limit {to_norm:.1e})")
        } else {
            String::new()
        };
        out.check(
            format!("T-limit at T=1e3, t={t}: {worst:.1e} ≤ 1e-2{note}"),
            worst <= 1e-2,
        );
    }

    let mut grad: f64 = 0.0;
    let temps = [0.5, 0.8, 1.0, 1.2, 1.5];
    for k in 0..1000 {
        let tp = temp(temps[k % temps.len()]);
        let d = rng.random_range(2..=8);
        let smoothing = [1.0, 10.0][k % 2];
        let cfg = SmoothingConfig::new(smoothing, 0.0).unwrap();
        let p = random_cosimplex_values(&mut rng, d, tp);
        let q = random_cosimplex_values(&mut rng, d, tp);
        let Ok((gp, gq)) = diff_hilbert_gradient_values(&p, &q, tp, cfg) else {
            continue;
        };
        let fp = fd_gradient(|x| diff_hilbert_values(x, &q, tp, cfg).unwrap(), &p, 1e-6);
        let fq = fd_gradient(|x| diff_hilbert_values(&p, x, tp, cfg).unwrap(), &q, 1e-6);
        let scale = max_abs(&gp).max(max_abs(&gq));
        grad = grad
            .max(max_abs_diff(&fp, &gp) / scale)
            .max(max_abs_diff(&fq, &gq) / scale);
    }
    out.check(
        format!("gradient vs finite differences: {grad:.1e} ≤ 1e-5"),
        grad <= 1e-5,
    );

    let cfg = SmoothingConfig::new(10.0, 0.0).unwrap();
    let under = relative_error_histogram(10_000, 8, temp(1.2), cfg, 8).unwrap();
    let over = relative_error_histogram(10_000, 8, temp(0.8), cfg, 8).unwrap();
    out.check(
        format!(
            "t=1.2 underestimates in {:.1}% ≥ 90%",
            100.0 * under.negative_fraction()
        ),
        under.negative_fraction() >= 0.9,
    );
    out.check(
        format!(
            "t=0.8 overestimates in {:.1}% ≥ 90%",
            100.0 * over.positive_fraction()
        ),
        over.positive_fraction() >= 0.9,
    );
    out
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new();
    let kinds = GeometryKind::all(temp(1.2));
    for kind in kinds {
        let data = sample_in_geometry(kind, 40, 3, 1.0, 9).unwrap();
        let cfg = EmbedConfig {
            dim: 3,
            seed: 9,
            ..EmbedConfig::default()
        };
        let run = optimize_embedding(&data, kind, &cfg).unwrap();
        out.check(
            format!(
                "self-consistency {}: {:.1e} ≤ 1e-3 (initial {:.2})",
                kind.name(),
                run.final_loss(),
                run.initial_loss()
            ),
            run.final_loss() <= 1e-3,
        );
    }
    let sources = [
        DatasetSource::ErdosRenyi { n: 50, p: 0.5 },
        DatasetSource::BarabasiAlbert { n: 50, m: 2 },
        DatasetSource::RandomPoints {
            n: 50,
            ambient_dim: 50,
        },
    ];
    for source in &sources {
        let data = generate_dataset(source, 9).unwrap();
        let ratios: Vec<f64> = kinds
            .iter()
            .map(|&kind| {
                let cfg = EmbedConfig {
                    dim: 5,
                    seed: 9,
                    ..EmbedConfig::default()
                };
                let run = optimize_embedding(&data, kind, &cfg).unwrap();
                run.final_loss() / run.initial_loss()
            })
            .collect();
        let worst = ratios.iter().cloned().fold(0.0, f64::max);
        out.check(
            format!(
                "{}: worst final/initial loss {worst:.3} ≤ 0.5",
                source.label()
            ),
            worst <= 0.5,
        );
    }
    let argv = [
        "tempered",
        "embed",
        "--dataset",
        "ba",
        "--n",
        "20",
        "--dims",
        "2,3",
        "--iters",
        "60",
        "--restarts",
        "2",
        "--seed",
        "5",
    ];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(cli::run(argv, &mut o, &mut e), 0);
        runs.push(o);
    }
    let data = generate_dataset(&DatasetSource::ErdosRenyi { n: 20, p: 0.3 }, 1).unwrap();
    let cfg = EmbedConfig {
        iters: 100,
        restarts: 2,
        ..EmbedConfig::default()
    };
    let bits = |kind| -> Vec<u64> {
        let r = optimize_embedding(&data, kind, &cfg).unwrap();
        r.loss_history
            .iter()
            .chain(r.y.iter().flatten())
            .map(|v| v.to_bits())
            .collect()
    };
    let same = kinds.iter().all(|&k| bits(k) == bits(k));
    out.check(
        "fixed-seed determinism byte-identical",
        runs[0] == runs[1] && same,
    );
    out.within("runtime", start.elapsed(), 600);
    out
}

fn criterion_10() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let disk_point = |rng: &mut ChaCha8Rng| loop {
        let v = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if let Ok(p) = DiskPoint::new(v) {
            if p.coords().iter().map(|x| x * x).sum::<f64>() < 0.98 {
                return p;
            }
        }
    };
    let (mut equiv, mut exact_one) = (0.0f64, true);
    for k in 0..10_000 {
        let (r, s) = (disk_point(&mut rng), disk_point(&mut rng));
        let tp = temp([0.5, 0.8, 1.0, 1.2, 1.5][k % 5]);
        let (pr, ps) = (klein_to_poincare(&r), klein_to_poincare(&s));
        let base = klein_distance(&r, &s).unwrap();
        let scale = base.max(1.0);
        equiv = equiv.max((base - poincare_distance(&pr, &ps).unwrap()).abs() / scale);
        let tk = tempered_klein(&r, &s, tp).unwrap();
        equiv =
            equiv.max((tk - tempered_poincare(&pr, &ps, tp).unwrap()).abs() / tk.abs().max(1.0));
        exact_one &= tempered_klein(&r, &s, Temperature::ONE).unwrap() == base
            && tempered_poincare(&pr, &ps, Temperature::ONE).unwrap()
                == poincare_distance(&pr, &ps).unwrap();
    }
    out.check(
        format!("model equivalence through the radial map {equiv:.1e} ≤ 1e-10"),
        equiv <= 1e-10,
    );
    out.check("t=1 reduces to the classical distances exactly", exact_one);

    // fraction of the base distance covered by the point at tempered fraction α
    let configs = [
        ([-0.5, -0.3], [0.6, 0.2], 0.2),
        ([-0.7, 0.1], [0.3, 0.6], 0.2),
        ([0.2, -0.6], [-0.4, 0.5], 0.2),
        ([0.0, 0.0], [0.7, 0.4], 0.5),
        ([0.0, 0.0], [-0.2, 0.85], 0.5),
    ];
    let mut directions = true;
    for (r, s, alpha) in configs {
        for model in [Model::Klein, Model::Poincare] {
            let (r, s) = (
                DiskPoint::new(r.to_vec()).unwrap(),
                DiskPoint::new(s.to_vec()).unwrap(),
            );
            let dist = |a: &DiskPoint, b: &DiskPoint| match model {
                Model::Klein => klein_distance(a, b).unwrap(),
                Model::Poincare => poincare_distance(a, b).unwrap(),
            };
            let covered: Vec<f64> = [0.8, 1.0, 1.2]
                .into_iter()
                .map(|t| {
                    dist(
                        &r,
                        &fractional_point(&r, &s, alpha, temp(t), model).unwrap(),
                    ) / dist(&r, &s)
                })
                .collect();
            directions &= covered[0] > covered[1] + 1e-6 && covered[1] > covered[2] + 1e-6;
        }
    }
    out.check(
        "fractional points dilate for t < 1 and contract for t > 1",
        directions,
    );
    out
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("t-algebra identities", criterion_1),
        ("parameterizations", criterion_2),
        ("distance properties", criterion_3),
        ("coarse-graining monotonicity", criterion_4),
        ("isometries and monotone link", criterion_5),
        ("contraction", criterion_6),
        ("calculus", criterion_7),
        ("differentiable approximation", criterion_8),
        ("embedding harness", criterion_9),
        ("disk models", criterion_10),
    ];
    // ACCEPTANCE_ONLY=2,8 runs a subset
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        let outcome = run();
        let verdict = if outcome.passed() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {name}", i + 1);
        for (label, ok) in &outcome.checks {
            println!("    [{}] {label}", if *ok { "ok" } else { "FAILED" });
        }
        if !outcome.passed() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
