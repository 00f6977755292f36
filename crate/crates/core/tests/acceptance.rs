//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints its verdict; exits nonzero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use widthlab::embeddings::{collapse_fiber_diameter, sample_collapse_fiber};
use widthlab::hadamard::row_agreement_counts;
use widthlab::lp::{diameter_pair, distance, norm, random_ball_point};
use widthlab::*;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn ok<T>(r: widthlab::Result<T>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

/// Smallest k in 0..=n with `eps ≥ 2 (k+1)^{-1/p}`, by scanning.
fn scan_sup_width(n: usize, q: f64, eps: f64) -> usize {
    (0..=n)
        .find(|&k| k == n || eps >= 2.0 * ((k + 1) as f64).powf(-1.0 / q))
        .unwrap()
}

fn c1_sup_metric_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for n in 1..=6 {
        for q in [1.0, 1.5, 2.0, 3.0] {
            for _ in 0..500 {
                let eps = 2.5 * (1.0 - rng.gen::<f64>());
                let got = ok(wdim_lp_ball_sup_metric(n, Exponent::Finite(q), eps), "wdim")?;
                let want = scan_sup_width(n, q, eps);
                ensure!(got == want, "n={n} p={q} eps={eps}: got {got}, scan {want}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} random (n, p, eps) triples match the threshold scan"))
}

fn c2_collapse_fibers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pairs = 0u64;
    let mut worst = f64::NEG_INFINITY;
    let mut cases = 0;
    for n in 2..=6 {
        for q in [1.0, 2.0, 3.0] {
            let p = Exponent::Finite(q);
            for j in 1..=n {
                let expected = 2.0 * ((n - j + 1) as f64).powf(-1.0 / q);
                let fib = ok(collapse_fiber_diameter(n, p, j), "fiber")?;
                let [a, b] = &fib.extremal;
                let d = distance(a, b, Exponent::Infinity);
                ensure!((d - expected).abs() <= 1e-12, "±s0 distance {d} vs {expected}");
                ensure!((fib.diameter - expected).abs() <= 1e-12, "reported {} vs {expected}", fib.diameter);
                for s in [a, b] {
                    ensure!(norm(s, p) <= 1.0 + 1e-12, "s0 outside the ball");
                    let img = ok(collapse_projection(&LpVector::new(s.clone(), p).unwrap(), j), "map")?;
                    ensure!(img.coords().iter().all(|v| v.abs() <= 1e-12), "s0 does not map to 0");
                }

                // Origin plus seven random image points, 160 preimages each.
                let mut targets = vec![vec![0.0; n]];
                for _ in 0..7 {
                    let x = LpVector::new(random_ball_point(&mut rng, n, p), p).unwrap();
                    targets.push(ok(collapse_projection(&x, j), "map")?.into_coords());
                }
                for (t, y) in targets.iter().enumerate() {
                    let target = LpVector::new(y.clone(), p).unwrap();
                    let fiber = ok(sample_collapse_fiber(&target, j, 160, (cases * 8 + t) as u64), "sample")?;
                    for x in fiber.points() {
                        ensure!(norm(x, p) <= 1.0 + 1e-9, "sample outside the ball");
                        let img = ok(collapse_projection(&LpVector::new(x.clone(), p).unwrap(), j), "map")?;
                        let miss = distance(img.coords(), y, Exponent::Infinity);
                        ensure!(miss <= 1e-9, "sample maps {miss:e} away from its target");
                    }
                    let m = fiber.len() as u64;
                    pairs += m * (m - 1) / 2;
                    let (_, _, diam) = ok(diameter_pair(fiber.points(), Exponent::Infinity), "diameter")?;
                    worst = worst.max(diam - expected);
                    ensure!(diam <= expected + 1e-9, "n={n} p={q} j={j}: fiber diameter {diam} > {expected}");
                }
                cases += 1;
            }
        }
    }
    ensure!(pairs / cases as u64 >= 100_000, "only {} pairs per case", pairs / cases as u64);
    Ok(format!(
        "{cases} (n, p, j) cases, {} fiber pairs each, worst excess {worst:.2e}",
        pairs / cases as u64
    ))
}

fn c3_euclidean() -> Outcome {
    for n in 1..=10 {
        let b = b_lower(n, Exponent::TWO);
        let want = (2.0 * (1.0 + 1.0 / n as f64)).sqrt();
        ensure!((b - want).abs() <= 1e-12, "b_lower({n}, 2) = {b}, want {want}");
    }
    let target = 2.0 * (2.0f64 / 3.0).sqrt();
    let c = ok(empirical_c(2, 3, Exponent::TWO, 100_000, 0), "empirical_c")?;
    ensure!(
        c <= target + 1e-9 && c >= 0.99 * target,
        "empirical c(2,3;2) = {c}, expected within 1% below {target}"
    );
    Ok(format!("b_lower exact for n <= 10; empirical c(2,3;2) = {c:.6} vs {target:.6}"))
}

fn c4_hadamard() -> Outcome {
    for order in [1, 2, 4, 8, 12, 16, 20, 32] {
        ensure!(hadamard_order_available(order), "order {order} unavailable");
        let h = ok(hadamard(order), "hadamard")?;
        ensure!(h.order() == order && h.is_normalized(), "order {order} malformed");
        // Integer Gram matrix computed here, not by the library.
        for i in 0..order {
            for k in 0..order {
                let dot: i64 = (0..order).map(|c| i64::from(h.get(i, c)) * i64::from(h.get(k, c))).sum();
                let want = if i == k { order as i64 } else { 0 };
                ensure!(dot == want, "order {order}: (H Hᵗ)[{i}][{k}] = {dot}");
            }
        }
        if order >= 2 {
            let counts = ok(row_agreement_counts(&h), "agreements")?;
            for i in 0..order {
                for k in 0..order {
                    if i != k {
                        ensure!(counts.truncated[i][k] == order / 2 - 1, "order {order}: truncated rows agree in {}", counts.truncated[i][k]);
                    }
                }
            }
            let m = (order - 1) as f64;
            for q in [1.0, 1.5, 2.0] {
                let p = Exponent::Finite(q);
                let set = ok(hadamard_set(&h, p), "set")?;
                let d = ok(set.diameter(), "diameter")?;
                let want = 2f64.powf(1.0 - 1.0 / q) * (1.0 + 1.0 / m).powf(1.0 / q);
                ensure!((d - want).abs() <= 1e-12 * want, "order {order} p={q}: diameter {d} vs {want}");
                if q == 1.0 {
                    ensure!((d - (1.0 + 1.0 / m)).abs() <= 1e-12, "order {order}: l1 diameter {d}");
                }
            }
        }
    }
    Ok("orders 1..32 constructible, Gram exact, agreements and set diameters match".into())
}

fn c5_dimension_three() -> Outcome {
    let mut points = 0;
    for q in [1.0, 1.5, 2.0] {
        let p = Exponent::Finite(q);
        let edge = 2.0 * (2.0f64 / 3.0).powf(1.0 / q);
        for i in 1..=100 {
            let eps = 2.5 * i as f64 / 100.0;
            let want = if eps >= 2.0 {
                0
            } else if eps >= edge {
                2
            } else {
                3
            };
            let iv = ok(wdim_interval(3, p, Metric::IntrinsicLp, eps), "interval")?;
            ensure!(iv.lo == want && iv.hi == want, "p={q} eps={eps}: [{}, {}], want {want}", iv.lo, iv.hi);
            points += 1;
        }
    }
    Ok(format!("{points} grid points exact"))
}

fn c6_search() -> Outcome {
    let mut lines = Vec::new();
    for (n, p, want) in [
        (2, Exponent::TWO, 3f64.sqrt()),
        (3, Exponent::TWO, (8.0f64 / 3.0).sqrt()),
        (3, Exponent::ONE, 4.0 / 3.0),
    ] {
        let r = ok(min_diameter_search(n, p, 64, 0), "search")?;
        ensure!((r.diameter - want).abs() <= 1e-3, "n={n} p={p}: best {} vs {want}", r.diameter);
        lines.push(format!("n={n} p={p}: {:.6}", r.diameter));
    }
    let mut runs = 0;
    let mut min_gap = f64::INFINITY;
    for p in [Exponent::ONE, Exponent::Finite(1.5), Exponent::TWO, Exponent::Finite(3.0), Exponent::Infinity] {
        for n in 2..=7 {
            let r = match min_diameter_search(n, p, 64, 17) {
                Ok(r) => r,
                Err(e) => return Err(format!("n={n} p={p}: {e}")),
            };
            let lambda = r.certificate();
            let residual = norm(&r.config.weighted_sum(lambda), p);
            let total: f64 = lambda.iter().sum();
            ensure!(residual <= 1e-9 && (total - 1.0).abs() <= 1e-12, "n={n} p={p}: bad certificate");
            let d = ok(r.config.diameter(), "diameter")?;
            let bound = b_lower(n, p);
            ensure!(d >= bound - 1e-6, "n={n} p={p}: certified {d} below bound {bound}");
            min_gap = min_gap.min(d - bound);
            runs += 64;
        }
    }
    Ok(format!("{}; {runs} falsification runs, smallest gap {min_gap:.2e}", lines.join(", ")))
}

fn c7_linf_family() -> Outcome {
    let mut prev = f64::INFINITY;
    for n in 3..=8 {
        let f = ok(linf_family(n, LinfVariant::OneOver), "family")?;
        ensure!(contains_origin_in_hull(&f).is_some(), "n={n}: hull test failed");
        let d = ok(f.diameter(), "diameter")?;
        let want = n as f64 / (n as f64 - 1.0);
        ensure!(d == want, "n={n}: diameter {d} vs {want}");
        let gap = d - 1.0;
        ensure!(gap < prev, "n={n}: gap {gap} not below {prev}");
        prev = gap;
    }
    Ok("n = 3..8 feasible, diameter n/(n-1), gaps to 1 strictly decreasing".into())
}

fn c8_global_properties() -> Outcome {
    let exps = [Exponent::ONE, Exponent::Finite(1.5), Exponent::TWO, Exponent::Finite(3.0), Exponent::Infinity];
    let grid: Vec<f64> = (1..=250).map(|i| i as f64 / 100.0).collect();
    let mut evaluated = 0;
    for metric in [Metric::IntrinsicLp, Metric::SupMetric] {
        for p in exps {
            let mut prev_lo: Option<Vec<usize>> = None;
            for n in 1..=8 {
                let mut row = Vec::with_capacity(grid.len());
                let mut last: Option<(usize, usize)> = None;
                for &eps in &grid {
                    let iv = match wdim_interval(n, p, metric, eps) {
                        Ok(iv) => iv,
                        Err(e) => return Err(format!("n={n} p={p} {metric} eps={eps}: {e}")),
                    };
                    evaluated += 1;
                    ensure!(iv.lo <= iv.hi && iv.hi <= n, "n={n} eps={eps}: [{}, {}]", iv.lo, iv.hi);
                    ensure!((iv.lo == 0 && iv.hi == 0) == (eps >= 2.0), "n={n} p={p} eps={eps}: zero iff eps >= 2");
                    // The gap concerns the ball in its own metric; the sup metric
                    // follows its exact law instead (n=4, p=1, eps=1 gives [1, 1]).
                    if eps < 2.0 && metric == Metric::IntrinsicLp {
                        ensure!(iv.lo as f64 > n as f64 / 2.0 - 1.0, "n={n} p={p} eps={eps}: lo {} too small", iv.lo);
                    }
                    if let Some((lo, hi)) = last {
                        ensure!(iv.lo <= lo && iv.hi <= hi, "n={n} p={p} {metric}: not monotone at eps={eps}");
                    }
                    last = Some((iv.lo, iv.hi));
                    row.push(iv.lo);
                }
                if let Some(prev) = &prev_lo {
                    ensure!(row.iter().zip(prev).all(|(a, b)| a >= b), "lo decreases from n={} to n={n} at p={p}", n - 1);
                }
                prev_lo = Some(row);
            }
        }
    }
    Ok(format!("{evaluated} intervals, no inconsistent bounds"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("sup-metric exact law", c1_sup_metric_law),
        ("collapse fiber certification", c2_collapse_fibers),
        ("Euclidean thresholds", c3_euclidean),
        ("Hadamard suite", c4_hadamard),
        ("dimension-3 exact table", c5_dimension_three),
        ("sharpness search and falsification grid", c6_search),
        ("l-infinity one_over family", c7_linf_family),
        ("global interval properties", c8_global_properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({why}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
