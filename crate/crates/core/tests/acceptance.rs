//! One line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};

use fullgroup_lab::fullgroup::{ball, coupling_lemma_check, fibonacci_generators, fibonacci_subshift, CocycleElement, GeneratorSet};
use fullgroup_lab::io::SpecFile;
use fullgroup_lab::points::Point;
use fullgroup_lab::randwalk::{
    an_report, convolution_powers, default_tail_grid, max_displacement_tail, return_probability_suite,
    sample_orbit_walks, GroupDistribution, StepMeasure,
};
use fullgroup_lab::schreier::build_ball;
use fullgroup_lab::symbolic::{loglog_slope, toeplitz_word, Subshift};

type Outcome = Result<String, String>;

fn spec(name: &str) -> Arc<Subshift> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name);
    SpecFile::load(&path).unwrap().subshift().unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, format!("took {:.1?}, limit {limit:?}", t.elapsed()))
}

struct Fib {
    subshift: Arc<Subshift>,
    point: Point,
    gens: GeneratorSet,
    measure: StepMeasure,
}

impl Fib {
    fn new() -> Self {
        let subshift = fibonacci_subshift();
        let point = Point::default_for(subshift.clone()).unwrap();
        let gens = fibonacci_generators(&subshift).unwrap();
        let measure = StepMeasure::uniform(&gens).unwrap();
        Fib { subshift, point, gens, measure }
    }
}

fn c1() -> Outcome {
    let t = Instant::now();
    let s = spec("golden.json");
    let profile = s.complexity_profile(200).map_err(|e| e.to_string())?;
    for n in 1..=200 {
        ensure(profile[n] == n as u64 + 1, format!("rho({n}) = {}", profile[n]))?;
    }
    within(t, Duration::from_secs(10))?;
    Ok(format!("golden-slope rho(n) = n + 1 for n in 1..=200 ({:.2?})", t.elapsed()))
}

fn c2() -> Outcome {
    let golden = spec("golden.json");
    let fib = spec("fibonacci.json");
    for n in 0..=100 {
        let a = golden.factors(n).map_err(|e| e.to_string())?;
        let b = fib.factors(n).map_err(|e| e.to_string())?;
        ensure(a == b, format!("factor sets differ at n = {n}"))?;
    }
    Ok("golden-slope and Fibonacci factor sets equal for n <= 100".into())
}

fn c3() -> Outcome {
    let w = toeplitz_word(b"a*ab*a", 24).map_err(|e| e.to_string())?.to_string();
    ensure(w == "aaabaaaaabbaaaabaaaaabaa", format!("got {w}"))?;
    Ok(format!("toeplitz_word(a*ab*a, 24) = {w}"))
}

fn c4() -> Outcome {
    let t = Instant::now();
    let s = spec("toeplitz.json");
    let (slope, _) = loglog_slope(&s, 20..=400).map_err(|e| e.to_string())?;
    let target = 5f64.ln() / 2.5f64.ln();
    ensure((slope - target).abs() <= 0.25, format!("slope {slope:.4}, target {target:.4}"))?;
    within(t, Duration::from_secs(60))?;
    Ok(format!("Toeplitz ab*a* slope {slope:.4} vs {target:.4} ({:.2?})", t.elapsed()))
}

fn c5() -> Outcome {
    let s = spec("nonprimitive.json");
    let profile = s.complexity_profile(500).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = (50..=500)
        .map(|n| profile[n] as f64 / (n as f64 * (n as f64).ln().ln()))
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let spread = hi / lo - 1.0;
    ensure(spread < 0.3, format!("ratio spread {:.1}%", 100.0 * spread))?;
    Ok(format!("a->aba, b->bb: rho(n)/(n ln ln n) in [{lo:.3}, {hi:.3}] on [50, 500], spread {:.1}%", 100.0 * spread))
}

fn c6(f: &Fib) -> Outcome {
    let g = f.gens.elements();
    for (name, x) in f.gens.names().iter().zip(g) {
        let sq = x.compose(x).map_err(|e| e.to_string())?;
        ensure(sq.is_identity(), format!("{name}^2 is not the identity"))?;
        ensure(!x.is_identity(), format!("{name} is the identity"))?;
    }
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            ensure(g[i] != g[j], format!("generators {i} and {j} coincide"))?;
        }
    }
    Ok("alpha, beta, gamma are distinct involutions".into())
}

fn trinomial(n: usize) -> BTreeMap<i64, BigRational> {
    let third = BigRational::new(1.into(), 3.into());
    let mut law = BTreeMap::from([(0i64, BigRational::one())]);
    for _ in 0..n {
        let mut next = BTreeMap::new();
        for (x, p) in &law {
            for d in -1..=1 {
                *next.entry(x + d).or_insert_with(BigRational::zero) += p * &third;
            }
        }
        law = next;
    }
    law
}

fn c7(f: &Fib, powers: &[GroupDistribution]) -> Outcome {
    for (n, d) in powers.iter().enumerate().take(11) {
        let push = d.pushforward(&f.point, 0).map_err(|e| e.to_string())?;
        ensure(push == trinomial(n), format!("pushforward differs from trinomial at n = {n}"))?;
    }
    Ok("pushforward of mu^n at 0 equals the lazy trinomial law for n <= 10".into())
}

fn c8(f: &Fib) -> Outcome {
    let b = build_ball(&f.point, &f.gens, 20).map_err(|e| e.to_string())?;
    let vs: Vec<i64> = b.vertices().keys().copied().collect();
    ensure(vs == (-20..=20).collect::<Vec<_>>(), format!("vertices {:?}..{:?}", vs.first(), vs.last()))?;
    ensure(b.is_path_with_loops(), "not a path with loops")?;
    ensure(b.is_lipschitz(), "an edge moves by more than K")?;
    Ok(format!("Schreier ball of radius 20: path on -20..=20, {} edges, loops everywhere", b.edges().len()))
}

fn c9(powers: &[GroupDistribution]) -> Outcome {
    let rows = return_probability_suite(powers, 6).map_err(|e| e.to_string())?;
    for r in &rows {
        ensure(r.identity_is_max, format!("identity not maximal at 2n = {}", 2 * r.n))?;
    }
    let third = BigRational::new(1.into(), 3.into());
    ensure(rows[0].return_probability == third, format!("mu^2(e) = {}", rows[0].return_probability))?;
    let oracle = powers[1]
        .iter()
        .flat_map(|(g, p)| powers[1].iter().map(move |(h, q)| (g.compose(h).unwrap(), p * q)))
        .filter(|(g, _)| g.is_identity())
        .fold(BigRational::zero(), |acc, (_, p)| acc + p);
    ensure(oracle == third, format!("pair-product oracle gives {oracle}"))?;
    Ok(format!(
        "mu^2n(e) is the maximum for n <= 6; mu^2(e) = 1/3, mu^12(e) = {}",
        rows[5].return_probability
    ))
}

fn c10(f: &Fib, powers: &[GroupDistribution], elapsed: Duration) -> Outcome {
    let t = Instant::now();
    let b = ball(&f.gens, 12).map_err(|e| e.to_string())?;
    let mut min_slack = f64::INFINITY;
    for d in &powers[1..=12] {
        let r = an_report(&f.subshift, &f.measure, d, 9.0, Some(&b)).map_err(|e| e.to_string())?;
        ensure(r.slack >= 0.0, format!("negative slack {} at n = {}", r.slack, r.n))?;
        min_slack = min_slack.min(r.slack);
    }
    let h4 = powers[4].entropy() / 4.0;
    let h12 = powers[12].entropy() / 12.0;
    ensure(h12 < h4, format!("H/n = {h12:.4} at 12, {h4:.4} at 4"))?;
    let total = elapsed + t.elapsed();
    ensure(total < Duration::from_secs(600), format!("took {total:.1?}"))?;
    Ok(format!("entropy bound slack >= {min_slack:.3} for n <= 12; H/n {h4:.4} -> {h12:.4} ({total:.2?})"))
}

fn c11(f: &Fib) -> Outcome {
    let mut parts = Vec::new();
    for (n, seed) in [(100, 11u64), (400, 12)] {
        let sample = sample_orbit_walks(&f.measure, &f.point, n, 100_000, seed).map_err(|e| e.to_string())?;
        let r = max_displacement_tail(&sample, &default_tail_grid()).map_err(|e| e.to_string())?;
        ensure(r.envelope_dominates(), format!("envelope below the tail at n = {n}"))?;
        ensure(r.reflection_holds(), format!("reflection inequality fails at n = {n}"))?;
        parts.push(format!("n={n}: C={:.3} D={:.3} a0={:.3} b0={:.2}", r.fit.c, r.fit.d, r.fit.a0, r.b0));
    }
    Ok(format!("Gaussian envelope and reflection hold, 1e5 trials; {}", parts.join("; ")))
}

fn c12(f: &Fib) -> Outcome {
    let r = coupling_lemma_check(&f.gens, &f.point, 8, 12).map_err(|e| e.to_string())?;
    ensure(r.counterexamples.is_empty(), format!("{} counterexamples, first {:?}", r.counterexamples.len(), r.counterexamples.first()))?;
    ensure(r.applicable > 0, "hypothesis never applicable")?;
    Ok(format!(
        "coupling check: {} words, {} cylinders, {} applicable pairs, 0 counterexamples",
        r.words, r.cylinders, r.applicable
    ))
}

fn c13(f: &Fib, powers: &[GroupDistribution]) -> Outcome {
    let k = f.gens.max_shift();
    let mut checks = 0u64;
    let b6 = ball(&f.gens, 6).map_err(|e| e.to_string())?;
    let id = CocycleElement::identity(f.subshift.clone()).map_err(|e| e.to_string())?;
    let err = |e: fullgroup_lab::Error| e.to_string();
    for (g, len) in b6.iter() {
        ensure(g.max_shift() <= k * len as u64, format!("|k_g| exceeds K l_S(g) for {g:?}"))?;
        ensure(g.compose(&id).map_err(err)? == *g && id.compose(g).map_err(err)? == *g, "identity law")?;
        let inv = g.inverse().map_err(err)?;
        ensure(g.compose(&inv).map_err(err)?.is_identity(), "right inverse")?;
        ensure(inv.compose(g).map_err(err)?.is_identity(), "left inverse")?;
        checks += 4;
    }
    let b3 = ball(&f.gens, 3).map_err(err)?;
    let b2 = ball(&f.gens, 2).map_err(err)?;
    for g in b3.elements() {
        for h in b3.elements() {
            let gh = g.compose(h).map_err(err)?;
            for pos in -8..=8 {
                let kh = h.evaluate(&f.point, pos).map_err(err)?;
                let lhs = gh.evaluate(&f.point, pos).map_err(err)?;
                let rhs = g.evaluate(&f.point, pos + kh).map_err(err)? + kh;
                ensure(lhs == rhs, "cocycle rule")?;
                checks += 1;
            }
            for x in b2.elements() {
                let a = gh.compose(x).map_err(err)?;
                let b = g.compose(&h.compose(x).map_err(err)?).map_err(err)?;
                ensure(a == b, "associativity")?;
                checks += 1;
            }
        }
    }
    for d in powers {
        ensure(d.total_mass().is_one(), format!("mass lost at n = {}", d.step()))?;
        checks += 1;
    }
    for name in ["fibonacci.json", "toeplitz.json", "nonprimitive.json", "golden_mean.json", "full2.json"] {
        let s = spec(name);
        for n in 0..12 {
            let short = s.factors(n).map_err(err)?;
            let long = s.factors(n + 1).map_err(err)?;
            for w in long.iter() {
                let bytes = w.as_bytes();
                ensure(
                    s.is_admissible(&bytes[1..]).map_err(err)? && s.is_admissible(&bytes[..n]).map_err(err)?,
                    format!("{name}: factor {w} has an inadmissible subword"),
                )?;
            }
            for w in short.iter() {
                let extends = s.alphabet().letters().iter().any(|c| {
                    let mut v = w.as_bytes().to_vec();
                    v.push(*c);
                    long.iter().any(|u| u.as_bytes() == v.as_slice())
                });
                ensure(extends, format!("{name}: factor {w} does not extend"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("group axioms, cocycle rule, displacement bound, conservation, factor closure: {checks} checks, 0 failures"))
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, run: &mut dyn FnMut() -> Outcome| {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(msg) => println!("PASS criterion {n}: {msg}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL criterion {n}: {msg}");
            }
        }
    };
    report(1, &mut c1);
    report(2, &mut c2);
    report(3, &mut c3);
    report(4, &mut c4);
    report(5, &mut c5);

    let fib = Fib::new();
    let t = Instant::now();
    let powers = convolution_powers(&fib.measure, 12, 2_000_000);
    let conv_time = t.elapsed();
    report(6, &mut || c6(&fib));
    match &powers {
        Ok(powers) => {
            report(7, &mut || c7(&fib, powers));
            report(8, &mut || c8(&fib));
            report(9, &mut || c9(powers));
            report(10, &mut || c10(&fib, powers, conv_time));
        }
        Err(e) => {
            let e = e.to_string();
            report(7, &mut || Err(e.clone()));
            report(8, &mut || c8(&fib));
            report(9, &mut || Err(e.clone()));
            report(10, &mut || Err(e.clone()));
        }
    }
    report(11, &mut || c11(&fib));
    report(12, &mut || c12(&fib));
    report(13, &mut || match &powers {
        Ok(p) => c13(&fib, p),
        Err(e) => Err(e.to_string()),
    });
    println!("acceptance: {} of 13 criteria passed", 13 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
