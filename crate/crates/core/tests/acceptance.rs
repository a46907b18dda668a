use std::process::ExitCode;
use std::time::{Duration, Instant};

use cobord::chern::{self, ChernNumbers, ChowClass, LineBundleSpec, Partition, ProjProduct};
use cobord::cobordism::{self, chern_pairing_matrix, decompose, milnor_basis, GenusContext};
use cobord::lazard::{self, GenusSpec, LazardElement, Specialize};
use cobord::linalg::determinant;
use cobord::series::{var_names, Exponent, TruncSeries};
use cobord::Rational;
use proptest::prelude::*;
use proptest::strategy::BoxedStrategy;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

const FGL_ORDER: u32 = 8;
const FGL_BUDGET: Duration = Duration::from_secs(10);
const HRR_BUDGET: Duration = Duration::from_secs(30);
const HRRC_BUDGET: Duration = Duration::from_secs(120);
const HRRC_MIN_CASES: usize = 100;
const PROPERTY_CASES: u32 = 250;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < budget, || format!("took {took:.2?}, budget {budget:?}"))?;
    Ok(took)
}

fn fgl_axioms() -> Outcome {
    let start = Instant::now();
    let fgl = lazard::universal_fgl(FGL_ORDER).map_err(|e| e.to_string())?;
    let report = lazard::verify_fgl_axioms(&fgl).map_err(|e| e.to_string())?;
    for c in &report.checks {
        ensure(c.pass, || format!("{} failed: {:?} vs {:?}", c.name, c.lhs, c.rhs))?;
    }
    let took = within(start, FGL_BUDGET)?;
    Ok(format!(
        "{} identities at order {FGL_ORDER} in {took:.2?}",
        report.checks.len()
    ))
}

fn g_axiom() -> Outcome {
    let report = lazard::verify_g_axiom(FGL_ORDER).map_err(|e| e.to_string())?;
    for c in &report.checks {
        ensure(c.pass, || format!("{} failed: {:?} vs {:?}", c.name, c.lhs, c.rhs))?;
    }
    Ok(format!("F(u g(u), v g(v)) = (u+v) g(u+v) at order {FGL_ORDER}"))
}

fn lagrange() -> Outcome {
    for r in 0..=6 {
        let c = lazard::verify_lagrange(r).map_err(|e| e.to_string())?;
        ensure(c.pass, || format!("r = {r}: {:?} vs {:?}", c.lhs, c.rhs))?;
    }
    Ok("r = 0..6".into())
}

fn specializations() -> Outcome {
    let uv = var_names(&["u", "v"]);
    let mult = GenusSpec::multiplicative();
    let add = GenusSpec::additive();
    let order = 10;
    let f = lazard::universal_fgl(order).map_err(|e| e.to_string())?;
    let u = TruncSeries::<Rational>::variable(&uv, 0, order).unwrap();
    let v = TruncSeries::<Rational>::variable(&uv, 1, order).unwrap();
    let sum = u.add(&v).unwrap();
    let expected = sum.sub(&u.mul(&v).unwrap()).unwrap();
    let fm = f.specialize(&mult).map_err(|e| e.to_string())?;
    ensure(fm.series() == &expected, || {
        format!("multiplicative F = {}", fm.series())
    })?;
    let fa = f.specialize(&add).map_err(|e| e.to_string())?;
    ensure(fa.series() == &sum, || format!("additive F = {}", fa.series()))?;

    let g = lazard::g_series(9).map_err(|e| e.to_string())?;
    let gm = g.specialize(&mult).map_err(|e| e.to_string())?;
    for i in 0..=8u16 {
        let sign = if i % 2 == 0 { int(1) } else { int(-1) };
        let want = &sign * &Rational::inverse_factorial(u32::from(i) + 1);
        ensure(gm.coeff_at(i) == want, || {
            format!("g coefficient {i}: {} vs {want}", gm.coeff_at(i))
        })?;
    }
    let ga = g.specialize(&add).map_err(|e| e.to_string())?;
    let one = TruncSeries::<Rational>::one(ga.vars(), ga.order()).unwrap();
    ensure(ga == one, || format!("additive g = {ga}"))?;
    Ok("F to order 10, g to degree 8".into())
}

fn grading() -> Outcome {
    let f = lazard::universal_fgl(9).map_err(|e| e.to_string())?;
    let mut count = 0;
    for i in 0..=8u16 {
        for j in 0..=8 - i {
            if i + j == 0 {
                continue;
            }
            let a = f.coefficient(i, j);
            let deg = u32::from(i + j) - 1;
            ensure(a.is_homogeneous_of_degree(deg), || {
                format!("a[{i},{j}] = {a} not of degree {deg}")
            })?;
            count += 1;
        }
    }
    // F = h^{-1}(h(u) + h(v)) with h = u + p1 u^2/2 gives u + v - p1 uv + ...
    let fixture: LazardElement = "-p1".parse().unwrap();
    ensure(f.coefficient(1, 1) == fixture, || {
        format!("a[1,1] = {}", f.coefficient(1, 1))
    })?;
    Ok(format!("{count} coefficients homogeneous, a[1,1] = -p1"))
}

fn integration_matrix() -> Outcome {
    let mut entries = 0;
    for r in 1..=4u32 {
        for l in 1..=4u32 {
            let x = ProjProduct::new(vec![r, l]).map_err(|e| e.to_string())?;
            for i in 0..=r + 1 {
                for j in 0..=l + 1 {
                    let m = ChowClass::monomial(&x, vec![i, j], int(1));
                    let got = chern::integrate(&m);
                    let want = int(i64::from(i == r && j == l));
                    ensure(got == want, || format!("P{r}xP{l}: H1^{i} H2^{j} integrates to {got}"))?;
                    entries += 1;
                }
            }
        }
    }
    Ok(format!("{entries} entries"))
}

fn varieties_up_to(d: u32) -> Vec<ProjProduct> {
    (1..=d).flat_map(ProjProduct::all_of_dimension).collect()
}

fn hrr() -> Outcome {
    let start = Instant::now();
    let ctx = GenusContext::new(6).map_err(|e| e.to_string())?;
    let xs = varieties_up_to(5);
    ensure(xs.len() == 31, || format!("{} varieties", xs.len()))?;
    for x in &xs {
        let r = ctx.hrr(x).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("{x}: lhs = {}, rhs = {}", r.lhs, r.rhs))?;
    }
    let took = within(start, HRR_BUDGET)?;
    Ok(format!("{} varieties in {took:.2?}", xs.len()))
}

/// Every bundle for one cut; unordered pairs for two cuts, thinned by a fixed
/// stride where the pair count is large.
fn hrrc_cases() -> Vec<(ProjProduct, Vec<LineBundleSpec>)> {
    const PAIR_CAP: usize = 2000;
    let mut cases = Vec::new();
    for name in ["P2", "P3", "P1xP1", "P1xP2", "P1xP1xP1", "P2xP2"] {
        let x: ProjProduct = name.parse().unwrap();
        let bundles = LineBundleSpec::all_in_range(&x, -2, 3);
        for b in &bundles {
            cases.push((x.clone(), vec![b.clone()]));
        }
        if x.dim() >= 2 {
            let pairs: Vec<_> = (0..bundles.len())
                .flat_map(|i| (i..bundles.len()).map(move |j| (i, j)))
                .collect();
            let stride = pairs.len().div_ceil(PAIR_CAP);
            for &(i, j) in pairs.iter().step_by(stride) {
                cases.push((x.clone(), vec![bundles[i].clone(), bundles[j].clone()]));
            }
        }
    }
    cases
}

fn hrrc() -> Outcome {
    let start = Instant::now();
    let cases = hrrc_cases();
    ensure(cases.len() >= HRRC_MIN_CASES, || format!("only {} cases", cases.len()))?;
    let ctx = GenusContext::new(5).map_err(|e| e.to_string())?;
    let results = cobordism::hrrc_suite(&ctx, &cases);
    for ((x, bundles), r) in cases.iter().zip(results) {
        let r = r.map_err(|e| format!("{x} {bundles:?}: {e}"))?;
        ensure(r.pass, || {
            format!("{x} {}: lhs = {}, rhs = {}", r.bundles.join(" "), r.lhs, r.rhs)
        })?;
    }
    let took = within(start, HRRC_BUDGET)?;
    Ok(format!("{} cases in {took:.2?}", cases.len()))
}

fn milnor() -> Outcome {
    for d in 0..=6 {
        let m = chern_pairing_matrix(d);
        let det = determinant(&m).map_err(|e| e.to_string())?;
        ensure(!det.is_zero(), || format!("pairing matrix singular in degree {d}"))?;
        let basis = milnor_basis(d);
        for (k, j) in basis.iter().enumerate() {
            let numbers = match cobordism::basis_variety(j) {
                Some(x) => chern::chern_numbers(&x),
                None => ChernNumbers::from([(Partition::empty(), int(1))]),
            };
            let r = decompose(&numbers, d).map_err(|e| e.to_string())?;
            for (i, a) in r.coordinates.iter().enumerate() {
                let want = int(i64::from(i == k));
                ensure(*a == want, || {
                    format!("degree {d}: basis {j} has coordinate {a} at {i}")
                })?;
            }
        }
    }
    let x: ProjProduct = "P1xP1".parse().unwrap();
    let l = LineBundleSpec::parse(&x, "O(1,1)").unwrap();
    let class = cobordism::ell_with_bundles(&x, &[l])
        .map_err(|e| e.to_string())?
        .class();
    let p1: LazardElement = "p1".parse().unwrap();
    ensure(class.value == p1, || {
        format!("O(1,1) in P1xP1 decomposes to {}", class.value)
    })?;
    Ok("degrees 0..6 invertible and idempotent; O(1,1) in P1xP1 is p1".into())
}

fn todd() -> Outcome {
    let ctx = GenusContext::new(6).map_err(|e| e.to_string())?;
    let xs = varieties_up_to(5);
    for x in &xs {
        let lhs = ctx.genus_integral(x, &[]).map_err(|e| e.to_string())?;
        let m = lhs
            .specialize(&GenusSpec::multiplicative())
            .map_err(|e| e.to_string())?;
        ensure(m == int(1), || format!("Todd genus of {x} is {m}"))?;
        let a = lhs.specialize(&GenusSpec::additive()).map_err(|e| e.to_string())?;
        ensure(a.is_zero(), || format!("additive genus of {x} is {a}"))?;
    }
    Ok(format!("{} varieties", xs.len()))
}

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn bivariate(order: u32) -> BoxedStrategy<TruncSeries<Rational>> {
    proptest::collection::vec((0u16..10, 0u16..10, rational()), 0..16)
        .prop_map(move |terms| {
            let uv = var_names(&["u", "v"]);
            TruncSeries::from_terms(&uv, order, terms.into_iter().map(|(i, j, c)| (Exponent([i, j, 0]), c))).unwrap()
        })
        .boxed()
}

fn univariate(order: u32) -> BoxedStrategy<TruncSeries<Rational>> {
    proptest::collection::vec(rational(), order as usize)
        .prop_map(move |c| TruncSeries::from_dense("u", order, c).unwrap())
        .boxed()
}

fn nonzero() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |q| !q.is_zero())
}

fn runner() -> TestRunner {
    let config = Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check(cond: bool, what: &str) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

fn property_suite() -> Outcome {
    let orders = 4u32..=10;
    let mut total = 0;

    runner()
        .run(
            &orders
                .clone()
                .prop_flat_map(|n| (bivariate(n), bivariate(n), bivariate(n))),
            |(a, b, c)| {
                let ab = a.mul(&b).unwrap();
                check(ab == b.mul(&a).unwrap(), "commutativity")?;
                check(
                    ab.mul(&c).unwrap() == a.mul(&b.mul(&c).unwrap()).unwrap(),
                    "associativity",
                )?;
                let lhs = a.add(&b).unwrap().mul(&c).unwrap();
                let rhs = a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap();
                check(lhs == rhs, "distributivity")?;
                check(a.sub(&a).unwrap().is_zero(), "additive inverse")
            },
        )
        .map_err(|e| format!("ring axioms: {e}"))?;
    total += PROPERTY_CASES;

    let unit_linear = orders.clone().prop_flat_map(|n| {
        (univariate(n), nonzero()).prop_map(|(s, a)| {
            let s = s.shift_up(1).unwrap().truncate(s.order());
            let fix = a - s.coeff_at(1);
            let lin = TruncSeries::from_dense("u", s.order(), vec![Rational::zero(), fix]).unwrap();
            s.add(&lin).unwrap()
        })
    });
    runner()
        .run(&unit_linear, |s| {
            let u = TruncSeries::<Rational>::variable(s.vars(), 0, s.order()).unwrap();
            let r = s.revert().unwrap();
            check(s.compose(&r).unwrap() == u, "s(revert s) = u")?;
            check(r.compose(&s).unwrap() == u, "revert s (s) = u")
        })
        .map_err(|e| format!("reversion: {e}"))?;
    total += PROPERTY_CASES;

    let unit_constant = orders.clone().prop_flat_map(|n| {
        (univariate(n), nonzero()).prop_map(|(s, a)| {
            let fix = a - s.constant_term();
            let c = TruncSeries::constant(s.vars(), s.order(), fix).unwrap();
            s.add(&c).unwrap()
        })
    });
    runner()
        .run(&unit_constant, |s| {
            let one = TruncSeries::<Rational>::one(s.vars(), s.order()).unwrap();
            let inv = s.inverse().unwrap();
            check(s.mul(&inv).unwrap() == one, "s * inv(s) = 1")?;
            check(inv.inverse().unwrap() == s, "inv(inv(s)) = s")
        })
        .map_err(|e| format!("inverse: {e}"))?;
    total += PROPERTY_CASES;

    runner()
        .run(
            &orders.prop_flat_map(|n| (bivariate(n), bivariate(n), 2..n)),
            |(a, b, k)| {
                let lhs = a.mul(&b).unwrap().truncate(k);
                let rhs = a.truncate(k).mul(&b.truncate(k)).unwrap();
                check(lhs == rhs, "truncation commutes with mul")?;
                check(
                    a.add(&b).unwrap().truncate(k) == a.truncate(k).add(&b.truncate(k)).unwrap(),
                    "with add",
                )
            },
        )
        .map_err(|e| format!("truncation: {e}"))?;
    total += PROPERTY_CASES;

    Ok(format!("{total} cases, orders 4..10"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("formal group law axioms at order 8", fgl_axioms),
        ("g axiom at order 8", g_axiom),
        ("Lagrange inversion r = 0..6", lagrange),
        ("multiplicative and additive specializations", specializations),
        ("grading of a[i,j] and a[1,1] = -p1", grading),
        ("projective integration matrix", integration_matrix),
        ("HRR for the 31 products of dimension <= 5", hrr),
        ("HRRC for complete intersections", hrrc),
        ("Milnor basis soundness", milnor),
        ("Todd and additive genus regression", todd),
        ("series property suite", property_suite),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
