//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p bergman-core --test acceptance`.

use std::time::{Duration, Instant};

use bergman::expansion::a_series;
use bergman::multiindex::{verify_identity_a, verify_identity_b};
use bergman::numeric::{scaling_slope, unit_disk_samples, KernelReference};
use bergman::oracle::{ModelKernel, QuadratureRule, DEFAULT_NODES};
use bergman::potential::BochnerCheck;
use bergman::solver::{
    check_degree_bound, check_parity, gaussian_moment, solve_coefficients, verify_reproducing,
};
use bergman::{
    BidegreePolynomial, BigRational, Complex, DoubleDouble, ExactJet, ExactSeries, FloatSeries,
    Monomial, MultiIndex,
};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;
type C64 = Complex<f64>;

const MAX_ORDER: u32 = 6;
const RANDOM_JETS: usize = 10;
/// Perturbed slots tried per order above 2 on dense two-variable jets.
const SAMPLED_SLOTS: usize = 20;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn mono(p: &[u32], r: &[u32]) -> Monomial {
    Monomial::new(MultiIndex::new(p).unwrap(), MultiIndex::new(r).unwrap()).unwrap()
}

/// `log(1 + |z|^2)` to total degree `d`.
fn cp1_jet(d: u32) -> ExactJet {
    let terms = (1..=d / 2).map(|m| {
        let sign = if m % 2 == 1 { 1 } else { -1 };
        (mono(&[m], &[m]), Complex::new(q(sign, m as i64), Q::zero()))
    });
    ExactJet::new(BidegreePolynomial::from_terms(1, terms).unwrap(), d).unwrap()
}

/// `|z|^2` plus hermitian terms of bidegree at least (2, 2) up to total degree `d`.
fn random_jet(rng: &mut ChaCha8Rng, dim: usize, d: u32) -> ExactJet {
    let mut phi = ExactJet::flat(dim, d).unwrap().phi().clone();
    for deg in 4..=d {
        for p_deg in 2..=deg - 2 {
            let q_deg = deg - p_deg;
            if p_deg > q_deg {
                continue;
            }
            for p in MultiIndex::of_degree(dim, p_deg) {
                for r in MultiIndex::of_degree(dim, q_deg) {
                    let m = Monomial::new(p, r).unwrap();
                    if phi.get(&m).is_some() || !rng.gen_bool(0.6) {
                        continue;
                    }
                    let re = q(rng.gen_range(-4..=4), rng.gen_range(1..=6));
                    let im = if p == r {
                        Q::zero()
                    } else {
                        q(rng.gen_range(-4..=4), rng.gen_range(1..=6))
                    };
                    let c = Complex::new(re, im);
                    if c.is_zero() {
                        continue;
                    }
                    if p != r {
                        phi.insert_term(m.transpose(), c.conj()).unwrap();
                    }
                    phi.insert_term(m, c).unwrap();
                }
            }
        }
    }
    ExactJet::with_check(phi, d, BochnerCheck::Strict).unwrap()
}

fn truncate(jet: &ExactJet, d: u32) -> ExactJet {
    ExactJet::with_check(jet.phi().degree_part(0, d), d, BochnerCheck::Normal).unwrap()
}

struct Family {
    name: String,
    /// Jet of total degree `MAX_ORDER + 2`.
    jet: ExactJet,
}

fn families() -> Vec<Family> {
    let d = MAX_ORDER + 2;
    let mut out = vec![
        Family {
            name: "flat n=1".into(),
            jet: ExactJet::flat(1, d).unwrap(),
        },
        Family {
            name: "flat n=2".into(),
            jet: ExactJet::flat(2, d).unwrap(),
        },
        Family {
            name: "CP1".into(),
            jet: cp1_jet(d),
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_917);
    for i in 0..RANDOM_JETS {
        let dim = 1 + i % 2;
        out.push(Family {
            name: format!("random #{i} n={dim}"),
            jet: random_jet(&mut rng, dim, d),
        });
    }
    out
}

struct Solved {
    family: Family,
    a: ExactSeries,
    c: ExactSeries,
}

struct Report {
    lines: Vec<(u32, bool, String)>,
}

impl Report {
    fn record(&mut self, id: u32, passed: bool, detail: String) {
        println!(
            "criterion {id}: {} {detail}",
            if passed { "PASS" } else { "FAIL" }
        );
        self.lines.push((id, passed, detail));
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn criterion_1(report: &mut Report) -> Vec<Solved> {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut solved = Vec::new();
    for family in families() {
        for order in 0..=MAX_ORDER {
            let jet = truncate(&family.jet, order + 2);
            let run = || -> bergman::Result<(ExactSeries, ExactSeries, bool)> {
                let a = a_series(&jet, order)?;
                let c = solve_coefficients(&a, order)?;
                let r = verify_reproducing(&c, &a, order, 2 * order + 2)?;
                Ok((a, c, r.passed))
            };
            match run() {
                Ok((a, c, passed)) => {
                    checks += 1;
                    if !passed {
                        failures.push(format!("{} N={order}", family.name));
                    }
                    if order == MAX_ORDER {
                        solved.push(Solved {
                            family: Family {
                                name: family.name.clone(),
                                jet: family.jet.clone(),
                            },
                            a,
                            c,
                        });
                    }
                }
                Err(e) => failures.push(format!("{} N={order}: {e}", family.name)),
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = failures.is_empty() && elapsed <= Duration::from_secs(60);
    report.record(
        1,
        passed,
        format!(
            "exact reproducing identity, L = 2N+2, N = 0..={MAX_ORDER}, {} jets: {checks} solves verified, {} failures {:?}, {} (limit 60 s)",
            solved.len(),
            failures.len(),
            failures,
            secs(elapsed)
        ),
    );
    solved
}

fn criterion_2(report: &mut Report, solved: &[Solved]) {
    let bad: Vec<&str> = solved
        .iter()
        .filter(|s| {
            let n = s.c.dim();
            let c0_ok = *s.c.coeff(0) == BidegreePolynomial::one(n);
            !(c0_ok && s.c.coeff(1).is_zero())
        })
        .map(|s| s.family.name.as_str())
        .collect();
    report.record(
        2,
        bad.is_empty(),
        format!(
            "c_0 = 1 and c_1 = 0 exactly on {} jets, failures {bad:?}",
            solved.len()
        ),
    );
}

fn criterion_3(report: &mut Report, solved: &[Solved]) {
    let mut bad = Vec::new();
    for s in solved {
        let c2 = s.c.coeff(2);
        let curvature = match s.family.jet.curvature_at_origin() {
            Ok(c) => c,
            Err(e) => {
                bad.push(format!("{}: {e}", s.family.name));
                continue;
            }
        };
        if *c2 != curvature.c2_closed_form() {
            bad.push(format!("{}: closed form differs", s.family.name));
        }
        if c2
            .terms()
            .any(|(m, _)| m.holo.norm() == 1 && m.anti.norm() == 1)
        {
            bad.push(format!("{}: bidegree (1,1) term", s.family.name));
        }
    }
    report.record(
        3,
        bad.is_empty(),
        format!(
            "c_2 = rho/2 - 1/4 sum Rm u u vbar vbar exactly, no (1,1) terms, {} jets, failures {bad:?}",
            solved.len()
        ),
    );
}

fn criterion_4(report: &mut Report, solved: &[Solved]) {
    let bad: Vec<&str> = solved
        .iter()
        .filter(|s| {
            !(check_parity(&s.a)
                && check_parity(&s.c)
                && check_degree_bound(&s.a, 2)
                && check_degree_bound(&s.c, 2))
        })
        .map(|s| s.family.name.as_str())
        .collect();
    let terms: usize = solved
        .iter()
        .map(|s| {
            (0..=MAX_ORDER)
                .map(|j| s.a.coeff(j).len() + s.c.coeff(j).len())
                .sum::<usize>()
        })
        .sum();
    report.record(
        4,
        bad.is_empty(),
        format!(
            "parity and degree bound on a- and c-series, {terms} terms scanned, failures {bad:?}"
        ),
    );
}

fn criterion_5(report: &mut Report) {
    let start = Instant::now();
    let mut a_checked = 0usize;
    let mut a_bad = Vec::new();
    for dim in 1..=3 {
        for l in MultiIndex::up_to_degree(dim, 12) {
            a_checked += 1;
            if !verify_identity_a(&l) {
                a_bad.push(l.to_string());
            }
        }
    }
    let mut b_checked = 0usize;
    let mut b_bad = Vec::new();
    for dim in 1..=3 {
        for l in MultiIndex::up_to_degree(dim, 10) {
            for eta in l.below() {
                for r in eta.below() {
                    if r == eta {
                        continue;
                    }
                    b_checked += 1;
                    if !verify_identity_b(&l, &eta, &r).unwrap_or(false) {
                        b_bad.push(format!("({l}, {eta}, {r})"));
                    }
                }
            }
        }
    }
    report.record(
        5,
        a_bad.is_empty() && b_bad.is_empty(),
        format!(
            "identity A on {a_checked} indices (|l| <= 12, n <= 3), identity B on {b_checked} triples (|l| <= 10, eta <= l, r < eta), failures {} + {}, {}",
            a_bad.len(),
            b_bad.len(),
            secs(start.elapsed())
        ),
    );
}

fn criterion_6(report: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_rel = 0.0f64;
    let mut worst_abs_zero = 0.0f64;
    let mut count = 0usize;
    for dim in 1..=2usize {
        let rule = QuadratureRule::<DoubleDouble>::new(dim, DEFAULT_NODES).unwrap();
        let indices = MultiIndex::up_to_degree(dim, 6);
        for _ in 0..100 {
            // uniform in the unit ball of C^dim
            let u: Vec<C64> = loop {
                let u: Vec<C64> = (0..dim)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                if u.iter().map(|z| z.norm_sqr()).sum::<f64>() <= 1.0 {
                    break u;
                }
            };
            let tables: Vec<_> = u
                .iter()
                .map(|z| {
                    let w =
                        Complex::new(DoubleDouble::from_f64(z.re), DoubleDouble::from_f64(z.im));
                    rule.moment_table(w, 6, 6)
                })
                .collect();
            for p in &indices {
                for qi in &indices {
                    count += 1;
                    let mut num = Complex::new(DoubleDouble::ONE, DoubleDouble::ZERO);
                    for (i, t) in tables.iter().enumerate() {
                        num *= t[p.get(i) as usize][qi.get(i) as usize];
                    }
                    let num = C64::new(num.re.to_f64(), num.im.to_f64());
                    let exact = gaussian_moment(p, qi).unwrap();
                    let mut val = C64::new(exact.coefficient.to_f64().unwrap(), 0.0);
                    for (i, z) in u.iter().enumerate() {
                        val *= z.powu(exact.u_exponent.get(i));
                    }
                    if exact.is_zero() {
                        worst_abs_zero = worst_abs_zero.max(num.norm());
                    } else {
                        worst_rel = worst_rel.max((num - val).norm() / val.norm());
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let passed =
        worst_rel <= 1e-10 && worst_abs_zero <= 1e-10 && elapsed <= Duration::from_secs(10);
    report.record(
        6,
        passed,
        format!(
            "{count} moments, max relative error {worst_rel:.2e}, max |value| where exact is 0 {worst_abs_zero:.2e} (tol 1e-10), {} (limit 10 s)",
            secs(elapsed)
        ),
    );
}

fn criterion_7(report: &mut Report) {
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for k in [16u32, 64, 256, 1024] {
        match ModelKernel::cp1(k) {
            Ok(m) => {
                for r in [0.0, 0.3, 1.0, 2.5, 10.0] {
                    match m.bergman_function(&[C64::from_polar(r, 0.7)]) {
                        Ok(b) => worst = worst.max((b / (k as f64 + 1.0) - 1.0).abs()),
                        Err(e) => errors.push(e.to_string()),
                    }
                }
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    let a = a_series(&cp1_jet(6), 4).unwrap();
    let c = solve_coefficients(&a, 4).unwrap();
    let origin = Monomial::one(1);
    let diag = |j: u32| {
        c.coeff(j)
            .get(&origin)
            .cloned()
            .unwrap_or_else(Complex::zero)
    };
    let exact_ok = diag(2) == Complex::one() && diag(3).is_zero() && diag(4).is_zero();
    report.record(
        7,
        errors.is_empty() && worst <= 1e-8 && exact_ok,
        format!(
            "B = k+1 max relative error {worst:.2e} (tol 1e-8) over k in {{16, 64, 256, 1024}}; c_2^00 = {}, c_3^00 = {}, c_4^00 = {}; errors {errors:?}",
            diag(2).re,
            diag(3).re,
            diag(4).re
        ),
    );
}

fn cp1_float_series(order: u32) -> FloatSeries {
    let a = a_series(&cp1_jet(order + 2), order).unwrap();
    solve_coefficients(&a, order).unwrap().to_scalar()
}

fn fit(refs: &[KernelReference], c: &FloatSeries, order: u32) -> bergman::Result<f64> {
    let pairs = refs
        .iter()
        .map(|r| Ok((r.tensor_power() as f64, r.error(c, order)?)))
        .collect::<bergman::Result<Vec<_>>>()?;
    scaling_slope(&pairs)
}

fn criterion_8(report: &mut Report) -> Option<(Vec<KernelReference>, f64, f64)> {
    let start = Instant::now();
    let samples = unit_disk_samples();
    let refs: bergman::Result<Vec<_>> = (6..=12)
        .map(|e| KernelReference::cp1(1 << e, &samples))
        .collect();
    let refs = match refs {
        Ok(r) => r,
        Err(e) => {
            report.record(8, false, format!("oracle failed: {e}"));
            return None;
        }
    };
    let s2 = fit(&refs, &cp1_float_series(2), 2);
    let s4 = fit(&refs, &cp1_float_series(4), 4);
    let elapsed = start.elapsed();
    match (s2, s4) {
        (Ok(s2), Ok(s4)) => {
            let passed = s2 <= -0.15 && s2 - s4 >= 0.7 && elapsed <= Duration::from_secs(300);
            report.record(
                8,
                passed,
                format!(
                    "CP1 kernel error slope over k = 64..4096 (7 points, {} sample pairs): N=2 {s2:.3} (need <= -0.15), N=4 {s4:.3} (improvement {:.3}, need >= 0.7), {} (limit 300 s)",
                    samples.len() * samples.len(),
                    s2 - s4,
                    secs(elapsed)
                ),
            );
            Some((refs, s2, s4))
        }
        (a, b) => {
            report.record(8, false, format!("slope fit failed: {a:?} {b:?}"));
            None
        }
    }
}

/// Every coefficient slot `(j, p, q)` with `j <= order` and `|p| + |q| <= 2j + 2`.
fn slots(dim: usize, order: u32) -> Vec<(u32, Monomial)> {
    let mut out = Vec::new();
    for j in 0..=order {
        for deg in 0..=2 * j + 2 {
            for pd in 0..=deg {
                for p in MultiIndex::of_degree(dim, pd) {
                    for r in MultiIndex::of_degree(dim, deg - pd) {
                        out.push((j, Monomial::new(p, r).unwrap()));
                    }
                }
            }
        }
    }
    out
}

fn perturb<R: bergman::Real>(
    c: &bergman::HalfPowerSeries<R>,
    j: u32,
    m: Monomial,
) -> bergman::HalfPowerSeries<R> {
    let mut out = c.clone();
    let mut p = out.coeff(j).clone();
    let old = p.get(&m).cloned().unwrap_or_else(Complex::zero);
    p.set(m, old + Complex::one()).unwrap();
    out.set(j, p).unwrap();
    out
}

fn criterion_9(
    report: &mut Report,
    solved: &[Solved],
    slopes: Option<(Vec<KernelReference>, f64, f64)>,
) {
    let start = Instant::now();
    let mut verify_total = 0usize;
    let mut verify_missed = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for s in solved {
        let dim = s.c.dim();
        let all = slots(dim, MAX_ORDER);
        // a verify at order 6 on a dense two-variable jet costs about half a
        // second, so those jets get every slot up to order 2 and a fixed
        // sample of the higher ones
        let exhaustive = dim == 1 || s.family.name.starts_with("flat");
        let mut chosen: Vec<_> = all
            .iter()
            .filter(|(j, _)| exhaustive || *j <= 2)
            .cloned()
            .collect();
        if !exhaustive {
            for j in 3..=MAX_ORDER {
                let at_j: Vec<_> = all.iter().filter(|(t, _)| *t == j).cloned().collect();
                chosen.extend(at_j.choose_multiple(&mut rng, SAMPLED_SLOTS).cloned());
            }
        }
        for (j, m) in chosen {
            verify_total += 1;
            let bad = perturb(&s.c, j, m);
            // checking orders 0..=j is a subset of the full check, so a
            // failure here is a failure of the full check
            match verify_reproducing(&bad, &s.a, j, 2 * MAX_ORDER + 2) {
                Ok(r) if !r.passed => {}
                other => verify_missed.push(format!("{} c_{j}^{m}: {other:?}", s.family.name)),
            }
        }
    }
    let verify_time = start.elapsed();

    let mut slope_total = 0usize;
    let mut slope_missed = Vec::new();
    let mut min_degrade = f64::INFINITY;
    let slopes_ok = match slopes {
        Some((refs, s2, s4)) => {
            for (order, base) in [(2u32, s2), (4, s4)] {
                let c = cp1_float_series(order);
                for (j, m) in slots(1, order) {
                    slope_total += 1;
                    let bad = perturb(&c, j, m);
                    match fit(&refs, &bad, order) {
                        Ok(s) => {
                            min_degrade = min_degrade.min(s - base);
                            if s - base < 0.4 {
                                slope_missed.push(format!("N={order} c_{j}^{m}: slope {s:.3}"));
                            }
                        }
                        Err(e) => slope_missed.push(format!("N={order} c_{j}^{m}: {e}")),
                    }
                }
            }
            true
        }
        None => false,
    };
    report.record(
        9,
        slopes_ok && verify_missed.is_empty() && slope_missed.is_empty(),
        format!(
            "unit perturbations: {verify_total} caught by verify_reproducing, {} missed ({}); {slope_total} CP1 slope fits, minimum degradation {min_degrade:.3} (need >= 0.4), {} missed {:?}; {}",
            verify_missed.len(),
            secs(verify_time),
            slope_missed.len(),
            slope_missed,
            secs(start.elapsed())
        ),
    );
    if !verify_missed.is_empty() {
        println!(
            "  first missed: {:?}",
            &verify_missed[..verify_missed.len().min(5)]
        );
    }
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let mut report = Report { lines: Vec::new() };
    let solved = criterion_1(&mut report);
    criterion_2(&mut report, &solved);
    criterion_3(&mut report, &solved);
    criterion_4(&mut report, &solved);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    let slopes = criterion_8(&mut report);
    criterion_9(&mut report, &solved, slopes);

    let failed: Vec<u32> = report
        .lines
        .iter()
        .filter(|(_, ok, _)| !ok)
        .map(|(id, _, _)| *id)
        .collect();
    println!(
        "acceptance: {} of {} criteria passed",
        report.lines.len() - failed.len(),
        report.lines.len()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
