//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime
//! limit. Exits nonzero if any criterion fails.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bhbound::bounds::{
    certify_envelope, check_table_row, bounded_base, envelope_claims, implied_base, printed_tables,
    prefactor, theorem_claim, CertStatus,
};
use bhbound::forms::{
    bh_ratio, random_form, sequence_bound, sup_norm_complex_ascent, sup_norm_real_exact,
    sup_norm_real_grid, trial_seed, verify_batch, AscentOptions, CoefficientTensor,
    OracleOptions,
};
use bhbound::precision::{
    compare_strict, d_constant, log2_d, CertifiedInterval, Comparison, Decimal, Dyadic, FieldTag,
    Round,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use bhbound::sequences::{
    block_of, j_sequence_uncached, BaseConstants, SequenceEvaluator, SequenceSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dec(s: &str) -> Decimal {
    s.parse().unwrap()
}

fn exponent_certification() -> Outcome {
    for (field, e) in [(FieldTag::Real, "0.526322"), (FieldTag::Complex, "0.304975")] {
        let l = log2_d(field, 128).map_err(|e| e.to_string())?;
        let bound = CertifiedInterval::from_decimal(&dec(e), 128);
        ensure(compare_strict(&l, &bound) == Comparison::CertifiedLess, || {
            format!("log2 D ({field}) = {l:?} not certified below {e}")
        })?;
    }
    Ok("log2 D_real < 0.526322 and log2 D_complex < 0.304975 at 128 bits".into())
}

fn theorem_reproduction() -> Outcome {
    let base = bounded_base(4).map_err(|e| e.to_string())?;
    let p = prefactor(4, &base, 128).map_err(|e| e.to_string())?;
    ensure(p.hi_lt_decimal(&dec("1.338887")), || format!("4/D^3 = {p:?}"))?;
    let r = certify_envelope(&theorem_claim(), &SequenceSpec::j(base), 1 << 20, 128)
        .map_err(|e| e.to_string())?;
    ensure(r.status == CertStatus::Certified, || format!("{r:?}"))?;
    Ok(format!(
        "4/D^3 <= {} < 1.338887; J-sequence claim certified on {} blocks to 2^20",
        p.hi_string(12),
        r.blocks_checked
    ))
}

fn table_regression() -> Outcome {
    let rows = printed_tables();
    let mut complex = Vec::new();
    for row in &rows {
        let base = implied_base(row, 128).map_err(|e| e.to_string())?;
        let c = check_table_row(row, Some(&base), 128).map_err(|e| e.to_string())?;
        ensure(c.digits_match == Some(true), || {
            format!("k0 = {} ({}): recomputed {:?} vs printed {}", row.k0, row.field(), c.rounded, row.printed())
        })?;
        ensure(c.passed(), || format!("row k0 = {} failed: {c:?}", row.k0))?;
        if row.field() == FieldTag::Complex {
            complex.push(c.recomputed.clone().unwrap());
        }
    }
    ensure(complex.len() == 8, || "expected 8 complex rows".into())?;
    for w in complex.windows(2) {
        ensure(compare_strict(&w[1], &w[0]) == Comparison::CertifiedLess, || {
            format!("not strictly decreasing: {:?} then {:?}", w[0], w[1])
        })?;
    }
    Ok("11-digit complex rows and 6-digit real rows round-trip; complex prefactors strictly decrease".into())
}

fn envelope_certification() -> Outcome {
    let claims = envelope_claims();
    let mut blocks = Vec::new();
    for (claim, field) in claims.iter().zip(FieldTag::ALL) {
        let r = certify_envelope(claim, &SequenceSpec::m(field), 1 << 20, 128)
            .map_err(|e| e.to_string())?;
        ensure(r.status == CertStatus::Certified, || format!("{r:?}"))?;
        blocks.push(r.blocks_checked);
    }
    Ok(format!("real and complex envelopes certified to 2^20 ({:?} block comparisons)", blocks))
}

/// Exact exponent of `D` in `J_n / c` for a base constant on `1..=2^k0`:
/// e(n) = 1 + (n-1)/(2n) e((n-1)/2) + (n+1)/(2n) e((n+1)/2) for odd n,
/// e(n) = 1 + e(n/2) for even n, and 0 inside the base range.
fn exponent_oracle(n: u64, k0: u32, memo: &mut HashMap<u64, BigRational>) -> BigRational {
    if n <= 1 << k0 {
        return BigRational::zero();
    }
    if let Some(e) = memo.get(&n) {
        return e.clone();
    }
    let one = BigRational::one();
    let e = if n % 2 == 0 {
        &one + exponent_oracle(n / 2, k0, memo)
    } else {
        let (a, b) = ((n - 1) / 2, (n + 1) / 2);
        let wa = BigRational::new(BigInt::from(n - 1), BigInt::from(2 * n));
        let wb = BigRational::new(BigInt::from(n + 1), BigInt::from(2 * n));
        &one + wa * exponent_oracle(a, k0, memo) + wb * exponent_oracle(b, k0, memo)
    };
    memo.insert(n, e.clone());
    e
}

fn rational_interval(q: &BigRational, prec: u32) -> CertifiedInterval {
    let n = Dyadic::from_bigint(q.numer().clone());
    let d = Dyadic::from_bigint(q.denom().clone());
    CertifiedInterval::new(n.div(&d, prec, Round::Down), n.div(&d, prec, Round::Up), prec).unwrap()
}

fn recurrence_oracle() -> Outcome {
    let prec = 128;
    let c = dec("1.5");
    let mut checked = 0;
    let mut literal_holds = 0;
    let mut first_counterexample = None;
    for (field, k0) in [(FieldTag::Real, 2), (FieldTag::Complex, 3)] {
        let base = BaseConstants::constant(field, k0, c.clone(), "test").map_err(|e| e.to_string())?;
        let spec = SequenceSpec::j(base);
        let eval = SequenceEvaluator::new();
        let d = d_constant(field, prec).map_err(|e| e.to_string())?;
        let cc = CertifiedInterval::from_decimal(&c, prec);
        let mut memo = HashMap::new();
        for n in 1..=4096u64 {
            let got = eval.j_sequence(n, &spec, prec).map_err(|e| e.to_string())?;
            let e = exponent_oracle(n, k0, &mut memo);
            let expect = cc.mul(&d.pow(&rational_interval(&e, prec)).map_err(|e| e.to_string())?);
            ensure(got.overlaps(&expect), || format!("n = {n}: {got:?} vs c D^{e} = {expect:?}"))?;

            // c D^(k-k0) is the value at the right end of block k and an
            // upper bound on the whole block
            let k = if n == 1 { 0 } else { block_of(n).unwrap().k() };
            let block_top = cc.mul(&d.powi(i64::from(k.saturating_sub(k0))).unwrap());
            ensure(compare_strict(&got, &block_top) != Comparison::CertifiedGreater, || {
                format!("n = {n}: {got:?} above c D^(k-k0) = {block_top:?}")
            })?;
            if n.is_power_of_two() {
                ensure(got.overlaps(&block_top), || format!("n = {n}: {got:?} vs {block_top:?}"))?;
            }
            if got.overlaps(&block_top) {
                literal_holds += 1;
            } else if first_counterexample.is_none() {
                first_counterexample = Some((field, n, e.clone()));
            }
            checked += 1;
        }
    }
    // plain recursion is exponential in the number of odd steps, so it is
    // run with a deeper base for the full range and a shallow one below 512
    for (k0, top) in [(8u32, 4096u64), (2, 512)] {
        let base = BaseConstants::constant(FieldTag::Real, k0, c.clone(), "test").map_err(|e| e.to_string())?;
        let spec = SequenceSpec::j(base);
        let eval = SequenceEvaluator::new();
        for n in 1..=top {
            let memo = eval.j_sequence(n, &spec, prec).map_err(|e| e.to_string())?;
            let plain = j_sequence_uncached(n, &spec, prec).map_err(|e| e.to_string())?;
            ensure(memo == plain, || format!("k0 = {k0}, n = {n}: {memo:?} != {plain:?}"))?;
        }
    }
    let note = match first_counterexample {
        Some((field, n, e)) => format!(
            "NOTE block-constant form c*D^(k-k0) holds for {literal_holds} of {checked}; first miss {field} n = {n} where J_n = c*D^({e})"
        ),
        None => format!("block-constant form holds for all {checked}"),
    };
    Ok(format!(
        "{checked} overlaps with exact c*D^e(n), bounded by c*D^(k-k0) with equality at 2^k; memoized == plain recursion; {note}"
    ))
}

fn empirical_suite() -> Outcome {
    let lw = CoefficientTensor::littlewood(FieldTag::Real, 2).unwrap();
    let r = bh_ratio(&lw).map_err(|e| e.to_string())?;
    ensure((r.ratio - 2f64.sqrt()).abs() <= 1e-12, || format!("Littlewood ratio {}", r.ratio))?;

    let opts = OracleOptions::default();
    let seed = 20_240_101;
    let mut maxima = Vec::new();
    for (n, dim, trials) in [(2usize, 2usize, 1000u64), (3, 3, 500)] {
        let bound = sequence_bound(FieldTag::Real, n).map_err(|e| e.to_string())?;
        let b = verify_batch(n, dim, FieldTag::Real, trials, seed, &bound, &opts)
            .map_err(|e| e.to_string())?;
        ensure(b.passed(), || format!("violations for n = {n}: {:?}", b.violations))?;
        maxima.push(format!("n={n}: {:.6} <= {:.6}", b.max_ratio, bound.value));
    }

    // (arity, dim, grid steps): resolution 2/steps
    let shapes = [(2, 2, 16), (1, 4, 16), (4, 1, 16), (3, 1, 16), (2, 3, 4), (3, 2, 4)];
    for i in 0..200u64 {
        let (n, dim, steps) = shapes[i as usize % shapes.len()];
        let f = random_form(n, dim, FieldTag::Real, trial_seed(7, i)).unwrap();
        let exact = sup_norm_real_exact(&f).map_err(|e| e.to_string())?;
        let grid = sup_norm_real_grid(&f, steps).map_err(|e| e.to_string())?;
        ensure(grid <= exact + 1e-12 && (exact - grid).abs() <= 1e-12 * exact.max(1.0), || {
            format!("instance {i} ({n}, {dim}): vertex {exact} vs grid {grid}")
        })?;
    }
    Ok(format!("Littlewood ratio = sqrt 2; {}; 200 grid cross-checks", maxima.join(", ")))
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut sound = 0;
    let mut attempts = 0;
    while sound < 1000 {
        attempts += 1;
        ensure(attempts < 200_000, || "too few evaluable expressions".into())?;
        let e = common::random_expr(&mut rng, 6);
        let (Some(lo), Some(hi)) = (common::eval(&e, 64), common::eval(&e, 256)) else {
            continue;
        };
        ensure(lo.contains(&hi.midpoint()), || format!("{e:?}: {lo:?} misses {hi:?}"))?;
        sound += 1;
    }

    let opts = AscentOptions::default();
    for s in 0..20 {
        let f = random_form(2 + s as usize % 2, 3, FieldTag::Complex, trial_seed(11, s)).unwrap();
        let r = sup_norm_complex_ascent(&f, &opts).map_err(|e| e.to_string())?;
        for t in &r.traces {
            for w in t.windows(2) {
                ensure(w[1] >= w[0] - 1e-12 * w[0], || format!("ascent decreased: {t:?}"))?;
            }
        }
    }

    for s in 0..50 {
        let f = random_form(3, 2, FieldTag::Real, trial_seed(13, s)).unwrap();
        let base = bh_ratio(&f).map_err(|e| e.to_string())?.ratio;
        let scaled = bh_ratio(&f.scaled(3.75)).map_err(|e| e.to_string())?.ratio;
        ensure((scaled - base).abs() <= 1e-12 * base, || format!("scaling changed {base} to {scaled}"))?;
        for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let p = bh_ratio(&f.permute_slots(&perm).unwrap()).map_err(|e| e.to_string())?.ratio;
            ensure((p - base).abs() <= 1e-12 * base, || format!("permutation {perm:?} changed {base} to {p}"))?;
        }
    }

    let bound = sequence_bound(FieldTag::Complex, 2).map_err(|e| e.to_string())?;
    let opts = OracleOptions::default();
    let a = verify_batch(2, 2, FieldTag::Complex, 40, 99, &bound, &opts).map_err(|e| e.to_string())?;
    let b = verify_batch(2, 2, FieldTag::Complex, 40, 99, &bound, &opts).map_err(|e| e.to_string())?;
    ensure(a == b, || "batches with one seed differ".into())?;
    ensure(random_form(3, 3, FieldTag::Real, 5).unwrap() == random_form(3, 3, FieldTag::Real, 5).unwrap(), || {
        "random_form is not deterministic".into()
    })?;
    Ok(format!("{sound} sound enclosures ({attempts} drawn); ascent, homogeneity, permutation, seeding hold"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 7] = [
        ("1 exponent certification", Duration::from_secs(1), exponent_certification),
        ("2 theorem reproduction", Duration::from_secs(5), theorem_reproduction),
        ("3 table regression", Duration::from_secs(5), table_regression),
        ("4 envelope certification", Duration::from_secs(1), envelope_certification),
        ("5 recurrence oracle equivalence", Duration::from_secs(60), recurrence_oracle),
        ("6 empirical inequality suite", Duration::from_secs(60), empirical_suite),
        ("7 property suite", Duration::from_secs(120), property_suite),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let line = match outcome {
            Ok(msg) if took <= limit => format!("PASS  criterion {name} [{took:.2?} <= {limit:?}]: {msg}"),
            Ok(msg) => format!("FAIL  criterion {name} [{took:.2?} > {limit:?}]: {msg}"),
            Err(msg) => format!("FAIL  criterion {name} [{took:.2?}]: {msg}"),
        };
        if line.starts_with("FAIL") {
            failed += 1;
        }
        println!("{line}");
    }
    if failed == 0 {
        println!("acceptance: all 7 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 7 criteria failed");
        ExitCode::FAILURE
    }
}
