//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Exits nonzero if any criterion fails, except for criterion 1 failing with
//! exactly the discrepancy recorded in `KNOWN_GOLDEN_MISMATCHES`.

use std::collections::BTreeMap;
use std::panic;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use recur2d::fill::{superpose, DiagonalFill, FillStrategy, Worklist};
use recur2d::parser::parse_template;
use recur2d::{
    classify_and_solve, cli, fill, oracle_equals_fill, Bounds, Classification, FieldDescriptor,
    FillStatus, Layout, Overlay, Scalar, Template, ValueSource,
};

const Q: FieldDescriptor = FieldDescriptor::Rational;

fn f7() -> FieldDescriptor {
    FieldDescriptor::prime(7).unwrap()
}

fn q(text: &str) -> Scalar {
    Scalar::parse(text, Q).unwrap()
}

fn example() -> Overlay {
    Overlay::from_template(&parse_template("XY + 3Y + 2X - I", Q).unwrap()).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn check(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// The reference grid's rows -1..=3 by columns -1..=3.
const GOLDEN: [[&str; 5]; 5] = [
    ["1", "0", "-2/3", "2/9", "-2/27"],
    ["0", "1", "0", "0", "0"],
    ["-3/2", "0", "1", "2", "4"],
    ["3/4", "0", "3", "13", "40"],
    ["-3/8", "0", "9", "58", "249"],
];

/// Reference cells that contradict the recurrence, with the forced values.
/// `A(3,2) = A(2,1) + 3 A(2,2) + 2 A(3,1) = 3 + 39 + 18 = 60`, and then
/// `A(3,3) = 13 + 3*40 + 2*60 = 253`.
const KNOWN_GOLDEN_MISMATCHES: [((i64, i64), &str, &str); 2] =
    [((3, 2), "58", "60"), ((3, 3), "249", "253")];

fn golden(r: i64, c: i64) -> Scalar {
    q(GOLDEN[(r + 1) as usize][(c + 1) as usize])
}

fn golden_fill() -> (Bounds, recur2d::FillResult) {
    let b = Bounds::new(-1, 3, -1, 3).unwrap();
    let lay = Layout::standard(&example(), b, 0, 0, &ValueSource::Delta((0, 0))).unwrap();
    (b, fill(&example(), &lay, b).unwrap())
}

fn criterion_1() -> (Outcome, bool) {
    let start = Instant::now();
    let (b, res) = golden_fill();
    let elapsed = start.elapsed();
    let mut mismatches = Vec::new();
    for (r, c) in b.coords() {
        let got = res.window.value(r, c).cloned();
        if got.as_ref() != Some(&golden(r, c)) {
            mismatches.push((
                (r, c),
                golden(r, c).to_string(),
                got.map_or("?".into(), |v| v.to_string()),
            ));
        }
    }
    // The reference grid checked against the recurrence on its own.
    let self_violations: Vec<_> = example()
        .placements(&b)
        .into_iter()
        .filter(|&(r, c)| {
            let sum = example()
                .placement_equation(r, c)
                .into_iter()
                .fold(Scalar::zero(Q), |acc, ((x, y), coef)| {
                    &acc + &(&coef * &golden(x, y))
                });
            !sum.is_zero()
        })
        .collect();
    let fast = elapsed < Duration::from_secs(1);
    let pass = mismatches.is_empty() && fast;
    let listed: Vec<String> = mismatches
        .iter()
        .map(|((r, c), want, got)| format!("({r},{c}) reference {want} computed {got}"))
        .collect();
    let detail = format!(
        "{}/25 cells match{}; reference grid violates the recurrence at placements {:?}; {} ms",
        25 - mismatches.len(),
        if listed.is_empty() {
            String::new()
        } else {
            format!(" [{}]", listed.join(", "))
        },
        self_violations,
        elapsed.as_millis()
    );
    let known: Vec<_> = KNOWN_GOLDEN_MISMATCHES
        .iter()
        .map(|(cell, want, got)| (*cell, want.to_string(), got.to_string()))
        .collect();
    let tolerated = !pass && fast && mismatches == known;
    (Outcome::check(pass, detail), tolerated)
}

fn criterion_2() -> Outcome {
    let (_, res) = golden_fill();
    let wanted = [((1, 1), 1), ((1, 2), 2), ((2, 1), 3)];
    let mut found = 0;
    for (cell, z) in wanted {
        let ok = res.steps.iter().any(|s| {
            s.solved == cell
                && s.placement == cell
                && s.value == Scalar::from_i64(z, Q)
                && s.pivot_coeff == q("-1")
        });
        found += ok as usize;
    }
    Outcome::check(
        found == 3,
        format!("{found}/3 walkthrough solves in the step log (pivot -1)"),
    )
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * k)
}

fn binomial(r: i64, c: i64) -> BigInt {
    if c < 0 || c > r {
        BigInt::from(0)
    } else {
        factorial(r) / (factorial(c) * factorial(r - c))
    }
}

fn criterion_3() -> Outcome {
    let o = Overlay::from_template(&parse_template("I - Y - XY", Q).unwrap()).unwrap();
    let b = Bounds::new(0, 10, -11, 10).unwrap();
    let lay = Layout::standard(&o, b, 0, 0, &ValueSource::Delta((0, 0))).unwrap();
    let res = fill(&o, &lay, b).unwrap();
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in 0..=10 {
        for c in 0..=r {
            checked += 1;
            if res.window.value(r, c) != Some(&Scalar::from_bigint(&binomial(r, c), Q)) {
                bad.push((r, c));
            }
        }
    }
    let stray = res
        .window
        .known()
        .filter(|&((r, c), v)| !(0..=r).contains(&c) && !v.is_zero())
        .count();
    Outcome::check(
        bad.is_empty() && stray == 0,
        format!(
            "{checked} binomial cells, {} wrong, {stray} nonzero cells outside 0<=c<=r",
            bad.len()
        ),
    )
}

/// Nonzero value of `field`.
fn nonzero(rng: &mut ChaCha8Rng, field: FieldDescriptor) -> Scalar {
    Scalar::sample(rng, field, true)
}

/// Overlay of exactly `rows x cols` whose extreme rows have contiguous support.
fn random_overlay(rng: &mut ChaCha8Rng, field: FieldDescriptor, rows: u32, cols: u32) -> Overlay {
    loop {
        let mut terms = Vec::new();
        for i in 0..rows {
            if i == 0 || i == rows - 1 {
                let lo = rng.gen_range(0..cols);
                let hi = rng.gen_range(lo..cols);
                terms.extend((lo..=hi).map(|j| ((i, j), nonzero(rng, field))));
            } else {
                for j in 0..cols {
                    if rng.gen_bool(0.6) {
                        terms.push(((i, j), nonzero(rng, field)));
                    }
                }
            }
        }
        let t = Template::from_terms(field, terms).unwrap();
        let Ok(o) = Overlay::from_template(&t) else {
            continue;
        };
        if o.m() + 1 == rows as usize && o.n() + 1 == cols as usize && o.extreme_rows_contiguous() {
            return o;
        }
    }
}

/// Random window of at most 8 x 8 and standard layout for `o`.
fn random_standard(rng: &mut ChaCha8Rng, o: &Overlay) -> (Bounds, Layout) {
    let (m, n) = (o.m() as i64, o.n() as i64);
    let h = rng.gen_range((m + 1).max(1)..=8);
    let w = rng.gen_range(n + 1..=8);
    let r_min = -rng.gen_range(0..=h - m.max(1));
    let c_min = -rng.gen_range(0..=3);
    let b = Bounds::new(r_min, r_min + h - 1, c_min, c_min + w - 1).unwrap();
    let a = rng.gen_range(c_min..=b.c_max - o.u() as i64 + 1);
    let d = rng.gen_range(c_min..=b.c_max - o.l() as i64 + 1);
    let values = match rng.gen_range(0..6) {
        0 => ValueSource::Zero,
        1 => ValueSource::Delta((0, d)),
        _ => ValueSource::Random { seed: rng.gen() },
    };
    let lay = Layout::standard(o, b, a, d, &values).unwrap();
    (b, lay)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut cases = 0;
    let mut failures = Vec::new();
    let mut statuses: BTreeMap<&str, usize> = BTreeMap::new();
    for k in 0..240 {
        let field = if k % 2 == 0 { Q } else { f7() };
        let (rows, cols) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let o = random_overlay(&mut rng, field, rows, cols);
        let (b, lay) = random_standard(&mut rng, &o);
        let diff = oracle_equals_fill(&o, &lay, b).unwrap();
        *statuses.entry(diff.fill_status).or_default() += 1;
        cases += 1;
        if !diff.agrees() {
            failures.push(format!(
                "case {k}: {} vs {}",
                diff.fill_status, diff.oracle_status
            ));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(60);
    Outcome::check(
        pass,
        format!(
            "{}/{cases} cases agree, fill statuses {statuses:?}, {:.1} s{}",
            cases - failures.len(),
            elapsed.as_secs_f64(),
            failures
                .first()
                .map_or(String::new(), |f| format!("; first failure {f}"))
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut agree = 0;
    let total = 60;
    for k in 0..total {
        let field = if k % 2 == 0 { Q } else { f7() };
        let (rows, cols) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let o = random_overlay(&mut rng, field, rows, cols);
        let (b, lay) = random_standard(&mut rng, &o);
        let direct = fill(&o, &lay, b).unwrap().window;
        agree += (superpose(&Worklist, &o, &lay, b).unwrap() == direct) as usize;
    }
    Outcome::check(
        agree == total,
        format!("{agree}/{total} superpositions equal the direct fill"),
    )
}

fn criterion_6() -> Outcome {
    let b = Bounds::new(-5, 6, -5, 6).unwrap();
    let lay = Layout::standard(&example(), b, 0, 0, &ValueSource::Zero).unwrap();
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for j in 1..=5 {
        let e = recur2d::fill::basis_array(&Worklist, &example(), &lay, (0, j), b).unwrap();
        for (r, c) in b.coords().filter(|&(_, c)| c < j) {
            if let Some(v) = e.value(r, c) {
                checked += 1;
                if !v.is_zero() {
                    counterexamples.push(((r, c), v.to_string()));
                }
            }
        }
    }
    Outcome::check(
        counterexamples.is_empty() && checked > 0,
        format!(
            "{checked} cells checked, {} counterexamples",
            counterexamples.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let total = 60;
    let mut agree = 0;
    for _ in 0..total {
        let field = f7();
        let t = Template::from_terms(
            field,
            [
                ((0, 0), nonzero(&mut rng, field)),
                ((1, 0), nonzero(&mut rng, field)),
                ((1, 1), nonzero(&mut rng, field)),
            ],
        )
        .unwrap();
        let o = Overlay::from_template(&t).unwrap();
        let low = -rng.gen_range(1..=6);
        let k = rng.gen_range(-3..=3);
        let b = Bounds::new(low + k, k, low + k, k).unwrap();
        let lay = Layout::diagonal(k, b, field, &ValueSource::Random { seed: rng.gen() }).unwrap();
        let diag = DiagonalFill.fill(&o, &lay, b).unwrap();
        let generic = Worklist.fill(&o, &lay, b).unwrap();
        let unique = matches!(
            classify_and_solve(&o, &lay, b).unwrap(),
            Classification::Unique { ref assignment } if *assignment == diag.window
        );
        agree += (diag.status == FillStatus::Complete && diag.window == generic.window && unique)
            as usize;
    }
    Outcome::check(
        agree == total,
        format!("{agree}/{total} stencils: diagonal = generic = unique oracle solution"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let total = 30;
    let mut ok = 0;
    for k in 0..total {
        let field = if k % 2 == 0 { Q } else { f7() };
        let n = rng.gen_range(2..=4);
        let o = random_overlay(&mut rng, field, 1, n);
        let b = Bounds::new(
            -rng.gen_range(0..4),
            rng.gen_range(0..4),
            -rng.gen_range(0..5),
            rng.gen_range(3..7),
        )
        .unwrap();
        let start = rng.gen_range(b.c_min..=b.c_max - o.n() as i64 + 1);
        let lay = Layout::standard(
            &o,
            b,
            start,
            start,
            &ValueSource::Random { seed: rng.gen() },
        )
        .unwrap();
        let columns_only = lay.len() == o.n() * b.height();
        let res = fill(&o, &lay, b).unwrap();
        let unique = matches!(
            classify_and_solve(&o, &lay, b).unwrap(),
            Classification::Unique { ref assignment } if *assignment == res.window
        );
        ok += (columns_only && res.is_complete() && unique) as usize;
    }
    Outcome::check(
        ok == total,
        format!("{ok}/{total} single-row overlays filled uniquely from n columns"),
    )
}

fn criterion_9() -> Outcome {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/identity.json");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(["recur2d", "validate", path], &mut out, &mut err);
    let text = String::from_utf8_lossy(&out).to_string();
    let cli_ok = code == 0 && text == "unique\nsolution is identically zero\n";
    let scaled = Overlay::from_template(&parse_template("5/2", Q).unwrap()).unwrap();
    let b = Bounds::new(-2, 2, -3, 3).unwrap();
    let empty = Layout::custom(Q, BTreeMap::new()).unwrap();
    let lib_ok = matches!(
        classify_and_solve(&scaled, &empty, b).unwrap(),
        Classification::Unique { ref assignment } if assignment.is_complete() && assignment.known_all_zero()
    );
    Outcome::check(
        cli_ok && lib_ok,
        format!(
            "validate exit {code}, output {:?}; scaled identity zero-only: {lib_ok}",
            text.trim_end()
        ),
    )
}

const FUZZ_ALPHABET: &[&str] = &[
    "X", "Y", "I", "1", "2", "3/4", "0", "+", "-", "*", "^", "(", ")", " ", "/", "^-", "Z", "x",
    "9", "é", "\t",
];

fn criterion_10() -> Outcome {
    let terms = |t: &Template| -> Vec<((u32, u32), String)> {
        t.terms().iter().map(|(e, c)| (*e, c.to_string())).collect()
    };
    let s = |v: &str| v.to_string();
    let first = parse_template("X*Y + 3Y + 2X - I", Q).map(|t| terms(&t));
    let second = parse_template("I - Y*(I + X)", Q).map(|t| terms(&t));
    let exact = first
        == Ok(vec![
            ((0, 0), s("-1")),
            ((0, 1), s("2")),
            ((1, 0), s("3")),
            ((1, 1), s("1")),
        ])
        && second == Ok(vec![((0, 0), s("1")), ((1, 0), s("-1")), ((1, 1), s("-1"))]);

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let inputs: Vec<String> = (0..100_000)
        .map(|k| {
            if k % 10 == 0 {
                let len = rng.gen_range(0..32);
                (0..len).map(|_| rng.gen_range(0u8..128) as char).collect()
            } else {
                let len = rng.gen_range(0..24);
                (0..len)
                    .map(|_| FUZZ_ALPHABET[rng.gen_range(0..FUZZ_ALPHABET.len())])
                    .collect()
            }
        })
        .collect();
    let prev_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut crashes = 0;
    let mut unpositioned = 0;
    let mut errors = 0;
    for text in &inputs {
        match panic::catch_unwind(|| parse_template(text, Q)) {
            Err(_) => crashes += 1,
            Ok(Err(e)) => {
                errors += 1;
                unpositioned += (e.pos > text.len()) as usize;
            }
            Ok(Ok(_)) => {}
        }
    }
    panic::set_hook(prev_hook);
    Outcome::check(
        exact && crashes == 0 && unpositioned == 0,
        format!(
            "paper templates exact: {exact}; {} fuzz inputs, {crashes} crashes, {errors} positioned errors, {unpositioned} bad positions",
            inputs.len()
        ),
    )
}

fn main() {
    let mut failed = false;
    let mut report = |id: u8, name: &str, outcome: Outcome, tolerated: bool| {
        let mark = if outcome.pass { "PASS" } else { "FAIL" };
        let note = if tolerated {
            " [known: reference values contradict the recurrence]"
        } else {
            ""
        };
        println!("{mark} {id:>2} {name}: {}{note}", outcome.detail);
        failed |= !outcome.pass && !tolerated;
    };
    let (golden, tolerated) = criterion_1();
    report(1, "golden grid", golden, tolerated);
    report(2, "walkthrough steps", criterion_2(), false);
    report(3, "pascal binomials", criterion_3(), false);
    report(4, "oracle equivalence sweep", criterion_4(), false);
    report(5, "superposition", criterion_5(), false);
    report(6, "basis support", criterion_6(), false);
    report(7, "diagonal layout", criterion_7(), false);
    report(8, "single-row overlays", criterion_8(), false);
    report(9, "identity overlay", criterion_9(), false);
    report(10, "template parser", criterion_10(), false);
    if failed {
        std::process::exit(1);
    }
}
