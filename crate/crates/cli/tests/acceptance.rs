//! Acceptance grid: one pass/fail line per criterion.  Runs without the
//! libtest harness so the lines always reach the output.
//!
//! Standard grid: p ∈ {2, 3}; groups C4, C2xC2, C8, D8, Q8, Q16 (p = 2) and
//! C9, H27 (p = 3); rings Zp, unram:2, powser:4; precision 6; seed 42.

use std::process::Command;
use std::time::{Duration, Instant};

use grouplog::padiclog::CotangentModule;
use grouplog::pgroup::build_group;
use grouplog::suites::{parse_ring, run_suite, Cell};

const SEED: u64 = 42;
const RINGS: [&str; 3] = ["Zp", "unram:2", "powser:4"];
const GROUPS: [(u64, &str); 8] =
    [(2, "C4"), (2, "C2xC2"), (2, "C8"), (2, "D8"), (2, "Q8"), (2, "Q16"), (3, "C9"), (3, "H27")];

fn cell(p: u64, group: &str, ring: &str, prec: u32, ext: Option<u32>) -> Cell {
    Cell { p, group: group.into(), ring: ring.into(), prec, ext }
}

fn grid(filter: impl Fn(u64, &str) -> bool) -> Vec<Cell> {
    let mut out = Vec::new();
    for (p, g) in GROUPS {
        if !filter(p, g) {
            continue;
        }
        for r in RINGS {
            out.push(cell(p, g, r, 6, None));
        }
    }
    out
}

fn abelian(p: u64, g: &str) -> bool {
    build_group(g, p).unwrap().is_abelian()
}

type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    ok: bool,
    detail: String,
}

/// Runs `suite` on every cell; fails on any failure, skip, error or a cell
/// slower than `limit`.
fn sweep(suite: &str, cells: &[Cell], samples: usize, limit: Option<Duration>) -> Outcome {
    let mut bad = Vec::new();
    let (mut total, mut slowest) = (0usize, Duration::ZERO);
    for c in cells {
        let start = Instant::now();
        let r = run_suite(suite, c, samples, SEED);
        let dt = start.elapsed();
        slowest = slowest.max(dt);
        let label = format!("{}/{}/n={}", c.group, c.ring, c.prec);
        match r {
            Ok(r) if r.skipped.is_some() => bad.push(format!("{label} skipped: {}", r.skipped.unwrap())),
            Ok(r) if !r.pass => bad.push(format!("{label}: {} failures, first {:?}", r.failures.len(), r.failures[0])),
            Ok(r) => total += r.samples,
            Err(e) => bad.push(format!("{label}: {e}")),
        }
        if let Some(l) = limit {
            if dt > l {
                bad.push(format!("{label} took {:.1} s > {} s", dt.as_secs_f64(), l.as_secs()));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{} cells, {} checks, slowest cell {:.2} s", cells.len(), total, slowest.as_secs_f64())
    } else {
        bad.join("; ")
    };
    Outcome { ok: bad.is_empty(), detail }
}

fn both(a: Outcome, b: Outcome) -> Outcome {
    Outcome { ok: a.ok && b.ok, detail: format!("{}; {}", a.detail, b.detail) }
}

fn c1_frobenius() -> Outcome {
    let cells: Vec<Cell> =
        [2, 3].iter().flat_map(|&p| RINGS.iter().map(move |r| cell(p, "C1", r, 6, None))).collect();
    sweep("frobenius-lift", &cells, 200, Some(Duration::from_secs(1)))
}

fn c8_cotangent() -> Outcome {
    // explicit cokernels: Z/4, Z/2, Z/3
    let mut bad = Vec::new();
    for (p, g, r, want) in [(2, "C4", "Zp", vec![2u32]), (2, "C2", "unram:2", vec![1]), (3, "C3", "powser:4", vec![1])] {
        let cot = CotangentModule::new(&parse_ring(p, r, 6).unwrap(), &build_group(g, p).unwrap());
        let got = cot.coker_invariants();
        if got != want {
            bad.push(format!("{g}/{r}: {got:?} != {want:?}"));
        }
    }
    let fixed = Outcome { ok: bad.is_empty(), detail: if bad.is_empty() { "C4, C2, C3 cokernels match".into() } else { bad.join("; ") } };
    both(fixed, sweep("cotangent", &grid(abelian), 100, None))
}

fn c9_quotient() -> Outcome {
    let cells: Vec<Cell> =
        [2, 3].iter().flat_map(|&p| RINGS.iter().map(move |r| cell(p, &format!("C{p}"), r, 6, None))).collect();
    sweep("image-quotient", &cells, 1, None)
}

fn c13_norm() -> Outcome {
    let cells = [cell(2, "C4", "Zp", 5, Some(2)), cell(2, "D8", "Zp", 5, Some(2))];
    sweep("norm-preimage", &cells, 25, Some(Duration::from_secs(120)))
}

fn c14_fixed_point() -> Outcome {
    // unramified coefficient rings are skipped by design (no nested levels)
    let cells: Vec<Cell> = grid(|_, _| true).into_iter().filter(|c| c.ring != "unram:2").collect();
    sweep("fixed-point", &cells, 25, None)
}

fn c15_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_grouplog");
    let mut bad = Vec::new();
    for (p, g) in [("2", "C4"), ("2", "D8")] {
        let run = || {
            Command::new(bin)
                .args(["check", "--p", p, "--group", g, "--ring", "Zp", "--prec", "6", "--suite", "all", "--seed", "42"])
                .output()
                .expect("binary runs")
        };
        let (a, b) = (run(), run());
        if !a.status.success() || a.stdout != b.stdout {
            bad.push(format!("{g}: exit {:?}, identical {}", a.status.code(), a.stdout == b.stdout));
        }
    }
    Outcome { ok: bad.is_empty(), detail: if bad.is_empty() { "C4 and D8 reports byte-identical".into() } else { bad.join("; ") } }
}

fn main() {
    let all = |_: u64, _: &str| true;
    let non_abelian = |p: u64, g: &str| !abelian(p, g);
    let criteria: Vec<Criterion> = vec![
        ("Frobenius lift congruence", Box::new(c1_frobenius)),
        ("L(1 + I) ⊂ pφ(I)", Box::new(move || sweep("log-integrality", &grid(all), 100, Some(Duration::from_secs(10))))),
        ("L(1 + I²) ⊂ pI² (abelian)", Box::new(|| sweep("log-abelian-square", &grid(abelian), 100, None))),
        ("character values of L vs determinant logs", Box::new(move || sweep("log-det-identity", &grid(all), 50, None))),
        ("(1 − c)^p ≡ −p(1 − c) mod p(1 − c)²", Box::new(move || sweep("central-power", &grid(all), 1, None))),
        ("saturation of the (1 − c)-span", Box::new(move || sweep("saturation", &grid(all), 1, None))),
        ("preimages under L on 1 + 𝒜", Box::new(move || sweep("kernel-solver", &grid(non_abelian), 50, Some(Duration::from_secs(60))))),
        ("cotangent cokernel and differential", Box::new(c8_cotangent)),
        ("image quotient for C_p", Box::new(c9_quotient)),
        ("exp/log round trip and injectivity", Box::new(move || sweep("exp-log", &grid(all), 100, None))),
        ("matrices reduce to units", Box::new(move || sweep("matrix-reduction", &grid(all), 50, None))),
        ("torsion determinants and log(−1) = 0", Box::new(move || sweep("torsion", &grid(all), 50, None))),
        ("norm preimages", Box::new(c13_norm)),
        ("fixed-point descent", Box::new(c14_fixed_point)),
        ("byte-identical reports", Box::new(c15_determinism)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        println!(
            "criterion {:>2} {} {name} ({}; {:.1} s)",
            i + 1,
            if o.ok { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.ok {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
