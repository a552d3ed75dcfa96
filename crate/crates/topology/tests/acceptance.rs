//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use knotgenus_core::{
    count_orbits_oracle, run, weighted_count_oracle, Interval, Pairing, PairingSystem, RunOptions, WeightList, WeightVec,
};
use knotgenus_topology::certificate::{Certificate, Stage, Verdict, Verifier};
use knotgenus_topology::disk_oracle;
use knotgenus_topology::fixtures;
use knotgenus_topology::normal::*;
use knotgenus_topology::sat::{one_in_three_oracle, reduce, CnfInstance};
use knotgenus_topology::{is_null_homologous, validate_manifold, TetComplex, Triangulation};
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ORACLE_CAP: u64 = 1 << 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn iv(lo: i64, hi: i64) -> Interval {
    Interval::new(lo.into(), hi.into()).unwrap()
}

/// Log-scale widths; a share of the translations overlap their image.
fn random_pairing(rng: &mut impl Rng, n: i64) -> Pairing {
    let w = if rng.gen_bool(0.3) {
        rng.gen_range(1..=n.min(3))
    } else {
        let e = rng.gen_range(0.0..(n as f64).ln() + 1e-9);
        (e.exp() as i64).clamp(1, n)
    };
    let rev = rng.gen_bool(0.4);
    let a = rng.gen_range(1..=n - w + 1);
    let c = if !rev && rng.gen_bool(0.35) {
        a + rng.gen_range(0..=(n - w + 1 - a).min(w))
    } else {
        rng.gen_range(1..=n - w + 1)
    };
    Pairing::new(iv(a, a + w - 1), iv(c, c + w - 1), rev).unwrap()
}

fn random_system(rng: &mut impl Rng, n: i64, k: usize) -> PairingSystem {
    let ps = (0..k).map(|_| random_pairing(rng, n)).collect();
    PairingSystem::new(n.into(), ps).unwrap()
}

fn random_weights(rng: &mut impl Rng, n: i64, d: usize) -> WeightList {
    let mut cuts: Vec<i64> = (0..rng.gen_range(0..10)).map(|_| rng.gen_range(1..=n)).collect();
    cuts.extend([1, n + 1]);
    cuts.sort_unstable();
    cuts.dedup();
    let mut entries = Vec::new();
    for w in cuts.windows(2) {
        if rng.gen_bool(0.25) {
            continue;
        }
        let dense: Vec<BigUint> = (0..d).map(|_| BigUint::from(rng.gen_range(0u32..6))).collect();
        entries.push((iv(w[0], w[1] - 1), WeightVec::from_dense(&dense)));
    }
    WeightList::new(d, entries).unwrap()
}

fn cycle_bound(k: usize, n: &BigInt) -> f64 {
    let log_n = n.to_f64().unwrap().max(1.0).log2();
    5.0 * (k * k) as f64 * (2.0 + log_n)
}

struct OrbitStats {
    cases: usize,
    mismatches: usize,
    bound_violations: usize,
    halving_windows: usize,
    halving_violations: usize,
    elapsed: Duration,
}

/// Criteria 1 and 3 share their instances.
fn orbit_suite() -> OrbitStats {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut s = OrbitStats { cases: 10_000, mismatches: 0, bound_violations: 0, halving_windows: 0, halving_violations: 0, elapsed: Duration::ZERO };
    for _ in 0..s.cases {
        let n = rng.gen_range(1..=5_000);
        let k = rng.gen_range(0..=12);
        let sys = random_system(&mut rng, n, k);
        let out = run(&sys, None, &RunOptions { trace: true, ..Default::default() }).unwrap();
        if out.orbits != count_orbits_oracle(&sys, ORACLE_CAP).unwrap() {
            s.mismatches += 1;
        }
        if out.cycles as f64 > cycle_bound(k, &sys.n) {
            s.bound_violations += 1;
        }
        // state after each completed cycle; index 0 is the input
        let rows = out.trace.unwrap().rows;
        let mut states: Vec<(usize, BigInt)> = vec![(rows[0].k, rows[0].x.clone())];
        states.extend(rows.iter().filter(|r| r.step == 6).map(|r| (r.k, r.x.clone())));
        for (c, (k_c, x_c)) in states.iter().enumerate() {
            let window = 5 * k_c;
            if window == 0 || c + window >= states.len() {
                continue;
            }
            s.halving_windows += 1;
            if &states[c + window].1 * 2 > *x_c {
                s.halving_violations += 1;
            }
        }
    }
    s.elapsed = start.elapsed();
    s
}

fn criterion_1(s: &OrbitStats) -> Outcome {
    outcome(
        s.mismatches == 0 && s.elapsed < Duration::from_secs(300),
        format!("{} systems (k <= 12, N <= 5000), {} mismatches, {:.1}s", s.cases, s.mismatches, s.elapsed.as_secs_f64()),
    )
}

fn criterion_3(s: &OrbitStats) -> Outcome {
    outcome(
        s.bound_violations == 0 && s.halving_violations == 0,
        format!(
            "{} runs over 5k^2(2 + log2 N) cycles; {} of {} 5k-cycle windows failed to halve X",
            s.bound_violations, s.halving_violations, s.halving_windows
        ),
    )
}

struct WeightStats {
    cases: usize,
    mismatches: usize,
    transfers: usize,
    growth_violations: usize,
    max_growth: i64,
}

fn weight_suite() -> WeightStats {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut s = WeightStats { cases: 2_000, mismatches: 0, transfers: 0, growth_violations: 0, max_growth: 0 };
    for _ in 0..s.cases {
        let n = rng.gen_range(1..=5_000);
        let k = rng.gen_range(0..=12);
        let sys = random_system(&mut rng, n, k);
        let d = rng.gen_range(1..=4);
        let l = random_weights(&mut rng, n, d);
        assert!(l.total().iter().map(|(_, x)| x.clone()).sum::<BigUint>() <= BigUint::from(1_000_000u32));
        let out = run(&sys, Some(&l), &RunOptions { instrument_weights: true, ..Default::default() }).unwrap();
        let got = out.report.unwrap().orbit_weights(1 << 20);
        if got != weighted_count_oracle(&sys, &l, ORACLE_CAP).unwrap() || !out.conserved {
            s.mismatches += 1;
        }
        for (before, after) in out.transfer_growth {
            s.transfers += 1;
            let g = after as i64 - before as i64;
            s.max_growth = s.max_growth.max(g);
            if g > 4 {
                s.growth_violations += 1;
            }
        }
    }
    s
}

fn criterion_2(s: &WeightStats) -> Outcome {
    outcome(s.mismatches == 0, format!("{} weighted systems (d <= 4), {} multiset mismatches", s.cases, s.mismatches))
}

fn criterion_5(s: &WeightStats) -> Outcome {
    outcome(
        s.growth_violations == 0 && s.transfers > 0,
        format!("{} transfers, largest growth in constant intervals {}, {} over 4", s.transfers, s.max_growth, s.growth_violations),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let k = 8;
    let samples = 300;
    let mut rows = Vec::new();
    let mut bound_ok = true;
    for n in [1_000i64, 1_000_000, 1_000_000_000, 1_000_000_000_000] {
        let mut total = 0u64;
        let mut worst = 0u64;
        for _ in 0..samples {
            let sys = random_system(&mut rng, n, k);
            let out = run(&sys, None, &RunOptions::default()).unwrap();
            bound_ok &= (out.cycles as f64) <= cycle_bound(k, &sys.n);
            total += out.cycles;
            worst = worst.max(out.cycles);
        }
        let mean = total as f64 / samples as f64;
        rows.push((n, mean, worst, mean / (n as f64).log2()));
    }
    let base = rows[0].3;
    let linear = rows.iter().all(|r| r.3 <= 2.0 * base);
    let detail = rows
        .iter()
        .map(|(n, mean, worst, per)| format!("N=1e{}: mean {mean:.1} max {worst} ({per:.2}/log2 N)", (*n as f64).log10().round()))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(linear && bound_ok, format!("k=8, {samples} systems per N; {detail}"))
}

/// Compares the pairing-based analysis with explicit disks; `None` if equal.
fn disagreement(t: &Triangulation, v: &NormalVector) -> Option<String> {
    let oracle = disk_oracle::components(t, v, disk_oracle::DEFAULT_CAP).unwrap();
    let report = analyze_components(t, v).unwrap();
    if report.component_count() != BigInt::from(oracle.len()) {
        return Some(format!("{} components, oracle {}", report.component_count(), oracle.len()));
    }
    let mut expected: BTreeMap<Vec<BigUint>, (usize, &disk_oracle::OracleComponent)> = BTreeMap::new();
    for c in &oracle {
        expected.entry(c.vector.to_dense()).or_insert((0, c)).0 += 1;
    }
    if report.components.len() != expected.len() {
        return Some("different component vectors".into());
    }
    for s in &report.components {
        let Some(&(mult, c)) = expected.get(&s.vector.to_dense()) else {
            return Some("component vector missing from the oracle".into());
        };
        let orient_ok = if t.is_orientable() { s.orientable == Some(c.orientable) } else { s.orientable.is_none() };
        if s.multiplicity != BigInt::from(mult)
            || s.euler_characteristic != BigInt::from(c.euler_characteristic)
            || s.boundary_components != BigInt::from(c.boundary_curves)
            || !orient_ok
        {
            return Some(format!("component mismatch: {s:?} vs {}", c.euler_characteristic));
        }
    }
    None
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    let mut used = BTreeSet::new();
    let mut failures = Vec::new();
    let small: Vec<_> = fixtures::all().into_iter().filter(|(_, t)| t.num_tets() <= 20).collect();
    while checked < 240 {
        for (name, t) in &small {
            let Some(v) = common::random_admissible(t, &mut rng, 4) else { continue };
            if v.max_coordinate() >= BigUint::from(100_000u32) {
                continue;
            }
            checked += 1;
            used.insert(*name);
            if let Some(why) = disagreement(t, &v) {
                failures.push(format!("{name}: {why}"));
            }
        }
    }
    outcome(
        failures.is_empty() && used.len() >= 5,
        format!("{checked} vectors over {} triangulations, {} disagreements{}", used.len(), failures.len(), first(&failures)),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let t = fixtures::rp3_six();
    let tets = t.num_tets();
    assert_eq!(tets, 6);
    let bound: BigUint = BigUint::from(tets) << (7 * tets + 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    let mut problems = Vec::new();
    let mut largest = BigUint::zero();
    while done < 12 {
        let quads: Vec<Option<usize>> = (0..tets).map(|_| Some(rng.gen_range(0..3))).collect();
        let rays = common::extreme_rays(&t, &quads);
        if rays.len() < 2 {
            continue;
        }
        let parts: Vec<NormalVector> = (0..3).map(|_| common::to_vector(&rays[rng.gen_range(0..rays.len())])).collect();
        let top: u64 = parts.iter().map(|p| p.max_coordinate().to_u64().unwrap()).sum();
        // coefficients just under bound / top, so the sum lands near the bound
        let ceiling = &bound / BigUint::from(top);
        let coeffs: Vec<BigUint> = (0..3).map(|_| &ceiling - BigUint::from(rng.gen_range(0u64..1 << 20))).collect();
        let mut v = NormalVector::zero(tets);
        for (p, k) in parts.iter().zip(&coeffs) {
            v = v.add(&p.scaled(k)).unwrap();
        }
        largest = largest.max(v.max_coordinate());
        // additivity: chi and weight are linear, components sum back to v
        let chi: BigInt = parts.iter().zip(&coeffs).map(|(p, k)| euler_characteristic(&t, p).unwrap() * BigInt::from(k.clone())).sum();
        let wt: BigUint = parts.iter().zip(&coeffs).map(|(p, k)| weight(&t, p).unwrap() * k).sum();
        let report = analyze_components(&t, &v).unwrap();
        let mut sum = NormalVector::zero(tets);
        let mut chi_sum = BigInt::zero();
        for c in &report.components {
            sum = sum.add(&c.vector.scaled(&c.multiplicity.to_biguint().unwrap())).unwrap();
            chi_sum += &c.multiplicity * &c.euler_characteristic;
        }
        if euler_characteristic(&t, &v).unwrap() != chi || chi_sum != chi || weight(&t, &v).unwrap() != wt || sum != v {
            problems.push(done);
        }
        done += 1;
    }
    let elapsed = start.elapsed();
    let ratio = largest.to_f64().unwrap() / bound.to_f64().unwrap();
    outcome(
        problems.is_empty() && elapsed < Duration::from_secs(60) && ratio > 0.5 && largest < bound,
        format!("{done} vectors on t=6, max coordinate {largest} = {ratio:.3} of t*2^(7t+2), {} additivity failures, {:.1}s", problems.len(), elapsed.as_secs_f64()),
    )
}

/// Planted-satisfiable instances with `2 <= n + m <= 10`.
fn corpus() -> Vec<CnfInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut out = Vec::new();
    for size in 2..=10usize {
        for _ in 0..6 {
            // every variable occurs, so n <= 3m
            let n = rng.gen_range(1..=(3 * size / 4).min(size - 1));
            let inst = loop {
                let (inst, _) = common::planted_instance(&mut rng, n, size - n);
                if (0..n).all(|x| inst.clauses.iter().flatten().any(|l| l.var == x)) {
                    break inst;
                }
            };
            out.push(inst);
        }
    }
    out
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let insts = corpus();
    let mut failures: Vec<String> = Vec::new();
    let mut sizes: Vec<(i64, i64, i64)> = Vec::new();
    let mut certificates = 0;
    for (i, inst) in insts.iter().enumerate() {
        let mut fail = |why: String| failures.push(format!("#{i}: {why}"));
        let r = reduce(inst).unwrap();
        let t = &r.triangulation;
        let rep = validate_manifold(t);
        if !(rep.valid && rep.closed) {
            fail("not a closed manifold".into());
            continue;
        }
        if !is_null_homologous(t, &r.knot).unwrap() {
            fail("knot not null-homologous".into());
        }
        if t.num_tets() != 14 * 2 * r.prisms.len() {
            fail("prisms are not 14 tetrahedra".into());
        }
        sizes.push((inst.n as i64, inst.m() as i64, t.num_tets() as i64));
        let g = inst.n + inst.m();
        let verifier = Verifier::new(t, &r.knot, g).unwrap();
        if verifier.complement().second_subdivision().num_tets() != 576 * t.num_tets() {
            fail("double subdivision is not 576 per tetrahedron".into());
        }
        let tight = verifier.with_bound(g - 1);
        for a in one_in_three_oracle(inst).unwrap() {
            certificates += 1;
            let cert = r.assemble_in(verifier.complement(), inst, &a).unwrap();
            match verifier.verify(&cert).unwrap() {
                Verdict::Accept { genus, .. } if genus == BigInt::from(g) => {}
                v => fail(format!("assignment {a:?}: {v:?}")),
            }
            if tight.verify(&cert).unwrap().rejected_at() != Some(Stage::Genus) {
                fail(format!("assignment {a:?} accepted below m+n"));
            }
        }
    }
    // exact plane through the data: solve from the first three independent points
    let fit = exact_plane(&sizes);
    let linear = fit.is_some();
    let (a, b, c) = fit.unwrap_or_default();
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && linear && insts.len() >= 50,
        format!(
            "{} instances, {certificates} certificates accepted at m+n and rejected at m+n-1; tets = {a}n + {b}m + {c} exactly; {} failures{}; {:.0}s",
            insts.len(),
            failures.len(),
            first(&failures),
            elapsed.as_secs_f64()
        ),
    )
}

/// Integer `(a, b, c)` with `t = a n + b m + c` on every point, if one exists.
fn exact_plane(points: &[(i64, i64, i64)]) -> Option<(i64, i64, i64)> {
    for p in points {
        for q in points {
            for r in points {
                let det = (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
                if det == 0 {
                    continue;
                }
                let an = (q.2 - p.2) * (r.1 - p.1) - (q.1 - p.1) * (r.2 - p.2);
                let bn = (q.0 - p.0) * (r.2 - p.2) - (q.2 - p.2) * (r.0 - p.0);
                if an % det != 0 || bn % det != 0 {
                    return None;
                }
                let (a, b) = (an / det, bn / det);
                let c = p.2 - a * p.0 - b * p.1;
                return points.iter().all(|s| s.2 == a * s.0 + b * s.1 + c).then_some((a, b, c));
            }
        }
    }
    None
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let bases: Vec<(CnfInstance, Vec<bool>)> = vec![
        (CnfInstance::from_signed(1, &[[1, -1, -1]]).unwrap(), vec![true]),
        (CnfInstance::from_signed(2, &[[1, 2, -1]]).unwrap(), vec![false, false]),
    ];
    let mut prepared = Vec::new();
    for (inst, a) in &bases {
        let r = reduce(inst).unwrap();
        let v = Verifier::new(&r.triangulation, &r.knot, inst.n + inst.m()).unwrap();
        let cert = r.assemble_in(v.complement(), inst, a).unwrap();
        assert!(v.verify(&cert).unwrap().is_accept());
        prepared.push((v, cert));
    }
    let mut wrong = Vec::new();
    let mut counts = [0usize; 3];
    for i in 0..100 {
        let (v, cert) = &prepared[rng.gen_range(0..prepared.len())];
        let kind = i % 3;
        counts[kind] += 1;
        let (mutant, want) = match kind {
            0 => (Certificate { w: cert.w.scaled(&BigUint::from(2u8)), parity_cycle: cert.parity_cycle.clone() }, Stage::Connected),
            1 => {
                // add a second quadrilateral type somewhere in the support
                let support: Vec<usize> = cert.w.support().collect();
                let x = support[rng.gen_range(0..support.len())];
                let d = cert.w.tet(x).unwrap();
                let present: Vec<usize> = (4..7).filter(|&q| !d[q].is_zero()).collect();
                let q = match present.first() {
                    Some(&p) => *[4, 5, 6].iter().filter(|&&q| q != p).nth(rng.gen_range(0..2)).unwrap(),
                    None => rng.gen_range(4..7),
                };
                let mut extra: TetCoords = Default::default();
                extra[q] = BigUint::from(rng.gen_range(1u32..5));
                if present.is_empty() {
                    extra[4 + (q - 4 + 1) % 3] = BigUint::from(1u8);
                }
                let bump = NormalVector::from_tets(cert.w.num_tets(), [(x, extra)]).unwrap();
                (Certificate { w: cert.w.add(&bump).unwrap(), parity_cycle: cert.parity_cycle.clone() }, Stage::Admissible)
            }
            _ => {
                // an even closed walk: the odd cycle twice, or an edge there and back
                let cycle = if rng.gen_bool(0.5) {
                    cert.parity_cycle.repeat(2)
                } else {
                    let edges: Vec<u64> = v.boundary().edges.keys().copied().collect();
                    let e = edges[rng.gen_range(0..edges.len())];
                    vec![e, e]
                };
                (Certificate { w: cert.w.clone(), parity_cycle: cycle }, Stage::Parity)
            }
        };
        let got = v.verify(&mutant).unwrap();
        if got.rejected_at() != Some(want) {
            wrong.push(format!("mutation {i}: wanted {want}, got {got:?}"));
        }
    }
    outcome(
        wrong.is_empty(),
        format!(
            "100 mutations ({} doubled, {} quad violations, {} even cycles), {} misclassified{}",
            counts[0],
            counts[1],
            counts[2],
            wrong.len(),
            first(&wrong)
        ),
    )
}

/// The first failure, for the detail line.
fn first(failures: &[String]) -> String {
    failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
}

fn main() {
    let orbit = orbit_suite();
    let weights = weight_suite();
    let criteria: [&dyn Fn() -> Outcome; 9] = [
        &|| criterion_1(&orbit),
        &|| criterion_2(&weights),
        &|| criterion_3(&orbit),
        &criterion_4,
        &|| criterion_5(&weights),
        &criterion_6,
        &criterion_7,
        &criterion_8,
        &criterion_9,
    ];
    let mut all = true;
    for (i, c) in criteria.iter().enumerate() {
        let r = c();
        println!("criterion {}: {} ({})", i + 1, if r.pass { "PASS" } else { "FAIL" }, r.detail);
        all &= r.pass;
    }
    if !all {
        std::process::exit(1);
    }
}
