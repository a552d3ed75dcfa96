mod common;

use std::collections::HashMap;

use knotgenus_topology::certificate::{Certificate, Stage, Verdict, Verifier};
use knotgenus_topology::normal::{analyze_components, check_admissible, NormalVector, TetCoords};
use knotgenus_topology::sat::{build_branching_surface, one_in_three_oracle, reduce, CnfInstance, Label, Reduction};
use knotgenus_topology::{is_null_homologous, validate_manifold, TetComplex};
use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Case {
    inst: CnfInstance,
    red: Reduction,
    verifier: Verifier,
}

fn case(n: usize, clauses: &[[i64; 3]]) -> Case {
    let inst = CnfInstance::from_signed(n, clauses).unwrap();
    let red = reduce(&inst).unwrap();
    let verifier = Verifier::new(&red.triangulation, &red.knot, red.genus).unwrap();
    Case { inst, red, verifier }
}

impl Case {
    fn certificate(&self, assignment: &[bool]) -> Certificate {
        self.red.assemble_in(self.verifier.complement(), &self.inst, assignment).unwrap()
    }
}

fn accepted_genus(v: &Verdict) -> BigInt {
    match v {
        Verdict::Accept { genus, .. } => genus.clone(),
        other => panic!("rejected: {other:?}"),
    }
}

#[test]
fn single_clause_witness_has_genus_four() {
    let c = case(3, &[[1, 2, 3]]);
    let cert = c.certificate(&[true, false, false]);
    assert_eq!(accepted_genus(&c.verifier.verify(&cert).unwrap()), BigInt::from(4));

    // the analyzer sees the same surface
    let report = analyze_components(c.verifier.complement(), &cert.w).unwrap();
    assert_eq!(report.component_count(), BigInt::from(1));
    let s = &report.components[0];
    assert_eq!(s.orientable, Some(true));
    assert_eq!(s.boundary_components, BigInt::from(1));
    assert_eq!(s.genus, Some(BigInt::from(4)));
}

#[test]
fn two_clause_instance_end_to_end() {
    let c = case(3, &[[1, 2, 3], [1, -2, -3]]);
    let sols = one_in_three_oracle(&c.inst).unwrap();
    assert_eq!(sols, vec![vec![false, true, false], vec![false, false, true]]);
    for a in &sols {
        let cert = c.certificate(a);
        assert_eq!(accepted_genus(&c.verifier.verify(&cert).unwrap()), BigInt::from(5));
        let tight = c.verifier.with_bound(4).verify(&cert).unwrap();
        assert_eq!(tight.rejected_at(), Some(Stage::Genus));
        // a larger bound never hurts
        assert!(c.verifier.with_bound(6).verify(&cert).unwrap().is_accept());
    }
}

#[test]
fn mutated_certificates_fail_at_the_right_stage() {
    let c = case(1, &[[1, -1, -1]]);
    let cert = c.certificate(&[true]);
    assert!(c.verifier.verify(&cert).unwrap().is_accept());

    let doubled = Certificate { w: cert.w.scaled(&BigUint::from(2u8)), parity_cycle: cert.parity_cycle.clone() };
    assert_eq!(c.verifier.verify(&doubled).unwrap().rejected_at(), Some(Stage::Connected));

    let mut twice = cert.parity_cycle.clone();
    twice.extend(&cert.parity_cycle);
    let even = Certificate { w: cert.w.clone(), parity_cycle: twice };
    assert_eq!(c.verifier.verify(&even).unwrap().rejected_at(), Some(Stage::Parity));

    // a second quadrilateral type next to an existing one
    let (x, d) = cert.w.iter().find(|(_, d)| d[4..].iter().any(|q| *q > BigUint::from(0u8))).unwrap();
    let q = (4..7).find(|&i| d[i] == BigUint::from(0u8)).unwrap();
    let mut extra: TetCoords = Default::default();
    extra[q] = BigUint::from(1u8);
    let bump = NormalVector::from_tets(cert.w.num_tets(), [(x, extra)]).unwrap();
    let bad = Certificate { w: cert.w.add(&bump).unwrap(), parity_cycle: cert.parity_cycle.clone() };
    let v = c.verifier.verify(&bad).unwrap();
    assert_eq!(v.rejected_at(), Some(Stage::Admissible));
    assert!(check_admissible(c.verifier.complement(), &bad.w).unwrap().is_some());
}

#[test]
fn certificates_survive_json() {
    let c = case(1, &[[1, -1, -1]]);
    let cert = c.certificate(&[true]);
    let back = Certificate::from_json(&cert.to_json()).unwrap();
    assert_eq!(back, cert);
}

#[test]
fn unused_variables_still_reduce() {
    let inst = CnfInstance::from_signed(3, &[[1, -1, 2]]).unwrap();
    let b = build_branching_surface(&inst);
    assert_eq!(b.curves_along(Label::Variable(2)), 3);
    let r = reduce(&inst).unwrap();
    assert!(validate_manifold(&r.triangulation).valid);
    assert!(is_null_homologous(&r.triangulation, &r.knot).unwrap());
}

#[test]
fn knot_need_not_be_null_homologous_without_a_solution() {
    // (u1 ∨ u1 ∨ u1) is unsatisfiable and K has order three in homology
    let inst = CnfInstance::from_signed(1, &[[1, 1, 1]]).unwrap();
    assert!(one_in_three_oracle(&inst).unwrap().is_empty());
    let r = reduce(&inst).unwrap();
    assert!(validate_manifold(&r.triangulation).valid);
    assert!(!is_null_homologous(&r.triangulation, &r.knot).unwrap());
}

#[test]
fn sizes_are_linear() {
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..5 {
        for m in 1..5 {
            let (inst, _) = common::planted_instance(&mut rng, n, m);
            seen.insert((n, m), reduce(&inst).unwrap().triangulation.num_tets());
        }
    }
    // solve for the plane through three points and check the rest lie on it
    let t = |n, m| seen[&(n, m)] as i64;
    let (a, b) = (t(2, 1) - t(1, 1), t(1, 2) - t(1, 1));
    let c = t(1, 1) - a - b;
    for (&(n, m), &count) in &seen {
        assert_eq!(count as i64, a * n as i64 + b * m as i64 + c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn planted_instances_reduce_to_manifolds(seed in any::<u64>(), n in 1usize..5, m in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (inst, hidden) = common::planted_instance(&mut rng, n, m);
        prop_assert!(inst.is_satisfied_by(&hidden));
        let r = reduce(&inst).unwrap();
        let rep = validate_manifold(&r.triangulation);
        prop_assert!(rep.valid && rep.closed);
        prop_assert_eq!(rep.euler_characteristic, 0);
        prop_assert!(r.triangulation.is_orientable());
        prop_assert_eq!(r.triangulation.num_tets(), 14 * 2 * r.prisms.len());
        prop_assert!(is_null_homologous(&r.triangulation, &r.knot).unwrap());
    }
}
