use monolab::doc::Document;
use monolab::locality::{self, BellFunctional, DEFAULT_GLOBAL_CEILING, DEFAULT_NS_CEILING};
use monolab::lp::{self, LinearProgram, LpOutcome};
use monolab::model::{self, average_quotient};
use monolab::rational::int;
use monolab::scenario::{build_nkr, MultipartiteSpec, SiteSymmetry};
use monolab::{Rational, Scenario, SimplicialComplex};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn complex_from_masks(masks: &[u8]) -> SimplicialComplex {
    let faces = masks
        .iter()
        .map(|m| (0..8).filter(|b| m >> b & 1 == 1).map(|b| format!("v{b}")).collect::<Vec<_>>());
    SimplicialComplex::from_maximal_faces(faces).unwrap()
}

fn arb_complex() -> impl Strategy<Value = SimplicialComplex> {
    prop::collection::vec(1u8..=255, 0..=10).prop_map(|m| complex_from_masks(&m))
}

fn is_antichain(c: &SimplicialComplex) -> bool {
    let faces = c.maximal_faces();
    faces.iter().enumerate().all(|(i, f)| {
        faces
            .iter()
            .enumerate()
            .all(|(j, g)| i == j || !f.iter().all(|v| g.contains(v)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduction_order_does_not_change_the_verdict(c in arb_complex(), seed in any::<u64>()) {
        let reference = c.graham_reduce();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let trace = c.graham_reduce_by(|cands| cands[rng.gen_range(0..cands.len())]);
            prop_assert_eq!(trace.acyclic, reference.acyclic);
        }
    }

    #[test]
    fn steps_keep_an_antichain_and_drop_vertices(c in arb_complex()) {
        prop_assert!(is_antichain(&c));
        for face in c.maximal_faces() {
            let proper = c.proper_vertices(&face).unwrap();
            match c.graham_step(&face) {
                Ok(next) => {
                    prop_assert!(!proper.is_empty());
                    prop_assert!(is_antichain(&next));
                    prop_assert_eq!(next.vertex_count(), c.vertex_count() - proper.len());
                }
                Err(_) => prop_assert!(proper.is_empty()),
            }
        }
    }

    #[test]
    fn join_is_associative_with_unit(a in arb_complex(), b in arb_complex(), d in arb_complex()) {
        let b = SimplicialComplex::from_maximal_faces(
            b.maximal_faces().into_iter().map(|f| f.into_iter().map(|v| format!("b{v}")).collect::<Vec<_>>()),
        ).unwrap();
        let d = SimplicialComplex::from_maximal_faces(
            d.maximal_faces().into_iter().map(|f| f.into_iter().map(|v| format!("d{v}")).collect::<Vec<_>>()),
        ).unwrap();
        let left = a.join(&b).unwrap().join(&d).unwrap();
        let right = a.join(&b.join(&d).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(a.join(&SimplicialComplex::empty()).unwrap(), a.clone());
        prop_assert_eq!(left.face_count(), a.face_count().max(1) * b.face_count().max(1) * d.face_count().max(1)
            * usize::from(!(a.is_empty() && b.is_empty() && d.is_empty())));
    }

    #[test]
    fn complex_documents_round_trip(c in arb_complex()) {
        prop_assert_eq!(SimplicialComplex::parse(&c.to_pretty()).unwrap(), c);
    }

    #[test]
    fn lp_verdicts_survive_row_scaling(
        rows in prop::collection::vec((prop::collection::vec(-3i64..=3, 4), -4i64..=4), 1..=4),
        obj in prop::collection::vec(-3i64..=3, 4),
        scale in 1i64..=5,
    ) {
        let build = |k: i64| {
            let mut p = LinearProgram::new(4);
            for (i, (coeffs, rhs)) in rows.iter().enumerate() {
                let f = if i == 0 { k } else { 1 };
                p.add_equality(coeffs.iter().enumerate().map(|(j, &c)| (j, int(c * f))), int(rhs * f));
            }
            p.set_objective(obj.iter().map(|&c| int(c)).collect());
            p
        };
        let a = lp::maximize(&build(1)).unwrap();
        let b = lp::maximize(&build(scale)).unwrap();
        let kind = |o: &LpOutcome| std::mem::discriminant(o);
        prop_assert_eq!(kind(&a), kind(&b));
        if let (LpOutcome::Optimal { value: va, .. }, LpOutcome::Optimal { value: vb, .. }) = (&a, &b) {
            prop_assert_eq!(va, vb);
        }
    }
}

fn octahedron() -> (Scenario, SiteSymmetry) {
    build_nkr(&"n=2;k=2,2;r=1,2".parse::<MultipartiteSpec>().unwrap())
}

#[test]
fn averages_of_random_models_are_valid() {
    let (s, sym) = octahedron();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let m = locality::random_ns_model(&s, &mut rng, DEFAULT_NS_CEILING).unwrap();
        let avg = average_quotient(&m, sym.partition()).unwrap();
        assert!(avg.validate().is_empty());
        // marginal of the average equals the average of transported marginals
        let (_, q) = s.quotient(sym.partition()).unwrap();
        for (t, lifts) in q.lifts.iter().enumerate() {
            let tau = q.complex.face_labels(t);
            let onto = &tau[..2];
            let direct = avg.marginal(onto).unwrap();
            let n = Rational::from_integer((lifts.len() as i64).into());
            for (o, p) in direct.cells() {
                let mut sum = Rational::from_integer(0.into());
                for lift in lifts {
                    let moved = m.marginal(lift).unwrap().relabel(|v| q.image(v).to_string()).unwrap();
                    let a = moved.marginal(onto).unwrap();
                    sum += a.probability(o);
                }
                assert_eq!(*p, sum / &n);
            }
        }
    }
}

#[test]
fn local_bound_never_exceeds_ns_max_and_both_scale() {
    let (s, _) = octahedron();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let f = locality::random_functional(&s, &mut rng);
        let (lb, _) = locality::local_bound(&f, &s, DEFAULT_GLOBAL_CEILING).unwrap();
        let (ns, _) = locality::ns_max(&f, &s, DEFAULT_NS_CEILING).unwrap();
        assert!(lb <= ns);
        let k = monolab::rational::ratio(7, 3);
        let g = f.scaled(&k);
        assert_eq!(locality::local_bound(&g, &s, DEFAULT_GLOBAL_CEILING).unwrap().0, &lb * &k);
        assert_eq!(locality::ns_max(&g, &s, DEFAULT_NS_CEILING).unwrap().0, &ns * &k);
    }
}

#[test]
fn single_context_functionals_have_equal_bounds() {
    let (s, _) = octahedron();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let face = s.complex().maximal_faces().remove(3);
    for _ in 0..10 {
        let terms = model::totally_mixed(&s)
            .marginal(&face)
            .unwrap()
            .cells()
            .map(|(o, _)| {
                let a = face.iter().cloned().zip(o.iter().copied()).collect();
                (a, int(rng.gen_range(-4..=4)))
            })
            .collect::<Vec<_>>();
        let f = BellFunctional::new(terms, None);
        let (lb, _) = locality::local_bound(&f, &s, DEFAULT_GLOBAL_CEILING).unwrap();
        let (ns, _) = locality::ns_max(&f, &s, DEFAULT_NS_CEILING).unwrap();
        assert_eq!(lb, ns);
    }
}

#[test]
fn model_documents_round_trip_for_random_models() {
    let (s, _) = octahedron();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let m = locality::random_ns_model(&s, &mut rng, DEFAULT_NS_CEILING).unwrap();
        assert_eq!(monolab::EmpiricalModel::parse(&m.to_pretty()).unwrap(), m);
    }
}

#[test]
fn quantum_models_do_not_signal() {
    use monolab::model::{quantum_model, QuantumSite};
    use num_complex::Complex64;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let random_unitary_basis = |rng: &mut ChaCha8Rng| {
        let (t, p): (f64, f64) = (rng.gen_range(0.0..3.1), rng.gen_range(0.0..6.2));
        let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
        let e = Complex64::from_polar(1.0, p);
        vec![vec![Complex64::new(c, 0.0), e * s], vec![Complex64::new(-s, 0.0), e * c]]
    };
    for n in [2usize, 3] {
        for _ in 0..10 {
            let mut psi: Vec<Complex64> = (0..1 << n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            psi.iter_mut().for_each(|a| *a /= norm);
            let sites: Vec<QuantumSite> = (0..n)
                .map(|i| QuantumSite {
                    dim: 2,
                    settings: (0..2).map(|j| (format!("q{i}s{j}"), random_unitary_basis(&mut rng))).collect(),
                })
                .collect();
            let mut f = quantum_model(&psi, &sites, 1e-9).unwrap();
            f.tolerance = 1e-9;
            f.check().unwrap();
        }
    }
}
