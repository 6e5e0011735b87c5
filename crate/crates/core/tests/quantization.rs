use confquant_core::coefficients::{Coefficients, Mutation, QuantParams};
use confquant_core::harness::{generate_case, structural_checks, Case, CaseSpec};
use confquant_core::quantize::{plans, principal_symbol_ok, quantize};
use confquant_core::{rational, Error, Rational, Signature, Valence, WeightedTensorJet};

fn params(m: usize, k: usize) -> QuantParams {
    QuantParams::new(m, rational(1, 3), rational(2, 3), k).unwrap()
}

fn case(seed: u64, m: usize, k: usize) -> Case<Rational> {
    generate_case(&CaseSpec::new(seed, params(m, k))).unwrap()
}

#[test]
fn conformal_invariance_holds_exactly() {
    for m in [3, 4] {
        for k in 0..=3 {
            for seed in 0..2 {
                let report = case(seed, m, k).conformal().unwrap();
                assert!(report.equal, "m={m} k={k} seed={seed}: {report:?}");
            }
        }
    }
}

#[test]
fn conformal_invariance_in_lorentzian_signature() {
    let p = params(4, 2);
    let spec = CaseSpec::new(7, p).with_signature(Signature::lorentzian(4));
    let c: Case<Rational> = generate_case(&spec).unwrap();
    assert!(c.conformal().unwrap().equal);
}

#[test]
fn closed_forms_agree_with_word_expansion() {
    for (m, k) in [(3, 2), (4, 2), (3, 3)] {
        let report = case(3, m, k).oracle().unwrap();
        assert!(report.equal, "m={m} k={k}: {report:?}");
    }
}

#[test]
fn quantization_is_natural_under_chart_changes() {
    for k in 0..=2 {
        let report = case(5, 3, k).naturality().unwrap();
        assert!(report.equal, "k={k}: {report:?}");
    }
}

#[test]
fn flat_metric_reduces_to_partial_derivatives() {
    for k in 0..=3 {
        assert!(case(11, 3, k).flat().unwrap().equal, "k={k}");
    }
}

#[test]
fn float_mode_tracks_rational_mode() {
    let p = params(3, 2);
    let exact: Case<Rational> = generate_case(&CaseSpec::new(2, p.clone())).unwrap();
    let float: Case<f64> = generate_case(&CaseSpec::new(2, p.clone())).unwrap();
    let qe = quantize(&exact.g, &exact.s, &exact.f, &p).unwrap();
    let qf = quantize(&float.g, &float.s, &float.f, &p).unwrap();
    let reference: WeightedTensorJet<f64> =
        qe.convert(|c| num_traits::ToPrimitive::to_f64(c).unwrap());
    let report = confquant_core::harness::CheckReport::compare(&qf, &reference);
    assert!(report.equal, "{report:?}");
    assert!(float.conformal().unwrap().equal);
}

#[test]
fn structural_identities_hold() {
    for seed in 0..2 {
        for (name, ok) in structural_checks(&case(seed, 3, 3)).unwrap() {
            assert!(ok, "seed={seed}: {name}");
        }
    }
}

#[test]
fn principal_symbol_is_the_pure_derivative_pair() {
    for k in 0..=4 {
        let coeffs = Coefficients::new(&params(4, k)).unwrap();
        assert!(principal_symbol_ok(&plans(&coeffs).unwrap()), "k={k}");
    }
}

#[test]
fn mutated_coefficients_break_invariance() {
    let c2 = case(1, 3, 2);
    let c3 = case(1, 3, 3);
    for id in ["C22", "T1J0", "T2JK", "GSHIFT"] {
        let mutation = Mutation::parse(id).unwrap();
        assert!(!c2.conformal_mutated(mutation).unwrap().equal, "{id}");
    }
    assert!(
        !c3.conformal_mutated(Mutation::parse("C31").unwrap())
            .unwrap()
            .equal
    );
}

#[test]
fn output_is_a_density_of_weight_mu() {
    let c = case(0, 3, 2);
    let q = quantize(&c.g, &c.s, &c.f, &c.spec.params).unwrap();
    assert_eq!(q.valence(), Valence::Scalar);
    assert_eq!(q.weight(), &c.spec.params.mu);
    assert_eq!(q.order(), c.spec.order - 2);
}

#[test]
fn invalid_inputs_are_rejected() {
    let c = case(0, 3, 2);
    let p = &c.spec.params;
    let wrong_weight = c.f.clone().with_weight(rational(5, 7));
    assert!(quantize(&c.g, &c.s, &wrong_weight, p).is_err());
    let mut raw = c.s.clone().into_comps();
    raw[0] = &raw[0] + &confquant_core::Jet::one(c.g.layout(), c.spec.order);
    let traceful = WeightedTensorJet::new(3, c.s.valence(), c.s.weight().clone(), raw).unwrap();
    assert!(matches!(
        quantize(&c.g, &traceful, &c.f, p),
        Err(Error::NotTraceFree)
    ));
    let short = c.f.truncate(1);
    assert!(quantize(&c.g, &c.s, &short, p).is_err());
}

#[test]
fn critical_shift_is_reported() {
    // m = 3, k = 2: γ₁ = 0 at δ = 4/3 and γ₂ = 0 at δ = 5/3.
    let p = QuantParams::new(3, rational(0, 1), rational(4, 3), 2).unwrap();
    let spec = CaseSpec::new(0, params(3, 2));
    let c: Case<Rational> = generate_case(&spec).unwrap();
    let s = c.s.clone().with_weight(p.delta());
    let f = c.f.clone().with_weight(p.lambda.clone());
    assert!(matches!(quantize(&c.g, &s, &f, &p), Err(Error::Critical(h)) if h.n == 1));
}
