use coded_pc::codes::{star_dimension, star_product, star_product_code, RSCode};
use coded_pc::field::{field_arith, lagrange_interpolate, ArithOp, PrimeField};
use coded_pc::functions::{CandidateSet, EntropyOracle};
use coded_pc::linalg::{greedy_basis, Matrix};
use coded_pc::matrices::{construct_block_cyclic, interference, MatrixKind, RateMatrix};
use coded_pc::protocol::{build_queries, run_end_to_end, SchemeParams};
use coded_pc::querygen::TauSum;
use proptest::prelude::*;

const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

fn field() -> impl Strategy<Value = PrimeField> {
    prop::sample::select(PRIMES.to_vec()).prop_map(|q| PrimeField::new(q).unwrap())
}

fn field_and_elems(count: usize) -> impl Strategy<Value = (PrimeField, Vec<u32>)> {
    field().prop_flat_map(move |f| (Just(f), prop::collection::vec(0..f.order(), count)))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = (PrimeField, Vec<Vec<u32>>)> {
    field().prop_flat_map(move |f| (Just(f), prop::collection::vec(prop::collection::vec(0..f.order(), cols), rows)))
}

proptest! {
    #[test]
    fn field_axioms((f, x) in field_and_elems(3)) {
        let (a, b, c) = (x[0], x[1], x[2]);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.sub(a, b), b), a);
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            prop_assert_eq!(f.pow(a, (f.order() - 1) as u64), 1);
        } else {
            prop_assert!(f.inv(a).is_none());
        }
    }

    #[test]
    fn checked_arithmetic((f, x) in field_and_elems(2)) {
        let (a, b) = (f.elem(x[0] as u64), f.elem(x[1] as u64));
        let div = field_arith(a, b, ArithOp::Div);
        if x[1] == 0 {
            prop_assert!(div.is_err());
        } else {
            let back = field_arith(div.unwrap(), b, ArithOp::Mul).unwrap();
            prop_assert_eq!(back.value(), x[0]);
        }
        let other = PrimeField::new(if f.order() == 17 { 19 } else { 17 }).unwrap();
        prop_assert!(field_arith(a, other.elem(1), ArithOp::Add).is_err());
    }

    #[test]
    fn lagrange_recovers_polynomial((f, coeffs) in field_and_elems(4)) {
        let q = f.order();
        prop_assume!(q as usize >= coeffs.len());
        let poly = coded_pc::field::UniPoly::new(f, coeffs.clone());
        let points: Vec<(u32, u32)> = (0..coeffs.len() as u32).map(|x| (x, poly.eval(x))).collect();
        let back = lagrange_interpolate(f, &points).unwrap();
        for x in 0..q {
            prop_assert_eq!(back.eval(x), poly.eval(x));
        }
    }

    #[test]
    fn rank_is_transpose_invariant((f, rows) in matrix(3, 4)) {
        let m = Matrix::from_rows(&rows).unwrap();
        let r = m.rank(f);
        prop_assert_eq!(r, m.transpose().rank(f));
        prop_assert_eq!(greedy_basis(f, &rows).len(), r);
    }

    #[test]
    fn inverse_round_trip((f, rows) in matrix(3, 3)) {
        let m = Matrix::from_rows(&rows).unwrap();
        match m.inverse(f) {
            Ok(inv) => prop_assert_eq!(m.mul(f, &inv).unwrap(), Matrix::identity(f, 3)),
            Err(_) => prop_assert!(m.rank(f) < 3),
        }
    }

    /// Joint entropy of the first `h` independent evaluations is `h` q-ary units.
    #[test]
    fn pivot_prefix_entropy((f, rows) in prop::sample::select(vec![3u32, 5]).prop_flat_map(|q| {
        let f = PrimeField::new(q).unwrap();
        (Just(f), prop::collection::vec(prop::collection::vec(0..q, 2), 1..5))
    })) {
        let set = CandidateSet::linear(f, &rows);
        prop_assume!(set.is_ok());
        let set = set.unwrap();
        let oracle = EntropyOracle::new(&set).unwrap();
        let pivots = greedy_basis(f, &set.coefficient_rows());
        for h in 1..=pivots.len() {
            prop_assert!((oracle.joint(&pivots[..h]) - h as f64).abs() < 1e-12);
        }
        let all: Vec<usize> = (0..set.mu()).collect();
        prop_assert!((oracle.joint(&all) - pivots.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn star_product_dimension(n in 3usize..8, k in 1usize..4, g in 1usize..3) {
        prop_assume!(k < n);
        let f = PrimeField::new(coded_pc::field::next_prime(n as u32)).unwrap();
        let code = RSCode::default_systematic(f, n, k).unwrap();
        let star = star_product_code(&code, g).unwrap();
        prop_assert_eq!(star.k(), star_dimension(n, k, g));
        // products of codewords stay inside the star code
        let u = code.base.encode_row(&vec![1; k]).unwrap();
        let w = code.base.encode_row(&(1..=k as u32).collect::<Vec<_>>()).unwrap();
        let p = star_product(f, &u, &w).unwrap();
        if g >= 2 {
            let mut stacked = star.base.generator.to_rows();
            let r = stacked.len();
            stacked.push(p);
            prop_assert_eq!(Matrix::from_rows(&stacked).unwrap().rank(f), r);
        }
    }

    #[test]
    fn block_cyclic_is_regular(n in 2usize..12, w in 1usize..12) {
        prop_assume!(w < n);
        let rm = construct_block_cyclic(n, w, MatrixKind::Pir).unwrap();
        prop_assert!(rm.column_weights().iter().all(|&c| c == rm.kappa));
        prop_assert_eq!(rm.kappa * n, rm.nu * w);
        let back = RateMatrix::from_text(&rm.to_text(), MatrixKind::Pir).unwrap();
        prop_assert_eq!(&back.lambda, &rm.lambda);
        prop_assert!(interference(&rm).check_cover().is_ok());
    }

    #[test]
    fn query_text_round_trip(seed in any::<u64>(), v in 0usize..3) {
        let f = PrimeField::new(5).unwrap();
        let p = SchemeParams::ppc(f, 4, 2, 2, CandidateSet::nonparallel_monomials(f, 2, 2).unwrap()).unwrap();
        let qs = build_queries(&p, v, seed).unwrap();
        for line in qs.to_text().lines() {
            prop_assert_eq!(TauSum::parse(line).unwrap().to_text(), line);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Random small linear schemes recover the desired evaluation and hit
    /// the closed-form download exactly.
    #[test]
    fn random_linear_schemes_recover(
        n in 2usize..6,
        k in 1usize..3,
        rows in prop::collection::vec(prop::collection::vec(0u32..7, 2), 1..4),
        seed in any::<u64>(),
    ) {
        prop_assume!(k < n);
        let f = PrimeField::new(7).unwrap();
        let set = CandidateSet::linear(f, &rows);
        prop_assume!(set.is_ok());
        let p = SchemeParams::plc_mds(f, n, k, set.unwrap()).unwrap();
        let v = (seed % p.mu() as u64) as usize;
        let out = run_end_to_end(&p, v, seed).unwrap();
        prop_assert_eq!(&out.report.measured_factor, &out.report.closed_form_factor);
        prop_assert!(out.decoded.removed_failures.is_empty());
        if let Some(c) = out.report.converse {
            prop_assert!(out.report.rate_measured <= c + 1e-9);
        }
    }

    #[test]
    fn random_polynomial_schemes_recover(n in 3usize..7, k in 1usize..3, systematic in any::<bool>(), seed in any::<u64>()) {
        prop_assume!(k < n);
        let f = PrimeField::new(7).unwrap();
        let set = CandidateSet::all_monomials(f, 2, 2).unwrap();
        let p = if systematic {
            SchemeParams::sys_ppc(f, n, k, 2, set).unwrap()
        } else {
            SchemeParams::ppc(f, n, k, 2, set).unwrap()
        };
        let v = (seed % p.mu() as u64) as usize;
        let out = run_end_to_end(&p, v, seed).unwrap();
        prop_assert_eq!(&out.report.measured_factor, &out.report.closed_form_factor);
        prop_assert_eq!(out.decoded.per_round.iter().sum::<usize>(), out.report.l);
    }
}
