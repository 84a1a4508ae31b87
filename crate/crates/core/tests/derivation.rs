use std::sync::Arc;

use posetrep::derivation::{derive_poset, DerivedPoset, MarkedPair, PairReading, Provenance};
use posetrep::rep::{are_isomorphic, decompose_rep, is_indecomposable, rep_isomorphism, rho};
use posetrep::tits::is_finite_type;
use posetrep::{DimensionVector, Error, ExactMatrix, Fp, MatrixRep, Poset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf(p: u64) -> Fp {
    Fp::new(p).unwrap()
}

/// Every `(poset, maximal element)` on at most `max` elements whose
/// incomparable part has width at most 2.
fn pivots(max: usize) -> Vec<DerivedPoset> {
    (1..=max)
        .flat_map(Poset::enumerate_all)
        .flat_map(|p| {
            let p = Arc::new(p);
            p.maximal_elements()
                .into_iter()
                .filter(|&a| {
                    let mask = p.incomparables(a).iter().fold(0u64, |m, &b| m | 1 << b);
                    p.width_within(mask).0 <= 2
                })
                .map(|a| derive_poset(p.clone(), a).unwrap())
                .collect::<Vec<_>>()
        })
        .collect()
}

fn random_element(
    rng: &mut ChaCha8Rng,
    p: &Arc<Poset>,
    f: &Fp,
    max_d0: usize,
    max_w: usize,
) -> MatrixRep<Fp> {
    let d0 = rng.gen_range(0..=max_d0);
    let blocks = (0..p.len())
        .map(|_| {
            let w = rng.gen_range(0..=max_w);
            ExactMatrix::new(
                *f,
                d0,
                w,
                (0..d0 * w).map(|_| rng.gen_range(0..f.p())).collect(),
            )
            .unwrap()
        })
        .collect();
    MatrixRep::new(p.clone(), *f, d0, blocks).unwrap()
}

#[test]
fn derived_order_follows_the_subset_rule() {
    for ctx in pivots(5) {
        let (s, r) = (ctx.base(), ctx.result());
        let as_set = |x: usize| -> Vec<usize> {
            match ctx.provenance()[x] {
                Provenance::Element(b) => vec![b],
                Provenance::Pair(k) => vec![ctx.pairs()[k].first, ctx.pairs()[k].second],
            }
        };
        assert_eq!(r.len(), s.len() - 1 + ctx.pairs().len());
        for x in 0..r.len() {
            for y in 0..r.len() {
                let rule = as_set(x)
                    .iter()
                    .all(|&b| as_set(y).iter().any(|&c| s.le(b, c)));
                assert_eq!(r.le(x, y), rule);
            }
        }
        let theta = s.incomparables(ctx.pivot());
        let incomparable_pairs = theta
            .iter()
            .flat_map(|&b| theta.iter().filter(move |&&c| b < c && !s.comparable(b, c)))
            .count();
        assert_eq!(ctx.pairs().len(), incomparable_pairs);
        for p in ctx.pairs() {
            if s.is_maximal(p.first) != s.is_maximal(p.second) {
                assert!(s.is_maximal(p.second));
            } else {
                assert!(p.first < p.second);
            }
        }
    }
}

#[test]
fn derive_rejects_non_maximal_pivot() {
    let p = Arc::new(Poset::chain(3));
    assert!(matches!(
        derive_poset(p.clone(), 0),
        Err(Error::NotMaximal(_))
    ));
    let bad = vec![MarkedPair {
        first: 0,
        second: 1,
    }];
    assert!(DerivedPoset::from_parts(Arc::new(Poset::antichain(3)), 2, bad.clone()).is_ok());
    assert!(DerivedPoset::from_parts(Arc::new(Poset::antichain(3)), 0, bad).is_err());
}

#[test]
fn integrate_then_differentiate_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ctxs = pivots(5);
    for p in [2, 3] {
        let f = gf(p);
        for _ in 0..300 {
            let ctx = &ctxs[rng.gen_range(0..ctxs.len())];
            let v = random_element(&mut rng, ctx.result(), &f, 3, 1);
            let u = ctx.integrate(&v).unwrap();
            let back = ctx.differentiate(&rho(&u), PairReading::Sum).unwrap();
            assert!(rep_isomorphism(&back, &rho(&v)).unwrap().is_some());
        }
    }
}

#[test]
fn integration_respects_isomorphism_and_completion_choice() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let ctxs = pivots(4);
    let f = gf(3);
    for _ in 0..150 {
        let ctx = &ctxs[rng.gen_range(0..ctxs.len())];
        let v = random_element(&mut rng, ctx.result(), &f, 3, 1);
        let u = ctx.integrate(&v).unwrap();

        // A row change of v integrates to an isomorphic element.
        let n = v.d0();
        let mut g = ExactMatrix::identity(&f, n);
        for _ in 0..3 * n {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let mut e = ExactMatrix::identity(&f, n);
            e.set(i, j, if i == j { 2 } else { 1 });
            g = e.mul(&g);
        }
        let w = MatrixRep::from_full(v.poset_arc().clone(), &g.mul(&v.full_matrix()), &v.widths())
            .unwrap();
        assert!(are_isomorphic(&u, &ctx.integrate(&w).unwrap())
            .unwrap()
            .is_some());

        // Any other completion at the pivot gives an isomorphic element:
        // add combinations of the columns below it and rescale.
        let below: Vec<&ExactMatrix<Fp>> = ctx
            .base()
            .strict_lower_cone(ctx.pivot())
            .iter()
            .map(|&b| v.block(ctx.element_index(b)))
            .collect();
        let below = ExactMatrix::hstack(&f, n, &below);
        let completion = u
            .block(ctx.pivot())
            .submatrix(0, n, 0, u.block(ctx.pivot()).cols());
        let k = completion.cols();
        let mix = ExactMatrix::new(
            f,
            below.cols(),
            k,
            (0..below.cols() * k).map(|_| rng.gen_range(0..3)).collect(),
        )
        .unwrap();
        let alt = completion.scale(&2).add(&below.mul(&mix));
        let other = ctx.integrate_with(&v, &alt).unwrap();
        assert!(are_isomorphic(&u, &other).unwrap().is_some());
    }
}

#[test]
fn dstar_and_subordinates_invert_each_other() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let ctxs = pivots(5);
    let f = gf(2);
    for _ in 0..300 {
        let ctx = &ctxs[rng.gen_range(0..ctxs.len())];
        let el = random_element(&mut rng, ctx.result(), &f, 3, 1);
        let u = ctx.integrate(&el).unwrap();
        let d = u.dimension();
        assert_eq!(
            d,
            ctx.dstar(&el.dimension(), u.block(ctx.pivot()).cols())
                .unwrap()
        );
        if el.realizes_dimension() {
            assert!(ctx
                .subordinate_dimensions(&d)
                .unwrap()
                .contains(&el.dimension()));
        }
        let subs = ctx.subordinate_dimensions(&d).unwrap();
        for s in &subs {
            assert_eq!(ctx.dstar(s, d.values[ctx.pivot()]).unwrap(), d);
            assert!(s.total() + d.values[ctx.pivot()] <= d.total());
        }
        let mut sorted = subs.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), subs.len());
    }
}

#[test]
fn subordinates_of_finite_type_are_finite_type() {
    for ctx in pivots(4) {
        let n = ctx.base().len();
        for code in 0..4usize.pow(n as u32 + 1) {
            let digits: Vec<usize> = (0..=n).map(|i| code / 4usize.pow(i as u32) % 4).collect();
            let d = DimensionVector::new(digits[0], digits[1..].to_vec());
            if !is_finite_type(ctx.base(), &d).unwrap() {
                continue;
            }
            for s in ctx.subordinate_dimensions(&d).unwrap() {
                assert!(is_finite_type(ctx.result(), &s).unwrap(), "{d} -> {s}");
            }
        }
    }
}

#[test]
fn exceptional_members_are_killed_and_indecomposable() {
    let f = gf(3);
    for ctx in pivots(5) {
        let set = ctx.exceptional_set();
        for (e, d) in set.elements(ctx.base(), &f).iter().zip(set.dimensions()) {
            assert_eq!(e.dimension(), d);
            assert!(is_indecomposable(e).unwrap());
            assert_eq!(
                ctx.differentiate(&rho(e), PairReading::Sum)
                    .unwrap()
                    .ambient(),
                0
            );
        }
    }
}

#[test]
fn representations_on_theta_split_into_exceptional_members() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let f = gf(2);
    for ctx in pivots(5) {
        let theta = ctx.base().incomparables(ctx.pivot());
        let exceptional: Vec<_> = ctx
            .exceptional_set()
            .elements(ctx.base(), &f)
            .iter()
            .map(rho)
            .collect();
        for _ in 0..5 {
            let mut u = random_element(&mut rng, ctx.base(), &f, 3, 2);
            let d0 = u.d0();
            let blocks: Vec<ExactMatrix<Fp>> = (0..ctx.base().len())
                .map(|b| {
                    if theta.contains(&b) {
                        u.block(b).clone()
                    } else {
                        ExactMatrix::zeros(&f, d0, 0)
                    }
                })
                .collect();
            u = MatrixRep::new(ctx.base().clone(), f, d0, blocks).unwrap();
            for s in decompose_rep(&rho(&u)).unwrap().summands {
                assert!(exceptional
                    .iter()
                    .any(|e| rep_isomorphism(&s, e).unwrap().is_some()));
            }
        }
    }
}

#[test]
fn intersection_reading_breaks_order_on_three_lines() {
    let f = gf(2);
    let ctx = derive_poset(Arc::new(Poset::antichain(3)), 0).unwrap();
    let blocks = vec![
        ExactMatrix::from_i64(&f, &[&[1], &[0]]),
        ExactMatrix::from_i64(&f, &[&[0], &[1]]),
        ExactMatrix::from_i64(&f, &[&[1], &[1]]),
    ];
    let v = rho(&MatrixRep::new(ctx.base().clone(), f, 2, blocks).unwrap());
    let sum = ctx.differentiate(&v, PairReading::Sum).unwrap();
    assert_eq!(sum.subspace(ctx.pair_index(0)).cols(), 1);
    let meet = ctx.differentiate(&v, PairReading::Intersection).unwrap();
    assert_eq!(meet.subspace(ctx.pair_index(0)).cols(), 0);
    // The intersection reading loses the round trip.
    let v1 = MatrixRep::new(
        ctx.result().clone(),
        f,
        1,
        vec![
            ExactMatrix::zeros(&f, 1, 0),
            ExactMatrix::zeros(&f, 1, 0),
            ExactMatrix::identity(&f, 1),
        ],
    )
    .unwrap();
    assert!(rep_isomorphism(&meet, &rho(&v1)).unwrap().is_none());
    assert!(rep_isomorphism(&sum, &rho(&v1)).unwrap().is_some());
}

#[test]
fn context_is_checked() {
    let f = gf(2);
    let ctx = derive_poset(Arc::new(Poset::antichain(3)), 0).unwrap();
    let wrong = MatrixRep::zero(
        Arc::new(Poset::chain(3)),
        f,
        &DimensionVector::new(1, vec![0; 3]),
    )
    .unwrap();
    assert_eq!(ctx.integrate(&wrong), Err(Error::ContextMismatch));
    assert_eq!(
        ctx.differentiate(&rho(&wrong), PairReading::Sum),
        Err(Error::ContextMismatch)
    );
}
