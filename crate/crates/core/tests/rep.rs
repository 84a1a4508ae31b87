use std::sync::Arc;

use posetrep::rep::{
    are_isomorphic, decompose, decompose_rep, el_end_dimension, el_hom_basis, is_indecomposable,
    is_quite_sincere, is_rep_morphism, rep_end_dimension, rep_hom_basis, rep_isomorphism, rho,
};
use posetrep::{DimensionVector, ExactMatrix, Fp, MatrixRep, Poset, SubspaceRep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf(p: u64) -> Fp {
    Fp::new(p).unwrap()
}

fn random_poset(rng: &mut ChaCha8Rng, max: usize) -> Arc<Poset> {
    let n = rng.gen_range(1..=max);
    let all = Poset::enumerate_all(n);
    Arc::new(all[rng.gen_range(0..all.len())].clone())
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

/// A random invertible matrix, as a product of elementary operations.
fn random_invertible(rng: &mut ChaCha8Rng, f: &Fp, n: usize) -> ExactMatrix<Fp> {
    let mut g = ExactMatrix::identity(f, n);
    for _ in 0..4 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let mut e = ExactMatrix::identity(f, n);
        if i == j {
            e.set(i, i, rng.gen_range(1..f.p()));
        } else {
            e.set(i, j, rng.gen_range(0..f.p()));
        }
        g = e.mul(&g);
    }
    g
}

fn three_lines(f: &Fp, swap: bool) -> MatrixRep<Fp> {
    let p = Arc::new(Poset::antichain(3));
    let (x, y) = (
        ExactMatrix::from_i64(f, &[&[1], &[0]]),
        ExactMatrix::from_i64(f, &[&[0], &[1]]),
    );
    let z = ExactMatrix::from_i64(f, &[&[1], &[1]]);
    let blocks = if swap { vec![y, x, z] } else { vec![x, y, z] };
    MatrixRep::new(p, *f, 2, blocks).unwrap()
}

#[test]
fn special_elements() {
    let f = gf(2);
    let a3 = Arc::new(Poset::antichain(3));
    let e = MatrixRep::special_e_pair(a3.clone(), f, 0, 1);
    assert_eq!(e.dimension(), DimensionVector::new(1, vec![1, 1, 0]));
    assert_eq!(
        MatrixRep::special_t0(a3.clone(), f).dimension(),
        DimensionVector::new(1, vec![0; 3])
    );
    assert_eq!(
        MatrixRep::special_t(a3.clone(), f, 2).dimension(),
        DimensionVector::new(0, vec![0, 0, 1])
    );
    let one = Arc::new(Poset::antichain(1));
    assert_eq!(
        MatrixRep::special_e(one, f, 0).dimension(),
        DimensionVector::new(1, vec![1])
    );
    assert_eq!(el_end_dimension(&MatrixRep::special_t(a3, f, 0)), 1);
}

#[test]
fn three_lines_structure() {
    let f = gf(2);
    let u = three_lines(&f, false);
    let v = rho(&u);
    assert_eq!(rep_end_dimension(&v), 1);
    assert!(is_indecomposable(&u).unwrap());
    assert!(is_quite_sincere(&v).unwrap());
    let vv = v.direct_sum(&v).unwrap();
    assert_eq!(rep_hom_basis(&v, &vv).unwrap().len(), 2);
    let iso = are_isomorphic(&u, &three_lines(&f, true)).unwrap().unwrap();
    assert!(iso.is_invertible() && iso.is_morphism(&u, &three_lines(&f, true)));
    let id = are_isomorphic(&u, &u).unwrap().unwrap();
    assert!(id.is_morphism(&u, &u));
}

#[test]
fn decomposable_examples() {
    let f = gf(3);
    let a2 = Arc::new(Poset::antichain(2));
    let ex = MatrixRep::special_e(a2.clone(), f, 0);
    let ey = MatrixRep::special_e(a2.clone(), f, 1);
    let sum = ex.direct_sum(&ey).unwrap();
    assert_eq!(sum.dimension(), DimensionVector::new(2, vec![1, 1]));
    assert!(!is_indecomposable(&sum).unwrap());
    assert!(are_isomorphic(&ex, &ey).unwrap().is_none());
    assert!(!is_quite_sincere(&rho(&ex)).unwrap());

    let d = decompose(&ex.direct_sum(&ex).unwrap()).unwrap();
    assert_eq!(d.summands.len(), 2);
    assert!(d
        .summands
        .iter()
        .all(|s| are_isomorphic(s, &ex).unwrap().is_some()));

    let mixed = MatrixRep::special_t(a2.clone(), f, 0)
        .direct_sum(&ey)
        .unwrap();
    let d = decompose(&mixed).unwrap();
    assert_eq!(d.trivial, vec![1, 0]);
    assert_eq!(d.summands.len(), 1);
    assert!(are_isomorphic(&d.summands[0], &ey).unwrap().is_some());
    assert_eq!(d.trivial_summands(&mixed).len(), 1);
}

#[test]
fn lift_inverts_rho() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [2, 3] {
        let f = gf(p);
        for _ in 0..200 {
            let s = random_poset(&mut rng, 4);
            let v = rho(&random_element(&mut rng, &s, &f, 4, 2));
            let u = v.lift();
            assert_eq!(rho(&u), v);
            assert_eq!(u.dimension(), v.dimension());
            assert!(u.realizes_dimension());
        }
    }
}

#[test]
fn rho_is_full_and_functorial() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for p in [2, 3] {
        let f = gf(p);
        for _ in 0..150 {
            let s = random_poset(&mut rng, 3);
            let u = random_element(&mut rng, &s, &f, 3, 2);
            let w = random_element(&mut rng, &s, &f, 3, 2);
            let (ru, rw) = (rho(&u), rho(&w));
            let homs = el_hom_basis(&u, &w).unwrap();
            let mut images = Vec::new();
            for h in &homs {
                assert!(h.is_morphism(&u, &w));
                assert!(is_rep_morphism(&ru, &rw, &h.phi0));
                images.push(h.phi0.data().to_vec());
            }
            let image_rank = if images.is_empty() || u.d0() * w.d0() == 0 {
                0
            } else {
                ExactMatrix::from_rows(&f, u.d0() * w.d0(), images)
                    .unwrap()
                    .rank()
            };
            assert_eq!(image_rank, rep_hom_basis(&ru, &rw).unwrap().len());
        }
    }
}

/// Morphisms killed by `ρ` are exactly those factoring through a sum of
/// trivial elements.
#[test]
fn kernel_of_rho_is_trivial_factorizations() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = gf(2);
    for _ in 0..60 {
        let s = random_poset(&mut rng, 3);
        let u = random_element(&mut rng, &s, &f, 2, 2);
        let w = random_element(&mut rng, &s, &f, 2, 2);
        let m = u.total_columns().max(1);
        let parts: Vec<MatrixRep<Fp>> = (0..s.len())
            .flat_map(|a| std::iter::repeat_n(MatrixRep::special_t(s.clone(), f, a), m))
            .collect();
        let t = MatrixRep::direct_sum_all(s.clone(), f, &parts).unwrap();
        let into = el_hom_basis(&u, &t).unwrap();
        let out = el_hom_basis(&t, &w).unwrap();
        let composites: Vec<Vec<u32>> = into
            .iter()
            .flat_map(|a| out.iter().map(move |b| a.then(b).phi1.data().to_vec()))
            .collect();
        let width = u.total_columns() * w.total_columns();
        let factor_dim = if composites.is_empty() || width == 0 {
            0
        } else {
            ExactMatrix::from_rows(&f, width, composites)
                .unwrap()
                .rank()
        };
        let homs = el_hom_basis(&u, &w).unwrap();
        let total = homs.len();
        let image = if total == 0 || u.d0() * w.d0() == 0 {
            0
        } else {
            let rows: Vec<Vec<u32>> = homs.iter().map(|h| h.phi0.data().to_vec()).collect();
            ExactMatrix::from_rows(&f, u.d0() * w.d0(), rows)
                .unwrap()
                .rank()
        };
        assert_eq!(total - image, factor_dim);
    }
}

#[test]
fn decomposition_is_unique_up_to_isomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for p in [2, 3] {
        let f = gf(p);
        for _ in 0..80 {
            let s = random_poset(&mut rng, 4);
            let v = rho(&random_element(&mut rng, &s, &f, 4, 2));
            let g = random_invertible(&mut rng, &f, v.ambient());
            let w = v.transform(&g);
            let (dv, dw) = (decompose_rep(&v).unwrap(), decompose_rep(&w).unwrap());
            assert_eq!(dv.summands.len(), dw.summands.len());
            let mut used = vec![false; dw.summands.len()];
            for x in &dv.summands {
                assert!(rep_end_dimension(x) > 0);
                let hit = dw
                    .summands
                    .iter()
                    .enumerate()
                    .position(|(l, y)| !used[l] && rep_isomorphism(x, y).unwrap().is_some())
                    .expect("matching summand");
                used[hit] = true;
            }
            let iso = rep_isomorphism(&v, &w).unwrap().unwrap();
            assert!(iso.is_invertible() && is_rep_morphism(&v, &w, &iso));
            let joined = dv.summands.iter().skip(1).fold(
                dv.summands
                    .first()
                    .cloned()
                    .unwrap_or_else(|| SubspaceRep::zero(s.clone(), f)),
                |acc, x| acc.direct_sum(x).unwrap(),
            );
            assert!(rep_isomorphism(&joined, &v).unwrap().is_some());
        }
    }
}

#[test]
fn el_isomorphism_matches_invertible_change() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let f = gf(3);
    for _ in 0..80 {
        let s = random_poset(&mut rng, 3);
        let u = random_element(&mut rng, &s, &f, 3, 2);
        let g = random_invertible(&mut rng, &f, u.d0());
        let moved = MatrixRep::from_full(s.clone(), &g.mul(&u.full_matrix()), &u.widths()).unwrap();
        let phi = are_isomorphic(&u, &moved)
            .unwrap()
            .expect("row change is an isomorphism");
        assert!(phi.is_invertible() && phi.is_morphism(&u, &moved));
        let sum = decompose(&u).unwrap();
        let rebuilt = sum
            .summands
            .iter()
            .chain(sum.trivial_summands(&u).iter())
            .fold(
                MatrixRep::zero(s.clone(), f, &DimensionVector::zero(s.len())).unwrap(),
                |acc, x| acc.direct_sum(x).unwrap(),
            );
        assert!(
            are_isomorphic(&rebuilt, &u).unwrap().is_some(),
            "{:?}",
            u.dimension()
        );
    }
}

#[test]
fn end_of_double_scalar_element() {
    let f = gf(2);
    let u = three_lines(&f, false);
    let uu = u.direct_sum(&u).unwrap();
    assert_eq!(rep_end_dimension(&rho(&uu)), 4);
    assert_eq!(el_end_dimension(&uu), 4);
}
