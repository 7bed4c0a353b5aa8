use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use weil_core::exactalg::{hnf, snf, FpGroup, FpMorphism, IntMatrix};

fn bi(v: i64) -> BigInt {
    BigInt::from(v)
}

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c)
            .prop_map(move |v| IntMatrix::from_vec(r, c, v.into_iter().map(BigInt::from).collect()))
    })
}

/// Cofactor expansion; fine for the small sizes used here.
fn det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut acc = BigInt::zero();
    for j in 0..n {
        if rows[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = rows[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &rows[0][j] * det(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// gcd of all k-by-k minors.
fn determinantal_divisor(a: &IntMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rs in subsets(a.rows(), k) {
        for cs in subsets(a.cols(), k) {
            let sub: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| a[(i, j)].clone()).collect()).collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

fn is_unimodular(m: &IntMatrix) -> bool {
    m.is_square() && m.det().abs().is_one()
}

/// Canonical moduli of a finite group and a morphism matrix compatible with
/// them: entry (i, j) is a multiple of `e_i / gcd(e_i, d_j)`.
fn finite_morphism() -> impl Strategy<Value = (Vec<i64>, Vec<i64>, Vec<i64>)> {
    let moduli = prop::collection::vec(2i64..=12, 1..=3);
    (moduli.clone(), moduli).prop_flat_map(|(src, tgt)| {
        let n = src.len() * tgt.len();
        (Just(src), Just(tgt), prop::collection::vec(-20i64..=20, n))
    })
}

fn endomorphism() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    prop::collection::vec(2i64..=12, 1..=3).prop_flat_map(|m| {
        let n = m.len() * m.len();
        (Just(m), prop::collection::vec(-20i64..=20, n))
    })
}

fn build_morphism(src: &[i64], tgt: &[i64], raw: &[i64]) -> FpMorphism {
    let mut entries = Vec::with_capacity(raw.len());
    for (i, e) in tgt.iter().enumerate() {
        for (j, d) in src.iter().enumerate() {
            let step = e / e.gcd(d);
            entries.push(bi(raw[i * src.len() + j] * step));
        }
    }
    let g = FpGroup::from_invariants(&src.iter().map(|&x| bi(x)).collect::<Vec<_>>());
    let h = FpGroup::from_invariants(&tgt.iter().map(|&x| bi(x)).collect::<Vec<_>>());
    FpMorphism::new(g, h, IntMatrix::from_vec(tgt.len(), src.len(), entries)).expect("compatible by construction")
}

/// Brute-force element count of the kernel.
fn kernel_count(src: &[i64], f: &FpMorphism) -> u64 {
    let mut count = 0;
    let mut x = vec![0i64; src.len()];
    loop {
        let v: Vec<BigInt> = x.iter().map(|&c| bi(c)).collect();
        if f.target().is_zero_element(&f.apply(&v)) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == src.len() {
                return count;
            }
            x[k] += 1;
            if x[k] < src[k] {
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_is_a_valid_decomposition(a in matrix(5, 30)) {
        let s = snf(&a);
        prop_assert_eq!(s.left.mul(&a).mul(&s.right), s.diag.clone());
        prop_assert!(is_unimodular(&s.left));
        prop_assert!(is_unimodular(&s.right));
        let d = s.diagonal();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    prop_assert!(s.diag[(i, j)].is_zero());
                }
            }
        }
        for w in d.windows(2) {
            prop_assert!(!w[0].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn smith_diagonal_matches_determinantal_divisors(a in matrix(4, 12)) {
        let d = snf(&a).diagonal();
        let mut prod = BigInt::one();
        for k in 1..=d.len() {
            prod *= &d[k - 1];
            prop_assert_eq!(prod.clone(), determinantal_divisor(&a, k));
        }
    }

    #[test]
    fn hermite_form_is_echelon_and_reduced(a in matrix(5, 30)) {
        let h = hnf(&a);
        prop_assert_eq!(h.transform.mul(&a), h.form.clone());
        prop_assert!(is_unimodular(&h.transform));
        prop_assert_eq!(h.rank(), a.to_rational().rank());
        for (r, &c) in h.pivots.iter().enumerate() {
            prop_assert!(h.form[(r, c)].is_positive());
            for above in 0..r {
                let x = &h.form[(above, c)];
                prop_assert!(!x.is_negative() && x < &h.form[(r, c)]);
            }
            for j in 0..c {
                prop_assert!(h.form[(r, j)].is_zero());
            }
        }
        for r in h.rank()..a.rows() {
            prop_assert!(h.form.row(r).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn morphism_order_identities((src, tgt, raw) in finite_morphism()) {
        let f = build_morphism(&src, &tgt, &raw);
        let (ker, incl) = f.kernel().unwrap();
        let im = f.image().unwrap();
        let coker = f.cokernel().unwrap();
        let (k, i, c) = (ker.order().unwrap(), im.order().unwrap(), coker.order().unwrap());
        prop_assert_eq!(&k * &i, f.source().order().unwrap());
        prop_assert_eq!(&i * &c, f.target().order().unwrap());
        prop_assert_eq!(k, BigInt::from(kernel_count(&src, &f)));
        prop_assert!(f.compose(&incl).is_zero());
    }

    #[test]
    fn endomorphisms_of_finite_groups_have_equal_kernel_and_cokernel((src, raw) in endomorphism()) {
        let f = build_morphism(&src, &src, &raw);
        prop_assert_eq!(f.kernel().unwrap().0.order(), f.cokernel().unwrap().order());
    }

    #[test]
    fn normalization_is_idempotent(a in matrix(4, 20)) {
        let g = FpGroup::from_relations(a);
        let n = g.normalized();
        prop_assert!(n.is_isomorphic(&g));
        prop_assert_eq!(n.normalized(), n.clone());
        prop_assert_eq!(n.invariant_factors(), g.invariant_factors());
    }

    #[test]
    fn presentations_by_invariants_round_trip(f in prop::collection::vec(1i64..=30, 0..5)) {
        let g = FpGroup::from_invariants(&f.iter().map(|&x| bi(x)).collect::<Vec<_>>());
        let expected: BigInt = f.iter().map(|&x| bi(x)).product();
        prop_assert_eq!(g.order(), Some(expected));
        let canon = FpGroup::from_invariants(g.invariant_factors());
        prop_assert!(canon.is_isomorphic(&g));
    }
}
