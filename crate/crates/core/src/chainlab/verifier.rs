//! Randomized verifier for the level-complex identities.
//!
//! Every case draws a random finite module, a level `m`, a multiplier `n`
//! and sample elements from its own seeded stream, so results do not
//! depend on scheduling. Failing cases are shrunk before being reported.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cohomology::{extension_n, is_plus_minus};
use super::kahn::KahnM;
use super::level::*;
use super::{
    connecting_hom, cupe_homotopy_check, level_cohomology, mu, proj, xi, CoefModule, FiniteModule,
    FrobeniusAction, Integers, LevelElement,
};
use crate::exactalg::random::{random_automorphism, random_element, random_invariants};
use crate::exactalg::{FpGroup, FpMorphism, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierConfig {
    pub seed: u64,
    pub cases: usize,
    pub max_order: u64,
    pub max_level: usize,
    pub max_n: usize,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig {
            seed: 0x5eed_cafe,
            cases: 200,
            max_order: 512,
            max_level: 6,
            max_n: 4,
        }
    }
}

/// Everything one case needs, in plain integers so it serializes cleanly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub index: usize,
    pub moduli: Vec<i64>,
    pub phi: Vec<Vec<i64>>,
    pub m: usize,
    pub n: usize,
    pub a: i64,
    /// A level-`m` element.
    pub f: Vec<Vec<i64>>,
    /// A level-`m` element with entries fixed by `phi^m`.
    pub g: Vec<Vec<i64>>,
    pub c: Vec<i64>,
    /// A level-`m` element with integer coefficients.
    pub ints: Vec<i64>,
    pub ext_n: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub identity: String,
    pub message: String,
    pub counterexample: Case,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierReport {
    pub cases: usize,
    pub checks: usize,
    pub failures: Vec<Failure>,
}

impl VerifierReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn small(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("small entry")).collect()
}

/// Elements fixed by `phi^m`, as generators of `ker(phi^m - 1)`.
fn fixed_generators(module: &FiniteModule, m: usize) -> Vec<Vec<BigInt>> {
    let g = module.group();
    let a = module.phi_power_matrix(m as i64).minus_identity();
    let (_, incl) = FpMorphism::new_unchecked(g.clone(), g, a)
        .kernel()
        .expect("endomorphism of a canonical presentation");
    incl.matrix()
        .columns()
        .into_iter()
        .map(|v| module.reduce(&v))
        .collect()
}

pub fn generate_case(config: &VerifierConfig, index: usize) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let mut inv = random_invariants(&mut rng, config.max_order.max(2));
    if inv.is_empty() {
        inv.push(2);
    }
    let moduli: Vec<BigInt> = inv.iter().map(|&d| BigInt::from(d)).collect();
    let phi = random_automorphism(&mut rng, &moduli);
    let module = FiniteModule::new(moduli.clone(), phi.clone()).expect("random automorphism");
    let m = rng.gen_range(1..=config.max_level.max(1));
    let n = rng.gen_range(1..=config.max_n.max(1));
    let a = rng.gen_range(-(2 * m as i64)..=2 * m as i64);

    let f = (0..m).map(|_| small(&random_element(&mut rng, &moduli))).collect();
    let gens = fixed_generators(&module, m);
    let g = (0..m)
        .map(|_| {
            let mut x = module.zero();
            for gen in &gens {
                let k = BigInt::from(rng.gen_range(0..8));
                x = module.add(&x, &module.mul_int(&k, gen));
            }
            small(&x)
        })
        .collect();
    let c = small(&random_element(&mut rng, &moduli));
    let ints = (0..m).map(|_| rng.gen_range(-20..=20)).collect();
    let ext_n = rng.gen_range(-3..=3);
    Case {
        index,
        moduli: inv.iter().map(|&d| d as i64).collect(),
        phi: phi.to_rows().iter().map(|r| small(r)).collect(),
        m,
        n,
        a,
        f,
        g,
        c,
        ints,
        ext_n,
    }
}

/// Decoded case data handed to each identity.
pub struct Ctx {
    module: FiniteModule,
    group: FpGroup,
    m: usize,
    n: usize,
    a: i64,
    f: LevelElement<Vec<BigInt>>,
    g: LevelElement<Vec<BigInt>>,
    c: Vec<BigInt>,
    ints: LevelElement<BigInt>,
    ext_n: i64,
}

impl Ctx {
    fn decode(case: &Case) -> Result<Ctx, String> {
        let moduli = big(&case.moduli);
        let phi = IntMatrix::from_rows(&case.phi);
        let module = FiniteModule::new(moduli, phi).map_err(|e| e.to_string())?;
        let lvl = |rows: &Vec<Vec<i64>>| {
            LevelElement::new(rows.iter().map(|r| module.reduce(&big(r))).collect())
                .map_err(|e| e.to_string())
        };
        Ok(Ctx {
            group: module.group(),
            m: case.m,
            n: case.n,
            a: case.a,
            f: lvl(&case.f)?,
            g: lvl(&case.g)?,
            c: module.reduce(&big(&case.c)),
            ints: LevelElement::new(big(&case.ints)).map_err(|e| e.to_string())?,
            ext_n: case.ext_n,
            module,
        })
    }
}

type Check = fn(&Ctx) -> Result<(), String>;

fn expect_eq<T: PartialEq + std::fmt::Debug>(lhs: T, rhs: T) -> Result<(), String> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("{lhs:?} != {rhs:?}"))
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn s_prime(f: &LevelElement<BigInt>) -> BigRational {
    BigRational::new(big_s(&Integers, f), BigInt::from(f.level()))
}

/// The identity suite, by name.
pub const IDENTITIES: &[(&str, Check)] = &[
    ("t_power_is_phi_power", |x| {
        let mut t = x.f.clone();
        for _ in 0..x.m {
            t = t_twisted(&x.module, &t);
        }
        let want: Vec<_> = x.f.entries().iter().map(|e| x.module.phi_pow(e, x.m as i64)).collect();
        expect_eq(t.into_entries(), want)
    }),
    ("tau_commutes_with_t", |x| {
        expect_eq(
            tau(&t_twisted(&x.module, &x.f), x.a),
            t_twisted(&x.module, &tau(&x.f, x.a)),
        )
    }),
    ("delta_commutes_with_t", |x| {
        expect_eq(
            delta(&t_twisted(&x.module, &x.f), x.n),
            t_twisted(&x.module, &delta(&x.f, x.n)),
        )
    }),
    ("delta_commutes_with_tau", |x| {
        expect_eq(delta(&tau(&x.f, x.a), x.n), tau(&delta(&x.f, x.n), x.a))
    }),
    ("norm_descent", |x| {
        let md = &x.module;
        let lhs = md.sub(
            &norm(md, &md.phi_pow(&x.c, x.m as i64), x.m, x.n),
            &norm(md, &x.c, x.m, x.n),
        );
        let k = md.moduli().len();
        let map = IntMatrix::identity(k).sub(&md.phi_power_matrix(-((x.m * x.n) as i64)));
        let f = FpMorphism::new_unchecked(x.group.clone(), x.group.clone(), map);
        match f.lift(&lhs) {
            Some(_) => Ok(()),
            None => Err(format!("{lhs:?} is not in the image of 1 - phi^-(nm)")),
        }
    }),
    ("s_after_delta_is_norm_after_s", |x| {
        let md = &x.module;
        expect_eq(
            big_s(md, &delta(&x.f, x.n)),
            norm(md, &big_s(md, &x.f), x.m, x.n),
        )
    }),
    ("delta_after_big_delta", |x| {
        let md = &x.module;
        let c0 = &x.g.entries()[0];
        let lhs = delta(&big_delta(md, c0, x.m).map_err(err)?, x.n);
        expect_eq(lhs, big_delta(md, c0, x.m * x.n).map_err(err)?)
    }),
    ("s_after_big_delta_is_m", |x| {
        let md = &x.module;
        let c0 = &x.g.entries()[0];
        let d = big_delta(md, c0, x.m).map_err(err)?;
        expect_eq(big_s(md, &d), md.mul_int(&BigInt::from(x.m), c0))
    }),
    ("boundary_identity", |x| {
        let md = &x.module;
        let lhs = big_s(md, &t_minus_one(md, &x.f));
        let last = md.phi(&x.f.entries()[x.m - 1]);
        let rhs = md.sub(&last, &md.phi_pow(&last, -(x.m as i64)));
        expect_eq(lhs, rhs)
    }),
    ("big_delta_lands_in_cycles", |x| {
        let md = &x.module;
        let d = big_delta(md, &x.g.entries()[0], x.m).map_err(err)?;
        expect_eq(t_minus_one(md, &d), LevelElement::zero(md, x.m))
    }),
    ("cycles_come_from_big_delta", |x| {
        let md = &x.module;
        let k = md.moduli().len();
        let m = x.m;
        // Kernel generators of t - 1 on F^m.
        let mut rel = IntMatrix::zeros(0, 0);
        for _ in 0..m {
            rel = rel.block_diag(x.group.relations());
        }
        let big_group = FpGroup::from_relations(rel);
        let mut t = IntMatrix::zeros(m * k, m * k);
        for i in 0..m {
            let src = (i + m - 1) % m;
            for r in 0..k {
                for c in 0..k {
                    t[(i * k + r, src * k + c)] = md.phi_matrix()[(r, c)].clone();
                }
            }
        }
        let d = FpMorphism::new_unchecked(big_group.clone(), big_group, t.minus_identity());
        let (_, incl) = d.kernel().map_err(err)?;
        for col in incl.matrix().columns() {
            let f = LevelElement::new(col.chunks(k).map(|ch| md.reduce(ch)).collect()).map_err(err)?;
            let rebuilt = big_delta(md, &f.entries()[0], m).map_err(err)?;
            expect_eq(&rebuilt, &f)?;
        }
        Ok(())
    }),
    ("kernel_of_s_is_boundaries", |x| {
        let md = &x.module;
        let mut entries = x.f.entries().to_vec();
        entries[0] = md.sub(&entries[0], &big_s(md, &x.f));
        let f = LevelElement::new(entries).map_err(err)?;
        expect_eq(big_s(md, &f), md.zero())?;
        let mut w = LevelElement::zero(md, x.m);
        for j in 1..x.m {
            w = w.add(md, &r_witness(md, &f.entries()[j], j, x.m).map_err(err)?);
        }
        expect_eq(t_minus_one(md, &w), f)
    }),
    ("r_witness_boundary", |x| {
        let md = &x.module;
        for j in 1..x.m {
            let b = t_minus_one(md, &r_witness(md, &x.c, j, x.m).map_err(err)?);
            let mut want = vec![md.zero(); x.m];
            want[j] = x.c.clone();
            want[0] = md.neg(&md.phi_pow(&x.c, -(j as i64)));
            expect_eq(b.into_entries(), want)?;
        }
        Ok(())
    }),
    ("nu_intertwines_t", |x| {
        let md = &x.module;
        expect_eq(
            nu(md, &t_plain(&x.g)).map_err(err)?,
            t_twisted(md, &nu(md, &x.g).map_err(err)?),
        )
    }),
    ("nu_commutes_with_delta", |x| {
        let md = &x.module;
        expect_eq(
            nu(md, &delta(&x.g, x.n)).map_err(err)?,
            delta(&nu(md, &x.g).map_err(err)?, x.n),
        )
    }),
    ("nu_commutes_with_tau", |x| {
        let md = &x.module;
        expect_eq(
            nu(md, &tau_diagonal(md, &x.g, x.a)).map_err(err)?,
            tau(&nu(md, &x.g).map_err(err)?, x.a),
        )
    }),
    ("nu_bijective", |x| {
        let md = &x.module;
        expect_eq(nu_inverse(md, &nu(md, &x.g).map_err(err)?).map_err(err)?, x.g.clone())?;
        expect_eq(nu(md, &nu_inverse(md, &x.g).map_err(err)?).map_err(err)?, x.g.clone())?;
        if md.phi_power_matrix(x.m as i64) == md.phi_power_matrix(0) {
            expect_eq(nu_inverse(md, &nu(md, &x.f).map_err(err)?).map_err(err)?, x.f.clone())?;
        }
        Ok(())
    }),
    ("mu_after_delta", |x| expect_eq(mu(&delta(&x.ints, x.n)), mu(&x.ints))),
    ("mu_equivariant", |x| {
        expect_eq(mu(&tau(&x.ints, x.a)), mu(&x.ints).act(&BigInt::from(x.a)))
    }),
    ("mu_boundary_is_xi_s", |x| {
        expect_eq(mu(&t_minus_one(&Integers, &x.ints)), xi(&s_prime(&x.ints)))
    }),
    ("proj_mu_is_minus_s", |x| expect_eq(proj(&mu(&x.ints)), -s_prime(&x.ints))),
    ("xi_exact", |x| {
        let y = BigRational::new(x.ints.entries()[0].clone(), BigInt::from(x.m));
        let vanishes = xi(&y) == KahnM::zero();
        expect_eq(vanishes, y.is_integer())?;
        expect_eq(proj(&xi(&y)), BigRational::zero())?;
        let k = KahnM::new(y.clone(), BigRational::zero());
        expect_eq(xi(k.first()), k)
    }),
    ("cupe_homotopy", |x| {
        let r = cupe_homotopy_check(&x.module, std::slice::from_ref(&x.f));
        expect_eq(r.failures, 0)
    }),
    ("connecting_map_is_n", |x| {
        let d = connecting_hom(&extension_n(x.ext_n)).map_err(err)?;
        if is_plus_minus(&d, x.ext_n) {
            Ok(())
        } else {
            Err(format!("connecting map {:?} is not +-{}", d.matrix(), x.ext_n))
        }
    }),
    ("level_cohomology_routes", |x| {
        level_cohomology(&CoefModule::Finite(x.module.clone()), x.m)
            .map(|_| ())
            .map_err(err)
    }),
];

fn run_check(check: Check, case: &Case) -> Result<(), String> {
    let ctx = Ctx::decode(case)?;
    check(&ctx)
}

/// Smaller variants of a case: single entries zeroed, parameters pulled
/// toward zero. The level is kept so that fixed entries stay fixed.
fn shrink_candidates(case: &Case) -> Vec<Case> {
    let mut out = Vec::new();
    let mut push = |c: Case| {
        if &c != case {
            out.push(c);
        }
    };
    if case.n > 1 {
        push(Case { n: 1, ..case.clone() });
    }
    if case.a != 0 {
        push(Case { a: 0, ..case.clone() });
        push(Case { a: case.a.signum(), ..case.clone() });
    }
    if case.ext_n != 0 {
        push(Case { ext_n: case.ext_n - case.ext_n.signum(), ..case.clone() });
    }
    for i in 0..case.f.len() {
        for j in 0..case.f[i].len() {
            if case.f[i][j] != 0 {
                let mut c = case.clone();
                c.f[i][j] = 0;
                push(c);
            }
            if case.g[i][j] != 0 {
                let mut c = case.clone();
                c.g[i][j] = 0;
                push(c);
            }
        }
        if case.ints[i] != 0 {
            let mut c = case.clone();
            c.ints[i] = 0;
            push(c);
        }
    }
    for j in 0..case.c.len() {
        if case.c[j] != 0 {
            let mut c = case.clone();
            c.c[j] = 0;
            push(c);
        }
    }
    out
}

/// Greedy shrinking: take any smaller case that still fails.
pub fn shrink(check: Check, case: &Case) -> Case {
    let mut current = case.clone();
    'outer: loop {
        for cand in shrink_candidates(&current) {
            if run_check(check, &cand).is_err() {
                current = cand;
                continue 'outer;
            }
        }
        return current;
    }
}

pub fn check_case(case: &Case) -> (usize, Vec<Failure>) {
    let mut failures = Vec::new();
    for &(name, check) in IDENTITIES {
        if let Err(message) = run_check(check, case) {
            failures.push(Failure {
                identity: name.to_string(),
                message,
                counterexample: shrink(check, case),
            });
        }
    }
    (IDENTITIES.len(), failures)
}

pub fn run(config: &VerifierConfig) -> VerifierReport {
    let results: Vec<(usize, Vec<Failure>)> = (0..config.cases)
        .into_par_iter()
        .map(|i| check_case(&generate_case(config, i)))
        .collect();
    let mut report = VerifierReport {
        cases: config.cases,
        ..Default::default()
    };
    for (checks, failures) in results {
        report.checks += checks;
        report.failures.extend(failures);
    }
    report
}
