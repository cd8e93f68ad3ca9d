use std::sync::Arc;

use kergrad::cylinder::{hat, proj_relate, refine_partition, ActionSpec, Coord, Projection, Relation};
use kergrad::folner::parse_schedule;
use kergrad::group::{compression_matrix, compression_matrix_enumerated};
use kergrad::linalg::{joint_kernel_dim, kernel_dim, rank, reduce_mod};
use kergrad::tgraph::{component_census, gradient_series, lamplighter_parity_series, series_from_census, TDecomposition};
use kergrad::{
    gradient_estimate, Dyadic, ExactMatrix, FieldSpec, FolnerBox, GroupElement, GroupRingElement, GroupRingMatrix,
    GroupSpec,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn groups() -> Vec<Arc<GroupSpec>> {
    vec![
        Arc::new(GroupSpec::lamplighter()),
        Arc::new(GroupSpec::shifts(2).unwrap()),
        Arc::new(GroupSpec::with_full_aut(1, 2).unwrap()),
    ]
}

fn random_word(rng: &mut ChaCha8Rng, g: &GroupSpec) -> GroupElement {
    let mut x = g.identity();
    for _ in 0..rng.gen_range(0..6) {
        let k = rng.gen_range(0..g.shift_rank());
        let gen = match rng.gen_range(0..4) {
            0 => GroupElement::shift(g, k, if rng.gen_bool(0.5) { 1 } else { -1 }),
            1 => GroupElement::lamp(g, k, rng.gen_range(-2..=2)),
            2 if g.finite_bits() > 0 => GroupElement::finite(g, rng.gen_range(0..1u64 << g.finite_bits())),
            3 if g.aut().order() > 1 => GroupElement::aut(g, rng.gen_range(0..g.aut().order())),
            _ => GroupElement::lamp(g, k, 0),
        };
        x = g.mul(&x, &gen);
    }
    x
}

fn random_lamps(rng: &mut ChaCha8Rng, g: &Arc<GroupSpec>, terms: usize) -> GroupRingElement {
    let mut x = GroupRingElement::zero(g);
    for _ in 0..terms {
        let mut e = g.identity();
        for _ in 0..rng.gen_range(0..3) {
            e = g.mul(&e, &GroupElement::lamp(g, 0, rng.gen_range(-2..=2)));
        }
        x.add_term(e, Dyadic::new(rng.gen_range(-4..=4), rng.gen_range(0..3)));
    }
    x
}

fn random_projection(rng: &mut ChaCha8Rng, g: &GroupSpec) -> Projection {
    let mut pool: Vec<Coord> = (-2..=2).map(|pos| Coord::Lamp { track: 0, pos }).collect();
    pool.extend((0..g.finite_bits()).map(Coord::Finite));
    let mut window = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        window.push(pool.swap_remove(rng.gen_range(0..pool.len())));
    }
    window.sort();
    Projection::from_bools(window.clone(), (0..1 << window.len()).map(|_| rng.gen_bool(0.5)).collect())
}

// Plain Gaussian elimination, kept separate from the library's sparse routines.
fn oracle_rank_mod(mut a: Vec<Vec<i64>>, p: i64) -> usize {
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x = x.rem_euclid(p);
        }
    }
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, piv);
        let inv = (1..p).find(|x| x * a[r][c] % p == 1).unwrap();
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let f = a[i][c] * inv % p;
                for j in 0..cols {
                    a[i][j] = (a[i][j] - f * a[r][j]).rem_euclid(p);
                }
            }
        }
        r += 1;
    }
    r
}

fn oracle_rank_q(a: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> =
        a.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, piv);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

fn oracle_rank(a: &[Vec<i64>], field: FieldSpec) -> usize {
    if field.is_rational() {
        oracle_rank_q(a)
    } else {
        oracle_rank_mod(a.to_vec(), field.characteristic() as i64)
    }
}

fn field_of(i: usize) -> FieldSpec {
    [FieldSpec::rationals(), FieldSpec::prime(3).unwrap(), FieldSpec::prime(5).unwrap(), FieldSpec::prime(7).unwrap()]
        [i % 4]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms(seed in any::<u64>(), gi in 0usize..3) {
        let g = &groups()[gi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_word(&mut rng, g), random_word(&mut rng, g), random_word(&mut rng, g));
        prop_assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
        prop_assert_eq!(g.mul(&x, &g.identity()), x.clone());
        prop_assert_eq!(g.mul(&g.identity(), &x), x.clone());
        prop_assert!(g.mul(&x, &g.inv(&x)).is_identity());
        prop_assert!(g.mul(&g.inv(&x), &x).is_identity());
    }

    #[test]
    fn shift_conjugates_lamps(j in -5i64..5, s in -3i64..3) {
        let g = GroupSpec::lamplighter();
        let t = GroupElement::shift(&g, 0, s);
        prop_assert_eq!(g.conjugate(&t, &GroupElement::lamp(&g, 0, j)), GroupElement::lamp(&g, 0, j + s));
    }

    #[test]
    fn hat_is_a_ring_map(seed in any::<u64>()) {
        let g = Arc::new(GroupSpec::lamplighter());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_lamps(&mut rng, &g, 3);
        let h = random_lamps(&mut rng, &g, 3);
        let prod = hat(&f.mul(&h).unwrap()).unwrap();
        prop_assert!(prod.same_function(&hat(&f).unwrap().mul(&hat(&h).unwrap()).unwrap()).unwrap());
        let sum = hat(&f.add(&h).unwrap()).unwrap();
        prop_assert!(sum.same_function(&hat(&f).unwrap().add(&hat(&h).unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn reduction_is_a_ring_map(a in -1000i64..1000, ea in 0u32..20, b in -1000i64..1000, eb in 0u32..20,
                               pi in 0usize..4) {
        let p = [3u64, 5, 7, 101][pi];
        let (x, y) = (Dyadic::new(a, ea), Dyadic::new(b, eb));
        let r = |d: &Dyadic| reduce_mod(d, p).unwrap();
        prop_assert_eq!(r(&(&x + &y)), r(&x).add(&r(&y)));
        prop_assert_eq!(r(&(&x * &y)), r(&x).mul(&r(&y)));
    }

    #[test]
    fn ranks_match_dense_oracle(seed in any::<u64>(), fi in 0usize..4) {
        let field = field_of(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (r, c) = (rng.gen_range(1..9), rng.gen_range(1..9));
        let density = rng.gen_range(0.1..0.9);
        let gen = |rng: &mut ChaCha8Rng| -> Vec<Vec<i64>> {
            (0..r).map(|_| (0..c).map(|_| if rng.gen_bool(density) { rng.gen_range(-3..=3) } else { 0 }).collect()).collect()
        };
        let a = gen(&mut rng);
        let b = gen(&mut rng);
        let ma = ExactMatrix::from_ints(field, &a).unwrap();
        let mb = ExactMatrix::from_ints(field, &b).unwrap();
        prop_assert_eq!(rank(&ma), oracle_rank(&a, field));
        prop_assert_eq!(kernel_dim(&ma), c - oracle_rank(&a, field));
        let stacked: Vec<Vec<i64>> = a.iter().chain(&b).cloned().collect();
        prop_assert_eq!(joint_kernel_dim(&[ma.clone(), mb]).unwrap(), c - oracle_rank(&stacked, field));
        prop_assert_eq!(rank(&ma.transpose()), rank(&ma));
    }

    #[test]
    fn compression_is_additive_and_route_independent(seed in any::<u64>(), n in 1usize..4, m in 0usize..3) {
        let g = Arc::new(GroupSpec::with_full_aut(1, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let elem = |rng: &mut ChaCha8Rng| {
            let mut x = GroupRingElement::zero(&g);
            for _ in 0..3 {
                x.add_term(random_word(rng, &g), Dyadic::new(rng.gen_range(-2..=2), rng.gen_range(0..2)));
            }
            GroupRingMatrix::scalar(x)
        };
        let s = elem(&mut rng);
        let t = elem(&mut rng);
        let b = FolnerBox::centered(&g, n, m).unwrap();
        let field = FieldSpec::prime(5).unwrap();
        let cs = compression_matrix(&s, &b, field).unwrap();
        prop_assert_eq!(cs.clone(), compression_matrix_enumerated(&s, &b, field).unwrap());
        let sum = compression_matrix(&s.add(&t).unwrap(), &b, field).unwrap();
        let ct = compression_matrix(&t, &b, field).unwrap();
        for i in 0..b.len() {
            for j in 0..b.len() {
                prop_assert_eq!(sum.get(i, j), cs.get(i, j).add(&ct.get(i, j)));
            }
        }
    }

    #[test]
    fn action_preserves_measure_and_composes(seed in any::<u64>()) {
        let g = Arc::new(GroupSpec::with_full_aut(1, 2).unwrap());
        let action = ActionSpec::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_projection(&mut rng, &g);
        let (x, y) = (random_word(&mut rng, &g).gamma_part(), random_word(&mut rng, &g).gamma_part());
        let moved = action.act(&x, &p).unwrap();
        prop_assert_eq!(moved.measure(), p.measure());
        prop_assert_eq!(action.act(&g.mul(&x, &y), &p).unwrap(), action.act(&x, &action.act(&y, &p).unwrap()).unwrap());
        prop_assert_eq!(action.act(&g.identity(), &p).unwrap(), p);
    }

    #[test]
    fn refinement_postcondition(seed in any::<u64>()) {
        let g = Arc::new(GroupSpec::with_full_aut(1, 1).unwrap());
        let action = ActionSpec::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_projection(&mut rng, &g);
        let label: Vec<usize> = (0..1 << base.window().len()).map(|_| rng.gen_range(0..3)).collect();
        let gs: Vec<Projection> = (0..2)
            .map(|c| Projection::from_bools(base.window().to_vec(), label.iter().map(|&l| l == c).collect()))
            .filter(|p| !p.is_zero())
            .collect();
        let phi: Vec<GroupElement> = (0..rng.gen_range(1..3)).map(|_| random_word(&mut rng, &g).gamma_part()).collect();
        let k = refine_partition(&gs, &phi, &action).unwrap();
        prop_assert_eq!(k.iter().map(Projection::measure).sum::<Dyadic>(), Dyadic::from_int(1));
        for (i, p) in k.iter().enumerate() {
            prop_assert!(!p.is_zero());
            for r in &k[i + 1..] {
                prop_assert_eq!(proj_relate(p, r).unwrap(), Relation::Orthogonal);
            }
            for f in &phi {
                let moved = action.act(f, p).unwrap();
                for q in &gs {
                    prop_assert_ne!(proj_relate(&moved, q).unwrap(), Relation::Neither);
                }
            }
        }
    }

    #[test]
    fn parity_brackets_shrink(k in 1usize..60) {
        let a = gradient_series(&lamplighter_parity_series(k)).unwrap();
        let b = gradient_series(&lamplighter_parity_series(k + 1)).unwrap();
        prop_assert!(a.contains_bracket(&b));
        prop_assert!(b.width() < a.width());
    }
}

#[test]
fn folner_estimate_near_census_bracket() {
    let t = kergrad::presets::lamplighter();
    let d = Arc::new(TDecomposition::from_matrix(&t).unwrap());
    let census = component_census(&d, 8).unwrap();
    let schedule = parse_schedule(t.group(), "10:8").unwrap();
    for p in [3, 5, 7] {
        let field = FieldSpec::prime(p).unwrap();
        let bracket = gradient_series(&series_from_census(&census, field).unwrap()).unwrap();
        let est = gradient_estimate(&t, &schedule, field).unwrap().last().unwrap().estimate_f64();
        let (lo, hi) = (bracket.lower.to_f64().unwrap(), bracket.upper.to_f64().unwrap());
        assert!(est > lo - 0.05 && est < hi + 0.05, "GF({p}): {est} vs [{lo}, {hi}]");
    }
}
