//! Verification suites behind `kergrad verify`.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use kergrad::closed_forms::{
    eval_sigma, eval_thm12_partial, eval_thm13, eval_thm58_series, thm58_total_measure, G3Measure,
};
use kergrad::cylinder::{hat_in_field, proj_relate, refine_partition, ActionSpec, Coord, Projection, Relation};
use kergrad::families::{build_family, family_kernel_dim};
use kergrad::folner::parse_schedule;
use kergrad::group::{compression_matrix, halving_construct, regular_rep_expand};
use kergrad::linalg::{kernel_dim, rank, rank_with, Strategy};
use kergrad::tgraph::{
    build_m, component_census, fitting_box, gradient_series, intertwiner_check, lamplighter_parity_series,
    series_from_census, simply_connected, RGraph, TDecomposition,
};
use kergrad::{
    gradient_estimate, Dyadic, ExactMatrix, FieldSpec, FolnerBox, GroupElement, GroupRingElement, GroupRingMatrix,
    GroupSpec,
};

use crate::commands::family_params;
use crate::output::{dyadic, ratio, Format, Report};
use crate::CliError;

pub const SUITES: [&str; 7] = ["linalg", "lemmas31", "pontryagin", "tgraph", "families", "closedforms", "crosscheck"];

struct Checks {
    suite: &'static str,
    rows: Vec<(String, bool, String)>,
}

impl Checks {
    fn new(suite: &'static str) -> Self {
        Checks { suite, rows: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.rows.push((name.into(), ok, detail.into()));
    }
}

type Suite = fn(&mut Checks) -> Result<(), kergrad::Error>;

fn gf(p: u64) -> FieldSpec {
    FieldSpec::prime(p).expect("odd prime")
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn linalg(c: &mut Checks) -> Result<(), kergrad::Error> {
    for (rows, p, expected) in [
        (vec![vec![1, 2], vec![2, 4]], 0, 1),
        (vec![vec![1, 1], vec![1, 4]], 0, 2),
        (vec![vec![1, 1], vec![1, 4]], 3, 1),
        (vec![vec![2, 1, 0], vec![0, 2, 1], vec![1, 0, 2]], 0, 3),
        (vec![vec![2, 1, 0], vec![0, 2, 1], vec![1, 0, 2]], 3, 2),
    ] {
        let m = ExactMatrix::from_ints(FieldSpec::new(p)?, &rows)?;
        let r = rank(&m);
        c.check(format!("rank {rows:?} over char {p}"), r == expected, format!("rank {r}, expected {expected}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut agree = 0;
    let mut drops = 0;
    let total = 60;
    for i in 0..total {
        let f = [FieldSpec::rationals(), gf(3), gf(5)][i % 3];
        let (r, k) = (rng.gen_range(1..12), rng.gen_range(1..12));
        let rows: Vec<Vec<i64>> =
            (0..r).map(|_| (0..k).map(|_| if rng.gen_bool(0.4) { rng.gen_range(-3..=3) } else { 0 }).collect()).collect();
        let m = ExactMatrix::from_ints(f, &rows)?;
        let ranks = [rank_with(&m, Strategy::Auto), rank_with(&m, Strategy::Sparse), rank_with(&m, Strategy::Dense)];
        agree += (ranks[0] == ranks[1] && ranks[1] == ranks[2]) as usize;
        let over_q = rank(&ExactMatrix::from_ints(FieldSpec::rationals(), &rows)?);
        drops += (ranks[0] <= over_q) as usize;
    }
    c.check("elimination strategies agree", agree == total, format!("{agree}/{total} random matrices"));
    c.check("rank only drops under reduction", drops == total, format!("{drops}/{total} random matrices"));
    Ok(())
}

fn random_element(rng: &mut ChaCha8Rng, g: &Arc<GroupSpec>) -> GroupRingElement {
    let coeffs = [Dyadic::from_int(1), Dyadic::from_int(-1), Dyadic::from_int(2), Dyadic::half()];
    let mut x = GroupRingElement::zero(g);
    for _ in 0..rng.gen_range(1..=4) {
        let lamps: BTreeSet<i64> = (-1..=1).filter(|_| rng.gen_bool(0.4)).collect();
        let fin = if g.finite_bits() > 0 { rng.gen_range(0..1u64 << g.finite_bits()) } else { 0 };
        let e = GroupElement::from_parts(vec![rng.gen_range(-1..=1)], 0, vec![lamps], fin);
        x.add_term(e, coeffs[rng.gen_range(0..coeffs.len())].clone());
    }
    x
}

fn random_matrix(rng: &mut ChaCha8Rng, g: &Arc<GroupSpec>, rows: usize, cols: usize) -> Result<GroupRingMatrix, kergrad::Error> {
    let rows = (0..rows).map(|_| (0..cols).map(|_| random_element(rng, g)).collect()).collect();
    GroupRingMatrix::from_rows(g, rows)
}

fn lemmas31(c: &mut Checks) -> Result<(), kergrad::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let base = Arc::new(GroupSpec::lamplighter());
    let big = Arc::new(base.with_extra_bits(1)?);
    for op in 0..10 {
        let f = [FieldSpec::rationals(), gf(3), gf(5)][op % 3];
        let n = rng.gen_range(1..=2);
        let t = random_matrix(&mut rng, &big, n, n)?;
        let l = regular_rep_expand(&t, &base, &[0, 1])?;
        let h = random_matrix(&mut rng, &base, n, n)?;
        let id: Vec<Vec<Dyadic>> = (0..n).map(|r| (0..n).map(|c| Dyadic::from_int((r == c) as i64)).collect()).collect();
        let s = halving_construct(&h, &id)?;
        for (bn, bm) in [(1, 1), (2, 2), (3, 2)] {
            let a = kernel_dim(&compression_matrix(&t, &FolnerBox::centered(&big, bn, bm)?, f)?);
            let b = kernel_dim(&compression_matrix(&l, &FolnerBox::centered(&base, bn, bm)?, f)?);
            c.check(format!("regular rep, operator {op}, box {bn}:{bm}, char {}", f.characteristic()), a == b, format!("{a} = {b}"));
            let a = kernel_dim(&compression_matrix(&s, &FolnerBox::centered(s.group(), bn, bm)?, f)?);
            let b = kernel_dim(&compression_matrix(&h, &FolnerBox::centered(&base, bn, bm)?, f)?);
            c.check(format!("halving, operator {op}, box {bn}:{bm}, char {}", f.characteristic()), a == b, format!("{a} = {b}"));
        }
    }
    Ok(())
}

fn random_projection(rng: &mut ChaCha8Rng, max_w: usize) -> Projection {
    loop {
        let mut sites: Vec<i64> = (-3..=3).collect();
        let w = rng.gen_range(1..=max_w);
        let mut window: Vec<Coord> =
            (0..w).map(|_| Coord::Lamp { track: 0, pos: sites.swap_remove(rng.gen_range(0..sites.len())) }).collect();
        window.sort();
        let p = Projection::from_bools(window, (0..1 << w).map(|_| rng.gen_bool(0.5)).collect());
        if !p.is_zero() {
            return p;
        }
    }
}

fn pontryagin(c: &mut Checks) -> Result<(), kergrad::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = Arc::new(GroupSpec::lamplighter());
    for f in [FieldSpec::rationals(), gf(3), gf(5), gf(7)] {
        let (mut support_ok, mut rank_ok) = (0, 0);
        let total = 200;
        for _ in 0..total {
            let p = random_projection(&mut rng, 4);
            let window = p.window().to_vec();
            let w = window.len();
            let rho = p.to_element(&g)?.reduce(f);
            let (hw, hv) = hat_in_field(&rho, f)?;
            let same = (0..1usize << w).all(|x| {
                let idx = hw.iter().enumerate().fold(0usize, |acc, (i, cd)| {
                    acc | (x >> window.binary_search(cd).expect("inside window") & 1) << i
                });
                hv[idx].is_zero() != p.contains(x)
            });
            support_ok += same as usize;
            let mut trip = Vec::new();
            for (a, coeff) in rho.terms() {
                let mask = a.lamps()[0].iter().fold(0usize, |acc, s| {
                    acc | 1 << window.binary_search(&Coord::Lamp { track: 0, pos: *s }).expect("inside window")
                });
                trip.extend((0..1usize << w).map(|x| (x ^ mask, x, coeff.clone())));
            }
            let m = ExactMatrix::from_triplets(1 << w, 1 << w, f, trip)?;
            rank_ok += (Dyadic::from_int(rank(&m) as i64) == &Dyadic::from_int(1i64 << w) * &p.measure()) as usize;
        }
        let ch = f.characteristic();
        c.check(format!("dual support survives reduction, char {ch}"), support_ok == total, format!("{support_ok}/{total}"));
        c.check(format!("rank of multiplication is |F|·measure, char {ch}"), rank_ok == total, format!("{rank_ok}/{total}"));
    }
    let action = ActionSpec::new(&g);
    let mut ok = 0;
    let total = 100;
    for _ in 0..total {
        let base = random_projection(&mut rng, 3);
        let label: Vec<usize> = (0..1 << base.window().len()).map(|_| rng.gen_range(0..3)).collect();
        let gs: Vec<Projection> = (0..2)
            .map(|k| Projection::from_bools(base.window().to_vec(), label.iter().map(|&l| l == k).collect()))
            .filter(|p| !p.is_zero())
            .collect();
        let phi: Vec<GroupElement> = (0..2).map(|_| GroupElement::shift(&g, 0, rng.gen_range(-2..=2))).collect();
        let k = refine_partition(&gs, &phi, &action)?;
        let mut good = k.iter().map(Projection::measure).sum::<Dyadic>() == Dyadic::from_int(1);
        for (i, p) in k.iter().enumerate() {
            good &= k[i + 1..].iter().all(|r| proj_relate(p, r) == Ok(Relation::Orthogonal));
            for f in &phi {
                let moved = action.act(f, p)?;
                good &= gs.iter().all(|qq| proj_relate(&moved, qq).map_or(false, |r| r != Relation::Neither));
            }
        }
        ok += good as usize;
    }
    c.check("refinement is a partition subordinate under every shift", ok == total, format!("{ok}/{total}"));
    Ok(())
}

fn tgraph(c: &mut Checks) -> Result<(), kergrad::Error> {
    let d = Arc::new(TDecomposition::from_matrix(&kergrad::presets::lamplighter())?);
    let census = component_census(&d, 8)?;
    for k in 1..=6usize {
        let m = census.types.iter().find(|t| t.vertices == k).map(|t| t.measure.clone());
        let expected = Dyadic::new(k as i64, (k + 1) as u32);
        c.check(
            format!("path of {k} vertices has measure {expected}"),
            m.as_ref() == Some(&expected),
            m.map_or("missing".into(), |m| dyadic(&m)),
        );
    }
    let total = &census.interior_measure + &census.boundary_measure;
    c.check(
        "interior + boundary = 1",
        total == Dyadic::from_int(1),
        format!("{} + {}", dyadic(&census.interior_measure), dyadic(&census.boundary_measure)),
    );
    for comp in &census.components {
        let n = comp.size();
        let conn = simply_connected(&RGraph::of(&comp.tgraph, &comp.report), d.group());
        c.check(format!("component {n}: valid and simply connected"), comp.report.is_valid() && conn.simply_connected(), "");
        let b = fitting_box(&comp.tgraph)?;
        let (_, over_q) = build_m(&comp.report, n, FieldSpec::rationals())?;
        for p in [3, 5] {
            let r = intertwiner_check(&comp.tgraph, gf(p), &b)?;
            c.check(format!("component {n}: invariant subspace over GF({p})"), r.holds(), format!("box {}, dim {}", b.label(), r.dimension));
            let (_, over_p) = build_m(&comp.report, n, gf(p))?;
            c.check(format!("component {n}: GF({p}) matrix is the reduction"), over_q.reduce_to(gf(p))? == over_p, "");
        }
    }
    Ok(())
}

fn families(c: &mut Checks) -> Result<(), kergrad::Error> {
    for p in [0, 3, 5, 7, 11, 13] {
        let f = FieldSpec::new(p)?;
        for fam in family_params(10, 33) {
            let formula = family_kernel_dim(fam, f);
            let elim = kernel_dim(&build_family(fam, f)?);
            c.check(format!("{fam} char {p}"), formula == elim, format!("formula {formula}, elimination {elim}"));
        }
    }
    Ok(())
}

fn closedforms(c: &mut Checks) -> Result<(), kergrad::Error> {
    let v3 = eval_thm13(3, false)?;
    c.check("p = 3 value is 47/64 + 1/384 + 1/224", v3 == q(47, 64) + q(1, 384) + q(1, 224), ratio(&v3));
    let eps = BigRational::new(BigInt::from(1), BigInt::from(1) << 50);
    for p in [3, 5, 7, 11, 101] {
        let b = eval_thm58_series(p, 60, 60)?;
        let v = eval_thm13(p, false)?;
        c.check(
            format!("series bracket contains closed form, p = {p}"),
            b.contains(&v) && b.width() < eps,
            format!("{} in [{}, {}]", ratio(&v), ratio(&b.lower), ratio(&b.upper)),
        );
    }
    let one = Dyadic::from_int(1);
    let corrected = thm58_total_measure(60, 60, G3Measure::Corrected);
    c.check("corrected measures nearly exhaust", &one - &corrected < Dyadic::pow2_inv(40) && corrected <= one, dyadic(&corrected));
    let verbatim = thm58_total_measure(60, 60, G3Measure::Verbatim);
    c.check("verbatim measures exceed 1", verbatim > one, format!("{:.6}", verbatim.to_f64()));
    let mut nested = true;
    let mut prev = eval_thm12_partial(0);
    for k in 1..=6 {
        let b = eval_thm12_partial(k);
        nested &= prev.contains_bracket(&b);
        prev = b;
    }
    c.check("irrational value brackets are nested", nested, format!("[{}, {}]", ratio(&prev.lower), ratio(&prev.upper)));
    let values: HashSet<Dyadic> =
        (0u32..1024).map(|m| eval_sigma(&(0..10).filter(|i| m >> i & 1 == 1).collect())).collect();
    c.check("sigma injective on subsets of 0..9", values.len() == 1024, format!("{} distinct", values.len()));
    c.check("sigma of the empty set", eval_sigma(&BTreeSet::new()) == Dyadic::pow2_inv(6), "1/64");
    Ok(())
}

fn crosscheck(c: &mut Checks) -> Result<(), kergrad::Error> {
    let t = kergrad::presets::lamplighter();
    let parity = gradient_series(&lamplighter_parity_series(40))?;
    c.check("parity series contains 1/3", parity.contains(&q(1, 3)), format!("[{}, {}]", ratio(&parity.lower), ratio(&parity.upper)));
    let d = Arc::new(TDecomposition::from_matrix(&t)?);
    let census = component_census(&d, 8)?;
    let schedule = parse_schedule(t.group(), "2:2,4:4,6:6,8:8,10:8")?;
    for p in [3, 5] {
        let f = gf(p);
        let b = gradient_series(&series_from_census(&census, f)?)?;
        let row = gradient_estimate(&t, &schedule, f)?.rows.pop().expect("nonempty schedule");
        let (lo, hi) = (b.lower.to_f64().unwrap_or(f64::NAN), b.upper.to_f64().unwrap_or(f64::NAN));
        let e = row.estimate_f64();
        c.check(
            format!("estimate at {} within bracket ± 0.05, GF({p})", row.label),
            e > lo - 0.05 && e < hi + 0.05 && !b.width().is_zero(),
            format!("{} vs [{}, {}]", ratio(&row.estimate), ratio(&b.lower), ratio(&b.upper)),
        );
    }
    Ok(())
}

fn suite_fn(name: &str) -> Option<Suite> {
    Some(match name {
        "linalg" => linalg,
        "lemmas31" => lemmas31,
        "pontryagin" => pontryagin,
        "tgraph" => tgraph,
        "families" => families,
        "closedforms" => closedforms,
        "crosscheck" => crosscheck,
        _ => return None,
    })
}

pub fn run(suite: &str) -> crate::commands::Outcome {
    let names: Vec<&'static str> = if suite == "all" {
        SUITES.to_vec()
    } else {
        match SUITES.iter().find(|s| **s == suite) {
            Some(s) => vec![*s],
            None => return Err(CliError::Usage(format!("unknown suite {suite:?}; expected one of {SUITES:?} or all"))),
        }
    };
    let mut report = Report::new("verify", vec!["suite", "check", "status", "detail"]);
    let mut data = Vec::new();
    for name in names {
        let mut checks = Checks::new(name);
        if let Err(e) = suite_fn(name).expect("listed suite")(&mut checks) {
            checks.check("suite ran to completion", false, e.to_string());
        }
        for (check, ok, detail) in checks.rows {
            report.passed &= ok;
            report.rows.push(vec![checks.suite.into(), check.clone(), if ok { "pass" } else { "fail" }.into(), detail.clone()]);
            data.push(json!({"suite": checks.suite, "check": check, "pass": ok, "detail": detail}));
        }
    }
    report.data = Value::Array(data);
    Ok((report, json!({"suite": suite}), Format::Csv))
}
