//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use ckdist::cli;
use ckdist::compacta::{CompactInterval, Derivation, SigmaValue};
use ckdist::delta::{ell1_distance, ell1_embed, enumerate_delta, sym_diff_distance, DeltaPoint};
use ckdist::engine::{
    distortion_of_sample, packing_bound, refute, verify_witness, CandidateMap, EngineOutcome,
    InconclusiveReason, Violation,
};
use ckdist::json::{load_map, MapDoc};
use ckdist::ordinal::Ordinal;
use ckdist::rational::{int, ratio, Rational};
use ckdist::restriction::{chain_vectors, epsilon_prime_for, frechet_sample, locate_beta0};
use ckdist::step::StepFunction;
use num::{BigUint, One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

// ---------------------------------------------------------------------------
// Criterion 1 oracle: ordinals below ω^4 as coefficient arrays [c3, c2, c1, c0]
// ordered lexicographically, and isolated points found by scanning.

type Cnf = [u64; 4];

fn universe(bound: u64, top: &Cnf) -> Vec<Cnf> {
    let mut out = Vec::new();
    for a in 0..=bound {
        for b in 0..=bound {
            for c in 0..=bound {
                for d in 0..=bound {
                    let x = [a, b, c, d];
                    if &x <= top {
                        out.push(x);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn within(x: &Cnf, bound: u64) -> bool {
    x.iter().all(|c| *c <= bound)
}

/// Points of `set` that are not isolated in `set`, restricted to the
/// coarser grid `bound`: γ survives when every grid point α < γ leaves some
/// member of `set` strictly between α and γ. Checking the largest grid point
/// below γ suffices.
fn derive_scan(set: &[Cnf], bound: u64) -> Vec<Cnf> {
    let grid: Vec<&Cnf> = set.iter().filter(|x| within(x, bound)).collect();
    let mut out = Vec::new();
    for g in &grid {
        // Largest ordinal with coefficients ≤ bound strictly below γ.
        let pred = grid_pred(g, bound);
        let below = set.partition_point(|s| s < *g);
        let witness = below > 0 && pred.as_ref().is_none_or(|p| &set[below - 1] > p);
        if witness {
            out.push(**g);
        }
    }
    out
}

/// Largest array ≤ bound coordinatewise that is lexicographically below x.
fn grid_pred(x: &Cnf, bound: u64) -> Option<Cnf> {
    for pos in (0..4).rev() {
        if x[pos] > 0 {
            let mut p = *x;
            p[pos] = (x[pos] - 1).min(bound);
            for q in p.iter_mut().skip(pos + 1) {
                *q = bound;
            }
            return Some(p);
        }
    }
    None
}

fn to_ordinal(x: &Cnf) -> Ordinal {
    let terms: Vec<(u32, u64)> = (0..4)
        .filter(|i| x[*i] > 0)
        .map(|i| (3 - i as u32, x[i]))
        .collect();
    Ordinal::from_terms(&terms).unwrap()
}

/// Order type of the rank-≥ i ordinals in (0, ρ] as an array: they are ω^i·ξ
/// with 1 ≤ ξ ≤ ρ/ω^i, so the type is [0, −1 + ρ/ω^i].
fn derived_endpoint(rho: &Cnf, i: usize) -> Cnf {
    let mut shifted = [0; 4];
    for e in i..4 {
        shifted[3 - (e - i)] = rho[3 - e];
    }
    if shifted[..3].iter().all(|c| *c == 0) {
        shifted[3] -= 1;
    }
    shifted
}

fn criterion_1() {
    let bound = 8u64;
    let depth = 4u64;
    for a in 0..=3usize {
        for n in 1..=6u64 {
            for r in 0..=6u64 {
                let mut top = [0; 4];
                top[3 - a] = n;
                top[3] += r;
                let beta = to_ordinal(&top);
                let k = CompactInterval::new(beta.clone());
                let mut level = universe(bound + depth, &top);
                for i in 1..=depth {
                    level = derive_scan(&level, bound + depth - i);
                    let on_grid: Vec<Ordinal> = level
                        .iter()
                        .filter(|x| within(x, bound))
                        .map(to_ordinal)
                        .collect();
                    let lib = k.iterated_derivative(Derivation::Finite(i as u32));
                    match level.last() {
                        None => assert!(lib.is_none(), "K^({i}) of [0,{beta}] should be empty"),
                        Some(rho) => {
                            let lib =
                                lib.unwrap_or_else(|| panic!("K^({i}) of [0,{beta}] is nonempty"));
                            assert_eq!(
                                lib.endpoint(),
                                &to_ordinal(&derived_endpoint(rho, i as usize)),
                                "[0,{beta}]^({i})"
                            );
                            let expected: Vec<Ordinal> = universe(bound, &top)
                                .iter()
                                .map(to_ordinal)
                                .filter(|g| k.point_in_derivative(g, i as u32).unwrap())
                                .collect();
                            assert_eq!(on_grid, expected, "points of [0,{beta}]^({i})");
                        }
                    }
                }
            }
        }
    }
}

fn criterion_2() {
    for a in 0..=6u32 {
        for n in 1..=10u64 {
            for r in 0..=10u64 {
                let mut terms = vec![(a, n)];
                if r > 0 {
                    if a == 0 {
                        terms[0].1 += r;
                    } else {
                        terms.push((0, r));
                    }
                }
                let k = CompactInterval::new(Ordinal::from_terms(&terms).unwrap());
                assert_eq!(k.sigma(), SigmaValue::Finite(a));
                assert_eq!(k.cb_index(), Ordinal::finite(u64::from(a) + 1));
                assert!(k.iterated_derivative(Derivation::Finite(a)).is_some());
                assert!(k.iterated_derivative(Derivation::Finite(a + 1)).is_none());
            }
        }
    }
    let top = CompactInterval::new(Ordinal::top());
    assert_eq!(top.sigma(), SigmaValue::Omega);
    assert_eq!(top.cb_index(), Ordinal::omega().succ());
}

fn random_point(rng: &mut ChaCha8Rng, k: usize, universe: u64) -> DeltaPoint {
    let size = rng.random_range(0..=k);
    let mut v: Vec<u64> = Vec::new();
    while v.len() < size {
        let n = rng.random_range(0..universe);
        if !v.contains(&n) {
            v.push(n);
        }
    }
    DeltaPoint::new(v).unwrap()
}

fn criterion_3() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let k = rng.random_range(0..=6);
        let (a, b, c) = (
            random_point(&mut rng, k, 30),
            random_point(&mut rng, k, 30),
            random_point(&mut rng, k, 30),
        );
        let (ab, bc, ac) = (
            sym_diff_distance(&a, &b),
            sym_diff_distance(&b, &c),
            sym_diff_distance(&a, &c),
        );
        assert_eq!(sym_diff_distance(&a, &a), 0);
        assert_eq!(ab, sym_diff_distance(&b, &a));
        assert_eq!(ab == 0, a == b);
        assert!(ac <= ab + bc);
    }
    let p = |v: &[u64]| DeltaPoint::new(v.to_vec()).unwrap();
    assert_eq!(sym_diff_distance(&p(&[1, 4, 6, 100]), &p(&[4, 6, 33])), 3);
    for k in 0..=4usize {
        let pts = enumerate_delta(k, 12);
        for (i, s) in pts.iter().enumerate() {
            for t in &pts[i + 1..] {
                let d = sym_diff_distance(s, t);
                assert!((1..=2 * k as u64).contains(&d), "d({s},{t}) = {d}");
            }
        }
    }
}

fn criterion_4() {
    let pts = enumerate_delta(3, 8);
    let vecs: Vec<_> = pts.iter().map(ell1_embed).collect();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            assert_eq!(
                ell1_distance(&vecs[i], &vecs[j]),
                int(sym_diff_distance(&pts[i], &pts[j]) as i64)
            );
        }
    }
}

fn random_step(rng: &mut ChaCha8Rng, compact: &CompactInterval) -> StepFunction {
    let mut cuts: Vec<u64> = (0..12).filter(|_| rng.random_bool(0.25)).collect();
    cuts.dedup();
    let values = (0..=cuts.len())
        .map(|_| ratio(rng.random_range(-6..=6), 2))
        .collect();
    StepFunction::new(
        compact.clone(),
        cuts.into_iter().map(Ordinal::finite).collect(),
        values,
    )
    .unwrap()
}

fn random_map(rng: &mut ChaCha8Rng, d: Rational) -> CandidateMap {
    let kw = CompactInterval::new(Ordinal::omega());
    match rng.random_range(0..4) {
        0 | 1 => {
            let n = rng.random_range(3..=8);
            let table: BTreeMap<_, _> = enumerate_delta(2, n)
                .into_iter()
                .map(|p| (p, random_step(rng, &kw)))
                .collect();
            CandidateMap::from_table(2, kw, d, table).unwrap()
        }
        2 => {
            let pts = enumerate_delta(2, rng.random_range(3..=5));
            let exact =
                CandidateMap::frechet(2, kw.clone(), d.clone(), pts.clone(), false).unwrap();
            let mut table = BTreeMap::new();
            for p in pts {
                let mut f = exact.require_image(&p).unwrap();
                if rng.random_bool(0.3) {
                    f = f.add(&random_step(rng, &kw)).unwrap();
                }
                table.insert(p, f);
            }
            CandidateMap::from_table(2, kw, d, table).unwrap()
        }
        _ => CandidateMap::basis(
            2,
            kw,
            d,
            ratio(rng.random_range(1..=10), rng.random_range(1..=4)),
        )
        .unwrap(),
    }
}

fn criterion_5() {
    let p = |v: &[u64]| DeltaPoint::new(v.to_vec()).unwrap();

    let basis = load_map(&fixture("basis-map.json")).unwrap();
    let w = refute(&basis)
        .unwrap()
        .witness()
        .cloned()
        .expect("basis map: witness");
    assert_eq!((&w.sigma, &w.tau), (&p(&[0, 1]), &p(&[2, 3])));
    assert_eq!(w.domain_distance, 4);
    assert_eq!(w.measured, int(1));
    assert_eq!(w.violation, Violation::Lower);
    assert!(verify_witness(&basis, &w).unwrap());

    let scaled = load_map(&fixture("scaled-basis-map.json")).unwrap();
    let w = refute(&scaled)
        .unwrap()
        .witness()
        .cloned()
        .expect("scaled basis map: witness");
    assert_eq!((&w.sigma, &w.tau), (&DeltaPoint::empty(), &p(&[0])));
    assert_eq!(w.measured, int(4));
    assert_eq!(w.violation, Violation::Upper);
    assert!(verify_witness(&scaled, &w).unwrap());

    let frechet_text = std::fs::read_to_string(fixture("frechet-window-map.json")).unwrap();
    let kw = CompactInterval::new(Ordinal::omega());
    let pts = enumerate_delta(2, 4);
    let exact = CandidateMap::frechet(2, kw.clone(), ratio(19, 10), pts.clone(), false).unwrap();
    let regenerated = MapDoc::from_images(
        2,
        &kw,
        &ratio(19, 10),
        pts.iter()
            .map(|q| (q.clone(), exact.require_image(q).unwrap())),
    );
    let stored: serde_json::Value = serde_json::from_str(&frechet_text).unwrap();
    assert_eq!(
        stored,
        serde_json::to_value(&regenerated).unwrap(),
        "Fréchet fixture differs from the formula"
    );
    let frechet = load_map(&fixture("frechet-window-map.json")).unwrap();
    match refute(&frechet).unwrap() {
        EngineOutcome::Inconclusive { reason, .. } => {
            assert_eq!(reason, InconclusiveReason::WindowExhausted)
        }
        other => panic!("Fréchet window refuted: {other:?}"),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ds = [ratio(6, 5), ratio(3, 2), ratio(19, 10)];
    let (mut witnesses, mut inconclusive) = (0, 0);
    for trial in 0..100 {
        let d = ds[trial % 3].clone();
        let map = random_map(&mut rng, d);
        match refute(&map).unwrap_or_else(|e| panic!("random map {trial}: {e}")) {
            EngineOutcome::Witness(w) => {
                assert!(
                    verify_witness(&map, &w).unwrap(),
                    "unverifiable witness on map {trial}"
                );
                witnesses += 1;
            }
            EngineOutcome::Inconclusive { .. } => inconclusive += 1,
        }
    }
    assert_eq!(witnesses + inconclusive, 100);
}

fn criterion_6() {
    let kw = CompactInterval::new(Ordinal::omega());
    for n in 1..=5u64 {
        let pts = enumerate_delta(2, n);
        for d in [ratio(11, 10), ratio(3, 2), ratio(19, 10)] {
            let map = CandidateMap::frechet(2, kw.clone(), d.clone(), pts.clone(), false).unwrap();
            if pts.len() >= 2 {
                assert!(distortion_of_sample(&pts, &map).unwrap().distortion <= d);
            }
            assert!(
                refute(&map).unwrap().witness().is_none(),
                "Fréchet window n={n} refuted"
            );
        }
    }
    let kw2 = CompactInterval::new(Ordinal::monomial(2, 1));
    for n in 1..=5u64 {
        let map = CandidateMap::frechet(3, kw2.clone(), ratio(7, 5), enumerate_delta(3, n), false)
            .unwrap();
        assert!(
            refute(&map).unwrap().witness().is_none(),
            "k=3 Fréchet window n={n} refuted"
        );
    }
}

/// 4-separated subsets of `values` (sorted), each extended onto `base`.
fn separated_subsets(values: &[i64], from: usize, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    out.push(current.clone());
    for i in from..values.len() {
        if current.last().is_none_or(|l| values[i] - l >= 4) {
            current.push(values[i]);
            separated_subsets(values, i + 1, current, out);
            current.pop();
        }
    }
}

/// Largest family in the grid {−half..half}^dim (spacing η/4, so D = half·η/4)
/// with pairwise sup-norm gap ≥ 4 grid steps. Exact column sweep: points
/// in columns less than 4 apart must differ by ≥ 4 in y, so the state is the
/// y-values chosen in the last three columns.
fn exhaustive_packing(half: i64, dim: usize) -> usize {
    assert!(dim == 1 || dim == 2);
    let ys: Vec<i64> = (-half..=half).collect();
    let columns = if dim == 1 { 1 } else { ys.len() };
    // state: (y, columns since chosen) with age 1..=3
    let mut states: HashMap<Vec<(i64, u8)>, usize> = HashMap::from([(Vec::new(), 0)]);
    for _ in 0..columns {
        let mut next: HashMap<Vec<(i64, u8)>, usize> = HashMap::new();
        for (state, count) in &states {
            let free: Vec<i64> = ys
                .iter()
                .copied()
                .filter(|y| state.iter().all(|(z, _)| (y - z).abs() >= 4))
                .collect();
            let mut subsets = Vec::new();
            separated_subsets(&free, 0, &mut Vec::new(), &mut subsets);
            for chosen in subsets {
                let mut new_state: Vec<(i64, u8)> = state
                    .iter()
                    .filter(|(_, age)| *age < 3)
                    .map(|(y, age)| (*y, age + 1))
                    .collect();
                new_state.extend(chosen.iter().map(|y| (*y, 1)));
                new_state.sort();
                let total = count + chosen.len();
                let slot = next.entry(new_state).or_insert(0);
                *slot = (*slot).max(total);
            }
        }
        states = next;
    }
    states.values().copied().max().unwrap_or(0)
}

/// Plain pairwise check of a concrete family, used to cross-check the sweep.
fn is_separated(points: &[Vec<i64>]) -> bool {
    points.iter().enumerate().all(|(i, p)| {
        points[i + 1..].iter().all(|q| {
            p.iter()
                .zip(q)
                .map(|(a, b)| (a - b).abs())
                .max()
                .unwrap_or(0)
                >= 4
        })
    })
}

fn criterion_7() {
    assert_eq!(
        packing_bound(&int(1), &int(1), 1).unwrap(),
        BigUint::from(3u32)
    );
    let family = [int(-1), int(0), int(1)];
    for (i, a) in family.iter().enumerate() {
        assert!(a.clone() >= int(-1) && a.clone() <= int(1));
        for b in &family[i + 1..] {
            assert!(num::abs(a - b) >= int(1));
        }
    }
    // Corner lattice at spacing η reaches the bound in 2-D for D = 1.
    let lattice: Vec<Vec<i64>> = [-4, 0, 4]
        .iter()
        .flat_map(|a| [-4, 0, 4].map(|b| vec![*a, b]))
        .collect();
    assert!(is_separated(&lattice));
    assert_eq!(exhaustive_packing(4, 2), lattice.len());
    // D = half/4 with η = 1.
    for (half, dim) in [
        (4, 1),
        (5, 1),
        (6, 1),
        (7, 1),
        (9, 1),
        (4, 2),
        (5, 2),
        (6, 2),
    ] {
        let bound = packing_bound(&ratio(half, 4), &int(1), dim)
            .unwrap()
            .to_usize()
            .unwrap();
        let found = exhaustive_packing(half, dim);
        assert!(
            found <= bound,
            "D={half}/4, d={dim}: family of {found} > bound {bound}"
        );
        if dim == 1 {
            assert_eq!(found, bound, "1-D bound is tight on the grid");
        }
    }
}

fn criterion_8() {
    use ckdist::delta::SparseVector;
    let k = CompactInterval::new(Ordinal::monomial(2, 1));
    let x = SparseVector::from_entries([(0, int(1)), (1, ratio(1, 2))]);
    let y = SparseVector::from_entries([(2, ratio(-3, 2))]);
    let delta = int(3);
    let window = [10, 11, 12];
    for eps in [int(0), ratio(1, 10)] {
        let sample = frechet_sample(
            k.clone(),
            eps.clone(),
            &chain_vectors(&x, &y, &delta, &window),
        )
        .unwrap();
        let r = locate_beta0(&sample, &x, &y, &delta, &window).unwrap();
        assert!(
            k.point_in_derivative(&r.beta0, 1).unwrap(),
            "β₀ = {} is not a limit",
            r.beta0
        );
        let gx = sample.image(&x).unwrap().eval(&r.beta0).unwrap();
        let gy = sample.image(&y).unwrap().eval(&r.beta0).unwrap();
        let one = Rational::one();
        let threshold = (&one - int(2) * &eps) * &delta / (&one + &eps);
        assert!(num::abs(gx - gy) >= threshold);
    }
    for i in 1..=100 {
        let eps = ratio(i, 10);
        let ep = epsilon_prime_for(&eps).unwrap();
        let one = Rational::one();
        assert!(
            (&one - int(2) * &ep) / (&one + &ep) > &one / (&one + &eps),
            "ε = {eps}"
        );
    }
}

fn criterion_9() {
    let golden = std::fs::read_to_string(fixture("table-sigma4.txt")).unwrap();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(["ckdist", "table", "--max-sigma", "4"], &mut out, &mut err);
    assert_eq!(code, 0);
    let out = String::from_utf8(out).unwrap();
    assert_eq!(out, golden);
    for m in 1..=4i64 {
        let want = if m == 1 {
            "2".to_string()
        } else {
            format!("{}/{}", m + 1, m)
        };
        let row = out
            .lines()
            .find(|l| {
                l.starts_with(&format!(
                    "[0,ω{}]",
                    if m == 1 {
                        String::new()
                    } else {
                        format!("^{m}")
                    }
                ))
            })
            .unwrap();
        let cols: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(cols[1], m.to_string());
        assert_eq!(cols[2], want);
        assert_eq!(cols[3], "excluded");
    }
    for name in ["[0,ω^ω]", "[0,1]", "βℕ"] {
        let row = out.lines().find(|l| l.starts_with(name)).unwrap();
        assert!(row.ends_with(" 1            not excluded"), "{row}");
    }
}

fn main() {
    let criteria: [(&str, fn(), Duration); 9] = [
        (
            "CB closed form vs isolated-point scan",
            criterion_1,
            Duration::from_secs(10),
        ),
        (
            "σ formula and i_CB = σ+1",
            criterion_2,
            Duration::from_secs(1),
        ),
        (
            "symmetric-difference metric suite",
            criterion_3,
            Duration::from_secs(10),
        ),
        (
            "ℓ1 isometry on enumerate_delta(3,8)",
            criterion_4,
            Duration::from_secs(5),
        ),
        (
            "refutation soundness and engine examples",
            criterion_5,
            Duration::from_secs(60),
        ),
        (
            "no false positives on Fréchet windows",
            criterion_6,
            Duration::from_secs(10),
        ),
        (
            "packing bound tightness and exhaustive search",
            criterion_7,
            Duration::from_secs(30),
        ),
        (
            "restriction chain and ε′ choice",
            criterion_8,
            Duration::from_secs(5),
        ),
        (
            "lower-bound table golden match",
            criterion_9,
            Duration::from_secs(5),
        ),
    ];
    // Keep PASS/FAIL lines readable: panics are reported once, below.
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let status = match result {
            Ok(()) if elapsed <= *limit => "PASS".to_string(),
            Ok(()) => format!("FAIL (took {elapsed:.2?}, limit {limit:?})"),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                format!("FAIL: {msg}")
            }
        };
        if !status.starts_with("PASS") {
            failed += 1;
        }
        println!("criterion {}: {name} ... {status} [{elapsed:.2?}]", i + 1);
    }
    let _ = panic::take_hook();
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
