//! Randomized invariants across the library, each checked against code that
//! lives only in this file where an oracle is needed.

use floorlog::alpha::{floor_alpha_plus_log, floor_k_power, Rounding, Sign2};
use floorlog::kernel::rank_profile;
use floorlog::linalg::rank;
use floorlog::recur::{
    detect_period, guess_linear_recurrence, guess_polynomial_recurrence, series_to_rational, LINEAR_HOLDOUT,
};
use floorlog::series::{b_bruteforce, b_closed_form, coeff_table, nc_series_terms, univariate_specialize, Method};
use floorlog::seq::{grouped_by_exponent, tau, tau_length, FloorLogSeq, DEFAULT_BUDGET};
use floorlog::{AlphaSpec, ExactAlpha};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `r_num / r_den + log(p / q)` with small parameters.
fn exact_alpha() -> impl Strategy<Value = ExactAlpha> {
    (-7i64..=7, 1i64..=6, 1u32..=12, 1u32..=12, any::<bool>()).prop_map(|(u, v, p, q, with_log)| {
        let (p, q) = if with_log { (p, q) } else { (1, 1) };
        ExactAlpha::new(u, v, p, q).unwrap()
    })
}

fn spec(a: &ExactAlpha) -> AlphaSpec {
    AlphaSpec::Exact(a.clone())
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unit_steps(k in 2u64..=10, a in exact_alpha(), n in 0u64..1_000_000) {
        let s = spec(&a);
        let x = floor_alpha_plus_log(k, &s, n).unwrap();
        let y = floor_alpha_plus_log(k, &s, n + 1).unwrap();
        prop_assert!(x <= y && y <= x + 1, "a({n}) = {x}, a({}) = {y}", n + 1);
        let table = FloorLogSeq::new(k, &a, n + 1).unwrap();
        prop_assert_eq!(table.get(n), x);
        prop_assert_eq!(table.get(n + 1), y);
    }

    #[test]
    fn ceil_is_negated_floor_of_negation(k in 2u64..=10, a in exact_alpha(), m in -5i64..=40) {
        let s = spec(&a);
        let ceil = floor_k_power(k, &s, m, Sign2::Plus, Rounding::Ceil).unwrap();
        let neg = floor_k_power(k, &s, m, Sign2::Minus, Rounding::Floor).unwrap();
        prop_assert_eq!(ceil, -neg);
    }

    #[test]
    fn power_bracket(k in 2u64..=10, a in exact_alpha(), m in 1i64..=40) {
        let s = spec(&a);
        let lo = floor_k_power(k, &s, m - 1, Sign2::Plus, Rounding::Floor).unwrap();
        let hi = floor_k_power(k, &s, m, Sign2::Plus, Rounding::Floor).unwrap();
        let kk = big(k);
        prop_assert!(&kk * &lo <= hi && hi < &kk * (&lo + 1u32), "m={m}: {lo} -> {hi}");
    }

    #[test]
    fn tau_round_trip(k in 2u64..=16, n in 0u64..=1_000_000) {
        let w = tau(k, n);
        prop_assert_eq!(w.value(), n.into());
        prop_assert_eq!(w.len() as u32, tau_length(k, n));
        // LSB first
        let mut x = n;
        for &d in w.digits() {
            prop_assert_eq!(u64::from(d), x % k);
            x /= k;
        }
        prop_assert_eq!(x, 0);
    }

    #[test]
    fn grouped_values_and_sums(k in 2u64..=5, a in exact_alpha()) {
        let s = spec(&a);
        let m_max = match k { 2 => 12, 3 => 8, _ => 5 };
        let f = a.floor(k);
        let groups = grouped_by_exponent(k, &s, m_max).unwrap();
        prop_assert_eq!(groups[0].values.clone(), vec![f]);
        for g in &groups[1..] {
            let m = i64::from(g.m);
            prop_assert!(g.values.iter().all(|&v| v == f + m - 1 || v == f + m));
            prop_assert!(g.values.windows(2).all(|w| w[0] <= w[1]));
            let sum: i64 = g.values.iter().sum();
            prop_assert_eq!(BigInt::from(sum), b_bruteforce(k, &s, g.m, DEFAULT_BUDGET).unwrap());
            prop_assert_eq!(BigInt::from(sum), b_closed_form(k, &s, g.m).unwrap());
        }
    }

    #[test]
    fn univariate_projection_matches_brute(k in 2u64..=4, a in exact_alpha()) {
        let s = spec(&a);
        let len = match k { 2 => 10, 3 => 6, _ => 5 };
        let proj = univariate_specialize(&nc_series_terms(k, &s, len, DEFAULT_BUDGET).unwrap());
        let brute = coeff_table(k, &s, len, Method::Brute, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(proj.b, brute.b);
    }
}

/// `floor(x)` for a rational.
fn rat_floor(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

/// Cases where `k^alpha` is rational, with that value: `alpha = j + log(p/q)` and `alpha = u/v` with `k = c^v`.
fn rational_power_case() -> impl Strategy<Value = (u64, ExactAlpha, BigRational)> {
    let logs = (2u64..=10, -4i64..=4, 1u32..=30, 1u32..=30).prop_map(|(k, j, p, q)| {
        let a = ExactAlpha::new(j, 1, p, q).unwrap();
        let kj = if j >= 0 {
            BigRational::from_integer(big(k).pow(j as u32))
        } else {
            BigRational::new(BigInt::one(), big(k).pow((-j) as u32))
        };
        (k, a, kj * BigRational::new(p.into(), q.into()))
    });
    let roots = (prop::sample::select(vec![(4u64, 2u32, 2u64), (8, 3, 2), (9, 2, 3), (27, 3, 3), (16, 4, 2)]), -9i64..=9)
        .prop_map(|((k, v, c), u)| {
            let a = ExactAlpha::new(u, i64::from(v), 1u32, 1u32).unwrap();
            let cu = if u >= 0 {
                BigRational::from_integer(big(c).pow(u as u32))
            } else {
                BigRational::new(BigInt::one(), big(c).pow((-u) as u32))
            };
            (k, a, cu)
        });
    prop_oneof![logs, roots]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_power_agrees_with_rational_arithmetic((k, a, value) in rational_power_case()) {
        let s = spec(&a);
        let class = a.classify(k);
        prop_assert_eq!(class.value(), Some(value.clone()));
        // F = floor(alpha): largest j with k^j <= k^alpha
        let kq = BigRational::from_integer(big(k));
        let mut f = 0i64;
        while kq.pow(f as i32) > value {
            f -= 1;
        }
        while kq.pow(f as i32 + 1) <= value {
            f += 1;
        }
        prop_assert_eq!(a.floor(k), f);
        for m in 1..=30i64 {
            // k^(m - frac(alpha)) = k^(m + F) / k^alpha
            let x = kq.pow((m + f) as i32) / &value;
            let floor = rat_floor(&x);
            let ceil = -rat_floor(&-x.clone());
            prop_assert_eq!(floor_k_power(k, &s, m, Sign2::Plus, Rounding::Floor).unwrap(), floor.clone());
            prop_assert_eq!(floor_k_power(k, &s, m, Sign2::Plus, Rounding::Ceil).unwrap(), ceil.clone());
            prop_assert_eq!(floor_k_power(k, &s, m, Sign2::Minus, Rounding::Floor).unwrap(), -ceil);
            prop_assert_eq!(floor_k_power(k, &s, m, Sign2::Minus, Rounding::Ceil).unwrap(), -floor);
        }
    }
}

/// `floor(u/v + log_k(n+1))` straight from the definition: the largest `j`
/// with `k^(j v - u) <= (n+1)^v`.
fn rational_alpha_oracle(k: u64, u: i64, v: u32, n: u64) -> i64 {
    let lhs = big(n + 1).pow(v);
    let fits = |j: i64| {
        let e = j * i64::from(v) - u;
        if e >= 0 {
            big(k).pow(e as u32) <= lhs
        } else {
            BigInt::one() <= &lhs * big(k).pow((-e) as u32)
        }
    };
    let mut j = -u.abs() - 1;
    while !fits(j) {
        j -= 1;
    }
    while fits(j + 1) {
        j += 1;
    }
    j
}

/// The first 200 decimal digits of `u / v`, as `dec:` input with radius 10^-200.
fn decimal_200(u: i64, v: i64) -> String {
    let neg = u < 0;
    let (ua, va) = (u.unsigned_abs(), v as u64);
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&(ua / va).to_string());
    s.push('.');
    let mut r = ua % va;
    for _ in 0..200 {
        r *= 10;
        s.push(char::from(b'0' + (r / va) as u8));
        r %= va;
    }
    format!("dec:{s}~1e-200")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interval_agrees_with_exact_oracle(k in 2u64..=10, u in -9i64..=9, v in 1u32..=7, n in 0u64..=100_000) {
        let dec: AlphaSpec = decimal_200(u, i64::from(v)).parse().unwrap();
        prop_assert!(!dec.is_exact());
        let want = rational_alpha_oracle(k, u, v, n);
        match floor_alpha_plus_log(k, &dec, n) {
            Ok(got) => prop_assert_eq!(got, want, "alpha = {}/{}, n = {}", u, v, n),
            // the interval straddles an integer: only allowed when the exact value is one
            Err(floorlog::Error::AmbiguousFloor { .. }) => {
                let exact = AlphaSpec::Exact(ExactAlpha::rational(u, i64::from(v)).unwrap());
                let hit = (0..=40i64).any(|j| {
                    let e = j * i64::from(v) - u;
                    e >= 0 && big(k).pow(e as u32) == big(n + 1).pow(v)
                });
                prop_assert!(hit, "uncertified floor away from an integer: {}", floor_alpha_plus_log(k, &exact, n).unwrap());
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

/// Rank over Q by plain rational elimination.
fn rational_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r].clone();
        for row in m.iter_mut().skip(r + 1) {
            let f = &row[c] / &pivot[c];
            for (x, y) in row.iter_mut().zip(&pivot).skip(c) {
                *x -= &f * y;
            }
        }
        r += 1;
    }
    r
}

#[test]
fn rank_invariant_under_row_mixing() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let nrows = rng.gen_range(1..8);
        let ncols = rng.gen_range(1..8);
        // low-rank products make dependencies common
        let inner = rng.gen_range(1..=nrows.min(ncols));
        let left: Vec<Vec<i64>> = (0..nrows).map(|_| (0..inner).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let right: Vec<Vec<i64>> = (0..inner).map(|_| (0..ncols).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let rows: Vec<Vec<BigInt>> = left
            .iter()
            .map(|l| (0..ncols).map(|j| BigInt::from((0..inner).map(|t| l[t] * right[t][j]).sum::<i64>())).collect())
            .collect();
        let want = rational_rank(&rows);
        assert_eq!(rank(&rows), want);

        // unimodular mixing: row additions and swaps
        let mut mixed = rows.clone();
        for _ in 0..20 {
            let (i, j) = (rng.gen_range(0..nrows), rng.gen_range(0..nrows));
            if i == j {
                continue;
            }
            if rng.gen_bool(0.3) {
                mixed.swap(i, j);
            } else {
                let c = BigInt::from(rng.gen_range(-5..=5));
                let add: Vec<BigInt> = mixed[j].iter().map(|x| x * &c).collect();
                for (x, y) in mixed[i].iter_mut().zip(add) {
                    *x += y;
                }
            }
        }
        assert_eq!(rank(&mixed), want);
        // appending combinations of existing rows changes nothing
        let combo: Vec<BigInt> = (0..ncols).map(|j| rows.iter().map(|r| &r[j] * 3).sum()).collect();
        mixed.push(combo);
        assert_eq!(rank(&mixed), want);
    }
}

#[test]
fn kernel_ranks_monotone_in_e_and_truncation() {
    for s in ["0", "1/2", "log(3)", "1/3"] {
        let a: AlphaSpec = s.parse().unwrap();
        let mut prev: Option<Vec<usize>> = None;
        for trunc in [64, 256, 1024] {
            let p = rank_profile(2, &a, 6, trunc).unwrap();
            assert!(p.ranks.windows(2).all(|w| w[0] <= w[1]), "{s}: {:?}", p.ranks);
            if let Some(q) = &prev {
                assert!(q.iter().zip(&p.ranks).all(|(x, y)| x <= y), "{s}: {q:?} then {:?}", p.ranks);
            }
            prev = Some(p.ranks);
        }
    }
}

#[test]
fn alpha_zero_plateau_is_robust_to_truncation() {
    let a: AlphaSpec = "0".parse().unwrap();
    for trunc in [1 << 10, 1 << 12, 1 << 14] {
        let p = rank_profile(2, &a, 6, trunc).unwrap();
        assert!(p.stabilized);
        assert_eq!(*p.ranks.last().unwrap(), 4, "trunc {trunc}");
    }
}

/// Not a substitute for the growth-in-e criterion; it documents where the
/// growth actually shows up for k = 2, alpha = 1/2.
#[test]
fn half_plateau_grows_with_truncation() {
    let half: AlphaSpec = "1/2".parse().unwrap();
    let plateaus: Vec<usize> = [1 << 10, 1 << 12, 1 << 14]
        .iter()
        .map(|&t| *rank_profile(2, &half, 8, t).unwrap().ranks.last().unwrap())
        .collect();
    assert!(plateaus.windows(2).all(|w| w[0] < w[1]), "{plateaus:?}");
}

/// A random constant-coefficient sequence of the given order.
fn c_finite(rng: &mut ChaCha8Rng, order: usize, len: usize) -> Vec<BigInt> {
    let coeffs: Vec<i64> = (0..order).map(|_| rng.gen_range(-3..=3)).collect();
    let mut seq: Vec<BigInt> = (0..order).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect();
    while seq.len() < len {
        let m = seq.len();
        let next: BigInt = coeffs.iter().enumerate().map(|(j, c)| &seq[m - 1 - j] * c).sum();
        seq.push(next);
    }
    seq
}

#[test]
fn recurrences_replay_and_detectors_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let order = rng.gen_range(1..=4);
        let seq = c_finite(&mut rng, order, 24);
        if seq.iter().all(Zero::is_zero) {
            // minimal order 0, outside the search range
            continue;
        }
        let lin = guess_linear_recurrence(&seq, 6).unwrap().expect("generated by an order-4 recurrence");
        assert!(lin.order <= order);
        assert!(lin.holds_on(&seq));
        if lin.valid_from == 0 {
            let f = series_to_rational(&seq, 8).unwrap().expect("c-finite from the start has a rational series");
            let coeffs = f.coefficients(seq.len());
            assert!(coeffs.iter().zip(&seq).all(|(c, s)| *c == BigRational::from_integer(s.clone())));
            let dq = f.denominator().degree().unwrap_or(0);
            let dp = f.numerator().degree().map_or(0, |d| d + 1);
            assert_eq!(dq.max(dp), lin.order, "{lin} vs {f}");
        }
    }
}

#[test]
fn polynomial_candidates_replay() {
    // u(m) = m! * (m + 2) and u(m) = 2^m + m
    let fact: Vec<BigInt> = (0..30u32)
        .scan(BigInt::one(), |acc, m| {
            if m > 0 {
                *acc *= m;
            }
            Some(&*acc * (m + 2))
        })
        .collect();
    let mixed: Vec<BigInt> = (0..30u32).map(|m| (BigInt::one() << m) + m).collect();
    for seq in [fact, mixed] {
        let c = guess_polynomial_recurrence(&seq, 2, 2).unwrap().expect("low-order holonomic");
        assert!(c.validated && c.holds_on(&seq));
    }
}

#[test]
fn period_implies_short_linear_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let pre = rng.gen_range(0..4);
        let per = rng.gen_range(1..5);
        let head: Vec<u32> = (0..pre).map(|_| rng.gen_range(0..3)).collect();
        let cycle: Vec<u32> = (0..per).map(|_| rng.gen_range(0..3)).collect();
        let digits: Vec<u32> = head.iter().chain(cycle.iter().cycle()).take(40).copied().collect();
        let p = detect_period(&digits, 40).unwrap().found.expect("periodic by construction");
        assert!(p.preperiod <= pre && p.period <= per);
        let span = p.preperiod + p.period;
        let seq: Vec<BigInt> = digits.iter().map(|&d| BigInt::from(d)).collect();
        let lin = guess_linear_recurrence(&seq, span).unwrap().expect("period gives a recurrence");
        assert!(lin.order <= span);
    }
}

#[test]
fn negative_linear_results_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let seq: Vec<BigInt> = (0..20).map(|_| BigInt::from(rng.gen_range(-50..=50))).collect();
        let r = 3;
        if guess_linear_recurrence(&seq, r).unwrap().is_some() {
            continue;
        }
        let mut ext = seq.clone();
        ext.extend((0..10).map(|_| BigInt::from(rng.gen_range(-50..=50))));
        if let Some(rec) = guess_linear_recurrence(&ext, r).unwrap() {
            // any fit must start past the prefix's admissible window
            assert!(rec.valid_from > seq.len() - 2 * rec.order - LINEAR_HOLDOUT, "{rec}");
        }
    }
}

#[test]
fn boundary_floor_of_exact_integer() {
    // k^(m - frac(alpha)) is an exact integer for alpha = 1 and alpha = log(4) with k = 2
    for s in ["1", "log(4)", "0"] {
        let a: AlphaSpec = s.parse().unwrap();
        for m in 1..=20i64 {
            let f = floor_k_power(2, &a, m, Sign2::Plus, Rounding::Floor).unwrap();
            let c = floor_k_power(2, &a, m, Sign2::Plus, Rounding::Ceil).unwrap();
            assert_eq!(f, c);
            assert_eq!(f, BigInt::one() << m);
        }
    }
    // and floor(alpha + log_k(n+1)) at exact powers
    let one: AlphaSpec = "1".parse().unwrap();
    assert_eq!(floor_alpha_plus_log(2, &one, 7).unwrap(), 4);
    assert_eq!(floor_alpha_plus_log(2, &one, 6).unwrap(), 3);
}
