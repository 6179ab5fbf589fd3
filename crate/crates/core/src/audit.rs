//! Exact-arithmetic audit of the numeric inequalities the proofs lean on.
//!
//! Every verdict is decided by exact rational comparisons (square roots are
//! eliminated by squaring, infinite families by monotonicity or induction
//! certificates evaluated exactly). Floating point appears only in the
//! human-readable `approx` rendering of margins. `precision` controls how
//! many Newton steps tighten the certified square-root lower bounds used in
//! reported margins; it can never flip a status.

use crate::verdict::Status;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

/// Reported slack: exact, or a certified lower bound when an irrational
/// quantity (a square root) is involved.
#[derive(Debug, Clone, PartialEq)]
pub enum Margin {
    Exact(BigRational),
    LowerBound(BigRational),
}

impl Margin {
    pub fn value(&self) -> &BigRational {
        match self {
            Margin::Exact(v) | Margin::LowerBound(v) => v,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, v) = match self {
            Margin::Exact(v) => ("exact", v),
            Margin::LowerBound(v) => ("lower-bound", v),
        };
        json!({
            "kind": kind,
            "num": v.numer().to_string(),
            "den": v.denom().to_string(),
            "approx": v.to_f64(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct AuditItem {
    pub id: &'static str,
    pub description: &'static str,
    pub status: Status,
    pub margin: Margin,
    pub parameters: Value,
}

impl AuditItem {
    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "description": self.description,
            "status": self.status,
            "margin": self.margin.to_json(),
            "parameters": self.parameters,
        })
    }
}

pub const ITEM_IDS: [&str; 8] = [
    "binomial-bound",
    "log-bound",
    "c1-chain",
    "eq-4epsilon",
    "eq-contradict",
    "eq-contradict2",
    "lemma-4-8-arith",
    "freiman-constraint-points",
];

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow(x: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= x;
    }
    acc
}

fn approx(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Certified lower bound on `sqrt(c)` for `c > 0` at `bits` binary digits:
/// `floor(sqrt(floor(c * 4^bits))) / 2^bits`. Both floors round down, so
/// the result never exceeds `sqrt(c)`, and more bits only tighten it.
fn sqrt_lower_bound(c: &BigRational, bits: u32) -> BigRational {
    assert!(c.is_positive());
    let scaled: BigInt = (c.numer() << (2 * bits)) / c.denom();
    let root = scaled.sqrt();
    BigRational::new(root, BigInt::one() << bits)
}

/// (1) `(1+x)^k <= 1 + kx + (k^2/2) x^2` for `0 <= x <= 5e-4`, `k <= 32`.
///
/// Expanding the binomial, the claim is `sum_{i>=3} C(k,i) x^{i-2} <= k/2`;
/// the left side is increasing in `x >= 0`, so checking `x = 5e-4` exactly
/// covers the interval. The margin is the smallest slack of the original
/// inequality at the worst point `x = 5e-4` over all `k`.
fn item_binomial() -> AuditItem {
    let xmax = r(1, 2000);
    let mut min_slack: Option<BigRational> = None;
    let mut certified = true;
    for k in 1u32..=32 {
        // binomial coefficients of (1+x)^k
        let mut binom = vec![BigRational::one(); k as usize + 1];
        for i in 1..=k as usize {
            binom[i] = &binom[i - 1] * int((k as i64) - (i as i64) + 1) / int(i as i64);
        }
        let mut tail = BigRational::zero();
        for i in (3..=k as usize).rev() {
            tail = (tail + &binom[i]) * &xmax;
        }
        // tail = sum_{i>=3} C(k,i) xmax^{i-2}
        if tail > int(k as i64) / int(2) {
            certified = false;
        }
        let lhs = pow(&(BigRational::one() + &xmax), k);
        let rhs = BigRational::one()
            + int(k as i64) * &xmax
            + int((k as i64) * (k as i64)) / int(2) * &xmax * &xmax;
        let slack = rhs - lhs;
        if min_slack.as_ref().map_or(true, |m| &slack < m) {
            min_slack = Some(slack);
        }
    }
    let margin = min_slack.unwrap();
    AuditItem {
        id: "binomial-bound",
        description: "(1+x)^k <= 1 + kx + (k^2/2)x^2 on 0 <= x <= 5e-4, k <= 32",
        status: if certified && !margin.is_negative() { Status::Pass } else { Status::Fail },
        margin: Margin::Exact(margin),
        parameters: json!({
            "x_max": "1/2000",
            "k_max": 32,
            "certificate": "tail sum_{i>=3} C(k,i) x^{i-2} is increasing in x; checked <= k/2 at x_max",
        }),
    }
}

/// (2) `log_4^2 p < p/2` for all integers `p >= 2`.
///
/// With `b` the bit length (`2^{b-1} <= p < 2^b`), `log_2 p < b` unless `p`
/// is a power of two, where it equals `b-1`. Exact check for `p <= 10^6`;
/// beyond, `2p >= 2^b > b^2` for `b >= 20` by an induction certificate
/// (`(b+1)^2 <= 2 b^2` for `b >= 3`).
fn item_log_bound() -> AuditItem {
    let mut ok = true;
    let mut min_slack: Option<(BigRational, u64)> = None;
    for p in 2u64..=1_000_000 {
        let b = 64 - p.leading_zeros() as u64;
        // exact log_2 for powers of two, else the upper bound b
        let e2 = if p.is_power_of_two() { (b - 1) * (b - 1) } else { b * b };
        // need log_4^2 p = (log_2 p)^2 / 4 < p/2, certified by e2/4 <= p/2
        // (strict because log_2 p < b for non-powers)
        if p.is_power_of_two() {
            if e2 >= 2 * p {
                ok = false;
            }
        } else if e2 > 2 * p {
            ok = false;
        }
        let slack = int(p as i64) / int(2) - int(e2 as i64) / int(4);
        if min_slack.as_ref().map_or(true, |(m, _)| &slack < m) {
            min_slack = Some((slack, p));
        }
    }
    // induction certificate for b >= 20: base 20^2 < 2^20, step
    // (b+1)^2 <= 2 b^2 for all b >= 3 (equivalent to (b-1)^2 >= 2).
    let base = 20u64 * 20 < 1u64 << 20;
    let step = (3u64..=128).all(|b| (b + 1) * (b + 1) <= 2 * b * b);
    let (margin, at_p) = min_slack.unwrap();
    AuditItem {
        id: "log-bound",
        description: "log_4^2 p < p/2 for all p >= 2",
        status: if ok && base && step && margin.is_positive() { Status::Pass } else { Status::Fail },
        margin: Margin::LowerBound(margin),
        parameters: json!({
            "checked_exactly_up_to": 1_000_000,
            "min_certified_slack_at_p": at_p,
            "tail_certificate": "2p >= 2^b > b^2 for b >= 20 by induction ((b+1)^2 <= 2b^2, b >= 3)",
            "p0_identity": "log_4 p >= 6m+11 with m = 6 gives log_4 p >= 47, i.e. p >= 4^47 = 2^94",
        }),
    }
}

/// (3) the `c1 = 2.44` chain: `c1^5 >= 86.4866 >= 86`,
/// `3(c1^5 - 1)/(c1 - 1) <= 179`, and `86x - 179 >= 65x + 10` for `x >= 9`.
fn item_c1_chain() -> AuditItem {
    let c1 = r(61, 25);
    let c15 = pow(&c1, 5);
    let a = c15 >= r(864866, 10000) && c15 >= int(86);
    let geom = int(3) * (&c15 - BigRational::one()) / (&c1 - BigRational::one());
    let b = geom <= int(179);
    // 86x - 179 >= 65x + 10 <=> 21x >= 189, increasing in x: check x = 9
    let c = int(86) * int(9) - int(179) >= int(65) * int(9) + int(10);
    let margin = &c15 - int(86);
    AuditItem {
        id: "c1-chain",
        description: "c1^5 >= 86.4866 >= 86; 3(c1^5-1)/(c1-1) <= 179; 86x-179 >= 65x+10 for x >= 9 (c1 = 2.44)",
        status: if a && b && c && margin.is_positive() { Status::Pass } else { Status::Fail },
        margin: Margin::Exact(margin),
        parameters: json!({
            "c1": "61/25",
            "c1_pow5": format!("{}/{}", c15.numer(), c15.denom()),
            "geometric_term": format!("{}/{}", geom.numer(), geom.denom()),
            "geometric_term_approx": approx(&geom),
            "linear_check_at": 9,
        }),
    }
}

/// Left-hand side of items (4)/(5): `1/2 (1 - a e)(1/(2-d) - 1/(2 - 2a e))`
/// with `a` the paper's coefficient (12 or 54, doubled inside the second
/// denominator) — written out per item below.
fn half_diff(one_minus: &BigRational, d: &BigRational, inner: &BigRational) -> BigRational {
    r(1, 2)
        * one_minus
        * (BigRational::one() / (int(2) - d) - BigRational::one() / (int(2) - inner))
}

/// (4) eq:4epsilon — claim: for `e = 1e-4`,
/// `1/2 (1-12e)(1/(2-d) - 1/(2-24e)) >= 4e` for all `d in [5e-3, 1e-1]`.
///
/// The left side is increasing in `d` (only `1/(2-d)` depends on `d`), so
/// the interval claim reduces to the endpoint `d = 1/200` — where it is
/// FALSE: the exact crossing is `d = 7/1252 ≈ 5.591e-3 > 5e-3`. The item
/// reports the counterexample; the margin is the (negative) exact slack at
/// `d = 1/200`.
fn item_4epsilon() -> AuditItem {
    let e = r(1, 10_000);
    let one_minus = BigRational::one() - int(12) * &e;
    let inner = int(24) * &e;
    let rhs = int(4) * &e;
    let slack_at = |d: &BigRational| half_diff(&one_minus, d, &inner) - &rhs;
    let low = slack_at(&r(1, 200));
    let high = slack_at(&r(1, 10));
    // exact crossing: 1/(2-d*) = 1/(2-24e) + 8e/(1-12e)
    let inv = BigRational::one() / (int(2) - &inner) + int(8) * &e / &one_minus;
    let d_star = int(2) - BigRational::one() / inv;
    let pass = !low.is_negative() && !high.is_negative();
    AuditItem {
        id: "eq-4epsilon",
        description: "1/2 (1-12e)(1/(2-d) - 1/(2-24e)) >= 4e for d in [5e-3, 1e-1], e = 1e-4",
        status: if pass { Status::Pass } else { Status::Fail },
        margin: Margin::Exact(low.clone()),
        parameters: json!({
            "epsilon": "1/10000",
            "monotone": "LHS increasing in d; endpoints decide the interval",
            "counterexample_delta": "1/200",
            "slack_at_1_over_200": approx(&low),
            "slack_at_1_over_10": approx(&high),
            "exact_threshold_delta": format!("{}/{}", d_star.numer(), d_star.denom()),
            "exact_threshold_approx": approx(&d_star),
        }),
    }
}

/// (5) eq:contradict — for `e = 1e-4`,
/// `5e + 25e^2/2 < 1/2 (1-54e)(1/(2-d) - 1/(2-108e))` for all
/// `d in [2e-2, 1e-1]`; RHS increasing in `d`, endpoints checked strictly.
fn item_contradict() -> AuditItem {
    let e = r(1, 10_000);
    let one_minus = BigRational::one() - int(54) * &e;
    let inner = int(108) * &e;
    let lhs = int(5) * &e + r(25, 2) * &e * &e;
    let slack_at = |d: &BigRational| half_diff(&one_minus, d, &inner) - &lhs;
    let low = slack_at(&r(1, 50));
    let high = slack_at(&r(1, 10));
    let pass = low.is_positive() && high.is_positive();
    AuditItem {
        id: "eq-contradict",
        description: "5e + 25e^2/2 < 1/2 (1-54e)(1/(2-d) - 1/(2-108e)) for d in [2e-2, 1e-1], e = 1e-4",
        status: if pass { Status::Pass } else { Status::Fail },
        margin: Margin::Exact(low.clone()),
        parameters: json!({
            "epsilon": "1/10000",
            "monotone": "RHS increasing in d; endpoints decide the interval",
            "slack_at_1_over_50": approx(&low),
            "slack_at_1_over_10": approx(&high),
        }),
    }
}

/// One eq:contradict2 instance: with `f(e) = 10(4+10e)e`,
/// `C = (1-d/2)(4+10e)`, the expression
/// `(1 - l(1/2 + f))/(l C / (4+10e) ... )` simplifies to
/// `1/(C l) + l/2 - E` with `E = (1/2+f)/C + 1/2 + 5e`; its minimum over
/// `l in (0, 1]` is `sqrt(2/C) - E` provided `C >= 2` (so the critical
/// point `l* = sqrt(2/C) <= 1`). Positivity is decided exactly via
/// `E^2 C < 2`; the margin lower bound uses a certified rational sqrt.
fn contradict2_instance(d: BigRational, e: BigRational, steps: u32) -> (bool, BigRational) {
    let coef = int(4) + int(10) * &e;
    let f = int(10) * &coef * &e;
    let c = (BigRational::one() - &d / int(2)) * &coef;
    let big_e = (r(1, 2) + &f) / &c + r(1, 2) + int(5) * &e;
    let ok = c >= int(2) && big_e.is_positive() && &big_e * &big_e * &c < int(2);
    let lb = sqrt_lower_bound(&(int(2) / &c), steps) - &big_e;
    (ok, lb)
}

/// (6) eq:contradict2 — at `d = 1e-1`, the expression is strictly positive
/// for all `l in (0,1]` both at `e = 5.8e-3` and `e = 1e-4`. Additional
/// `d` samples are recorded but are not part of the claim.
fn item_contradict2(steps: u32) -> AuditItem {
    let (ok1, m1) = contradict2_instance(r(1, 10), r(29, 5000), steps);
    let (ok2, m2) = contradict2_instance(r(1, 10), r(1, 10_000), steps);
    let (extra1, _) = contradict2_instance(r(1, 20), r(1, 10_000), steps);
    let (extra2, _) = contradict2_instance(r(1, 50), r(1, 10_000), steps);
    let (extra3, _) = contradict2_instance(r(1, 50), r(29, 5000), steps);
    let margin = if m1 < m2 { m1 } else { m2 };
    AuditItem {
        id: "eq-contradict2",
        description: "(1 - l(1/2+f(e)))/(l(1-d/2)(4+10e)) - (1-l)/2 - 5e > 0 on l in (0,1], d = 1e-1, e in {5.8e-3, 1e-4}",
        status: if ok1 && ok2 { Status::Pass } else { Status::Fail },
        margin: Margin::LowerBound(margin),
        parameters: json!({
            "delta": "1/10",
            "epsilons": ["29/5000", "1/10000"],
            "closed_form": "min over l > 0 is sqrt(2/C) - E with C = (1-d/2)(4+10e); decided exactly via E^2 C < 2 and C >= 2",
            "extra_samples": {
                "d=1/20, e=1/10000": extra1,
                "d=1/50, e=1/10000": extra2,
                "d=1/50, e=29/5000": extra3,
            },
        }),
    }
}

/// (7) `(3-d)(x-1) >= (2+5e)x + 3/2` for `x >= 9`, `d <= 1e-1`,
/// `e <= 1e-4`. Slack decreasing in `d` and `e`, increasing in `x` (the
/// slope `1-d-5e` is positive), so the corner decides.
fn item_lemma48() -> AuditItem {
    let d = r(1, 10);
    let e = r(1, 10_000);
    let slope = BigRational::one() - &d - int(5) * &e;
    let x = int(9);
    let margin = (int(3) - &d) * (&x - BigRational::one()) - ((int(2) + int(5) * &e) * &x + r(3, 2));
    AuditItem {
        id: "lemma-4-8-arith",
        description: "(3-d)(x-1) >= (2+5e)x + 3/2 for x >= 9, d <= 1e-1, e <= 1e-4",
        status: if slope.is_positive() && !margin.is_negative() { Status::Pass } else { Status::Fail },
        margin: Margin::Exact(margin),
        parameters: json!({
            "corner": {"x": 9, "delta": "1/10", "epsilon": "1/10000"},
            "certificate": "slack increasing in x (slope 1-d-5e > 0), decreasing in d and e",
        }),
    }
}

/// Squared-form slack of `(2c1-3)/3 < (1-c0 c1)/sqrt(c1)`:
/// positive iff the constraint holds (given `1 - c0 c1 > 0`).
fn constraint_slack(c0: BigRational, c1: BigRational) -> BigRational {
    let a = (int(2) * &c1 - int(3)) / int(3);
    let b = BigRational::one() - &c0 * &c1;
    if !b.is_positive() {
        return -BigRational::one();
    }
    &b * &b - &a * &a * &c1
}

/// (8) the Theorem 1.3 constraint at the cited parameter points: holds at
/// `(1/35, 2.4)` and `(8e-3, 2.44)`, and fails at `(1/12, 2.46)`.
fn item_constraint_points() -> AuditItem {
    let s1 = constraint_slack(r(1, 35), r(12, 5));
    let s2 = constraint_slack(r(1, 125), r(61, 25));
    let s3 = constraint_slack(r(1, 12), r(123, 50));
    let pass = s1.is_positive() && s2.is_positive() && s3.is_negative();
    let margin = if s1 < s2 { s1.clone() } else { s2.clone() };
    AuditItem {
        id: "freiman-constraint-points",
        description: "(2c1-3)/3 < (1-c0 c1)/sqrt(c1) holds at (1/35, 2.4) and (1/125, 2.44); fails at (1/12, 2.46)",
        status: if pass { Status::Pass } else { Status::Fail },
        margin: Margin::Exact(margin),
        parameters: json!({
            "squared_form": "(1-c0 c1)^2 - ((2c1-3)/3)^2 c1",
            "slack_1_35_2.4": approx(&s1),
            "slack_1_125_2.44": approx(&s2),
            "slack_1_12_2.46": approx(&s3),
        }),
    }
}

/// Run every registered item. `precision` is the Newton step count for
/// certified square-root margins; statuses are precision-independent.
pub fn audit_all(precision: u32) -> Vec<AuditItem> {
    vec![
        item_binomial(),
        item_log_bound(),
        item_c1_chain(),
        item_4epsilon(),
        item_contradict(),
        item_contradict2(precision),
        item_lemma48(),
        item_constraint_points(),
    ]
}

pub fn audit_item(id: &str, precision: u32) -> Option<AuditItem> {
    audit_all(precision).into_iter().find(|i| i.id == id)
}
