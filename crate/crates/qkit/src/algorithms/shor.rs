//! Shor's factoring: classical reductions, quantum period finding and the
//! continued-fraction post-processing.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::{permutation_gate, Gate};
use crate::qstate::{sample_index, StateVector};
use crate::transforms::phase_estimation_with_powers;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Least `r > 0` with `k^r ≡ 1 (mod N)`, by direct iteration.
pub fn period_find_classical(k: u64, n: u64) -> Result<u64> {
    if n < 2 || gcd(k, n) != 1 {
        return Err(Error::Invalid(format!("{k} is not invertible modulo {n}")));
    }
    let mut x = k % n;
    let mut r = 1;
    while x != 1 % n {
        x = (x as u128 * k as u128 % n as u128) as u64;
        r += 1;
    }
    Ok(r)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some(p)` when `n = p^e` with `e ≥ 2` and `p` prime.
fn prime_power_base(n: u64) -> Option<u64> {
    for e in 2..64u32 {
        let root = (n as f64).powf(1.0 / e as f64).round() as u64;
        for p in root.saturating_sub(1)..=root + 1 {
            if p >= 2 && p.checked_pow(e) == Some(n) && is_prime(p) {
                return Some(p);
            }
        }
        if root < 2 {
            break;
        }
    }
    None
}

/// Denominators of the continued-fraction convergents of `num/den`, using
/// `k_j = a_j·k_{j−1} + k_{j−2}` with `k_{−1} = 0`, `k_{−2} = 1`.
pub fn convergent_denominators(num: u64, den: u64) -> Vec<u64> {
    let (mut a, mut b) = (num, den);
    let (mut k2, mut k1) = (1u64, 0u64);
    let mut out = Vec::new();
    while b != 0 {
        let t = a / b;
        (a, b) = (b, a % b);
        let k = t.saturating_mul(k1).saturating_add(k2);
        (k2, k1) = (k1, k);
        out.push(k);
    }
    out.dedup();
    out
}

/// The five-qubit compiled circuit for `N = 15`, base `x = 11`.
///
/// Qubits 0–2 form the phase register and 3–4 the work register. With
/// period 2 the controlled multiplications reduce to two CNOTs from qubit 2,
/// followed by a three-qubit inverse QFT. The measurement is deferred to the
/// end; qubit `i` is read into clbit `i`.
pub fn compiled_shor15_circuit() -> Circuit {
    let h = std::f64::consts::PI;
    let mut c = Circuit::new(5, 3);
    c.h(0).h(1).h(2);
    c.cx(2, 3).cx(2, 4);
    c.h(1);
    c.g("cp", &[h / 2.0], &[1, 0]);
    c.h(0);
    c.g("cp", &[h / 4.0], &[1, 2]);
    c.g("cp", &[h / 2.0], &[0, 2]);
    for q in 0..3 {
        c.measure(q, q).expect("clbits declared");
    }
    c
}

/// Register value `4·q₂ + 2·q₁ + q₀` of the compiled circuit with its exact
/// probability.
pub fn compiled_shor15_distribution() -> Result<BTreeMap<usize, f64>> {
    let s = compiled_shor15_circuit().run_statevector()?;
    let m = s.marginal(&[2, 1, 0]);
    Ok(m.into_iter().enumerate().filter(|(_, p)| *p > 1e-15).collect())
}

/// `y ↦ a·y mod N` on `n` qubits (identity for `y ≥ N`).
fn mod_mult_gate(a: u64, n_mod: u64, n_bits: usize) -> Result<Gate> {
    let perm: Vec<usize> = (0..1usize << n_bits)
        .map(|y| if (y as u64) < n_mod { ((a as u128 * y as u128) % n_mod as u128) as usize } else { y })
        .collect();
    permutation_gate(&perm, &format!("mul{a}mod{n_mod}"))
}

/// Period-finding circuit with `m = 2n` phase qubits and an `n`-qubit work
/// register initialized to `|1⟩`. Phase qubit `i` controls multiplication by
/// `k^{2^{m−1−i}} mod N`.
pub fn period_finding_circuit(k: u64, n_mod: u64) -> Result<Circuit> {
    let n = 64 - (n_mod - 1).leading_zeros() as usize;
    let n = n.max(1);
    let m = 2 * n;
    let powers: Vec<Gate> = (0..m)
        .map(|i| mod_mult_gate(mod_pow(k, 1u64 << (m - 1 - i), n_mod), n_mod, n))
        .collect::<Result<_>>()?;
    let mut c = Circuit::new(m + n, m);
    c.x(m + n - 1);
    let pe = phase_estimation_with_powers(&powers, n)?;
    c.append(&pe)?;
    for q in 0..m {
        c.measure(q, q)?;
    }
    Ok(c)
}

/// One quantum period-finding attempt.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attempt {
    pub base: u64,
    pub measured: u64,
    pub register_bits: usize,
    pub period: Option<u64>,
}

/// Outcome of [`shor_factor`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShorReport {
    pub n: u64,
    pub factors: (u64, u64),
    /// `"quantum"` when found by period finding, otherwise the classical
    /// shortcut that applied (`"even"`, `"prime-power"`).
    pub method: String,
    pub qubits: usize,
    pub attempts: Vec<Attempt>,
}

fn recover_period(y: u64, q: u64, k: u64, n_mod: u64) -> Option<u64> {
    if y == 0 {
        return None;
    }
    for d in convergent_denominators(y, q) {
        if d == 0 || d >= n_mod {
            continue;
        }
        // The true period may be a small multiple of the convergent.
        for mult in 1..=4 {
            let r = d * mult;
            if r < n_mod && mod_pow(k, r, n_mod) == 1 {
                return Some(r);
            }
        }
    }
    None
}

/// Distribution of the phase register of [`period_finding_circuit`].
pub fn period_register_distribution(k: u64, n_mod: u64) -> Result<Vec<f64>> {
    let c = period_finding_circuit(k, n_mod)?;
    let m = c.n_clbits();
    let s: StateVector = c.run_statevector()?;
    Ok(s.marginal(&(0..m).collect::<Vec<_>>()))
}

/// Factors an odd composite `N` that is not a prime power by quantum period
/// finding.
///
/// Each attempt draws a base `k` coprime to `N`, samples the phase register
/// once and recovers a period from the continued-fraction convergents of
/// `y/2^m`. An odd period, `k^{r/2} ≡ −1` or a trivial gcd triggers a new
/// base. Even numbers and prime powers are answered classically and flagged.
pub fn shor_factor<R: Rng + ?Sized>(n_mod: u64, rng: &mut R) -> Result<ShorReport> {
    if n_mod < 4 || is_prime(n_mod) {
        return Err(Error::Invalid(format!("{n_mod} is not composite")));
    }
    if n_mod > 1 << 12 {
        return Err(Error::TooLarge(format!("{n_mod} exceeds 4096")));
    }
    let bits = 64 - (n_mod - 1).leading_zeros() as usize;
    let qubits = 3 * bits;
    let report = |factors: (u64, u64), method: &str, attempts: Vec<Attempt>| {
        let (a, b) = factors;
        ShorReport { n: n_mod, factors: (a.min(b), a.max(b)), method: method.into(), qubits, attempts }
    };
    if n_mod.is_multiple_of(2) {
        return Ok(report((2, n_mod / 2), "even", Vec::new()));
    }
    if let Some(p) = prime_power_base(n_mod) {
        return Ok(report((p, n_mod / p), "prime-power", Vec::new()));
    }
    let mut attempts = Vec::new();
    let mut cache: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for _ in 0..40 {
        let k = rng.random_range(2..n_mod);
        if gcd(k, n_mod) != 1 {
            continue;
        }
        let dist = match cache.get(&k) {
            Some(d) => d,
            None => {
                let d = period_register_distribution(k, n_mod)?;
                cache.entry(k).or_insert(d)
            }
        };
        let m = 2 * bits;
        let y = sample_index(dist, rng) as u64;
        let period = recover_period(y, 1 << m, k, n_mod);
        attempts.push(Attempt { base: k, measured: y, register_bits: m, period });
        let Some(r) = period else { continue };
        if r % 2 == 1 {
            continue;
        }
        let half = mod_pow(k, r / 2, n_mod);
        if half == n_mod - 1 {
            continue;
        }
        for cand in [gcd(half + 1, n_mod), gcd(half + n_mod - 1, n_mod)] {
            if cand > 1 && cand < n_mod {
                return Ok(report((cand, n_mod / cand), "quantum", attempts));
            }
        }
    }
    Err(Error::Execution(format!("no factor of {n_mod} found after {} attempts", attempts.len())))
}
