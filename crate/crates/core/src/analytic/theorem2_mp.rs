//! Multiprecision evaluation of the grouped-eigenvalue expansion, used when
//! the double-precision sum cancels too deeply. The terms are the same as in
//! the double path; only the arithmetic changes.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

use super::theorem2::Theorem2Workspace;
use crate::error::{numeric, Result};

const RM: RoundingMode = RoundingMode::ToEven;
// Guard bits kept beyond the measured cancellation.
const GUARD_BITS: i64 = 96;
const MAX_BITS: usize = 16_384;

struct Mp {
    p: usize,
    cc: Consts,
}

impl Mp {
    fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    fn int(&self, n: usize) -> BigFloat {
        BigFloat::from_u64(n as u64, self.p)
    }

    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.p, RM)
    }

    fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, RM)
    }

    fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc)
    }

    fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    /// ₁F₁(a; b; x) with b > a > 0, via Kummer for negative x so that the
    /// summed series has positive terms only.
    fn hyp1f1(&mut self, a: &BigFloat, b: &BigFloat, x: &BigFloat) -> Result<BigFloat> {
        if x.is_negative() {
            let bma = self.sub(b, a);
            let neg = x.neg();
            let series = self.positive_series(&bma, b, &neg)?;
            let scale = self.exp(x);
            return Ok(self.mul(&scale, &series));
        }
        self.positive_series(a, b, x)
    }

    fn positive_series(&self, a: &BigFloat, b: &BigFloat, x: &BigFloat) -> Result<BigFloat> {
        let one = self.int(1);
        let mut term = one.clone();
        let mut sum = one;
        let mut an = a.clone();
        let mut bn = b.clone();
        for n in 1..200_000usize {
            term = self.mul(&term, &self.mul(&an, x));
            term = self.div(&term, &self.mul(&bn, &self.int(n)));
            sum = self.add(&sum, &term);
            an = self.add(&an, &self.int(1));
            bn = self.add(&bn, &self.int(1));
            let small = match (term.exponent(), sum.exponent()) {
                (Some(et), Some(es)) => (et as i64) < (es as i64) - self.p as i64 - 8,
                _ => term.is_zero(),
            };
            // Terms decrease monotonically once n exceeds x.
            if small && self.ratio_below_one(&an, &bn, x, n) {
                return Ok(sum);
            }
        }
        numeric("multiprecision ₁F₁ series did not converge")
    }

    /// ₁F₁(k+½; k+½+m; x) for m = 1..=mmax and x > 0 in one pass, using
    /// (a)_n/(a+m)_n = (a)_m/(a+n)_m.
    fn hyp1f1_ladder(&self, k: usize, x: &BigFloat, mmax: usize, rc: &mut Recips) -> Result<Vec<BigFloat>> {
        let xf = to_f64(x);
        let mut sums = vec![self.int(0); mmax];
        let mut u = self.int(1);
        for n in 0..200_000usize {
            rc.ensure(self, k + n + mmax);
            let mut w = u.clone();
            let mut small = true;
            for (m, s) in sums.iter_mut().enumerate() {
                w = self.mul(&w, &rc.v[k + n + m]);
                *s = self.add(s, &w);
                small &= match (w.exponent(), s.exponent()) {
                    (Some(ew), Some(es)) => (ew as i64) < (es as i64) - self.p as i64 - 8,
                    _ => w.is_zero(),
                };
            }
            // Beyond n = 2x successive terms at least halve.
            if small && (n as f64) >= 2.0 * xf {
                let mut poch = self.int(1);
                for (m, s) in sums.iter_mut().enumerate() {
                    poch = self.mul(&poch, &self.add(&self.int(k + m), &self.num(0.5)));
                    *s = self.mul(s, &poch);
                }
                return Ok(sums);
            }
            u = self.div(&self.mul(&u, x), &self.int(n + 1));
        }
        numeric("multiprecision ₁F₁ ladder did not converge")
    }

    /// ₁F₁(k+½; k+3/2; x) for k = 1..=kmax and x > 0 in one pass:
    /// (k+½) Σ_n xⁿ / (n! (k+½+n)).
    fn hyp1f1_a_ladder(&self, x: &BigFloat, kmax: usize, rc: &mut Recips) -> Result<Vec<BigFloat>> {
        let xf = to_f64(x);
        let mut sums = vec![self.int(0); kmax];
        let mut u = self.int(1);
        for n in 0..200_000usize {
            rc.ensure(self, kmax + n);
            let mut small = true;
            for (i, s) in sums.iter_mut().enumerate() {
                let w = self.mul(&u, &rc.v[i + 1 + n]);
                *s = self.add(s, &w);
                small &= match (w.exponent(), s.exponent()) {
                    (Some(ew), Some(es)) => (ew as i64) < (es as i64) - self.p as i64 - 8,
                    _ => w.is_zero(),
                };
            }
            if small && (n as f64) >= 2.0 * xf {
                for (i, s) in sums.iter_mut().enumerate() {
                    *s = self.div(s, &rc.v[i + 1]);
                }
                return Ok(sums);
            }
            u = self.div(&self.mul(&u, x), &self.int(n + 1));
        }
        numeric("multiprecision ₁F₁ ladder did not converge")
    }

    fn ratio_below_one(&self, an: &BigFloat, bn: &BigFloat, x: &BigFloat, n: usize) -> bool {
        let num = self.mul(an, x);
        let den = self.mul(bn, &self.int(n + 1));
        matches!(num.cmp(&den), Some(c) if c < 0)
    }
}

/// Cached 1/(j + ½).
struct Recips {
    v: Vec<BigFloat>,
}

impl Recips {
    fn ensure(&mut self, mp: &Mp, j: usize) {
        while self.v.len() <= j {
            let d = mp.add(&mp.int(self.v.len()), &mp.num(0.5));
            self.v.push(mp.div(&mp.int(1), &d));
        }
    }
}

fn to_f64(x: &BigFloat) -> f64 {
    match x.as_raw_parts() {
        Some((m, _, sign, e, _)) if !m.is_empty() => {
            let top = m[m.len() - 1] as f64;
            let v = top * 2f64.powi(e - 64);
            if sign == Sign::Neg {
                -v
            } else {
                v
            }
        }
        _ => 0.0,
    }
}

/// Returns the normalised LCR and the precision (bits) that certified it.
pub(crate) fn evaluate(ws: &Theorem2Workspace, t: f64) -> Result<(f64, usize)> {
    let mut p = 256usize;
    loop {
        let (sum, largest_exp) = sum_terms(ws, t, p)?;
        let lost = match sum.exponent() {
            Some(e) if !sum.is_zero() => largest_exp - e as i64,
            _ => p as i64,
        };
        if lost + GUARD_BITS <= p as i64 {
            return Ok((to_f64(&sum), p));
        }
        let next = ((lost + 2 * GUARD_BITS) as usize).max(2 * p);
        if next > MAX_BITS {
            return numeric(format!(
                "grouped LCR at T={t}: cancellation exceeds {MAX_BITS} bits of working precision"
            ));
        }
        p = next;
    }
}

fn sum_terms(ws: &Theorem2Workspace, t: f64, p: usize) -> Result<(BigFloat, i64)> {
    let cc = Consts::new().map_err(|e| crate::LcrError::Numeric(format!("multiprecision setup: {e:?}")))?;
    let mut mp = Mp { p, cc };
    let lead: Vec<BigFloat> = ws.lead().iter().map(|&x| mp.num(x)).collect();
    let tail = mp.num(ws.tail_value());
    let s = ws.tail_count();
    let l = lead.len();
    let tm = mp.num(t);
    let sqrt_t = mp.sqrt(&tm);
    let half = mp.num(0.5);
    // tpow[j] = T^{j+½}
    let mut tpow = vec![sqrt_t.clone()];
    for j in 1..=(2 * s + 2) {
        let next = mp.mul(&tpow[j - 1], &tm);
        tpow.push(next);
    }
    let mut recips = Recips { v: Vec::new() };

    // Γ(n + ½) = √π Π_{j<n} (j + ½)
    let pi = mp.pi();
    let mut gamma_half = vec![mp.sqrt(&pi)];
    for n in 1..=(s + 3) {
        let prev = &gamma_half[n - 1];
        let factor = mp.add(&mp.int(n - 1), &half);
        gamma_half.push(mp.mul(prev, &factor));
    }
    // C_k = (−1)^k 2k binom(2k, k) / 4^k
    let mut c = Vec::with_capacity(s);
    let mut central = mp.int(1);
    for k in 1..=s {
        central = mp.div(&mp.mul(&central, &mp.int((2 * k) * (2 * k - 1))), &mp.int(k * k));
        let w = mp.div(&mp.mul(&mp.int(2 * k), &central), &mp.powi(&mp.int(4), k));
        c.push(if k % 2 == 1 { w.neg() } else { w });
    }

    let sqrt2 = mp.sqrt(&mp.int(2));
    let root_c2 = mp.mul(&sqrt2, &pi);
    let mut prod_lead = mp.int(1);
    for x in &lead {
        prod_lead = mp.mul(&prod_lead, x);
    }
    let common = mp.div(&root_c2, &mp.mul(&prod_lead, &mp.powi(&tail, 2 * s)));

    let mut sum = mp.int(0);
    let mut largest = i64::MIN;
    let mut add = |sum: &mut BigFloat, term: BigFloat, mp: &Mp| {
        if let Some(e) = term.exponent() {
            if !term.is_zero() {
                largest = largest.max(e as i64);
            }
        }
        *sum = mp.add(sum, &term);
    };

    for r in 0..l {
        let lr = &lead[r];
        let mut diff = mp.int(1);
        for (i, li) in lead.iter().enumerate() {
            if i != r {
                diff = mp.mul(&diff, &mp.sub(li, lr));
            }
        }
        let gap = mp.sub(&tail, lr);
        let a: Vec<BigFloat> = lead
            .iter()
            .chain(std::iter::once(&tail))
            .map(|x| mp.add(&mp.div(&mp.int(1), x), &mp.div(&mp.int(1), lr)))
            .collect();
        let a0 = a[l].clone();
        let others: Vec<usize> = (0..l).filter(|&i| i != r).collect();

        // κ0 B_r with μ = 1/λ_r, p = S, k = 1.
        let kb = mp.div(
            &mp.mul(
                &common,
                &mp.mul(&mp.mul(&mp.powi(lr, l + s - 1), &mp.sqrt(lr)), &mp.powi(&tail, s)),
            ),
            &mp.mul(&diff, &mp.powi(&gap, s)),
        );
        let mu_r = mp.div(&mp.int(1), lr);
        let mut jobs = vec![(kb, s, mu_r, 1usize)];
        let mu_tail = mp.div(&mp.int(1), &tail);
        for k in 1..=s {
            let kd = mp.div(
                &mp.mul(
                    &common,
                    &mp.mul(&mp.powi(lr, l + s - k - 1), &mp.mul(&mp.powi(&tail, s + 1), &mp.sqrt(&tail))),
                ),
                &mp.mul(&diff, &mp.powi(&gap, s - k + 1)),
            );
            jobs.push((mp.mul(&kd, &c[k - 1]), s - k + 1, mu_tail.clone(), k));
        }

        // Pieces shared by every job of this r.
        let decay0 = mp.exp(&mp.mul(&a0, &tm).neg());
        let mut simple = Vec::with_capacity(others.len());
        for &ti in &others {
            let at = &a[ti];
            let mut base = mp.int(1);
            for &qi in others.iter().filter(|&&qi| qi != ti) {
                base = mp.mul(&base, &mp.sub(at, &a[qi]));
            }
            let decay = mp.exp(&mp.mul(at, &tm).neg());
            // Tail-pole jobs share x = (a_t − 1/λ0)T across k.
            let x = mp.mul(&mp.sub(at, &mu_tail), &tm);
            let ladder = if x.is_positive() { Some(mp.hyp1f1_a_ladder(&x, s, &mut recips)?) } else { None };
            simple.push((ti, base, mp.sub(at, &a0), decay, ladder));
        }
        // weights[j] = Σ_t 1 / ((a0 − a_t)^j Π_{q≠t}(a_t − a_q))
        let mut weights = vec![mp.int(0); s + 2];
        for (_, base, gap_t, _, _) in &simple {
            let inv = mp.div(&mp.int(1), &mp.mul(base, &gap_t.neg()));
            let step = mp.div(&mp.int(1), &gap_t.neg());
            let mut w = inv;
            for item in weights.iter_mut().skip(1) {
                *item = mp.add(item, &w);
                w = mp.mul(&w, &step);
            }
        }

        for (job, (coef, pp, mu, k)) in jobs.into_iter().enumerate() {
            let kf = mp.add(&mp.int(k), &half);
            // Real part of (j/2)·(−1)^{k+3/2} is ½(−1)^k.
            let sign1 = k % 2 == 1;
            for (ti, base, gap_t, decay, ladder) in &simple {
                let den = mp.mul(&mp.powi(gap_t, pp), base);
                let f = match ladder {
                    Some(v) if job > 0 => v[k - 1].clone(),
                    _ => {
                        let x = mp.mul(&mp.sub(&a[*ti], &mu), &tm);
                        mp.hyp1f1(&kf, &mp.add(&kf, &mp.int(1)), &x)?
                    }
                };
                let num = mp.mul(&mp.mul(&coef, &f), &mp.mul(decay, &tpow[k]));
                let mut term = mp.div(&num, &mp.mul(&den, &gamma_half[k + 1]));
                term = mp.mul(&term, &half);
                if sign1 {
                    term = term.neg();
                }
                add(&mut sum, term, &mp);
            }
            // Real part of (j/2)·(−1)^{p+k+½} is ½(−1)^{p+k+1}.
            let sign2 = (pp + k + 1) % 2 == 1;
            let x = mp.mul(&mp.sub(&a0, &mu), &tm);
            let fs = mp.hyp1f1_ladder(k, &x, pp, &mut recips)?;
            let scaled = mp.mul(&mp.mul(&coef, &decay0), &half);
            for m in 1..=pp {
                let weight = if others.is_empty() {
                    if m != pp {
                        continue;
                    }
                    mp.int(1)
                } else {
                    weights[pp - m + 1].clone()
                };
                // T^{m+k−½}
                let num = mp.mul(&mp.mul(&scaled, &weight), &mp.mul(&fs[m - 1], &tpow[m + k - 1]));
                let mut term = mp.div(&num, &gamma_half[m + k]);
                if sign2 {
                    term = term.neg();
                }
                add(&mut sum, term, &mp);
            }
        }
    }
    Ok((sum, largest))
}
