//! Exact mode-level spectral data for the model cross-sections: flat tori
//! `μ = (2πn₁/ℓ₁)² + (2πn₂/ℓ₂)²` and round spheres `μ = k(k+1)/a²` with
//! multiplicity `2k+1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::sum::{par_sum_blocked, sum_compensated, Accumulator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cross_section", rename_all = "lowercase")]
pub enum CrossSection {
    Torus { l1: f64, l2: f64 },
    Sphere { radius: f64 },
}

impl CrossSection {
    pub fn vol(&self) -> f64 {
        match self {
            CrossSection::Torus { l1, l2 } => l1 * l2,
            CrossSection::Sphere { radius } => 4.0 * PI * radius * radius,
        }
    }

    pub fn tau(&self) -> f64 {
        match self {
            CrossSection::Torus { .. } => 0.0,
            CrossSection::Sphere { radius } => 2.0 / (radius * radius),
        }
    }

    /// Constant term of the small-t heat trace `H(t) ~ vol/4πt + c + O(t)`.
    pub fn heat_const(&self) -> f64 {
        match self {
            CrossSection::Torus { .. } => 0.0,
            CrossSection::Sphere { .. } => 1.0 / 3.0,
        }
    }

    /// Smallest nonzero eigenvalue.
    pub fn mu1(&self) -> f64 {
        match self {
            CrossSection::Torus { l1, l2 } => {
                let a = (2.0 * PI / l1).powi(2);
                let b = (2.0 * PI / l2).powi(2);
                a.min(b)
            }
            CrossSection::Sphere { radius } => 2.0 / (radius * radius),
        }
    }

    /// Deterministic (blocked, compensated) sum of `mult · f(μ)` over all
    /// eigenvalues `μ ≤ cap`, the zero mode included.
    pub fn mode_sum<F: Fn(f64) -> f64 + Sync>(&self, cap: f64, f: F) -> f64 {
        match *self {
            CrossSection::Torus { l1, l2 } => {
                let k1 = 2.0 * PI / l1;
                let k2 = 2.0 * PI / l2;
                let n1max = (cap.max(0.0).sqrt() / k1).floor() as usize;
                let inner = |n1: usize| -> f64 {
                    let mu1 = (k1 * n1 as f64).powi(2);
                    if mu1 > cap {
                        return 0.0;
                    }
                    let rem = cap - mu1;
                    let n2max = (rem.sqrt() / k2).floor() as usize;
                    let mut acc = Accumulator::new();
                    // n2 = 0 line
                    let w0 = if n1 == 0 { 1.0 } else { 2.0 };
                    acc.add(w0 * f(mu1));
                    let w = if n1 == 0 { 2.0 } else { 4.0 };
                    for n2 in 1..=n2max {
                        let mu = mu1 + (k2 * n2 as f64).powi(2);
                        acc.add(w * f(mu));
                    }
                    acc.value()
                };
                par_sum_blocked(n1max + 1, 16, inner)
            }
            CrossSection::Sphere { radius } => {
                let a2 = radius * radius;
                let kmax = ((-0.5 + (0.25 + cap * a2).sqrt()).floor() as usize).max(0);
                par_sum_blocked(kmax + 1, 1024, |k| {
                    let kk = k as f64;
                    (2.0 * kk + 1.0) * f(kk * (kk + 1.0) / a2)
                })
            }
        }
    }

    /// Heat trace `H(t) = Tr e^{-tΔ_N}` (zero mode included), evaluated with
    /// Poisson summation on the torus when that side converges faster.
    pub fn heat_trace(&self, t: f64) -> f64 {
        assert!(t > 0.0);
        match *self {
            CrossSection::Torus { l1, l2 } => theta_sum(t, l1) * theta_sum(t, l2),
            CrossSection::Sphere { radius } => {
                let a2 = radius * radius;
                let kmax = (45.0 * a2 / t).sqrt() as usize + 2;
                sum_compensated((0..=kmax).map(|k| {
                    let kk = k as f64;
                    (2.0 * kk + 1.0) * (-t * kk * (kk + 1.0) / a2).exp()
                }))
            }
        }
    }

    /// `h(t) = H(t) - vol/4πt - c`, evaluated without catastrophic
    /// cancellation (Poisson form on the torus, an exact per-interval
    /// comparison sum on the sphere). Intended for `t ≲ 1`.
    pub fn heat_remainder(&self, t: f64) -> f64 {
        assert!(t > 0.0);
        match *self {
            CrossSection::Torus { l1, l2 } => {
                let tstar = 0.25 * l1.min(l2).powi(2) / PI;
                if t < tstar {
                    // θ_i = (l_i/√(4πt))(1+s_i): h = (vol/4πt)(s₁+s₂+s₁s₂).
                    let s1 = poisson_tail(t, l1);
                    let s2 = poisson_tail(t, l2);
                    l1 * l2 / (4.0 * PI * t) * (s1 + s2 + s1 * s2)
                } else {
                    self.heat_trace(t) - self.vol() / (4.0 * PI * t)
                }
            }
            CrossSection::Sphere { radius } => {
                // Compare each summand with its integral over [k, k+1]:
                //   Σ (2k+1)E_k - a²/t = Σ E_k (2(k+1)·ψ₁(x_k) - 1),
                // ψ₁(x) = (x-1+e^{-x})/x, x_k = 2t(k+1)/a².
                let a2 = radius * radius;
                let kmax = (45.0f64 * a2 / t).sqrt() as usize + 2;
                let s = sum_compensated((0..=kmax).map(|k| {
                    let kk = k as f64;
                    let ek = (-t * kk * (kk + 1.0) / a2).exp();
                    let x = 2.0 * t * (kk + 1.0) / a2;
                    ek * (2.0 * (kk + 1.0) * psi1(x) - 1.0)
                }));
                s - 1.0 / 3.0
            }
        }
    }
}

/// `θ(t; l) = Σ_{n∈ℤ} e^{-t(2πn/l)²}`, Poisson-accelerated for small `t`.
fn theta_sum(t: f64, l: f64) -> f64 {
    let tstar = 0.25 * l * l / PI; // self-dual point of the two expansions
    if t < tstar {
        l / (4.0 * PI * t).sqrt() * (1.0 + poisson_tail(t, l))
    } else {
        let k = 2.0 * PI / l;
        let nmax = (45.0f64 / t).sqrt() / k;
        let nmax = nmax as usize + 1;
        1.0 + 2.0 * sum_compensated((1..=nmax).map(|n| (-t * (k * n as f64).powi(2)).exp()))
    }
}

/// `2 Σ_{m≥1} e^{-l²m²/4t}` (the correction factor in the Poisson form).
fn poisson_tail(t: f64, l: f64) -> f64 {
    let mut s = 0.0;
    for m in 1..200 {
        let e = l * l * (m * m) as f64 / (4.0 * t);
        if e > 700.0 {
            break;
        }
        s += 2.0 * (-e).exp();
    }
    s
}

/// `(x - 1 + e^{-x})/x`, accurate for small `x`.
fn psi1(x: f64) -> f64 {
    if x > 0.5 {
        (x - 1.0 + (-x).exp()) / x
    } else {
        // Σ_{n≥1} (-1)^{n+1} x^n/(n+1)!
        let mut term = x / 2.0;
        let mut acc = term;
        let mut n = 1.0;
        while term.abs() > 1e-19 * acc.abs().max(1e-300) {
            n += 1.0;
            term *= -x / (n + 1.0);
            acc += term;
        }
        acc
    }
}

/// Lazily grouped `(μ_k, multiplicity)` stream in nondecreasing order.
pub struct ModeSpectrum {
    cross: CrossSection,
    buffer: Vec<(f64, u64)>,
    pos: usize,
    cap: f64,
}

impl ModeSpectrum {
    pub fn new(cross: CrossSection) -> Self {
        ModeSpectrum {
            cross,
            buffer: vec![],
            pos: 0,
            cap: 0.0,
        }
    }

    pub fn cross_section(&self) -> &CrossSection {
        &self.cross
    }

    pub fn vol(&self) -> f64 {
        self.cross.vol()
    }

    pub fn tau(&self) -> f64 {
        self.cross.tau()
    }

    pub fn heat_trace(&self, t: f64) -> f64 {
        self.cross.heat_trace(t)
    }

    fn extend(&mut self) {
        self.cap = if self.cap == 0.0 {
            self.cross.mu1() * 8.0
        } else {
            self.cap * 4.0
        };
        self.buffer = grouped_modes(&self.cross, self.cap);
    }

    /// Eigenvalue counting function `N(μ)`.
    pub fn counting(&self, mu: f64) -> u64 {
        grouped_modes(&self.cross, mu).iter().map(|&(_, m)| m).sum()
    }
}

/// All `(μ, mult)` with `μ ≤ cap`, sorted, equal values grouped.
pub fn grouped_modes(cross: &CrossSection, cap: f64) -> Vec<(f64, u64)> {
    let mut mus: Vec<f64> = Vec::new();
    match *cross {
        CrossSection::Torus { l1, l2 } => {
            let k1 = 2.0 * PI / l1;
            let k2 = 2.0 * PI / l2;
            let n1max = (cap.max(0.0).sqrt() / k1).floor() as i64;
            for n1 in -n1max..=n1max {
                let mu1 = (k1 * n1 as f64).powi(2);
                if mu1 > cap {
                    continue;
                }
                let n2max = ((cap - mu1).sqrt() / k2).floor() as i64;
                for n2 in -n2max..=n2max {
                    mus.push(mu1 + (k2 * n2 as f64).powi(2));
                }
            }
        }
        CrossSection::Sphere { radius } => {
            let a2 = radius * radius;
            let mut k = 0u64;
            loop {
                let mu = (k * (k + 1)) as f64 / a2;
                if mu > cap {
                    break;
                }
                for _ in 0..(2 * k + 1) {
                    mus.push(mu);
                }
                k += 1;
            }
        }
    }
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<(f64, u64)> = Vec::new();
    for mu in mus {
        match out.last_mut() {
            Some((m, c)) if (mu - *m).abs() <= 1e-9 * mu.max(1.0) => *c += 1,
            _ => out.push((mu, 1)),
        }
    }
    out
}

impl Iterator for ModeSpectrum {
    type Item = (f64, u64);

    fn next(&mut self) -> Option<(f64, u64)> {
        // Only trust groups safely below the enumeration cap.
        while self.pos >= self.buffer.len()
            || self.buffer[self.pos].0 > 0.5 * self.cap && self.cap < 1e18
        {
            let pos_mu = self
                .buffer
                .get(self.pos)
                .map(|&(m, _)| m)
                .unwrap_or(f64::INFINITY);
            self.extend();
            self.pos = self.buffer.iter().take_while(|&&(m, _)| m < pos_mu).count();
        }
        let item = self.buffer[self.pos];
        self.pos += 1;
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_first_modes() {
        let spec = ModeSpectrum::new(CrossSection::Torus {
            l1: 2.0 * PI,
            l2: 2.0 * PI,
        });
        let first: Vec<(f64, u64)> = spec.take(3).collect();
        assert_eq!(first[0], (0.0, 1));
        assert_eq!(first[1], (1.0, 4));
        assert_eq!(first[2], (2.0, 4));
    }

    #[test]
    fn sphere_first_modes() {
        let spec = ModeSpectrum::new(CrossSection::Sphere { radius: 1.0 });
        let first: Vec<(f64, u64)> = spec.take(3).collect();
        assert_eq!(first[0], (0.0, 1));
        assert_eq!(first[1], (2.0, 3));
        assert_eq!(first[2], (6.0, 5));
    }

    #[test]
    fn torus_heat_trace_theta_oracle() {
        // Small-t law Tr ~ vol/4πt, checked at t = 0.01; and the Poisson vs
        // direct windows agree where both converge.
        let cross = CrossSection::Torus {
            l1: 2.0 * PI,
            l2: 2.0 * PI,
        };
        let t = 0.01;
        let h = cross.heat_trace(t);
        let lead = cross.vol() / (4.0 * PI * t);
        assert!((h - lead).abs() < 1e-6 * lead);
        // Brute-force oracle at moderate t.
        let t = 0.7;
        let brute = cross.mode_sum(45.0 / t, |mu| (-t * mu).exp());
        assert!((cross.heat_trace(t) - brute).abs() < 1e-12 * brute);
    }

    #[test]
    fn heat_remainder_consistency() {
        // h(t) must agree with the naive difference where the latter is
        // numerically safe.
        for cross in [
            CrossSection::Torus {
                l1: 2.0 * PI,
                l2: 2.0 * PI,
            },
            CrossSection::Sphere { radius: 1.0 },
        ] {
            for t in [0.3, 0.6, 0.9] {
                let naive =
                    cross.heat_trace(t) - cross.vol() / (4.0 * PI * t) - cross.heat_const();
                let h = cross.heat_remainder(t);
                assert!(
                    (h - naive).abs() < 1e-10 * naive.abs().max(1.0),
                    "t={t}: {h} vs {naive}"
                );
            }
        }
    }

    #[test]
    fn sphere_remainder_small_t_linear() {
        // h(t) ~ t/15 for the unit sphere.
        let cross = CrossSection::Sphere { radius: 1.0 };
        for t in [1e-3, 1e-4, 1e-5] {
            let h = cross.heat_remainder(t);
            assert!(
                (h - t / 15.0).abs() < 5e-2 * t,
                "t={t}: h={h}, t/15={}",
                t / 15.0
            );
        }
    }

    #[test]
    fn weyl_law() {
        for cross in [
            CrossSection::Torus {
                l1: 2.0 * PI,
                l2: 2.0 * PI,
            },
            CrossSection::Sphere { radius: 1.0 },
        ] {
            let spec = ModeSpectrum::new(cross);
            let cap = 4000.0;
            let n = spec.counting(cap) as f64;
            let weyl = cross.vol() * cap / (4.0 * PI);
            assert!((n / weyl - 1.0).abs() < 0.02, "N={n}, weyl={weyl}");
        }
    }

    #[test]
    fn mode_sum_matches_grouped() {
        let cross = CrossSection::Torus { l1: 5.0, l2: 3.0 };
        let cap = 200.0;
        let f = |mu: f64| (-0.1 * mu).exp();
        let s1 = cross.mode_sum(cap, f);
        let s2: f64 = grouped_modes(&cross, cap)
            .iter()
            .map(|&(mu, m)| m as f64 * f(mu))
            .sum();
        assert!((s1 - s2).abs() < 1e-12 * s2.abs());
    }
}
