use std::f64::consts::PI;

use crate::specfun::gamma_f64;

use super::KernelSpec;

/// A kernel evaluation reduced to unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub unit: KernelSpec,
    pub r: f64,
    pub prefactor: f64,
}

/// `K_t(r) = t^{-(d+β)/α} K_1(t^{-1/α} r)`.
pub fn scaling_reduce(spec: &KernelSpec, r: f64) -> Scaled {
    if spec.t == 1.0 {
        return Scaled {
            unit: *spec,
            r,
            prefactor: 1.0,
        };
    }
    let inv = 1.0 / spec.alpha;
    Scaled {
        unit: KernelSpec { t: 1.0, ..*spec },
        r: spec.t.powf(-inv) * r,
        prefactor: spec.t.powf(-(spec.df() + spec.beta) * inv),
    }
}

/// `(4πt)^{-d/2} e^{-r²/4t}`.
pub fn gaussian_kernel(d: u32, t: f64, r: f64) -> f64 {
    (4.0 * PI * t).powf(-0.5 * d as f64) * (-r * r / (4.0 * t)).exp()
}

/// `Γ((d+1)/2) π^{-(d+1)/2} t (t² + r²)^{-(d+1)/2}`.
pub fn poisson_kernel(d: u32, t: f64, r: f64) -> f64 {
    let h = 0.5 * (d as f64 + 1.0);
    let g = gamma_f64(h).expect("(d+1)/2 is positive");
    // factor t² out so r ≫ t does not lose the t² term
    let big = t.max(r);
    let ratio = t.min(r) / big;
    let base = big * big * (1.0 + ratio * ratio);
    g * PI.powf(-h) * t * base.powf(-h)
}

/// `(2π)^{-d} ω_{d-1} Γ((d+β)/α) / α · t^{-(d+β)/α}`, `ω_{d-1} = 2π^{d/2}/Γ(d/2)`.
pub fn kernel_at_origin(spec: &KernelSpec) -> f64 {
    let d = spec.df();
    let sphere = 2.0 * PI.powf(0.5 * d) / gamma_f64(0.5 * d).expect("d/2 > 0");
    let expo = (d + spec.beta) / spec.alpha;
    (2.0 * PI).powf(-d) * sphere * gamma_f64(expo).expect("positive argument") / spec.alpha * spec.t.powf(-expo)
}
