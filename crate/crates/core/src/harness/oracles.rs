//! Closed-form references used by the suites.

use crate::numerics::C64;

/// Arithmetic-geometric mean with the right choice of square root at each step.
pub fn agm(mut a: C64, mut b: C64) -> C64 {
    for _ in 0..100 {
        let an = (a + b) * 0.5;
        let mut bn = (a * b).sqrt();
        if (an - bn).norm() > (an + bn).norm() {
            bn = -bn;
        }
        a = an;
        b = bn;
        if (a - b).norm() < 1e-16 * a.norm() {
            break;
        }
    }
    a
}

/// Period ratio of `w² = Π(x − e_i)` up to `SL(2, Z)`, from the Legendre modulus `k² = λ`:
/// `τ = i M(1, k′)/M(1, k)`.
pub fn agm_tau(e0: C64, e1: C64, e2: C64, e3: C64) -> C64 {
    let lam = (e2 - e1) * (e3 - e0) / ((e2 - e0) * (e3 - e1));
    let one = C64::new(1.0, 0.0);
    C64::new(0.0, 1.0) * agm(one, (one - lam).sqrt()) / agm(one, lam.sqrt())
}

/// Representative in the standard fundamental domain.
pub fn fundamental(mut t: C64) -> C64 {
    for _ in 0..100 {
        t.re -= t.re.round();
        if t.norm() < 1.0 - 1e-14 {
            t = -t.inv();
        } else {
            break;
        }
    }
    t
}

/// Reduces `tau` to the fundamental domain and returns it with the image of `other` closest to
/// it, so points on the boundary identifications compare correctly.
pub fn nearest_image(tau: C64, other: C64) -> (C64, C64) {
    let a = fundamental(tau);
    let b = fundamental(other);
    let one = C64::new(1.0, 0.0);
    let s = -b.inv();
    let best = [b, b + one, b - one, s, s + one, s - one]
        .into_iter()
        .min_by(|x, y| (x - a).norm().total_cmp(&(y - a).norm()))
        .unwrap();
    (a, best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_lattice() {
        // e = 1, −1, i, −i: λ = 1/2, τ = i
        let t = agm_tau(C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0));
        assert!((fundamental(t) - C64::new(0.0, 1.0)).norm() < 1e-12, "{t}");
    }

    #[test]
    fn reduction_is_modular() {
        let t = C64::new(0.31, 1.17);
        for z in [t + 3.0, -t.inv(), -(t + 1.0).inv() + 2.0] {
            let (a, b) = nearest_image(z, t);
            assert!((a - b).norm() < 1e-12);
        }
    }
}
