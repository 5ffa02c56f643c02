use super::{secure_blend, Model};
use crate::{Mat, Point, State};

type S = State<4>;

/// Compressible Euler equations for an ideal gas, conserved variables
/// (ρ, ρu, ρv, E).
#[derive(Clone, Debug, PartialEq)]
pub struct Euler {
    pub gamma: f64,
}

/// Positivity floors for density and pressure plus a common ceiling.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerDomain {
    pub rho_min: f64,
    pub p_min: f64,
    pub upper: f64,
}

impl Default for EulerDomain {
    fn default() -> Self {
        EulerDomain { rho_min: 1e-10, p_min: 1e-10, upper: 1e10 }
    }
}

impl Default for Euler {
    fn default() -> Self {
        Euler { gamma: 1.4 }
    }
}

impl Euler {
    pub fn new(gamma: f64) -> Self {
        Euler { gamma }
    }

    pub fn conserved(&self, rho: f64, u: f64, v: f64, p: f64) -> S {
        S::new(rho, rho * u, rho * v, p / (self.gamma - 1.0) + 0.5 * rho * (u * u + v * v))
    }

    /// (ρ, u, v, p).
    pub fn primitive(&self, w: &S) -> [f64; 4] {
        let u = w[1] / w[0];
        let v = w[2] / w[0];
        [w[0], u, v, self.pressure(w)]
    }

    #[inline]
    pub fn pressure(&self, w: &S) -> f64 {
        (self.gamma - 1.0) * (w[3] - 0.5 * (w[1] * w[1] + w[2] * w[2]) / w[0])
    }

    pub fn sound_speed(&self, w: &S) -> f64 {
        (self.gamma * self.pressure(w) / w[0]).sqrt()
    }
}

impl Model<4> for Euler {
    type Domain = EulerDomain;
    const GROUPS: &'static [&'static [usize]] = &[&[0], &[1, 2], &[3]];

    const REPORT_NAMES: [&'static str; 2] = ["rho", "p"];

    fn name(&self) -> &'static str {
        "Euler"
    }

    fn report_fields(&self, w: &S) -> [f64; 2] {
        [w[0], self.pressure(w)]
    }

    #[inline]
    fn flux(&self, w: &S, _x: Point) -> [S; 2] {
        let u = w[1] / w[0];
        let v = w[2] / w[0];
        let p = self.pressure(w);
        [
            S::new(w[1], w[1] * u + p, w[2] * u, (w[3] + p) * u),
            S::new(w[2], w[1] * v, w[2] * v + p, (w[3] + p) * v),
        ]
    }

    #[inline]
    fn flux_n(&self, w: &S, _x: Point, n: Point) -> S {
        let u = w[1] / w[0];
        let v = w[2] / w[0];
        let p = self.pressure(w);
        let vn = u * n[0] + v * n[1];
        S::new(w[0] * vn, w[1] * vn + p * n[0], w[2] * vn + p * n[1], (w[3] + p) * vn)
    }

    fn jacobian_n(&self, w: &S, _x: Point, n: Point) -> Mat<4> {
        let g = self.gamma;
        let b = g - 1.0;
        let (u, v) = (w[1] / w[0], w[2] / w[0]);
        let q2 = u * u + v * v;
        let h = (w[3] + self.pressure(w)) / w[0];
        let vn = u * n[0] + v * n[1];
        let (nx, ny) = (n[0], n[1]);
        Mat::<4>::new(
            0.0,
            nx,
            ny,
            0.0,
            0.5 * b * q2 * nx - u * vn,
            vn + u * nx - b * u * nx,
            u * ny - b * v * nx,
            b * nx,
            0.5 * b * q2 * ny - v * vn,
            v * nx - b * u * ny,
            vn + v * ny - b * v * ny,
            b * ny,
            (0.5 * b * q2 - h) * vn,
            h * nx - b * u * vn,
            h * ny - b * v * vn,
            g * vn,
        )
    }

    #[inline]
    fn wave_bound(&self, w: &S, _x: Point, n: Point) -> f64 {
        let vn = (w[1] * n[0] + w[2] * n[1]) / w[0];
        vn.abs() + self.sound_speed(w) * (n[0] * n[0] + n[1] * n[1]).sqrt()
    }

    fn speed_scale(&self, w: &S, _x: Point) -> f64 {
        (w[1] * w[1] + w[2] * w[2]).sqrt() / w[0] + self.sound_speed(w)
    }

    fn eigen(&self, w: &S, _x: Point, n: Point) -> (S, Mat<4>, Mat<4>) {
        let b = self.gamma - 1.0;
        let (u, v) = (w[1] / w[0], w[2] / w[0]);
        let q2 = u * u + v * v;
        let c = self.sound_speed(w);
        let h = (w[3] + self.pressure(w)) / w[0];
        let (nx, ny) = (n[0], n[1]);
        let (tx, ty) = (-ny, nx);
        let vn = u * nx + v * ny;
        let vt = u * tx + v * ty;
        let c2 = c * c;
        #[rustfmt::skip]
        let r = Mat::<4>::new(
            1.0,             1.0,            0.0, 1.0,
            u - c * nx,      u,              tx,  u + c * nx,
            v - c * ny,      v,              ty,  v + c * ny,
            h - c * vn,      0.5 * q2,       vt,  h + c * vn,
        );
        let k = 0.5 * b * q2;
        #[rustfmt::skip]
        let l = Mat::<4>::new(
            (k + c * vn) / (2.0 * c2), -(b * u + c * nx) / (2.0 * c2), -(b * v + c * ny) / (2.0 * c2), b / (2.0 * c2),
            1.0 - k / c2,              b * u / c2,                     b * v / c2,                     -b / c2,
            -vt,                       tx,                             ty,                             0.0,
            (k - c * vn) / (2.0 * c2), -(b * u - c * nx) / (2.0 * c2), -(b * v - c * ny) / (2.0 * c2), b / (2.0 * c2),
        );
        (S::new(vn - c, vn, vn, vn + c), r, l)
    }

    fn hyperbolic(&self, w: &S) -> bool {
        w[0] > 0.0 && self.pressure(w) > 0.0 && w.iter().all(|x| x.is_finite())
    }

    fn in_domain(&self, w: &S, d: &EulerDomain) -> bool {
        let rho = w[0];
        if !(rho > 0.0 && rho >= d.rho_min && rho <= d.upper) {
            return false;
        }
        let rho_e = w[3] - 0.5 * (w[1] * w[1] + w[2] * w[2]) / rho;
        let p = (self.gamma - 1.0) * rho_e;
        rho_e > 0.0 && p >= d.p_min && p <= d.upper
    }

    fn max_blend(&self, base: &S, target: &S, d: &EulerDomain) -> f64 {
        if !self.in_domain(base, d) {
            return 0.0;
        }
        if self.in_domain(target, d) {
            return 1.0;
        }
        let dw = target - base;
        let mut eta: f64 = 1.0;
        if dw[0] < 0.0 {
            eta = eta.min((base[0] - d.rho_min) / -dw[0]);
        } else if dw[0] > 0.0 {
            eta = eta.min((d.upper - base[0]) / dw[0]);
        }
        // ρ(ρe − c) along the segment is a quadratic in η.
        let c = d.p_min / (self.gamma - 1.0);
        let qa = dw[0] * dw[3] - 0.5 * (dw[1] * dw[1] + dw[2] * dw[2]);
        let qb = base[0] * dw[3] + base[3] * dw[0] - base[1] * dw[1] - base[2] * dw[2] - c * dw[0];
        let qc = base[0] * base[3] - 0.5 * (base[1] * base[1] + base[2] * base[2]) - c * base[0];
        let q = |e: f64| (qa * e + qb) * e + qc;
        if q(eta) < 0.0 {
            let root = if qa.abs() <= 1e-14 * (qb.abs() + qc.abs()) {
                -qc / qb
            } else {
                let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
                let s = -0.5 * (qb + qb.signum() * disc.sqrt());
                let (r1, r2) = (s / qa, if s != 0.0 { qc / s } else { 0.0 });
                [r1, r2].into_iter().filter(|r| *r >= 0.0 && *r <= eta).fold(f64::INFINITY, f64::min)
            };
            eta = if root.is_finite() { root.clamp(0.0, eta) } else { 0.0 };
        }
        secure_blend(self, base, target, d, eta)
    }

    fn mirror(&self, w: &S, n: Point) -> S {
        let mn = w[1] * n[0] + w[2] * n[1];
        S::new(w[0], w[1] - 2.0 * mn * n[0], w[2] - 2.0 * mn * n[1], w[3])
    }

    fn invariant_components(&self, w: &S, n: Point) -> S {
        S::new(w[0], w[1] * n[0] + w[2] * n[1], -w[1] * n[1] + w[2] * n[0], w[3])
    }

    fn lo_divergence(&self, u: &[S; 3], x: &[Point; 3], n: &[Point; 3]) -> S {
        (self.flux_n(&u[0], x[0], n[0]) + self.flux_n(&u[1], x[1], n[1]) + self.flux_n(&u[2], x[2], n[2])) * 0.5
    }
}
