use super::{secure_blend, Model};
use crate::{Mat, Point, State};

type S = State<1>;

#[derive(Clone, Debug, PartialEq)]
pub enum VelocityField {
    Constant(Point),
    /// Rigid rotation a(x) = ω (−(y − c_y), x − c_x).
    Rotation { center: Point, omega: f64 },
}

impl VelocityField {
    #[inline]
    pub fn at(&self, x: Point) -> Point {
        match *self {
            VelocityField::Constant(a) => a,
            VelocityField::Rotation { center, omega } => [-omega * (x[1] - center[1]), omega * (x[0] - center[0])],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarModel {
    /// f(u, x) = a(x) u.
    Linear(VelocityField),
    /// f(u) = (sin u, cos u).
    Kpp,
}

/// Scalar invariant domain [min, max].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarDomain {
    pub min: f64,
    pub max: f64,
}

impl ScalarModel {
    #[inline]
    fn speed(&self, u: f64, x: Point, n: Point) -> f64 {
        match self {
            ScalarModel::Linear(a) => {
                let a = a.at(x);
                a[0] * n[0] + a[1] * n[1]
            }
            ScalarModel::Kpp => u.cos() * n[0] - u.sin() * n[1],
        }
    }
}

impl Model<1> for ScalarModel {
    type Domain = ScalarDomain;
    const GROUPS: &'static [&'static [usize]] = &[&[0]];

    fn name(&self) -> &'static str {
        match self {
            ScalarModel::Linear(_) => "linear advection",
            ScalarModel::Kpp => "KPP",
        }
    }

    #[inline]
    fn flux(&self, u: &S, x: Point) -> [S; 2] {
        match self {
            ScalarModel::Linear(a) => {
                let a = a.at(x);
                [S::new(a[0] * u[0]), S::new(a[1] * u[0])]
            }
            ScalarModel::Kpp => [S::new(u[0].sin()), S::new(u[0].cos())],
        }
    }

    fn jacobian_n(&self, u: &S, x: Point, n: Point) -> Mat<1> {
        Mat::<1>::new(self.speed(u[0], x, n))
    }

    #[inline]
    fn wave_bound(&self, u: &S, x: Point, n: Point) -> f64 {
        match self {
            ScalarModel::Linear(_) => self.speed(u[0], x, n).abs(),
            ScalarModel::Kpp => (n[0] * n[0] + n[1] * n[1]).sqrt(),
        }
    }

    fn speed_scale(&self, _u: &S, x: Point) -> f64 {
        match self {
            ScalarModel::Linear(a) => {
                let a = a.at(x);
                (a[0] * a[0] + a[1] * a[1]).sqrt()
            }
            ScalarModel::Kpp => 1.0,
        }
    }

    fn eigen(&self, u: &S, x: Point, n: Point) -> (S, Mat<1>, Mat<1>) {
        (S::new(self.speed(u[0], x, n)), Mat::<1>::identity(), Mat::<1>::identity())
    }

    fn hyperbolic(&self, u: &S) -> bool {
        u[0].is_finite()
    }

    fn in_domain(&self, u: &S, d: &ScalarDomain) -> bool {
        u[0] >= d.min && u[0] <= d.max
    }

    fn max_blend(&self, base: &S, target: &S, d: &ScalarDomain) -> f64 {
        if !self.in_domain(base, d) {
            return 0.0;
        }
        if self.in_domain(target, d) {
            return 1.0;
        }
        let (b, t) = (base[0], target[0]);
        let eta = if t > d.max { (d.max - b) / (t - b) } else { (d.min - b) / (t - b) };
        secure_blend(self, base, target, d, eta)
    }

    fn mirror(&self, u: &S, _n: Point) -> S {
        *u
    }

    fn invariant_components(&self, u: &S, _n: Point) -> S {
        *u
    }

    fn lo_divergence(&self, u: &[S; 3], x: &[Point; 3], n: &[Point; 3]) -> S {
        let ub = (u[0][0] + u[1][0] + u[2][0]) / 3.0;
        let xb = [(x[0][0] + x[1][0] + x[2][0]) / 3.0, (x[0][1] + x[1][1] + x[2][1]) / 3.0];
        S::new(0.5 * (0..3).map(|j| self.speed(ub, xb, n[j]) * u[j][0]).sum::<f64>())
    }

    fn far_field_flux(&self, u: &S, ub: &S, x: Point, n: Point) -> S {
        match self {
            ScalarModel::Linear(_) => {
                let s = self.speed(u[0], x, n);
                S::new(s.max(0.0) * u[0] + s.min(0.0) * ub[0])
            }
            ScalarModel::Kpp => super::llf_flux(self, u, ub, x, n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{bisect_blend, llf_flux, sign_matrix, steger_warming_split};

    #[test]
    fn fluxes() {
        let kpp = ScalarModel::Kpp;
        let f = kpp.flux(&S::new(std::f64::consts::FRAC_PI_2), [0.0, 0.0]);
        assert!((f[0][0] - 1.0).abs() < 1e-15 && f[1][0].abs() < 1e-15);
        let lin = ScalarModel::Linear(VelocityField::Constant([-1.0, -1.0]));
        let f = lin.flux(&S::new(2.0), [3.0, 4.0]);
        assert_eq!((f[0][0], f[1][0]), (-2.0, -2.0));
        let rot = VelocityField::Rotation { center: [0.5, 0.5], omega: 2.0 };
        assert_eq!(rot.at([1.0, 0.5]), [0.0, 1.0]);
    }

    #[test]
    fn signs() {
        for (a, s) in [(0.7, 1.0), (-0.7, -1.0), (0.0, 0.0)] {
            let m = ScalarModel::Linear(VelocityField::Constant([a, 0.3]));
            assert_eq!(sign_matrix(&m, &S::new(1.0), [0.0, 0.0], [1.0, 0.0]).unwrap()[0], s);
        }
    }

    #[test]
    fn llf_examples() {
        let m = ScalarModel::Linear(VelocityField::Constant([1.0, 0.0]));
        let x = [0.0, 0.0];
        assert_eq!(llf_flux(&m, &S::new(1.0), &S::new(0.0), x, [1.0, 0.0])[0], 1.0);
        let k = ScalarModel::Kpp;
        for (u, v) in [(0.3, 2.0), (-1.0, 5.0)] {
            let n = [0.6, 0.8];
            let a = llf_flux(&k, &S::new(u), &S::new(v), x, n)[0];
            let b = llf_flux(&k, &S::new(v), &S::new(u), x, [-0.6, -0.8])[0];
            assert!((a + b).abs() < 1e-15);
            assert!((llf_flux(&k, &S::new(u), &S::new(u), x, n)[0] - k.flux_n(&S::new(u), x, n)[0]).abs() < 1e-15);
            // Lipschitz-type bound |llf(u, v) − f(u)·n| ≤ α|u − v|.
            assert!((a - k.flux_n(&S::new(u), x, n)[0]).abs() <= (v - u).abs() + 1e-15);
        }
        let (p, q) = steger_warming_split(&m, &S::new(2.0), x, [-1.0, 0.0]);
        assert_eq!((p[0], q[0]), (0.0, -2.0));
    }

    #[test]
    fn blend_clamp() {
        let m = ScalarModel::Kpp;
        let d = ScalarDomain { min: 0.0, max: 1.0 };
        assert_eq!(m.max_blend(&S::new(0.5), &S::new(0.7), &d), 1.0);
        let e = m.max_blend(&S::new(0.5), &S::new(1.5), &d);
        assert!((e - 0.5).abs() < 1e-15);
        assert!((e - bisect_blend(&m, &S::new(0.5), &S::new(1.5), &d, 80)).abs() < 1e-10);
        let e = m.max_blend(&S::new(0.2), &S::new(-0.6), &d);
        assert!((e - 0.25).abs() < 1e-15);
    }
}
