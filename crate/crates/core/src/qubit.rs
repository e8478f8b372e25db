//! Exact 2×2 linear algebra for a single qubit.
//!
//! States are written on the computational basis `{|1⟩, |0⟩}` with `|1⟩` the
//! `+1` eigenvector of `σz`, so a [`StateVector`] `(a, b)` means `a|1⟩ + b|0⟩`.
//! Hamiltonians are carried as real Pauli coefficients and only turned into
//! dense matrices when needed.

// f64 math when std is not linked; shadowed by the inherent methods otherwise
#[allow(unused_imports)]
use num_traits::Float;

use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficients of `c0·I + cx·σx + cy·σy + cz·σz`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PauliCoeffs {
    pub c0: f64,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl PauliCoeffs {
    pub const ZERO: PauliCoeffs = PauliCoeffs::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(c0: f64, cx: f64, cy: f64, cz: f64) -> Self {
        Self { c0, cx, cy, cz }
    }

    /// Traceless part from a Cartesian vector.
    pub const fn from_vector(v: [f64; 3]) -> Self {
        Self::new(0.0, v[0], v[1], v[2])
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.cx, self.cy, self.cz]
    }

    /// Length of the traceless part; the eigenvalues are `c0 ± norm()`.
    pub fn norm(&self) -> f64 {
        norm3(self.vector())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.c0, s * self.cx, s * self.cy, s * self.cz)
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.cx.is_finite() && self.cy.is_finite() && self.cz.is_finite()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.c0 - other.c0)
            .abs()
            .max((self.cx - other.cx).abs())
            .max((self.cy - other.cy).abs())
            .max((self.cz - other.cz).abs())
    }
}

impl Add for PauliCoeffs {
    type Output = PauliCoeffs;
    fn add(self, o: Self) -> Self {
        Self::new(self.c0 + o.c0, self.cx + o.cx, self.cy + o.cy, self.cz + o.cz)
    }
}

impl Sub for PauliCoeffs {
    type Output = PauliCoeffs;
    fn sub(self, o: Self) -> Self {
        Self::new(self.c0 - o.c0, self.cx - o.cx, self.cy - o.cy, self.cz - o.cz)
    }
}

/// Dense 2×2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const SIGMA_X: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);
    pub const SIGMA_Y: Mat2 = Mat2([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]]);
    pub const SIGMA_Z: Mat2 = Mat2([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]);

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        let m = &self.0;
        Mat2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    pub fn apply(&self, s: &StateVector) -> StateVector {
        let m = &self.0;
        StateVector {
            a: m[0][0] * s.a + m[0][1] * s.b,
            b: m[1][0] * s.a + m[1][1] * s.b,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::IDENTITY).frobenius_norm()
    }

    /// Real Pauli coefficients of the Hermitian part of `self`.
    pub fn decompose(&self) -> PauliCoeffs {
        let m = &self.0;
        PauliCoeffs {
            c0: 0.5 * (m[0][0] + m[1][1]).re,
            cx: 0.5 * (m[0][1] + m[1][0]).re,
            cy: 0.5 * (I * (m[0][1] - m[1][0])).re,
            cz: 0.5 * (m[0][0] - m[1][1]).re,
        }
    }

    /// `|s⟩⟨t|`.
    pub fn outer(s: &StateVector, t: &StateVector) -> Mat2 {
        Mat2([
            [s.a * t.a.conj(), s.a * t.b.conj()],
            [s.b * t.a.conj(), s.b * t.b.conj()],
        ])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Pure qubit state `a|1⟩ + b|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub a: Complex64,
    pub b: Complex64,
}

impl StateVector {
    /// `|1⟩`, the `σz = +1` state.
    pub const UP: StateVector = StateVector { a: ONE, b: ZERO };
    /// `|0⟩`, the `σz = −1` state.
    pub const DOWN: StateVector = StateVector { a: ZERO, b: ONE };

    pub const fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn from_real(a: f64, b: f64) -> Self {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self::new(self.a / n, self.b / n)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.a.conj() * other.a + self.b.conj() * other.b
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(s * self.a, s * self.b)
    }

    pub fn sub(&self, other: &StateVector) -> Self {
        Self::new(self.a - other.a, self.b - other.b)
    }

    /// The orthogonal partner `−b̄|1⟩ + ā|0⟩`.
    ///
    /// For a real `cos(θ/2)|1⟩ + sin(θ/2)|0⟩` this is `−sin(θ/2)|1⟩ + cos(θ/2)|0⟩`.
    pub fn orthogonal(&self) -> Self {
        Self::new(-self.b.conj(), self.a.conj())
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if (n - 1.0).abs() > tol || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(())
    }

    /// Multiply by the unit phase that makes `⟨anchor|self⟩` real and nonnegative.
    ///
    /// Leaves the state unchanged if the overlap vanishes.
    pub fn align_phase(&self, anchor: &StateVector) -> Self {
        let ov = anchor.inner(self);
        let m = ov.norm();
        if m < 1e-300 {
            return *self;
        }
        self.scale(ov.conj() / m)
    }

    /// Unit-norm state with Bloch vector `n` and a real nonnegative amplitude on
    /// whichever basis state it overlaps most.
    pub fn from_bloch(n: BlochVector) -> Self {
        let BlochVector { x, y, z } = n;
        if z >= 0.0 {
            let s = (2.0 * (1.0 + z)).sqrt();
            Self::new(Complex64::new((1.0 + z) / s, 0.0), Complex64::new(x / s, y / s))
        } else {
            let s = (2.0 * (1.0 - z)).sqrt();
            Self::new(Complex64::new(x / s, -y / s), Complex64::new((1.0 - z) / s, 0.0))
        }
    }

    /// Bloch vector without the normalization check.
    pub fn bloch_unchecked(&self) -> BlochVector {
        let ab = self.a.conj() * self.b;
        BlochVector {
            x: 2.0 * ab.re,
            y: 2.0 * ab.im,
            z: self.a.norm_sqr() - self.b.norm_sqr(),
        }
    }
}

/// Point on (or inside) the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        norm3(self.as_array())
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &BlochVector) -> BlochVector {
        let c = cross3(self.as_array(), o.as_array());
        BlochVector::new(c[0], c[1], c[2])
    }

    /// Great-circle angle to `o`, accurate for nearly parallel vectors.
    pub fn angle_to(&self, o: &BlochVector) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }
}

/// `⟨s|σ⃗|s⟩`, rejecting states whose norm is off by more than `1e−8`.
pub fn bloch_of(s: &StateVector) -> Result<BlochVector> {
    s.check_normalized(1e-8)?;
    Ok(s.bloch_unchecked())
}

/// `c0·I + c⃗·σ⃗` as a dense matrix.
pub fn compose(c: &PauliCoeffs) -> Mat2 {
    let PauliCoeffs { c0, cx, cy, cz } = *c;
    Mat2([
        [Complex64::new(c0 + cz, 0.0), Complex64::new(cx, -cy)],
        [Complex64::new(cx, cy), Complex64::new(c0 - cz, 0.0)],
    ])
}

/// Spectral data of a nondegenerate qubit Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenFrame {
    pub e_plus: f64,
    pub e_minus: f64,
    pub v_plus: StateVector,
    pub v_minus: StateVector,
    pub gauge_anchor: StateVector,
}

impl EigenFrame {
    /// Half the spectral gap.
    pub fn half_gap(&self) -> f64 {
        0.5 * (self.e_plus - self.e_minus)
    }
}

/// Eigen-decomposition of `c0·I + c⃗·σ⃗`.
///
/// `v_plus` is phase-fixed so that `⟨anchor|v_plus⟩ ≥ 0` (anchor defaults to
/// `|1⟩`). `v_minus` is always `v_plus.orthogonal()`, which reproduces the
/// `|g⟩ = −sin(θ/2)|1⟩ + cos(θ/2)|0⟩` convention for real frames.
pub fn eig2(c: &PauliCoeffs, anchor: Option<&StateVector>) -> Result<EigenFrame> {
    let r = c.norm();
    if !(r > 1e-14 * c.c0.abs().max(1.0)) {
        return Err(Error::DegenerateHamiltonian { splitting: r });
    }
    let anchor = anchor.copied().unwrap_or(StateVector::UP);
    let n = BlochVector::new(c.cx / r, c.cy / r, c.cz / r);
    let mut v_plus = StateVector::from_bloch(n);
    if anchor.inner(&v_plus).norm() > 1e-12 {
        v_plus = v_plus.align_phase(&anchor);
    }
    Ok(EigenFrame {
        e_plus: c.c0 + r,
        e_minus: c.c0 - r,
        v_plus,
        v_minus: v_plus.orthogonal(),
        gauge_anchor: anchor,
    })
}

/// `exp(−i(c0·I + c⃗·σ⃗)·dt)` in closed form.
pub fn expi(c: &PauliCoeffs, dt: f64) -> Mat2 {
    let r = c.norm();
    let angle = r * dt;
    let (sin, cos) = angle.sin_cos();
    // sin(|c|dt)/|c|, finite as |c| → 0
    let s = if r > 0.0 { sin / r } else { dt };
    let phase = Complex64::from_polar(1.0, -c.c0 * dt);
    let u = Mat2([
        [Complex64::new(cos, -s * c.cz), Complex64::new(-s * c.cy, -s * c.cx)],
        [Complex64::new(s * c.cy, -s * c.cx), Complex64::new(cos, s * c.cz)],
    ]);
    u.scale(phase)
}

/// [`expi`] together with its partial derivatives with respect to `cx`, `cy`, `cz`.
pub fn expi_with_gradient(c: &PauliCoeffs, dt: f64) -> (Mat2, [Mat2; 3]) {
    let w = [c.cx * dt, c.cy * dt, c.cz * dt];
    let a = norm3(w);
    let (sin, cos) = a.sin_cos();
    // sinc(a) and (a cos a − sin a)/a³
    let (sinc, q) = if a < 1e-3 {
        let a2 = a * a;
        (1.0 - a2 / 6.0 + a2 * a2 / 120.0, -1.0 / 3.0 + a2 / 30.0)
    } else {
        (sin / a, (a * cos - sin) / (a * a * a))
    };
    let phase = Complex64::from_polar(1.0, -c.c0 * dt);
    let w_sigma = compose(&PauliCoeffs::from_vector(w));
    let u = (Mat2::IDENTITY.scale(cos.into()) - w_sigma.scale(Complex64::new(0.0, sinc))).scale(phase);
    let paulis = [Mat2::SIGMA_X, Mat2::SIGMA_Y, Mat2::SIGMA_Z];
    let grads = core::array::from_fn(|k| {
        let d = Mat2::IDENTITY.scale((-sinc * w[k]).into())
            - (w_sigma.scale((q * w[k]).into()) + paulis[k].scale(sinc.into())).scale(I);
        d.scale(phase * dt)
    });
    (u, grads)
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
