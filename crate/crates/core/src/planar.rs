//! Lattice point scans in axis-parallel rectangles of the plane.
//!
//! A grid `origin + ℤb₁ + ℤb₂` is swept row by row along whichever basis
//! vector gives fewer rows; each row meets a convex region in an integer
//! interval, so counts and extreme points cost O(1) per row.

pub type Vec2 = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    /// Open interior test.
    pub fn contains(&self, p: Vec2) -> bool {
        p[0] > self.x0 && p[0] < self.x1 && p[1] > self.y0 && p[1] < self.y1
    }

    fn corners(&self) -> [Vec2; 4] {
        [
            [self.x0, self.y0],
            [self.x1, self.y0],
            [self.x0, self.y1],
            [self.x1, self.y1],
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarGrid {
    pub b1: Vec2,
    pub b2: Vec2,
    pub origin: Vec2,
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Lagrange–Gauss reduction; the result spans the same lattice with
/// |b₁| ≤ |b₂| and |b₁·b₂| ≤ |b₁|²/2.
pub fn gauss_reduce(mut b1: Vec2, mut b2: Vec2) -> (Vec2, Vec2) {
    if dot(b1, b1) > dot(b2, b2) {
        std::mem::swap(&mut b1, &mut b2);
    }
    for _ in 0..200 {
        let mu = (dot(b1, b2) / dot(b1, b1)).round();
        b2 = [b2[0] - mu * b1[0], b2[1] - mu * b1[1]];
        if dot(b2, b2) >= dot(b1, b1) {
            break;
        }
        std::mem::swap(&mut b1, &mut b2);
    }
    (b1, b2)
}

impl PlanarGrid {
    pub fn new(b1: Vec2, b2: Vec2, origin: Vec2) -> Self {
        let (b1, b2) = gauss_reduce(b1, b2);
        PlanarGrid { b1, b2, origin }
    }

    pub fn point(&self, m1: f64, m2: f64) -> Vec2 {
        [
            self.origin[0] + m1 * self.b1[0] + m2 * self.b2[0],
            self.origin[1] + m1 * self.b1[1] + m2 * self.b2[1],
        ]
    }

    /// Rotation by the angle whose cosine and sine are given, then translation.
    pub fn rotated_shifted(&self, cos: f64, sin: f64, shift: Vec2) -> Self {
        let rot = |v: Vec2| [cos * v[0] - sin * v[1], sin * v[0] + cos * v[1]];
        let o = rot(self.origin);
        PlanarGrid {
            b1: rot(self.b1),
            b2: rot(self.b2),
            origin: [o[0] + shift[0], o[1] + shift[1]],
        }
    }

    /// Visits each row (step vector, row base point, integer range of steps)
    /// that meets the open rectangle.
    fn rows<F: FnMut(Vec2, Vec2, i64, i64)>(&self, r: &Rect, mut f: F) {
        let det = cross(self.b1, self.b2);
        if det == 0.0 || !(r.x1 > r.x0 && r.y1 > r.y0) {
            return;
        }
        let span = |step: Vec2| {
            let ks = r.corners().map(|c| {
                cross(step, [c[0] - self.origin[0], c[1] - self.origin[1]])
            });
            let lo = ks.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        };
        // Along b1 the row index is cross(b1, p − o)/det; along b2 it is cross(b2, p − o)/(−det).
        let (lo1, hi1) = span(self.b1);
        let (lo2, hi2) = span(self.b2);
        let (step, across, lo, hi, scale) = if (hi1 - lo1) <= (hi2 - lo2) {
            (self.b1, self.b2, lo1, hi1, det)
        } else {
            (self.b2, self.b1, lo2, hi2, -det)
        };
        let (kmin, kmax) = if scale > 0.0 {
            (lo / scale, hi / scale)
        } else {
            (hi / scale, lo / scale)
        };
        let k_lo = kmin.floor() as i64;
        let k_hi = kmax.ceil() as i64;
        for k in k_lo..=k_hi {
            let base = [
                self.origin[0] + k as f64 * across[0],
                self.origin[1] + k as f64 * across[1],
            ];
            let mut s_lo = f64::NEG_INFINITY;
            let mut s_hi = f64::INFINITY;
            let mut empty = false;
            for (axis, (a0, a1)) in [(0usize, (r.x0, r.x1)), (1usize, (r.y0, r.y1))] {
                let d = step[axis];
                if d == 0.0 {
                    if !(base[axis] > a0 && base[axis] < a1) {
                        empty = true;
                    }
                } else {
                    let (t0, t1) = ((a0 - base[axis]) / d, (a1 - base[axis]) / d);
                    s_lo = s_lo.max(t0.min(t1));
                    s_hi = s_hi.min(t0.max(t1));
                }
            }
            if empty || s_lo > s_hi + 1.0 {
                continue;
            }
            let at = |s: i64| [base[0] + s as f64 * step[0], base[1] + s as f64 * step[1]];
            let mut a = s_lo.floor() as i64;
            let mut b = s_hi.ceil() as i64;
            while a <= b && !r.contains(at(a)) {
                a += 1;
            }
            while b >= a && !r.contains(at(b)) {
                b -= 1;
            }
            if a <= b {
                f(step, base, a, b);
            }
        }
    }

    pub fn count_in_rect(&self, r: &Rect) -> u64 {
        let mut n = 0u64;
        self.rows(r, |_, _, a, b| n += (b - a + 1) as u64);
        n
    }

    pub fn for_each_in_rect<F: FnMut(Vec2)>(&self, r: &Rect, mut f: F) {
        self.rows(r, |step, base, a, b| {
            for s in a..=b {
                f([base[0] + s as f64 * step[0], base[1] + s as f64 * step[1]]);
            }
        });
    }

    /// Point of least first coordinate in the open rectangle.
    pub fn min_x_in_rect(&self, r: &Rect) -> Option<Vec2> {
        let mut best: Option<Vec2> = None;
        self.rows(r, |step, base, a, b| {
            let s = if step[0] >= 0.0 { a } else { b };
            let p = [base[0] + s as f64 * step[0], base[1] + s as f64 * step[1]];
            if best.map_or(true, |q| p[0] < q[0]) {
                best = Some(p);
            }
        });
        best
    }
}
