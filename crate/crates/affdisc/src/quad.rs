//! Quadrature and scalar root finding shared by the geometric and spectral code.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208067536200,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// 21-point Gauss-Kronrod rule on `[a, b]`, returning `(kronrod, |kronrod - gauss|)`.
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[10] * fc;
    let mut g = 0.0;
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn gk21_vec<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    buf: &mut [f64],
) -> (Vec<f64>, Vec<f64>) {
    let dim = buf.len();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    f(c, buf);
    for d in 0..dim {
        k[d] += WGK[10] * buf[d];
    }
    for i in 0..10 {
        let dx = h * XGK[i];
        for x in [c - dx, c + dx] {
            f(x, buf);
            for d in 0..dim {
                k[d] += WGK[i] * buf[d];
                if i % 2 == 1 {
                    g[d] += WG[i / 2] * buf[d];
                }
            }
        }
    }
    let err = k.iter().zip(&g).map(|(k, g)| ((k - g) * h).abs()).collect();
    for v in k.iter_mut() {
        *v *= h;
    }
    (k, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn split_points(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    pts.extend(inner);
    pts.push(b);
    pts
}

/// Globally adaptive Gauss-Kronrod integration over `[a, b]` split first at `breaks`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol * |value|)`
/// or after `max_segments` bisections.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> QuadResult {
    if b <= a {
        return QuadResult { value: 0.0, error: 0.0, converged: true };
    }
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    for w in split_points(a, b, breaks).windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk21(&mut f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Segment { a: w[0], b: w[1], value: v, error: e });
    }
    let mut n = heap.len();
    while err > abs_tol.max(rel_tol * total.abs()) {
        if n >= max_segments {
            return QuadResult { value: total, error: err, converged: false };
        }
        let s = heap.pop().expect("non-empty heap");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            return QuadResult { value: total, error: err, converged: false };
        }
        let (v1, e1) = gk21(&mut f, s.a, m);
        let (v2, e2) = gk21(&mut f, m, s.b);
        total += v1 + v2 - s.value;
        err += e1 + e2 - s.error;
        heap.push(Segment { a: s.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: s.b, value: v2, error: e2 });
        n += 1;
    }
    QuadResult { value: total, error: err.max(0.0), converged: true }
}

struct VecSegment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    key: f64,
}

impl PartialEq for VecSegment {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for VecSegment {}
impl PartialOrd for VecSegment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for VecSegment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

/// Outcome of [`integrate_vec`].
#[derive(Debug, Clone, PartialEq)]
pub struct VecQuadResult {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub converged: bool,
}

/// Vector-valued variant of [`integrate`]: `f(x, out)` fills `dim` components.
/// Converged when every component's summed error is below `rel_tol` times its
/// magnitude (or `abs_floor`).
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    dim: usize,
    rel_tol: f64,
    abs_floor: f64,
    max_segments: usize,
) -> VecQuadResult {
    if b <= a || dim == 0 {
        return VecQuadResult { value: vec![0.0; dim], error: vec![0.0; dim], converged: true };
    }
    let mut buf = vec![0.0; dim];
    let mut raw = Vec::new();
    for w in split_points(a, b, breaks).windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk21_vec(&mut f, w[0], w[1], &mut buf);
            raw.push((w[0], w[1], v, e));
        }
    }
    let mut total = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    for s in &raw {
        for d in 0..dim {
            total[d] += s.2[d];
            err[d] += s.3[d];
        }
    }
    let tol = |total: &[f64]| -> Vec<f64> { total.iter().map(|v| (rel_tol * v.abs()).max(abs_floor)).collect() };
    let mut t = tol(&total);
    let key = |e: &[f64], t: &[f64]| e.iter().zip(t).map(|(e, t)| e / t).fold(0.0, f64::max);
    let mut heap: BinaryHeap<VecSegment> = raw
        .into_iter()
        .map(|(a, b, value, error)| {
            let k = key(&error, &t);
            VecSegment { a, b, value, error, key: k }
        })
        .collect();
    let mut n = heap.len();
    let mut converged = true;
    while err.iter().zip(&t).any(|(e, t)| e > t) {
        if n >= max_segments {
            converged = false;
            break;
        }
        let s = heap.pop().expect("non-empty heap");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            converged = false;
            break;
        }
        for d in 0..dim {
            total[d] -= s.value[d];
            err[d] -= s.error[d];
        }
        for (lo, hi) in [(s.a, m), (m, s.b)] {
            let (v, e) = gk21_vec(&mut f, lo, hi, &mut buf);
            for d in 0..dim {
                total[d] += v[d];
                err[d] += e[d];
            }
            let k = key(&e, &t);
            heap.push(VecSegment { a: lo, b: hi, value: v, error: e, key: k });
        }
        n += 1;
        if n % 64 == 0 {
            t = tol(&total);
            let segs: Vec<VecSegment> = heap.drain().collect();
            heap = segs
                .into_iter()
                .map(|mut s| {
                    s.key = key(&s.error, &t);
                    s
                })
                .collect();
        }
    }
    // re-sum in a fixed order for reproducibility
    let mut segs: Vec<VecSegment> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = vec![0.0; dim];
    let mut error = vec![0.0; dim];
    for s in &segs {
        for d in 0..dim {
            value[d] += s.value[d];
            error[d] += s.error[d];
        }
    }
    VecQuadResult { value, error, converged }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Brent's method on a bracket with `f(a)` and `f(b)` of opposite sign (or zero).
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Some(b)
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
