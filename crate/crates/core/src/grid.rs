//! Rectangular sample grids, trigonometric (DFT) representations and the
//! quadrature helpers shared by the deformation engines.
//!
//! Grids are periodic: `n` points with spacing (hi-lo)/n, the right endpoint
//! identified with the left. The deformation-algebra elements are compactly
//! supported inside the window, so the periodic identification is harmless
//! and buys exact trigonometric interpolation plus spectrally accurate
//! trapezoid integration.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::Cx;

pub const TAU: f64 = 2.0 * core::f64::consts::PI;

/// Uniform periodic 1-d grid on [lo, hi).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1 {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Grid1 {
    pub fn new(n: usize, lo: f64, hi: f64) -> Self {
        assert!(n >= 4 && hi > lo);
        Grid1 { n, lo, hi }
    }
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
    pub fn step(&self) -> f64 {
        self.len() / self.n as f64
    }
    pub fn point(&self, i: usize) -> f64 {
        self.lo + self.step() * i as f64
    }
    /// Signed frequency of mode k (index 0..n mapped to -n/2..n/2).
    pub fn freq(&self, k: usize) -> f64 {
        let ks = if k <= self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        };
        TAU * ks as f64 / self.len()
    }
}

/// Uniform periodic 2-d grid; index (i, j) -> i * y.n + j. The first axis is
/// the transversal-type coordinate, the second the leaf coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2 {
    pub x: Grid1,
    pub y: Grid1,
}

impl Grid2 {
    pub fn new(x: Grid1, y: Grid1) -> Self {
        Grid2 { x, y }
    }
    pub fn square(n: usize, lo: f64, hi: f64) -> Self {
        Grid2::new(Grid1::new(n, lo, hi), Grid1::new(n, lo, hi))
    }
    pub fn count(&self) -> usize {
        self.x.n * self.y.n
    }
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.y.n + j
    }
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x.point(i), self.y.point(j))
    }
    pub fn cell_area(&self) -> f64 {
        self.x.step() * self.y.step()
    }
}

/// Complex function samples on a `Grid2`.
#[derive(Clone, Debug)]
pub struct SampledFn {
    pub grid: Grid2,
    pub vals: Vec<Cx>,
}

impl SampledFn {
    pub fn zeros(grid: Grid2) -> Self {
        SampledFn {
            grid,
            vals: vec![Cx::new(0.0, 0.0); grid.count()],
        }
    }

    pub fn sample(grid: Grid2, f: impl Fn(f64, f64) -> Cx) -> Self {
        let mut vals = Vec::with_capacity(grid.count());
        for i in 0..grid.x.n {
            for j in 0..grid.y.n {
                let (x, y) = grid.point(i, j);
                vals.push(f(x, y));
            }
        }
        SampledFn { grid, vals }
    }

    pub fn at(&self, i: usize, j: usize) -> Cx {
        self.vals[self.grid.idx(i, j)]
    }

    pub fn sup_norm(&self) -> f64 {
        let mut m = 0.0;
        for v in &self.vals {
            m = math::fmax(m, v.norm());
        }
        m
    }

    pub fn sup_diff(&self, o: &SampledFn) -> f64 {
        assert_eq!(self.grid, o.grid);
        let mut m = 0.0;
        for (a, b) in self.vals.iter().zip(&o.vals) {
            m = math::fmax(m, (a - b).norm());
        }
        m
    }

    /// Periodic trapezoid integral (spectral accuracy on smooth data).
    pub fn integral(&self) -> Cx {
        let mut s = Cx::new(0.0, 0.0);
        for v in &self.vals {
            s += v;
        }
        s * self.grid.cell_area()
    }

    pub fn combine(&self, o: &SampledFn, f: impl Fn(Cx, Cx) -> Cx) -> SampledFn {
        assert_eq!(self.grid, o.grid);
        SampledFn {
            grid: self.grid,
            vals: self
                .vals
                .iter()
                .zip(&o.vals)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Cx) -> Cx) -> SampledFn {
        SampledFn {
            grid: self.grid,
            vals: self.vals.iter().map(|v| f(*v)).collect(),
        }
    }

    /// Pointwise product (the commutative product of the algebra).
    pub fn pointwise_mul(&self, o: &SampledFn) -> SampledFn {
        self.combine(o, |a, b| a * b)
    }

    /// Value at the boundary ring, for support diagnostics.
    pub fn boundary_max(&self) -> f64 {
        let (nx, ny) = (self.grid.x.n, self.grid.y.n);
        let mut m = 0.0;
        for i in 0..nx {
            m = math::fmax(m, self.at(i, 0).norm());
        }
        for j in 0..ny {
            m = math::fmax(m, self.at(0, j).norm());
        }
        m
    }
}

fn cis(t: f64) -> Cx {
    Cx::new(math::cos(t), math::sin(t))
}

/// 2-d discrete Fourier coefficients of a sampled function:
/// u(x,y) = sum_{k,l} coef[k,l] exp(i(w_k x + w_l y)), exact on the samples.
#[derive(Clone, Debug)]
pub struct Dft2 {
    pub grid: Grid2,
    /// Row-major (k over x-modes, l over y-modes).
    pub coef: Vec<Cx>,
}

impl Dft2 {
    pub fn new(f: &SampledFn) -> Self {
        let g = f.grid;
        let (nx, ny) = (g.x.n, g.y.n);
        // transform along y then x (direct sums; grids are small)
        let mut half = vec![Cx::new(0.0, 0.0); nx * ny];
        for i in 0..nx {
            for l in 0..ny {
                let wl = g.y.freq(l);
                let mut s = Cx::new(0.0, 0.0);
                for j in 0..ny {
                    s += f.at(i, j) * cis(-wl * g.y.point(j));
                }
                half[i * ny + l] = s / ny as f64;
            }
        }
        let mut coef = vec![Cx::new(0.0, 0.0); nx * ny];
        for l in 0..ny {
            for k in 0..nx {
                let wk = g.x.freq(k);
                let mut s = Cx::new(0.0, 0.0);
                for i in 0..nx {
                    s += half[i * ny + l] * cis(-wk * g.x.point(i));
                }
                coef[k * ny + l] = s / nx as f64;
            }
        }
        Dft2 { grid: g, coef }
    }

    pub fn eval(&self, x: f64, y: f64) -> Cx {
        let g = self.grid;
        let mut s = Cx::new(0.0, 0.0);
        for k in 0..g.x.n {
            let ex = cis(g.x.freq(k) * x);
            let mut row = Cx::new(0.0, 0.0);
            for l in 0..g.y.n {
                row += self.coef[k * g.y.n + l] * cis(g.y.freq(l) * y);
            }
            s += ex * row;
        }
        s
    }

    /// Exact integral of the interpolant against e^{i omega y} over the
    /// window in y, leaving the x-modes uncontracted:
    /// returns t[k] with  int u(x,y) e^{i omega y} dy = sum_k t[k] e^{i w_k x}.
    pub fn ft_y(&self, omega: f64) -> Vec<Cx> {
        let g = self.grid;
        let mut t = vec![Cx::new(0.0, 0.0); g.x.n];
        let mut es = Vec::with_capacity(g.y.n);
        for l in 0..g.y.n {
            es.push(e_integral(omega + g.y.freq(l), g.y.lo, g.y.hi));
        }
        for k in 0..g.x.n {
            let mut s = Cx::new(0.0, 0.0);
            for l in 0..g.y.n {
                s += self.coef[k * g.y.n + l] * es[l];
            }
            t[k] = s;
        }
        t
    }

    /// Contract an `ft_y` table at abscissa x.
    pub fn eval_modes_x(&self, t: &[Cx], x: f64) -> Cx {
        let g = self.grid;
        let mut s = Cx::new(0.0, 0.0);
        for (k, tk) in t.iter().enumerate() {
            s += *tk * cis(g.x.freq(k) * x);
        }
        s
    }
}

/// Closed form of int_{lo}^{hi} e^{i nu x} dx.
pub fn e_integral(nu: f64, lo: f64, hi: f64) -> Cx {
    if math::abs(nu) < 1e-12 {
        // series: length + i nu (hi^2-lo^2)/2 + O(nu^2), enough at this scale
        let mid = 0.5 * (hi + lo);
        let len = hi - lo;
        return Cx::new(len, nu * mid * len);
    }
    (cis(nu * hi) - cis(nu * lo)) / Cx::new(0.0, nu)
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence. Deterministic; orders up to ~32 are plenty here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && n <= 64);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if math::abs(dx) < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n == 1 {
        nodes[0] = 0.0;
        weights[0] = 2.0;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre nodes/weights over [lo, hi] with `cells` cells of
/// `order` points each.
pub fn composite_gl(lo: f64, hi: f64, cells: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(order);
    let h = (hi - lo) / cells as f64;
    let mut nodes = Vec::with_capacity(cells * order);
    let mut weights = Vec::with_capacity(cells * order);
    for c in 0..cells {
        let a = lo + h * c as f64;
        let mid = a + 0.5 * h;
        for q in 0..order {
            nodes.push(mid + 0.5 * h * xs[q]);
            weights.push(0.5 * h * ws[q]);
        }
    }
    (nodes, weights)
}
