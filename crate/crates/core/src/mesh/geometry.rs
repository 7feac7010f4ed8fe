//! Small fixed-size vector helpers, simplicial decompositions and
//! quadrature on simplices.
//!
//! Points live in `[f64; 3]` regardless of the mesh dimension; unused
//! trailing coordinates are zero.

/// A point (or vector) in up to three dimensions.
pub type Point = [f64; 3];

pub const ORIGIN: Point = [0.0; 3];

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(s: f64, a: &Point) -> Point {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn distance(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

pub fn average(points: &[Point]) -> Point {
    let mut c = ORIGIN;
    for p in points {
        c = add(&c, p);
    }
    scale(1.0 / points.len() as f64, &c)
}

/// A `k`-simplex given by its `k + 1` vertices, `k` = `vertices.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<Point>,
}

impl Simplex {
    pub fn new(vertices: Vec<Point>) -> Self {
        Self { vertices }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Unsigned k-dimensional measure.
    pub fn measure(&self) -> f64 {
        let v = &self.vertices;
        match self.dim() {
            0 => 1.0,
            1 => distance(&v[0], &v[1]),
            2 => 0.5 * norm(&cross(&sub(&v[1], &v[0]), &sub(&v[2], &v[0]))),
            3 => {
                let a = sub(&v[1], &v[0]);
                let b = sub(&v[2], &v[0]);
                let c = sub(&v[3], &v[0]);
                dot(&a, &cross(&b, &c)).abs() / 6.0
            }
            k => panic!("simplex of dimension {k} not supported"),
        }
    }

    pub fn centroid(&self) -> Point {
        average(&self.vertices)
    }

    /// Maps reference (barycentric-free) coordinates `(a, b, c)` on the unit
    /// simplex to physical space.
    fn map(&self, reference: &[f64]) -> Point {
        let v = &self.vertices;
        let mut x = v[0];
        for (i, r) in reference.iter().enumerate() {
            x = add(&x, &scale(*r, &sub(&v[i + 1], &v[0])));
        }
        x
    }

    /// Quadrature points and weights of a collapsed (conical product)
    /// Gauss-Legendre rule with `n` points per direction.
    ///
    /// The weights sum to the simplex measure. With `n >= 2` points per
    /// direction the rule integrates polynomials of degree `2n - d` exactly;
    /// `n = 1` is the centroid rule.
    pub fn quadrature(&self, n: usize) -> Vec<(Point, f64)> {
        let (nodes, weights) = gauss_legendre_unit(n);
        let measure = self.measure();
        let d = self.dim();
        let mut out = Vec::with_capacity(n.pow(d as u32));
        if n == 1 {
            out.push((self.centroid(), measure));
            return out;
        }
        match d {
            0 => out.push((self.vertices[0], 1.0)),
            1 => {
                for (s, ws) in nodes.iter().zip(&weights) {
                    out.push((self.map(&[*s]), ws * measure));
                }
            }
            2 => {
                for (s, ws) in nodes.iter().zip(&weights) {
                    for (t, wt) in nodes.iter().zip(&weights) {
                        let r = [*s, t * (1.0 - s)];
                        out.push((self.map(&r), 2.0 * measure * ws * wt * (1.0 - s)));
                    }
                }
            }
            3 => {
                for (s, ws) in nodes.iter().zip(&weights) {
                    for (t, wt) in nodes.iter().zip(&weights) {
                        for (u, wu) in nodes.iter().zip(&weights) {
                            let r = [*s, t * (1.0 - s), u * (1.0 - s) * (1.0 - t)];
                            let jac = (1.0 - s) * (1.0 - s) * (1.0 - t);
                            out.push((self.map(&r), 6.0 * measure * ws * wt * wu * jac));
                        }
                    }
                }
            }
            k => panic!("simplex of dimension {k} not supported"),
        }
        out
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w): (&[f64], &[f64]) = match n {
        1 => (&[0.0], &[2.0]),
        2 => (&[-0.577_350_269_189_625_8, 0.577_350_269_189_625_8], &[1.0, 1.0]),
        3 => (
            &[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4],
            &[0.555_555_555_555_555_6, 0.888_888_888_888_888_8, 0.555_555_555_555_555_6],
        ),
        4 => (
            &[-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6],
            &[0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9],
        ),
        _ => panic!("Gauss-Legendre rule with {n} points not tabulated"),
    };
    (x.iter().map(|xi| 0.5 * (xi + 1.0)).collect(), w.iter().map(|wi| 0.5 * wi).collect())
}

/// Measure and centroid of a union of simplices.
pub fn measure_and_centroid(simplices: &[Simplex]) -> (f64, Point) {
    let mut total = 0.0;
    let mut c = ORIGIN;
    for s in simplices {
        let m = s.measure();
        total += m;
        c = add(&c, &scale(m, &s.centroid()));
    }
    (total, scale(1.0 / total, &c))
}

/// Area vector (measure times unit normal, orientation from vertex order)
/// and centroid of a planar polygon in 3D, fanned from its vertex average.
pub fn polygon_area_vector(points: &[Point]) -> (Point, Point) {
    let center = average(points);
    let mut area = ORIGIN;
    let mut c = ORIGIN;
    let mut total = 0.0;
    for i in 0..points.len() {
        let a = &points[i];
        let b = &points[(i + 1) % points.len()];
        let v = scale(0.5, &cross(&sub(a, &center), &sub(b, &center)));
        let m = norm(&v);
        area = add(&area, &v);
        total += m;
        c = add(&c, &scale(m, &average(&[center, *a, *b])));
    }
    let centroid = if total > 0.0 { scale(1.0 / total, &c) } else { center };
    (area, centroid)
}
