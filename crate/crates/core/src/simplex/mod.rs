//! Vector-valued lifting on a triangulated domain.
//!
//! A point `x` inside simplex `T_l` with vertices `V_{k(0)}, ..., V_{k(d)}` is
//! lifted to the length-`L` vector holding its barycentric coordinates at the
//! slots `k(i)` and zeros elsewhere. A linear map applied to that vector is a
//! continuous piecewise linear function whose value at vertex `V_k` is the
//! `k`-th column of the map.

mod io;

pub use io::{parse_mesh, read_mesh, write_mesh};

use crate::error::{Error, Result};
use crate::lifting::{KnotSequence, LiftMode, LiftedVector};
use crate::linalg::{solve, LuFactors, Matrix};

/// Barycentric coordinates smaller than this still count as inside a simplex.
pub const INSIDE_TOL: f64 = 1e-12;

/// Ridge added to the normal equations of [`fit_spline_nd`].
pub const FIT_RIDGE: f64 = 1e-10;

/// Vertices in `R^d` together with simplices given as `d + 1` vertex indices.
#[derive(Debug, Clone)]
pub struct Triangulation {
    dim: usize,
    vertices: Vec<f64>,
    simplices: Vec<usize>,
    factors: Vec<LuFactors>,
    grid: Option<Vec<KnotSequence>>,
}

impl Triangulation {
    /// Validates indices and non-degeneracy, and factors every simplex's
    /// affine system once.
    pub fn new(dim: usize, vertices: Vec<Vec<f64>>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidTriangulation("dimension must be positive".into()));
        }
        let mut flat_vertices = Vec::with_capacity(vertices.len() * dim);
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidTriangulation(format!(
                    "vertex {i} has {} coordinates, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidTriangulation(format!("vertex {i} is not finite")));
            }
            flat_vertices.extend_from_slice(v);
        }
        let mut flat_simplices = Vec::with_capacity(simplices.len() * (dim + 1));
        for (l, s) in simplices.iter().enumerate() {
            if s.len() != dim + 1 {
                return Err(Error::InvalidTriangulation(format!(
                    "simplex {l} has {} vertices, expected {}",
                    s.len(),
                    dim + 1
                )));
            }
            if let Some(&bad) = s.iter().find(|&&k| k >= vertices.len()) {
                return Err(Error::InvalidTriangulation(format!(
                    "simplex {l} references vertex {bad}, but only {} exist",
                    vertices.len()
                )));
            }
            flat_simplices.extend_from_slice(s);
        }
        let mut tri = Self {
            dim,
            vertices: flat_vertices,
            simplices: flat_simplices,
            factors: Vec::with_capacity(simplices.len()),
            grid: None,
        };
        for l in 0..simplices.len() {
            let factors = tri.factor_simplex(l)?;
            tri.factors.push(factors);
        }
        Ok(tri)
    }

    fn factor_simplex(&self, l: usize) -> Result<LuFactors> {
        let d = self.dim;
        let idx = self.simplex(l);
        let mut system = Matrix::zeros(d + 1, d + 1);
        let mut scale = 0.0f64;
        let base = self.vertex(idx[0]);
        for (col, &k) in idx.iter().enumerate() {
            let v = self.vertex(k);
            for row in 0..d {
                system[(row, col)] = v[row];
                scale = scale.max((v[row] - base[row]).abs());
            }
            system[(d, col)] = 1.0;
        }
        let threshold = 1e-12 * scale.powi(d as i32);
        match LuFactors::new(&system) {
            Some(f) if f.determinant().abs() > threshold && scale > 0.0 => Ok(f),
            _ => Err(Error::SingularSimplex { index: l }),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len() / self.dim
    }

    pub fn simplex_count(&self) -> usize {
        self.factors.len()
    }

    pub fn vertex(&self, k: usize) -> &[f64] {
        &self.vertices[k * self.dim..(k + 1) * self.dim]
    }

    pub fn simplex(&self, l: usize) -> &[usize] {
        let n = self.dim + 1;
        &self.simplices[l * n..(l + 1) * n]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> {
        self.vertices.chunks(self.dim)
    }

    pub fn simplices(&self) -> impl Iterator<Item = &[usize]> {
        self.simplices.chunks(self.dim + 1)
    }

    /// Per-dimension knots when the mesh came from [`grid_triangulation`].
    pub fn grid_knots(&self) -> Option<&[KnotSequence]> {
        self.grid.as_deref()
    }

    /// Simplex indices worth testing for `x`, in increasing order.
    fn candidates(&self, x: &[f64]) -> Vec<usize> {
        let Some(grid) = &self.grid else {
            return (0..self.simplex_count()).collect();
        };
        // cells whose closed box (slightly widened) contains x, per dimension
        let mut per_dim: Vec<Vec<usize>> = Vec::with_capacity(self.dim);
        for (knots, &xi) in grid.iter().zip(x) {
            let t = knots.as_slice();
            let mut cells = Vec::with_capacity(2);
            let l = knots.interval(xi);
            for c in l.saturating_sub(1)..=(l + 1).min(t.len() - 2) {
                let slack = 1e-9 * (t[c + 1] - t[c]);
                if xi >= t[c] - slack && xi <= t[c + 1] + slack {
                    cells.push(c);
                }
            }
            if cells.is_empty() {
                return Vec::new();
            }
            per_dim.push(cells);
        }
        let per_cell = factorial(self.dim);
        let mut out = Vec::new();
        let mut counter = vec![0usize; self.dim];
        loop {
            let mut cell = 0;
            let mut stride = 1;
            for (dim, knots) in grid.iter().enumerate() {
                cell += per_dim[dim][counter[dim]] * stride;
                stride *= knots.len() - 1;
            }
            out.extend(cell * per_cell..(cell + 1) * per_cell);
            let mut dim = 0;
            loop {
                if dim == self.dim {
                    out.sort_unstable();
                    return out;
                }
                counter[dim] += 1;
                if counter[dim] < per_dim[dim].len() {
                    break;
                }
                counter[dim] = 0;
                dim += 1;
            }
        }
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Barycentric coordinates of a point with respect to one simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricCoords {
    pub simplex_index: usize,
    pub lambdas: Vec<f64>,
}

impl BarycentricCoords {
    pub fn is_inside(&self) -> bool {
        self.lambdas.iter().all(|&l| l >= -INSIDE_TOL)
    }
}

/// Solves `sum_i lambda_i V_{k(i)} = x`, `sum_i lambda_i = 1` for simplex `l`.
pub fn barycentric(x: &[f64], tri: &Triangulation, simplex_index: usize) -> Result<BarycentricCoords> {
    if x.len() != tri.dim {
        return Err(Error::Dimension { expected: tri.dim, found: x.len() });
    }
    let factors = tri.factors.get(simplex_index).ok_or_else(|| {
        Error::InvalidTriangulation(format!(
            "simplex index {simplex_index} out of range (M = {})",
            tri.simplex_count()
        ))
    })?;
    let mut rhs = x.to_vec();
    rhs.push(1.0);
    Ok(BarycentricCoords { simplex_index, lambdas: factors.solve(&rhs) })
}

/// Lowest-index simplex whose barycentric coordinates are all `>= -1e-12`.
pub fn locate_simplex(x: &[f64], tri: &Triangulation) -> Result<usize> {
    locate(x, tri).map(|b| b.simplex_index)
}

fn locate(x: &[f64], tri: &Triangulation) -> Result<BarycentricCoords> {
    if x.len() != tri.dim {
        return Err(Error::Dimension { expected: tri.dim, found: x.len() });
    }
    for l in tri.candidates(x) {
        let coords = barycentric(x, tri, l)?;
        if coords.is_inside() {
            return Ok(coords);
        }
    }
    Err(Error::OutsideDomain { point: x.to_vec() })
}

/// Lifts `x` to a length-`L` vector supported on its simplex's vertices.
///
/// Coordinates in `[-1e-12, 0)` from rounding on faces are set to zero.
pub fn lift_nd(x: &[f64], tri: &Triangulation) -> Result<LiftedVector> {
    let coords = locate(x, tri)?;
    let mut z = vec![0.0; tri.vertex_count()];
    for (&k, &lambda) in tri.simplex(coords.simplex_index).iter().zip(&coords.lambdas) {
        z[k] = lambda.max(0.0);
    }
    Ok(LiftedVector::new(z, LiftMode::Standard))
}

/// Sparse form of [`lift_nd`]: `(vertex index, weight)` pairs.
pub(crate) fn lift_nd_sparse(x: &[f64], tri: &Triangulation) -> Result<Vec<(usize, f64)>> {
    let coords = locate(x, tri)?;
    Ok(tri.simplex(coords.simplex_index).iter().copied().zip(coords.lambdas).collect())
}

/// `sum_l z_l V_l`.
pub fn inverse_lift_nd(z: &[f64], tri: &Triangulation) -> Result<Vec<f64>> {
    if z.len() != tri.vertex_count() {
        return Err(Error::Dimension { expected: tri.vertex_count(), found: z.len() });
    }
    let mut x = vec![0.0; tri.dim];
    for (w, v) in z.iter().zip(tri.vertices()) {
        if *w != 0.0 {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += w * vi;
            }
        }
    }
    Ok(x)
}

/// Cartesian grid over the given knots, each cell split into `d!` Kuhn simplices.
///
/// Vertices are numbered with the first dimension varying fastest. The simplex
/// for permutation `p` of a cell starts at the cell's lower corner and steps
/// along `e_{p(0)}, e_{p(1)}, ...`, so in two dimensions every square is cut
/// along its (low, low)-(high, high) diagonal.
pub fn grid_triangulation(per_dim_knots: &[KnotSequence]) -> Result<Triangulation> {
    let d = per_dim_knots.len();
    if d == 0 {
        return Err(Error::InvalidTriangulation("need at least one knot sequence".into()));
    }
    let counts: Vec<usize> = per_dim_knots.iter().map(KnotSequence::len).collect();
    let vertex_strides: Vec<usize> = strides(&counts);
    let total: usize = counts.iter().product();

    let vertices: Vec<Vec<f64>> = (0..total)
        .map(|flat| {
            multi_index(flat, &counts)
                .iter()
                .zip(per_dim_knots)
                .map(|(&i, k)| k.as_slice()[i])
                .collect()
        })
        .collect();

    let cell_counts: Vec<usize> = counts.iter().map(|c| c - 1).collect();
    let cells: usize = cell_counts.iter().product();
    let perms = permutations(d);
    let mut simplices = Vec::with_capacity(cells * perms.len());
    for cell in 0..cells {
        let corner = multi_index(cell, &cell_counts);
        let base: usize = corner.iter().zip(&vertex_strides).map(|(i, s)| i * s).sum();
        for perm in &perms {
            let mut current = base;
            let mut simplex = Vec::with_capacity(d + 1);
            simplex.push(current);
            for &axis in perm {
                current += vertex_strides[axis];
                simplex.push(current);
            }
            simplices.push(simplex);
        }
    }
    let mut tri = Triangulation::new(d, vertices, simplices)?;
    tri.grid = Some(per_dim_knots.to_vec());
    Ok(tri)
}

fn strides(counts: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(counts.len());
    let mut s = 1;
    for &c in counts {
        out.push(s);
        s *= c;
    }
    out
}

fn multi_index(mut flat: usize, counts: &[usize]) -> Vec<usize> {
    counts
        .iter()
        .map(|&c| {
            let i = flat % c;
            flat /= c;
            i
        })
        .collect()
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                extend(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// `theta * lift_nd(x)` for an `r x L` coefficient matrix.
pub fn evaluate_spline_nd(theta: &Matrix, tri: &Triangulation, x: &[f64]) -> Result<Vec<f64>> {
    if theta.cols() != tri.vertex_count() {
        return Err(Error::Dimension { expected: tri.vertex_count(), found: theta.cols() });
    }
    let support = lift_nd_sparse(x, tri)?;
    Ok((0..theta.rows())
        .map(|r| support.iter().map(|&(k, w)| theta[(r, k)] * w).sum())
        .collect())
}

/// Least-squares continuous piecewise linear fit on `tri`.
///
/// Minimizes `sum_i |theta lift_nd(x_i) - y_i|^2` through the normal equations
/// with [`FIT_RIDGE`] on the diagonal, so vertices without data get zero.
pub fn fit_spline_nd(data: &[(Vec<f64>, Vec<f64>)], tri: &Triangulation) -> Result<Matrix> {
    let l = tri.vertex_count();
    let r = data.first().map_or(1, |(_, y)| y.len());
    let mut gram = Matrix::zeros(l, l);
    let mut rhs = Matrix::zeros(l, r);
    for (x, y) in data {
        if y.len() != r {
            return Err(Error::Dimension { expected: r, found: y.len() });
        }
        let support = lift_nd_sparse(x, tri)?;
        for &(a, wa) in &support {
            for &(b, wb) in &support {
                gram[(a, b)] += wa * wb;
            }
            for (c, yc) in y.iter().enumerate() {
                rhs[(a, c)] += wa * yc;
            }
        }
    }
    for k in 0..l {
        gram[(k, k)] += FIT_RIDGE;
    }
    Ok(solve(&gram, &rhs)?.transpose())
}

/// Largest distance between two vertices of a common simplex.
pub fn mesh_diameter(tri: &Triangulation) -> f64 {
    let mut diameter = 0.0f64;
    for s in tri.simplices() {
        for (i, &a) in s.iter().enumerate() {
            for &b in &s[i + 1..] {
                let dist = tri
                    .vertex(a)
                    .iter()
                    .zip(tri.vertex(b))
                    .map(|(u, v)| (u - v).powi(2))
                    .sum::<f64>()
                    .sqrt();
                diameter = diameter.max(dist);
            }
        }
    }
    diameter
}
