//! Vertex-centred finite-volume grids and the spatial operators built on them.
//!
//! Every grid stores one unknown per vertex. Boundary vertices are ordinary
//! bulk vertices that additionally carry a boundary quadrature weight, so the
//! boundary trace of a nodal field is a plain restriction. Bulk weights are
//! the exact measures of the dual control volumes (half cells at the
//! boundary), hence they sum to the exact measure of the domain.
//!
//! Diffusion enters through a list of [`Face`]s. The flux-form operator
//! `(A w)_i = sum_faces c (w_j - w_i)` is symmetric, has zero row and column
//! sums and non-negative off-diagonal entries; these three facts give exact
//! discrete mass conservation, summation by parts and the M-matrix structure
//! used throughout the solver.

use std::f64::consts::PI;

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Interval1D,
    Disk2D,
    RadialAnnulus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// `[0, length]` with `nodes` equispaced vertices.
    Interval { length: f64, nodes: usize },
    /// Disk of the given radius on a polar grid with one pole vertex,
    /// `radial_cells` rings and `angular_nodes` vertices per ring.
    Disk {
        radius: f64,
        radial_cells: usize,
        angular_nodes: usize,
    },
    /// Radially symmetric shell `inner <= |x| <= outer` in three dimensions.
    RadialAnnulus {
        inner: f64,
        outer: f64,
        nodes: usize,
    },
}

/// Diffusive coupling between two vertices: flux `coeff * (w[b] - w[a])`
/// enters `a` and leaves `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub a: usize,
    pub b: usize,
    pub coeff: f64,
}

#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    geometry: Geometry,
    coords: Vec<[f64; 2]>,
    bulk_weights: Vec<f64>,
    boundary_nodes: Vec<usize>,
    boundary_weights: Vec<f64>,
    boundary_normals: Vec<[f64; 2]>,
    boundary_slot: Vec<Option<usize>>,
    faces: Vec<Face>,
    // indices refer to positions in `boundary_nodes`
    boundary_faces: Vec<Face>,
    normal_stencils: Vec<[(usize, f64); 3]>,
    bandwidth: usize,
    spacing: f64,
}

/// A bulk field together with an independent boundary datum.
///
/// On the collocated grids of this crate a physical state has
/// `boundary_values == trace(values)`, but raw data (for instance an initial
/// pair `(theta0, eta0)` before preparation) may carry an unrelated boundary
/// component.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub values: Vec<f64>,
    pub boundary_values: Vec<f64>,
}

impl Field {
    pub fn new(
        domain: &DiscreteDomain,
        values: Vec<f64>,
        boundary_values: Vec<f64>,
    ) -> Result<Self> {
        check_len(domain.len(), values.len())?;
        check_len(domain.boundary_len(), boundary_values.len())?;
        Ok(Self {
            values,
            boundary_values,
        })
    }

    /// Nodal field whose boundary component is its own trace.
    pub fn from_nodal(domain: &DiscreteDomain, values: Vec<f64>) -> Result<Self> {
        check_len(domain.len(), values.len())?;
        let boundary_values = domain.trace(&values);
        Ok(Self {
            values,
            boundary_values,
        })
    }

    pub fn constant(domain: &DiscreteDomain, value: f64) -> Self {
        Self {
            values: vec![value; domain.len()],
            boundary_values: vec![value; domain.boundary_len()],
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            boundary_values: self.boundary_values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check(&self, domain: &DiscreteDomain) -> Result<()> {
        check_len(domain.len(), self.values.len())?;
        check_len(domain.boundary_len(), self.boundary_values.len())
    }
}

impl DiscreteDomain {
    pub fn interval(length: f64, nodes: usize) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::Grid(format!(
                "interval length must be positive, got {length}"
            )));
        }
        if nodes < 3 {
            return Err(Error::Grid(format!("need at least 3 nodes, got {nodes}")));
        }
        let h = length / (nodes - 1) as f64;
        let coords = (0..nodes).map(|j| [j as f64 * h, 0.0]).collect();
        let mut bulk_weights = vec![h; nodes];
        bulk_weights[0] = 0.5 * h;
        bulk_weights[nodes - 1] = 0.5 * h;
        let faces = (0..nodes - 1)
            .map(|j| Face {
                a: j,
                b: j + 1,
                coeff: 1.0 / h,
            })
            .collect();
        let c = 0.5 / h;
        let normal_stencils = vec![
            [(0, 3.0 * c), (1, -4.0 * c), (2, c)],
            [(nodes - 1, 3.0 * c), (nodes - 2, -4.0 * c), (nodes - 3, c)],
        ];
        Ok(Self::assemble(
            Geometry::Interval { length, nodes },
            coords,
            bulk_weights,
            vec![0, nodes - 1],
            vec![1.0, 1.0],
            vec![[-1.0, 0.0], [1.0, 0.0]],
            faces,
            Vec::new(),
            normal_stencils,
            1,
            h,
        ))
    }

    /// Unit interval, `|Omega| = 1`.
    pub fn unit_interval(nodes: usize) -> Result<Self> {
        Self::interval(1.0, nodes)
    }

    pub fn disk(radius: f64, radial_cells: usize, angular_nodes: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Grid(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        if radial_cells < 2 || angular_nodes < 3 {
            return Err(Error::Grid(format!(
                "need at least 3 nodes per direction, got {} radial and {angular_nodes} angular",
                radial_cells + 1
            )));
        }
        let nr = radial_cells;
        let np = angular_nodes;
        let dr = radius / nr as f64;
        let dphi = 2.0 * PI / np as f64;
        let index = |i: usize, k: usize| {
            if i == 0 {
                0
            } else {
                1 + (i - 1) * np + (k % np)
            }
        };
        let n = 1 + nr * np;

        let mut coords = Vec::with_capacity(n);
        let mut bulk_weights = Vec::with_capacity(n);
        coords.push([0.0, 0.0]);
        bulk_weights.push(PI * 0.25 * dr * dr);
        for i in 1..=nr {
            let r = i as f64 * dr;
            let w = if i < nr {
                dphi * r * dr
            } else {
                let inner = radius - 0.5 * dr;
                0.5 * dphi * (radius * radius - inner * inner)
            };
            for k in 0..np {
                let phi = k as f64 * dphi;
                coords.push([r * phi.cos(), r * phi.sin()]);
                bulk_weights.push(w);
            }
        }

        let mut faces = Vec::with_capacity(2 * n);
        for k in 0..np {
            faces.push(Face {
                a: 0,
                b: index(1, k),
                coeff: 0.5 * dphi,
            });
        }
        for i in 1..=nr {
            let r = i as f64 * dr;
            for k in 0..np {
                if i < nr {
                    faces.push(Face {
                        a: index(i, k),
                        b: index(i + 1, k),
                        coeff: (r + 0.5 * dr) * dphi / dr,
                    });
                }
                let length = if i < nr { dr } else { 0.5 * dr };
                faces.push(Face {
                    a: index(i, k),
                    b: index(i, k + 1),
                    coeff: length / (r * dphi),
                });
            }
        }

        let arc = radius * dphi;
        let boundary_nodes: Vec<usize> = (0..np).map(|k| index(nr, k)).collect();
        let boundary_faces = (0..np)
            .map(|k| Face {
                a: k,
                b: (k + 1) % np,
                coeff: 1.0 / arc,
            })
            .collect();
        let boundary_normals = (0..np)
            .map(|k| {
                let phi = k as f64 * dphi;
                [phi.cos(), phi.sin()]
            })
            .collect();
        let c = 0.5 / dr;
        let normal_stencils = (0..np)
            .map(|k| {
                [
                    (index(nr, k), 3.0 * c),
                    (index(nr - 1, k), -4.0 * c),
                    (index(nr - 2, k), c),
                ]
            })
            .collect();

        Ok(Self::assemble(
            Geometry::Disk {
                radius,
                radial_cells,
                angular_nodes,
            },
            coords,
            bulk_weights,
            boundary_nodes,
            vec![arc; np],
            boundary_normals,
            faces,
            boundary_faces,
            normal_stencils,
            np,
            dr.min(dr * dphi),
        ))
    }

    /// Disk of unit area, `|Omega| = 1`.
    pub fn unit_area_disk(radial_cells: usize, angular_nodes: usize) -> Result<Self> {
        Self::disk(1.0 / PI.sqrt(), radial_cells, angular_nodes)
    }

    pub fn annulus(inner: f64, outer: f64, nodes: usize) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::Grid(format!(
                "need 0 < inner < outer, got [{inner}, {outer}]"
            )));
        }
        if nodes < 3 {
            return Err(Error::Grid(format!("need at least 3 nodes, got {nodes}")));
        }
        let h = (outer - inner) / (nodes - 1) as f64;
        let radius = |j: usize| inner + j as f64 * h;
        let shell = |lo: f64, hi: f64| 4.0 / 3.0 * PI * (hi.powi(3) - lo.powi(3));
        let coords = (0..nodes).map(|j| [radius(j), 0.0]).collect();
        let bulk_weights = (0..nodes)
            .map(|j| {
                let lo = (radius(j) - 0.5 * h).max(inner);
                let hi = (radius(j) + 0.5 * h).min(outer);
                shell(lo, hi)
            })
            .collect();
        let faces = (0..nodes - 1)
            .map(|j| {
                let mid = radius(j) + 0.5 * h;
                Face {
                    a: j,
                    b: j + 1,
                    coeff: 4.0 * PI * mid * mid / h,
                }
            })
            .collect();
        let c = 0.5 / h;
        let normal_stencils = vec![
            [(0, 3.0 * c), (1, -4.0 * c), (2, c)],
            [(nodes - 1, 3.0 * c), (nodes - 2, -4.0 * c), (nodes - 3, c)],
        ];
        Ok(Self::assemble(
            Geometry::RadialAnnulus {
                inner,
                outer,
                nodes,
            },
            coords,
            bulk_weights,
            vec![0, nodes - 1],
            vec![4.0 * PI * inner * inner, 4.0 * PI * outer * outer],
            vec![[-1.0, 0.0], [1.0, 0.0]],
            faces,
            Vec::new(),
            normal_stencils,
            1,
            h,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        geometry: Geometry,
        coords: Vec<[f64; 2]>,
        bulk_weights: Vec<f64>,
        boundary_nodes: Vec<usize>,
        boundary_weights: Vec<f64>,
        boundary_normals: Vec<[f64; 2]>,
        faces: Vec<Face>,
        boundary_faces: Vec<Face>,
        normal_stencils: Vec<[(usize, f64); 3]>,
        bandwidth: usize,
        spacing: f64,
    ) -> Self {
        let mut boundary_slot = vec![None; coords.len()];
        for (k, &node) in boundary_nodes.iter().enumerate() {
            boundary_slot[node] = Some(k);
        }
        Self {
            geometry,
            coords,
            bulk_weights,
            boundary_nodes,
            boundary_weights,
            boundary_normals,
            boundary_slot,
            faces,
            boundary_faces,
            normal_stencils,
            bandwidth,
            spacing,
        }
    }

    pub fn kind(&self) -> DomainKind {
        match self.geometry {
            Geometry::Interval { .. } => DomainKind::Interval1D,
            Geometry::Disk { .. } => DomainKind::Disk2D,
            Geometry::RadialAnnulus { .. } => DomainKind::RadialAnnulus,
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Number of vertices (bulk unknowns).
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary_nodes.len()
    }

    /// Vertex coordinates. Radial grids store `(r, 0)`.
    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn bulk_weights(&self) -> &[f64] {
        &self.bulk_weights
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    pub fn boundary_weights(&self) -> &[f64] {
        &self.boundary_weights
    }

    /// Outward unit normal at each boundary vertex (radial grids: `(-1, 0)`
    /// on the inner sphere, `(1, 0)` on the outer one).
    pub fn boundary_normals(&self) -> &[[f64; 2]] {
        &self.boundary_normals
    }

    /// Position of `node` in the boundary list, if it is a boundary vertex.
    pub fn boundary_slot(&self, node: usize) -> Option<usize> {
        self.boundary_slot[node]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn boundary_faces(&self) -> &[Face] {
        &self.boundary_faces
    }

    /// Half-bandwidth of every operator assembled on this grid.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Smallest grid spacing.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `|Omega|`.
    pub fn measure(&self) -> f64 {
        self.bulk_weights.iter().sum()
    }

    /// `|Gamma|`.
    pub fn boundary_measure(&self) -> f64 {
        self.boundary_weights.iter().sum()
    }

    /// Boundary restriction of a nodal field.
    pub fn trace(&self, values: &[f64]) -> Vec<f64> {
        self.boundary_nodes.iter().map(|&i| values[i]).collect()
    }

    /// Radial coordinate of a vertex (distance from the origin for disks).
    pub fn radius_of(&self, node: usize) -> f64 {
        let [x, y] = self.coords[node];
        match self.geometry {
            Geometry::Disk { .. } => x.hypot(y),
            _ => x,
        }
    }

    /// Distance from a vertex to the boundary together with the boundary
    /// vertex reached along the grid line through it.
    pub fn boundary_distance(&self, node: usize) -> (f64, usize) {
        match self.geometry {
            Geometry::Interval { length, .. } => {
                let x = self.coords[node][0];
                if x <= length - x {
                    (x, 0)
                } else {
                    (length - x, 1)
                }
            }
            Geometry::Disk {
                radius,
                angular_nodes,
                ..
            } => {
                if node == 0 {
                    (radius, 0)
                } else {
                    (radius - self.radius_of(node), (node - 1) % angular_nodes)
                }
            }
            Geometry::RadialAnnulus { inner, outer, .. } => {
                let r = self.coords[node][0];
                if r - inner <= outer - r {
                    (r - inner, 0)
                } else {
                    (outer - r, 1)
                }
            }
        }
    }

    /// Flux-form operator `(A w)_i = sum_faces c (w_j - w_i)`, i.e. the
    /// weighted Laplacian with homogeneous Neumann closure.
    pub fn apply_stiffness(&self, w: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for face in &self.faces {
            let flux = face.coeff * (w[face.b] - w[face.a]);
            out[face.a] += flux;
            out[face.b] -= flux;
        }
    }

    /// Boundary analogue of [`apply_stiffness`](Self::apply_stiffness):
    /// `(B eta)_k = |Gamma_k| (Delta_Gamma eta)_k`.
    pub fn apply_boundary_stiffness(&self, eta: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for face in &self.boundary_faces {
            let flux = face.coeff * (eta[face.b] - eta[face.a]);
            out[face.a] += flux;
            out[face.b] -= flux;
        }
    }

    /// `sum_faces c (a_j - a_i)(b_j - b_i)`, the discrete `(grad a, grad b)`.
    pub fn gradient_pairing(&self, a: &[f64], b: &[f64]) -> f64 {
        self.faces
            .iter()
            .map(|f| f.coeff * (a[f.b] - a[f.a]) * (b[f.b] - b[f.a]))
            .sum()
    }

    /// Boundary version of [`gradient_pairing`](Self::gradient_pairing),
    /// acting on boundary-indexed vectors.
    pub fn boundary_gradient_pairing(&self, a: &[f64], b: &[f64]) -> f64 {
        self.boundary_faces
            .iter()
            .map(|f| f.coeff * (a[f.b] - a[f.a]) * (b[f.b] - b[f.a]))
            .sum()
    }

    /// Discrete `||grad v||_1`: face differences weighted by the dual face
    /// measure `c h^2` (area of the face times the length of the edge).
    pub fn gradient_l1(&self, v: &[f64]) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [xa, ya] = self.coords[f.a];
                let [xb, yb] = self.coords[f.b];
                let edge = match self.geometry {
                    Geometry::Disk { .. } => (xb - xa).hypot(yb - ya),
                    _ => (xb - xa).abs(),
                };
                f.coeff * edge * (v[f.b] - v[f.a]).abs()
            })
            .sum()
    }

    pub fn integrate_dm(&self, v: &Field, alpha: f64) -> Result<f64> {
        v.check(self)?;
        Ok(self.integrate_bulk(&v.values) + alpha * self.integrate_boundary(&v.boundary_values))
    }

    /// `integrate_dm / (|Omega| + alpha |Gamma|)`.
    pub fn mean_m(&self, v: &Field, alpha: f64) -> Result<f64> {
        let total = self.integrate_dm(v, alpha)?;
        Ok(total / (self.measure() + alpha * self.boundary_measure()))
    }

    pub fn integrate_bulk(&self, values: &[f64]) -> f64 {
        self.bulk_weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum()
    }

    pub fn integrate_boundary(&self, values: &[f64]) -> f64 {
        self.boundary_weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// Outward normal derivative at each boundary vertex, second-order
    /// one-sided differences along the grid line normal to the boundary.
    pub fn normal_derivative(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), w.len())?;
        Ok(self
            .normal_stencils
            .iter()
            .map(|stencil| stencil.iter().map(|&(j, c)| c * w[j]).sum())
            .collect())
    }

    /// Conservative Laplacian at every vertex.
    ///
    /// Interior vertices get `(A w)_i / |V_i|`. At a boundary vertex the half
    /// cell is closed by the boundary flux `|Gamma_k| d_n w`, so that
    /// `sum_i |V_i| (Delta w)_i = sum_k |Gamma_k| (d_n w)_k` holds identically.
    pub fn laplacian(&self, w: &[f64]) -> Result<Vec<f64>> {
        let normal = self.normal_derivative(w)?;
        let mut out = vec![0.0; self.len()];
        self.apply_stiffness(w, &mut out);
        for (k, &node) in self.boundary_nodes.iter().enumerate() {
            out[node] += self.boundary_weights[k] * normal[k];
        }
        for (o, v) in out.iter_mut().zip(&self.bulk_weights) {
            *o /= v;
        }
        Ok(out)
    }

    /// Laplace–Beltrami operator on the boundary. Point boundaries have no
    /// tangential directions and the operator vanishes there.
    pub fn laplace_beltrami(&self, eta: &[f64]) -> Result<Vec<f64>> {
        check_len(self.boundary_len(), eta.len())?;
        let mut out = vec![0.0; eta.len()];
        self.apply_boundary_stiffness(eta, &mut out);
        for (o, w) in out.iter_mut().zip(&self.boundary_weights) {
            *o /= w;
        }
        Ok(out)
    }

    /// Whether the boundary carries a non-trivial Laplace–Beltrami operator.
    pub fn has_surface_diffusion(&self) -> bool {
        !self.boundary_faces.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrate_dm_constants() {
        let d = DiscreteDomain::unit_interval(11).unwrap();
        let one = Field::constant(&d, 1.0);
        assert_relative_eq!(d.integrate_dm(&one, 0.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(d.integrate_dm(&one, 1.0).unwrap(), 3.0, epsilon = 1e-14);
        let zero = Field::constant(&d, 0.0);
        assert_eq!(d.integrate_dm(&zero, 2.5).unwrap(), 0.0);
    }

    #[test]
    fn integrate_dm_rejects_wrong_shape() {
        let d = DiscreteDomain::unit_interval(11).unwrap();
        let bad = Field {
            values: vec![1.0; 10],
            boundary_values: vec![1.0; 2],
        };
        assert!(matches!(
            d.integrate_dm(&bad, 0.0),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn mean_of_constant_and_halves() {
        let d = DiscreteDomain::unit_area_disk(8, 12).unwrap();
        let c = Field::constant(&d, 3.25);
        for alpha in [0.0, 0.5, 4.0] {
            assert_relative_eq!(d.mean_m(&c, alpha).unwrap(), 3.25, epsilon = 1e-13);
        }
        // symmetric halves of the interval: left 0, right 2
        let d = DiscreteDomain::unit_interval(21).unwrap();
        let values: Vec<f64> = (0..21)
            .map(|j| match j.cmp(&10) {
                std::cmp::Ordering::Less => 0.0,
                std::cmp::Ordering::Equal => 1.0,
                std::cmp::Ordering::Greater => 2.0,
            })
            .collect();
        let f = Field::from_nodal(&d, values).unwrap();
        assert_relative_eq!(d.mean_m(&f, 0.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn weights_sum_to_exact_measures() {
        let d = DiscreteDomain::disk(1.3, 17, 23).unwrap();
        assert_relative_eq!(d.measure(), PI * 1.3 * 1.3, max_relative = 1e-12);
        assert_relative_eq!(d.boundary_measure(), 2.0 * PI * 1.3, max_relative = 1e-12);
        let a = DiscreteDomain::annulus(1.0, 3.0, 41).unwrap();
        assert_relative_eq!(a.measure(), 4.0 / 3.0 * PI * 26.0, max_relative = 1e-12);
        assert_relative_eq!(
            DiscreteDomain::unit_area_disk(9, 9).unwrap().measure(),
            1.0,
            max_relative = 1e-12
        );
        for d in [d, a] {
            assert!(d.bulk_weights().iter().all(|&w| w > 0.0));
            assert!(d.boundary_weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn too_coarse_grids_are_rejected() {
        assert!(DiscreteDomain::unit_interval(2).is_err());
        assert!(DiscreteDomain::disk(1.0, 1, 8).is_err());
        assert!(DiscreteDomain::disk(1.0, 4, 2).is_err());
        assert!(DiscreteDomain::annulus(1.0, 3.0, 2).is_err());
        assert!(DiscreteDomain::annulus(0.0, 3.0, 10).is_err());
    }

    #[test]
    fn second_difference_of_affine_and_quadratic() {
        let d = DiscreteDomain::unit_interval(17).unwrap();
        let affine: Vec<f64> = d.coords().iter().map(|c| 3.0 * c[0] - 1.0).collect();
        let lap = d.laplacian(&affine).unwrap();
        assert!(lap.iter().all(|v| v.abs() < 1e-10), "{lap:?}");
        let quad: Vec<f64> = d.coords().iter().map(|c| c[0] * c[0]).collect();
        let lap = d.laplacian(&quad).unwrap();
        for v in lap {
            assert_relative_eq!(v, 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn inverse_radius_is_harmonic_on_the_annulus() {
        let residual = |n: usize| {
            let d = DiscreteDomain::annulus(1.0, 3.0, n).unwrap();
            let w: Vec<f64> = d.coords().iter().map(|c| 1.0 / c[0]).collect();
            let lap = d.laplacian(&w).unwrap();
            lap[1..n - 1].iter().fold(0.0_f64, |m, v| m.max(v.abs()))
        };
        let coarse = residual(41);
        let fine = residual(81);
        assert!(coarse < 2e-3);
        let ratio = coarse / fine;
        assert!((3.4..4.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn circle_eigenfunctions() {
        let residual = |np: usize| {
            let radius = 0.8;
            let d = DiscreteDomain::disk(radius, 4, np).unwrap();
            let k = 3.0;
            let phis: Vec<f64> = (0..np).map(|j| 2.0 * PI * j as f64 / np as f64).collect();
            let eta: Vec<f64> = phis.iter().map(|p| (k * p).cos()).collect();
            let lb = d.laplace_beltrami(&eta).unwrap();
            phis.iter()
                .zip(&lb)
                .map(|(p, v)| (v + k * k / (radius * radius) * (k * p).cos()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = residual(32) / residual(64);
        assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
        let d = DiscreteDomain::disk(1.0, 4, 16).unwrap();
        let lb = d.laplace_beltrami(&[2.0; 16]).unwrap();
        assert!(lb.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn laplace_beltrami_vanishes_on_point_boundaries() {
        let d = DiscreteDomain::unit_interval(5).unwrap();
        assert_eq!(d.laplace_beltrami(&[1.0, 7.0]).unwrap(), vec![0.0, 0.0]);
        assert!(!d.has_surface_diffusion());
    }

    #[test]
    fn normal_derivative_orientation() {
        let d = DiscreteDomain::unit_interval(9).unwrap();
        let x: Vec<f64> = d.coords().iter().map(|c| c[0]).collect();
        let dn = d.normal_derivative(&x).unwrap();
        assert_relative_eq!(dn[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(dn[1], 1.0, epsilon = 1e-12);
        let dn = d.normal_derivative(&[4.0; 9]).unwrap();
        assert!(dn.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn disk_normal_derivative_of_radial_quadratic() {
        let d = DiscreteDomain::disk(1.5, 12, 20).unwrap();
        let w: Vec<f64> = d.coords().iter().map(|[x, y]| x * x + y * y).collect();
        for v in d.normal_derivative(&w).unwrap() {
            assert_relative_eq!(v, 3.0, epsilon = 1e-10);
        }
        // pole treatment: averaged first ring gives the exact value 4
        let lap = d.laplacian(&w).unwrap();
        assert_relative_eq!(lap[0], 4.0, epsilon = 1e-9);
    }
}
