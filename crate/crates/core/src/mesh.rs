//! Icosphere meshes, cotangent-weight finite elements with lumped mass, and a
//! sparse block eigensolver for the lowest generalized eigenpairs `S v = λ M v`.

use crate::{sampling, Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen, Vector3};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix, CsrMatrix};
use std::collections::{HashMap, VecDeque};

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = std::collections::HashSet::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    pub fn area(&self) -> f64 {
        self.faces.iter().map(|f| self.face_area(f)).sum()
    }

    fn face_area(&self, f: &[usize; 3]) -> f64 {
        let (a, b, c) = (self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]]);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    /// Vertex adjacency lists, sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

/// Icosahedron refined `level` times by edge midpoints projected to the sphere
/// of the given radius. Vertex count `10·4^level + 2`.
pub fn icosphere(level: usize, radius: f64) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut vertices: Vec<Vector3<f64>> = raw.iter().map(|p| Vector3::new(p[0], p[1], p[2]).normalize()).collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vector3<f64>>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for v in &mut vertices {
        *v *= radius;
    }
    TriangleMesh { vertices, faces }
}

/// Cotangent stiffness matrix and lumped (barycentric) mass.
#[derive(Debug, Clone)]
pub struct FemMatrices {
    pub stiffness: CsrMatrix<f64>,
    pub mass: DVector<f64>,
}

pub fn cotangent_fem(mesh: &TriangleMesh) -> FemMatrices {
    let n = mesh.vertex_count();
    let mut coo = CooMatrix::new(n, n);
    let mut mass = DVector::zeros(n);
    for f in &mesh.faces {
        let area = mesh.face_area(f);
        for k in 0..3 {
            let (i, j, o) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
            let (pi, pj, po) = (mesh.vertices[i], mesh.vertices[j], mesh.vertices[o]);
            let (a, b) = (pi - po, pj - po);
            let w = 0.5 * a.dot(&b) / a.cross(&b).norm();
            coo.push(i, j, -w);
            coo.push(j, i, -w);
            coo.push(i, i, w);
            coo.push(j, j, w);
            mass[i] += area / 3.0;
        }
    }
    FemMatrices {
        stiffness: CsrMatrix::from(&coo),
        mass,
    }
}

/// Reverse Cuthill–McKee ordering; `order[new] = old`.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let bfs_last = |start: usize, visited: &[bool]| -> usize {
        let mut seen = visited.to_vec();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut last = start;
        while let Some(v) = queue.pop_front() {
            last = v;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        last
    };
    while order.len() < n {
        let seed = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| adj[v].len())
            .expect("unvisited vertex remains");
        // two sweeps towards a pseudo-peripheral vertex
        let start = bfs_last(bfs_last(seed, &visited), &visited);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().cloned().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (adj[w].len(), w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Half-bandwidth of the symmetric pattern `adj` under `order`.
pub fn bandwidth(adj: &[Vec<usize>], order: &[usize]) -> usize {
    let mut pos = vec![0usize; order.len()];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let mut bw = 0;
    for (v, list) in adj.iter().enumerate() {
        for &w in list {
            bw = bw.max(pos[v].abs_diff(pos[w]));
        }
    }
    bw
}

/// `D^{-1/2} S D^{-1/2}` with rows and columns permuted by `order`.
fn scaled_operator(fem: &FemMatrices, order: &[usize]) -> CsrMatrix<f64> {
    let n = fem.mass.len();
    let mut pos = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let s = fem.mass.map(|m| 1.0 / m.sqrt());
    let mut coo = CooMatrix::new(n, n);
    for (i, j, v) in fem.stiffness.triplet_iter() {
        coo.push(pos[i], pos[j], v * s[i] * s[j]);
    }
    CsrMatrix::from(&coo)
}

/// Settings for [`lowest_eigenvalues`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceSettings {
    pub block: usize,
    pub shift: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SubspaceSettings {
    fn default() -> Self {
        Self {
            block: 32,
            shift: 1.0,
            tolerance: 1e-10,
            max_iterations: 400,
            seed: 7,
        }
    }
}

/// Lowest `count` eigenvalues of `S v = λ M v` by block inverse iteration on
/// `A + σI` (`A = M^{-1/2} S M^{-1/2}`, RCM-ordered sparse Cholesky) with
/// Rayleigh–Ritz on the block. A block is needed because the icosahedral
/// symmetry makes several clusters exactly degenerate.
pub fn lowest_eigenvalues(fem: &FemMatrices, count: usize, settings: SubspaceSettings) -> Result<Vec<f64>> {
    let n = fem.mass.len();
    let b = settings.block.max(count + 1).min(n);
    if count > n {
        return Err(Error::Eigensolver(format!("asked for {count} eigenvalues of a {n}-dimensional problem")));
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| fem.stiffness.row(i).col_indices().to_vec())
        .collect();
    let order = reverse_cuthill_mckee(&adj);
    let a = scaled_operator(fem, &order);
    let mut shifted = CooMatrix::new(n, n);
    for (i, j, v) in a.triplet_iter() {
        shifted.push(i, j, *v);
    }
    for i in 0..n {
        shifted.push(i, i, settings.shift);
    }
    let chol = CscCholesky::factor(&CscMatrix::from(&shifted))
        .map_err(|e| Error::Eigensolver(format!("Cholesky of A + σI failed: {e:?}")))?;

    let mut rng = sampling::rng(settings.seed);
    let mut x = DMatrix::from_fn(n, b, |_, _| rand::Rng::random_range(&mut rng, -1.0..1.0));
    for _ in 0..settings.max_iterations {
        let y = chol.solve(&x);
        let q = y.qr().q();
        let aq = &a * &q;
        let h = q.transpose() * &aq;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut idx: Vec<usize> = (0..b).collect();
        idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let v = DMatrix::from_fn(b, b, |r, c| eig.eigenvectors[(r, idx[c])]);
        let theta: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        x = &q * &v;
        let ax = &aq * &v;
        let converged = (0..count).all(|c| {
            let r = ax.column(c) - x.column(c) * theta[c];
            r.norm() <= settings.tolerance * theta[c].abs().max(1.0)
        });
        if converged {
            return Ok(theta[..count].to_vec());
        }
    }
    Err(Error::Eigensolver(format!(
        "subspace iteration did not converge in {} iterations",
        settings.max_iterations
    )))
}

/// All eigenvalues of `S v = λ M v` by a dense symmetric solve (small meshes only).
pub fn dense_eigenvalues(fem: &FemMatrices) -> Vec<f64> {
    let n = fem.mass.len();
    let s = fem.mass.map(|m| 1.0 / m.sqrt());
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, j, v) in fem.stiffness.triplet_iter() {
        a[(i, j)] += v * s[i] * s[j];
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().cloned().collect();
    eig.sort_by(f64::total_cmp);
    eig
}
