//! Banded assembly of the comoving steady operator and its evolution
//! linearization, plus the node ordering that makes both boundary conditions
//! banded at once.
//!
//! # Fold ordering
//!
//! A periodic grid couples node `0` to node `n-1`, which in natural ordering
//! puts an entry in the far corner of the matrix and ruins the band.  Instead
//! of special-casing a bordered periodic solve, all assembly here uses a
//! *fold* permutation that walks the grid from both ends inward:
//!
//! ```text
//! position  p:   0    1    2    3    4    5   ...
//! grid node    : 0   n-1   1   n-2   2   n-3  ...
//! ```
//!
//! Every pair of nodes that a 3-point stencil couples — consecutive nodes
//! *and* the periodic wrap `0 ↔ n-1` — sits at fold distance at most 2, so
//! with the three field components interleaved per position the coupling
//! span is `3·2 + 2 = 8`: one banded layout (`kl = ku = 8`) serves Neumann
//! and periodic grids with the identical code path.
//!
//! # The two operators
//!
//! * [`steady_jacobian`]: the Fréchet derivative of the comoving residual
//!   `D S_zz + c T S_z + F(S)`, i.e. rows are *not* divided by the time
//!   constants.  This is the matrix the Newton solvers factor.
//! * [`evolution_operator`]: the generator `T⁻¹(D ∂_zz + F'(S)) + c ∂_z` of
//!   the linearized dynamics in the comoving frame.  Its eigenvalues are the
//!   physical stability exponents; note the advection term `c ∂_z` enters
//!   *outside* the `T⁻¹` scaling because the frame change acts on every
//!   component at unit rate.
//!
//! Both reuse the exact finite-difference stencils of
//! [`Grid1::laplacian`](crate::grid::Grid1::laplacian) and
//! [`Grid1::gradient`](crate::grid::Grid1::gradient), entry for entry, so a
//! matrix-vector product reproduces those operators to the last bit and the
//! matrices inherit their second-order accuracy.

use crate::grid::{Boundary, Field1, Grid1};
use crate::models::ModelSpec;
use crate::numerics::BandedMatrix;
use num_complex::Complex64;

/// Number of interleaved components per grid node.
pub const N_COMP: usize = 3;

/// Sub- and super-bandwidth of every operator assembled in this module.
pub const BANDWIDTH: usize = N_COMP * 2 + (N_COMP - 1);

/// Two-ended ("fold") node ordering that keeps periodic wrap-around inside
/// the band.  See the module docs for the layout.
#[derive(Clone, Debug)]
pub struct FoldOrder {
    /// `pos[node]` = fold position of a grid node; position `p` holds node
    /// `p/2` (even `p`) or `n − 1 − p/2` (odd `p`).
    pos: Vec<usize>,
}

impl FoldOrder {
    pub fn new(n: usize) -> Self {
        assert!(n >= 3, "fold ordering needs at least 3 nodes, got {n}");
        let mut pos = vec![0usize; n];
        for p in 0..n {
            let i = if p % 2 == 0 { p / 2 } else { n - 1 - p / 2 };
            pos[i] = p;
        }
        Self { pos }
    }

    pub fn n(&self) -> usize {
        self.pos.len()
    }

    /// Fold position of a grid node.
    pub fn position(&self, node: usize) -> usize {
        self.pos[node]
    }

    /// Row/column index of component `comp` at grid node `node` in the
    /// interleaved fold layout.
    pub fn index(&self, node: usize, comp: usize) -> usize {
        N_COMP * self.pos[node] + comp
    }

    /// Reorder a component-major natural vector (`comp * n + node`) into the
    /// interleaved fold layout used by the banded matrices.
    pub fn interleave<T: Copy>(&self, natural: &[T]) -> Vec<T> {
        let n = self.n();
        assert_eq!(natural.len(), N_COMP * n);
        let mut out = vec![natural[0]; N_COMP * n];
        for i in 0..n {
            for c in 0..N_COMP {
                out[N_COMP * self.pos[i] + c] = natural[c * n + i];
            }
        }
        out
    }

    /// Inverse of [`interleave`](Self::interleave).
    pub fn deinterleave<T: Copy>(&self, folded: &[T]) -> Vec<T> {
        let n = self.n();
        assert_eq!(folded.len(), N_COMP * n);
        let mut out = vec![folded[0]; N_COMP * n];
        for i in 0..n {
            for c in 0..N_COMP {
                out[c * n + i] = folded[N_COMP * self.pos[i] + c];
            }
        }
        out
    }
}

/// 3-point Laplacian stencil of `Grid1::laplacian` at node `i`:
/// `(neighbors, count)` with weights already divided by `dx²`.
fn laplacian_stencil(grid: &Grid1, i: usize) -> ([(usize, f64); 3], usize) {
    let n = grid.n;
    let inv_dx2 = 1.0 / (grid.dx * grid.dx);
    let interior = |i: usize| {
        (
            [
                (i - 1, inv_dx2),
                (i, -2.0 * inv_dx2),
                (i + 1, inv_dx2),
            ],
            3,
        )
    };
    match grid.bc {
        Boundary::Neumann => {
            if i == 0 {
                ([(0, -inv_dx2), (1, inv_dx2), (0, 0.0)], 2)
            } else if i == n - 1 {
                ([(n - 2, inv_dx2), (n - 1, -inv_dx2), (0, 0.0)], 2)
            } else {
                interior(i)
            }
        }
        Boundary::Periodic => {
            if i == 0 {
                ([(n - 1, inv_dx2), (0, -2.0 * inv_dx2), (1, inv_dx2)], 3)
            } else if i == n - 1 {
                ([(n - 2, inv_dx2), (n - 1, -2.0 * inv_dx2), (0, inv_dx2)], 3)
            } else {
                interior(i)
            }
        }
    }
}

/// First-derivative stencil of `Grid1::gradient` at node `i` (centered in the
/// interior, one-sided at Neumann walls).
fn gradient_stencil(grid: &Grid1, i: usize) -> ([(usize, f64); 2], usize) {
    let n = grid.n;
    let inv_2dx = 0.5 / grid.dx;
    let inv_dx = 1.0 / grid.dx;
    match grid.bc {
        Boundary::Neumann => {
            if i == 0 {
                ([(0, -inv_dx), (1, inv_dx)], 2)
            } else if i == n - 1 {
                ([(n - 2, -inv_dx), (n - 1, inv_dx)], 2)
            } else {
                ([(i - 1, -inv_2dx), (i + 1, inv_2dx)], 2)
            }
        }
        Boundary::Periodic => {
            if i == 0 {
                ([(n - 1, -inv_2dx), (1, inv_2dx)], 2)
            } else if i == n - 1 {
                ([(n - 2, -inv_2dx), (0, inv_2dx)], 2)
            } else {
                ([(i - 1, -inv_2dx), (i + 1, inv_2dx)], 2)
            }
        }
    }
}

/// Shared banded assembly.  Per component `c` the row at node `i` gets
/// `diff[c]·Laplacian + adv[c]·gradient` plus the reaction Jacobian scaled by
/// `jac_scale[c]`.
fn assemble<M: ModelSpec>(
    grid: &Grid1,
    model: &M,
    state: &Field1,
    diff: [f64; 3],
    adv: [f64; 3],
    jac_scale: [f64; 3],
) -> BandedMatrix<f64> {
    let n = grid.n;
    assert_eq!(state.n, n);
    assert_eq!(state.n_comp, N_COMP);
    let fold = FoldOrder::new(n);
    let mut a = BandedMatrix::zeros(N_COMP * n, BANDWIDTH, BANDWIDTH);
    for i in 0..n {
        let (lap, n_lap) = laplacian_stencil(grid, i);
        let (grd, n_grd) = gradient_stencil(grid, i);
        let jac = model.jacobian(&state.point(i));
        for c in 0..N_COMP {
            let row = fold.index(i, c);
            for &(j, w) in &lap[..n_lap] {
                a.add(row, fold.index(j, c), diff[c] * w);
            }
            if adv[c] != 0.0 {
                for &(j, w) in &grd[..n_grd] {
                    a.add(row, fold.index(j, c), adv[c] * w);
                }
            }
            for c2 in 0..N_COMP {
                a.add(row, fold.index(i, c2), jac_scale[c] * jac[c][c2]);
            }
        }
    }
    a
}

/// Jacobian of the comoving steady residual `D S_zz + c T S_z + F(S)` with
/// respect to `S`, in the interleaved fold layout.  Rows carry physical
/// (unscaled) units; this is the matrix the pulse Newton solvers factor.
pub fn steady_jacobian<M: ModelSpec>(
    grid: &Grid1,
    model: &M,
    state: &Field1,
    speed: f64,
) -> BandedMatrix<f64> {
    let d = model.diffusion();
    let tau = model.time_constants();
    let adv = [speed * tau[0], speed * tau[1], speed * tau[2]];
    assemble(grid, model, state, d, adv, [1.0; 3])
}

/// Generator of the linearized comoving dynamics,
/// `T⁻¹(D ∂_zz + F'(S)) + c ∂_z`, in the interleaved fold layout.  Its
/// spectrum gives the physical growth rates; the translation mode `S_z` lies
/// in its kernel when `S` solves the steady equation.
pub fn evolution_operator<M: ModelSpec>(
    grid: &Grid1,
    model: &M,
    state: &Field1,
    speed: f64,
) -> BandedMatrix<f64> {
    let d = model.diffusion();
    let tau = model.time_constants();
    let diff = [d[0] / tau[0], d[1] / tau[1], d[2] / tau[2]];
    let jac_scale = [1.0 / tau[0], 1.0 / tau[1], 1.0 / tau[2]];
    assemble(grid, model, state, diff, [speed; 3], jac_scale)
}

/// Comoving steady residual `R = D S_zz + c T S_z + F(S)` in natural
/// component-major layout (matching [`Field1::as_slice`]).
pub fn steady_residual<M: ModelSpec>(
    grid: &Grid1,
    model: &M,
    state: &Field1,
    speed: f64,
    out: &mut [f64],
) {
    let n = grid.n;
    assert_eq!(out.len(), N_COMP * n);
    let d = model.diffusion();
    let tau = model.time_constants();
    let mut lap = vec![0.0; n];
    let mut grd = vec![0.0; n];
    for c in 0..N_COMP {
        grid.laplacian(state.comp(c), &mut lap);
        grid.gradient(state.comp(c), &mut grd);
        let out_c = &mut out[c * n..(c + 1) * n];
        for i in 0..n {
            out_c[i] = d[c] * lap[i] + speed * tau[c] * grd[i];
        }
    }
    for i in 0..n {
        let f = model.reaction(&state.point(i));
        for c in 0..N_COMP {
            out[c * n + i] += f[c];
        }
    }
}

/// Spatial derivative of every component of a field, natural layout.
pub fn state_derivative(grid: &Grid1, state: &Field1) -> Vec<f64> {
    let n = grid.n;
    let mut out = vec![0.0; N_COMP * n];
    for c in 0..N_COMP {
        grid.gradient(state.comp(c), &mut out[c * n..(c + 1) * n]);
    }
    out
}

/// Quadrature weight of node `i`: trapezoid on Neumann grids (half weight at
/// the walls), uniform on periodic grids.  Includes the `dx` factor.
pub fn node_weight(grid: &Grid1, i: usize) -> f64 {
    match grid.bc {
        Boundary::Neumann => {
            if i == 0 || i == grid.n - 1 {
                0.5 * grid.dx
            } else {
                grid.dx
            }
        }
        Boundary::Periodic => grid.dx,
    }
}

/// Weighted inner product `Σ_c Σ_i w_i f g dx` of two natural-layout vectors
/// covering all components.
pub fn inner(grid: &Grid1, f: &[f64], g: &[f64]) -> f64 {
    let n = grid.n;
    assert_eq!(f.len(), N_COMP * n);
    assert_eq!(g.len(), N_COMP * n);
    let mut acc = 0.0;
    for i in 0..n {
        let w = node_weight(grid, i);
        for c in 0..N_COMP {
            acc += w * f[c * n + i] * g[c * n + i];
        }
    }
    acc
}

/// Bilinear (unconjugated) weighted pairing of two complex natural-layout
/// vectors.  Used for the adjoint normalizations, which are identities of the
/// transposed matrix rather than Hermitian inner products.
pub fn inner_bilinear(grid: &Grid1, f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let n = grid.n;
    assert_eq!(f.len(), N_COMP * n);
    assert_eq!(g.len(), N_COMP * n);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let w = node_weight(grid, i);
        for c in 0..N_COMP {
            acc += w * f[c * n + i] * g[c * n + i];
        }
    }
    acc
}

/// Weighted L² norm derived from [`inner`].
pub fn norm(grid: &Grid1, f: &[f64]) -> f64 {
    inner(grid, f, f).sqrt()
}

/// Reflection of a natural-layout vector about the grid node closest to
/// `center`.  On periodic grids indices wrap; on Neumann grids samples
/// reflected outside the domain are dropped pairwise (caller should ensure
/// the profile is centered for a meaningful parity measure).
pub fn reflect_about(grid: &Grid1, f: &[f64], center: f64) -> Vec<f64> {
    let n = grid.n;
    assert_eq!(f.len(), N_COMP * n);
    let ic = (center / grid.dx).round() as i64;
    let mut out = f.to_vec();
    for c in 0..N_COMP {
        for i in 0..n {
            let j = 2 * ic - i as i64;
            let j = match grid.bc {
                Boundary::Periodic => Some(j.rem_euclid(n as i64) as usize),
                Boundary::Neumann => {
                    if (0..n as i64).contains(&j) {
                        Some(j as usize)
                    } else {
                        None
                    }
                }
            };
            if let Some(j) = j {
                out[c * n + i] = f[c * n + j];
            }
        }
    }
    out
}

/// Parity defect pair `(even, odd)` of a vector about `center`:
/// `even = ‖f − Rf‖_w / ‖f‖_w` vanishes for symmetric vectors,
/// `odd = ‖f + Rf‖_w / ‖f‖_w` for antisymmetric ones (all norms in the same
/// weighted metric, so the defects are scale- and resolution-free).
///
/// On a periodic grid the node diametrically opposite `center` is its own
/// reflection image; an antisymmetric vector with tails still alive there
/// picks up an odd defect of order twice the tail value, which is a real
/// property of the discretized function, not a measurement artifact.
pub fn parity_defects(grid: &Grid1, f: &[f64], center: f64) -> (f64, f64) {
    let n = grid.n;
    let r = reflect_about(grid, f, center);
    let scale = norm(grid, f).max(f64::MIN_POSITIVE);
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (k, (a, b)) in f.iter().zip(&r).enumerate() {
        let w = node_weight(grid, k % n);
        diff += w * (a - b) * (a - b);
        sum += w * (a + b) * (a + b);
    }
    (diff.sqrt() / scale, sum.sqrt() / scale)
}
