//! Finite-difference forward solver on a uniform radial grid.
//!
//! Rows of the linear system, with `h = 1/N` and nodes `rᵢ = i h`:
//!
//! - `i = 0`: symmetry closure `4(ψ₁ − ψ₀)/h² − σ₁⁻¹ψ₀ = 0`, or `ψ₀ = c` when
//!   the centre value is pinned.
//! - interior `i ≠ i*`: `(r_{i+½}(ψ_{i+1} − ψᵢ) − r_{i−½}(ψᵢ − ψ_{i−1}))/(rᵢh²) − mᵢψᵢ = 0`
//!   with `mᵢ = σ₁⁻¹` in the core and `1` in the shell.
//! - interface `i*`: one-sided flux balance `σ₁(ψ_{i*} − ψ_{i*−1}) = ψ_{i*+1} − ψ_{i*}`.
//! - `i = N`: `ψ_N = f`.
//!
//! The system is tridiagonal and solved by the Thomas algorithm. The Neumann
//! datum is the one-sided difference `(ψ_N − ψ_{N−1})/h`, first-order in `h`.

use std::io::{self, Write};

use crate::dnmap::PotentialProfile;
use crate::error::{Error, Result};
use crate::real::Real;

/// Minimum number of intervals.
pub const MIN_INTERVALS: usize = 10;
/// Tolerance for `r₁·N` being an integer.
pub const ALIGNMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid<T> {
    n_intervals: usize,
    step: T,
    interface_index: usize,
}

impl<T: Real> RadialGrid<T> {
    /// Grid of `n` intervals whose node `interface_index` sits on `r1`.
    pub fn new(n: usize, r1: T) -> Result<Self> {
        if n < MIN_INTERVALS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_INTERVALS} intervals, got {n}"
            )));
        }
        let product = r1 * T::from_usize_exact(n);
        let nearest = product.round();
        if (product - nearest).abs() > T::lit(ALIGNMENT_TOLERANCE) || nearest < T::one() || nearest >= T::from_usize_exact(n) {
            return Err(Error::GridAlignment {
                r1: r1.to_f64_lossy(),
                n,
                product: product.to_f64_lossy(),
            });
        }
        let interface_index = nearest.to_usize().expect("index in range");
        Ok(Self {
            n_intervals: n,
            step: T::one() / T::from_usize_exact(n),
            interface_index,
        })
    }

    /// Grid without an interface, for the homogeneous disk.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < MIN_INTERVALS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_INTERVALS} intervals, got {n}"
            )));
        }
        Ok(Self {
            n_intervals: n,
            step: T::one() / T::from_usize_exact(n),
            interface_index: n,
        })
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn interface_index(&self) -> usize {
        self.interface_index
    }

    pub fn node(&self, i: usize) -> T {
        T::from_usize_exact(i) / T::from_usize_exact(self.n_intervals)
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..=self.n_intervals).map(move |i| self.node(i))
    }
}

/// Solver switches.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FdOptions<T> {
    /// Replace the symmetry closure at `r = 0` by `ψ₀ = value`.
    pub pin_center: Option<T>,
}

/// Tridiagonal system `lower[i]·x[i−1] + diag[i]·x[i] + upper[i]·x[i+1] = rhs[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
    pub rhs: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    fn zeros(n: usize) -> Self {
        Self {
            lower: vec![T::zero(); n],
            diag: vec![T::zero(); n],
            upper: vec![T::zero(); n],
            rhs: vec![T::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Thomas algorithm.
    pub fn solve(&self) -> Result<Vec<T>> {
        let n = self.len();
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        let tiny = T::min_positive_value();
        for i in 0..n {
            let (lower, prev_c, prev_d) = if i == 0 {
                (T::zero(), T::zero(), T::zero())
            } else {
                (self.lower[i], c[i - 1], d[i - 1])
            };
            let pivot = self.diag[i] - lower * prev_c;
            if !(pivot.abs() > tiny) {
                return Err(Error::Singular { row: i });
            }
            c[i] = self.upper[i] / pivot;
            d[i] = (self.rhs[i] - lower * prev_d) / pivot;
        }
        let mut x = d;
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] = x[i] - c[i] * x[i + 1];
        }
        Ok(x)
    }

    /// Largest row residual, each row divided by its largest coefficient
    /// magnitude (and by `max(1, |x|∞)`).
    pub fn scaled_residual(&self, x: &[T]) -> T {
        let n = self.len();
        let xmax = x.iter().fold(T::one(), |m, v| m.max(v.abs()));
        let mut worst = T::zero();
        for i in 0..n {
            let mut r = self.diag[i] * x[i] - self.rhs[i];
            if i > 0 {
                r = r + self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                r = r + self.upper[i] * x[i + 1];
            }
            let scale = self.lower[i].abs().max(self.diag[i].abs()).max(self.upper[i].abs());
            worst = worst.max(r.abs() / (scale * xmax));
        }
        worst
    }
}

/// Assembles the core-shell system described in the module docs.
pub fn assemble<T: Real>(
    f: T,
    profile: &PotentialProfile<T>,
    grid: &RadialGrid<T>,
    options: &FdOptions<T>,
) -> Tridiagonal<T> {
    assemble_rows(f, profile.sigma1(), grid, options)
}

fn assemble_rows<T: Real>(f: T, sigma1: T, grid: &RadialGrid<T>, options: &FdOptions<T>) -> Tridiagonal<T> {
    let n = grid.n_intervals();
    let h = grid.step();
    let h2 = h * h;
    let half = T::lit(0.5);
    let core_mass = sigma1.recip();
    let iface = grid.interface_index();
    let mut sys = Tridiagonal::zeros(n + 1);

    match options.pin_center {
        Some(value) => {
            sys.diag[0] = T::one();
            sys.rhs[0] = value;
        }
        None => {
            let four = T::lit(4.0) / h2;
            sys.diag[0] = -four - core_mass;
            sys.upper[0] = four;
        }
    }

    for i in 1..n {
        if i == iface {
            sys.lower[i] = -sigma1;
            sys.diag[i] = sigma1 + T::one();
            sys.upper[i] = -T::one();
            continue;
        }
        let mass = if i < iface { core_mass } else { T::one() };
        let fi = T::from_usize_exact(i);
        // r_{i±½}/(rᵢh²) = (i ± ½)/(i h²)
        let west = (fi - half) / (fi * h2);
        let east = (fi + half) / (fi * h2);
        sys.lower[i] = west;
        sys.upper[i] = east;
        sys.diag[i] = -(west + east) - mass;
    }

    sys.diag[n] = T::one();
    sys.rhs[n] = f;
    sys
}

/// Discrete solution with the extracted Neumann datum.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSolution<T> {
    pub grid: RadialGrid<T>,
    pub values: Vec<T>,
    pub neumann: T,
}

impl<T: Real> FdSolution<T> {
    pub fn center(&self) -> T {
        self.values[0]
    }

    /// Writes `r,psi` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "r,psi")?;
        for (r, psi) in self.grid.nodes().zip(&self.values) {
            writeln!(out, "{},{}", r, psi)?;
        }
        Ok(())
    }
}

/// One-sided difference `(ψ(1) − ψ(1 − h))/h` at the outer boundary.
pub fn neumann_forward_difference<T: Real>(sol: &FdSolution<T>) -> T {
    let n = sol.values.len() - 1;
    (sol.values[n] - sol.values[n - 1]) / sol.grid.step()
}

pub fn solve_fd<T: Real>(f: T, profile: &PotentialProfile<T>, n: usize) -> Result<FdSolution<T>> {
    solve_fd_with(f, profile, n, &FdOptions::default())
}

pub fn solve_fd_with<T: Real>(
    f: T,
    profile: &PotentialProfile<T>,
    n: usize,
    options: &FdOptions<T>,
) -> Result<FdSolution<T>> {
    check_boundary_value(f)?;
    let grid = RadialGrid::new(n, profile.r1())?;
    let sys = assemble(f, profile, &grid, options);
    finish(grid, &sys)
}

/// Homogeneous disk (`σ ≡ 1`, no interface) on `n` intervals.
pub fn solve_fd_disk<T: Real>(f: T, n: usize) -> Result<FdSolution<T>> {
    check_boundary_value(f)?;
    let grid = RadialGrid::uniform(n)?;
    let sys = assemble_rows(f, T::one(), &grid, &FdOptions::default());
    finish(grid, &sys)
}

fn check_boundary_value<T: Real>(f: T) -> Result<()> {
    if !f.is_finite() {
        return Err(Error::InvalidParameter(format!("boundary value f must be finite, got {f}")));
    }
    Ok(())
}

fn finish<T: Real>(grid: RadialGrid<T>, sys: &Tridiagonal<T>) -> Result<FdSolution<T>> {
    let mut values = sys.solve()?;
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Singular { row: i });
    }
    // The Dirichlet row is exact; remove any round-off from back substitution.
    let n = grid.n_intervals();
    values[n] = sys.rhs[n];
    let mut sol = FdSolution {
        grid,
        values,
        neumann: T::zero(),
    };
    sol.neumann = neumann_forward_difference(&sol);
    Ok(sol)
}
