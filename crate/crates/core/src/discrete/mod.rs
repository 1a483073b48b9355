//! Finite-difference 2D absorptive Helmholtz on a strip of unit squares,
//! one-level ORAS preconditioning and GMRES iteration-count scans.
//!
//! The domain `(0, N) × (0, 1)` carries a uniform grid with `n_per_unit`
//! points per unit length, so neighbouring unit squares share a grid column.
//! Unknowns are ordered column by column (`ix * ny + iy`), which makes every
//! matrix banded with bandwidth `ny`.
//!
//! Rows are scaled so that interior rows read
//! `4u − Σ neighbours + (ikσ − k²) h² u` and impedance rows read
//! `Σ_sides (u − u_inner) + ik h |sides| u = h g`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{gmres, BandedLu, CsrMatrix, IdentityOperator, LinearOperator, SolveReport};
use crate::schwarz1d::zeta_1d;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// GMRES relative residual tolerance used by the scans.
pub const SCAN_TOLERANCE: f64 = 1e-6;
/// Iteration cap per solve (full memory, no restart).
pub const SCAN_MAX_ITER: usize = 400;
/// Constant `c` in `n_per_unit = max(17, round(c k^{3/4}))`.
pub const GRID_CONSTANT: f64 = 3.0;
pub const MIN_POINTS_PER_UNIT: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCase {
    /// Dirichlet on top and bottom, impedance left and right.
    WaveGuide,
    /// Impedance on all four sides.
    FreeSpace,
}

impl BoundaryCase {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCase::WaveGuide => "waveguide",
            BoundaryCase::FreeSpace => "freespace",
        }
    }
}

impl fmt::Display for BoundaryCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "waveguide" => Ok(BoundaryCase::WaveGuide),
            "freespace" => Ok(BoundaryCase::FreeSpace),
            _ => Err(Error::Configuration(format!("unknown boundary case '{s}' (expected waveguide or freespace)"))),
        }
    }
}

/// Grid points per unit length for wave number `k` at desk scale.
pub fn points_per_unit(k: f64) -> usize {
    let n = (GRID_CONSTANT * k.abs().powf(0.75)).round() as usize;
    n.max(MIN_POINTS_PER_UNIT)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProblem {
    pub k: f64,
    pub sigma: f64,
    pub n_per_unit: usize,
    pub n_sub: usize,
    pub case: BoundaryCase,
    pub overlap_cells: usize,
}

impl DiscreteProblem {
    pub fn new(k: f64, sigma: f64, n_per_unit: usize, n_sub: usize, case: BoundaryCase) -> Result<Self> {
        let p = Self { k, sigma, n_per_unit, n_sub, case, overlap_cells: 2 };
        p.validate()?;
        Ok(p)
    }

    /// Grid chosen by [`points_per_unit`].
    pub fn desk_scale(k: f64, sigma: f64, n_sub: usize, case: BoundaryCase) -> Result<Self> {
        Self::new(k, sigma, points_per_unit(k), n_sub, case)
    }

    pub fn with_overlap(mut self, cells: usize) -> Result<Self> {
        self.overlap_cells = cells;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k >= 0.0) {
            return Err(Error::Configuration(format!("k must be finite and ≥ 0, got {}", self.k)));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Configuration(format!("sigma must be finite and ≥ 0, got {}", self.sigma)));
        }
        if self.n_per_unit < 9 {
            return Err(Error::Configuration(format!("n_per_unit must be ≥ 9, got {}", self.n_per_unit)));
        }
        if self.n_sub == 0 {
            return Err(Error::Configuration("at least one subdomain is required".into()));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n_per_unit - 1) as f64
    }

    pub fn nx(&self) -> usize {
        self.n_sub * (self.n_per_unit - 1) + 1
    }

    pub fn ny(&self) -> usize {
        self.n_per_unit
    }

    pub fn unknowns(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny() + iy
    }

    /// `ζ` of the incoming plane wave `e^{−ζx}`.
    pub fn zeta(&self) -> Complex64 {
        zeta_1d(self.k, self.sigma)
    }

    /// Impedance data `(∂_n + ik) e^{−ζx}` at `x = 0`.
    pub fn inflow_data(&self) -> Complex64 {
        self.zeta() + Complex64::new(0.0, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Columns `[first, last]` of the global grid, with artificial (Robin)
/// conditions on the ends flagged.
#[derive(Debug, Clone, Copy)]
struct Patch {
    first: usize,
    last: usize,
    robin_left: bool,
    robin_right: bool,
}

fn assemble_patch(p: &DiscreteProblem, patch: Patch) -> (CsrMatrix, Vec<Complex64>) {
    let (nx, ny) = (p.nx(), p.ny());
    let h = p.h();
    let ikh = Complex64::new(0.0, p.k * h);
    let mass = Complex64::new(-p.k * p.k, p.k * p.sigma) * h * h;
    let width = patch.last - patch.first + 1;
    let local = |ix: usize, iy: usize| (ix - patch.first) * ny + iy;
    let mut mat = CsrMatrix::with_dim(width * ny);
    let mut rhs = vec![ZERO; width * ny];
    let g_left = p.inflow_data();
    let mut sides = Vec::with_capacity(4);
    let mut row = Vec::with_capacity(5);
    for ix in patch.first..=patch.last {
        for iy in 0..ny {
            let me = local(ix, iy);
            row.clear();
            let on_y_edge = iy == 0 || iy == ny - 1;
            if on_y_edge && p.case == BoundaryCase::WaveGuide {
                row.push((me, ONE));
                mat.push_row(&row);
                continue;
            }
            sides.clear();
            if ix == 0 || (ix == patch.first && patch.robin_left) {
                sides.push(Side::Left);
            }
            if ix == nx - 1 || (ix == patch.last && patch.robin_right) {
                sides.push(Side::Right);
            }
            if iy == 0 {
                sides.push(Side::Bottom);
            }
            if iy == ny - 1 {
                sides.push(Side::Top);
            }
            if sides.is_empty() {
                row.push((me, Complex64::new(4.0, 0.0) + mass));
                for (jx, jy) in [(ix - 1, iy), (ix + 1, iy), (ix, iy - 1), (ix, iy + 1)] {
                    row.push((local(jx, jy), -ONE));
                }
            } else {
                // One-sided (∂_n + ik) u = g per side, summed at corners.
                let mut diag = ikh * sides.len() as f64;
                for &s in &sides {
                    let inner = match s {
                        Side::Left => (ix + 1, iy),
                        Side::Right => (ix - 1, iy),
                        Side::Bottom => (ix, iy + 1),
                        Side::Top => (ix, iy - 1),
                    };
                    diag += ONE;
                    row.push((local(inner.0, inner.1), -ONE));
                    if s == Side::Left && ix == 0 {
                        rhs[me] += g_left * h;
                    }
                }
                row.push((me, diag));
            }
            mat.push_row(&row);
        }
    }
    (mat, rhs)
}

/// Global system `A u = f`.
pub fn assemble(p: &DiscreteProblem) -> Result<(CsrMatrix, Vec<Complex64>)> {
    p.validate()?;
    Ok(assemble_patch(p, Patch { first: 0, last: p.nx() - 1, robin_left: false, robin_right: false }))
}

/// Sparse direct solve of the global system.
pub fn direct_solve(p: &DiscreteProblem) -> Result<Vec<Complex64>> {
    let (a, f) = assemble(p)?;
    Ok(a.banded_lu()?.solve(&f))
}

struct Subdomain {
    /// First global grid column.
    first: usize,
    width: usize,
    weights: Vec<f64>,
    lu: BandedLu,
}

/// `M⁻¹ = Σ Rᵢᵀ Dᵢ Aᵢ⁻¹ Rᵢ` over overlapping vertical strips.
pub struct OrasPreconditioner {
    n: usize,
    ny: usize,
    subdomains: Vec<Subdomain>,
}

impl OrasPreconditioner {
    pub fn subdomain_count(&self) -> usize {
        self.subdomains.len()
    }

    /// Global grid columns `[first, last]` of subdomain `i` (zero based).
    pub fn columns(&self, i: usize) -> (usize, usize) {
        let s = &self.subdomains[i];
        (s.first, s.first + s.width - 1)
    }

    /// `max |Σᵢ Rᵢᵀ Dᵢ Rᵢ 1 − 1|`
    pub fn partition_of_unity_error(&self) -> f64 {
        let mut sum = vec![0.0; self.n];
        for s in &self.subdomains {
            let off = s.first * self.ny;
            for (j, w) in s.weights.iter().enumerate() {
                sum[off + j] += w;
            }
        }
        sum.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
    }
}

impl LinearOperator for OrasPreconditioner {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        let mut buf = Vec::new();
        for s in &self.subdomains {
            let off = s.first * self.ny;
            let len = s.width * self.ny;
            buf.clear();
            buf.extend_from_slice(&x[off..off + len]);
            s.lu.solve_in_place(&mut buf);
            for (j, v) in buf.iter().enumerate() {
                y[off + j] += v * s.weights[j];
            }
        }
    }
}

pub fn build_oras(p: &DiscreteProblem) -> Result<OrasPreconditioner> {
    p.validate()?;
    let cells = p.n_per_unit - 1;
    let ov = p.overlap_cells;
    if ov == 0 {
        return Err(Error::Configuration("overlap_cells must be ≥ 1".into()));
    }
    if p.n_sub > 1 && cells < 2 * ov + 1 {
        return Err(Error::Configuration(format!(
            "subdomain of {cells} cells is too narrow for an overlap of {ov} cells on each side"
        )));
    }
    let nx = p.nx();
    let ny = p.ny();
    let ranges: Vec<(usize, usize)> = (0..p.n_sub)
        .map(|i| {
            let first = (i * cells).saturating_sub(ov);
            let last = ((i + 1) * cells + ov).min(nx - 1);
            (first, last)
        })
        .collect();
    let mut owners = vec![0u32; nx];
    for &(a, b) in &ranges {
        for o in &mut owners[a..=b] {
            *o += 1;
        }
    }
    let mut subdomains = Vec::with_capacity(p.n_sub);
    for &(first, last) in &ranges {
        let patch = Patch { first, last, robin_left: first > 0, robin_right: last < nx - 1 };
        let (mat, _) = assemble_patch(p, patch);
        let lu = mat.banded_lu()?;
        let width = last - first + 1;
        let weights = (first..=last)
            .flat_map(|ix| std::iter::repeat_n(1.0 / owners[ix] as f64, ny))
            .collect();
        subdomains.push(Subdomain { first, width, weights, lu });
    }
    Ok(OrasPreconditioner { n: p.unknowns(), ny, subdomains })
}

/// Outcome of one preconditioned solve.
#[derive(Debug, Clone)]
pub struct DiscreteSolve {
    pub report: SolveReport,
    /// `‖u_gmres − u_direct‖ / ‖u_direct‖`, when a direct reference was computed.
    pub error_vs_direct: Option<f64>,
}

pub fn solve_oras(p: &DiscreteProblem, tol: f64, max_iter: usize, check_direct: bool) -> Result<DiscreteSolve> {
    let (a, f) = assemble(p)?;
    let m = build_oras(p)?;
    let report = gmres(&a, &m, &f, tol, max_iter)?;
    let error_vs_direct = if check_direct {
        let u = a.banded_lu()?.solve(&f);
        Some(relative_difference(&report.solution, &u))
    } else {
        None
    };
    Ok(DiscreteSolve { report, error_vs_direct })
}

/// Unpreconditioned GMRES on the same system.
pub fn solve_plain(p: &DiscreteProblem, tol: f64, max_iter: usize) -> Result<SolveReport> {
    let (a, f) = assemble(p)?;
    gmres(&a, &IdentityOperator(a.dim()), &f, tol, max_iter)
}

fn relative_difference(x: &[Complex64], y: &[Complex64]) -> f64 {
    let num: f64 = x.iter().zip(y).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountRow {
    pub case: BoundaryCase,
    pub k: f64,
    pub n_sub: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CountTable {
    pub rows: Vec<CountRow>,
}

impl CountTable {
    pub fn get(&self, case: BoundaryCase, k: f64, n_sub: usize) -> Option<&CountRow> {
        self.rows.iter().find(|r| r.case == case && r.k == k && r.n_sub == n_sub)
    }

    /// Counts for one `(case, k)` in the order the `N` values were scanned.
    pub fn series(&self, case: BoundaryCase, k: f64) -> Vec<(usize, usize)> {
        self.rows.iter().filter(|r| r.case == case && r.k == k).map(|r| (r.n_sub, r.iterations)).collect()
    }

    pub fn merge(&mut self, other: CountTable) {
        self.rows.extend(other.rows);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("case,k,N,iterations,converged\n");
        for r in &self.rows {
            s.push_str(&format!("{},{:.16e},{},{},{}\n", r.case, r.k, r.n_sub, r.iterations, r.converged));
        }
        s
    }
}

/// Solver settings for [`scan_counts_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub overlap_cells: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { tol: SCAN_TOLERANCE, max_iter: SCAN_MAX_ITER, overlap_cells: 2 }
    }
}

/// GMRES(ORAS) counts for every `(k, N)` pair on the desk-scale grid.
pub fn scan_counts(k_list: &[f64], n_list: &[usize], sigma: f64, case: BoundaryCase) -> Result<CountTable> {
    scan_counts_with(k_list, n_list, sigma, case, &ScanOptions::default())
}

/// As [`scan_counts`]. Non-convergence is recorded in the row; only setup
/// failures are errors. Cells run on separate threads.
pub fn scan_counts_with(
    k_list: &[f64],
    n_list: &[usize],
    sigma: f64,
    case: BoundaryCase,
    opts: &ScanOptions,
) -> Result<CountTable> {
    if k_list.is_empty() || n_list.is_empty() {
        return Err(Error::Configuration("k and N lists must be nonempty".into()));
    }
    let cells: Vec<(f64, usize)> = k_list.iter().flat_map(|&k| n_list.iter().map(move |&n| (k, n))).collect();
    let results: Vec<Result<CountRow>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .map(|&(k, n_sub)| {
                scope.spawn(move || {
                    let p = DiscreteProblem::desk_scale(k, sigma, n_sub, case)?.with_overlap(opts.overlap_cells)?;
                    let s = solve_oras(&p, opts.tol, opts.max_iter, false)?;
                    Ok(CountRow { case, k, n_sub, iterations: s.report.iterations, converged: s.report.converged() })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scan cell panicked")).collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CountTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(k: f64, n: usize, n_sub: usize, case: BoundaryCase) -> DiscreteProblem {
        DiscreteProblem::new(k, 1.0, n, n_sub, case).unwrap()
    }

    #[test]
    fn interior_stencil_sum() {
        let p = problem(7.0, 9, 2, BoundaryCase::WaveGuide);
        let (a, _) = assemble(&p).unwrap();
        let i = p.index(5, 4);
        let sum: Complex64 = a.row(i).map(|e| e.1).sum();
        let h = p.h();
        let expect = Complex64::new(-p.k * p.k, p.k * p.sigma) * h * h;
        assert!((sum - expect).norm() < 1e-14);
    }

    #[test]
    fn zero_wavenumber_dirichlet_rows() {
        let p = DiscreteProblem::new(0.0, 0.0, 9, 1, BoundaryCase::WaveGuide).unwrap();
        let (a, f) = assemble(&p).unwrap();
        for ix in 0..p.nx() {
            for iy in [0, p.ny() - 1] {
                let i = p.index(ix, iy);
                let row: Vec<_> = a.row(i).collect();
                assert_eq!(row, vec![(i, ONE)]);
                assert_eq!(f[i], ZERO);
            }
        }
        let interior = p.index(3, 3);
        assert_eq!(a.get(interior, interior), Complex64::new(4.0, 0.0));
    }

    #[test]
    fn free_space_has_no_identity_rows() {
        let p = problem(5.0, 9, 2, BoundaryCase::FreeSpace);
        let (a, f) = assemble(&p).unwrap();
        let corner = p.index(0, 0);
        assert_eq!(a.row(corner).count(), 3);
        assert!((f[corner] - p.inflow_data() * p.h()).norm() < 1e-15);
    }

    #[test]
    fn partition_of_unity() {
        for n_sub in [1, 2, 5] {
            let m = build_oras(&problem(5.0, 11, n_sub, BoundaryCase::WaveGuide)).unwrap();
            assert_eq!(m.partition_of_unity_error(), 0.0);
            assert_eq!(m.subdomain_count(), n_sub);
        }
    }

    #[test]
    fn single_subdomain_is_exact_solve() {
        let p = problem(6.0, 13, 1, BoundaryCase::FreeSpace);
        let (a, f) = assemble(&p).unwrap();
        let m = build_oras(&p).unwrap();
        let mut y = vec![ZERO; f.len()];
        m.apply(&f, &mut y);
        let u = a.banded_lu().unwrap().solve(&f);
        assert!(relative_difference(&y, &u) < 1e-13);
    }

    #[test]
    fn narrow_subdomain_is_rejected() {
        let p = problem(5.0, 9, 3, BoundaryCase::WaveGuide).with_overlap(4);
        let err = p.and_then(|p| build_oras(&p).map(|_| ()));
        assert!(matches!(err, Err(Error::Configuration(_))));
    }

    #[test]
    fn oras_solution_matches_direct() {
        let p = problem(10.0, 17, 4, BoundaryCase::WaveGuide);
        let s = solve_oras(&p, 1e-10, 200, true).unwrap();
        assert!(s.report.converged());
        assert!(s.error_vs_direct.unwrap() < 1e-8);
    }

    #[test]
    fn case_parsing() {
        assert_eq!("wave-guide".parse::<BoundaryCase>().unwrap(), BoundaryCase::WaveGuide);
        assert_eq!("FreeSpace".parse::<BoundaryCase>().unwrap(), BoundaryCase::FreeSpace);
        assert!("open".parse::<BoundaryCase>().is_err());
    }

    #[test]
    fn grid_rule() {
        assert_eq!(points_per_unit(1.0), MIN_POINTS_PER_UNIT);
        assert_eq!(points_per_unit(20.0), 28);
    }
}
