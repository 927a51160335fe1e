//! Proper orthogonal decomposition of displacement snapshots, projection of
//! data onto the reduced basis, and finite-difference derivative estimation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Displacement/input snapshots on a uniform time grid.
///
/// Velocity and acceleration snapshots are optional; when absent they are
/// estimated by second-order finite differences during [`reduce`].
#[derive(Debug, Clone)]
pub struct SnapshotSet {
    times: DVector<f64>,
    y: DMatrix<f64>,
    u: DMatrix<f64>,
    ydot: Option<DMatrix<f64>>,
    yddot: Option<DMatrix<f64>>,
}

impl SnapshotSet {
    pub fn new(times: DVector<f64>, y: DMatrix<f64>, u: DMatrix<f64>) -> Result<Self> {
        let n_snap = times.len();
        if n_snap < 5 {
            return Err(Error::InvalidSnapshots(format!(
                "need at least 5 snapshots for second-order finite differences, got {n_snap}"
            )));
        }
        if y.ncols() != n_snap || u.ncols() != n_snap {
            return Err(Error::InvalidSnapshots(format!(
                "column counts disagree: times {}, Y {}, U {}",
                n_snap,
                y.ncols(),
                u.ncols()
            )));
        }
        let dt = times[1] - times[0];
        if dt <= 0.0 {
            return Err(Error::InvalidSnapshots(
                "times must be strictly increasing".into(),
            ));
        }
        for i in 1..n_snap {
            let step = times[i] - times[i - 1];
            if (step - dt).abs() > 1e-9 * dt.abs() {
                return Err(Error::InvalidSnapshots(format!(
                    "non-uniform time grid at index {i}: step {step} vs {dt}"
                )));
            }
        }
        if y.iter().any(|v| !v.is_finite())
            || u.iter().any(|v| !v.is_finite())
            || times.iter().any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("snapshot set".into()));
        }
        Ok(Self {
            times,
            y,
            u,
            ydot: None,
            yddot: None,
        })
    }

    /// Attaches simulator-provided velocity and acceleration snapshots,
    /// bypassing finite differencing.
    pub fn with_derivatives(mut self, ydot: DMatrix<f64>, yddot: DMatrix<f64>) -> Result<Self> {
        if ydot.shape() != self.y.shape() || yddot.shape() != self.y.shape() {
            return Err(Error::InvalidSnapshots(
                "derivative snapshot shapes disagree with Y".into(),
            ));
        }
        if ydot.iter().any(|v| !v.is_finite()) || yddot.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("derivative snapshots".into()));
        }
        self.ydot = Some(ydot);
        self.yddot = Some(yddot);
        Ok(self)
    }

    pub fn times(&self) -> &DVector<f64> {
        &self.times
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn has_derivatives(&self) -> bool {
        self.ydot.is_some()
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn num_snapshots(&self) -> usize {
        self.times.len()
    }

    pub fn num_dofs(&self) -> usize {
        self.y.nrows()
    }

    pub fn num_inputs(&self) -> usize {
        self.u.nrows()
    }
}

/// POD basis with the full singular-value spectrum.
///
/// The full spectrum is retained (not just the leading `r` values) because
/// the cluster importance index normalizes by the total POD energy.
#[derive(Debug, Clone)]
pub struct PodBasis {
    pub v: DMatrix<f64>,
    pub sigma_full: DVector<f64>,
}

impl PodBasis {
    pub fn rank(&self) -> usize {
        self.v.ncols()
    }
}

/// Reduced snapshot data ready for operator inference.
#[derive(Debug, Clone)]
pub struct ReducedDataset {
    pub v: DMatrix<f64>,
    /// Leading `r` singular values.
    pub sigma: DVector<f64>,
    pub x: DMatrix<f64>,
    pub xdot: DMatrix<f64>,
    pub xddot: DMatrix<f64>,
    pub u: DMatrix<f64>,
    pub dt: f64,
}

impl ReducedDataset {
    pub fn rank(&self) -> usize {
        self.v.ncols()
    }

    pub fn num_snapshots(&self) -> usize {
        self.x.ncols()
    }

    pub fn num_inputs(&self) -> usize {
        self.u.nrows()
    }

    /// Keeps only the first `n` snapshot columns.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.num_snapshots());
        Self {
            v: self.v.clone(),
            sigma: self.sigma.clone(),
            x: self.x.columns(0, n).into_owned(),
            xdot: self.xdot.columns(0, n).into_owned(),
            xddot: self.xddot.columns(0, n).into_owned(),
            u: self.u.columns(0, n).into_owned(),
            dt: self.dt,
        }
    }
}

/// Options for [`compute_basis_with`]. Centering defaults off: the systems
/// targeted here have a zero equilibrium from Dirichlet conditions.
#[derive(Debug, Clone, Default)]
pub struct PodOptions {
    pub center: bool,
}

/// Thin SVD of the snapshot matrix: returns the leading `r` left singular
/// vectors and the full singular-value spectrum. Column signs are fixed so
/// the largest-magnitude entry of each column is positive.
pub fn compute_basis(y: &DMatrix<f64>, r: usize) -> Result<PodBasis> {
    compute_basis_with(y, r, &PodOptions::default()).map(|(b, _)| b)
}

/// As [`compute_basis`], optionally subtracting the column mean first.
/// Returns the mean that was removed (zero vector when centering is off).
pub fn compute_basis_with(
    y: &DMatrix<f64>,
    r: usize,
    opts: &PodOptions,
) -> Result<(PodBasis, DVector<f64>)> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("snapshot matrix".into()));
    }
    let max_rank = y.nrows().min(y.ncols());
    if r < 1 || r > max_rank {
        return Err(Error::RankOutOfRange {
            requested: r,
            max: max_rank,
        });
    }
    let mean = if opts.center {
        let mut m = DVector::zeros(y.nrows());
        for j in 0..y.ncols() {
            m += y.column(j);
        }
        m / y.ncols() as f64
    } else {
        DVector::zeros(y.nrows())
    };
    let mut work = y.clone();
    if opts.center {
        for j in 0..work.ncols() {
            let mut col = work.column_mut(j);
            col -= &mean;
        }
    }
    let svd = work.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma_full = svd.singular_values.clone();
    let mut v = u.columns(0, r).into_owned();
    for j in 0..r {
        let col = v.column(j);
        let mut imax = 0;
        let mut vmax = 0.0;
        for (i, &val) in col.iter().enumerate() {
            if val.abs() > vmax {
                vmax = val.abs();
                imax = i;
            }
        }
        if col[imax] < 0.0 {
            v.column_mut(j).neg_mut();
        }
    }
    Ok((PodBasis { v, sigma_full }, mean))
}

/// Projects a snapshot set onto the POD basis and fills in reduced
/// velocity/acceleration, either from supplied derivative snapshots or by
/// finite differencing the reduced displacements.
pub fn reduce(snap: &SnapshotSet, v: &DMatrix<f64>, sigma_full: &DVector<f64>) -> Result<ReducedDataset> {
    if v.nrows() != snap.num_dofs() {
        return Err(Error::DimensionMismatch(format!(
            "basis has {} rows, snapshots have {} DoF",
            v.nrows(),
            snap.num_dofs()
        )));
    }
    let r = v.ncols();
    if sigma_full.len() < r {
        return Err(Error::DimensionMismatch(format!(
            "spectrum has {} values, basis rank is {r}",
            sigma_full.len()
        )));
    }
    let x = v.transpose() * snap.y();
    let (xdot, xddot) = match (&snap.ydot, &snap.yddot) {
        (Some(yd), Some(ydd)) => (v.transpose() * yd, v.transpose() * ydd),
        _ => finite_diff(&x, snap.dt())?,
    };
    Ok(ReducedDataset {
        v: v.clone(),
        sigma: sigma_full.rows(0, r).into_owned(),
        x,
        xdot,
        xddot,
        u: snap.u().clone(),
        dt: snap.dt(),
    })
}

/// Reduces several snapshot sets and concatenates them horizontally.
/// Derivatives are estimated per set; differencing never crosses set
/// boundaries. All sets must share the DoF and input counts.
pub fn reduce_many(
    snaps: &[SnapshotSet],
    v: &DMatrix<f64>,
    sigma_full: &DVector<f64>,
) -> Result<ReducedDataset> {
    if snaps.is_empty() {
        return Err(Error::InvalidSnapshots("no snapshot sets given".into()));
    }
    let mut parts = Vec::with_capacity(snaps.len());
    for s in snaps {
        parts.push(reduce(s, v, sigma_full)?);
    }
    let first = &parts[0];
    let r = first.rank();
    let n_u = first.num_inputs();
    let total: usize = parts.iter().map(|p| p.num_snapshots()).sum();
    let mut x = DMatrix::zeros(r, total);
    let mut xdot = DMatrix::zeros(r, total);
    let mut xddot = DMatrix::zeros(r, total);
    let mut u = DMatrix::zeros(n_u, total);
    let mut col = 0;
    for p in &parts {
        if p.num_inputs() != n_u {
            return Err(Error::DimensionMismatch(
                "snapshot sets disagree on input count".into(),
            ));
        }
        let n = p.num_snapshots();
        x.columns_mut(col, n).copy_from(&p.x);
        xdot.columns_mut(col, n).copy_from(&p.xdot);
        xddot.columns_mut(col, n).copy_from(&p.xddot);
        u.columns_mut(col, n).copy_from(&p.u);
        col += n;
    }
    Ok(ReducedDataset {
        v: v.clone(),
        sigma: sigma_full.rows(0, r).into_owned(),
        x,
        xdot,
        xddot,
        u,
        dt: first.dt,
    })
}

/// Second-order finite differences along rows of `x`.
///
/// Interior columns use central stencils; the first and last columns use
/// one-sided second-order stencils. Exact on polynomials of degree <= 2.
pub fn finite_diff(x: &DMatrix<f64>, dt: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = x.ncols();
    if n < 5 {
        return Err(Error::InvalidSnapshots(format!(
            "need at least 5 snapshots to difference, got {n}"
        )));
    }
    if dt <= 0.0 {
        return Err(Error::InvalidSnapshots("nonpositive time step".into()));
    }
    let rows = x.nrows();
    let mut xdot = DMatrix::zeros(rows, n);
    let mut xddot = DMatrix::zeros(rows, n);
    for i in 0..rows {
        for j in 1..n - 1 {
            xdot[(i, j)] = (x[(i, j + 1)] - x[(i, j - 1)]) / (2.0 * dt);
            xddot[(i, j)] = (x[(i, j + 1)] - 2.0 * x[(i, j)] + x[(i, j - 1)]) / (dt * dt);
        }
        xdot[(i, 0)] = (-3.0 * x[(i, 0)] + 4.0 * x[(i, 1)] - x[(i, 2)]) / (2.0 * dt);
        xdot[(i, n - 1)] =
            (3.0 * x[(i, n - 1)] - 4.0 * x[(i, n - 2)] + x[(i, n - 3)]) / (2.0 * dt);
        xddot[(i, 0)] =
            (2.0 * x[(i, 0)] - 5.0 * x[(i, 1)] + 4.0 * x[(i, 2)] - x[(i, 3)]) / (dt * dt);
        xddot[(i, n - 1)] = (2.0 * x[(i, n - 1)] - 5.0 * x[(i, n - 2)] + 4.0 * x[(i, n - 3)]
            - x[(i, n - 4)])
            / (dt * dt);
    }
    Ok((xdot, xddot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize, dt: f64) -> DVector<f64> {
        DVector::from_fn(n, |i, _| i as f64 * dt)
    }

    #[test]
    fn rank_one_basis() {
        let y = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let basis = compute_basis(&y, 1).unwrap();
        let s5 = 5f64.sqrt();
        assert_relative_eq!(basis.v[(0, 0)], 1.0 / s5, epsilon = 1e-12);
        assert_relative_eq!(basis.v[(1, 0)], 2.0 / s5, epsilon = 1e-12);
        assert_relative_eq!(basis.sigma_full[0], 5.0, epsilon = 1e-12);
    }

    #[test]
    fn full_rank_projection_reconstructs() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let y = DMatrix::from_fn(6, 20, |_, _| rng.random_range(-1.0..1.0));
        let basis = compute_basis(&y, 6).unwrap();
        let err = (&y - &basis.v * basis.v.transpose() * &y).norm();
        assert!(err < 1e-9 * y.norm());
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let y = DMatrix::from_fn(10, 50, |_, _| rng.random_range(-1.0..1.0));
        let basis = compute_basis(&y, 4).unwrap();
        // Independent oracle: eigenvalues of Y * Y^T.
        let gram = &y * y.transpose();
        let mut eigs: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (i, &lam) in eigs.iter().enumerate() {
            let s2 = basis.sigma_full[i] * basis.sigma_full[i];
            assert!(
                (s2 - lam).abs() <= 1e-8 * lam.abs().max(1.0),
                "sigma^2 {} vs eig {}",
                s2,
                lam
            );
        }
    }

    #[test]
    fn orthonormality_and_ordering() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let y = DMatrix::from_fn(8, 30, |_, _| rng.random_range(-1.0..1.0));
        let basis = compute_basis(&y, 5).unwrap();
        let eye = basis.v.transpose() * &basis.v;
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((eye[(i, j)] - expect).abs() < 1e-10);
            }
        }
        for w in basis.sigma_full.as_slice().windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn projection_error_nonincreasing_in_rank() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let y = DMatrix::from_fn(7, 25, |_, _| rng.random_range(-1.0..1.0));
        let mut prev = f64::INFINITY;
        for r in 1..=7 {
            let basis = compute_basis(&y, r).unwrap();
            let x = basis.v.transpose() * &y;
            let err = (&y - &basis.v * x).norm();
            assert!(err <= prev + 1e-12);
            prev = err;
        }
    }

    #[test]
    fn identity_basis_passthrough() {
        let n = 3;
        let times = grid(6, 0.1);
        let y = DMatrix::from_fn(n, 6, |i, j| (i + 1) as f64 * (j as f64 * 0.1).sin());
        let u = DMatrix::zeros(1, 6);
        let snap = SnapshotSet::new(times, y.clone(), u).unwrap();
        let v = DMatrix::identity(n, n);
        let sigma = DVector::from_element(n, 1.0);
        let red = reduce(&snap, &v, &sigma).unwrap();
        assert_relative_eq!(red.x, y, epsilon = 1e-14);
    }

    #[test]
    fn constant_snapshots_have_zero_derivatives() {
        let times = grid(8, 0.2);
        let y = DMatrix::from_fn(2, 8, |i, _| (i + 1) as f64);
        let u = DMatrix::zeros(1, 8);
        let snap = SnapshotSet::new(times, y, u).unwrap();
        let v = DMatrix::identity(2, 2);
        let sigma = DVector::from_element(2, 1.0);
        let red = reduce(&snap, &v, &sigma).unwrap();
        assert!(red.xdot.iter().all(|&v| v.abs() < 1e-12));
        assert!(red.xddot.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn single_mode_recovered() {
        // Y = v s(t)^T with unit v: the reduced coordinate must equal s.
        let n = 5;
        let nt = 40;
        let dt = 0.05;
        let times = grid(nt, dt);
        let mut v0 = DVector::from_fn(n, |i, _| ((i + 1) as f64).sqrt());
        v0 /= v0.norm();
        let s = DVector::from_fn(nt, |j, _| (1.3 * j as f64 * dt).sin());
        let y = &v0 * s.transpose();
        let u = DMatrix::zeros(1, nt);
        let snap = SnapshotSet::new(times, y.clone(), u).unwrap();
        let basis = compute_basis(&y, 1).unwrap();
        let red = reduce(&snap, &basis.v, &basis.sigma_full).unwrap();
        // Sign convention may flip s; compare up to the fixed sign of v.
        let sign = if basis.v[(0, 0)] * v0[0] > 0.0 { 1.0 } else { -1.0 };
        for j in 0..nt {
            assert!((red.x[(0, j)] - sign * s[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn finite_diff_exact_on_ramp_and_quadratic() {
        let dt = 0.1;
        let n = 9;
        let t = grid(n, dt);
        let ramp = DMatrix::from_fn(1, n, |_, j| t[j]);
        let (d1, d2) = finite_diff(&ramp, dt).unwrap();
        assert!(d1.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(d2.iter().all(|&v| v.abs() < 1e-11));

        let quad = DMatrix::from_fn(1, n, |_, j| t[j] * t[j]);
        let (d1, d2) = finite_diff(&quad, dt).unwrap();
        for j in 0..n {
            assert!((d1[(0, j)] - 2.0 * t[j]).abs() < 1e-11, "j={j}");
            assert!((d2[(0, j)] - 2.0).abs() < 1e-10, "j={j}");
        }
    }

    #[test]
    fn finite_diff_second_order_on_sine() {
        let dt = 1e-3;
        let n = 2001;
        let t = grid(n, dt);
        let x = DMatrix::from_fn(1, n, |_, j| t[j].sin());
        let (d1, d2) = finite_diff(&x, dt).unwrap();
        let mut e1: f64 = 0.0;
        let mut e2: f64 = 0.0;
        for j in 0..n {
            e1 = e1.max((d1[(0, j)] - t[j].cos()).abs());
            e2 = e2.max((d2[(0, j)] + t[j].sin()).abs());
        }
        // Second order: max error bounded by C dt^2 with C < 1.
        assert!(e1 < dt * dt, "velocity error {e1}");
        assert!(e2 < dt * dt, "acceleration error {e2}");
    }

    #[test]
    fn nonuniform_grid_rejected() {
        let mut times = grid(6, 0.1);
        times[5] += 0.05;
        let y = DMatrix::zeros(2, 6);
        let u = DMatrix::zeros(1, 6);
        assert!(SnapshotSet::new(times, y, u).is_err());
    }

    #[test]
    fn too_few_snapshots_rejected() {
        let times = grid(4, 0.1);
        let y = DMatrix::zeros(2, 4);
        let u = DMatrix::zeros(1, 4);
        assert!(SnapshotSet::new(times, y, u).is_err());
    }

    #[test]
    fn rank_out_of_range_rejected() {
        let y = DMatrix::zeros(3, 10);
        assert!(matches!(
            compute_basis(&y, 4),
            Err(Error::RankOutOfRange { .. })
        ));
        assert!(matches!(
            compute_basis(&y, 0),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn multi_set_concatenation_keeps_sets_apart() {
        // A constant set and a ramp set: if differencing crossed the
        // boundary the constant set's last column would pick up slope.
        let dt = 0.1;
        let times = grid(6, dt);
        let y_const = DMatrix::from_element(1, 6, 2.0);
        let y_ramp = DMatrix::from_fn(1, 6, |_, j| j as f64 * dt);
        let u = DMatrix::zeros(1, 6);
        let s1 = SnapshotSet::new(times.clone(), y_const, u.clone()).unwrap();
        let s2 = SnapshotSet::new(times, y_ramp, u).unwrap();
        let v = DMatrix::identity(1, 1);
        let sigma = DVector::from_element(1, 1.0);
        let red = reduce_many(&[s1, s2], &v, &sigma).unwrap();
        assert_eq!(red.num_snapshots(), 12);
        for j in 0..6 {
            assert!(red.xdot[(0, j)].abs() < 1e-12);
        }
        for j in 6..12 {
            assert!((red.xdot[(0, j)] - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn centering_recovers_direction_of_shifted_data() {
        let n = 4;
        let nt = 30;
        let mut dir = DVector::from_fn(n, |i, _| (i as f64 + 0.5).cos());
        dir /= dir.norm();
        let offset = DVector::from_element(n, 10.0);
        let mut y = DMatrix::zeros(n, nt);
        for j in 0..nt {
            let s = (0.3 * j as f64).sin();
            y.set_column(j, &(&offset + &dir * s));
        }
        let (basis, mean) =
            compute_basis_with(&y, 1, &PodOptions { center: true }).unwrap();
        assert!((mean - offset).norm() < 0.2);
        let cos = basis.v.column(0).dot(&dir).abs();
        assert!(cos > 0.999, "cos = {cos}");
    }
}
