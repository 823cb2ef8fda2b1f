//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};

/// Right singular vector belonging to the smallest singular value.
pub(crate) struct NullVector<T: ComplexField> {
    pub vector: DVector<T>,
    /// Singular values in ascending order.
    pub singular_values: Vec<f64>,
}

impl<T: ComplexField<RealField = f64>> NullVector<T> {
    /// `sigma_min / sigma_second`, or 0 when only one singular value exists.
    pub fn gap_ratio(&self) -> f64 {
        match self.singular_values.as_slice() {
            [smallest, second, ..] => {
                if *second > 0.0 {
                    smallest / second
                } else {
                    f64::INFINITY
                }
            }
            _ => 0.0,
        }
    }
}

/// Computes the right singular vector of the smallest singular value of `a`.
///
/// Wide matrices are padded with zero rows so that the null space is part of
/// the computed right singular basis. Tall matrices are first reduced to
/// their triangular QR factor, which has the same right singular vectors.
pub(crate) fn smallest_right_singular_vector<T>(a: &DMatrix<T>) -> Result<NullVector<T>>
where
    T: ComplexField<RealField = f64>,
{
    let cols = a.ncols();
    if cols == 0 {
        return Err(Error::Breakdown("matrix without columns".into()));
    }
    let square;
    let m = if a.nrows() < cols {
        let mut padded = DMatrix::<T>::zeros(cols, cols);
        padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        square = padded;
        &square
    } else if a.nrows() > 2 * cols {
        square = a.clone().qr().r();
        &square
    } else {
        a
    };
    let svd = nalgebra::linalg::SVD::try_new(m.clone(), false, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Breakdown("SVD did not converge".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Breakdown("SVD returned no right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let imin = order[0];
    let vector = DVector::from_iterator(cols, v_t.row(imin).iter().map(|v| v.clone().conjugate()));
    if vector.iter().any(|v| !v.clone().modulus().is_finite()) {
        return Err(Error::Breakdown("non-finite singular vector".into()));
    }
    let singular_values = order.iter().map(|&i| svd.singular_values[i]).collect();
    Ok(NullVector {
        vector,
        singular_values,
    })
}

/// Solves `a x = b` by LU with partial pivoting.
pub(crate) fn lu_solve(a: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    a.lu()
        .solve(b)
        .ok_or_else(|| Error::Breakdown("singular linear system".into()))
}

/// `n` equispaced points on `[-1, 1]` including both endpoints.
pub fn linspace(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let h = 2.0 / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { 1.0 } else { -1.0 + h * i as f64 })
                .collect()
        }
    }
}
