use super::Direction;
use crate::error::{check_dim, Error, Result};
use nalgebra::DMatrix;

/// An orthogonal n x n matrix with determinant +1.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    matrix: DMatrix<f64>,
}

impl Rotation {
    pub fn identity(n: usize) -> Self {
        Rotation {
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Wraps a matrix after checking orthogonality and orientation.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("rotation matrix must be square"));
        }
        let n = matrix.nrows();
        let gram = matrix.transpose() * &matrix;
        let off = (gram - DMatrix::<f64>::identity(n, n)).amax();
        if off > 1e-12 {
            return Err(Error::invalid(format!(
                "matrix is not orthogonal (|R^T R - I| = {off:e})"
            )));
        }
        let det = matrix.determinant();
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("rotation determinant is {det}")));
        }
        Ok(Rotation { matrix })
    }

    /// Rotation by `angle` in the oriented plane (e_i, e_j).
    pub fn plane(n: usize, i: usize, j: usize, angle: f64) -> Self {
        let mut m = DMatrix::identity(n, n);
        let (s, c) = angle.sin_cos();
        m[(i, i)] = c;
        m[(j, j)] = c;
        m[(j, i)] = s;
        m[(i, j)] = -s;
        Rotation { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn transpose(&self) -> Rotation {
        Rotation {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation {
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// R x for a raw coordinate slice.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (c, xc) in x.iter().enumerate() {
                acc += self.matrix[(r, c)] * xc;
            }
            *o = acc;
        }
        out
    }
}

/// Builds the block rotation diag(gamma_v, I_k) with gamma_v e_{n-k} = v.
///
/// `v` may be given either in R^{n-k} or in R^n with a zero tail. The
/// rotation acts in the plane span{e_{n-k}, v}; for v = -e_{n-k} it turns
/// by pi in the (e_1, e_{n-k}) plane.
pub fn rotation_to(v: &Direction, n: usize, k: usize) -> Result<Rotation> {
    if k < 1 || k + 2 > n {
        return Err(Error::invalid(format!(
            "rotation_to needs 1 <= k <= n-2, got n={n}, k={k}"
        )));
    }
    let p = n - k;
    let head: Vec<f64> = match v.dim() {
        d if d == p => v.coords().to_vec(),
        d if d == n => {
            let tail = &v.coords()[p..];
            if tail.iter().any(|t| t.abs() > 1e-12) {
                return Err(Error::invalid(
                    "v must lie in the span of the first n-k coordinates",
                ));
            }
            v.coords()[..p].to_vec()
        }
        d => return Err(Error::DimensionMismatch { expected: p, got: d }),
    };
    let axis = p - 1;
    let c = head[axis];
    // component of v orthogonal to e_{n-k}: exactly orthogonal by construction
    let mut w = head.clone();
    w[axis] = 0.0;
    let s = super::norm(&w);
    let mut m = DMatrix::<f64>::identity(n, n);
    if s == 0.0 {
        if c < 0.0 {
            m[(0, 0)] = -1.0;
            m[(axis, axis)] = -1.0;
        }
        return Ok(Rotation { matrix: m });
    }
    for x in w.iter_mut() {
        *x /= s;
    }
    // R = I + (c - 1)(e e^T + w w^T) + s (w e^T - e w^T)
    for i in 0..p {
        for j in 0..p {
            let e_i = if i == axis { 1.0 } else { 0.0 };
            let e_j = if j == axis { 1.0 } else { 0.0 };
            m[(i, j)] += (c - 1.0) * (e_i * e_j + w[i] * w[j]) + s * (w[i] * e_j - e_i * w[j]);
        }
    }
    Ok(Rotation { matrix: m })
}

/// R x, renormalized onto the unit sphere.
pub fn rotate_point(r: &Rotation, x: &Direction) -> Result<Direction> {
    check_dim(r.dim(), x.dim())?;
    let y = r.apply(x.coords());
    let n = super::norm(&y);
    Ok(Direction::from_unit_unchecked(
        y.into_iter().map(|c| c / n).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn fixed_axis_gives_identity() {
        let v = Direction::basis(2, 1);
        let r = rotation_to(&v, 4, 2).unwrap();
        assert_eq!(r, Rotation::identity(4));
    }

    #[test]
    fn quarter_turn_n4_k2() {
        let v = Direction::basis(2, 0);
        let r = rotation_to(&v, 4, 2).unwrap();
        let img = r.apply(Direction::basis(4, 1).coords());
        assert_close(&img, &[1.0, 0.0, 0.0, 0.0], 1e-15);
        // e_3, e_4 fixed
        assert_close(&r.apply(&[0.0, 0.0, 1.0, 0.0]), &[0.0, 0.0, 1.0, 0.0], 0.0 + 1e-15);
        assert_close(&r.apply(&[0.0, 0.0, 0.0, 1.0]), &[0.0, 0.0, 0.0, 1.0], 1e-15);
    }

    #[test]
    fn antipodal_half_turn() {
        let v = Direction::new(vec![0.0, -1.0]).unwrap();
        let r = rotation_to(&v, 3, 1).unwrap();
        assert_close(&r.apply(&[0.0, 1.0, 0.0]), &[0.0, -1.0, 0.0], 1e-15);
        assert!((r.matrix().determinant() - 1.0).abs() < 1e-12);
        Rotation::from_matrix(r.matrix().clone()).unwrap();
    }

    #[test]
    fn accepts_padded_v_and_rejects_tail() {
        let v = Direction::new(vec![0.6, 0.8, 0.0, 0.0]).unwrap();
        assert!(rotation_to(&v, 4, 2).is_ok());
        let bad = Direction::new(vec![0.6, 0.0, 0.8, 0.0]).unwrap();
        assert!(rotation_to(&bad, 4, 2).is_err());
        assert!(rotation_to(&Direction::basis(3, 0), 3, 2).is_err());
    }

    #[test]
    fn rotate_point_dimension_mismatch() {
        let r = Rotation::identity(3);
        assert!(rotate_point(&r, &Direction::basis(4, 0)).is_err());
        let x = Direction::new(vec![0.0, 0.6, 0.8]).unwrap();
        assert_eq!(rotate_point(&r, &x).unwrap(), x);
    }

    proptest! {
        #[test]
        fn rotation_invariants(raw in prop::collection::vec(-1.0f64..1.0, 3), k in 1usize..3) {
            let n = 3 + k;
            let p = n - k;
            prop_assume!(super::super::norm(&raw) > 1e-3);
            let v = Direction::normalize(raw.clone()).unwrap();
            let r = rotation_to(&v, n, k).unwrap();
            let checked = Rotation::from_matrix(r.matrix().clone());
            prop_assert!(checked.is_ok());
            let img = r.apply(Direction::basis(n, p - 1).coords());
            for i in 0..p {
                prop_assert!((img[i] - v.coords()[i]).abs() < 1e-12);
            }
            for i in p..n {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                let out = r.apply(&e);
                for j in 0..n {
                    let want = if j == i { 1.0 } else { 0.0 };
                    prop_assert!((out[j] - want).abs() < 1e-12);
                }
            }
            prop_assert_eq!(r.clone(), rotation_to(&v, n, k).unwrap());
        }

        #[test]
        fn rotated_points_stay_unit(raw in prop::collection::vec(-1.0f64..1.0, 4), vr in prop::collection::vec(-1.0f64..1.0, 2)) {
            prop_assume!(super::super::norm(&raw) > 1e-3 && super::super::norm(&vr) > 1e-3);
            let x = Direction::normalize(raw).unwrap();
            let v = Direction::normalize(vr).unwrap();
            let r = rotation_to(&v, 4, 2).unwrap();
            let y = r.apply(x.coords());
            prop_assert!((super::super::norm(&y) - 1.0).abs() < 1e-12);
        }
    }
}
