use super::embed::EmbeddingVector;
use crate::error::{Error, Result};

fn check_dims(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<()> {
    if u.dimension() != v.dimension() {
        return Err(Error::Dimension {
            expected: u.dimension(),
            actual: v.dimension(),
        });
    }
    Ok(())
}

fn raw_dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn dot(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
    check_dims(u, v)?;
    Ok(raw_dot(u.as_slice(), v.as_slice()))
}

/// Cosine similarity; 0.0 when either vector has zero norm.
pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
    check_dims(u, v)?;
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok(raw_dot(u.as_slice(), v.as_slice()) / (nu * nv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(x: &[f64]) -> EmbeddingVector {
        EmbeddingVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn cosine_examples() {
        assert_abs_diff_eq!(cosine(&v(&[3.0, -1.0, 2.0]), &v(&[3.0, -1.0, 2.0])).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(cosine(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        let expected = 32.0 / (14.0f64 * 77.0).sqrt();
        assert_abs_diff_eq!(cosine(&v(&[1.0, 2.0, 3.0]), &v(&[4.0, 5.0, 6.0])).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.974632, epsilon = 1e-6);
    }

    #[test]
    fn zero_norm_convention() {
        assert_eq!(cosine(&v(&[0.0, 0.0]), &v(&[1.0, 1.0])).unwrap(), 0.0);
        assert_eq!(cosine(&v(&[0.0, 0.0]), &v(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(dot(&v(&[1.0, 2.0]), &v(&[3.0, 4.0])).unwrap(), 11.0);
        assert_eq!(dot(&v(&[5.0, -2.0]), &v(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            cosine(&v(&[1.0]), &v(&[1.0, 2.0])),
            Err(Error::Dimension { expected: 1, actual: 2 })
        ));
        assert!(matches!(dot(&v(&[1.0]), &v(&[1.0, 2.0])), Err(Error::Dimension { .. })));
    }
}
