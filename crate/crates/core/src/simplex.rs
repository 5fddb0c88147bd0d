//! Real-simplex representation of one (measurement, state) pair.
//!
//! The distribution `μ` is embedded as the point `v = Σ μ_j h_j` of the
//! standard simplex `S_n`. Replacing vertex `h_j` by `v` gives the
//! sub-simplex `A_j`; the `A_j` tile `S_n`, and the relative volume of `A_j`
//! is `μ_j`. A hidden variable `λ` drawn uniformly on `S_n` selects the
//! outcome whose sub-simplex contains it.
//!
//! Outcome indices are zero-based throughout.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::model::ProbabilityVector;

/// Tolerance on `Σ λ_j = 1` for a [`SimplexPoint`].
pub const SIMPLEX_SUM_TOLERANCE: f64 = 1e-12;
/// Relative tolerance under which two ratios `λ_k / μ_k` count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Lower bound on convex coefficients accepted as membership.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: point has {point} coordinates, distribution has {distribution}")]
    DimensionMismatch { point: usize, distribution: usize },
    #[error("outcome index {index} out of range for {n} outcomes")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("coordinate {index} = {value} is outside [0, 1]")]
    CoordinateOutOfRange { index: usize, value: f64 },
    #[error("coordinates sum to {0}, expected 1")]
    BadSum(f64),
    #[error("simplex must have at least one vertex")]
    Empty,
    #[error("segment length is only defined for two outcomes, got {0}")]
    NotTwoOutcomes(usize),
}

/// A point `λ` of the standard simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self, GeometryError> {
        let coords = coords.into();
        if coords.is_empty() {
            return Err(GeometryError::Empty);
        }
        for (index, &value) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(GeometryError::CoordinateOutOfRange { index, value });
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOLERANCE {
            return Err(GeometryError::BadSum(sum));
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// Which sub-simplex a point falls in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// Inside exactly one `A_j`: the outcome is certain.
    Determined(usize),
    /// On a shared face of two or more `A_j`; holds the tied indices in
    /// increasing order.
    Boundary(Vec<usize>),
}

/// The state vector `v(e, p)`: the point of `S_n` whose coordinates are `μ`.
pub fn state_vector(mu: &ProbabilityVector) -> SimplexPoint {
    SimplexPoint(mu.as_slice().to_vec())
}

fn check_dims(lambda: &SimplexPoint, mu: &ProbabilityVector) -> Result<(), GeometryError> {
    if lambda.dim() != mu.len() {
        return Err(GeometryError::DimensionMismatch {
            point: lambda.dim(),
            distribution: mu.len(),
        });
    }
    Ok(())
}

/// Classifies `λ` against the partition `{A_j}` induced by `μ`.
///
/// `λ ∈ A_j` exactly when `j` minimizes `λ_k / μ_k`. A ratio with `μ_k = 0`
/// is `+∞` when `λ_k > 0`; indices with `μ_k = λ_k = 0` take no part.
pub fn classify_point(
    lambda: &SimplexPoint,
    mu: &ProbabilityVector,
) -> Result<Classification, GeometryError> {
    check_dims(lambda, mu)?;

    let ratios: Vec<Option<f64>> = lambda
        .coords()
        .iter()
        .zip(mu.iter())
        .map(|(&l, m)| {
            if m > 0.0 {
                Some(l / m)
            } else if l > 0.0 {
                Some(f64::INFINITY)
            } else {
                None
            }
        })
        .collect();

    let best = ratios
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);

    let tied: Vec<usize> = ratios
        .iter()
        .enumerate()
        .filter_map(|(k, r)| {
            let r = (*r)?;
            let tie = match (best.is_infinite(), r.is_infinite()) {
                (true, true) => true,
                (false, false) => r - best <= TIE_TOLERANCE * r,
                _ => false,
            };
            tie.then_some(k)
        })
        .collect();

    Ok(match tied.as_slice() {
        [j] => Classification::Determined(*j),
        _ => Classification::Boundary(tied),
    })
}

/// Result of solving `λ = Σ_{k≠j} c_k h_k + c_j v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// Convex coefficients; `None` when `A_j` is degenerate (`μ_j = 0`) and
    /// `λ` is off the face that contains it.
    pub coefficients: Option<Vec<f64>>,
}

/// Decides `λ ∈ A_j` by solving for the coefficients of `λ` in the vertex
/// basis of `A_j` with an LU solve. Independent of [`classify_point`].
pub fn membership_oracle(
    lambda: &SimplexPoint,
    j: usize,
    mu: &ProbabilityVector,
) -> Result<Membership, GeometryError> {
    check_dims(lambda, mu)?;
    let n = mu.len();
    if j >= n {
        return Err(GeometryError::IndexOutOfRange { index: j, n });
    }

    let mut vertices = Matrix::identity(n);
    vertices.set_column(j, mu.as_slice());
    let lu = vertices.lu();

    let coefficients = match lu.solve(lambda.coords()) {
        Some(c) => c,
        None => {
            // μ_j = 0: A_j collapses onto the face λ_j = 0, where the
            // remaining vertices are the identity basis.
            if lambda.coords()[j] != 0.0 {
                return Ok(Membership {
                    member: false,
                    coefficients: None,
                });
            }
            let mut c = lambda.coords().to_vec();
            c[j] = 0.0;
            c
        }
    };

    let member = coefficients.iter().all(|&c| c >= -MEMBERSHIP_TOLERANCE);
    Ok(Membership {
        member,
        coefficients: Some(coefficients),
    })
}

/// Determinant of the canonical basis matrix `[h_1 … h_n]`.
pub fn canonical_determinant(n: usize) -> f64 {
    Matrix::identity(n).determinant()
}

/// Determinant of `[h_1 … v … h_n]` with column `j` replaced by `v(e, p)`,
/// computed by LU factorization.
pub fn replaced_determinant(mu: &ProbabilityVector, j: usize) -> Result<f64, GeometryError> {
    let n = mu.len();
    if j >= n {
        return Err(GeometryError::IndexOutOfRange { index: j, n });
    }
    let mut m = Matrix::identity(n);
    m.set_column(j, mu.as_slice());
    Ok(m.determinant())
}

/// Relative Lebesgue measure `m(A_j) / m(S_n)` as a ratio of parallelepiped
/// volumes; the simplex-to-parallelepiped constant cancels.
pub fn volume_ratio(mu: &ProbabilityVector, j: usize) -> Result<f64, GeometryError> {
    Ok(replaced_determinant(mu, j)? / canonical_determinant(mu.len()))
}

/// Euclidean distance from `(1, 0)` to `v(e, p)` for a two-outcome
/// measurement. `d / √2` equals `μ_2`.
pub fn segment_length_check(mu: &ProbabilityVector) -> Result<f64, GeometryError> {
    if mu.len() != 2 {
        return Err(GeometryError::NotTwoOutcomes(mu.len()));
    }
    Ok((1.0 - mu[0]).hypot(mu[1]))
}

/// Draws `λ` uniformly (Lebesgue) on `S_n` by normalizing `n` independent
/// unit-rate exponential variates.
///
/// Panics if `n == 0`.
pub fn sample_simplex_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SimplexPoint {
    assert!(n >= 1, "simplex needs at least one vertex");
    let mut coords = vec![0.0; n];
    loop {
        let mut sum = 0.0;
        for c in coords.iter_mut() {
            let x: f64 = Exp1.sample(rng);
            *c = x;
            sum += x;
        }
        if sum > 0.0 {
            coords.iter_mut().for_each(|c| *c /= sum);
            return SimplexPoint(coords);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    fn pt(v: &[f64]) -> SimplexPoint {
        SimplexPoint::new(v.to_vec()).unwrap()
    }

    /// Leibniz expansion, used as an oracle that shares nothing with LU.
    fn leibniz_det(m: &[Vec<f64>]) -> f64 {
        fn perms(items: &mut Vec<usize>, k: usize, out: &mut Vec<(Vec<usize>, f64)>, sign: f64) {
            if k == items.len() {
                out.push((items.clone(), sign));
                return;
            }
            for i in k..items.len() {
                items.swap(k, i);
                perms(items, k + 1, out, if i == k { sign } else { -sign });
                items.swap(k, i);
            }
        }
        let n = m.len();
        let mut out = Vec::new();
        perms(&mut (0..n).collect(), 0, &mut out, 1.0);
        out.iter()
            .map(|(p, s)| s * (0..n).map(|i| m[i][p[i]]).product::<f64>())
            .sum()
    }

    #[test]
    fn state_vector_embeds_mu() {
        assert_eq!(state_vector(&pv(&[0.5, 0.5])).coords(), &[0.5, 0.5]);
        assert_eq!(state_vector(&pv(&[1.0, 0.0])).coords(), &[1.0, 0.0]);
        assert_eq!(
            state_vector(&pv(&[0.2, 0.3, 0.5])).coords(),
            &[0.2, 0.3, 0.5]
        );
    }

    #[test]
    fn simplex_point_validation() {
        assert!(matches!(
            SimplexPoint::new(vec![0.5, 0.6]),
            Err(GeometryError::BadSum(_))
        ));
        assert!(matches!(
            SimplexPoint::new(vec![1.5, -0.5]),
            Err(GeometryError::CoordinateOutOfRange { index: 0, .. })
        ));
        assert_eq!(SimplexPoint::new(Vec::new()), Err(GeometryError::Empty));
    }

    #[test]
    fn classify_examples() {
        let mu = pv(&[0.5, 0.5]);
        // segment from (1, 0) to v gives the second outcome
        assert_eq!(
            classify_point(&pt(&[0.8, 0.2]), &mu).unwrap(),
            Classification::Determined(1)
        );
        assert_eq!(
            classify_point(&pt(&[0.5, 0.5]), &mu).unwrap(),
            Classification::Boundary(vec![0, 1])
        );
        let mu3 = pv(&[0.2, 0.3, 0.5]);
        let lambda = pt(&[0.1, 0.4, 0.5]);
        assert_eq!(
            classify_point(&lambda, &mu3).unwrap(),
            Classification::Determined(0)
        );
        // cross-check against the linear-solve oracle
        let verdicts: Vec<bool> = (0..3)
            .map(|j| membership_oracle(&lambda, j, &mu3).unwrap().member)
            .collect();
        assert_eq!(verdicts, [true, false, false]);
    }

    #[test]
    fn classify_dimension_mismatch() {
        assert!(matches!(
            classify_point(&pt(&[1.0]), &pv(&[0.5, 0.5])),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn classify_with_zero_probability_outcome() {
        let mu = pv(&[1.0, 0.0]);
        assert_eq!(
            classify_point(&pt(&[0.3, 0.7]), &mu).unwrap(),
            Classification::Determined(0)
        );
        assert_eq!(
            classify_point(&pt(&[0.0, 1.0]), &mu).unwrap(),
            Classification::Determined(0)
        );
        // λ_2 = 0 = μ_2: index 2 excluded, no tie
        assert_eq!(
            classify_point(&pt(&[1.0, 0.0]), &mu).unwrap(),
            Classification::Determined(0)
        );
    }

    #[test]
    fn vertex_shared_by_two_subsimplices_is_boundary() {
        let mu = pv(&[0.2, 0.3, 0.5]);
        assert_eq!(
            classify_point(&pt(&[1.0, 0.0, 0.0]), &mu).unwrap(),
            Classification::Boundary(vec![1, 2])
        );
    }

    #[test]
    fn membership_examples() {
        let mu = pv(&[0.5, 0.5]);
        let m = membership_oracle(&pt(&[0.3, 0.7]), 0, &mu).unwrap();
        assert!(m.member);
        let c = m.coefficients.unwrap();
        assert!((c[0] - 0.6).abs() < 1e-15 && (c[1] - 0.4).abs() < 1e-15);

        let m = membership_oracle(&pt(&[0.8, 0.2]), 0, &mu).unwrap();
        assert!(!m.member);
        let c = m.coefficients.unwrap();
        assert!((c[1] - (0.2 - 1.6 * 0.5)).abs() < 1e-15);

        let mu3 = pv(&[0.2, 0.3, 0.5]);
        for j in 0..3 {
            let m = membership_oracle(&state_vector(&mu3), j, &mu3).unwrap();
            assert!(m.member);
            let c = m.coefficients.unwrap();
            for (k, ck) in c.iter().enumerate() {
                let expected = if k == j { 1.0 } else { 0.0 };
                assert!((ck - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn membership_degenerate_subsimplex() {
        let mu = pv(&[1.0, 0.0]);
        let off = membership_oracle(&pt(&[0.4, 0.6]), 1, &mu).unwrap();
        assert!(!off.member);
        assert!(off.coefficients.is_none());
        let on = membership_oracle(&pt(&[1.0, 0.0]), 1, &mu).unwrap();
        assert!(on.member);
        assert_eq!(on.coefficients.unwrap(), vec![1.0, 0.0]);
        assert!(matches!(
            membership_oracle(&pt(&[1.0, 0.0]), 2, &mu),
            Err(GeometryError::IndexOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn canonical_determinant_is_one() {
        for n in [1, 2, 3, 7] {
            assert_eq!(canonical_determinant(n), 1.0);
        }
    }

    #[test]
    fn replaced_determinant_examples() {
        let d = replaced_determinant(&pv(&[0.2, 0.3, 0.5]), 1).unwrap();
        assert!((d - 0.3).abs() <= 1e-12);
        assert_eq!(replaced_determinant(&pv(&[1.0, 0.0]), 1).unwrap(), 0.0);

        let mu = pv(&[0.25; 4]);
        let mut cols = vec![vec![0.0; 4]; 4];
        for (i, row) in cols.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for (i, row) in cols.iter_mut().enumerate() {
            row[3] = mu[i];
        }
        let oracle = leibniz_det(&cols);
        assert!((oracle - 0.25).abs() < 1e-15);
        let d = replaced_determinant(&mu, 3).unwrap();
        assert!((d - oracle).abs() <= 1e-12);

        assert!(matches!(
            replaced_determinant(&mu, 4),
            Err(GeometryError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn volume_ratio_examples() {
        assert!((volume_ratio(&pv(&[0.5, 0.5]), 0).unwrap() - 0.5).abs() <= 1e-12);
        let mu = pv(&[0.2, 0.3, 0.5]);
        assert!((volume_ratio(&mu, 2).unwrap() - 0.5).abs() <= 1e-12);
        let total: f64 = (0..3).map(|j| volume_ratio(&mu, j).unwrap()).sum();
        assert!((total - 1.0).abs() <= 3e-12);
    }

    #[test]
    fn segment_length_examples() {
        let d = segment_length_check(&pv(&[0.5, 0.5])).unwrap();
        assert!((d - std::f64::consts::SQRT_2 / 2.0).abs() <= 1e-15);
        assert_eq!(segment_length_check(&pv(&[1.0, 0.0])).unwrap(), 0.0);
        let d = segment_length_check(&pv(&[0.3, 0.7])).unwrap();
        assert!((d - 0.989_949_493_661_166_5).abs() <= 1e-15);
        assert!((d / std::f64::consts::SQRT_2 - 0.7).abs() <= 1e-12);
        assert_eq!(
            segment_length_check(&pv(&[0.2, 0.3, 0.5])),
            Err(GeometryError::NotTwoOutcomes(3))
        );
    }

    #[test]
    fn sampling_single_vertex() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        assert_eq!(sample_simplex_uniform(1, &mut rng).coords(), &[1.0]);
    }

    #[test]
    fn sampling_two_vertices_has_uniform_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 100_000;
        let mean: f64 = (0..draws)
            .map(|_| sample_simplex_uniform(2, &mut rng).coords()[0])
            .sum::<f64>()
            / draws as f64;
        let bound = 3.0 * (1.0 / (12.0 * draws as f64)).sqrt();
        assert!((mean - 0.5).abs() <= bound, "mean {mean}");
    }

    #[test]
    fn sampled_frequencies_match_volumes() {
        let mu = pv(&[0.2, 0.3, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 1_000_000usize;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            let lambda = sample_simplex_uniform(3, &mut rng);
            match classify_point(&lambda, &mu).unwrap() {
                Classification::Determined(j) => counts[j] += 1,
                Classification::Boundary(_) => panic!("boundary hit under continuous sampling"),
            }
        }
        for j in 0..3 {
            let freq = counts[j] as f64 / draws as f64;
            let bound = 3.0 * (mu[j] * (1.0 - mu[j]) / draws as f64).sqrt();
            assert!((freq - mu[j]).abs() <= bound, "outcome {j}: {freq}");
        }
    }
}
