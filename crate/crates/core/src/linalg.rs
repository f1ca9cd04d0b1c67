//! Small dense-vector helpers. State dimensions here are 1–3, so plain
//! slices beat any matrix type.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Euclidean projection onto the closed ball of the given radius.
pub fn project_ball(a: &[f64], radius: f64) -> Vec<f64> {
    let n = norm(a);
    if n <= radius || n == 0.0 {
        a.to_vec()
    } else {
        scale(a, radius / n)
    }
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_keeps_interior_points() {
        assert_eq!(project_ball(&[0.3, 0.4], 1.0), vec![0.3, 0.4]);
        let p = project_ball(&[3.0, 4.0], 1.0);
        assert!((norm(&p) - 1.0).abs() < 1e-15);
        assert!((p[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn basic_ops() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, 4.0]), 11.0);
        assert_eq!(axpy(&[1.0], 2.0, &[3.0]), vec![7.0]);
        assert_eq!(max_abs_diff(&[1.0, -2.0], &[1.5, 1.0]), 3.0);
    }
}
