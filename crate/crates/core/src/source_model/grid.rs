use std::f64::consts::PI;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Strictly increasing sample times `0 = t_1 < … < t_s = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Argument(format!(
                "a time grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points[0] != 0.0 {
            return Err(Error::Argument(format!("time grid must start at 0, got {}", points[0])));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("non-finite time grid point".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Argument(format!(
                "time grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        let t_end = *points.last().unwrap();
        Ok(TimeGrid { t_end, points })
    }

    /// `count` equispaced points on `[0, t_end]` with both endpoints exact.
    pub fn uniform(count: usize, t_end: f64) -> Result<Self> {
        check_span(count, t_end)?;
        let last = (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| t_end * i as f64 / last).collect();
        points[count - 1] = t_end;
        Self::new(points)
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Points in the scaled variable `τ = t / T`.
    pub fn scaled_points(&self) -> Vec<f64> {
        self.points.iter().map(|t| t / self.t_end).collect()
    }
}

impl Deref for TimeGrid {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.points
    }
}

/// Chebyshev–Lobatto nodes mapped to `[0, t_end]`:
/// `t_i = t_end/2 · (1 − cos(π (i−1)/(s−1)))`, endpoints exact.
pub fn chebyshev_grid(s: usize, t_end: f64) -> Result<TimeGrid> {
    check_span(s, t_end)?;
    let last = (s - 1) as f64;
    let mut points: Vec<f64> = (0..s)
        .map(|i| 0.5 * t_end * (1.0 - (PI * i as f64 / last).cos()))
        .collect();
    points[0] = 0.0;
    points[s - 1] = t_end;
    TimeGrid::new(points)
}

fn check_span(count: usize, t_end: f64) -> Result<()> {
    if count < 2 {
        return Err(Error::Argument(format!("grid needs at least 2 points, got {count}")));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Argument(format!("t_end must be positive and finite, got {t_end}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_two_points_are_endpoints() {
        assert_eq!(chebyshev_grid(2, 1.0).unwrap().points(), &[0.0, 1.0]);
    }

    #[test]
    fn chebyshev_three_points_hit_midpoint() {
        let g = chebyshev_grid(3, 1.0).unwrap();
        assert!((g[1] - 0.5).abs() < 1e-15);
        assert_eq!(g[2], 1.0);
    }

    #[test]
    fn chebyshev_five_points_closed_form() {
        let g = chebyshev_grid(5, 2.0).unwrap();
        let want = [0.0, 0.292_893_218_813_452_4, 1.0, 1.707_106_781_186_547_5, 2.0];
        for (a, b) in g.iter().zip(want) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn bad_arguments() {
        assert!(chebyshev_grid(1, 1.0).is_err());
        assert!(chebyshev_grid(4, 0.0).is_err());
        assert!(TimeGrid::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.5, 1.0]).is_err());
    }

    #[test]
    fn uniform_endpoints_exact() {
        let g = TimeGrid::uniform(101, 3.0).unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 3.0);
        assert_eq!(g.t_end(), 3.0);
    }
}
