/// Wraps an angle in degrees to (-180, 180].
pub fn wrap_deg(angle: f64) -> f64 {
    let w = (angle + 180.0).rem_euclid(360.0) - 180.0;
    if w <= -180.0 {
        w + 360.0
    } else {
        w
    }
}

/// `(sin, cos)` of an angle in degrees, exact at multiples of 90.
pub fn sin_cos_deg(angle: f64) -> (f64, f64) {
    let q = angle / 90.0;
    if q == q.round() && q.abs() < 1e15 {
        return match (q as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
    }
    angle.to_radians().sin_cos()
}
