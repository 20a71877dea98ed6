//! Support polygon of the stance feet and the static stability margin.

use nalgebra::Vector2;

fn cross(o: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Counter-clockwise convex hull (monotone chain). Collinear points on
/// the boundary are dropped.
pub fn convex_hull(points: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vector2<f64>> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vector2<f64>>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

/// Signed distance from `point` to the boundary of a CCW convex polygon,
/// positive inside. Degenerate polygons (fewer than 3 vertices) give -inf.
pub fn polygon_margin(point: &Vector2<f64>, hull: &[Vector2<f64>]) -> f64 {
    if hull.len() < 3 {
        return f64::NEG_INFINITY;
    }
    let n = hull.len();
    let mut inside = true;
    let mut nearest = f64::INFINITY;
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let edge = b - a;
        let len = edge.norm();
        let rel = point - a;
        if (edge.x * rel.y - edge.y * rel.x) / len < 0.0 {
            inside = false;
        }
        let t = (rel.dot(&edge) / (len * len)).clamp(0.0, 1.0);
        nearest = nearest.min((rel - edge * t).norm());
    }
    if inside {
        nearest
    } else {
        -nearest
    }
}

/// Stability margin of a ground-projected CoM over a set of foot points.
pub fn support_polygon_margin(com: &Vector2<f64>, feet: &[Vector2<f64>]) -> f64 {
    polygon_margin(com, &convex_hull(feet))
}

/// Index `i` of the hull edge `(hull[i], hull[i+1])` whose supporting line
/// the point lies furthest outside of, with that outward distance.
pub fn most_violated_edge(point: &Vector2<f64>, hull: &[Vector2<f64>]) -> Option<(usize, f64)> {
    let n = hull.len();
    let mut best: Option<(usize, f64)> = None;
    for i in 0..n {
        let a = hull[i];
        let edge = hull[(i + 1) % n] - a;
        let rel = point - a;
        let outward = -(edge.x * rel.y - edge.y * rel.x) / edge.norm();
        if outward > 0.0 && best.is_none_or(|(_, d)| outward > d) {
            best = Some((i, outward));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vector2<f64> {
        Vector2::new(x, y)
    }

    fn triangle(side: f64) -> Vec<Vector2<f64>> {
        let h = side * 3f64.sqrt() / 2.0;
        vec![v(0.0, 0.0), v(side, 0.0), v(side / 2.0, h)]
    }

    #[test]
    fn centroid_margin_is_inradius() {
        let t = triangle(0.2);
        let c = (t[0] + t[1] + t[2]) / 3.0;
        let m = support_polygon_margin(&c, &t);
        assert!((m - 0.2 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((m - 0.0577).abs() < 1e-4);
    }

    #[test]
    fn edge_and_outside() {
        let t = triangle(0.2);
        assert_eq!(support_polygon_margin(&v(0.1, 0.0), &t), 0.0);
        let m = support_polygon_margin(&v(0.1, -0.05), &t);
        assert!((m + 0.05).abs() < 1e-15);
        // outside near a vertex: Euclidean distance to the vertex
        let m = support_polygon_margin(&v(-0.03, -0.04), &t);
        assert!((m + 0.05).abs() < 1e-15);
    }

    #[test]
    fn degenerate_hulls() {
        let line = vec![v(0.0, 0.0), v(0.1, 0.0), v(0.2, 0.0)];
        assert_eq!(support_polygon_margin(&v(0.1, 0.0), &line), f64::NEG_INFINITY);
        assert_eq!(support_polygon_margin(&v(0.1, 0.0), &line[..2]), f64::NEG_INFINITY);
    }

    #[test]
    fn hull_drops_interior_points() {
        let pts = vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0), v(0.5, 0.5), v(0.5, 0.0)];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        // CCW
        let area: f64 = (0..h.len()).map(|i| cross(&v(0.0, 0.0), &h[i], &h[(i + 1) % h.len()])).sum();
        assert!(area > 0.0);
    }

    #[test]
    fn violated_edge() {
        let t = convex_hull(&triangle(0.2));
        assert!(most_violated_edge(&v(0.1, 0.05), &t).is_none());
        let (i, d) = most_violated_edge(&v(0.1, -0.02), &t).unwrap();
        assert!((d - 0.02).abs() < 1e-15);
        assert!(t[i].y == 0.0 && t[(i + 1) % 3].y == 0.0);
    }
}
