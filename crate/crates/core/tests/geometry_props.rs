mod common;

use common::p;
use fracfem::geometry::{clip_segment_to_triangle, point_in_triangle, signed_area2, Point2, Segment2, Triangle2};
use proptest::prelude::*;

fn clipped_len(s: &Segment2, tri: &Triangle2) -> f64 {
    clip_segment_to_triangle(s, tri).map_or(0.0, |c| c.length())
}

/// The four midpoint children of a triangle.
fn split4(t: &Triangle2, w: f64) -> [Triangle2; 4] {
    let m01 = t[0].lerp(t[1], w);
    let m12 = t[1].lerp(t[2], 0.5);
    let m20 = t[0].lerp(t[2], w);
    [[t[0], m01, m20], [m01, t[1], m12], [m20, m12, t[2]], [m01, m12, m20]]
}

fn coord() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

fn point() -> impl Strategy<Value = Point2> {
    (coord(), coord()).prop_map(|(x, y)| p(x, y))
}

fn triangle() -> impl Strategy<Value = Triangle2> {
    (point(), point(), point())
        .prop_filter("non-degenerate", |(a, b, c)| signed_area2(&[*a, *b, *c]).abs() > 1e-3)
        .prop_map(|(a, b, c)| {
            if signed_area2(&[a, b, c]) > 0.0 {
                [a, b, c]
            } else {
                [a, c, b]
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn clip_is_additive_over_children(tri in triangle(), a in point(), b in point(), w in 0.1..0.5f64) {
        prop_assume!(a.dist(b) > 1e-3);
        let s = Segment2::new(a, b);
        let whole = clipped_len(&s, &tri);
        let parts: f64 = split4(&tri, w).iter().map(|c| clipped_len(&s, c)).sum();
        prop_assert!((whole - parts).abs() <= 1e-12 * s.length().max(1.0), "{whole} vs {parts}");
    }

    #[test]
    fn clip_is_inside_and_shorter(tri in triangle(), a in point(), b in point()) {
        prop_assume!(a.dist(b) > 1e-3);
        let s = Segment2::new(a, b);
        if let Some(c) = clip_segment_to_triangle(&s, &tri) {
            prop_assert!(c.length() <= s.length() * (1.0 + 1e-12));
            prop_assert!(point_in_triangle(&tri, c.midpoint(), 1e-9));
        }
    }

    // Sampled oracle: the fraction of parameters whose points lie in the
    // triangle approximates the clipped fraction.
    #[test]
    fn clip_matches_sampling(tri in triangle(), a in point(), b in point()) {
        prop_assume!(a.dist(b) > 1e-3);
        let s = Segment2::new(a, b);
        let n = 4000;
        let inside = (0..n)
            .filter(|&k| point_in_triangle(&tri, s.point_at((k as f64 + 0.5) / n as f64), 0.0))
            .count();
        let sampled = inside as f64 / n as f64 * s.length();
        prop_assert!((sampled - clipped_len(&s, &tri)).abs() <= 2.0 * s.length() / n as f64 + 1e-12);
    }
}
