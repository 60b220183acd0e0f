//! Axis-aligned boxes, IOU and the `[u, v, s, r]` observation parameterization.
//!
//! Boxes are stored in corner form `(x1, y1, x2, y2)` with real-valued pixel
//! coordinates. MOT files use `(left, top, width, height)`; conversion happens
//! at the I/O boundary via [`BBox::from_ltwh`] and [`BBox::to_ltwh`].

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("box coordinates must be finite and ordered, got ({x1}, {y1}, {x2}, {y2})")]
    InvalidBox { x1: f64, y1: f64, x2: f64, y2: f64 },
    #[error("box has zero width or height: ({x1}, {y1}, {x2}, {y2})")]
    DegenerateBox { x1: f64, y1: f64, x2: f64, y2: f64 },
    #[error("observation needs finite centre and positive area/aspect, got s={s}, r={r}")]
    DegenerateObservation { s: f64, r: f64 },
}

/// Axis-aligned bounding box in corner form.
///
/// Invariants: all coordinates finite, `x2 >= x1`, `y2 >= y1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self, GeometryError> {
        let finite = x1.is_finite() && y1.is_finite() && x2.is_finite() && y2.is_finite();
        if !finite || x2 < x1 || y2 < y1 {
            return Err(GeometryError::InvalidBox { x1, y1, x2, y2 });
        }
        Ok(Self { x1, y1, x2, y2 })
    }

    /// Builds a box from MOT-style `(left, top, width, height)`.
    pub fn from_ltwh(left: f64, top: f64, width: f64, height: f64) -> Result<Self, GeometryError> {
        Self::new(left, top, left + width, top + height)
    }

    pub fn to_ltwh(&self) -> [f64; 4] {
        [self.x1, self.y1, self.width(), self.height()]
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    #[inline]
    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) * 0.5, (self.y1 + self.y2) * 0.5)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Self {
        Self {
            x1: self.x1 + dx,
            y1: self.y1 + dy,
            x2: self.x2 + dx,
            y2: self.y2 + dy,
        }
    }

    /// True when `other` lies entirely inside `self` (boundaries included).
    pub fn contains(&self, other: &BBox) -> bool {
        self.x1 <= other.x1 && self.y1 <= other.y1 && self.x2 >= other.x2 && self.y2 >= other.y2
    }
}

/// Intersection-over-union of two boxes, in `[0, 1]`.
///
/// A zero union (two degenerate boxes) yields 0 rather than NaN.
#[inline]
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let iw = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let ih = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = iw * ih;
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).min(1.0)
}

/// Box centre, area and aspect ratio: the measured part of the filter state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    /// Horizontal centre (px).
    pub u: f64,
    /// Vertical centre (px).
    pub v: f64,
    /// Area (px²).
    pub s: f64,
    /// Aspect ratio, width / height.
    pub r: f64,
}

impl Observation {
    pub fn new(u: f64, v: f64, s: f64, r: f64) -> Result<Self, GeometryError> {
        if !(u.is_finite() && v.is_finite() && s.is_finite() && r.is_finite()) || s <= 0.0 || r <= 0.0 {
            return Err(GeometryError::DegenerateObservation { s, r });
        }
        Ok(Self { u, v, s, r })
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.u, self.v, self.s, self.r]
    }
}

pub fn box_to_observation(b: &BBox) -> Result<Observation, GeometryError> {
    let w = b.width();
    let h = b.height();
    if w <= 0.0 || h <= 0.0 {
        return Err(GeometryError::DegenerateBox {
            x1: b.x1,
            y1: b.y1,
            x2: b.x2,
            y2: b.y2,
        });
    }
    let (u, v) = b.center();
    Ok(Observation {
        u,
        v,
        s: w * h,
        r: w / h,
    })
}

pub fn observation_to_box(o: &Observation) -> Result<BBox, GeometryError> {
    if !(o.s > 0.0 && o.r > 0.0) || !o.u.is_finite() || !o.v.is_finite() || !o.s.is_finite() || !o.r.is_finite() {
        return Err(GeometryError::DegenerateObservation { s: o.s, r: o.r });
    }
    let w = (o.s * o.r).sqrt();
    let h = o.s / w;
    BBox::new(o.u - w * 0.5, o.v - h * 0.5, o.u + w * 0.5, o.v + h * 0.5)
}

impl TryFrom<&BBox> for Observation {
    type Error = GeometryError;

    fn try_from(b: &BBox) -> Result<Self, Self::Error> {
        box_to_observation(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bb(x1: f64, y1: f64, x2: f64, y2: f64) -> BBox {
        BBox::new(x1, y1, x2, y2).unwrap()
    }

    #[test]
    fn iou_examples() {
        let a = bb(0.0, 0.0, 10.0, 10.0);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &bb(20.0, 20.0, 30.0, 30.0)), 0.0);
        // intersection 50, union 150
        assert!((iou(&a, &bb(5.0, 0.0, 15.0, 10.0)) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_boxes_have_zero_iou() {
        let p = bb(3.0, 3.0, 3.0, 3.0);
        assert_eq!(iou(&p, &p), 0.0);
        let line = bb(0.0, 5.0, 10.0, 5.0);
        assert_eq!(iou(&line, &bb(0.0, 0.0, 10.0, 10.0)), 0.0);
    }

    #[test]
    fn rejects_invalid_boxes() {
        assert!(BBox::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(BBox::new(0.0, 0.0, f64::NAN, 1.0).is_err());
        assert!(BBox::new(0.0, 0.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn observation_examples() {
        let o = box_to_observation(&bb(0.0, 0.0, 10.0, 20.0)).unwrap();
        assert_eq!(
            o,
            Observation {
                u: 5.0,
                v: 10.0,
                s: 200.0,
                r: 0.5
            }
        );
        let o = box_to_observation(&bb(0.0, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!(
            o,
            Observation {
                u: 0.5,
                v: 0.5,
                s: 1.0,
                r: 1.0
            }
        );
        let o = box_to_observation(&bb(100.0, 50.0, 140.0, 130.0)).unwrap();
        assert_eq!(
            o,
            Observation {
                u: 120.0,
                v: 90.0,
                s: 3200.0,
                r: 0.5
            }
        );
    }

    #[test]
    fn observation_to_box_examples() {
        let b = observation_to_box(&Observation {
            u: 5.0,
            v: 10.0,
            s: 200.0,
            r: 0.5,
        })
        .unwrap();
        assert_eq!(b, bb(0.0, 0.0, 10.0, 20.0));
        let b = observation_to_box(&Observation {
            u: 0.5,
            v: 0.5,
            s: 1.0,
            r: 1.0,
        })
        .unwrap();
        assert_eq!(b, bb(0.0, 0.0, 1.0, 1.0));
    }

    #[test]
    fn degenerate_conversions_error() {
        assert!(matches!(
            box_to_observation(&bb(0.0, 0.0, 0.0, 5.0)),
            Err(GeometryError::DegenerateBox { .. })
        ));
        assert!(matches!(
            observation_to_box(&Observation {
                u: 0.0,
                v: 0.0,
                s: 0.0,
                r: 1.0
            }),
            Err(GeometryError::DegenerateObservation { .. })
        ));
        assert!(Observation::new(0.0, 0.0, 10.0, -1.0).is_err());
    }

    fn arb_box() -> impl Strategy<Value = BBox> {
        (-500.0..500.0f64, -500.0..500.0f64, 0.0..200.0f64, 0.0..200.0f64)
            .prop_map(|(x, y, w, h)| BBox::new(x, y, x + w, y + h).unwrap())
    }

    fn arb_positive_box() -> impl Strategy<Value = BBox> {
        (-500.0..500.0f64, -500.0..500.0f64, 0.5..200.0f64, 0.5..200.0f64)
            .prop_map(|(x, y, w, h)| BBox::new(x, y, x + w, y + h).unwrap())
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded(a in arb_box(), b in arb_box()) {
            let ab = iou(&a, &b);
            prop_assert_eq!(ab, iou(&b, &a));
            prop_assert!((0.0..=1.0).contains(&ab));
        }

        #[test]
        fn iou_self_is_one(a in arb_positive_box()) {
            prop_assert!((iou(&a, &a) - 1.0).abs() < 1e-12);
        }

        // Integer offsets and dyadic coordinates keep the shifted arithmetic exact.
        #[test]
        fn iou_translation_invariant(
            c in proptest::array::uniform4(-256i32..256),
            d in proptest::array::uniform4(-256i32..256),
            dx in -1000i32..1000,
            dy in -1000i32..1000,
        ) {
            let mk = |c: [i32; 4]| {
                let (x1, x2) = (c[0].min(c[2]) as f64 / 4.0, c[0].max(c[2]) as f64 / 4.0);
                let (y1, y2) = (c[1].min(c[3]) as f64 / 4.0, c[1].max(c[3]) as f64 / 4.0);
                BBox::new(x1, y1, x2, y2).unwrap()
            };
            let (a, b) = (mk(c), mk(d));
            let (dx, dy) = (dx as f64, dy as f64);
            prop_assert_eq!(iou(&a, &b), iou(&a.translate(dx, dy), &b.translate(dx, dy)));
        }

        #[test]
        fn observation_roundtrip(b in arb_positive_box()) {
            let back = observation_to_box(&box_to_observation(&b).unwrap()).unwrap();
            let scale = b.x1.abs().max(b.x2.abs()).max(b.y1.abs()).max(b.y2.abs()).max(1.0);
            for (p, q) in [(b.x1, back.x1), (b.y1, back.y1), (b.x2, back.x2), (b.y2, back.y2)] {
                prop_assert!((p - q).abs() <= 1e-9 * scale);
            }
        }
    }
}
