use super::{Obstacle, ObstacleQuery, World};
use crate::geometry::Vec2;
use crate::real::Real;

/// A world paired with a uniform bucket grid over obstacle footprints.
///
/// Each obstacle is registered in every bucket touched by its footprint
/// grown by `margin`, so a query with a margin up to that value only reads
/// the bucket containing the query point.
#[derive(Debug, Clone)]
pub struct IndexedWorld<'a, T> {
    world: &'a World<T>,
    origin: Vec2<T>,
    cell: T,
    margin: T,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a, T: Real> IndexedWorld<'a, T> {
    pub fn new(world: &'a World<T>, cell: T, margin: T) -> Self {
        assert!(cell > T::zero(), "bucket size must be positive");
        let pad = margin + cell;
        let mut lo = Vec2::new(-pad, -world.track_width * T::half() - pad);
        let mut hi = Vec2::new(world.track_length + pad, world.track_width * T::half() + pad);
        for o in &world.obstacles {
            let (a, b) = (o.min_corner(), o.max_corner());
            lo = Vec2::new(lo.x.min(a.x - pad), lo.y.min(a.y - pad));
            hi = Vec2::new(hi.x.max(b.x + pad), hi.y.max(b.y + pad));
        }
        let nx = ((hi.x - lo.x) / cell).ceil().to_usize().unwrap_or(1).max(1);
        let ny = ((hi.y - lo.y) / cell).ceil().to_usize().unwrap_or(1).max(1);
        let mut index = Self {
            world,
            origin: lo,
            cell,
            margin,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for (i, o) in world.obstacles.iter().enumerate() {
            let grow = Vec2::new(margin, margin);
            let (ix0, iy0) = index.bucket_of(o.min_corner() - grow);
            let (ix1, iy1) = index.bucket_of(o.max_corner() + grow);
            for ix in ix0..=ix1 {
                for iy in iy0..=iy1 {
                    index.buckets[ix * ny + iy].push(i as u32);
                }
            }
        }
        index
    }

    /// Index with 0.25 m buckets and a 0.05 m registration margin.
    pub fn with_defaults(world: &'a World<T>) -> Self {
        Self::new(world, T::lit(0.25), T::lit(0.05))
    }

    fn bucket_of(&self, p: Vec2<T>) -> (usize, usize) {
        let clamp = |v: T, n: usize| -> usize {
            let i = v.floor().to_i64().unwrap_or(0);
            i.clamp(0, n as i64 - 1) as usize
        };
        (
            clamp((p.x - self.origin.x) / self.cell, self.nx),
            clamp((p.y - self.origin.y) / self.cell, self.ny),
        )
    }

    fn outside(&self, p: Vec2<T>) -> bool {
        let rel = p - self.origin;
        rel.x < T::zero()
            || rel.y < T::zero()
            || rel.x >= self.cell * T::from_count(self.nx)
            || rel.y >= self.cell * T::from_count(self.ny)
    }
}

impl<'a, T: Real> ObstacleQuery<T> for IndexedWorld<'a, T> {
    fn world(&self) -> &World<T> {
        self.world
    }

    fn visit_near(&self, p: Vec2<T>, margin: T, f: &mut dyn FnMut(&Obstacle<T>)) {
        if margin <= self.margin {
            // The padded grid covers every registered footprint, so a point
            // outside it cannot be near any obstacle.
            if self.outside(p) {
                return;
            }
            let (ix, iy) = self.bucket_of(p);
            for &i in &self.buckets[ix * self.ny + iy] {
                f(&self.world.obstacles[i as usize]);
            }
            return;
        }
        let extra = margin - self.margin;
        let (ix0, iy0) = self.bucket_of(p - Vec2::new(extra, extra));
        let (ix1, iy1) = self.bucket_of(p + Vec2::new(extra, extra));
        let mut hits: Vec<u32> = Vec::new();
        for ix in ix0..=ix1 {
            for iy in iy0..=iy1 {
                hits.extend_from_slice(&self.buckets[ix * self.ny + iy]);
            }
        }
        // Ascending order keeps stacked sums identical to a linear scan.
        hits.sort_unstable();
        hits.dedup();
        for i in hits {
            f(&self.world.obstacles[i as usize]);
        }
    }
}
