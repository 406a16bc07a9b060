use crate::config::{ConfigView, FiberSum, PeriodicFiber, Region, WindowConfig};
use crate::error::{Error, Result};
use crate::lattice::{gcd, lcm, primitive_multiple};
use crate::vector::IntVector;

/// Closed-form limit of `X^{k·stride·step} s` as `k` grows, with the
/// stride used. Fibers along `step` are invariant under the stride and
/// survive unchanged; every other fiber line drifts out of any fixed box.
/// The stride makes the sequence converge when some parallel fiber's
/// period does not divide the step; it is a subsequence of the plain
/// translates, which is all a limit argument by compactness needs.
pub fn fiber_limit(s: &FiberSum, step: &IntVector) -> Result<(FiberSum, u64)> {
    Error::check_dim(s.dim(), step.dim())?;
    let (dir, m) = primitive_multiple(step)?;
    let family = s.family(&dir);
    let m = m.abs();
    let stride = family
        .fibers()
        .iter()
        .fold(1i64, |acc, f| {
            let p = f.period() as i64;
            lcm(acc, p / gcd(p, m))
        });
    Ok((family, stride as u64))
}

/// Beyond this many steps the line of `f` translated by `k·step` misses
/// `window`. `step` must not be parallel to the fiber.
fn exit_index(f: &PeriodicFiber, step: &IntVector, window: &Region) -> Result<i64> {
    let (u, w) = (f.anchor(), f.direction());
    let d = u.dim();
    // x = u + k·step + j·w; solve for k from two coordinates with a
    // nonzero 2x2 minor.
    for a in 0..d {
        for b in a + 1..d {
            let det = step[a] as i128 * w[b] as i128 - step[b] as i128 * w[a] as i128;
            if det == 0 {
                continue;
            }
            let span = |i: usize| -> i128 {
                let lo = window.lo[i] as i128 - u[i] as i128;
                let hi = window.hi[i] as i128 - u[i] as i128;
                lo.abs().max(hi.abs())
            };
            let num = span(a) * (w[b] as i128).abs() + span(b) * (w[a] as i128).abs();
            let k = num / det.abs() + 1;
            return i64::try_from(k).map_err(|_| Error::Invalid("translate index overflows".into()));
        }
    }
    Err(Error::ParallelDirections(step.clone(), w.clone()))
}

/// Finite stand-in for a limit point of `c, X^{step} c, X^{2·step} c, ...`
/// seen through `window`.
///
/// Fiber sums use [`fiber_limit`], cross-checked by rasterizing the
/// translates once every non-parallel fiber has provably left the window;
/// the check fails loudly if the two disagree. Other inputs are
/// rasterized for `k = 0, 1, ...` and the first content that repeats for
/// `patience` consecutive `k` is returned. Running past `k_max` is
/// inconclusive.
pub fn stabilized_translate_limit(
    c: &ConfigView,
    step: &IntVector,
    window: &Region,
    k_max: u64,
    patience: u64,
) -> Result<WindowConfig> {
    Error::check_dim(c.dim(), step.dim())?;
    Error::check_dim(c.dim(), window.dim())?;
    if step.is_zero() {
        return Err(Error::ZeroVector);
    }
    let patience = patience.max(1);
    if let ConfigView::Fibers(s) = c {
        let (limit, stride) = fiber_limit(s, step)?;
        let expected = ConfigView::Fibers(limit).rasterize(window)?;
        let (dir, _) = primitive_multiple(step)?;
        let mut start = 0i64;
        for f in s.fibers().iter().filter(|f| f.direction() != &dir) {
            start = start.max(exit_index(f, step, window)?);
        }
        let first = (start as u64).div_ceil(stride);
        if first + patience > k_max {
            return Err(Error::Inconclusive {
                what: format!("fibers leave the window only after {start} translates by {step}"),
                bound: k_max,
            });
        }
        for i in first..first + patience {
            let k = i64::try_from(i * stride).map_err(|_| Error::Invalid("translate index overflows".into()))?;
            let seen = c.translate(&step.scale(k))?.rasterize(window)?;
            if seen != expected {
                return Err(Error::Verification(format!(
                    "translate by {k}·{step} disagrees with the closed-form limit"
                )));
            }
        }
        return Ok(expected);
    }
    let mut prev: Option<WindowConfig> = None;
    let mut run = 0;
    for k in 0..=k_max {
        let cur = c.translate(&step.scale(k as i64))?.rasterize(window)?;
        if prev.as_ref() == Some(&cur) {
            run += 1;
        } else {
            run = 1;
        }
        if run >= patience {
            return Ok(cur);
        }
        prev = Some(cur);
    }
    Err(Error::Inconclusive {
        what: format!("translates by multiples of {step} did not stabilize on the window"),
        bound: k_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PeriodicConfig;
    use crate::iv;
    use num_bigint::BigInt;

    fn fiber(anchor: IntVector, dir: IntVector, vals: &[i64]) -> PeriodicFiber {
        PeriodicFiber::new(anchor, dir, vals.iter().map(|&v| BigInt::from(v)).collect()).unwrap()
    }

    #[test]
    fn periodic_step_in_lattice_is_constant() {
        let cb = ConfigView::Periodic(PeriodicConfig::checkerboard());
        let w = Region::centered(2, 4);
        let lim = stabilized_translate_limit(&cb, &iv![2, 0], &w, 16, 4).unwrap();
        assert_eq!(lim, cb.rasterize(&w).unwrap());
        let odd = stabilized_translate_limit(&cb, &iv![1, 0], &w, 16, 4).unwrap_err();
        assert!(odd.is_inconclusive());
    }

    #[test]
    fn cross_keeps_the_parallel_fiber() {
        let h = fiber(iv![0, 0], iv![1, 0], &[1, 0]);
        let v = fiber(iv![3, 0], iv![0, 1], &[2]);
        let s = FiberSum::new(2, vec![h.clone(), v]).unwrap();
        let w = Region::centered(2, 5);
        let lim = stabilized_translate_limit(&ConfigView::Fibers(s.clone()), &iv![2, 0], &w, 64, 4).unwrap();
        assert_eq!(lim, ConfigView::Fibers(FiberSum::single(h.clone())).rasterize(&w).unwrap());
        // Step 3 does not divide the period 2; the stride doubles it.
        let (limit, stride) = fiber_limit(&s, &iv![3, 0]).unwrap();
        assert_eq!(stride, 2);
        assert_eq!(limit, FiberSum::single(h));
        assert!(matches!(
            stabilized_translate_limit(&ConfigView::Fibers(s), &iv![0, 0], &w, 8, 2),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn far_fibers_need_a_budget() {
        let far = fiber(iv![0, 0], iv![0, 1], &[1]).translate(&iv![-500, 0]);
        let s = FiberSum::single(far);
        // Stepping right brings the far line across the window first.
        let w = Region::centered(2, 3);
        let err = stabilized_translate_limit(&ConfigView::Fibers(s.clone()), &iv![1, 0], &w, 64, 4).unwrap_err();
        assert!(err.is_inconclusive());
        let lim = stabilized_translate_limit(&ConfigView::Fibers(s), &iv![1, 0], &w, 1024, 4).unwrap();
        assert!(lim.is_zero());
    }
}
