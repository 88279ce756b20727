//! Stick families from nearest points of a finite set.
//!
//! For a finite `C` and a query `x`, the stick from a nearest point `c`
//! of `C` toward `x` is a ray of the distance function to `C`. Any two
//! such sticks satisfy the two sticks condition, and extending all of
//! them to a common length `L` gives an equal-length family, provided the
//! extended end still has `c` as its nearest point.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AtlasError, Error};
use crate::moduli::ModulusOptions;
use crate::norm::NormSpec;
use crate::sampling::{gaussian, halton, sample_rng, unit_vector};
use crate::sticks::{select_special_stick, Stick};
use crate::vector::Vector;

/// Relative tolerance under which two site distances tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// A finite set `C` with the norm used to measure distances to it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SiteSet {
    pub sites: Vec<Vector>,
    pub norm: NormSpec,
}

impl SiteSet {
    pub fn new(sites: Vec<Vector>, norm: NormSpec) -> Result<Self, AtlasError> {
        if sites.is_empty() {
            return Err(AtlasError::EmptySites);
        }
        for s in &sites {
            norm.check(s)?;
        }
        Ok(Self { sites, norm })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nearest {
    pub index: usize,
    pub site: Vector,
    pub distance: f64,
    /// False when another site is within the tie tolerance.
    pub unique: bool,
}

/// The site nearest to `x`, by exhaustive search.
pub fn nearest_point(sites: &SiteSet, x: &Vector) -> Result<Nearest, AtlasError> {
    sites.norm.check(x)?;
    let mut best = (usize::MAX, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (i, s) in sites.sites.iter().enumerate() {
        let d = sites.norm.value(&(x - s));
        if d < best.1 {
            second = best.1;
            best = (i, d);
        } else if d < second {
            second = d;
        }
    }
    if best.0 == usize::MAX {
        return Err(AtlasError::EmptySites);
    }
    let unique = second - best.1 > TIE_TOLERANCE * (1.0 + best.1);
    Ok(Nearest {
        index: best.0,
        site: sites.sites[best.0].clone(),
        distance: best.1,
        unique,
    })
}

/// An equal-length family of distance-function rays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayFamily {
    pub sticks: Vec<Stick>,
    pub length: f64,
    pub site_index: Vec<usize>,
    /// Why queries were skipped, one line each.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl RayFamily {
    pub fn len(&self) -> usize {
        self.sticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sticks.is_empty()
    }

    /// One stick per row: `site`, then `start_0..`, `end_0..`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), Error> {
        let mut w = csv::Writer::from_writer(out);
        let dim = self.sticks.first().map_or(0, |s| s.dim());
        let mut header = vec!["site".to_string()];
        header.extend((0..dim).map(|i| format!("start_{i}")));
        header.extend((0..dim).map(|i| format!("end_{i}")));
        w.write_record(&header)?;
        for (s, i) in self.sticks.iter().zip(&self.site_index) {
            let mut row = vec![i.to_string()];
            row.extend(
                s.start
                    .iter()
                    .chain(s.end.iter())
                    .map(|v| format!("{v:.16e}")),
            );
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sticks from the nearest site toward each query, extended to `length`.
///
/// Queries with a tied nearest site are skipped, as are those whose
/// extended end has a different nearest site; each skip leaves a note.
pub fn build_ray_family(
    sites: &SiteSet,
    queries: &[Vector],
    length: f64,
) -> Result<RayFamily, AtlasError> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(AtlasError::InvalidParameter(format!("length = {length}")));
    }
    let mut fam = RayFamily {
        sticks: Vec::new(),
        length,
        site_index: Vec::new(),
        notes: Vec::new(),
    };
    for (q, x) in queries.iter().enumerate() {
        let near = nearest_point(sites, x)?;
        if near.distance <= 0.0 {
            return Err(AtlasError::QueryInSites { index: q });
        }
        if !near.unique {
            fam.notes
                .push(format!("query {q}: nearest site is not unique"));
            continue;
        }
        let dir = x - &near.site;
        let end = near.site.axpy(length / near.distance, &dir);
        let check = nearest_point(sites, &end)?;
        if check.index != near.index || !check.unique {
            fam.notes.push(format!(
                "query {q}: extended end is nearer to site {} than to site {}",
                check.index, near.index
            ));
            continue;
        }
        fam.sticks.push(Stick {
            start: near.site,
            end,
        });
        fam.site_index.push(near.index);
    }
    Ok(fam)
}

/// `count` Halton points in the box `[lo, hi]`, starting at `offset`.
pub fn halton_queries(lo: &[f64], hi: &[f64], count: usize, offset: u64) -> Vec<Vector> {
    (0..count as u64)
        .map(|k| {
            let u = halton(offset + k, lo.len());
            Vector::from_raw(
                u.iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(u, (a, b))| a + u * (b - a))
                    .collect(),
            )
        })
        .collect()
}

/// One row of [`endpoint_map_modulus`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub delta0: f64,
    /// Largest `|l1 - m1|` over pairs with intermediate points at
    /// parameters `>= t` within `delta0` of each other; 0 if none.
    pub epsilon: f64,
    pub pairs: usize,
}

/// `min |l_a - m_b|` over `a, b in [t, 1]`. The objective is jointly
/// convex, so nested golden-section searches find it.
pub fn closest_intermediate_gap(norm: &NormSpec, l: &Stick, m: &Stick, t: f64) -> f64 {
    let inner = |a: f64| {
        let la = l.point_at(a);
        golden_min(t, 1.0, |b| norm.value(&(&la - &m.point_at(b))))
    };
    golden_min(t, 1.0, inner)
}

fn golden_min<F: Fn(f64) -> f64>(lo: f64, hi: f64, f: F) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    f(lo).min(f(hi)).min(fc).min(fd)
}

/// Empirical modulus of continuity of the map from intermediate points
/// (at parameters `>= t`) to far ends, over all pairs of the family.
pub fn endpoint_map_modulus(
    norm: &NormSpec,
    family: &RayFamily,
    t: f64,
    delta0_grid: &[f64],
) -> Result<Vec<EpsilonRow>, AtlasError> {
    if family.is_empty() {
        return Err(AtlasError::EmptyFamily);
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(AtlasError::InvalidParameter(format!(
            "t = {t} is outside (0, 1]"
        )));
    }
    let mut pairs = Vec::new();
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let (l, m) = (&family.sticks[i], &family.sticks[j]);
            let gap = closest_intermediate_gap(norm, l, m, t);
            pairs.push((gap, norm.value(&(&l.end - &m.end))));
        }
    }
    Ok(delta0_grid
        .iter()
        .map(|&delta0| {
            let inside = pairs.iter().filter(|(g, _)| *g <= delta0);
            let (count, eps) = inside.fold((0, 0.0f64), |(c, e), (_, d)| (c + 1, e.max(*d)));
            EpsilonRow {
                delta0,
                epsilon: eps,
                pairs: count,
            }
        })
        .collect())
}

/// Two unit rays through a small ball, from a finite set of sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripConfig {
    pub l: Stick,
    /// The stick with the larger modulus at `kappa delta`, per
    /// [`crate::sticks::select_special_stick`].
    pub m: Stick,
    pub x0: Vector,
    pub delta: f64,
}

/// A random configuration of two rays of the distance to a finite set,
/// both passing through `B(x0, delta)` near their midpoints.
///
/// Sites cluster on the Euclidean sphere of radius 3 around a random
/// direction `u`, with spread about `3 delta`; `x0` sits half a unit (in
/// `norm`) beyond them. The two queries are uniform in `B(x0, delta)`.
/// Returns `None` when a query ties or the extended ends change site;
/// callers draw again from the next stream.
pub fn random_strip_configuration(
    norm: &NormSpec,
    delta: f64,
    sites: usize,
    seed: u64,
    index: u64,
) -> Option<StripConfig> {
    let mut rng = sample_rng(seed, index);
    let dim = norm.dim();
    let u = gaussian(&mut rng, dim);
    let u = u.scale(1.0 / u.dot(&u).sqrt());
    let centres: Vec<Vector> = (0..sites.max(1))
        .map(|_| {
            let v = u.axpy(delta, &gaussian(&mut rng, dim));
            v.scale(3.0 / v.dot(&v).sqrt())
        })
        .collect();
    let x0 = u.scale(3.0).axpy(0.5 / norm.value(&u), &u);
    let queries: Vec<Vector> = (0..2)
        .map(|_| {
            let r = delta * rng.gen::<f64>().powf(1.0 / dim as f64);
            x0.axpy(r, &unit_vector(&mut rng, norm))
        })
        .collect();
    let set = SiteSet::new(centres, norm.clone()).ok()?;
    let fam = build_ray_family(&set, &queries, 1.0).ok()?;
    if fam.len() != 2 {
        return None;
    }
    let mut sticks = fam.sticks;
    let m = sticks.pop()?;
    let l = sticks.pop()?;
    Some(StripConfig { l, m, x0, delta })
}

/// `count` configurations from successive streams of `seed`, with `m` set
/// to the special stick at radius `kappa delta`. Gives up after
/// `20 count` draws.
pub fn strip_configurations(
    norm: &NormSpec,
    delta: f64,
    kappa: f64,
    count: usize,
    seed: u64,
    modulus: &ModulusOptions,
) -> Result<Vec<StripConfig>, Error> {
    let mut out = Vec::with_capacity(count);
    let mut index = 0u64;
    while out.len() < count && index < 20 * count as u64 {
        if let Some(mut c) = random_strip_configuration(norm, delta, 16, seed, index) {
            let pair = [c.l.clone(), c.m.clone()];
            let special = select_special_stick(norm, &pair, kappa * delta, modulus)?;
            if special == 0 {
                std::mem::swap(&mut c.l, &mut c.m);
            }
            out.push(c);
        }
        index += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sticks::two_sticks_check;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn nearest_examples() {
        let n = NormSpec::euclidean(2).unwrap();
        let one = SiteSet::new(vec![v(&[1.0, 1.0])], n.clone()).unwrap();
        let near = nearest_point(&one, &v(&[4.0, 5.0])).unwrap();
        assert_eq!(near.index, 0);
        assert!((near.distance - 5.0).abs() < 1e-15);
        assert!(near.unique);
        let two = SiteSet::new(vec![v(&[0.0, 0.0]), v(&[2.0, 0.0])], n.clone()).unwrap();
        assert!(!nearest_point(&two, &v(&[1.0, 3.0])).unwrap().unique);
        assert!(SiteSet::new(vec![], n).is_err());
    }

    #[test]
    fn single_site_family() {
        let n = NormSpec::euclidean(2).unwrap();
        let sites = SiteSet::new(vec![Vector::zeros(2)], n.clone()).unwrap();
        let qs: Vec<Vector> = (0..12)
            .map(|k| {
                let a = k as f64 * 0.5;
                v(&[a.cos(), a.sin()])
            })
            .collect();
        let fam = build_ray_family(&sites, &qs, 1.0).unwrap();
        assert_eq!(fam.len(), 12);
        for (s, q) in fam.sticks.iter().zip(&qs) {
            assert!((&s.end - q).max_abs() < 1e-15);
        }
        let rows = endpoint_map_modulus(&n, &fam, 0.5, &[0.0, 0.1]).unwrap();
        assert!(rows.iter().all(|r| r.epsilon == 0.0 || r.pairs > 0));
        assert!(build_ray_family(&sites, &[Vector::zeros(2)], 1.0).is_err());
    }

    #[test]
    fn two_sites_split_the_family() {
        let n = NormSpec::euclidean(2).unwrap();
        let sites = SiteSet::new(vec![Vector::zeros(2), v(&[4.0, 0.0])], n.clone()).unwrap();
        let qs = halton_queries(&[0.5, -1.0], &[3.5, 1.0], 40, 0);
        let fam = build_ray_family(&sites, &qs, 1.0).unwrap();
        assert!(fam.site_index.contains(&0) && fam.site_index.contains(&1));
        for a in &fam.sticks {
            for b in &fam.sticks {
                assert!(two_sticks_check(&n, a, b));
            }
        }
    }

    #[test]
    fn skipped_extensions_leave_notes() {
        let n = NormSpec::euclidean(1).unwrap();
        let sites = SiteSet::new(vec![v(&[0.0]), v(&[1.0])], n).unwrap();
        let fam = build_ray_family(&sites, &[v(&[0.2])], 1.0).unwrap();
        assert!(fam.is_empty());
        assert_eq!(fam.notes.len(), 1);
    }

    #[test]
    fn strip_configurations_qualify() {
        use crate::sticks::{equal_length, two_sticks_check};
        let n = NormSpec::p_norm(3.0, 3).unwrap();
        let opts = crate::moduli::ModulusOptions::fast();
        let cs = strip_configurations(&n, 1e-3, 10.0, 5, 1, &opts).unwrap();
        assert_eq!(cs.len(), 5);
        for c in &cs {
            assert!(two_sticks_check(&n, &c.l, &c.m));
            assert!(equal_length(&n, &c.l, &c.m, 1e-12));
            let (_, d) = crate::sticks::strip::closest_point_on_segment(&n, &c.l, &c.x0);
            assert!(d <= 1e-3);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let n = NormSpec::euclidean(2).unwrap();
        let sites = SiteSet::new(vec![Vector::zeros(2)], n).unwrap();
        let fam = build_ray_family(&sites, &[v(&[0.0, 2.0])], 1.0).unwrap();
        let mut buf = Vec::new();
        fam.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("site,start_0,start_1,end_0,end_1\n"));
        assert_eq!(text.lines().count(), 2);
    }
}
