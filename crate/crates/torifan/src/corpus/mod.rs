//! Named example fans, a seeded generator of projective simplicial fans via
//! star subdivisions, and independent brute-force oracles for extremal rays
//! and foliated lengths.

pub mod oracle;
pub mod sweep;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::fan::{validate_fan, Cone, Fan, RawFan};
use crate::linalg::{primitive, Int};

/// A catalog fan with its documented facts; the facts are re-derived by the
/// oracles in the test suite rather than trusted.
pub struct NamedExample {
    pub name: &'static str,
    /// Extremal ray count, when the fan is projective.
    pub extremal_rays: Option<usize>,
    /// Sorted extremal-ray lengths for the full foliation, as exact strings.
    pub full_foliation_lengths: Option<&'static [&'static str]>,
    /// How the facts were obtained.
    pub note: &'static str,
}

pub fn named_examples() -> Vec<NamedExample> {
    vec![
        NamedExample {
            name: "Pn:1",
            extremal_rays: Some(1),
            full_foliation_lengths: Some(&["2"]),
            note: "hand-checked; line has anticanonical degree two",
        },
        NamedExample {
            name: "Pn:2",
            extremal_rays: Some(1),
            full_foliation_lengths: Some(&["3"]),
            note: "hand-checked; a line in the plane meets each coordinate divisor once",
        },
        NamedExample {
            name: "Pn:3",
            extremal_rays: Some(1),
            full_foliation_lengths: Some(&["4"]),
            note: "hand-checked",
        },
        NamedExample {
            name: "Pn:4",
            extremal_rays: Some(1),
            full_foliation_lengths: Some(&["5"]),
            note: "hand-checked",
        },
        NamedExample {
            name: "P1xP1",
            extremal_rays: Some(2),
            full_foliation_lengths: Some(&["2", "2"]),
            note: "hand-checked; two rulings of anticanonical degree two",
        },
        NamedExample {
            name: "hirzebruch:1",
            extremal_rays: Some(2),
            full_foliation_lengths: Some(&["1", "2"]),
            note: "re-derived by the oracle; fiber and exceptional section",
        },
        NamedExample {
            name: "hirzebruch:2",
            extremal_rays: Some(2),
            full_foliation_lengths: Some(&["0", "2"]),
            note: "re-derived by the oracle; the negative section has degree zero",
        },
        NamedExample {
            name: "wps:1,1,2",
            extremal_rays: Some(1),
            full_foliation_lengths: Some(&["2"]),
            note: "hand-checked; degrees 1/2 + 1 + 1/2 on the generating curve",
        },
        NamedExample {
            name: "product:Pn:1,Pn:2",
            extremal_rays: Some(2),
            full_foliation_lengths: Some(&["2", "3"]),
            note: "hand-checked; factor line classes",
        },
        NamedExample {
            name: "flip3fold",
            extremal_rays: Some(2),
            full_foliation_lengths: Some(&["0", "3"]),
            note: "re-derived by the oracle; small ray has degree zero",
        },
        NamedExample {
            name: "nonprojective3fold",
            extremal_rays: None,
            full_foliation_lengths: None,
            note: "twisted diagonal subdivision of the cube fan; wall classes admit a positive circuit",
        },
    ]
}

/// Look up a catalog fan. Grammar:
///   `Pn:k`            projective k-space
///   `P1xP1`           the product of two lines
///   `hirzebruch:a`    the twist-a ruled surface
///   `wps:q0,...,qn`   weighted projective space (q0 divides every weight)
///   `product:A,B`     product of two catalog fans
///   `nonprojective3fold`, `flip3fold`
pub fn named_fan(name: &str) -> Result<Fan, Error> {
    let raw = named_raw(name)?;
    validate_fan(&raw)
        .map_err(|d| Error::Internal(format!("catalog fan {name} failed validation: {d:?}")))
}

fn named_raw(name: &str) -> Result<RawFan, Error> {
    if let Some(k) = name.strip_prefix("Pn:") {
        let k: usize = k.parse().map_err(|_| Error::UnknownName(name.into()))?;
        if k == 0 {
            return Err(Error::UnknownName(name.into()));
        }
        return Ok(weighted_projective(&vec![1; k + 1]).expect("unit weights are valid"));
    }
    if name == "P1xP1" {
        return Ok(RawFan {
            ambient_rank: 2,
            rays: vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, 0]), ivec(&[0, -1])],
            max_cones: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        });
    }
    if let Some(a) = name.strip_prefix("hirzebruch:") {
        let a: i64 = a.parse().map_err(|_| Error::UnknownName(name.into()))?;
        if a < 0 {
            return Err(Error::UnknownName(name.into()));
        }
        return Ok(RawFan {
            ambient_rank: 2,
            rays: vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, a]), ivec(&[0, -1])],
            max_cones: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        });
    }
    if let Some(weights) = name.strip_prefix("wps:") {
        let parsed: Result<Vec<i64>, _> = weights.split(',').map(str::parse).collect();
        let weights = parsed.map_err(|_| Error::UnknownName(name.into()))?;
        return weighted_projective(&weights).ok_or_else(|| Error::UnknownName(name.into()));
    }
    if let Some(rest) = name.strip_prefix("product:") {
        // The factor names may themselves contain commas; take the first
        // split where both halves resolve.
        for (pos, _) in rest.match_indices(',') {
            let (a, b) = (&rest[..pos], &rest[pos + 1..]);
            if let (Ok(fa), Ok(fb)) = (named_raw(a), named_raw(b)) {
                return Ok(product_fan(&fa, &fb));
            }
        }
        return Err(Error::UnknownName(name.into()));
    }
    match name {
        "flip3fold" => Ok(flip_threefold()),
        "nonprojective3fold" => Ok(nonprojective_threefold()),
        _ => Err(Error::UnknownName(name.into())),
    }
}

fn ivec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

/// Rays `e_1, ..., e_n` and `-(q_1 e_1 + ... + q_n e_n) / q_0`, so the ray
/// listed last carries weight `q_0`; maximal cones are all n-subsets.
fn weighted_projective(weights: &[i64]) -> Option<RawFan> {
    let n = weights.len().checked_sub(1)?;
    if n == 0 || weights.iter().any(|&w| w < 1) {
        return None;
    }
    let q0 = weights[0];
    let mut last = Vec::with_capacity(n);
    for &q in &weights[1..] {
        if q % q0 != 0 {
            return None;
        }
        last.push(Int::from(-(q / q0)));
    }
    // the closing ray must be primitive
    let mut g = Int::zero();
    for x in &last {
        g = g.gcd(x);
    }
    if g != Int::one() {
        return None;
    }
    let mut rays: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| Int::from(i64::from(i == j))).collect())
        .collect();
    rays.push(last);
    let max_cones = (0..=n)
        .map(|skip| (0..=n).filter(|&i| i != skip).collect())
        .collect();
    Some(RawFan { ambient_rank: n, rays, max_cones })
}

fn product_fan(a: &RawFan, b: &RawFan) -> RawFan {
    let n = a.ambient_rank + b.ambient_rank;
    let mut rays = Vec::with_capacity(a.rays.len() + b.rays.len());
    for ray in &a.rays {
        let mut v = ray.clone();
        v.extend(std::iter::repeat_with(Int::zero).take(b.ambient_rank));
        rays.push(v);
    }
    for ray in &b.rays {
        let mut v: Vec<Int> = std::iter::repeat_with(Int::zero).take(a.ambient_rank).collect();
        v.extend(ray.iter().cloned());
        rays.push(v);
    }
    let offset = a.rays.len();
    let mut max_cones = Vec::with_capacity(a.max_cones.len() * b.max_cones.len());
    for ca in &a.max_cones {
        for cb in &b.max_cones {
            let mut ids = ca.clone();
            ids.extend(cb.iter().map(|&i| i + offset));
            ids.sort_unstable();
            max_cones.push(ids);
        }
    }
    RawFan { ambient_rank: n, rays, max_cones }
}

/// A projective simplicial threefold containing a small extremal ray: two
/// charts glued over the wall on rays 0,1 whose relation has two negative
/// coefficients, completed by a fifth ray.
fn flip_threefold() -> RawFan {
    RawFan {
        ambient_rank: 3,
        rays: vec![
            ivec(&[1, 0, 0]),
            ivec(&[0, 1, 0]),
            ivec(&[0, 0, 1]),
            ivec(&[1, 1, -1]),
            ivec(&[-1, -1, 0]),
        ],
        max_cones: vec![
            vec![0, 1, 2],
            vec![0, 1, 3],
            vec![0, 2, 4],
            vec![0, 3, 4],
            vec![1, 2, 4],
            vec![1, 3, 4],
        ],
    }
}

/// The classical complete non-projective simplicial threefold: the fan over
/// the cube's faces with each square face cut by a diagonal, the diagonals
/// chosen cyclically so no strictly convex support function exists.
fn nonprojective_threefold() -> RawFan {
    RawFan {
        ambient_rank: 3,
        rays: vec![
            ivec(&[1, 1, 1]),    // 0
            ivec(&[-1, 1, 1]),   // 1
            ivec(&[-1, -1, 1]),  // 2
            ivec(&[1, -1, 1]),   // 3
            ivec(&[1, 1, -1]),   // 4
            ivec(&[-1, 1, -1]),  // 5
            ivec(&[-1, -1, -1]), // 6
            ivec(&[1, -1, -1]),  // 7
        ],
        max_cones: vec![
            // top z=+1 face {0,1,2,3} cut by 1-3
            vec![0, 1, 3],
            vec![1, 2, 3],
            // bottom z=-1 face {4,5,6,7} cut by 4-6
            vec![4, 5, 6],
            vec![4, 6, 7],
            // +x face {0,3,7,4} cut by 0-7
            vec![0, 3, 7],
            vec![0, 4, 7],
            // -x face {1,2,6,5} cut by 1-6
            vec![1, 2, 6],
            vec![1, 5, 6],
            // +y face {0,1,5,4} cut by 0-5
            vec![0, 1, 5],
            vec![0, 4, 5],
            // -y face {2,3,7,6} cut by 2-7
            vec![2, 3, 7],
            vec![2, 6, 7],
        ],
    }
}

/// Configuration for the seeded fan generator; identical configs produce
/// bit-identical fans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub rank: usize,
    pub steps: usize,
    pub base: String,
}

/// Generate a complete simplicial projective fan by `steps` star
/// subdivisions of the base at pseudo-random primitive interior points of
/// pseudo-randomly chosen cones of dimension at least two. Subdivision
/// points are small positive combinations of the chosen cone's generators,
/// which keeps multiplicities in a range that exercises the gcd structure.
pub fn random_projective_fan(cfg: &GeneratorConfig) -> Result<Fan, Error> {
    if !(1..=4).contains(&cfg.rank) {
        return Err(Error::InvalidConfig(format!("rank {} outside 1..=4", cfg.rank)));
    }
    if cfg.steps > 8 {
        return Err(Error::InvalidConfig(format!("steps {} outside 0..=8", cfg.steps)));
    }
    let base = named_fan(&cfg.base)?;
    if base.ambient_rank() != cfg.rank {
        return Err(Error::InvalidConfig(format!(
            "base {} has rank {}, config says {}",
            cfg.base,
            base.ambient_rank(),
            cfg.rank
        )));
    }
    if cfg.rank == 1 && cfg.steps > 0 {
        return Err(Error::InvalidConfig(
            "rank-one fans have no cones of dimension two to subdivide".into(),
        ));
    }
    if !base.is_complete() {
        return Err(Error::InvalidConfig(format!("base {} is not complete", cfg.base)));
    }
    if !base.is_projective()? {
        return Err(Error::InvalidConfig(format!("base {} is not projective", cfg.base)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut fan = base;
    for step in 0..cfg.steps {
        let candidates: Vec<Vec<usize>> =
            fan.faces().iter().filter(|f| f.len() >= 2).cloned().collect();
        debug_assert!(!candidates.is_empty());
        let tau = candidates[rng.gen_range(0..candidates.len())].clone();
        let point = loop {
            let coeffs: Vec<i64> = tau.iter().map(|_| rng.gen_range(1..=3)).collect();
            let mut v = vec![Int::zero(); fan.ambient_rank()];
            for (&rid, &c) in tau.iter().zip(&coeffs) {
                for (slot, x) in v.iter_mut().zip(fan.ray(rid).coords()) {
                    *slot += x * Int::from(c);
                }
            }
            // strictly positive combinations of a cone's generators are
            // interior, and an interior point is never an existing ray
            break primitive(&v).expect("positive combination is nonzero");
        };
        fan = star_subdivide(&fan, &tau, point)?;
        if !fan.is_projective()? {
            return Err(Error::Internal(format!(
                "projectivity lost at subdivision step {step}"
            )));
        }
    }
    Ok(fan)
}

/// Star subdivision at a new ray interior to the cone with the given rays:
/// every maximal cone containing that cone is replaced by its one-ray swaps.
pub fn star_subdivide(fan: &Fan, tau: &[usize], point: Vec<Int>) -> Result<Fan, Error> {
    let tau_cone = Cone::new(tau.to_vec());
    if !fan.contains_cone(&tau_cone) {
        return Err(Error::ConeNotInFan);
    }
    let mut raw = fan.to_raw();
    let new_id = raw.rays.len();
    raw.rays.push(point);
    let mut cones = Vec::new();
    for cone in &fan.to_raw().max_cones {
        let as_cone = Cone::new(cone.clone());
        if as_cone.contains(&tau_cone) {
            for &drop in tau {
                let mut ids: Vec<usize> =
                    cone.iter().copied().filter(|&i| i != drop).collect();
                ids.push(new_id);
                ids.sort_unstable();
                cones.push(ids);
            }
        } else {
            cones.push(cone.clone());
        }
    }
    raw.max_cones = cones;
    validate_fan(&raw)
        .map_err(|d| Error::Internal(format!("star subdivision failed validation: {d:?}")))
}
