//! Manifest-driven verification sweeps: build fans (named or generated),
//! attach foliations, and check structural predicates, oracle equivalence,
//! and the theorem report on every pair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use num_traits::Zero;

use crate::contraction::verify_theorem;
use crate::corpus::{named_fan, oracle, random_projective_fan, GeneratorConfig};
use crate::error::Error;
use crate::fan::{validate_fan, Fan};
use crate::foliation::{
    foliation_from_basis, full_foliation, length, FoliationSubspace,
};
use crate::intersection::mori_cone;
use crate::linalg::{rat_from_int, rat_vec_from_int, Int, Rat};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FanSource {
    Named { name: String },
    Generated { seed: u64, rank: usize, steps: usize, base: String },
}

impl FanSource {
    pub fn label(&self) -> String {
        match self {
            FanSource::Named { name } => name.clone(),
            FanSource::Generated { seed, rank, steps, base } => {
                format!("gen(seed={seed},rank={rank},steps={steps},base={base})")
            }
        }
    }

    pub fn build(&self) -> Result<Fan, Error> {
        match self {
            FanSource::Named { name } => named_fan(name),
            FanSource::Generated { seed, rank, steps, base } => {
                random_projective_fan(&GeneratorConfig {
                    seed: *seed,
                    rank: *rank,
                    steps: *steps,
                    base: base.clone(),
                })
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoliationSpec {
    /// The full space.
    Full,
    /// Span of an explicit set of fan rays.
    RaySpan { rays: Vec<usize> },
    /// Span of `count` seeded random integer vectors with entries in [-3, 3].
    Random { seed: u64, count: usize },
    /// Span of a seeded random nonempty subset of the fan's rays; biased
    /// sampling that actually hits the rays-in-V regime.
    RandomRaySpan { seed: u64 },
    /// Explicit rational basis, entries as exact `p/q` strings.
    Basis { vectors: Vec<Vec<String>> },
}

pub fn build_foliation(fan: &Fan, spec: &FoliationSpec) -> Result<FoliationSubspace, Error> {
    match spec {
        FoliationSpec::Full => Ok(full_foliation(fan)),
        FoliationSpec::RaySpan { rays } => {
            let mut vectors = Vec::new();
            for &r in rays {
                if r >= fan.ray_count() {
                    return Err(Error::RayOutOfRange(r));
                }
                vectors.push(rat_vec_from_int(fan.ray(r).coords()));
            }
            foliation_from_basis(fan, &vectors)
        }
        FoliationSpec::Random { seed, count } => {
            let n = fan.ambient_rank();
            let count = (*count).clamp(1, n.max(1));
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut vectors = Vec::with_capacity(count);
            while vectors.len() < count {
                let v: Vec<Rat> = (0..n)
                    .map(|_| rat_from_int(Int::from(rng.gen_range(-3i64..=3))))
                    .collect();
                if v.iter().all(Rat::is_zero) {
                    continue;
                }
                vectors.push(v);
            }
            foliation_from_basis(fan, &vectors)
        }
        FoliationSpec::RandomRaySpan { seed } => {
            let d = fan.ray_count();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let size = rng.gen_range(1..=d.max(1));
            let mut ids: Vec<usize> = (0..d).collect();
            // seeded partial shuffle, first `size` entries
            for i in 0..size {
                let j = rng.gen_range(i..d);
                ids.swap(i, j);
            }
            let vectors: Vec<Vec<Rat>> = ids[..size]
                .iter()
                .map(|&r| rat_vec_from_int(fan.ray(r).coords()))
                .collect();
            foliation_from_basis(fan, &vectors)
        }
        FoliationSpec::Basis { vectors } => {
            let mut parsed = Vec::with_capacity(vectors.len());
            for v in vectors {
                let row: Result<Vec<Rat>, _> = v.iter().map(|s| Rat::from_str(s)).collect();
                parsed.push(row.map_err(|e| {
                    Error::InvalidConfig(format!("bad rational in foliation basis: {e}"))
                })?);
            }
            foliation_from_basis(fan, &parsed)
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepCase {
    pub fan: FanSource,
    #[serde(default)]
    pub foliations: Vec<FoliationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_extremal_rays: Option<usize>,
    /// Free-form provenance note for the expected facts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub cases: Vec<SweepCase>,
}

#[derive(Clone, Debug, Default)]
pub struct CaseOutcome {
    pub label: String,
    pub pairs: usize,
    pub strong_clause_triggers: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutcome {
    pub cases: usize,
    pub pairs: usize,
    pub strong_clause_triggers: usize,
    pub failures: Vec<String>,
}

/// Run one case: structural predicates, extremal-ray oracle equivalence,
/// then the theorem report and the length oracle per foliation.
pub fn run_case(case: &SweepCase) -> CaseOutcome {
    let label = case.fan.label();
    let mut out = CaseOutcome { label: label.clone(), ..CaseOutcome::default() };
    let fail = |out: &mut CaseOutcome, msg: String| {
        out.failures.push(format!("{label}: {msg}"));
    };

    let fan = match case.fan.build() {
        Ok(f) => f,
        Err(e) => {
            fail(&mut out, format!("build failed: {e}"));
            return out;
        }
    };
    if let Err(d) = validate_fan(&fan.to_raw()) {
        fail(&mut out, format!("re-validation produced {} diagnostics", d.len()));
        return out;
    }
    if !fan.is_complete() {
        fail(&mut out, "fan is not complete".into());
        return out;
    }
    if !fan.is_simplicial() {
        fail(&mut out, "fan is not simplicial".into());
        return out;
    }
    match fan.is_projective() {
        Ok(true) => {}
        Ok(false) => {
            fail(&mut out, "fan is not projective".into());
            return out;
        }
        Err(e) => {
            fail(&mut out, format!("projectivity check failed: {e}"));
            return out;
        }
    }

    let mori = match mori_cone(&fan) {
        Ok(m) => m,
        Err(e) => {
            fail(&mut out, format!("mori cone failed: {e}"));
            return out;
        }
    };
    if let Some(expected) = case.expected_extremal_rays {
        if mori.extremal_rays.len() != expected {
            fail(
                &mut out,
                format!("expected {expected} extremal rays, found {}", mori.extremal_rays.len()),
            );
        }
    }
    match oracle::brute_force_extremal_rays(&fan) {
        Ok(mut oracle_classes) => {
            let mut main: Vec<Vec<Int>> =
                mori.extremal_rays.iter().map(|r| r.class.0.clone()).collect();
            oracle_classes.sort();
            main.sort();
            if oracle_classes != main {
                fail(&mut out, "extremal rays disagree with the brute-force oracle".into());
            }
        }
        Err(e) => fail(&mut out, format!("oracle enumeration failed: {e}")),
    }

    for (fi, spec) in case.foliations.iter().enumerate() {
        let v = match build_foliation(&fan, spec) {
            Ok(v) => v,
            Err(e) => {
                fail(&mut out, format!("foliation {fi} build failed: {e}"));
                continue;
            }
        };
        out.pairs += 1;
        let r = v.rank();
        let bound = rat_from_int(Int::from(r as u64 + 1));
        let rank_rat = rat_from_int(Int::from(r as u64));
        let reports = match verify_theorem(&fan, &v) {
            Ok(r) => r,
            Err(e) => {
                fail(&mut out, format!("verify failed on foliation {fi}: {e}"));
                continue;
            }
        };
        for report in &reports {
            if report.length > bound {
                fail(
                    &mut out,
                    format!(
                        "ray {} breaks the length bound: {} > rank+1 with foliation {fi}",
                        report.ray_index, report.length
                    ),
                );
            }
            if report.length > rank_rat {
                out.strong_clause_triggers += 1;
                if report.bundle.is_none() {
                    fail(
                        &mut out,
                        format!(
                            "ray {} has length above the rank but no bundle ({:?})",
                            report.ray_index, report.rejection
                        ),
                    );
                }
                if !report.matches_relative_tangent {
                    fail(
                        &mut out,
                        format!(
                            "ray {} bundle does not match the relative tangent foliation",
                            report.ray_index
                        ),
                    );
                }
                if report.length != bound {
                    fail(
                        &mut out,
                        format!(
                            "ray {} strong clause requires length exactly rank+1, got {}",
                            report.ray_index, report.length
                        ),
                    );
                }
            }
            if !report.theorem_ok {
                fail(&mut out, format!("ray {} report has theorem_ok = false", report.ray_index));
            }
        }
        // the first foliation also gets the independent length oracle
        if fi == 0 {
            for (ri, ray) in mori.extremal_rays.iter().enumerate() {
                let main = match length(&fan, &v, ray) {
                    Ok(l) => l,
                    Err(e) => {
                        fail(&mut out, format!("length of ray {ri} failed: {e}"));
                        continue;
                    }
                };
                match oracle::brute_force_length(&fan, &v, &ray.class.0) {
                    Ok(expected) => {
                        if expected != main {
                            fail(
                                &mut out,
                                format!(
                                    "length of ray {ri} is {main}, oracle says {expected}"
                                ),
                            );
                        }
                    }
                    Err(e) => fail(&mut out, format!("length oracle failed on ray {ri}: {e}")),
                }
            }
        }
    }
    out
}

/// Run a manifest, in parallel across cases; the report order is the
/// manifest order regardless of scheduling.
pub fn run_manifest(manifest: &Manifest) -> SweepOutcome {
    let outcomes: Vec<CaseOutcome> = manifest.cases.par_iter().map(run_case).collect();
    let mut total = SweepOutcome { cases: outcomes.len(), ..SweepOutcome::default() };
    for case in outcomes {
        total.pairs += case.pairs;
        total.strong_clause_triggers += case.strong_clause_triggers;
        total.failures.extend(case.failures);
    }
    total
}

/// The default acceptance sweep: a deterministic block of named fans with
/// foliations known to exercise the bundle clause, plus five hundred
/// generated fans with seeded random foliations.
pub fn default_manifest() -> Manifest {
    let mut cases = Vec::new();

    let named = |name: &str, foliations: Vec<FoliationSpec>, expected: Option<usize>| SweepCase {
        fan: FanSource::Named { name: name.into() },
        foliations,
        expected_extremal_rays: expected,
        source: Some("catalog".into()),
    };

    // Full-space foliations on projective spaces: the classical strong
    // clause, one trigger each.
    for k in 1..=4 {
        cases.push(named(&format!("Pn:{k}"), vec![FoliationSpec::Full], Some(1)));
    }
    // Factor foliations on products and ruled surfaces.
    cases.push(named(
        "P1xP1",
        vec![
            FoliationSpec::RaySpan { rays: vec![0] },
            FoliationSpec::RaySpan { rays: vec![1] },
        ],
        Some(2),
    ));
    for a in 0..=4 {
        cases.push(named(
            &format!("hirzebruch:{a}"),
            vec![FoliationSpec::RaySpan { rays: vec![1] }],
            Some(2),
        ));
    }
    cases.push(named(
        "product:Pn:1,Pn:2",
        vec![
            FoliationSpec::RaySpan { rays: vec![0] },
            FoliationSpec::RaySpan { rays: vec![2, 3] },
        ],
        Some(2),
    ));
    cases.push(named(
        "product:Pn:1,Pn:3",
        vec![
            FoliationSpec::RaySpan { rays: vec![0] },
            FoliationSpec::RaySpan { rays: vec![2, 3, 4] },
        ],
        Some(2),
    ));
    cases.push(named(
        "product:Pn:2,Pn:2",
        vec![
            FoliationSpec::RaySpan { rays: vec![0, 1] },
            FoliationSpec::RaySpan { rays: vec![3, 4] },
        ],
        Some(2),
    ));
    cases.push(named(
        "product:Pn:1,product:Pn:1,Pn:1",
        vec![
            FoliationSpec::RaySpan { rays: vec![0] },
            FoliationSpec::RaySpan { rays: vec![2] },
            FoliationSpec::RaySpan { rays: vec![4] },
        ],
        Some(3),
    ));
    cases.push(named(
        "product:P1xP1,P1xP1",
        vec![
            FoliationSpec::RaySpan { rays: vec![0] },
            FoliationSpec::RaySpan { rays: vec![1] },
            FoliationSpec::RaySpan { rays: vec![4] },
            FoliationSpec::RaySpan { rays: vec![5] },
        ],
        Some(4),
    ));
    // Coverage without triggers: a singular space and a small contraction.
    cases.push(named("wps:1,1,2", vec![FoliationSpec::Full], Some(1)));
    cases.push(named("flip3fold", vec![FoliationSpec::Full], Some(2)));

    // Generated block: bases and step caps keep every fan within fourteen
    // rays and rank four.
    let bases: &[(&str, usize, usize)] = &[
        ("Pn:2", 2, 8),
        ("hirzebruch:0", 2, 8),
        ("hirzebruch:1", 2, 8),
        ("hirzebruch:2", 2, 8),
        ("wps:1,1,2", 2, 8),
        ("Pn:3", 3, 8),
        ("product:Pn:1,Pn:2", 3, 8),
        ("product:Pn:1,product:Pn:1,Pn:1", 3, 6),
        ("flip3fold", 3, 6),
        ("Pn:4", 4, 8),
        ("product:Pn:1,Pn:3", 4, 7),
        ("product:Pn:2,Pn:2", 4, 6),
        ("product:P1xP1,P1xP1", 4, 5),
        ("product:Pn:1,product:Pn:1,Pn:2", 4, 6),
    ];
    for i in 0..500u64 {
        let (base, rank, max_steps) = bases[(i as usize) % bases.len()];
        let steps = (i as usize / bases.len()) % (max_steps + 1);
        cases.push(SweepCase {
            fan: FanSource::Generated {
                seed: 1000 + i,
                rank,
                steps,
                base: base.into(),
            },
            foliations: vec![
                if i % 2 == 0 {
                    FoliationSpec::Full
                } else {
                    FoliationSpec::Random { seed: 7000 + i, count: 1 + (i as usize % rank) }
                },
                FoliationSpec::RandomRaySpan { seed: 8000 + i },
            ],
            expected_extremal_rays: None,
            source: None,
        });
    }
    Manifest { cases }
}
