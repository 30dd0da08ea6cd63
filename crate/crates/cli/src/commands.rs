use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use nlapprox_core::bernstein::{self, BernsteinOptions};
use nlapprox_core::dictionary::{self, load_matrix, load_vector, parse_vector, perturb_null_vector};
use nlapprox_core::gaussian_bounds::{self as gb, RedundancyConstants};
use nlapprox_core::nearbest;
use nlapprox_core::rip::{self, LemmaOptions, RipOptions};
use nlapprox_core::sparse_norms::{self as sn, KFunctionalOptions, VertexOptions, VertexOracle};
use nlapprox_core::{linalg, Dictionary, Error, NullSpaceBasis, DEFAULT_ENUMERATION_CAP, DEFAULT_SUPPORT_CAP};

use crate::args::{Command, Common};

pub enum CliError {
    /// Bad or missing flags: exit code 2.
    Usage(String),
    /// The analysis itself failed: exit code 1.
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    pub certified: bool,
    pub seed: Option<u64>,
}

struct Ctx<'a> {
    common: &'a Common,
    params: BTreeMap<String, Value>,
    seeded: bool,
}

impl<'a> Ctx<'a> {
    fn set(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.to_string(), to_value(&value));
    }

    fn dictionary(&mut self) -> CliResult<Dictionary> {
        let s = &self.common.source;
        let dict = if let Some(path) = &s.matrix {
            self.set("matrix", path.display().to_string());
            load_matrix(path)?
        } else if let Some(m) = s.dirac_dc {
            self.set("dirac_dc", m);
            dictionary::build_dirac_dc(m)?
        } else if let Some((n, a)) = s.dirac_geo {
            self.set("dirac_geo", json!({"n": n, "a": a}));
            dictionary::build_dirac_geometric(n, a)?
        } else if let Some((m, n)) = s.gaussian {
            self.set("gaussian", json!({"m": m, "n": n}));
            self.seeded = true;
            dictionary::build_gaussian(m, n, self.common.seed)?
        } else if let Some(path) = &s.null_vector {
            self.set("null_vector", path.display().to_string());
            dictionary::dictionary_from_null_vector(&load_vector(path)?)?
        } else {
            return Err(CliError::Usage(
                "a dictionary is required: --matrix, --dirac-dc, --dirac-geo, --gaussian or --null-vector".into(),
            ));
        };
        self.set("rows", dict.rows());
        self.set("atoms", dict.atom_count());
        Ok(dict)
    }

    /// The raw null vector when given by file, otherwise the kernel of a
    /// dictionary with a one-dimensional null space.
    fn null_vector(&mut self) -> CliResult<Vec<f64>> {
        if let Some(path) = &self.common.source.null_vector {
            self.set("null_vector", path.display().to_string());
            return Ok(load_vector(path)?);
        }
        let dict = self.dictionary()?;
        let ns = dictionary::null_space(&dict);
        one_dimensional(&ns)?;
        Ok(ns.vector(0))
    }

    fn signal(&mut self, dict: &Dictionary) -> CliResult<Vec<f64>> {
        let raw = self
            .common
            .signal
            .as_deref()
            .ok_or_else(|| CliError::Usage("--signal is required".into()))?;
        let path = std::path::Path::new(raw);
        let f = if path.is_file() {
            load_vector(path)?
        } else {
            parse_vector(raw).map_err(|e| CliError::Usage(format!("--signal: {e}")))?
        };
        if f.len() != dict.rows() {
            return Err(CliError::Usage(format!(
                "--signal has {} entries, the dictionary has {} rows",
                f.len(),
                dict.rows()
            )));
        }
        self.set("signal", &f);
        Ok(f)
    }

    fn tau(&mut self, default: f64) -> f64 {
        let v = self.common.tau.unwrap_or(default);
        self.set("tau", v);
        v
    }

    fn eps(&mut self, default: f64) -> f64 {
        let v = self.common.eps.unwrap_or(default);
        self.set("eps", v);
        v
    }

    fn kmax(&mut self, default: usize) -> usize {
        let v = self.common.kmax.unwrap_or(default);
        self.set("kmax", v);
        v
    }

    fn cap(&mut self, default: f64) -> f64 {
        let v = self.common.cap.unwrap_or(default);
        self.set("cap", v);
        v
    }

    fn tol(&mut self, default: f64) -> f64 {
        let v = self.common.tol.unwrap_or(default);
        self.set("tol", v);
        v
    }

    fn trials(&mut self, default: usize) -> usize {
        let v = self.common.trials.unwrap_or(default);
        self.set("trials", v);
        v
    }

    fn seed(&mut self) -> u64 {
        self.seeded = true;
        self.common.seed
    }

    fn finish(self, results: impl Serialize, certified: bool) -> CliResult<Outcome> {
        Ok(Outcome {
            results: to_value(&results),
            certified,
            seed: self.seeded.then_some(self.common.seed),
            parameters: self.params,
        })
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn one_dimensional(ns: &NullSpaceBasis) -> CliResult<()> {
    if ns.dim() != 1 {
        return Err(Error::InvalidParameter(format!(
            "this analysis needs a one-dimensional null space, got d = {}",
            ns.dim()
        ))
        .into());
    }
    Ok(())
}

pub fn execute(cmd: &Command) -> CliResult<Outcome> {
    let mut cx = Ctx {
        common: cmd.common(),
        params: BTreeMap::new(),
        seeded: false,
    };
    match cmd {
        Command::FrameBounds(_) => {
            let dict = cx.dictionary()?;
            let fb = dictionary::frame_bounds(&dict);
            let qn = dict.quasi_normalization();
            cx.finish(
                json!({
                    "A": fb.lower,
                    "B": fb.upper,
                    "column_norms": dict.column_norms(),
                    "quasi_normalized": qn.ok(),
                    "quasi_normalization": qn,
                }),
                true,
            )
        }
        Command::Nullspace(_) => {
            let dict = cx.dictionary()?;
            let ns = match cx.common.tol {
                Some(t) => {
                    cx.set("tol", t);
                    dictionary::null_space_basis(&dict, t)?
                }
                None => dictionary::null_space(&dict),
            };
            let basis: Vec<Vec<f64>> = (0..ns.dim()).map(|i| ns.vector(i)).collect();
            cx.finish(
                json!({"dim": ns.dim(), "rank": ns.rank, "tol": ns.tol, "basis": basis}),
                true,
            )
        }
        Command::SigmaProfile(_) => {
            let dict = cx.dictionary()?;
            let f = cx.signal(&dict)?;
            let kmax = cx.kmax(dict.rows().min(dict.atom_count()));
            let cap = cx.cap(DEFAULT_ENUMERATION_CAP);
            let sigma = sn::sigma_profile_with_cap(&dict, &f, kmax, cap)?;
            cx.finish(json!({ "sigma": sigma }), true)
        }
        Command::LtauNorm(_) => {
            let dict = cx.dictionary()?;
            let f = cx.signal(&dict)?;
            let tau = cx.tau(1.0);
            let rep = if tau == 2.0 {
                sn::min_l2_representation(&dict, &f)?
            } else {
                let cap = cx.cap(DEFAULT_ENUMERATION_CAP);
                let opts = VertexOptions {
                    enumeration_cap: cap,
                    ..VertexOptions::default()
                };
                VertexOracle::new(&dict, opts)?.minimize(&f, tau)?
            };
            let exact = rep.exact;
            cx.finish(rep, exact)
        }
        Command::Kfunctional { t, p, .. } => {
            let dict = cx.dictionary()?;
            let f = cx.signal(&dict)?;
            cx.set("t", t);
            cx.set("p", p);
            let mut opts = KFunctionalOptions::default();
            opts.gap_tol = cx.tol(opts.gap_tol);
            opts.enumeration_cap = cx.cap(opts.enumeration_cap);
            if let Some(k) = cx.common.kmax {
                opts.kcap = cx.kmax(k);
            }
            let v = sn::k_functional_with(&dict, &f, *t, *p, &opts)?;
            let certified = v.certified;
            cx.finish(v, certified)
        }
        Command::InterpNorm { theta, q, p, levels, .. } => {
            let dict = cx.dictionary()?;
            let f = cx.signal(&dict)?;
            cx.set("theta", theta);
            cx.set("q", q);
            cx.set("p", p);
            cx.set("levels", levels);
            let v = sn::interpolation_norm(&dict, &f, *theta, *q, *p, *levels)?;
            let certified = v.certified;
            cx.finish(v, certified)
        }
        Command::BernsteinReport(_) => {
            let dict = cx.dictionary()?;
            let tau = cx.tau(1.0);
            let mmax = cx.kmax(dict.rows().min(3));
            let trials = cx.trials(20);
            let opts = BernsteinOptions {
                support_cap: cx.cap(DEFAULT_SUPPORT_CAP),
                ..BernsteinOptions::default()
            };
            let seed = cx.seed();
            let r = bernstein::bernstein_ratio_empirical(&dict, tau, mmax, trials, seed, &opts)?;
            let certified = r.per_m.iter().all(|row| row.exhaustive);
            cx.finish(r, certified)
        }
        Command::PropA(_) => {
            let z = cx.null_vector()?;
            let mmax = cx.kmax(z.len());
            let cap = cx.cap(DEFAULT_SUPPORT_CAP);
            let prop = bernstein::prop_a_sufficient(&z, mmax, cap)?;
            let c1 = bernstein::c1_constant(&z, mmax)?;
            let certified = prop.certified;
            cx.finish(
                json!({
                    "z": z,
                    "prop_a": prop,
                    "c1": c1,
                    "tail_constant": bernstein::tail_dominance_constant(&z),
                }),
                certified,
            )
        }
        Command::PropB(_) => {
            let z = cx.null_vector()?;
            let mmax = cx.kmax(z.len());
            let cap = cx.cap(DEFAULT_SUPPORT_CAP);
            let slack = cx.tol(1e-8);
            let c2 = bernstein::c2_constant(&z, mmax, cap)?;
            let sandwich = bernstein::sandwich_check(&z, mmax, cap, slack)?;
            let stats = bernstein::null_vector_stats(&z, mmax, cap)?;
            let certified = c2.certified && sandwich.certified;
            cx.finish(json!({"c2": c2, "sandwich": sandwich, "stats": stats}), certified)
        }
        Command::Example1 { a, p, beta, blocks, .. } => {
            let last = blocks.last().copied().unwrap_or(0);
            let z = match &cx.common.source.null_vector {
                Some(path) => {
                    cx.set("null_vector", path.display().to_string());
                    load_vector(path)?
                }
                None => {
                    cx.set("a", a);
                    (1..=last).map(|j| a.powi(j as i32)).collect()
                }
            };
            let eps = cx.eps(2.0);
            cx.set("p", p);
            cx.set("beta", beta);
            cx.set("blocks", blocks);
            let pz = perturb_null_vector(&z, eps, *p, *beta, blocks)?;
            let witness = bernstein::divergence_witness(&pz)?;
            let certified = witness.all_hold;
            cx.finish(json!({"perturbed": pz, "witness": witness}), certified)
        }
        Command::RipReport(_) => {
            let dict = cx.dictionary()?;
            let kmax = cx.kmax(dict.rows().min(4));
            let opts = RipOptions {
                cap: cx.cap(DEFAULT_SUPPORT_CAP),
                samples: cx.trials(10_000),
                seed: cx.seed(),
            };
            let r = rip::rip_report(&dict, kmax, &opts)?;
            let fb = dictionary::frame_bounds(&dict);
            let certified = r.certified;
            cx.finish(json!({"frame_bounds": fb, "rip": r}), certified)
        }
        Command::VerifyRipBernstein { kappa, .. } => {
            let dict = cx.dictionary()?;
            let tau = cx.tau(1.0);
            cx.set("kappa", kappa);
            let trials = cx.trials(10_000);
            let mut opts = LemmaOptions::default();
            opts.exhaustive_kmax = cx.kmax(opts.exhaustive_kmax);
            opts.support_cap = cx.cap(opts.support_cap);
            opts.slack = cx.tol(opts.slack);
            let seed = cx.seed();
            let v = rip::verify_lemma_ripbineq(&dict, tau, *kappa, trials, seed, &opts)?;
            let certified = v.passed() && v.delta_certified;
            cx.finish(v, certified)
        }
        Command::GaussianConstants { r, dims, .. } => {
            let r = r.unwrap_or_else(gb::r0);
            cx.set("R", r);
            let tau = cx.tau(1.0);
            let rc = RedundancyConstants::new(r)?;
            let bound = rc.bernstein_bound(tau)?;
            let mut results = json!({
                "R0": gb::r0(),
                "constants": rc,
                "gamma": rc.gamma_r,
                "bernstein_bound": bound,
            });
            let mut certified = true;
            if let Some(d) = dims {
                let [m, n, k] = d[..] else {
                    return Err(CliError::Usage("--dims expects M,N,K".into()));
                };
                cx.set("dims", d);
                let eps = cx.eps(1.0);
                results["bounds"] = to_value(&gb::gaussian_bound_set(m, n, k, eps, eps)?);
                if let Some(trials) = cx.common.trials {
                    cx.set("trials", trials);
                    let opts = RipOptions {
                        cap: cx.cap(DEFAULT_SUPPORT_CAP),
                        ..RipOptions::default()
                    };
                    let seed = cx.seed();
                    let mc = gb::monte_carlo_consistency(m, n, k, eps, trials, seed, &opts)?;
                    certified = mc.exact_delta;
                    results["monte_carlo"] = to_value(&mc);
                }
            }
            cx.finish(results, certified)
        }
        Command::GammaTable { r_min, r_max, points, .. } => {
            if !(*r_min > 1.0 && r_max >= r_min && *points >= 1) {
                return Err(CliError::Usage("need 1 < r-min <= r-max and points >= 1".into()));
            }
            cx.set("r_min", r_min);
            cx.set("r_max", r_max);
            cx.set("points", points);
            let rows = (0..*points)
                .map(|i| {
                    let s = if *points == 1 { 0.0 } else { i as f64 / (*points - 1) as f64 };
                    let r = r_min * (r_max / r_min).powf(s);
                    let t = gb::t_of_r(r)?;
                    Ok(json!({
                        "R": r,
                        "t": t,
                        "gamma": gb::gamma_of_r(r)?,
                        "m": gb::m_of_r(r)?,
                        "limit_ratio": 2.0 * t * (1.0 + r.ln()) * gb::C_CONST * gb::C_CONST / 2.0,
                    }))
                })
                .collect::<nlapprox_core::Result<Vec<_>>>()?;
            cx.finish(json!({ "rows": rows }), true)
        }
        Command::NearbestEpsilon(_) => {
            let ns = match &cx.common.source.null_vector {
                Some(path) => {
                    cx.set("null_vector", path.display().to_string());
                    dictionary::null_space(&dictionary::dictionary_from_null_vector(&load_vector(path)?)?)
                }
                None => dictionary::null_space(&cx.dictionary()?),
            };
            let tau = cx.tau(0.5);
            let cap = cx.cap(1e7);
            let tol = cx.tol(1e-10);
            let r = nearbest::max_feasible_epsilon(&ns, tau, cap, tol)?;
            let mut results = to_value(&r);
            // closed-form sufficient thresholds when Φ is Dirac+DC with m = p²
            if let Some(m) = cx.common.source.dirac_dc {
                let p = (m as f64).sqrt().round() as u32;
                if p >= 2 && (p * p) as usize == m {
                    results["dirac_dc"] = json!({
                        "p": p,
                        "case1_threshold": nearbest::dirac_dc_case1_threshold(p, tau)?,
                        "case2_max_epsilon": nearbest::dirac_dc_case2_max_epsilon(p, tau)?,
                    });
                }
            }
            cx.finish(results, true)
        }
        Command::NearbestFactor(_) => {
            let dict = cx.dictionary()?;
            let tau = cx.tau(0.5);
            let oracle = VertexOracle::new(
                &dict,
                VertexOptions {
                    enumeration_cap: cx.cap(DEFAULT_ENUMERATION_CAP),
                    ..VertexOptions::default()
                },
            )?;
            if cx.common.signal.is_some() {
                let f = cx.signal(&dict)?;
                let r = nearbest::near_best_factor_with(&oracle, &f, tau)?;
                let certified = r.l1_ties == 0;
                return cx.finish(r, certified);
            }
            let trials = cx.trials(50);
            let seed = cx.seed();
            let mut rng = linalg::seeded_rng(seed);
            let mut samples = Vec::with_capacity(trials);
            for _ in 0..trials {
                let c: Vec<f64> = (0..dict.atom_count())
                    .map(|_| rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng))
                    .collect();
                let f = dict.synthesize(&c);
                samples.push(nearbest::near_best_factor_with(&oracle, &f, tau)?);
            }
            let max_observed = samples.iter().map(|s| s.c_observed).fold(1.0, f64::max);
            let ties = samples.iter().filter(|s| s.l1_ties > 0).count();
            let ns = dictionary::null_space(&dict);
            let bound = if ns.dim() == 1 && tau < 1.0 {
                Some(nearbest::max_feasible_epsilon(&ns, tau, 1e7, 1e-10)?)
            } else {
                None
            };
            let within = bound.as_ref().map(|b| max_observed <= b.near_best_constant + 1e-6);
            let c_observed: Vec<f64> = samples.iter().map(|s| s.c_observed).collect();
            cx.finish(
                json!({
                    "max_observed": max_observed,
                    "c_observed": c_observed,
                    "samples_with_l1_ties": ties,
                    "feasible_epsilon": bound,
                    "within_bound": within,
                }),
                ties == 0,
            )
        }
    }
}
