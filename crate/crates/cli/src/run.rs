//! Script execution.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sgmod::gorenstein::{
    certify_g_projective, classify, is_sg_flat, is_sg_injective, is_sg_projective, summand_witness_from_periodic,
};
use sgmod::homological::{ext, minimal_resolution, tor};
use sgmod::properties::{is_flat, is_free, is_injective, is_projective};
use sgmod::verify::verify_witness;
use sgmod::{Caps, Certificate, FiniteModule, FiniteRing, Witness};

use crate::cache::Cache;
use crate::dsl::{parse_script, Command, Decl, Name, Pos, Property, Script};
use crate::env::Env;
use crate::error::{is_internal, CliError};
use crate::fuzz::{self, FuzzConfig};
use crate::report::Report;

#[derive(Clone, Debug, Default)]
pub struct Config {
    pub caps: Caps,
    pub cache_dir: Option<PathBuf>,
    /// Adds `timing_ms` to every report.
    pub timing: bool,
}

type Body = Map<String, Value>;

fn object(v: Value) -> Body {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("json! object literal"),
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Cap errors become an `unknown` body; internal errors abort the run.
fn settle(pos: Pos, r: sgmod::Result<Body>) -> Result<Body, CliError> {
    match r {
        Ok(b) => Ok(b),
        Err(e) if e.is_cap() => Ok(object(json!({"status": "unknown", "cap": e.to_string()}))),
        Err(e) if is_internal(&e) => Err(CliError::Internal(e.to_string())),
        Err(e) => Err(CliError::engine(pos, e)),
    }
}

fn verified(w: Option<&Witness>, caps: &Caps) -> Value {
    w.map_or(Value::Null, |w| Value::Bool(verify_witness(w, caps).is_ok()))
}

fn classify_body(m: &Arc<FiniteModule>, caps: &Caps) -> sgmod::Result<Body> {
    let c = classify(m, caps)?;
    let verdicts: Body = c.entries().iter().map(|(n, cert)| (n.to_string(), to_value(cert))).collect();
    Ok(object(json!({
        "order": m.order().to_string(),
        "verdicts": verdicts,
        "caps_hit": c.caps_hit(),
    })))
}

fn resolve_body(m: &Arc<FiniteModule>, depth: usize, caps: &Caps) -> sgmod::Result<Body> {
    let res = minimal_resolution(m, depth, caps)?;
    let r = m.ring();
    let differentials: Vec<Vec<Vec<String>>> = res
        .differentials
        .iter()
        .map(|d| (0..d.rows()).map(|i| (0..d.cols()).map(|j| r.format_element(d.get(i, j))).collect()).collect())
        .collect();
    let syzygy_orders: Vec<String> = (1..=res.len()).map(|i| res.syzygy(i).order().to_string()).collect();
    Ok(object(json!({
        "depth": depth,
        "ranks": res.ranks,
        "differentials": differentials,
        "syzygy_orders": syzygy_orders,
    })))
}

fn homology_body(order: u128, generators: usize) -> Body {
    object(json!({"order": order.to_string(), "generators": generators, "vanishes": order == 1}))
}

fn witness_body(m: &Arc<FiniteModule>, p: Property, caps: &Caps) -> sgmod::Result<Body> {
    let lift = |r: sgmod::Result<Certificate>| r.or_else(Certificate::from_cap);
    let mut body = Body::new();
    let cert = match p {
        Property::Projective => lift(is_projective(m, caps))?,
        Property::Injective => lift(is_injective(m, caps))?,
        Property::Flat => lift(is_flat(m, caps))?,
        Property::Free => lift(is_free(m, caps))?,
        Property::SgProjective => lift(is_sg_projective(m, caps))?,
        Property::SgInjective => lift(is_sg_injective(m, caps))?,
        Property::SgFlat => lift(is_sg_flat(m, caps))?,
        Property::GProjective => {
            let (cert, cr) = certify_g_projective(m, caps)?;
            if let Some(cr) = cr {
                body.insert("period".into(), json!(cr.complex.period()));
                let s = summand_witness_from_periodic(&cr, caps)?;
                let w = Witness::Summand(s.to_witness(caps)?);
                body.insert("summand_verified".into(), verified(Some(&w), caps));
                body.insert("summand".into(), to_value(&w));
            }
            cert
        }
    };
    body.insert("verified".into(), verified(cert.witness.as_ref(), caps));
    body.insert("certificate".into(), to_value(&cert));
    Ok(body)
}

fn qf_body(r: &Arc<FiniteRing>, caps: &Caps) -> sgmod::Result<Body> {
    let ls = r.local_structure(caps)?;
    let factors: Vec<Value> = ls
        .factors
        .iter()
        .map(|f| {
            json!({
                "idempotent": r.format_element(&f.idempotent),
                "order": f.order.to_string(),
                "radical_order": f.radical_order.to_string(),
                "residue_field_size": f.residue_field_size.to_string(),
                "socle_order": f.socle_order.to_string(),
                "simple_socle": f.socle_order == f.residue_field_size,
            })
        })
        .collect();
    Ok(object(json!({
        "order": r.order().to_string(),
        "quasi_frobenius": r.is_quasi_frobenius(caps)?,
        "local": r.is_local(caps)?,
        "factors": factors,
    })))
}

fn decompose_body(r: &Arc<FiniteRing>, caps: &Caps) -> sgmod::Result<Body> {
    let d = r.decompose_local(caps)?;
    let ls = r.local_structure(caps)?;
    let factors: Vec<Value> = d
        .factors
        .iter()
        .zip(&ls.factors)
        .map(|(f, l)| {
            json!({
                "idempotent": r.format_element(&f.idempotent),
                "characteristic": f.ring.characteristic(),
                "rank": f.ring.rank(),
                "order": f.ring.order().to_string(),
                "residue_field_size": l.residue_field_size.to_string(),
                "quasi_frobenius": l.socle_order == l.residue_field_size,
            })
        })
        .collect();
    Ok(object(json!({"complete": d.complete, "factors": factors})))
}

struct Runner {
    env: Env,
    config: Config,
    cache: Cache,
}

impl Runner {
    fn cached(
        &self,
        pos: Pos,
        material: Value,
        compute: impl FnOnce() -> sgmod::Result<Body>,
    ) -> Result<Body, CliError> {
        self.cache.get_or_compute(&json!({"material": material, "caps": self.config.caps}), || settle(pos, compute()))
    }

    fn module_material(m: &FiniteModule) -> Value {
        json!({"ring": m.ring().to_data(), "module": m.to_data()})
    }

    fn with_module(&self, name: &Name, mut body: Body) -> Result<Body, CliError> {
        let (ring, m) = self.env.module(name)?;
        body.insert("module".into(), json!(name.value));
        body.insert("ring".into(), json!(format!("{ring} = {}", m.ring().describe())));
        Ok(body)
    }

    fn command(&self, command: &Command, pos: Pos) -> Result<Body, CliError> {
        let caps = &self.config.caps;
        match command {
            Command::Classify(n) => {
                let (_, m) = self.env.module(n)?;
                let body = self.cached(pos, json!({"op": "classify", "m": Self::module_material(&m)}), || {
                    classify_body(&m, caps)
                })?;
                self.with_module(n, body)
            }
            Command::Resolve { module, depth } => {
                let (_, m) = self.env.module(module)?;
                let depth = depth.unwrap_or(caps.depth);
                let body = self.cached(pos, json!({"op": "resolve", "depth": depth, "m": Self::module_material(&m)}), || {
                    resolve_body(&m, depth, caps)
                })?;
                self.with_module(module, body)
            }
            Command::Ext { left, right, degree } | Command::Tor { left, right, degree } => {
                let is_ext = matches!(command, Command::Ext { .. });
                let (a, b) = self.env.module_pair(left, right)?;
                let op = if is_ext { "ext" } else { "tor" };
                let material = json!({
                    "op": op,
                    "degree": degree,
                    "left": Self::module_material(&a),
                    "right": b.to_data(),
                });
                let mut body = self.cached(pos, material, || {
                    let h = if is_ext { ext(&a, &b, *degree, caps)? } else { tor(&a, &b, *degree, caps)? };
                    Ok(homology_body(h.order(), h.module.num_generators(caps)?))
                })?;
                body.insert("left".into(), json!(left.value));
                body.insert("right".into(), json!(right.value));
                body.insert("degree".into(), json!(degree));
                Ok(body)
            }
            Command::Witness { module, property } => {
                let (_, m) = self.env.module(module)?;
                let material = json!({"op": "witness", "property": property.value, "m": Self::module_material(&m)});
                let mut body = self.cached(pos, material, || witness_body(&m, property.value, caps))?;
                body.insert("property".into(), json!(property.value.name()));
                self.with_module(module, body)
            }
            Command::Qf(expr) | Command::Decompose(expr) => {
                let r = self.env.eval_ring(expr, pos)?;
                let qf = matches!(command, Command::Qf(_));
                let material = json!({"op": if qf { "qf" } else { "decompose" }, "ring": r.to_data()});
                let mut body = self.cached(pos, material, || if qf { qf_body(&r, caps) } else { decompose_body(&r, caps) })?;
                body.insert("ring".into(), json!(r.describe()));
                Ok(body)
            }
            Command::Fuzz(opts) => {
                let mut fc = FuzzConfig { seed: caps.seed, ..FuzzConfig::default() };
                for (k, v) in opts {
                    let small = || usize::try_from(*v).map_err(|_| CliError::semantic(k.pos, "value too large"));
                    match k.value.as_str() {
                        "seed" => fc.seed = *v,
                        "count" => fc.count = small()?,
                        "gens" => fc.max_gens = small()?.max(1),
                        _ => fc.max_rels = small()?,
                    }
                }
                Ok(fuzz::run(&fc, caps)?.to_body())
            }
        }
    }
}

/// Runs every declaration in order and returns one report per command.
pub fn run_script(script: &Script, config: &Config) -> Result<Vec<Report>, CliError> {
    let mut runner = Runner { env: Env::default(), config: config.clone(), cache: Cache::new(config.cache_dir.clone())? };
    let mut reports = Vec::new();
    for decl in &script.decls {
        match decl {
            Decl::Ring { name, expr } => runner.env.define_ring(name, expr)?,
            Decl::Module { name, ring, expr } => runner.env.define_module(name, ring, expr)?,
            Decl::Command { command, pos, text } => {
                let start = Instant::now();
                let body = runner.command(command, *pos)?;
                let mut report = Report::new(text.clone(), body);
                if config.timing {
                    report.timing_ms = Some(start.elapsed().as_millis() as u64);
                }
                reports.push(report);
            }
        }
    }
    Ok(reports)
}

pub fn run_source(src: &str, config: &Config) -> Result<Vec<Report>, CliError> {
    run_script(&parse_script(src)?, config)
}
