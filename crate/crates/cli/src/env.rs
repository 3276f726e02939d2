//! Evaluation of ring and module declarations.

use std::collections::HashMap;
use std::sync::Arc;

use sgmod::functor::dual;
use sgmod::groebner::{buchberger, build_ring, is_prime, Polynomial};
use sgmod::ring::{ring_from_modulus, ring_product, Element, RingSource};
use sgmod::{FiniteModule, FiniteRing, RingMatrix};

use crate::dsl::{Expr, ModExpr, Name, Pos, RingExpr};
use crate::error::CliError;

#[derive(Default)]
pub struct Env {
    rings: HashMap<String, Arc<FiniteRing>>,
    modules: HashMap<String, (String, Arc<FiniteModule>)>,
}

impl Env {
    pub fn ring(&self, name: &Name) -> Result<&Arc<FiniteRing>, CliError> {
        self.rings
            .get(&name.value)
            .ok_or_else(|| CliError::Undefined { name: name.value.clone(), pos: name.pos })
    }

    /// A module, or the regular module when `name` is a ring.
    pub fn module(&self, name: &Name) -> Result<(String, Arc<FiniteModule>), CliError> {
        if let Some(m) = self.modules.get(&name.value) {
            return Ok(m.clone());
        }
        let r = self.ring(name)?;
        Ok((name.value.clone(), FiniteModule::regular(r)))
    }

    /// The pair over a common ring, as needed by Ext and Tor.
    pub fn module_pair(
        &self,
        left: &Name,
        right: &Name,
    ) -> Result<(Arc<FiniteModule>, Arc<FiniteModule>), CliError> {
        let (ra, a) = self.module(left)?;
        let (rb, b) = self.module(right)?;
        if ra != rb {
            return Err(CliError::semantic(right.pos, format!("`{}` is over {ra} but `{}` is over {rb}", left.value, right.value)));
        }
        Ok((a, b))
    }

    pub fn define_ring(&mut self, name: &Name, expr: &RingExpr) -> Result<(), CliError> {
        let r = self.eval_ring(expr, name.pos)?;
        self.rings.insert(name.value.clone(), r);
        Ok(())
    }

    pub fn define_module(&mut self, name: &Name, ring: &Name, expr: &ModExpr) -> Result<(), CliError> {
        let r = self.ring(ring)?.clone();
        let err = |e| CliError::engine(name.pos, e);
        let same_ring = |n: &Name| -> Result<Arc<FiniteModule>, CliError> {
            let (rn, m) = self.module(n)?;
            if rn != ring.value {
                return Err(CliError::semantic(n.pos, format!("`{}` is over {rn}, not {}", n.value, ring.value)));
            }
            Ok(m)
        };
        let m = match expr {
            ModExpr::Free(t) => FiniteModule::free(&r, *t),
            ModExpr::Coker(rows) => {
                let t = rows.first().map_or(0, Vec::len);
                if t == 0 {
                    return Err(CliError::semantic(name.pos, "cokernel of an empty matrix; use `free 0`"));
                }
                let mut entries = Vec::with_capacity(rows.len() * t);
                for row in rows {
                    if row.len() != t {
                        let pos = row.first().map_or(name.pos, Expr::pos);
                        return Err(CliError::semantic(pos, format!("row has {} entries, expected {t}", row.len())));
                    }
                    for e in row {
                        entries.push(eval_element(&r, e)?);
                    }
                }
                let mat = RingMatrix::new(rows.len(), t, entries).map_err(err)?;
                FiniteModule::cokernel_of_matrix(&r, &mat).map_err(err)?
            }
            ModExpr::Ideal(gens) => {
                let gens = gens.iter().map(|g| eval_element(&r, g)).collect::<Result<Vec<_>, _>>()?;
                FiniteModule::ideal(&r, &gens).map_err(err)?
            }
            ModExpr::Dual(n) => dual(&same_ring(n)?).map_err(err)?.module,
            ModExpr::Sum(a, b) => {
                let (a, b) = (same_ring(a)?, same_ring(b)?);
                a.direct_sum(&b).map_err(err)?.sum
            }
        };
        self.modules.insert(name.value.clone(), (ring.value.clone(), m));
        Ok(())
    }

    pub fn eval_ring(&self, expr: &RingExpr, pos: Pos) -> Result<Arc<FiniteRing>, CliError> {
        let err = |e| CliError::engine(pos, e);
        Ok(match expr {
            RingExpr::Named(n) => self.ring(n)?.clone(),
            RingExpr::Modulus(n) => Arc::new(ring_from_modulus(*n).map_err(err)?),
            RingExpr::Product(a, b) => Arc::new(ring_product(self.ring(a)?, self.ring(b)?).map_err(err)?),
            RingExpr::Galois { prime, vars, relations } => {
                if !is_prime(*prime) {
                    return Err(err(sgmod::Error::NotPrime(*prime)));
                }
                if vars.is_empty() {
                    return Ok(Arc::new(ring_from_modulus(*prime).map_err(err)?));
                }
                let mut seen = HashMap::new();
                for v in vars {
                    if let Some(first) = seen.insert(v.value.as_str(), v.pos) {
                        return Err(CliError::Redefined { name: v.value.clone(), pos: v.pos, first });
                    }
                }
                let names = Arc::new(vars.iter().map(|v| v.value.clone()).collect::<Vec<_>>());
                let polys = relations
                    .iter()
                    .map(|e| eval_polynomial(*prime, &names, e))
                    .collect::<Result<Vec<_>, _>>()?;
                let gb = buchberger(&polys).map_err(err)?;
                Arc::new(build_ring(&gb).map_err(err)?)
            }
        })
    }
}

fn eval_polynomial(p: u64, vars: &Arc<Vec<String>>, e: &Expr) -> Result<Polynomial, CliError> {
    let at = e.pos();
    let wrap = |r: sgmod::Result<Polynomial>| r.map_err(|x| CliError::engine(at, x));
    Ok(match e {
        Expr::Int(n, _) => Polynomial::constant(p, vars.clone(), (n % p) as i64),
        Expr::Var(v, pos) => {
            let i = vars
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| CliError::Undefined { name: v.clone(), pos: *pos })?;
            Polynomial::variable(p, vars.clone(), i)
        }
        Expr::Neg(a) => eval_polynomial(p, vars, a)?.neg(),
        Expr::Add(a, b) => wrap(eval_polynomial(p, vars, a)?.add(&eval_polynomial(p, vars, b)?))?,
        Expr::Sub(a, b) => wrap(eval_polynomial(p, vars, a)?.sub(&eval_polynomial(p, vars, b)?))?,
        Expr::Mul(a, b) => wrap(eval_polynomial(p, vars, a)?.mul(&eval_polynomial(p, vars, b)?))?,
        Expr::Pow(a, k) => wrap(eval_polynomial(p, vars, a)?.pow(*k))?,
        Expr::Tuple(_, pos) => return Err(CliError::semantic(*pos, "tuples are not polynomials")),
    })
}

/// Evaluates `e` as an element of `r`.
pub fn eval_element(r: &FiniteRing, e: &Expr) -> Result<Element, CliError> {
    Ok(match e {
        Expr::Int(n, _) => {
            let m = r.characteristic();
            r.from_integer((n % m) as i64)
        }
        Expr::Var(v, pos) => {
            if let Some(x) = r.named(v) {
                x.clone()
            } else if let Some(i) = r.labels().iter().position(|l| l == v) {
                r.basis_element(i)
            } else {
                return Err(CliError::semantic(*pos, format!("`{v}` is not an element of {}", r.describe())));
            }
        }
        Expr::Neg(a) => r.neg(&eval_element(r, a)?),
        Expr::Add(a, b) => r.add(&eval_element(r, a)?, &eval_element(r, b)?),
        Expr::Sub(a, b) => r.sub(&eval_element(r, a)?, &eval_element(r, b)?),
        Expr::Mul(a, b) => r.mul(&eval_element(r, a)?, &eval_element(r, b)?),
        Expr::Pow(a, k) => r.pow(&eval_element(r, a)?, u64::from(*k)),
        Expr::Tuple(parts, pos) => match r.source() {
            RingSource::Product(a, b) if parts.len() == 2 => {
                let mut x = eval_element(a, &parts[0])?;
                x.extend(eval_element(b, &parts[1])?);
                x
            }
            RingSource::Product(..) => {
                return Err(CliError::semantic(*pos, format!("expected a pair, found {} components", parts.len())));
            }
            _ => return Err(CliError::semantic(*pos, format!("{} is not a product ring", r.describe()))),
        },
    })
}
