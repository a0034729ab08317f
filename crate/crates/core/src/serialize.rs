//! JSON text formats: pointed matched circles, algebra references and
//! module files, plus named-object resolution for the CLI.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::DgAlgebra;
use crate::error::{Error, Result};
use crate::f2::F2Vec;
use crate::module::{AInfObject, Flavor, Generator, OpEntry, Side, Slot};
use crate::pmc::{standard_by_name, PointedMatchedCircle};
use crate::zoo;

#[derive(Serialize, Deserialize)]
struct PmcFile {
    k: usize,
    matching: Vec<(usize, usize)>,
}

pub fn pmc_to_json(pmc: &PointedMatchedCircle) -> String {
    serde_json::to_string_pretty(&PmcFile {
        k: pmc.genus(),
        matching: pmc.matching().to_vec(),
    })
    .expect("pmc serialization")
}

pub fn pmc_from_json(text: &str) -> Result<PointedMatchedCircle> {
    let file: PmcFile = serde_json::from_str(text)?;
    PointedMatchedCircle::new(file.k, &file.matching)
}

/// A name or a file path.
pub fn resolve_pmc(spec: &str) -> Result<PointedMatchedCircle> {
    if Path::new(spec).exists() {
        return pmc_from_json(&std::fs::read_to_string(spec)?);
    }
    standard_by_name(spec)
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(untagged)]
enum AlgRef {
    Named(String),
    Summand { pmc: Value, i: i64 },
}

fn algebra_ref(alg: &Arc<DgAlgebra>) -> Result<AlgRef> {
    if alg.name() == "A(T2,0)" {
        return Ok(AlgRef::Named("torus".into()));
    }
    match (alg.pmc(), alg.weight()) {
        (Some(pmc), Some(i)) => Ok(AlgRef::Summand {
            pmc: serde_json::from_str(&pmc_to_json(pmc))?,
            i,
        }),
        _ => Err(Error::ShapeMismatch(format!(
            "algebra {} has no serializable reference",
            alg.name()
        ))),
    }
}

fn resolve_algebra(r: &AlgRef) -> Result<Arc<DgAlgebra>> {
    match r {
        AlgRef::Named(name) => match name.as_str() {
            "torus" | "A(T2,0)" => Ok(zoo::torus_algebra()),
            other => {
                let pmc = standard_by_name(other)?;
                zoo::algebra(&pmc, 0)
            }
        },
        AlgRef::Summand { pmc, i } => {
            let text = serde_json::to_string(pmc)?;
            let pmc = pmc_from_json(&text)?;
            zoo::algebra(&pmc, *i)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SlotFile {
    algebra: AlgRef,
    side: String,
    flavor: String,
}

#[derive(Serialize, Deserialize)]
struct GenFile {
    name: String,
    idem: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct OpFile {
    src: String,
    words: Vec<Vec<String>>,
    tgt: String,
    outs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ObjFile {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    algebra: Option<AlgRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slots: Option<Vec<SlotFile>>,
    generators: Vec<GenFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ops: Option<Vec<OpFile>>,
}

pub fn object_to_json(obj: &AInfObject) -> Result<String> {
    let slots = obj
        .slots()
        .iter()
        .map(|s| {
            Ok(SlotFile {
                algebra: algebra_ref(&s.algebra)?,
                side: match s.side {
                    Side::Left => "left".into(),
                    Side::Right => "right".into(),
                },
                flavor: match s.flavor {
                    Flavor::D => "D".into(),
                    Flavor::A => "A".into(),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let generators = obj
        .gens()
        .iter()
        .map(|g| GenFile {
            name: g.name.clone(),
            idem: g
                .idem
                .iter()
                .zip(obj.slots())
                .map(|(&id, s)| s.algebra.label(s.algebra.idem_elem(id)).to_string())
                .collect(),
            degree: if g.degree != 0 { Some(g.degree) } else { None },
        })
        .collect();
    let a_slots = obj.a_slots().to_vec();
    let d_slots = obj.d_slots().to_vec();
    let ops = obj
        .ops()
        .iter()
        .map(|e| OpFile {
            src: obj.gens()[e.source as usize].name.clone(),
            words: e
                .words
                .iter()
                .zip(&a_slots)
                .map(|(w, &si)| {
                    w.iter()
                        .map(|&a| obj.slots()[si].algebra.label(a).to_string())
                        .collect()
                })
                .collect(),
            tgt: obj.gens()[e.target as usize].name.clone(),
            outs: e
                .outputs
                .iter()
                .zip(&d_slots)
                .map(|(&u, &si)| obj.slots()[si].algebra.label(u).to_string())
                .collect(),
        })
        .collect();
    let file = ObjFile {
        name: obj.name.clone(),
        algebra: None,
        slots: Some(slots),
        generators,
        delta: None,
        ops: Some(ops),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

fn parse_elem(alg: &Arc<DgAlgebra>, text: &str) -> Result<F2Vec> {
    let mut out = Vec::new();
    for part in text.split('+') {
        let label = part.trim();
        if label.is_empty() || label == "0" {
            continue;
        }
        let id = alg
            .by_label(label)
            .ok_or_else(|| Error::Parse(format!("unknown algebra element '{label}'")))?;
        out.push(id);
    }
    Ok(F2Vec::from_support_mod2(out))
}

fn idem_id(alg: &Arc<DgAlgebra>, label: &str) -> Result<u32> {
    let basis = alg
        .by_label(label)
        .ok_or_else(|| Error::Parse(format!("unknown idempotent '{label}'")))?;
    alg.idem_id_of(basis)
        .ok_or_else(|| Error::Parse(format!("'{label}' is not a primitive idempotent")))
}

pub fn object_from_json(text: &str) -> Result<AInfObject> {
    let file: ObjFile = serde_json::from_str(text)?;
    // slot list: explicit, or inferred from the delta arity
    let slots: Vec<Slot> = match (&file.slots, &file.algebra, &file.delta) {
        (Some(slots), _, _) => slots
            .iter()
            .map(|s| {
                let algebra = resolve_algebra(&s.algebra)?;
                let side = match s.side.to_ascii_lowercase().as_str() {
                    "left" => Side::Left,
                    "right" => Side::Right,
                    other => return Err(Error::Parse(format!("unknown side '{other}'"))),
                };
                let flavor = match s.flavor.to_ascii_uppercase().as_str() {
                    "D" => Flavor::D,
                    "A" => Flavor::A,
                    other => return Err(Error::Parse(format!("unknown flavor '{other}'"))),
                };
                Ok(Slot::new(algebra, side, flavor))
            })
            .collect::<Result<Vec<_>>>()?,
        (None, Some(alg_ref), Some(delta)) => {
            let algebra = resolve_algebra(alg_ref)?;
            match delta.first().map(|row| row.len()) {
                None | Some(3) => vec![Slot::new(algebra, Side::Left, Flavor::D)],
                Some(4) => vec![
                    Slot::new(algebra.clone(), Side::Left, Flavor::D),
                    Slot::new(algebra, Side::Right, Flavor::D),
                ],
                Some(n) => {
                    return Err(Error::Parse(format!("delta rows must have 3 or 4 fields, got {n}")))
                }
            }
        }
        _ => {
            return Err(Error::Parse(
                "module file needs either 'slots' or 'algebra' with 'delta'".into(),
            ))
        }
    };
    let gens: Vec<Generator> = file
        .generators
        .iter()
        .map(|g| {
            if g.idem.len() != slots.len() {
                return Err(Error::Parse(format!(
                    "generator {} has {} idempotents for {} slots",
                    g.name,
                    g.idem.len(),
                    slots.len()
                )));
            }
            let idem = g
                .idem
                .iter()
                .zip(&slots)
                .map(|(label, s)| idem_id(&s.algebra, label))
                .collect::<Result<Vec<_>>>()?;
            Ok(Generator { name: g.name.clone(), idem, degree: g.degree.unwrap_or(0) })
        })
        .collect::<Result<Vec<_>>>()?;
    let gen_index = |name: &str| -> Result<u32> {
        gens.iter()
            .position(|g| g.name == name)
            .map(|i| i as u32)
            .ok_or_else(|| Error::Parse(format!("unknown generator '{name}'")))
    };
    let mut ops: Vec<OpEntry> = Vec::new();
    if let Some(delta) = &file.delta {
        for row in delta {
            match row.as_slice() {
                [src, elem, tgt] => {
                    let v = parse_elem(&slots[0].algebra, elem)?;
                    let (s, t) = (gen_index(src)?, gen_index(tgt)?);
                    for u in v.iter() {
                        ops.push(OpEntry {
                            source: s,
                            words: Vec::new(),
                            target: t,
                            outputs: vec![u],
                        });
                    }
                }
                [src, a, b, tgt] => {
                    let va = parse_elem(&slots[0].algebra, a)?;
                    let vb = parse_elem(&slots[1].algebra, b)?;
                    let (s, t) = (gen_index(src)?, gen_index(tgt)?);
                    for u in va.iter() {
                        for v in vb.iter() {
                            ops.push(OpEntry {
                                source: s,
                                words: Vec::new(),
                                target: t,
                                outputs: vec![u, v],
                            });
                        }
                    }
                }
                other => {
                    return Err(Error::Parse(format!(
                        "delta rows must have 3 or 4 fields, got {}",
                        other.len()
                    )))
                }
            }
        }
    }
    let a_slots: Vec<usize> = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.flavor == Flavor::A)
        .map(|(i, _)| i)
        .collect();
    let d_slots: Vec<usize> = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.flavor == Flavor::D)
        .map(|(i, _)| i)
        .collect();
    if let Some(op_rows) = &file.ops {
        for row in op_rows {
            if row.words.len() != a_slots.len() || row.outs.len() != d_slots.len() {
                return Err(Error::Parse(format!(
                    "op on '{}' has the wrong slot shape",
                    row.src
                )));
            }
            let words = row
                .words
                .iter()
                .zip(&a_slots)
                .map(|(w, &si)| {
                    w.iter()
                        .map(|label| {
                            slots[si]
                                .algebra
                                .by_label(label)
                                .ok_or_else(|| Error::Parse(format!("unknown element '{label}'")))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let outs = row
                .outs
                .iter()
                .zip(&d_slots)
                .map(|(label, &si)| {
                    slots[si]
                        .algebra
                        .by_label(label)
                        .ok_or_else(|| Error::Parse(format!("unknown element '{label}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            ops.push(OpEntry {
                source: gen_index(&row.src)?,
                words,
                target: gen_index(&row.tgt)?,
                outputs: outs,
            });
        }
    }
    AInfObject::new(file.name, slots, gens, ops)
}

/// Resolves a named zoo object or a file path.
pub fn resolve_object(spec: &str) -> Result<AInfObject> {
    if Path::new(spec).exists() {
        return object_from_json(&std::fs::read_to_string(spec)?);
    }
    match spec {
        "cfd.inf" => Ok(zoo::cfd_solid_torus(zoo::Framing::Infinity)),
        "cfd.zero" => Ok(zoo::cfd_solid_torus(zoo::Framing::Zero)),
        "cfd.trefoil-2" => Ok(zoo::cfd_trefoil_m2()),
        "dd.halfid.torus" => Ok(zoo::dd_half_identity_torus()),
        other => {
            if let Some(args) = other.strip_prefix("dd.id(").and_then(|s| s.strip_suffix(')')) {
                let mut parts = args.splitn(2, ',');
                let pmc = resolve_pmc(parts.next().unwrap_or(""))?;
                let i: i64 = parts.next().map(|s| s.trim().parse()).transpose().map_err(
                    |e: std::num::ParseIntError| Error::Parse(e.to_string()),
                )?.unwrap_or(0);
                return zoo::dd_identity(&pmc, i);
            }
            if let Some(args) = other.strip_prefix("bar(").and_then(|s| s.strip_suffix(')')) {
                let mut parts = args.splitn(2, ',');
                let pmc = resolve_pmc(parts.next().unwrap_or(""))?;
                let i: i64 = parts.next().map(|s| s.trim().parse()).transpose().map_err(
                    |e: std::num::ParseIntError| Error::Parse(e.to_string()),
                )?.unwrap_or(0);
                return zoo::bar(&pmc, i);
            }
            Err(Error::UnknownName(spec.into()))
        }
    }
}
