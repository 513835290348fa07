//! Problem-file schema and JSON rendering of verdicts and certificates.
//!
//! Complex entries are `[re, im]` pairs and matrices are row-major nested
//! arrays. The `module.rows` field is optional and defaults to the algebra
//! block dimensions (the algebra as a module over itself).

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use bjo_core::interchange::{
    complex_to_pair, matrix_to_nested, module_element_to_nested, nested_to_module_element,
    NestedBlocks,
};
use bjo_core::orthogonality::{FailureCertificate, StateWitness, Verdict};
use bjo_core::{
    BlockAlgebra, Certainty, Error, ModuleElement, ModuleSpace, PureState, Relation,
};

#[derive(Debug, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub blocks: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub rows: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    pub algebra: AlgebraSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleSpec>,
    pub x: NestedBlocks,
    pub y: NestedBlocks,
}

impl ProblemFile {
    pub fn space(&self) -> Result<ModuleSpace, Error> {
        let algebra = BlockAlgebra::new(self.algebra.blocks.clone())?;
        match &self.module {
            Some(m) => ModuleSpace::new(algebra, m.rows.clone()),
            None => Ok(ModuleSpace::self_module(algebra)),
        }
    }

    pub fn elements(&self) -> Result<(ModuleElement, ModuleElement), Error> {
        let space = self.space()?;
        let x = nested_to_module_element("x", &space, &self.x)?;
        let y = nested_to_module_element("y", &space, &self.y)?;
        Ok((x, y))
    }

    pub fn from_pair(x: &ModuleElement, y: &ModuleElement) -> Self {
        let space = x.space();
        let rows = space.row_dims().to_vec();
        let module = if rows == space.algebra().block_dims() {
            None
        } else {
            Some(ModuleSpec { rows })
        };
        ProblemFile {
            algebra: AlgebraSpec {
                blocks: space.algebra().block_dims().to_vec(),
            },
            module,
            x: module_element_to_nested(x),
            y: module_element_to_nested(y),
        }
    }
}

pub fn relation_name(relation: Relation) -> &'static str {
    match relation {
        Relation::Bj => "bj",
        Relation::QuasiStrong => "quasi-strong",
        Relation::Strong => "strong",
    }
}

pub fn answer_name(answer: Certainty) -> &'static str {
    match answer {
        Certainty::Holds => "Holds",
        Certainty::Fails => "Fails",
        Certainty::Borderline => "Borderline",
    }
}

pub fn pure_state_json(state: &PureState) -> Value {
    json!({
        "block": state.block(),
        "vector": state.vector().iter().map(|&z| complex_to_pair(z)).collect::<Vec<_>>(),
    })
}

pub fn witness_json(witness: &StateWitness) -> Value {
    match witness {
        StateWitness::Pure(p) => json!({ "pure": pure_state_json(p) }),
        StateWitness::Mixture(m) => json!({
            "mixture": m.terms().iter().map(|(w, p)| json!({
                "weight": w,
                "state": pure_state_json(p),
            })).collect::<Vec<_>>(),
        }),
    }
}

pub fn failure_json(failure: &FailureCertificate) -> Value {
    match failure {
        FailureCertificate::NormDrop {
            lambda,
            b,
            achieved,
            reference,
        } => json!({
            "norm_drop": {
                "lambda": complex_to_pair(*lambda),
                "b": b.as_ref().map(|el| el.blocks().iter().map(matrix_to_nested).collect::<Vec<_>>()),
                "achieved": achieved,
                "reference": reference,
            }
        }),
        FailureCertificate::SupportMargins { blocks } => json!({
            "support_margins": blocks.iter().map(|(k, m)| json!({"block": k, "margin": m})).collect::<Vec<_>>(),
        }),
        FailureCertificate::KernelGap { sigma_min, blocks } => json!({
            "kernel_gap": {
                "sigma_min": sigma_min,
                "per_block": blocks.iter().map(|(k, s)| json!({"block": k, "sigma": s})).collect::<Vec<_>>(),
            }
        }),
    }
}

pub fn verdict_json(verdict: &Verdict) -> Value {
    json!({
        "relation": relation_name(verdict.relation),
        "answer": answer_name(verdict.answer),
        "margin": verdict.margin,
        "witness": verdict.witness.as_ref().map(witness_json),
        "failure_certificate": verdict.failure.as_ref().map(failure_json),
        "tolerances": serde_json::to_value(verdict.tolerances).expect("tolerances"),
    })
}

fn format_complex(z: [f64; 2]) -> String {
    if z[1] >= 0.0 {
        format!("{:.6}+{:.6}i", z[0], z[1])
    } else {
        format!("{:.6}-{:.6}i", z[0], -z[1])
    }
}

pub fn print_verdict_human(verdict: &Verdict, force_witness: bool) {
    println!("relation: {}", relation_name(verdict.relation));
    println!("answer:   {}", answer_name(verdict.answer));
    println!("margin:   {:.6e}", verdict.margin);
    match &verdict.witness {
        Some(StateWitness::Pure(p)) => {
            println!(
                "witness:  pure state on block {}, vector [{}]",
                p.block(),
                p.vector()
                    .iter()
                    .map(|&z| format_complex(complex_to_pair(z)))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
        Some(StateWitness::Mixture(m)) => {
            println!("witness:  mixture of {} pure states", m.terms().len());
            for (w, p) in m.terms() {
                println!(
                    "          weight {:.6} on block {}, vector [{}]",
                    w,
                    p.block(),
                    p.vector()
                        .iter()
                        .map(|&z| format_complex(complex_to_pair(z)))
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
        }
        None if force_witness => println!("witness:  none recorded"),
        None => {}
    }
    match &verdict.failure {
        Some(FailureCertificate::NormDrop {
            lambda, achieved, reference, ..
        }) => {
            println!(
                "failure:  |x + lambda y| = {:.6e} < {:.6e} at lambda = {}",
                achieved,
                reference,
                format_complex(complex_to_pair(*lambda))
            );
        }
        Some(FailureCertificate::SupportMargins { blocks }) => {
            let desc: Vec<String> = blocks
                .iter()
                .map(|(k, m)| format!("block {k}: {m:.3e}"))
                .collect();
            println!("failure:  support margins per attained block: {}", desc.join(", "));
        }
        Some(FailureCertificate::KernelGap { sigma_min, .. }) => {
            println!("failure:  minimal singular value on attained frames: {sigma_min:.6e}");
        }
        None => {}
    }
    let t = &verdict.tolerances;
    println!(
        "tolerances: eps_zero={:.1e} eps_eig={:.1e} tol_sa={:.1e} witness_tol={:.1e} fail_margin={:.1e}",
        t.eps_zero, t.eps_eig, t.tol_sa, t.witness_tol, t.fail_margin
    );
}
