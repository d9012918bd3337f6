//! Executes a validated request.

use tautchern_core::chern::{bn_pullback, chern_char_theorem, invert_to_chern, BnClass, BnMode, BnRequest, TautRing};
use tautchern_core::combin::stable_bipartitions;
use tautchern_core::jacobian::{drc_divisor, modify_divisor, validate_phi};
use tautchern_core::oracle::chern_char_oracle;
use tautchern_core::strata::TautClass;
use tautchern_core::ucurve::DivisorSpec;

use crate::document::{DegreeJson, DivisorJson, PhiReportJson, ResultDocument, SymbolicJson};
use crate::request::{AEntry, Command, ComputationRequest, Mode};
use crate::CliError;

/// Chern character by the requested method; with `Mode::Both` also the
/// degrees where theorem and oracle differ.
fn chern_character(req: &ComputationRequest, doc: &mut ResultDocument) -> Result<Vec<TautClass>, CliError> {
    let div = &req.divisor;
    Ok(match req.mode {
        Mode::Theorem => chern_char_theorem(div, req.smax)?.components().to_vec(),
        Mode::Oracle => chern_char_oracle(div, req.smax)?,
        Mode::Both => {
            let theorem = chern_char_theorem(div, req.smax)?.components().to_vec();
            let oracle = chern_char_oracle(div, req.smax)?;
            for (s, (t, o)) in theorem.iter().zip(&oracle).enumerate() {
                let mut delta = t.clone();
                delta -= o;
                if !delta.is_zero() {
                    doc.diff.push(DegreeJson::from_class(&req.space, s as u32, &delta));
                }
            }
            doc.metadata.agreement = Some(doc.diff.is_empty());
            theorem
        }
    })
}

fn divisor_json(div: &DivisorSpec) -> DivisorJson {
    let space = div.space();
    DivisorJson {
        ell: div.ell,
        d: space.markings().map(|m| (space.label(m).to_string(), div.d(m))).collect(),
        a: stable_bipartitions(space)
            .into_iter()
            .filter(|b| div.a(b) != 0)
            .map(|b| AEntry { h: b.h, s: space.set_labels(b.s), value: div.a(&b) })
            .collect(),
    }
}

pub fn execute(req: &ComputationRequest) -> Result<ResultDocument, CliError> {
    let space = &req.space;
    let mut doc = ResultDocument::new(req.echo(), req.command, req.mode);
    match req.command {
        Command::ChernChar => {
            let ch = chern_character(req, &mut doc)?;
            for (s, c) in ch.iter().enumerate() {
                doc.push_degree(DegreeJson::from_class(space, s as u32, c));
            }
        }
        Command::ChernClasses => {
            let ch = chern_character(req, &mut doc)?;
            let c = invert_to_chern(&TautRing::new(space), &ch, req.smax as usize, req.negate)?;
            for (t, class) in c.iter().enumerate() {
                doc.push_degree(DegreeJson::from_class(space, t as u32, class));
            }
        }
        Command::BnClass => {
            let div = match &req.phi {
                Some(phi) => modify_divisor(&req.divisor, phi)?,
                None => req.divisor.clone(),
            };
            let bn = BnRequest::new(req.r, div)?;
            let mode = if req.expand { BnMode::Expanded } else { BnMode::Symbolic };
            match bn_pullback(&bn, req.smax, mode)? {
                BnClass::Symbolic(p) => doc.symbolic = Some(SymbolicJson::from_poly(bn.codim(), &p)),
                BnClass::Expanded(c) => doc.push_degree(DegreeJson::from_class(space, bn.codim(), &c)),
            }
        }
        Command::DrcDivisor => {
            let (i, j) = (req.i.as_deref().unwrap_or_default(), req.j.as_deref().unwrap_or_default());
            doc.divisor = Some(divisor_json(&drc_divisor(space, i, j)?));
        }
        Command::ValidatePhi => {
            let phi = req.phi.as_ref().ok_or_else(|| CliError::Config("validate-phi needs --phi-file".into()))?;
            let report = validate_phi(phi);
            doc.phi_report = Some(PhiReportJson {
                nondegenerate: report.is_nondegenerate(),
                degenerate: report.degenerate.iter().map(|b| b.render(space)).collect(),
            });
        }
    }
    Ok(doc)
}

/// Runs `execute` on a pool of `threads` workers, or the global pool.
pub fn execute_with_threads(req: &ComputationRequest, threads: Option<usize>) -> Result<ResultDocument, CliError> {
    match threads {
        None => execute(req),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            pool.install(|| execute(req))
        }
    }
}
