//! Runs pipeline stages for one document and assembles the report sections.
//! Stages are computed once and shared, so `full` costs no more than its
//! most expensive subcommand.

use std::collections::BTreeMap;
use std::time::Instant;

use log::warn;
use serde_json::{json, Map, Value};
use weblab_core::abelian::{derive_system, SlopeSystem};
use weblab_core::blaschke::{nakai_checks_d4, trace_formula_check, CrossRatioReport};
use weblab_core::connection::{blaschke_chern_trace, linearizability_d4, prolong, ConnectionData};
use weblab_core::dynamics::{compute_pw, is_linear, linearizability_degree_gate, PwPolynomial};
use weblab_core::presentation::{validate, WebPresentation};
use weblab_core::rank::{
    build_rank_matrix, d4_corollary_checks, determinant, ordering_diagnostic, rank_of_web, RankCertificate, RankMatrix,
};
use weblab_core::WebError;

use crate::document::WebDocument;
use crate::json::{matrix_json, series_json, series_list, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Pw,
    System,
    Connection,
    Curvature,
    TraceCheck,
    Rank,
    Linearize,
    Full,
}

impl Command {
    pub const STAGES: [Command; 8] = [
        Command::Validate,
        Command::Pw,
        Command::System,
        Command::Connection,
        Command::Curvature,
        Command::TraceCheck,
        Command::Rank,
        Command::Linearize,
    ];
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub order: Option<usize>,
    pub recheck_order: Option<usize>,
}

pub struct Session {
    doc: WebDocument,
    web: WebPresentation,
    pw: Option<PwPolynomial>,
    sys: Option<SlopeSystem>,
    conn: Option<ConnectionData>,
    rank: Option<(RankMatrix, RankCertificate)>,
    nakai: Option<CrossRatioReport>,
    timing: BTreeMap<String, f64>,
    ledger: Vec<Value>,
}

fn timed<T>(timing: &mut BTreeMap<String, f64>, stage: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    let ms = start.elapsed().as_secs_f64() * 1e3;
    *timing.entry(stage.to_string()).or_default() += (ms * 1e3).round() / 1e3;
    out
}

impl Session {
    pub fn new(doc: WebDocument, order: usize) -> Result<Self, CliError> {
        let mut timing = BTreeMap::new();
        let web = timed(&mut timing, "presentation", || doc.presentation(order))?;
        let mut s = Session { doc, web, pw: None, sys: None, conn: None, rank: None, nakai: None, timing, ledger: Vec::new() };
        s.note("input", order);
        Ok(s)
    }

    fn note(&mut self, stage: &str, precision: usize) {
        self.ledger.push(json!({ "stage": stage, "precision": precision }));
    }

    fn ensure_pw(&mut self) -> Result<(), CliError> {
        if self.pw.is_none() {
            let pw = timed(&mut self.timing, "pw", || compute_pw(&self.web))?;
            self.note("pw", pw.order());
            self.pw = Some(pw);
        }
        Ok(())
    }

    fn ensure_sys(&mut self) -> Result<(), CliError> {
        if self.sys.is_none() {
            let sys = timed(&mut self.timing, "system", || derive_system(&self.web))?;
            self.note("system", sys.order());
            self.sys = Some(sys);
        }
        Ok(())
    }

    fn ensure_conn(&mut self) -> Result<(), CliError> {
        self.ensure_sys()?;
        if self.conn.is_none() {
            let sys = self.sys.as_ref().expect("ensured");
            let conn = timed(&mut self.timing, "connection", || prolong(sys).and_then(|p| ConnectionData::from_prolongation(&p)))?;
            self.note("curvature", conn.order());
            self.conn = Some(conn);
        }
        Ok(())
    }

    fn ensure_rank(&mut self) -> Result<(), CliError> {
        self.ensure_conn()?;
        if self.rank.is_none() {
            let conn = self.conn.as_ref().expect("ensured");
            let (m, cert) = timed(&mut self.timing, "rank", || -> Result<_, WebError> {
                let m = build_rank_matrix(conn)?;
                let cert = rank_of_web(&m)?;
                Ok((m, cert))
            })?;
            self.note("rank_decision", cert.decision_precision);
            if let Some(p) = cert.zero_precision {
                self.note("rank_zero_test", p);
            }
            self.rank = Some((m, cert));
        }
        Ok(())
    }

    fn ensure_nakai(&mut self) -> Result<(), CliError> {
        if self.nakai.is_none() {
            let report = timed(&mut self.timing, "nakai", || nakai_checks_d4(&self.web))?;
            self.nakai = Some(report);
        }
        Ok(())
    }

    /// Report sections produced by one stage command.
    pub fn sections(&mut self, command: Command, opts: &Options) -> Result<Map<String, Value>, CliError> {
        let mut out = Map::new();
        match command {
            Command::Validate => {
                let v = validate(&self.web);
                let check = |c: &weblab_core::presentation::CheckRecord| json!({ "passed": c.passed, "precision": c.precision });
                out.insert(
                    "validation".into(),
                    json!({
                        "degree": v.degree,
                        "valid": v.is_valid(),
                        "leading_unit": check(&v.leading_unit),
                        "resultant": series_json(&v.resultant),
                        "resultant_unit": check(&v.resultant_unit),
                        "slopes_are_roots": v.slopes_are_roots.as_ref().map(check),
                        "rank_bound": self.web.rank_bound(),
                    }),
                );
            }
            Command::Pw => {
                self.ensure_pw()?;
                let pw = self.pw.as_ref().expect("ensured");
                out.insert(
                    "pw".into(),
                    json!({
                        "pw_coefficients": series_list(pw.coefficients()),
                        "is_linear": is_linear(pw),
                        "degree_gate": linearizability_degree_gate(pw),
                        "v_aliases": pw.v_aliases().map(|v| series_list(&v)),
                        "precision": pw.order(),
                    }),
                );
            }
            Command::System => {
                self.ensure_sys()?;
                let sys = self.sys.as_ref().expect("ensured");
                out.insert(
                    "system".into(),
                    json!({
                        "A_table": sys.table().iter().map(|row| series_list(row)).collect::<Vec<_>>(),
                        "equations": sys.degree() - 1,
                        "unknowns": sys.degree() - 2,
                        "precision": sys.order(),
                    }),
                );
            }
            Command::Connection => {
                self.ensure_conn()?;
                let c = self.conn.as_ref().expect("ensured");
                let schema: Vec<Value> =
                    c.schema.labels().iter().map(|l| json!({ "function": l.function, "dx": l.dx, "dy": l.dy })).collect();
                out.insert(
                    "connection".into(),
                    json!({
                        "schema": schema,
                        "gamma_x": matrix_json(&c.gamma_x),
                        "gamma_y": matrix_json(&c.gamma_y),
                        "permutation": c.permutation,
                        "precision": c.gamma_x.order().min(c.gamma_y.order()),
                    }),
                );
            }
            Command::Curvature => {
                self.ensure_conn()?;
                let c = self.conn.as_ref().expect("ensured");
                let trace = blaschke_chern_trace(c)?;
                out.insert(
                    "curvature".into(),
                    json!({
                        "curvature_row": series_list(&c.k),
                        "trace": series_json(&trace),
                        "flat": c.is_flat(),
                        "single_row": c.full_check(),
                        "precision": c.order(),
                    }),
                );
            }
            Command::TraceCheck => {
                let t = timed(&mut self.timing, "trace_check", || trace_formula_check(&self.web))?;
                let subwebs: Vec<Value> =
                    t.subwebs.iter().map(|(sel, k)| json!({ "leaves": sel.indices(), "curvature": series_json(k) })).collect();
                out.insert(
                    "trace_formula".into(),
                    json!({
                        "trace_lhs": series_json(&t.lhs),
                        "trace_rhs": series_json(&t.rhs),
                        "equal": t.equal,
                        "subweb_curvatures": subwebs,
                        "precision": t.lhs.order().min(t.rhs.order()),
                    }),
                );
                if self.web.degree() == 4 {
                    self.ensure_nakai()?;
                    let n = self.nakai.as_ref().expect("ensured");
                    out.insert(
                        "nakai".into(),
                        json!({
                            "cross_ratio": series_json(&n.cross_ratio),
                            "is_constant": n.is_constant,
                            "extracted_curvatures": series_list(&n.extracted_curvatures),
                            "all_equal": n.all_equal,
                            "nakai_equivalence": n.equivalence_holds(),
                            "precision": n.cross_ratio.order(),
                        }),
                    );
                }
            }
            Command::Rank => {
                self.ensure_rank()?;
                let c = self.conn.as_ref().expect("ensured");
                let (m, cert) = self.rank.as_ref().expect("ensured");
                let det = timed(&mut self.timing, "determinant", || determinant(m))?;
                let diag = timed(&mut self.timing, "ordering", || ordering_diagnostic(c, m))?;
                let pivots: Vec<Value> = cert
                    .pivots
                    .iter()
                    .map(|p| json!({ "row": p.row, "col": p.col, "valuation": p.valuation, "order": p.order, "unit": p.unit }))
                    .collect();
                let labels: Vec<Value> = m.labels.iter().map(|l| json!([l.dx, l.dy])).collect();
                out.insert(
                    "rank".into(),
                    json!({
                        "rank": cert.rank_of_web,
                        "corank": cert.corank,
                        "pi_d": cert.pi_d,
                        "flat": cert.flat,
                        "generic_rank": cert.generic_rank,
                        "kml_matrix": matrix_json(&m.matrix),
                        "row_derivatives": labels,
                        "pivots": pivots,
                        "decision_precision": cert.decision_precision,
                        "zero_precision": cert.zero_precision,
                        "advisory": cert.advisory,
                        "determinant": series_json(&det),
                        "ordering": {
                            "canonical_rank": diag.canonical_rank,
                            "extended_rank": diag.extended_rank,
                            "extra_rows": diag.extra_rows,
                            "consistent": diag.consistent(),
                        },
                    }),
                );
                if self.web.degree() == 4 && self.web.slopes().is_some() {
                    let (trace, cert) = (c.trace.clone(), cert.clone());
                    self.ensure_nakai()?;
                    let r = d4_corollary_checks(&cert, self.nakai.as_ref().expect("ensured"), &trace, &det)?;
                    out.insert(
                        "corollaries".into(),
                        json!({
                            "equal_curvatures_bound": r.equal_curvatures_bound,
                            "zero_trace_excludes_two": r.zero_trace_excludes_two,
                            "determinant_matches": r.determinant_matches,
                            "determinant_is_zero": r.determinant_is_zero,
                            "all_hold": r.all_hold(),
                        }),
                    );
                }
                if let Some(m_order) = opts.recheck_order {
                    out.insert("recheck".into(), self.recheck(m_order)?);
                }
            }
            Command::Linearize => {
                if self.web.degree() != 4 {
                    return Err(WebError::InvalidDegree {
                        degree: self.web.degree(),
                        reason: "linearizability is tested for 4-webs".into(),
                    }
                    .into());
                }
                self.ensure_pw()?;
                self.ensure_conn()?;
                let (c, pw, sys) = (self.conn.as_ref().unwrap(), self.pw.as_ref().unwrap(), self.sys.as_ref().unwrap());
                let r = timed(&mut self.timing, "linearize", || linearizability_d4(c, pw, sys))?;
                out.insert(
                    "linearizability".into(),
                    json!({
                        "kappa": series_json(&r.kappa),
                        "aligned_row": series_list(&r.aligned_row),
                        "l1_residual": series_json(&r.l1_residual),
                        "l2_residual": series_json(&r.l2_residual),
                        "degree_gate": r.degree_gate,
                        "linearizable": r.linearizable,
                        "precision": r.l1_residual.order().min(r.l2_residual.order()),
                    }),
                );
            }
            Command::Full => {
                for stage in Command::STAGES {
                    match self.sections(stage, opts) {
                        Ok(s) => out.extend(s),
                        Err(CliError::Web(e @ (WebError::NoExplicitSlopes | WebError::InvalidDegree { .. }))) => {
                            let key = if stage == Command::Linearize { "linearizability" } else { "trace_formula" };
                            out.insert(key.into(), json!({ "skipped": CliError::from(e).to_json() }));
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reruns the rank decision at a higher working precision.
    fn recheck(&mut self, order: usize) -> Result<Value, CliError> {
        let (_, base) = self.rank.as_ref().expect("rank computed before recheck");
        if order <= self.web.order() {
            return Err(CliError::Malformed(format!("recheck order {order} must exceed the working order {}", self.web.order())));
        }
        let base = base.clone();
        let doc = self.doc.clone();
        let mut again = Session::new(doc, order)?;
        again.ensure_rank()?;
        let (_, cert) = again.rank.as_ref().expect("ensured");
        let agrees = cert.rank_of_web == base.rank_of_web;
        if !agrees {
            warn!("rank {} at order {} but {} at order {order}", base.rank_of_web, self.web.order(), cert.rank_of_web);
        }
        for (stage, ms) in again.timing {
            *self.timing.entry(format!("recheck_{stage}")).or_default() += ms;
        }
        self.note("recheck_decision", cert.decision_precision);
        Ok(json!({
            "order": order,
            "rank": cert.rank_of_web,
            "decision_precision": cert.decision_precision,
            "zero_precision": cert.zero_precision,
            "agrees": agrees,
        }))
    }

    pub fn meta(&self) -> Value {
        json!({ "timing_ms": self.timing, "precision_ledger": self.ledger })
    }

    pub fn echo(&self) -> Value {
        self.doc.echo(&self.web)
    }
}
