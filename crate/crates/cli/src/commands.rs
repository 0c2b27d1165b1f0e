//! Argument definitions and dispatch: each subcommand calls into the
//! engine and packages the outcome as a [`CommandReport`] plus a
//! plaintext rendering.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use liekit::classify::classify3;
use liekit::contraction::{
    contract_diagonal, contract_general, default_grid, enumerate_diagonal, solve_pattern,
    ContractionOutcome, DiagonalWitness, Pattern, PreChange,
};
use liekit::deformation::{
    h2, is_coboundary, reverse_family_from_contraction, two_cocycle_defects, verify_family,
    TwoCochain,
};
use liekit::feasibility::Feasibility;
use liekit::finite::FiniteLieAlgebra;
use liekit::graded::contract::{
    class_map_from_witness, class_pattern_system, commute_check, graded_contract_template,
    template_limit, z2_scan_deformed_witt, ClassPattern, EpsTemplate, GradedExponentMap,
};
use liekit::graded::{template_equal, BracketTemplate, GradeFactor, GradedError, RuleTerm};
use liekit::linalg::Matrix;
use liekit::scalar::parse::parse_expr;
use liekit::scalar::{normalize, ScalarExpr};
use serde_json::{json, Value};

use crate::lie_file;
use crate::templates;
use crate::{CliError, CommandReport, Outcome};

/// Exact contractions, deformations, and invariants of Lie algebras.
#[derive(Debug, Parser)]
#[command(name = "liekit", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Render an aligned plaintext summary instead of the JSON report.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// Skip the Jacobi identity check when loading algebra files.
    #[arg(long, global = true)]
    pub no_verify: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an algebra file, check the Jacobi identity, and report the
    /// structural invariants.
    Check {
        /// Algebra definition file (`.lie`).
        file: PathBuf,
    },

    /// Identify the isomorphism class of a 3-dimensional algebra.
    Classify {
        /// Algebra definition file (`.lie`).
        file: PathBuf,
    },

    /// Report dimension, derived algebra, center, Killing rank, and the
    /// solvability flags.
    Invariants {
        /// Algebra definition file (`.lie`).
        file: PathBuf,
    },

    /// Contract an algebra: diagonally with `--exp`, or along an explicit
    /// matrix curve with `--curve`.
    Contract {
        /// Algebra definition file (`.lie`).
        file: PathBuf,

        /// Diagonal exponents, one per basis symbol: `h=0,e=1,f=1`.
        /// Rationals are allowed (`x=1/2`).
        #[arg(long, value_name = "ASSIGNMENTS")]
        exp: Option<String>,

        /// Basis change applied before contracting: a catalogue name
        /// (see `liekit contract --help-pre`) or a JSON matrix.
        #[arg(long, value_name = "NAME|JSON")]
        pre: Option<String>,

        /// Contraction curve U(eps): matrix rows separated by `;`,
        /// entries by `,`, each an expression in `eps`.
        #[arg(long, value_name = "MATRIX", conflicts_with_all = ["exp", "pre"])]
        curve: Option<String>,

        /// Classify the limit algebra (dimension 3 only).
        #[arg(long)]
        classify: bool,

        /// List the named basis changes and exit.
        #[arg(long)]
        help_pre: bool,
    },

    /// Scan diagonal contractions over an exponent grid and report one
    /// witness per distinct limit class.
    Enumerate {
        /// Algebra definition file (`.lie`).
        file: PathBuf,

        /// Grid of candidate exponents (default `-1,0,1/2,1,2`).
        #[arg(long, value_name = "VALUES")]
        grid: Option<String>,
    },

    /// Decide exactly whether a keep/kill pattern on structure constants
    /// is realizable by a diagonal contraction.
    SolvePattern {
        /// An algebra file (`*.lie`) or a graded template name.
        subject: String,

        /// Pattern file: entry modes `keep`/`kill`/`free` per bracket
        /// (finite) or per residue class pair (graded).
        #[arg(long, value_name = "FILE")]
        pattern: PathBuf,
    },

    /// Compute the second adjoint cohomology of an algebra.
    H2 {
        /// Algebra definition file (`.lie`).
        file: PathBuf,
    },

    /// Check whether an explicit 2-cochain is a cocycle and whether it is
    /// a coboundary.
    Cocycle {
        /// Algebra definition file (`.lie`).
        file: PathBuf,

        /// One cochain entry `x,y=expression` (repeat for more entries).
        #[arg(long = "set", value_name = "ENTRY", required = true)]
        set: Vec<String>,
    },

    /// Verify a one-parameter family of brackets: Jacobi identically in
    /// the parameter, and the classes of the special and generic fibers.
    Family {
        /// Algebra definition file declaring the family parameter.
        file: PathBuf,

        /// Name of the family parameter.
        #[arg(long, default_value = "t")]
        param: String,
    },

    /// Reverse a diagonal contraction into a polynomial family that
    /// recovers the original algebra at t = 1 and the limit at t = 0.
    Reverse {
        /// Algebra definition file (`.lie`).
        file: PathBuf,

        /// Diagonal exponents, one per basis symbol: `h=0,e=1,f=1`.
        #[arg(long, value_name = "ASSIGNMENTS")]
        exp: String,

        /// Basis change applied before contracting.
        #[arg(long, value_name = "NAME|JSON")]
        pre: Option<String>,

        /// Name of the family parameter.
        #[arg(long, default_value = "t")]
        param: String,
    },

    /// Build a graded bracket template, check its Jacobi identity on a
    /// degree window, contract it, and compare it against another.
    Template(TemplateArgs),

    /// Rescale a graded template by an exponent map and report the exact
    /// eps-order of every term (the stage before the limit).
    TemplateContract(TemplateContractArgs),

    /// Check that affinization commutes with a diagonal contraction.
    CommuteCheck {
        /// Algebra definition file (`.lie`).
        file: PathBuf,

        /// Diagonal exponents, one per basis symbol: `h=0,e=1,f=1`.
        #[arg(long, value_name = "ASSIGNMENTS")]
        exp: String,

        /// Basis change applied before contracting.
        #[arg(long, value_name = "NAME|JSON")]
        pre: Option<String>,

        /// Degree window half-width for the template comparison.
        #[arg(long, default_value_t = 4)]
        window: i64,
    },
}

#[derive(Debug, clap::Args)]
pub struct TemplateArgs {
    /// Template name (`witt`, `kn-witt`, `loop-sl2`, `affine-sl2`,
    /// `kn-affine-sl2`, `kn-affine-r3m1`) or a template JSON file.
    pub name: String,

    /// Check the Jacobi identity on the window of degrees |n| <= N.
    #[arg(long, value_name = "N")]
    pub jacobi: Option<i64>,

    /// Rescale by a fine exponent map: a linear polynomial in the degree
    /// `n` (applied to every non-central family) or `fam=<linear>;...`.
    #[arg(long, value_name = "MAP")]
    pub contract_fine: Option<String>,

    /// Rescale by a residue-class exponent map `0=0;1=1/2`.
    #[arg(long, value_name = "MAP")]
    pub contract_class: Option<String>,

    /// Rescale by a constant per-family exponent map `h=0;e=1;f=1`.
    #[arg(long, value_name = "MAP")]
    pub contract_family: Option<String>,

    /// Take the eps -> 0 limit of the rescaled template.
    #[arg(long)]
    pub limit: bool,

    /// Compare the final template against this one (name or JSON file).
    #[arg(long, value_name = "OTHER")]
    pub equal: Option<String>,

    /// Family renaming `old=new,...` applied before comparing. When
    /// omitted and both sides have a single non-central family, the
    /// renaming is inferred.
    #[arg(long, value_name = "PAIRS")]
    pub rename: Option<String>,

    /// Degree window half-width for comparisons.
    #[arg(long, default_value_t = 3)]
    pub window: i64,
}

#[derive(Debug, clap::Args)]
pub struct TemplateContractArgs {
    /// Template name or a template JSON file.
    pub name: String,

    /// Fine exponent map (linear in the degree `n`, or `fam=<linear>;...`).
    #[arg(long, value_name = "MAP")]
    pub fine: Option<String>,

    /// Residue-class exponent map `0=0;1=1/2`.
    #[arg(long, value_name = "MAP")]
    pub class: Option<String>,

    /// Constant per-family exponent map `h=0;e=1;f=1`.
    #[arg(long, value_name = "MAP")]
    pub family: Option<String>,

    /// Also take the eps -> 0 limit (divergence is reported, not fatal).
    #[arg(long)]
    pub limit: bool,

    /// Compare the limit against this template (name or JSON file).
    #[arg(long, value_name = "OTHER", requires = "limit")]
    pub equal: Option<String>,

    /// Family renaming `old=new,...` applied before comparing.
    #[arg(long, value_name = "PAIRS")]
    pub rename: Option<String>,

    /// Degree window half-width for comparisons.
    #[arg(long, default_value_t = 3)]
    pub window: i64,

    /// Scan the parity classes of the deformed Witt template over this
    /// exponent grid (only meaningful for `kn-witt`).
    #[arg(long, value_name = "GRID", conflicts_with_all = ["fine", "class", "family", "limit", "equal"])]
    pub scan: Option<String>,
}

impl Cli {
    /// Execute the selected subcommand.
    pub fn run(&self) -> Result<Outcome, CliError> {
        match &self.command {
            Command::Check { file } => self.cmd_check(file),
            Command::Classify { file } => self.cmd_classify(file),
            Command::Invariants { file } => self.cmd_invariants(file),
            Command::Contract {
                file,
                exp,
                pre,
                curve,
                classify,
                help_pre,
            } => self.cmd_contract(file, exp.as_deref(), pre.as_deref(), curve.as_deref(), *classify, *help_pre),
            Command::Enumerate { file, grid } => self.cmd_enumerate(file, grid.as_deref()),
            Command::SolvePattern { subject, pattern } => self.cmd_solve_pattern(subject, pattern),
            Command::H2 { file } => self.cmd_h2(file),
            Command::Cocycle { file, set } => self.cmd_cocycle(file, set),
            Command::Family { file, param } => self.cmd_family(file, param),
            Command::Reverse {
                file,
                exp,
                pre,
                param,
            } => self.cmd_reverse(file, exp, pre.as_deref(), param),
            Command::Template(args) => self.cmd_template(args),
            Command::TemplateContract(args) => self.cmd_template_contract(args),
            Command::CommuteCheck {
                file,
                exp,
                pre,
                window,
            } => self.cmd_commute_check(file, exp, pre.as_deref(), *window),
        }
    }

    /// Load and parse an algebra file, honoring `--no-verify`.
    fn load(&self, path: &Path) -> Result<FiniteLieAlgebra, CliError> {
        let text = read_text(path)?;
        Ok(lie_file::parse_algebra(&text, !self.no_verify)?)
    }

    // ---- finite algebra commands ------------------------------------------

    fn cmd_check(&self, file: &Path) -> Result<Outcome, CliError> {
        let text = read_text(file)?;
        let alg = lie_file::parse_algebra(&text, false)?;
        let defects = alg.jacobi_defects();
        if let Some(((x, y, z), v)) = defects.first() {
            let mut msg = format!(
                "Jacobi identity fails on ({x},{y},{z}): defect = {v}"
            );
            if defects.len() > 1 {
                msg.push_str(&format!(" (and {} more triples)", defects.len() - 1));
            }
            return Err(CliError::domain(msg));
        }
        let (record, pivots) = alg.invariants_generic();
        let mut diagnostics = Vec::new();
        let assumed: Vec<String> = pivots.iter().map(|p| p.to_string()).collect();
        if !assumed.is_empty() {
            diagnostics.push(format!(
                "invariants are generic: assumed nonzero {}",
                assumed.join(", ")
            ));
        }
        let pretty = format!(
            "{}\njacobi: ok\n{}",
            pretty_algebra(&alg),
            pretty_invariants(&record)
        );
        let result = json!({
            "name": alg.name(),
            "dim": alg.dim(),
            "basis": alg.basis(),
            "params": alg.params().iter().collect::<Vec<_>>(),
            "jacobi": "ok",
            "invariants": record,
            "assumed_nonzero": assumed,
        });
        Ok(outcome("check", result, diagnostics, pretty))
    }

    fn cmd_classify(&self, file: &Path) -> Result<Outcome, CliError> {
        let alg = self.load(file)?;
        let out = classify3(&alg)?;
        let pretty = if out.assumed_nonzero.is_empty() {
            format!("{}", out.label)
        } else {
            format!(
                "{}  (assuming nonzero: {})",
                out.label,
                out.assumed_nonzero.join(", ")
            )
        };
        let result = json!({
            "label": out.label.to_string(),
            "class": out.label,
            "assumed_nonzero": out.assumed_nonzero,
        });
        Ok(outcome("classify", result, vec![], pretty))
    }

    fn cmd_invariants(&self, file: &Path) -> Result<Outcome, CliError> {
        let alg = self.load(file)?;
        let (record, pivots) = alg.invariants_generic();
        let assumed: Vec<String> = pivots.iter().map(|p| p.to_string()).collect();
        let mut diagnostics = Vec::new();
        if !assumed.is_empty() {
            diagnostics.push(format!(
                "invariants are generic: assumed nonzero {}",
                assumed.join(", ")
            ));
        }
        let pretty = pretty_invariants(&record);
        let result = json!({
            "name": alg.name(),
            "invariants": record,
            "assumed_nonzero": assumed,
        });
        Ok(outcome("invariants", result, diagnostics, pretty))
    }

    #[allow(clippy::too_many_arguments)]
    fn cmd_contract(
        &self,
        file: &Path,
        exp: Option<&str>,
        pre: Option<&str>,
        curve: Option<&str>,
        classify: bool,
        help_pre: bool,
    ) -> Result<Outcome, CliError> {
        if help_pre {
            let names = liekit::contraction::pre_change_catalogue();
            let pretty = names.join("\n");
            return Ok(outcome(
                "contract",
                json!({ "pre_changes": names }),
                vec![],
                pretty,
            ));
        }
        let alg = self.load(file)?;
        let (out, setup) = match (exp, curve) {
            (Some(exp), None) => {
                let pre_change = parse_pre(pre)?;
                let p = pre_change.to_matrix(alg.dim())?;
                let moved = alg.change_basis(alg.basis().to_vec(), &p)?;
                let exponents = templates::parse_assignments(exp)?;
                let witness = DiagonalWitness {
                    pre_change,
                    exponents: exponents
                        .iter()
                        .map(|(k, v)| (k.clone(), v.to_string()))
                        .collect(),
                };
                let out = contract_diagonal(&moved, &exponents)?;
                (out, json!({ "witness": witness }))
            }
            (None, Some(curve)) => {
                let u = parse_curve(curve, &alg)?;
                let rows: Vec<Vec<String>> = (0..u.rows())
                    .map(|r| u.row(r).iter().map(|e| e.to_string()).collect())
                    .collect();
                let out = contract_general(&alg, &u)?;
                (out, json!({ "curve": rows }))
            }
            (None, None) => {
                return Err(CliError::usage(
                    "contract needs `--exp <assignments>` or `--curve <matrix>`",
                ))
            }
            (Some(_), Some(_)) => unreachable!("clap rejects --exp with --curve"),
        };
        self.report_contraction("contract", out, setup, classify)
    }

    /// Shared tail of the two contraction paths: classification, JSON
    /// assembly, plaintext rendering.
    fn report_contraction(
        &self,
        command: &str,
        out: ContractionOutcome,
        setup: Value,
        classify: bool,
    ) -> Result<Outcome, CliError> {
        let mut result = setup;
        let classification = if classify {
            let c = classify3(&out.limit)?;
            Some(c)
        } else {
            None
        };
        let file_text = lie_file::to_lie_text(&out.limit);
        let obj = result
            .as_object_mut()
            .expect("setup payload is an object");
        obj.insert("limit".into(), serde_json::to_value(&out.limit).expect("limit serializes"));
        obj.insert("file".into(), Value::String(file_text));
        obj.insert("fates".into(), serde_json::to_value(&out.fates).expect("fates serialize"));
        if let Some(c) = &classification {
            obj.insert("label".into(), Value::String(c.label.to_string()));
            obj.insert(
                "assumed_nonzero".into(),
                serde_json::to_value(&c.assumed_nonzero).expect("strings serialize"),
            );
        }
        let mut pretty = pretty_algebra(&out.limit);
        pretty.push_str("\n\nentry fates (order in eps):\n");
        pretty.push_str(&pretty_fates(&out));
        if let Some(c) = &classification {
            pretty.push_str(&format!("\nclass: {}", c.label));
            if !c.assumed_nonzero.is_empty() {
                pretty.push_str(&format!(
                    "  (assuming nonzero: {})",
                    c.assumed_nonzero.join(", ")
                ));
            }
        }
        Ok(outcome(command, result, vec![], pretty))
    }

    fn cmd_enumerate(&self, file: &Path, grid: Option<&str>) -> Result<Outcome, CliError> {
        let alg = self.load(file)?;
        let grid = match grid {
            Some(g) => templates::parse_grid(g)?,
            None => default_grid(),
        };
        let hits = enumerate_diagonal(&alg, &grid)?;
        let grid_strings: Vec<String> = grid.iter().map(|v| v.to_string()).collect();
        let diagnostics = vec![format!(
            "searched all catalogue basis changes and exponent tuples from {{{}}}",
            grid_strings.join(", ")
        )];
        let mut pretty = String::new();
        for hit in &hits {
            pretty.push_str(&format!(
                "{}  via  pre={}  exp={}\n",
                hit.label,
                pre_name(&hit.witness.pre_change),
                hit.witness
                    .exponents
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(","),
            ));
        }
        pretty.push_str(&format!("{} distinct limit classes", hits.len()));
        let result = json!({
            "source": alg.name(),
            "grid": grid_strings,
            "hits": hits,
        });
        Ok(outcome("enumerate", result, diagnostics, pretty))
    }

    fn cmd_solve_pattern(&self, subject: &str, pattern: &Path) -> Result<Outcome, CliError> {
        let text = read_text(pattern)?;
        if subject.ends_with(".lie") {
            let alg = self.load(Path::new(subject))?;
            let pat: Pattern = serde_json::from_str(&text).map_err(|e| {
                CliError::domain(format!("`{}` is not a pattern: {e}", pattern.display()))
            })?;
            let report = solve_pattern(&alg, &pat)?;
            let certificate_verified = match &report.feasibility {
                Feasibility::Infeasible { certificate, .. } => {
                    Some(report.system.verify_certificate(certificate))
                }
                Feasibility::Feasible { .. } => None,
            };
            let pretty = pretty_feasibility(&report.feasibility, report.limit_label.as_deref());
            let result = json!({
                "kind": "finite",
                "subject": alg.name(),
                "report": report,
                "certificate_verified": certificate_verified,
            });
            return Ok(outcome("solve-pattern", result, vec![], pretty));
        }

        let t = templates::named_template(subject)?;
        let pat: ClassPattern = serde_json::from_str(&text).map_err(|e| {
            CliError::domain(format!(
                "`{}` is not a class pattern: {e}",
                pattern.display()
            ))
        })?;
        let system = class_pattern_system(&t, &pat)?;
        let feasibility = system.solve();
        let (certificate_verified, limit) = match &feasibility {
            Feasibility::Infeasible { certificate, .. } => {
                (Some(system.verify_certificate(certificate)), None)
            }
            Feasibility::Feasible { witness } => {
                let map = class_map_from_witness(&t, witness)?;
                let eps = graded_contract_template(&t, &map)?;
                let limit = match template_limit(&eps, &t) {
                    Ok(l) => serde_json::to_value(&l).expect("template serializes"),
                    Err(GradedError::Divergent { rule, order }) => json!({
                        "divergent": { "rule": rule, "order": order.to_string() }
                    }),
                    Err(e) => return Err(e.into()),
                };
                (None, Some(limit))
            }
        };
        let pretty = pretty_feasibility(&feasibility, None);
        let result = json!({
            "kind": "template",
            "subject": t.name,
            "system": system,
            "feasibility": feasibility,
            "certificate_verified": certificate_verified,
            "limit": limit,
        });
        Ok(outcome("solve-pattern", result, vec![], pretty))
    }

    fn cmd_h2(&self, file: &Path) -> Result<Outcome, CliError> {
        let alg = self.load(file)?;
        let report = h2(&alg)?;
        let pretty = format!(
            "2-cochains: {}\ncocycles:   {}\ncoboundaries: {}\ndim H2 = {}",
            report.cochain_dim, report.cocycle_dim, report.coboundary_dim, report.h2_dim
        );
        let result = json!({
            "name": alg.name(),
            "cohomology": report,
        });
        Ok(outcome("h2", result, vec![], pretty))
    }

    fn cmd_cocycle(&self, file: &Path, set: &[String]) -> Result<Outcome, CliError> {
        let alg = self.load(file)?;
        let mut f = TwoCochain::zero();
        for entry in set {
            let (lhs, rhs) = entry.split_once('=').ok_or_else(|| {
                CliError::usage(format!("`{entry}` is not `x,y=expression`"))
            })?;
            let (a, b) = lhs.split_once(',').ok_or_else(|| {
                CliError::usage(format!("`{lhs}` is not a basis pair `x,y`"))
            })?;
            let expr = parse_expr(rhs.trim())
                .map_err(|e| CliError::usage(format!("cannot parse `{rhs}`: {e}")))?;
            let v = lie_file::expr_to_vector(&expr, alg.basis(), alg.params())
                .map_err(CliError::usage)?;
            f.set(&alg, a.trim(), b.trim(), v)?;
        }
        let defects = two_cocycle_defects(&alg, &f)?;
        let cocycle = defects.is_empty();
        let coboundary = if cocycle {
            Some(is_coboundary(&alg, &f)?)
        } else {
            None
        };
        let described = f.describe(&alg);
        let defect_list: Vec<Value> = defects
            .iter()
            .map(|((x, y, z), v)| json!({ "triple": [x, y, z], "value": v.to_string() }))
            .collect();
        let mut pretty = String::new();
        for (k, v) in &described {
            pretty.push_str(&format!("F{k} = {v}\n"));
        }
        pretty.push_str(if cocycle {
            "2-cocycle: yes"
        } else {
            "2-cocycle: no"
        });
        match coboundary {
            Some(true) => pretty.push_str("\ncoboundary: yes (trivial deformation direction)"),
            Some(false) => pretty.push_str("\ncoboundary: no (genuine class in H2)"),
            None => {}
        }
        if let Some(((x, y, z), v)) = defects.first() {
            pretty.push_str(&format!("\nfirst defect on ({x},{y},{z}): {v}"));
        }
        let result = json!({
            "name": alg.name(),
            "cochain": described,
            "two_cocycle": cocycle,
            "defects": defect_list,
            "coboundary": coboundary,
        });
        Ok(outcome("cocycle", result, vec![], pretty))
    }

    fn cmd_family(&self, file: &Path, param: &str) -> Result<Outcome, CliError> {
        let alg = self.load(file)?;
        let report = verify_family(&alg, param)?;
        let pretty = pretty_family(&report, param);
        let result = json!({
            "name": alg.name(),
            "param": param,
            "report": report,
        });
        Ok(outcome("family", result, vec![], pretty))
    }

    fn cmd_reverse(
        &self,
        file: &Path,
        exp: &str,
        pre: Option<&str>,
        param: &str,
    ) -> Result<Outcome, CliError> {
        let alg = self.load(file)?;
        let pre_change = parse_pre(pre)?;
        let p = pre_change.to_matrix(alg.dim())?;
        let moved = alg.change_basis(alg.basis().to_vec(), &p)?;
        let exponents = templates::parse_assignments(exp)?;
        // Converging contraction first: it guarantees the family below
        // has only non-negative powers of the parameter.
        contract_diagonal(&moved, &exponents)?;
        let family = reverse_family_from_contraction(&moved, &exponents, param)?;
        let report = verify_family(&family, param)?;
        let witness = DiagonalWitness {
            pre_change,
            exponents: exponents
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
        };
        let pretty = format!(
            "{}\n\n{}",
            pretty_algebra(&family),
            pretty_family(&report, param)
        );
        let result = json!({
            "witness": witness,
            "param": param,
            "family": family,
            "file": lie_file::to_lie_text(&family),
            "report": report,
        });
        Ok(outcome("reverse", result, vec![], pretty))
    }

    // ---- graded template commands -------------------------------------------

    fn cmd_template(&self, args: &TemplateArgs) -> Result<Outcome, CliError> {
        let t = templates::named_template(&args.name)?;
        let mut diagnostics = Vec::new();
        let mut result = json!({
            "name": t.name,
            "template": t,
        });
        let obj = result.as_object_mut().expect("literal object");
        let mut pretty = pretty_template(&t);

        if let Some(n_max) = args.jacobi {
            let defects = t.jacobi_window(n_max)?;
            let rendered: Vec<String> = defects
                .iter()
                .map(|(at, what)| format!("{at}: {what}"))
                .collect();
            pretty.push_str(&format!(
                "\njacobi on |degree| <= {n_max}: {}",
                if rendered.is_empty() {
                    "ok".to_string()
                } else {
                    format!("{} defects", rendered.len())
                }
            ));
            obj.insert(
                "jacobi_window".into(),
                json!({ "n_max": n_max, "defects": rendered }),
            );
        }

        let map = resolve_map(
            &t,
            args.contract_fine.as_deref(),
            args.contract_class.as_deref(),
            args.contract_family.as_deref(),
        )?;
        // The template the comparison below runs against: the limit when a
        // contraction pipeline is requested, the base template otherwise.
        let mut final_t = t.clone();
        if let Some(map) = &map {
            let eps = graded_contract_template(&t, map)?;
            obj.insert(
                "rescaled".into(),
                serde_json::to_value(&eps).expect("template serializes"),
            );
            if args.limit {
                match template_limit(&eps, &t) {
                    Ok(l) => {
                        pretty.push_str("\n\nlimit:\n");
                        pretty.push_str(&pretty_template(&l));
                        obj.insert(
                            "limit".into(),
                            serde_json::to_value(&l).expect("template serializes"),
                        );
                        final_t = l;
                    }
                    Err(GradedError::Divergent { rule, order }) => {
                        pretty.push_str(&format!(
                            "\n\nlimit: divergent at {rule} (order {order})"
                        ));
                        obj.insert(
                            "limit".into(),
                            json!({ "divergent": { "rule": rule, "order": order.to_string() } }),
                        );
                        if args.equal.is_some() {
                            return Err(CliError::domain(format!(
                                "cannot compare a divergent limit: {rule} has order {order}"
                            )));
                        }
                    }
                    Err(e) => return Err(e.into()),
                }
            } else if args.equal.is_some() {
                return Err(CliError::usage(
                    "`--equal` after a contraction needs `--limit` (comparison is between templates, not rescalings)",
                ));
            }
        } else if args.limit {
            return Err(CliError::usage(
                "`--limit` needs a contraction map (`--contract-fine`, `--contract-class`, or `--contract-family`)",
            ));
        }

        if let Some(other_name) = &args.equal {
            let other = templates::named_template(other_name)?;
            let (renaming, inferred) = comparison_renaming(&final_t, &other, args.rename.as_deref())?;
            if let Some(note) = inferred {
                diagnostics.push(note);
            }
            let equal = template_equal(&final_t, &other, &renaming, args.window)?;
            pretty.push_str(&format!(
                "\nequal to {} (window {}): {}",
                other.name, args.window, equal
            ));
            obj.insert(
                "equal".into(),
                json!({
                    "other": other.name,
                    "renaming": renaming,
                    "window": args.window,
                    "equal": equal,
                }),
            );
        }

        Ok(outcome("template", result, diagnostics, pretty))
    }

    fn cmd_template_contract(&self, args: &TemplateContractArgs) -> Result<Outcome, CliError> {
        let t = templates::named_template(&args.name)?;
        let mut diagnostics = Vec::new();

        if let Some(grid) = &args.scan {
            if args.name != "kn-witt" {
                return Err(CliError::usage(
                    "`--scan` sweeps the parity classes of the deformed Witt template; use it with `kn-witt`",
                ));
            }
            let grid = templates::parse_grid(grid)?;
            let cells = z2_scan_deformed_witt(&ScalarExpr::var("alpha2"), &grid)?;
            let mut pretty = String::new();
            for c in &cells {
                pretty.push_str(&format!("n0={}  n1={}  ->  {}\n", c.n0, c.n1, c.outcome));
            }
            let mut kinds: Vec<&str> = cells.iter().map(|c| c.outcome.as_str()).collect();
            kinds.sort_unstable();
            kinds.dedup();
            pretty.push_str(&format!("{} distinct outcomes", kinds.len()));
            let result = json!({
                "name": t.name,
                "grid": grid.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "cells": cells,
                "outcomes": kinds,
            });
            return Ok(outcome("template-contract", result, diagnostics, pretty));
        }

        let map = resolve_map(
            &t,
            args.fine.as_deref(),
            args.class.as_deref(),
            args.family.as_deref(),
        )?
        .ok_or_else(|| {
            CliError::usage(
                "template-contract needs a map (`--fine`, `--class`, or `--family`) or `--scan`",
            )
        })?;
        let eps = graded_contract_template(&t, &map)?;
        let mut pretty = pretty_eps_template(&eps);
        let mut result = json!({
            "name": t.name,
            "rescaled": eps,
        });
        let obj = result.as_object_mut().expect("literal object");

        let mut limit_t = None;
        if args.limit {
            match template_limit(&eps, &t) {
                Ok(l) => {
                    pretty.push_str("\n\nlimit:\n");
                    pretty.push_str(&pretty_template(&l));
                    obj.insert(
                        "limit".into(),
                        serde_json::to_value(&l).expect("template serializes"),
                    );
                    limit_t = Some(l);
                }
                Err(GradedError::Divergent { rule, order }) => {
                    pretty.push_str(&format!("\n\nlimit: divergent at {rule} (order {order})"));
                    obj.insert(
                        "limit".into(),
                        json!({ "divergent": { "rule": rule, "order": order.to_string() } }),
                    );
                }
                Err(e) => return Err(e.into()),
            }
        }

        if let Some(other_name) = &args.equal {
            let Some(final_t) = &limit_t else {
                return Err(CliError::domain(format!(
                    "cannot compare a divergent limit against `{other_name}`"
                )));
            };
            let other = templates::named_template(other_name)?;
            let (renaming, inferred) = comparison_renaming(final_t, &other, args.rename.as_deref())?;
            if let Some(note) = inferred {
                diagnostics.push(note);
            }
            let equal = template_equal(final_t, &other, &renaming, args.window)?;
            pretty.push_str(&format!(
                "\nequal to {} (window {}): {}",
                other.name, args.window, equal
            ));
            obj.insert(
                "equal".into(),
                json!({
                    "other": other.name,
                    "renaming": renaming,
                    "window": args.window,
                    "equal": equal,
                }),
            );
        }

        Ok(outcome("template-contract", result, diagnostics, pretty))
    }

    fn cmd_commute_check(
        &self,
        file: &Path,
        exp: &str,
        pre: Option<&str>,
        window: i64,
    ) -> Result<Outcome, CliError> {
        let alg = self.load(file)?;
        let pre_change = parse_pre(pre)?;
        let exponents = templates::parse_assignments(exp)?;
        let witness = DiagonalWitness {
            pre_change,
            exponents: exponents
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
        };
        let commutes = commute_check(&alg, &witness, window)?;
        let pretty = format!(
            "affinize(lim g) == lim affinize(g) on |degree| <= {window}: {commutes}"
        );
        let result = json!({
            "name": alg.name(),
            "witness": witness,
            "window": window,
            "commutes": commutes,
        });
        Ok(outcome("commute-check", result, vec![], pretty))
    }
}

// ---- shared helpers -----------------------------------------------------------

fn outcome(command: &str, result: Value, diagnostics: Vec<String>, pretty: String) -> Outcome {
    Outcome {
        report: CommandReport {
            command: command.to_string(),
            result,
            diagnostics,
        },
        pretty,
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read `{}`: {e}", path.display())))
}

/// Interpret a `--pre` argument: absent means identity, a leading `[`
/// means an explicit JSON matrix, anything else is a catalogue name.
fn parse_pre(pre: Option<&str>) -> Result<PreChange, CliError> {
    match pre {
        None => Ok(PreChange::identity()),
        Some(s) if s.trim_start().starts_with('[') => {
            let rows: Vec<Vec<String>> = serde_json::from_str(s).map_err(|e| {
                CliError::usage(format!("`--pre` matrix is not a JSON array of string rows: {e}"))
            })?;
            Ok(PreChange::Matrix(rows))
        }
        Some(s) => Ok(PreChange::Named(s.to_string())),
    }
}

fn pre_name(pre: &PreChange) -> String {
    match pre {
        PreChange::Named(n) => n.clone(),
        PreChange::Matrix(_) => "(matrix)".to_string(),
    }
}

/// Parse a `--curve` matrix: rows separated by `;`, entries by `,`, each
/// entry an expression over `eps` and the algebra's parameters.
fn parse_curve(text: &str, alg: &FiniteLieAlgebra) -> Result<Matrix<ScalarExpr>, CliError> {
    let n = alg.dim();
    let mut rows = Vec::new();
    for row in text.split(';') {
        let mut entries = Vec::new();
        for entry in row.split(',') {
            let expr = parse_expr(entry.trim())
                .map_err(|e| CliError::usage(format!("cannot parse `{}`: {e}", entry.trim())))?;
            let expr = normalize(expr, alg.params())
                .map_err(|e| CliError::usage(format!("in `{}`: {e}", entry.trim())))?;
            entries.push(expr);
        }
        rows.push(entries);
    }
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::usage(format!(
            "the curve must be a {n}x{n} matrix (rows separated by `;`, entries by `,`)"
        )));
    }
    Ok(Matrix::from_rows(rows))
}

/// Resolve at most one of the three contraction map flavours.
fn resolve_map(
    t: &BracketTemplate,
    fine: Option<&str>,
    class: Option<&str>,
    family: Option<&str>,
) -> Result<Option<GradedExponentMap>, CliError> {
    let given = [fine.is_some(), class.is_some(), family.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if given > 1 {
        return Err(CliError::usage(
            "give at most one exponent map (fine, class, or family)",
        ));
    }
    Ok(match (fine, class, family) {
        (Some(s), _, _) => Some(templates::parse_fine_map(s, t)?),
        (_, Some(s), _) => Some(templates::parse_class_map(s)?),
        (_, _, Some(s)) => Some(templates::parse_family_map(s)?),
        _ => None,
    })
}

/// Determine the family renaming for a template comparison. An explicit
/// `--rename` wins; otherwise, when each side has exactly one non-central
/// family and the names differ, rename one to the other.
fn comparison_renaming(
    a: &BracketTemplate,
    b: &BracketTemplate,
    rename: Option<&str>,
) -> Result<(BTreeMap<String, String>, Option<String>), CliError> {
    if let Some(spec) = rename {
        return Ok((templates::parse_renaming(spec)?, None));
    }
    let solo = |t: &BracketTemplate| -> Option<String> {
        let non_central: Vec<&String> = t
            .families
            .keys()
            .filter(|f| t.central.as_ref() != Some(*f))
            .collect();
        match non_central.as_slice() {
            [only] => Some((*only).clone()),
            _ => None,
        }
    };
    if let (Some(fa), Some(fb)) = (solo(a), solo(b)) {
        if fa != fb {
            let note = format!("renamed family {fa} to {fb} for the comparison");
            return Ok(([(fa, fb)].into_iter().collect(), Some(note)));
        }
    }
    Ok((BTreeMap::new(), None))
}

// ---- plaintext rendering ------------------------------------------------------

/// Aligned `[x, y] = ...` lines for every nonzero bracket.
pub fn bracket_table(alg: &FiniteLieAlgebra) -> String {
    let n = alg.dim();
    let mut lines: Vec<(String, String)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = alg
                .bracket_basis(&alg.basis()[i], &alg.basis()[j])
                .expect("basis symbols are valid");
            if !v.is_zero() {
                lines.push((
                    format!("[{}, {}]", alg.basis()[i], alg.basis()[j]),
                    lie_file::vector_text(&v),
                ));
            }
        }
    }
    if lines.is_empty() {
        return "(abelian: all brackets vanish)".to_string();
    }
    let width = lines.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    lines
        .iter()
        .map(|(l, r)| format!("{l:width$} = {r}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn pretty_algebra(alg: &FiniteLieAlgebra) -> String {
    let mut s = format!("algebra {}  (dim {})", alg.name(), alg.dim());
    let params: Vec<&str> = alg.params().iter().collect();
    if !params.is_empty() {
        s.push_str(&format!("\nparams: {}", params.join(" ")));
    }
    s.push_str(&format!("\nbasis: {}\n", alg.basis().join(" ")));
    s.push_str(&bracket_table(alg));
    s
}

fn pretty_invariants(r: &liekit::finite::InvariantRecord) -> String {
    format!(
        "dim {}, derived {}, center {}, Killing rank {}\nabelian: {}  nilpotent: {}  solvable: {}",
        r.dim, r.derived_dim, r.center_dim, r.killing_rank, r.abelian, r.nilpotent, r.solvable
    )
}

fn pretty_fates(out: &ContractionOutcome) -> String {
    let mut lines: Vec<(String, String)> = Vec::new();
    for f in &out.fates {
        lines.push((
            format!("[{}, {}] -> {}", f.x, f.y, f.target),
            format!(
                "order {}  {}",
                f.order,
                if f.kept { "kept" } else { "vanishes" }
            ),
        ));
    }
    if lines.is_empty() {
        return "(no nonzero structure entries)".to_string();
    }
    let width = lines.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    lines
        .iter()
        .map(|(l, r)| format!("{l:width$}  {r}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn pretty_feasibility(f: &Feasibility, limit_label: Option<&str>) -> String {
    match f {
        Feasibility::Feasible { witness } => {
            let mut s = format!(
                "feasible: {}",
                witness
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            if let Some(label) = limit_label {
                s.push_str(&format!("\nrealized limit: {label}"));
            }
            s
        }
        Feasibility::Infeasible {
            certificate,
            contradiction,
        } => {
            let mut s = String::from("infeasible; certificate:\n");
            for line in certificate {
                s.push_str(&format!(
                    "  {} * {}{}\n",
                    line.multiplier,
                    if line.negated { "-" } else { "" },
                    line.label
                ));
            }
            s.push_str(&format!("  sums to the contradiction {contradiction}"));
            s
        }
    }
}

fn pretty_family(r: &liekit::deformation::FamilyReport, param: &str) -> String {
    let mut s = format!(
        "jacobi identically in {param}: {}",
        if r.jacobi_identically { "yes" } else { "no" }
    );
    if let Some(d) = &r.jacobi_defect {
        s.push_str(&format!("\nfirst defect: {d}"));
    }
    s.push_str(&format!(
        "\nat {param}=0: {}\ngeneric {param}: {}",
        r.at_zero, r.generic
    ));
    for (at, label) in &r.samples {
        s.push_str(&format!("\nat {at}: {label}"));
    }
    s.push_str(&format!(
        "\njump between fibers: {}",
        if r.jump { "yes" } else { "no" }
    ));
    s
}

fn grade_group_name(g: &liekit::graded::GradeGroup) -> String {
    if g.factors.is_empty() {
        return "trivial".to_string();
    }
    g.factors
        .iter()
        .map(|f| match f {
            GradeFactor::Finite(q) => format!("Z{q}"),
            GradeFactor::Integers => "Z".to_string(),
        })
        .collect::<Vec<_>>()
        .join(" x ")
}

fn fmt_rule_term(term: &RuleTerm) -> String {
    let mut s = String::new();
    if term.delta_zero {
        s.push_str("delta(n+m,0)*");
    }
    if !term.coeff.is_one() {
        s.push_str(&format!("({})*", term.coeff));
    }
    let offset = match term.offset {
        0 => String::new(),
        o => format!("{o:+}"),
    };
    s.push_str(&format!("{}[n+m{offset}]", term.target));
    s
}

/// Render a template as one line per rule.
pub fn pretty_template(t: &BracketTemplate) -> String {
    let mut s = format!(
        "template {}  (classes: {})\nfamilies: {}",
        t.name,
        grade_group_name(&t.group),
        t.families.keys().cloned().collect::<Vec<_>>().join(" ")
    );
    if let Some(c) = &t.central {
        s.push_str(&format!("  (central: {c})"));
    }
    for rule in &t.rules {
        let rhs = if rule.terms.is_empty() {
            "0".to_string()
        } else {
            rule.terms
                .iter()
                .map(fmt_rule_term)
                .collect::<Vec<_>>()
                .join(" + ")
        };
        s.push_str(&format!("\n{} = {rhs}", rule.guard));
    }
    s
}

/// Render a rescaled template with the eps-order of each term.
fn pretty_eps_template(t: &EpsTemplate) -> String {
    let mut s = format!("rescaled template {}", t.name);
    for rule in &t.rules {
        let rhs = if rule.terms.is_empty() {
            "0".to_string()
        } else {
            rule.terms
                .iter()
                .map(|term| {
                    format!(
                        "{} (order {})",
                        fmt_rule_term(&RuleTerm {
                            target: term.target.clone(),
                            offset: term.offset,
                            coeff: term.coeff.clone(),
                            delta_zero: term.delta_zero,
                        }),
                        term.order
                    )
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        s.push_str(&format!("\n{} = {rhs}", rule.guard));
    }
    s
}
