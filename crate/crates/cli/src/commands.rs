use std::fmt;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use deltavc_core::clpcore::{
    clp_lemma_check, gram_matrix, indicator_poly, verify_uniclp, RankCertificate,
};
use deltavc_core::gf2::{substitute_sum, MlPoly};
use deltavc_core::setfam::{format_family, parse_family, SetFamily, SubsetMask};
use deltavc_core::stdmon::{enumerate_d_bits, StandardBasis};
use deltavc_core::verify::{
    check_bound, exhaustive_verify, search_extremal, BoundReport, ConjectureStatus, SearchConfig,
    Strategy, Theorem,
};
use deltavc_core::Error;

use crate::report::{Report, Status};
use crate::{Command, Format, OutputArgs};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Input(String),
    Core(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(s) | CliError::Input(s) => f.write_str(s),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CmdResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CmdResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_family(path: &Path) -> CmdResult<(SetFamily, String)> {
    let text = read(path)?;
    let family = parse_family(&text).map_err(|e| match e {
        Error::Parse { line, msg } => {
            CliError::Input(format!("{}:{line}: {msg}", path.display()))
        }
        other => CliError::Core(other),
    })?;
    Ok((family, text))
}

fn mask_json(m: SubsetMask) -> Value {
    json!(m.elements())
}

fn masks_json(n: usize, masks: &[u64]) -> Value {
    Value::Array(
        masks
            .iter()
            .map(|&b| mask_json(SubsetMask::new(b, n).expect("mask within ground set")))
            .collect(),
    )
}

fn family_json(f: &SetFamily) -> Value {
    json!({ "n": f.n(), "members": masks_json(f.n(), f.masks()) })
}

fn monomial_text(n: usize, mask: u64) -> String {
    MlPoly::monomial(n, mask)
        .expect("mask within ground set")
        .to_string()
}

fn bound_text(r: &BoundReport) -> String {
    format!(
        "{:<10} d={:<3} r={} |F|={:<6} bound={:<10} hypotheses={} pass={}{}",
        r.theorem.as_str(),
        r.d,
        r.r,
        r.size,
        r.bound,
        r.hypotheses_hold,
        r.pass,
        r.witness.map_or(String::new(), |w| format!(" witness={w}"))
    )
}

pub fn run(command: &Command, out: &OutputArgs) -> CmdResult<u8> {
    let report = match command {
        Command::Vcdim { file } => vcdim(file)?,
        Command::Delta { file, write_family } => delta(file, write_family.as_deref())?,
        Command::Sm { file, expect_d } => sm(file, *expect_d)?,
        Command::Certify {
            file,
            emit_certificate,
        } => certify(file, emit_certificate.as_deref())?,
        Command::Verify {
            theorem,
            file,
            exhaustive,
            n,
            k,
        } => verify(theorem, file.as_deref(), *exhaustive, *n, *k)?,
        Command::Search {
            n,
            k,
            d,
            budget,
            seed,
            strategy,
            write_family,
        } => search(*n, *k, *d, *budget, *seed, strategy, write_family.as_deref())?,
        Command::ClpCheck { file, poly, d } => clp_check(file, poly, *d)?,
    };
    let rendered = match out.format {
        Format::Json => {
            serde_json::to_string_pretty(&report.to_json()).expect("json document") + "\n"
        }
        Format::Text => report.to_text(),
    };
    match &out.output {
        Some(path) => write(path, &rendered)?,
        None => print!("{rendered}"),
    }
    Ok(report.status.exit_code())
}

fn vcdim(file: &Path) -> CmdResult<Report> {
    let (f, text) = load_family(file)?;
    let mut r = Report::new("vcdim");
    r.input(file, &text);
    r.param("n", f.n());
    let vc = f.vc_dim();
    let witness = f.vc_witness();
    r.result = json!({
        "size": f.len(),
        "vc_dim": vc,
        "witness": witness.map(mask_json),
    });
    r.line(format!("|F|        {}", f.len()));
    r.line(format!("vc_dim:    {vc}"));
    if let Some(w) = witness {
        r.line(format!("witness:   {w}"));
    }
    Ok(r)
}

fn delta(file: &Path, write_family: Option<&Path>) -> CmdResult<Report> {
    let (f, text) = load_family(file)?;
    let mut r = Report::new("delta");
    r.input(file, &text);
    r.param("n", f.n());
    let d = f.delta();
    let vc = d.vc_dim();
    let max_len = d.iter().map(|t| t.len()).max();
    r.result = json!({
        "size": f.len(),
        "delta": family_json(&d),
        "delta_size": d.len(),
        "delta_vc_dim": vc,
        "delta_max_member_size": max_len,
    });
    r.line(format!("|F| = {}, |FΔF| = {}, vc_dim(FΔF) = {vc}, max |T| = {}", f.len(), d.len(), max_len.map_or(-1, |m| m as i64)));
    r.line("");
    r.line(format_family(&d).trim_end());
    if let Some(path) = write_family {
        write(path, &format_family(&d))?;
        r.param("write_family", path.display().to_string());
    }
    Ok(r)
}

fn sm(file: &Path, expect_d: Option<usize>) -> CmdResult<Report> {
    let (f, text) = load_family(file)?;
    if f.is_empty() {
        return Err(Error::EmptyPointSet.into());
    }
    let mut r = Report::new("sm");
    r.input(file, &text);
    r.param("n", f.n());
    r.param("order", "deglex, x_n < ... < x_1");
    let basis = StandardBasis::for_family(&f)?;
    let n = f.n();
    let lines: Vec<String> = basis.monomials().iter().map(|&m| monomial_text(n, m)).collect();
    let mut matches = None;
    if let Some(k) = expect_d {
        r.param("expect_D", k);
        if k > n {
            return Err(CliError::Input(format!("--expect-D {k} exceeds n = {n}")));
        }
        let ok = basis.monomials() == enumerate_d_bits(n, k).as_slice();
        matches = Some(ok);
        r.status = Status::from_ok(ok);
    }
    r.result = json!({
        "count": lines.len(),
        "monomials": lines,
        "masks": masks_json(n, basis.monomials()),
        "matches_expected_D": matches,
    });
    for l in &lines {
        r.line(l);
    }
    if let Some(ok) = matches {
        r.line(format!(
            "# {} D_{{{},{n}}}",
            if ok { "matches" } else { "differs from" },
            expect_d.unwrap_or(0)
        ));
    }
    Ok(r)
}

fn certificate_json(c: &RankCertificate) -> Value {
    let n = c.n;
    let group = |key_block: char, key: u64, other: &[u64], other_block: char| {
        let key_text = if key == 0 {
            "1".to_string()
        } else {
            monomial_text(n, key).replace('x', &key_block.to_string())
        };
        let poly = MlPoly::from_monomials(n, other.iter().copied())
            .expect("masks within ground set")
            .to_string()
            .replace('x', &other_block.to_string());
        json!({ "key": key_text, "key_mask": mask_json(SubsetMask::new(key, n).unwrap()), "polynomial": poly })
    };
    json!({
        "n": c.n,
        "k": c.k,
        "d": c.d,
        "half_d": c.half_d(),
        "bound": c.bound().to_string(),
        "reduced": c.reduced.to_string(),
        "x_groups": c.x_groups.iter().map(|(&k, ys)| group('x', k, ys, 'y')).collect::<Vec<_>>(),
        "y_groups": c.y_groups.iter().map(|(&k, xs)| group('y', k, xs, 'x')).collect::<Vec<_>>(),
        "group_count": c.group_count,
        "check": c.check(),
    })
}

fn certify(file: &Path, emit: Option<&Path>) -> CmdResult<Report> {
    let (f, text) = load_family(file)?;
    if f.is_empty() {
        return Err(Error::EmptyFamily.into());
    }
    let mut r = Report::new("certify");
    r.input(file, &text);
    r.param("n", f.n());
    let ind = indicator_poly(&f)?;
    let lifted = substitute_sum(&ind.g_prime);
    let gram = gram_matrix(&lifted, &f)?;
    let identity = gram.is_identity();
    let clp = clp_lemma_check(&ind.g_prime, f.masks(), ind.d_bound);
    r.line(format!("|F| = {}, |FΔF| = {}, d = vc_dim(FΔF) = {}", f.len(), ind.delta_family.len(), ind.d_bound));
    r.line(format!("g' = {}", ind.g_prime));
    r.line(format!("gram matrix of g'(x+y) is identity: {identity}"));
    r.line(format!(
        "lemma check: hypothesis={} P(0)={} |A|={} bound={} consistent={}",
        clp.hypothesis_holds, clp.value_at_zero as u8, clp.size, clp.bound, clp.consistent
    ));
    let mut result = json!({
        "size": f.len(),
        "d": ind.d_bound,
        "half_d": ind.d_bound / 2,
        "g_prime": ind.g_prime.to_string(),
        "delta_size": ind.delta_family.len(),
        "gram_identity": identity,
        "clp": clp,
    });
    let mut ok = identity && clp.consistent;
    r.theorem("clp");

    match f.is_uniform() {
        Some(k) => {
            r.theorem("main").theorem("uniclp");
            r.param("k", k);
            let u = verify_uniclp(&f, &lifted, ind.d_bound)?;
            ok &= u.hypotheses_hold() && u.consistent();
            r.line(format!(
                "k = {k}, ⌊d/2⌋ = {}, bound 2·C(n,⌊d/2⌋) = {}",
                u.half_d, u.bound
            ));
            r.line(format!(
                "hypotheses: degree_ok={} diagonal_nonzero={} off_diagonal_zero={}",
                u.degree_ok, u.diagonal_nonzero, u.off_diagonal_zero
            ));
            r.line(format!(
                "rank = {}, group_count = {}, certificate_ok = {}, |F| <= bound: {}",
                u.rank,
                u.group_count.map_or("-".into(), |g| g.to_string()),
                u.certificate_ok.map_or("-".into(), |b| b.to_string()),
                u.bound_holds
            ));
            let cert = u.certificate.as_ref().map(certificate_json);
            if let (Some(path), Some(c)) = (emit, cert.as_ref()) {
                write(path, &(serde_json::to_string_pretty(c).expect("json") + "\n"))?;
                r.param("emit_certificate", path.display().to_string());
            }
            result["k"] = json!(k);
            result["bound"] = json!(u.bound.to_string());
            result["rank"] = json!(u.rank);
            result["group_count"] = json!(u.group_count);
            result["hypotheses"] = json!({
                "degree_ok": u.degree_ok,
                "diagonal_nonzero": u.diagonal_nonzero,
                "off_diagonal_zero": u.off_diagonal_zero,
            });
            result["rank_equals_size"] = json!(u.rank_equals_size);
            result["certificate_ok"] = json!(u.certificate_ok);
            result["bound_holds"] = json!(u.bound_holds);
            result["certificate"] = cert.unwrap_or(Value::Null);
        }
        None => {
            r.theorem("dvir");
            let b = check_bound(&f, Theorem::Dvir)?;
            ok &= !b.is_violation();
            r.line("family is not uniform; checking the dvir bound instead");
            r.line(bound_text(&b));
            result["bound_report"] = json!(b);
            if emit.is_some() {
                r.line("no certificate: the uniform rank certificate needs a uniform family");
            }
        }
    }
    if !ok {
        result["counterexample"] = family_json(&f);
    }
    r.result = result;
    r.status = Status::from_ok(ok);
    Ok(r)
}

fn verify(
    theorem: &str,
    file: Option<&Path>,
    exhaustive: bool,
    n: Option<usize>,
    k: Option<usize>,
) -> CmdResult<Report> {
    let tag: Theorem = theorem.parse()?;
    let mut r = Report::new("verify");
    r.theorem(tag.as_str());
    r.param("theorem", tag.as_str());
    if exhaustive {
        let (n, k) = (n.unwrap_or(0), k.unwrap_or(0));
        r.param("mode", "exhaustive").param("n", n).param("k", k);
        let s = exhaustive_verify(n, k, tag)?;
        r.line(format!(
            "{} families checked, {} meet the hypotheses, max |F|/bound = {:.4}",
            s.families_checked, s.hypotheses_met, s.max_ratio
        ));
        r.line(format!("largest family per d: {:?}", s.max_size_by_d));
        r.line(format!("violations: {}", s.violations.len()));
        for v in s.violations.iter().take(10) {
            r.line(format!("  {}  {}", bound_text(&v.report), family_json(&v.family)));
        }
        r.status = Status::from_ok(s.violations.is_empty());
        r.result = json!({
            "families_checked": s.families_checked,
            "hypotheses_met": s.hypotheses_met,
            "max_ratio": s.max_ratio,
            "max_size_by_d": s.max_size_by_d,
            "failures": s.violations.len(),
            "violations": s.violations.iter().map(|v| json!({
                "family": family_json(&v.family),
                "report": v.report,
            })).collect::<Vec<_>>(),
        });
        return Ok(r);
    }
    let file = file.ok_or_else(|| {
        CliError::Input("verify needs a family file or --exhaustive --n N --k K".into())
    })?;
    let (f, text) = load_family(file)?;
    r.input(file, &text);
    r.param("mode", "file").param("n", f.n());
    let b = check_bound(&f, tag)?;
    r.line(bound_text(&b));
    if !b.hypotheses_hold {
        r.line("hypotheses not met; bound not applicable");
    }
    r.status = Status::from_ok(!b.is_violation());
    let mut result = json!({ "report": b });
    if b.is_violation() {
        result["counterexample"] = family_json(&f);
    }
    r.result = result;
    Ok(r)
}

fn search(
    n: usize,
    k: usize,
    d: usize,
    budget: u64,
    seed: Option<u64>,
    strategy: &str,
    write_family: Option<&Path>,
) -> CmdResult<Report> {
    let strategy: Strategy = strategy.parse()?;
    let (seed, generated) = match seed {
        Some(s) => (s, false),
        None => {
            let nanos = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0);
            (nanos, true)
        }
    };
    let mut r = Report::new("search");
    r.theorem("main").theorem("conjecture");
    r.param("n", n)
        .param("k", k)
        .param("d", d)
        .param("budget", budget)
        .param("seed", seed)
        .param("seed_generated", generated)
        .param("strategy", strategy.to_string());
    let config = SearchConfig {
        n,
        k,
        d,
        budget,
        seed,
        strategy,
    };
    let state = match search_extremal(&config) {
        Ok(s) => s,
        Err(Error::Invariant(msg)) => {
            r.status = Status::Fail;
            r.line(format!("invariant violated: {msg}"));
            r.result = json!({ "invariant_violation": msg });
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    r.line(format!(
        "best |F| = {} after {} moves{}",
        state.best_size,
        state.moves_used,
        if state.saturated { " (saturated: all k-subsets)" } else { "" }
    ));
    r.line(format!("main bound 2·C(n,⌊d/2⌋) = {}", state.main_bound));
    match (&state.conjecture, state.conjecture_bound) {
        (ConjectureStatus::NotApplicable, _) => r.line("conjecture: not applicable (needs 0 < d < n)"),
        (ConjectureStatus::ConsistentSoFar, Some(b)) => {
            r.line(format!("conjecture bound 2^r·C(n-r,⌊d/2⌋) = {b}: consistent so far (not proved)"))
        }
        (ConjectureStatus::Exceeded { family, vc_dim_delta }, Some(b)) => r.line(format!(
            "conjecture bound {b} EXCEEDED by a family of size {} with vc_dim(FΔF) = {vc_dim_delta} (brute-force re-verified)",
            family.len()
        )),
        _ => r.line("conjecture: -"),
    };
    r.line("");
    r.line(format_family(&state.best).trim_end());
    if let Some(path) = write_family {
        write(path, &format_family(&state.best))?;
        r.param("write_family", path.display().to_string());
    }
    r.result = json!({
        "best_size": state.best_size,
        "best": family_json(&state.best),
        "best_delta_vc_dim": state.best.delta().vc_dim(),
        "moves_used": state.moves_used,
        "saturated": state.saturated,
        "main_bound": state.main_bound.to_string(),
        "conjecture_bound": state.conjecture_bound.map(|b| b.to_string()),
        "conjecture": state.conjecture,
        "transcript": state.transcript,
    });
    Ok(r)
}

fn clp_check(file: &Path, poly: &str, d: usize) -> CmdResult<Report> {
    let (points, text) = load_family(file)?;
    let p = MlPoly::parse(poly, points.n())?;
    let mut r = Report::new("clp-check");
    r.theorem("clp");
    r.input(file, &text);
    r.param("n", points.n()).param("poly", poly).param("d", d);
    let c = clp_lemma_check(&p, points.masks(), d);
    r.line(format!(
        "deg(P) = {}, hypothesis (P(a-b) = 0 for a != b) = {}, P(0) = {}",
        c.degree.map_or("-inf".into(), |x| x.to_string()),
        c.hypothesis_holds,
        c.value_at_zero as u8
    ));
    r.line(format!("|A| = {}, bound 2·Σ_{{i<=⌊d/2⌋}} C(n,i) = {}", c.size, c.bound));
    r.line(format!("branch: {:?}, consistent: {}", c.branch, c.consistent));
    r.status = Status::from_ok(c.consistent);
    let mut result = json!(c);
    if !c.consistent {
        result["counterexample"] = json!({ "poly": p.to_string(), "points": family_json(&points) });
    }
    r.result = result;
    Ok(r)
}
