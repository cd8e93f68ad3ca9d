use std::collections::BTreeSet;
use std::sync::Arc;

use serde_json::{json, Value};

use kergrad::closed_forms::{char_data, eval_sigma, eval_thm12_partial, eval_thm13, eval_thm58_series};
use kergrad::families::{build_family, family_kernel_dim, FamilyParams};
use kergrad::folner::parse_schedule;
use kergrad::group::{compression_matrix, parse_matrix};
use kergrad::linalg::{is_prime, kernel_dim};
use kergrad::tgraph::{component_census, TDecomposition};
use kergrad::{gradient_estimate, FieldSpec, FolnerBox, GroupRingMatrix, GroupSpec};

use crate::output::{dyadic, float, ratio, Format, Report};
use crate::{ClosedForm, CliError, OperatorArgs};

pub type Outcome = Result<(Report, Value, Format), CliError>;

pub fn parse_group(s: &str) -> Result<Arc<GroupSpec>, CliError> {
    let bad = || CliError::Usage(format!("group {s:?} is not of the form d:m"));
    let (d, m) = s.split_once(':').ok_or_else(bad)?;
    let d: usize = d.trim().parse().map_err(|_| bad())?;
    let m: usize = m.trim().parse().map_err(|_| bad())?;
    Ok(Arc::new(GroupSpec::with_full_aut(d, m)?))
}

pub fn resolve_operator(name: &str, group: &str) -> Result<GroupRingMatrix, CliError> {
    let name = name.trim();
    if name == "lamplighter" || name.starts_with("halved:") {
        return Ok(kergrad::presets::operator(name)?);
    }
    Ok(parse_matrix(&parse_group(group)?, name)?)
}

fn field(p: u64) -> Result<FieldSpec, CliError> {
    Ok(FieldSpec::new(p)?)
}

pub fn estimate(op: &OperatorArgs, p: u64, boxes: &str) -> Outcome {
    let t = resolve_operator(&op.operator, &op.group)?;
    let schedule = parse_schedule(t.group(), boxes)?;
    let trace = gradient_estimate(&t, &schedule, field(p)?)?;
    let mut r = Report::new(
        "estimate",
        vec!["box", "dim", "size", "estimate_num", "estimate_den", "estimate_float", "epsilon"],
    );
    let mut data = Vec::new();
    for row in &trace.rows {
        r.rows.push(vec![
            row.label.clone(),
            row.kernel_dim.to_string(),
            row.size.to_string(),
            row.estimate.numer().to_string(),
            row.estimate.denom().to_string(),
            format!("{:.12}", row.estimate_f64()),
            ratio(&row.epsilon),
        ]);
        data.push(json!({
            "box": row.label,
            "dim": row.kernel_dim,
            "size": row.size,
            "estimate": ratio(&row.estimate),
            "estimate_float": row.estimate_f64(),
            "epsilon": ratio(&row.epsilon),
        }));
    }
    r.data = Value::Array(data);
    let config = json!({"operator": op.operator, "group": op.group, "field": p, "boxes": boxes});
    Ok((r, config, Format::Csv))
}

pub fn census(op: &OperatorArgs, window: usize, p: u64) -> Outcome {
    let f = field(p)?;
    let t = resolve_operator(&op.operator, &op.group)?;
    let d = Arc::new(TDecomposition::from_matrix(&t)?);
    let c = component_census(&d, window)?;
    let dims = c.kernel_dims(f)?;
    let mut r = Report::new("census", vec!["type_id", "vertices", "measure", "kernel_dim", "interior"]);
    let mut data = Vec::new();
    for (ty, dim) in c.types.iter().zip(dims) {
        r.rows.push(vec![ty.type_id.clone(), ty.vertices.to_string(), dyadic(&ty.measure), dim.to_string(), "true".into()]);
        data.push(json!({
            "type_id": ty.type_id,
            "vertices": ty.vertices,
            "measure": dyadic(&ty.measure),
            "kernel_dim": dim,
            "interior": true,
        }));
    }
    r.rows.push(vec!["boundary".into(), String::new(), dyadic(&c.boundary_measure), String::new(), "false".into()]);
    data.push(json!({
        "type_id": "boundary",
        "vertices": null,
        "measure": dyadic(&c.boundary_measure),
        "kernel_dim": null,
        "interior": false,
    }));
    r.data = Value::Array(data);
    let config = json!({"operator": op.operator, "group": op.group, "window": window, "field": p});
    Ok((r, config, Format::Json))
}

pub fn family_params(kmax: usize, lmax: usize) -> Vec<FamilyParams> {
    let mut out: Vec<FamilyParams> = (1..=kmax).map(|k| FamilyParams::Path { k }).collect();
    out.extend((1..=kmax).map(|k| FamilyParams::G1 { k }));
    out.extend((1..=lmax).map(|l| FamilyParams::G2 { l }));
    for k in 1..=kmax {
        out.extend((1..=lmax).map(|l| FamilyParams::G3 { k, l }));
    }
    out
}

pub fn families(check: bool, kmax: usize, lmax: usize, primes: &[u64]) -> Outcome {
    let fields: Vec<FieldSpec> = primes.iter().map(|&p| field(p)).collect::<Result<_, _>>()?;
    let columns =
        if check { vec!["family", "field", "formula", "elimination", "status"] } else { vec!["family", "field", "formula"] };
    let mut r = Report::new("families", columns);
    let mut data = Vec::new();
    for f in &fields {
        for p in family_params(kmax, lmax) {
            let formula = family_kernel_dim(p, *f);
            let mut row = vec![p.to_string(), f.characteristic().to_string(), formula.to_string()];
            let mut entry = json!({"family": p.to_string(), "field": f.characteristic(), "formula": formula});
            if check {
                let elim = kernel_dim(&build_family(p, *f)?);
                let ok = elim == formula;
                r.passed &= ok;
                row.push(elim.to_string());
                row.push(if ok { "pass" } else { "fail" }.into());
                entry["elimination"] = json!(elim);
                entry["pass"] = json!(ok);
            }
            r.rows.push(row);
            data.push(entry);
        }
    }
    r.data = Value::Array(data);
    let config = json!({"check": check, "kmax": kmax, "lmax": lmax, "primes": primes});
    Ok((r, config, Format::Csv))
}

fn closed_form_report(quantity: String, exact: String, value: f64, tail: String) -> Report {
    let mut r = Report::new("closed-form", vec!["quantity", "exact", "float", "tail"]);
    r.rows.push(vec![quantity.clone(), exact.clone(), format!("{value:.17e}"), tail.clone()]);
    r.data = json!({"quantity": quantity, "exact": exact, "float": value, "tail": tail});
    r
}

pub fn closed_form(which: ClosedForm) -> Outcome {
    let zero = "0/1".to_string();
    let (r, config) = match which {
        ClosedForm::Thm13 { prime, with_1344 } => {
            let v = eval_thm13(prime, with_1344)?;
            let name = if with_1344 { format!("thm13_scaled(p={prime})") } else { format!("thm13(p={prime})") };
            (closed_form_report(name, ratio(&v), float(&v), zero), json!({"quantity": "thm13", "prime": prime, "with_1344": with_1344}))
        }
        ClosedForm::Thm12 { trunc } => {
            // the truncated sum is an upper bound; the value lies within `tail` below it
            let b = eval_thm12_partial(trunc);
            let r = closed_form_report(format!("thm12(K={trunc})"), ratio(&b.upper), float(&b.upper), ratio(&b.width()));
            (r, json!({"quantity": "thm12", "trunc": trunc}))
        }
        ClosedForm::Sigma { set } => {
            let s: BTreeSet<u32> = set
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse().map_err(|_| CliError::Usage(format!("bad set element {x:?}"))))
                .collect::<Result<_, _>>()?;
            let v = eval_sigma(&s).to_rational();
            let list: Vec<String> = s.iter().map(u32::to_string).collect();
            let r = closed_form_report(format!("sigma({{{}}})", list.join(",")), ratio(&v), float(&v), zero);
            (r, json!({"quantity": "sigma", "set": s}))
        }
        ClosedForm::Thm58 { prime, kmax, lmax } => {
            let b = eval_thm58_series(prime, kmax, lmax)?;
            let r = closed_form_report(
                format!("thm58(p={prime},K={kmax},L={lmax})"),
                ratio(&b.lower),
                float(&b.lower),
                ratio(&b.width()),
            );
            (r, json!({"quantity": "thm58", "prime": prime, "kmax": kmax, "lmax": lmax}))
        }
    };
    Ok((r, config, Format::Json))
}

pub fn table(primes: &[u64]) -> Outcome {
    let mut seen = BTreeSet::new();
    let mut r = Report::new("table", vec!["prime", "ord2", "L", "inner_exact", "inner_float", "with_1344_exact"]);
    let mut data = Vec::new();
    for &p in primes {
        if p == 2 || !is_prime(p) {
            return Err(CliError::Usage(format!("{p} is not an odd prime")));
        }
        if !seen.insert(p) {
            continue;
        }
        let c = char_data(p)?;
        let inner = eval_thm13(p, false)?;
        let scaled = eval_thm13(p, true)?;
        let l: Vec<String> = c.l.iter().map(u64::to_string).collect();
        r.rows.push(vec![
            p.to_string(),
            c.ord2.to_string(),
            l.join(" "),
            ratio(&inner),
            format!("{:.17e}", float(&inner)),
            ratio(&scaled),
        ]);
        data.push(json!({
            "prime": p,
            "ord2": c.ord2,
            "L": c.l,
            "inner_exact": ratio(&inner),
            "inner_float": float(&inner),
            "with_1344_exact": ratio(&scaled),
        }));
    }
    r.data = Value::Array(data);
    Ok((r, json!({"primes": primes}), Format::Csv))
}

pub fn kernel(family: Option<&str>, operator: Option<&str>, group: &str, bx: &str, p: u64) -> Outcome {
    let f = field(p)?;
    let (object, size, dim, config) = match (family, operator) {
        (Some(fam), _) => {
            let params: FamilyParams = fam.parse().map_err(|e: kergrad::Error| CliError::Usage(e.to_string()))?;
            let m = build_family(params, f)?;
            (params.to_string(), m.cols(), kernel_dim(&m), json!({"family": fam, "field": p}))
        }
        (None, Some(op)) => {
            let t = resolve_operator(op, group)?;
            let b = FolnerBox::parse(t.group(), bx)?;
            let m = compression_matrix(&t, &b, f)?;
            (op.to_string(), m.cols(), kernel_dim(&m), json!({"operator": op, "group": group, "box": bx, "field": p}))
        }
        (None, None) => return Err(CliError::Usage("kernel needs --family or --operator".into())),
    };
    let mut r = Report::new("kernel", vec!["object", "field", "size", "kernel_dim"]);
    r.rows.push(vec![object.clone(), p.to_string(), size.to_string(), dim.to_string()]);
    r.data = json!({"object": object, "field": p, "size": size, "kernel_dim": dim});
    Ok((r, config, Format::Json))
}
