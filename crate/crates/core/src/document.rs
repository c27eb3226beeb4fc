//! Output documents: a formula together with the input it answers and the
//! meaning of its variables, rendered as text, LaTeX or versioned JSON.
//!
//! Terms are listed in the canonical order of [`GradedPoly::sorted_terms`]:
//! graded, then lexicographic (descending) on the exponent vector over
//! `f_1, f_2, ..., g_1, g_2, ..., w_1, w_2`. Run statistics live outside the
//! serialized document so identical inputs give identical bytes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::GradedPoly;
use crate::splitting::{AlgorithmPath, Formula, SplittingType, WMode};

/// Bumped whenever the encoding of terms or the field layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    /// The type as entered, after sorting.
    pub splitting: SplittingType,
    /// `splitting + (t, ..., t)` has degree in `0..rank`.
    pub normalized: SplittingType,
    pub shift: i64,
    /// `None` for balanced types, which need no twist.
    pub m: Option<i64>,
    pub u: u32,
    pub mode: WMode,
    pub path: Option<AlgorithmPath>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendEntry {
    /// `f`, `g` or `w`.
    pub var: String,
    pub rank: u32,
    /// `var_i = c_i(bundle)`.
    pub bundle: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    /// Exponents over [`FormulaDocument::variables`].
    pub exponents: Vec<u32>,
    /// Decimal integer, kept as a string so no reader loses precision.
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaDocument {
    pub schema: u32,
    pub input: InputEcho,
    pub legend: Vec<LegendEntry>,
    pub variables: Vec<String>,
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format {s:?}"))),
        }
    }
}

fn twist_name(j: i64) -> String {
    match j {
        0 => "E".into(),
        _ => format!("E({j})"),
    }
}

fn letter(symbol: &str) -> Option<&'static str> {
    match symbol {
        "F" => Some("f"),
        "G" => Some("g"),
        "W" => Some("w"),
        _ => None,
    }
}

impl FormulaDocument {
    /// Document of `formula`, computed for `entered` shifted by `shift`.
    pub fn new(entered: &SplittingType, shift: i64, formula: &Formula) -> Result<FormulaDocument> {
        let meta = &formula.meta;
        if entered.shifted(shift) != meta.splitting {
            return Err(Error::InvalidArgument(format!("{entered} shifted by {shift} is not {}", meta.splitting)));
        }
        let ctx = formula.poly.ctx();
        // variables of grade above u cannot occur
        let kept: Vec<usize> = (0..ctx.nvars()).filter(|&i| ctx.vars()[i].grade <= meta.u).collect();
        let mut variables = Vec::with_capacity(kept.len());
        for &i in &kept {
            let v = &ctx.vars()[i];
            let l = letter(&v.symbol).ok_or_else(|| Error::UnknownSymbol(v.symbol.to_string()))?;
            variables.push(format!("{l}_{}", v.index));
        }
        let poly = formula.poly.clone().assert_integral()?;
        let terms = poly
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| {
                if m.iter().enumerate().any(|(i, &e)| e > 0 && !kept.contains(&i)) {
                    return Err(Error::DegreeMismatch { expected: meta.u, found: poly.grade(&m) });
                }
                Ok(Term { exponents: kept.iter().map(|&i| m[i] as u32).collect(), coefficient: c.to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        let j = meta.m + shift;
        let mut legend = vec![
            LegendEntry { var: "f".into(), rank: meta.rank_f, bundle: format!("(pi_* {})^vee", twist_name(j)) },
            LegendEntry { var: "g".into(), rank: meta.rank_g, bundle: format!("(pi_* {})^vee", twist_name(j - 1)) },
        ];
        if meta.mode == WMode::General {
            legend.push(LegendEntry { var: "w".into(), rank: 2, bundle: "W".into() });
        }
        Ok(FormulaDocument {
            schema: SCHEMA_VERSION,
            input: InputEcho {
                splitting: entered.clone(),
                normalized: meta.splitting.clone(),
                shift,
                m: Some(meta.m),
                u: meta.u,
                mode: meta.mode,
                path: Some(meta.path),
            },
            legend,
            variables,
            terms,
            note: None,
        })
    }

    /// The unit class of a balanced type.
    pub fn unit(entered: &SplittingType, shift: i64, mode: WMode) -> FormulaDocument {
        FormulaDocument {
            schema: SCHEMA_VERSION,
            input: InputEcho {
                splitting: entered.clone(),
                normalized: entered.shifted(shift),
                shift,
                m: None,
                u: 0,
                mode,
                path: None,
            },
            legend: Vec::new(),
            variables: Vec::new(),
            terms: vec![Term { exponents: Vec::new(), coefficient: "1".into() }],
            note: Some("balanced type: the closure of its stratum is the whole base".into()),
        }
    }

    pub fn from_json(s: &str) -> Result<FormulaDocument> {
        let doc: FormulaDocument =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("not a formula document: {e}")))?;
        if doc.schema != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!("schema {} is not {SCHEMA_VERSION}", doc.schema)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    fn monomial(&self, t: &Term, latex: bool) -> String {
        let mut out = Vec::new();
        for (name, &e) in self.variables.iter().zip(&t.exponents) {
            if e == 0 {
                continue;
            }
            let v = if latex { name.clone() } else { name.replace('_', "") };
            out.push(match e {
                1 => v,
                _ => format!("{v}^{e}"),
            });
        }
        out.join(if latex { "" } else { " " })
    }

    /// The polynomial alone, e.g. `4 f1^4 g1 - 8 f1^3 g1^2 + ...`.
    pub fn polynomial_text(&self) -> String {
        self.join_terms(false)
    }

    fn join_terms(&self, latex: bool) -> String {
        let mut s = String::new();
        for (k, t) in self.terms.iter().enumerate() {
            let (neg, abs) = match t.coefficient.strip_prefix('-') {
                Some(a) => (true, a),
                None => (false, t.coefficient.as_str()),
            };
            let mono = self.monomial(t, latex);
            let sep = if latex { "" } else { " " };
            let body = match (abs, mono.is_empty()) {
                (_, true) => abs.to_string(),
                ("1", false) => mono,
                (_, false) => format!("{abs}{sep}{mono}"),
            };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            s.push_str(&body);
            if latex && k + 1 < self.terms.len() && (k + 1) % 8 == 0 {
                s.push_str(" \\\\\n  &");
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json() + "\n",
            Format::Text => self.render_text(),
            Format::Latex => self.render_latex(),
        }
    }

    fn render_text(&self) -> String {
        let i = &self.input;
        let mut s = format!("splitting type: {}\n", i.splitting);
        if i.shift != 0 {
            s += &format!("normalized:     {} (shift {})\n", i.normalized, i.shift);
        }
        s += &format!("codimension u:  {}\n", i.u);
        if let Some(m) = i.m {
            s += &format!("twist m:        {m}\n");
        }
        s += &format!("W:              {}\n", i.mode);
        if let Some(p) = i.path {
            s += &format!("algorithm:      {p}\n");
        }
        for l in &self.legend {
            s += &format!("{}_i = c_i({}), rank {}", l.var, l.bundle, l.rank);
            if l.var == "w" {
                s += ", with pi_* O_PW(1) = W^vee";
            }
            s.push('\n');
        }
        if let Some(n) = &self.note {
            s += &format!("note: {n}\n");
        }
        s += &format!("class = {}\n", self.polynomial_text());
        s
    }

    fn render_latex(&self) -> String {
        let e = self.input.splitting.entries().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        format!(
            "\\begin{{align*}}\n[\\overline{{\\Sigma}}_{{({e})}}] = &\\ {}\n\\end{{align*}}\n",
            self.join_terms(true)
        )
    }

    /// Rebuilds the polynomial in the variables of `ctx` (which must carry the
    /// symbols named by the legend).
    pub fn to_poly(&self, ctx: &std::sync::Arc<crate::context::BundleContext>) -> Result<GradedPoly> {
        let mut p = GradedPoly::zero(ctx);
        for t in &self.terms {
            let c: i64 =
                t.coefficient.parse().map_err(|_| Error::InvalidArgument(format!("coefficient {}", t.coefficient)))?;
            let mut m = GradedPoly::constant(ctx, crate::rational::Rat::int(c));
            for (name, &e) in self.variables.iter().zip(&t.exponents) {
                let (l, i) = name.split_once('_').ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                let sym = l.to_uppercase();
                let i: u32 = i.parse().map_err(|_| Error::UnknownSymbol(name.clone()))?;
                m = m.mul(&ctx.chern_var(&sym, i)?.pow(e))?;
            }
            p = p.add(&m)?;
        }
        Ok(p)
    }
}

/// Reads the text form written by [`FormulaDocument::polynomial_text`], e.g.
/// `4 f1^4 g1 - 3 f5`, into `ctx` (variables `fi`, `gi`, `wi` name `c_i` of
/// `F`, `G`, `W`).
pub fn parse_polynomial(text: &str, ctx: &std::sync::Arc<crate::context::BundleContext>) -> Result<GradedPoly> {
    let bad = |tok: &str| Error::InvalidArgument(format!("cannot read {tok:?} in a polynomial"));
    let mut out = GradedPoly::zero(ctx);
    let mut term: Option<GradedPoly> = None;
    let mut sign = 1i64;
    let flush = |out: &mut GradedPoly, term: &mut Option<GradedPoly>| -> Result<()> {
        if let Some(t) = term.take() {
            *out = out.add(&t)?;
        }
        Ok(())
    };
    for tok in text.split_whitespace() {
        match tok {
            "+" | "-" => {
                flush(&mut out, &mut term)?;
                sign = if tok == "-" { -1 } else { 1 };
                continue;
            }
            _ => {}
        }
        let (tok, neg) = match tok.strip_prefix('-') {
            Some(t) => (t, true),
            None => (tok, false),
        };
        if neg {
            flush(&mut out, &mut term)?;
            sign = -1;
        }
        let cur = match term.take() {
            Some(t) => t,
            None => GradedPoly::constant(ctx, crate::rational::Rat::int(std::mem::replace(&mut sign, 1))),
        };
        let factor = if let Ok(c) = tok.parse::<i64>() {
            GradedPoly::constant(ctx, crate::rational::Rat::int(c))
        } else {
            let (var, exp) = match tok.split_once('^') {
                Some((v, e)) => (v, e.parse::<u32>().map_err(|_| bad(tok))?),
                None => (tok, 1),
            };
            let mut chars = var.chars();
            let sym = match chars.next() {
                Some('f') => "F",
                Some('g') => "G",
                Some('w') => "W",
                _ => return Err(bad(tok)),
            };
            let idx: u32 = chars.as_str().parse().map_err(|_| bad(tok))?;
            ctx.chern_var(sym, idx)?.pow(exp)
        };
        term = Some(cur.mul(&factor)?);
    }
    flush(&mut out, &mut term)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitting::{closed_formula, normalize_twist};

    #[test]
    fn rank_two_document() {
        let e: SplittingType = "-1,1".parse().unwrap();
        let f = closed_formula(2, 0, 1, WMode::Trivial).unwrap();
        let doc = FormulaDocument::new(&e, 0, &f).unwrap();
        assert_eq!(doc.variables, ["f_1", "g_1"]);
        assert_eq!(doc.polynomial_text(), "-f1 + 2 g1");
        assert_eq!(doc.legend[0].bundle, "(pi_* E(1))^vee");
        assert_eq!(doc.legend[1].bundle, "(pi_* E)^vee");
        let back = FormulaDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert!(doc.to_poly(f.poly.ctx()).unwrap().sub(&f.poly).unwrap().is_zero());
        assert!(parse_polynomial(&doc.polynomial_text(), f.poly.ctx()).unwrap().sub(&f.poly).unwrap().is_zero());
    }

    #[test]
    fn shifted_legend_names_the_original_twists() {
        let e: SplittingType = "-3,-1".parse().unwrap();
        let (n, t) = normalize_twist(&e);
        assert_eq!(t, 2);
        let f = closed_formula(2, n.degree(), 1, WMode::Trivial).unwrap();
        let doc = FormulaDocument::new(&e, t, &f).unwrap();
        assert_eq!(doc.legend[0].bundle, "(pi_* E(3))^vee");
        assert_eq!(doc.legend[1].bundle, "(pi_* E(2))^vee");
        assert!(doc.render(Format::Text).contains("shift 2"));
    }

    #[test]
    fn latex_uses_subscripts() {
        let e: SplittingType = "-1,1".parse().unwrap();
        let f = closed_formula(2, 0, 1, WMode::Trivial).unwrap();
        let tex = FormulaDocument::new(&e, 0, &f).unwrap().render(Format::Latex);
        assert!(tex.contains("[\\overline{\\Sigma}_{(-1,1)}] = &\\ -f_1 + 2g_1"), "{tex}");
    }

    #[test]
    fn unit_document() {
        let e: SplittingType = "0,0".parse().unwrap();
        let doc = FormulaDocument::unit(&e, 0, WMode::Trivial);
        assert_eq!(doc.polynomial_text(), "1");
        assert!(doc.note.is_some());
        assert_eq!(FormulaDocument::from_json(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        let e: SplittingType = "0,0".parse().unwrap();
        let json = FormulaDocument::unit(&e, 0, WMode::Trivial).to_json().replace("\"schema\": 1", "\"schema\": 99");
        assert!(FormulaDocument::from_json(&json).is_err());
    }
}
