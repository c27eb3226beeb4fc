//! Test-side reader for the polynomial notation of the published tables.
#![allow(dead_code)]

use splitloci::GradedPoly;

/// Reader for polynomials written like `4f_1^4g_1 - 3f_5`, the
/// notation of the published tables.
pub fn parse_fg(src: &str, ctx: &std::sync::Arc<splitloci::BundleContext>) -> GradedPoly {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('-', "+-");
    let mut total = GradedPoly::zero(ctx);
    for term in s.split('+').filter(|t| !t.is_empty()) {
        let (neg, body) = match term.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, term),
        };
        let cut = body.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(body.len());
        let coeff: i64 = if cut == 0 { 1 } else { body[..cut].parse().unwrap() };
        let mut p = GradedPoly::constant(ctx, splitloci::Rat::int(if neg { -coeff } else { coeff }));
        let mut rest = &body[cut..];
        while !rest.is_empty() {
            let sym = if rest.starts_with('f') { "F" } else { "G" };
            let idx: u32 = rest[2..3].parse().unwrap();
            rest = &rest[3..];
            let mut exp = 1;
            if let Some(r) = rest.strip_prefix('^') {
                exp = r[..1].parse().unwrap();
                rest = &r[1..];
            }
            p = p.mul(&ctx.chern_var(sym, idx).unwrap().pow(exp)).unwrap();
        }
        total = total.add(&p).unwrap();
    }
    total
}

pub const FLAGSHIP: &str =
    "4f_1^4g_1 - 8f_1^3g_1^2 + 4f_1^2g_1^3 - 3f_1^3f_2 - 6f_1^2f_2g_1 + 13f_1f_2g_1^2 - 4f_2g_1^3 + 8f_1^2g_1g_2
    - 8f_1g_1^2g_2 + 6f_1f_2^2 + 3f_1^2f_3 - 2f_2^2g_1 + 2f_1f_3g_1 - 5f_3g_1^2 - 6f_1f_2g_2 - 2f_2g_1g_2
    + 4g_1g_2^2 - 8f_1g_1g_3 + 8g_1^2g_3 - 6f_2f_3 - 3f_1f_4 + 2f_4g_1 + 6f_3g_2 + 6f_2g_3 - 6g_2g_3
    + 2g_1g_4 + 3f_5 - 6g_5";
