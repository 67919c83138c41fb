//! LaTeX rendering of formal expansions.

use num_traits::{One, Signed};

use super::poly::Poly;
use super::polymatrix::PolyMatrix;
use super::term::{Domain, FormalExpansion, FormalTerm, Kind};
use crate::exactnum::Rational;

/// `m12'` becomes `m_{12}'`, `_s1` becomes `s_{1}`.
pub fn symbol_latex(name: &str) -> String {
    let name = name.trim_start_matches('_');
    let primes = name.len() - name.trim_end_matches('\'').len();
    let core = &name[..name.len() - primes];
    let split = core.find(|c: char| c.is_ascii_digit() || c == '_').unwrap_or(core.len());
    let (stem, tail) = core.split_at(split);
    let tail = tail.trim_start_matches('_');
    let mut s = if tail.is_empty() { stem.to_string() } else { format!("{stem}_{{{tail}}}") };
    s.push_str(&"'".repeat(primes));
    s
}

fn rat_latex(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("\\tfrac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn factors(m: &[(String, i32)], sign: i32) -> String {
    m.iter()
        .filter(|(_, e)| e.signum() == sign)
        .map(|(v, e)| {
            let e = e.abs();
            if e == 1 {
                symbol_latex(v)
            } else {
                format!("{}^{{{e}}}", symbol_latex(v))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn poly_latex(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let num = factors(m, 1);
        let den = factors(m, -1);
        let coeff = if a.is_one() && !num.is_empty() { String::new() } else { rat_latex(&a) };
        let top = [coeff, num].into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join(" ");
        if den.is_empty() {
            out.push_str(&top);
        } else {
            out.push_str(&format!("{top}/{den}"));
        }
    }
    out
}

/// Small matrix with empty cells for zeros.
pub fn matrix_latex(m: &PolyMatrix) -> String {
    let rows: Vec<String> = (0..m.size())
        .map(|i| {
            (0..m.size())
                .map(|j| {
                    let p = m.get(i, j);
                    if p.is_zero() {
                        String::new()
                    } else {
                        poly_latex(p)
                    }
                })
                .collect::<Vec<_>>()
                .join(" & ")
        })
        .collect();
    format!("\\begin{{psmallmatrix}} {} \\end{{psmallmatrix}}", rows.join(" \\\\ "))
}

fn partition_latex(parts: &[usize]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < parts.len() {
        let mut j = i;
        while j < parts.len() && parts[j] == parts[i] {
            j += 1;
        }
        let k = j - i;
        out.push_str(&if k == 1 { parts[i].to_string() } else { format!("{}^{k}", parts[i]) });
        i = j;
    }
    format!("({out})")
}

fn head(kind: &Kind, charges: &[String]) -> (String, bool) {
    let joined = charges.join(", ");
    match kind {
        Kind::WN4 => ("W_N".into(), true),
        Kind::WNprime4 => ("W_{N'}".into(), true),
        Kind::Forbit(p) => (format!("F_{{{}}}", partition_latex(p.parts())), true),
        Kind::FpartialSum22 => ("F_{[2^2]}".into(), true),
        Kind::WN3 => (format!("W_{{\\psi_{{{joined}}}}}"), false),
        Kind::WZ3 => (format!("W_{{\\psi_{{\\mathcal{{Z}}, {joined}}}}}"), false),
        Kind::Fmin3 => ("F_{\\mathcal{O}_\\text{min}}".into(), true),
        Kind::Freg3 => ("F_{\\mathcal{O}_\\text{reg}}".into(), true),
        Kind::FU3 => (format!("F_{{U, {joined}}}"), false),
        Kind::ConstantTerm(_) => ("E_0".into(), false),
    }
}

pub fn term_latex(t: &FormalTerm) -> String {
    let mut out = String::new();
    let free: Vec<String> =
        t.sums.iter().filter(|(_, d)| **d == Domain::Free).map(|(s, _)| symbol_latex(s)).collect();
    let nonzero: Vec<String> =
        t.sums.iter().filter(|(_, d)| **d == Domain::NonZero).map(|(s, _)| symbol_latex(s)).collect();
    if !nonzero.is_empty() {
        out.push_str(&format!("\\sum_{{{} \\neq 0}} ", nonzero.join(", ")));
    }
    if !free.is_empty() {
        out.push_str(&format!("\\sum_{{{}}} ", free.join(", ")));
    }
    if !t.integrals.is_empty() {
        out.push_str("\\int ");
    }
    let charges: Vec<String> = t.slots.iter().map(|s| poly_latex(&s.value())).collect();
    let (name, inline) = head(&t.kind, &charges);
    let mut args = vec!["\\chi".to_string()];
    if inline {
        args.extend(charges);
    }
    let g: String = t.translate.iter().map(|m| matrix_latex(m) + " ").collect::<String>() + "g";
    out.push_str(&format!("{name}({}; {g})", args.join(", ")));
    if !t.integrals.is_empty() {
        let d: Vec<String> = t.integrals.iter().map(|u| format!("d{}", symbol_latex(u))).collect();
        out.push_str(&format!(" \\, {}", d.join(" \\, ")));
    }
    out
}

pub fn expansion_latex(e: &FormalExpansion) -> String {
    if e.is_empty() {
        return "0".into();
    }
    e.terms.iter().map(term_latex).collect::<Vec<_>>().join("\n+ ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expand::rules::parse_term;

    #[test]
    fn renders_like_a_display() {
        assert_eq!(symbol_latex("m12'"), "m_{12}'");
        assert_eq!(symbol_latex("_s1"), "s_{1}");
        assert_eq!(poly_latex(&Poly::parse("m4 - m2*m3/m1'").unwrap()), "-m_{2} m_{3}/m_{1}' + m_{4}");
        let t = parse_term(Kind::WN4, &["0", "m4'", "0"])
            .unwrap()
            .with_translate(vec![PolyMatrix::parse("0,1;1,a").unwrap()])
            .summed("a", Domain::Free);
        assert_eq!(
            term_latex(&t),
            "\\sum_{a} W_N(\\chi, 0, m_{4}', 0; \\begin{psmallmatrix}  & 1 \\\\ 1 & a \\end{psmallmatrix} g)"
        );
        assert_eq!(partition_latex(&[2, 1, 1]), "(21^2)");
    }
}
