//! Canonical text rendering shared by polynomials and demilinear polynomials.
//!
//! Output is accepted by the parser and re-parses to bit-identical
//! coefficients: `f64` display is shortest round-trip.

use num_complex::Complex64;

/// Letter rendering: x-letters are `1..=g`; h-letters (demilinear only) are
/// encoded as `g + i`.
pub(crate) fn letter_name(letter: u32, g: usize) -> String {
    let g = g as u32;
    if letter > g {
        format!("h{}", letter - g)
    } else {
        format!("x{letter}")
    }
}

/// `x1^2*x2` style rendering of a run of letters; empty renders as "".
pub(crate) fn render_letters(letters: &[u32], g: usize) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        let mut j = i + 1;
        while j < letters.len() && letters[j] == letters[i] {
            j += 1;
        }
        let name = letter_name(letters[i], g);
        if j - i == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{}", j - i));
        }
        i = j;
    }
    parts.join("*")
}

fn is_zero(x: f64) -> bool {
    x == 0.0
}

/// Splits `c` into an overall sign and a magnitude whose leading nonzero
/// part is positive.
fn signed(c: Complex64) -> (bool, Complex64) {
    let negative = if !is_zero(c.re) { c.re < 0.0 } else { c.im < 0.0 };
    (negative, if negative { -c } else { c })
}

fn render_magnitude(m: Complex64) -> String {
    match (is_zero(m.re), is_zero(m.im)) {
        (_, true) => format!("{}", m.re),
        (true, false) => format!("{}i", m.im),
        (false, false) if m.im < 0.0 => format!("({}-{}i)", m.re, -m.im),
        (false, false) => format!("({}+{}i)", m.re, m.im),
    }
}

/// Renders `Σ c·body`; an empty body denotes the constant monomial.
pub(crate) fn render_sum<'a>(terms: impl IntoIterator<Item = (Complex64, &'a str)>) -> String {
    let mut out = String::new();
    for (c, body) in terms {
        let (negative, mag) = signed(c);
        let piece = if body.is_empty() {
            render_magnitude(mag)
        } else if mag == Complex64::new(1.0, 0.0) {
            body.to_string()
        } else {
            format!("{}*{body}", render_magnitude(mag))
        };
        match (out.is_empty(), negative) {
            (true, false) => out.push_str(&piece),
            (true, true) => {
                out.push('-');
                out.push_str(&piece);
            }
            (false, false) => {
                out.push_str(" + ");
                out.push_str(&piece);
            }
            (false, true) => {
                out.push_str(" - ");
                out.push_str(&piece);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Renders a single coefficient on its own, e.g. `-1`, `2i`, `(1-2i)`.
pub fn render_coefficient(c: Complex64) -> String {
    render_sum([(c, "")])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn renders_signs_and_complex_coefficients() {
        assert_eq!(render_sum([(c(1.0, 0.0), "x1*x2"), (c(-1.0, 0.0), "x2*x1")]), "x1*x2 - x2*x1");
        assert_eq!(render_sum([(c(-2.5, 0.0), "x1")]), "-2.5*x1");
        assert_eq!(render_sum([(c(0.0, 3.0), "x1"), (c(0.0, -1.0), "")]), "3i*x1 - 1i");
        assert_eq!(render_sum([(c(1.0, -2.0), "x1")]), "(1-2i)*x1");
        assert_eq!(render_sum([(c(-1.0, 2.0), "x1")]), "-(1-2i)*x1");
        assert_eq!(render_sum(std::iter::empty()), "0");
    }

    #[test]
    fn compresses_powers() {
        assert_eq!(render_letters(&[1, 1, 2, 1], 2), "x1^2*x2*x1");
        assert_eq!(render_letters(&[1, 3, 1], 2), "x1*h1*x1");
    }
}
