//! Plain-text formats: weight descriptors, measure blocks, polynomial
//! shorthand and `key = value` scenario configs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::analytic::TaylorSeries;
use crate::error::{Error, Result};
use crate::measures::ComplexMeasure;
use crate::weights::RadialWeight;

impl FromStr for RadialWeight {
    type Err = Error;

    /// Accepts full descriptors (`kind=standard alpha=1`,
    /// `kind=wderived x=2 base=(kind=standard alpha=0)`) and the shorthands
    /// `const`, `standard:A`, `power:B`, `w:X:<base>`, `plus:<base>`.
    fn from_str(s: &str) -> Result<Self> {
        parse_weight(s, Path::new("."))
    }
}

/// Parses a weight descriptor; relative `samples=` paths resolve against `dir`.
pub fn parse_weight(text: &str, dir: &Path) -> Result<RadialWeight> {
    let s = strip_parens(text.trim());
    if s.is_empty() {
        return Err(Error::parse(0, "empty weight descriptor"));
    }
    if !s.contains('=') {
        return parse_weight_shorthand(s, dir);
    }
    let fields = split_fields(s)?;
    let get = |key: &str| -> Result<&str> {
        fields
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::parse(0, format!("weight descriptor `{s}` lacks `{key}=`")))
    };
    let num = |key: &str| -> Result<f64> {
        let v = get(key)?;
        v.parse()
            .map_err(|_| Error::parse(0, format!("`{key}={v}` is not a number")))
    };
    match get("kind")? {
        "const" | "constant" => Ok(RadialWeight::constant()),
        "standard" => RadialWeight::standard(num("alpha")?),
        "power" => RadialWeight::power(num("beta")?),
        "wderived" => RadialWeight::weight_w(num("x")?, &parse_weight(get("base")?, dir)?),
        "omegaplus" => Ok(RadialWeight::omega_plus(&parse_weight(get("base")?, dir)?)),
        "custom" => {
            let path = resolve(dir, get("samples")?);
            RadialWeight::load_samples(&path)
        }
        other => Err(Error::parse(0, format!("unknown weight kind `{other}`"))),
    }
}

fn parse_weight_shorthand(s: &str, dir: &Path) -> Result<RadialWeight> {
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    let number = |v: &str| -> Result<f64> {
        v.trim()
            .parse()
            .map_err(|_| Error::parse(0, format!("bad number `{v}` in weight `{s}`")))
    };
    match head {
        "const" | "constant" | "1" => Ok(RadialWeight::constant()),
        "standard" => RadialWeight::standard(number(rest)?),
        "power" => RadialWeight::power(number(rest)?),
        "w" => {
            let (x, base) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(0, format!("expected `w:X:<base>`, got `{s}`")))?;
            RadialWeight::weight_w(number(x)?, &parse_weight(base, dir)?)
        }
        "plus" => Ok(RadialWeight::omega_plus(&parse_weight(rest, dir)?)),
        "samples" => RadialWeight::load_samples(&resolve(dir, rest)),
        _ => Err(Error::parse(0, format!("unknown weight `{s}`"))),
    }
}

fn resolve(dir: &Path, p: &str) -> PathBuf {
    let p = Path::new(p.trim());
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

fn strip_parens(s: &str) -> &str {
    let mut s = s;
    while s.starts_with('(') && s.ends_with(')') && balanced(&s[1..s.len() - 1]) {
        s = s[1..s.len() - 1].trim();
    }
    s
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// `key=value` fields separated by whitespace; values may be parenthesized.
fn split_fields(s: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut chars = s.char_indices().peekable();
    while let Some(&(start, ch)) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
            continue;
        }
        let mut eq = None;
        let mut end = s.len();
        let mut depth = 0;
        while let Some(&(i, c)) = chars.peek() {
            match c {
                '=' if eq.is_none() => eq = Some(i),
                '(' => depth += 1,
                ')' => depth -= 1,
                c if c.is_whitespace() && depth == 0 => {
                    end = i;
                    break;
                }
                _ => {}
            }
            chars.next();
        }
        let eq = eq.ok_or_else(|| Error::parse(0, format!("expected key=value, got `{}`", &s[start..end])))?;
        out.insert(s[start..eq].to_string(), strip_parens(&s[eq + 1..end]).to_string());
    }
    Ok(out)
}

/// Parses the measure block format: `atom re(z) im(z) re(c) im(c)` lines and
/// at most one `density weight=<descriptor> coeffs=<path>` line. `#` starts a
/// comment.
pub fn parse_measure(text: &str, dir: &Path) -> Result<ComplexMeasure> {
    let mut mu = ComplexMeasure::zero();
    let mut seen_density = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match head {
            "atom" => {
                let v: Vec<f64> = rest
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::parse(line_no, "atom needs four numbers"))?;
                if v.len() != 4 {
                    return Err(Error::parse(
                        line_no,
                        format!("atom needs four numbers, got {}", v.len()),
                    ));
                }
                mu = mu
                    .with_atom(C64::new(v[0], v[1]), C64::new(v[2], v[3]))
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
            }
            "density" => {
                if seen_density {
                    return Err(Error::parse(line_no, "only one density line is allowed"));
                }
                seen_density = true;
                let fields = split_fields(rest).map_err(|e| Error::parse(line_no, e.to_string()))?;
                let w = fields
                    .get("weight")
                    .ok_or_else(|| Error::parse(line_no, "density needs weight="))?;
                let w = parse_weight(w, dir).map_err(|e| Error::parse(line_no, e.to_string()))?;
                let h = match (fields.get("coeffs"), fields.get("h")) {
                    (Some(p), _) => TaylorSeries::read_csv(&resolve(dir, p))?,
                    (None, Some(expr)) => parse_polynomial(expr).map_err(|e| Error::parse(line_no, e.to_string()))?,
                    _ => return Err(Error::parse(line_no, "density needs coeffs= or h=")),
                };
                mu = mu.with_density(h, &w);
            }
            other => return Err(Error::parse(line_no, format!("unknown measure line `{other}`"))),
        }
    }
    Ok(mu)
}

/// Inverse of [`parse_measure`]; a density is written with the `h=` form when
/// `coeffs_path` is `None`.
pub fn format_measure(mu: &ComplexMeasure, coeffs_path: Option<&str>) -> String {
    let mut out = String::new();
    for (z, c) in mu.atoms() {
        out.push_str(&format!("atom {:?} {:?} {:?} {:?}\n", z.re, z.im, c.re, c.im));
    }
    if let Some(d) = mu.density() {
        let w = d.base.descriptor();
        match coeffs_path {
            Some(p) => out.push_str(&format!("density weight=({w}) coeffs={p}\n")),
            None => out.push_str(&format!("density weight=({w}) h={}\n", format_polynomial(&d.h))),
        }
    }
    out
}

/// Writes a polynomial in the shorthand accepted by [`parse_polynomial`].
pub fn format_polynomial(f: &TaylorSeries) -> String {
    let terms: Vec<String> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() != 0.0)
        .map(|(n, c)| format!("({:?}{:+?}i)z^{n}", c.re, c.im))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Parses polynomial shorthand: `z2`, `1+0.5z`, `3z^4 - 2i z`,
/// `(1-0.5i)z3`. No spaces are significant.
pub fn parse_polynomial(text: &str) -> Result<TaylorSeries> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::parse(0, "empty polynomial"));
    }
    let bytes = s.as_bytes();
    let mut coeffs: Vec<C64> = vec![C64::new(0.0, 0.0)];
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1.0;
        while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        }
        let start = i;
        let coeff = if i < bytes.len() && bytes[i] == b'(' {
            let close = s[i..]
                .find(')')
                .ok_or_else(|| Error::parse(0, format!("unclosed parenthesis in `{text}`")))?;
            let c = parse_complex(&s[i + 1..i + close])?;
            i += close + 1;
            c
        } else {
            let mut j = i;
            while j < bytes.len()
                && bytes[j] != b'z'
                && !(j > i && (bytes[j] == b'+' || bytes[j] == b'-') && bytes[j - 1] != b'e')
            {
                j += 1;
            }
            let c = if j == i {
                C64::new(1.0, 0.0)
            } else {
                parse_complex(&s[i..j])?
            };
            i = j;
            c
        };
        let mut power = 0usize;
        if i < bytes.len() && bytes[i] == b'z' {
            i += 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
            }
            let d0 = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            power = if d0 == i {
                1
            } else {
                s[d0..i].parse().map_err(|_| Error::parse(0, "bad exponent"))?
            };
        } else if start == i {
            return Err(Error::parse(0, format!("cannot parse `{text}`")));
        }
        if i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            return Err(Error::parse(
                0,
                format!("unexpected `{}` in `{text}`", bytes[i] as char),
            ));
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, C64::new(0.0, 0.0));
        }
        coeffs[power] += coeff * sign;
    }
    Ok(TaylorSeries::new(coeffs))
}

/// `a`, `bi`, `a+bi`, `i`, `-2.5e-3-1i`.
fn parse_complex(s: &str) -> Result<C64> {
    let bad = || Error::parse(0, format!("bad complex number `{s}`"));
    let num = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse().map_err(|_| bad()),
        }
    };
    if let Some(body) = s.strip_suffix('i') {
        let b = body.as_bytes();
        let split = (1..b.len())
            .rev()
            .find(|&k| (b[k] == b'+' || b[k] == b'-') && b[k - 1] != b'e' && b[k - 1] != b'E');
        return match split {
            Some(k) => Ok(C64::new(num(&body[..k])?, num(&body[k..])?)),
            None => Ok(C64::new(0.0, num(body)?)),
        };
    }
    Ok(C64::new(s.parse().map_err(|_| bad())?, 0.0))
}

/// A parsed `key = value` config: `[section]` headers, `#` comments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, (usize, String)>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        let mut current = String::new();
        cfg.sections.entry(current.clone()).or_default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::parse(line_no, "section header must end with `]`"))?;
                current = name.trim().to_string();
                if current.is_empty() {
                    return Err(Error::parse(line_no, "empty section name"));
                }
                cfg.sections.entry(current.clone()).or_default();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, format!("expected `key = value`, got `{line}`")))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::parse(line_no, "empty key"));
            }
            let sec = cfg.sections.get_mut(&current).expect("section exists");
            if sec.insert(k.to_string(), (line_no, v.trim().to_string())).is_some() {
                return Err(Error::parse(line_no, format!("duplicate key `{k}`")));
            }
        }
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Names of sections in sorted order; `""` is the top level.
    pub fn sections(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    pub fn section(&self, name: &str) -> Option<&BTreeMap<String, (usize, String)>> {
        self.sections.get(name)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|(_, v)| v.as_str())
    }

    /// Parses `section.key` with `FromStr`, reporting the source line on failure.
    pub fn parse_value<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.sections.get(section).and_then(|s| s.get(key)) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| Error::parse(*line, format!("`{key} = {v}`: {e}"))),
        }
    }

    /// Comma-separated list value.
    pub fn parse_list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        match self.sections.get(section).and_then(|s| s.get(key)) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse()
                        .map_err(|e| Error::parse(*line, format!("`{key}`: `{t}`: {e}")))
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    pub fn line_of(&self, section: &str, key: &str) -> usize {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .map(|(l, _)| *l)
            .unwrap_or(0)
    }
}

/// Escapes a field for CSV output.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_descriptors_round_trip() {
        for s in [
            "kind=standard alpha=1",
            "kind=power beta=0.5",
            "kind=wderived x=2 base=(kind=standard alpha=0)",
            "kind=omegaplus base=(kind=wderived x=1.5 base=(kind=standard alpha=2))",
        ] {
            let w: RadialWeight = s.parse().unwrap();
            assert_eq!(w.descriptor(), s);
            let again: RadialWeight = w.descriptor().parse().unwrap();
            assert_eq!(again.descriptor(), s);
        }
    }

    #[test]
    fn weight_shorthand() {
        let w: RadialWeight = "standard:1".parse().unwrap();
        assert!((w.tail(0.0).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        let c: RadialWeight = "const".parse().unwrap();
        assert!((c.moment(1.0).unwrap() - 0.5).abs() < 1e-15);
        let w2: RadialWeight = "w:2:const".parse().unwrap();
        assert_eq!(w2.descriptor(), "kind=wderived x=2 base=(kind=standard alpha=0)");
        assert!("banana".parse::<RadialWeight>().is_err());
        assert!("standard:-3".parse::<RadialWeight>().is_err());
    }

    #[test]
    fn polynomial_shorthand() {
        let p = parse_polynomial("z2").unwrap();
        assert_eq!(p, TaylorSeries::from_real(&[0.0, 0.0, 1.0]));
        let p = parse_polynomial("1+0.5z").unwrap();
        assert_eq!(p, TaylorSeries::from_real(&[1.0, 0.5]));
        let p = parse_polynomial("3z^4 - 2i z").unwrap();
        assert_eq!(p.coeff(4), C64::new(3.0, 0.0));
        assert_eq!(p.coeff(1), C64::new(0.0, -2.0));
        let p = parse_polynomial("(1-0.5i)z3 - z").unwrap();
        assert_eq!(p.coeff(3), C64::new(1.0, -0.5));
        assert_eq!(p.coeff(1), C64::new(-1.0, 0.0));
        let p = parse_polynomial("1e-3z").unwrap();
        assert_eq!(p.coeff(1), C64::new(1e-3, 0.0));
        assert!(parse_polynomial("z*").is_err());
        let f = TaylorSeries::new(vec![C64::new(0.25, -1.0), C64::new(0.0, 0.0), C64::new(-3.0, 0.5)]);
        assert_eq!(parse_polynomial(&format_polynomial(&f)).unwrap(), f);
    }

    #[test]
    fn measure_block_round_trip() {
        let text = "# two atoms and a density\natom 0.5 0 1 0\natom 0 -0.25 0.5 2\ndensity weight=(kind=standard alpha=1) h=1+2z\n";
        let mu = parse_measure(text, Path::new(".")).unwrap();
        assert_eq!(mu.atoms().len(), 2);
        let back = parse_measure(&format_measure(&mu, None), Path::new(".")).unwrap();
        assert_eq!(mu.moments(6), back.moments(6));
        let err = parse_measure("atom 1 2 3\n", Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        assert!(parse_measure("atom 1.5 0 1 0", Path::new(".")).is_err());
    }

    #[test]
    fn config_diagnostics() {
        let cfg = Config::parse("seed = 7\n[theorem1]\np = 4\nladder = 16, 32\n").unwrap();
        assert_eq!(cfg.parse_value::<u64>("", "seed").unwrap(), Some(7));
        assert_eq!(
            cfg.parse_list::<usize>("theorem1", "ladder").unwrap(),
            Some(vec![16, 32])
        );
        let err = Config::parse("a = 1\nnonsense\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let cfg = Config::parse("[x]\np = four\n").unwrap();
        let err = cfg.parse_value::<f64>("x", "p").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
