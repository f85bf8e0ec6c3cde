//! Text format: `#key=value` provenance lines, a `d N` header, then one point
//! per line with coordinates written to 17 significant digits.

use std::io::{BufRead, Write};

use super::{PointSet, Provenance};
use crate::{Error, Result};

fn format_coord(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.16}", 0.0);
    }
    // exponent from the scientific rendering is exact, unlike log10
    let sci = format!("{x:.16e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_point_set<W: Write>(set: &PointSet, mut out: W) -> Result<()> {
    let prov = set.provenance();
    writeln!(out, "#generator={}", prov.generator)?;
    for (k, v) in &prov.params {
        writeln!(out, "#{k}={v}")?;
    }
    if let Some(seed) = prov.seed {
        writeln!(out, "#seed={seed}")?;
    }
    writeln!(out, "{} {}", set.dim(), set.len())?;
    for p in set.iter() {
        let line: Vec<String> = p.iter().map(|&x| format_coord(x)).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_point_set<R: BufRead>(input: R) -> Result<PointSet> {
    let mut provenance = Provenance::default();
    let mut header: Option<(usize, usize)> = None;
    let mut coords = Vec::new();
    let parse_err = |line: usize, message: String| Error::Parse { line, message };

    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(kv) = line.strip_prefix('#') {
            let Some((k, v)) = kv.split_once('=') else {
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            match k {
                "generator" => provenance.generator = v.to_string(),
                "seed" => {
                    provenance.seed = Some(
                        v.parse()
                            .map_err(|e| parse_err(lineno, format!("bad seed: {e}")))?,
                    )
                }
                _ => {
                    provenance.params.insert(k.to_string(), v.to_string());
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(parse_err(lineno, "expected header 'd N'".into()));
                }
                let d = fields[0]
                    .parse()
                    .map_err(|e| parse_err(lineno, format!("bad dimension: {e}")))?;
                let n = fields[1]
                    .parse()
                    .map_err(|e| parse_err(lineno, format!("bad point count: {e}")))?;
                header = Some((d, n));
            }
            Some((d, _)) => {
                if fields.len() != d {
                    return Err(parse_err(
                        lineno,
                        format!("expected {d} coordinates, found {}", fields.len()),
                    ));
                }
                for f in fields {
                    coords.push(
                        f.parse::<f64>()
                            .map_err(|e| parse_err(lineno, format!("bad coordinate: {e}")))?,
                    );
                }
            }
        }
    }
    let (d, n) = header.ok_or_else(|| parse_err(0, "missing header".into()))?;
    if d == 0 || coords.len() != d * n {
        return Err(parse_err(
            0,
            format!(
                "header promises {n} points, found {}",
                coords.len() / d.max(1)
            ),
        ));
    }
    PointSet::from_flat(d, coords, provenance)
}
