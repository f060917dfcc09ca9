//! Plain-text loop files: one node per line `x0 x1 x2 x3`, loops separated by
//! blank lines, orientation given by line order. Lines starting with `#` are
//! comments.

use std::fmt::Write as _;
use std::path::Path;

use relhel_core::core4::FourVector;
use relhel_core::filaments::LoopPolyline;

use crate::RunError;

pub fn parse(text: &str) -> Result<Vec<LoopPolyline>, RunError> {
    let mut loops = Vec::new();
    let mut nodes: Vec<FourVector> = Vec::new();
    let flush = |nodes: &mut Vec<FourVector>, loops: &mut Vec<LoopPolyline>, line: usize| -> Result<(), RunError> {
        if nodes.is_empty() {
            return Ok(());
        }
        let stamp = nodes[0].components[0];
        let lp = LoopPolyline::new(std::mem::take(nodes), stamp)
            .map_err(|e| RunError::Config(format!("loop ending before line {line}: {e}")))?;
        loops.push(lp);
        Ok(())
    };
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            flush(&mut nodes, &mut loops, k + 1)?;
            continue;
        }
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| RunError::Config(format!("line {}: {e}", k + 1)))?;
        let c: [f64; 4] =
            vals.try_into().map_err(|_| RunError::Config(format!("line {}: expected 4 coordinates", k + 1)))?;
        nodes.push(FourVector::contravariant(c));
    }
    flush(&mut nodes, &mut loops, text.lines().count() + 1)?;
    if loops.is_empty() {
        return Err(RunError::Config("polyline file holds no loops".into()));
    }
    Ok(loops)
}

pub fn read_file(path: &Path) -> Result<Vec<LoopPolyline>, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    parse(&text)
}

/// Inverse of [`parse`]; values round-trip exactly.
pub fn format(loops: &[LoopPolyline]) -> String {
    let mut out = String::new();
    for (i, lp) in loops.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for n in lp.nodes() {
            let [a, b, c, d] = n.components;
            let _ = writeln!(out, "{a:?} {b:?} {c:?} {d:?}");
        }
    }
    out
}
