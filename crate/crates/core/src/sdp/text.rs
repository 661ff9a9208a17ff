//! Plain-text dump/load in the SDPA sparse layout:
//!
//! ```text
//! m
//! nblocks
//! n_1 n_2 ...
//! b_1 ... b_m
//! j block i k v      (j = 0 for the objective, indices 1-based, i ≤ k)
//! ```
//!
//! SDPA reads the file as max ⟨F0,Y⟩ s.t. ⟨F_j,Y⟩ = c_j, which is the
//! primal here. A negative block size −k stands for k scalar blocks.

use super::{Entry, SdpProblem};
use crate::error::{Error, Result};
use std::fmt::Write;

pub fn dump(p: &SdpProblem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", p.m());
    let _ = writeln!(s, "{}", p.blocks.len());
    let sizes: Vec<String> = p.blocks.iter().map(|n| n.to_string()).collect();
    let _ = writeln!(s, "{}", sizes.join(" "));
    let rhs: Vec<String> = p.constraints.iter().map(|c| format!("{:e}", c.rhs)).collect();
    let _ = writeln!(s, "{}", rhs.join(" "));
    let mut put = |j: usize, entries: &[Entry]| {
        for e in entries {
            let _ = writeln!(s, "{} {} {} {} {:e}", j, e.block + 1, e.i + 1, e.j + 1, e.v);
        }
    };
    put(0, &p.objective);
    for (j, c) in p.constraints.iter().enumerate() {
        put(j + 1, &c.entries);
    }
    s
}

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

pub fn load(text: &str) -> Result<SdpProblem> {
    let mut tokens = text
        .lines()
        .map(|l| l.split(['"', '*']).next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '(' || c == ')'))
        .filter(|t| !t.is_empty());
    let mut next = |what: &str| tokens.next().ok_or_else(|| Error::Parse(format!("missing {what}")));
    let int = |t: &str| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad integer {t:?}")));
    let real = |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?}")));

    let m = int(next("m")?)?;
    let nb = int(next("block count")?)?;
    if m < 0 || nb < 0 {
        return parse_err("negative counts");
    }
    // (first internal block, size, diagonal?)
    let mut layout = Vec::new();
    let mut blocks = Vec::new();
    for _ in 0..nb {
        let n = int(next("block size")?)?;
        if n == 0 {
            return parse_err("zero block size");
        }
        if n > 0 {
            layout.push((blocks.len(), n as usize, false));
            blocks.push(n as usize);
        } else {
            layout.push((blocks.len(), n.unsigned_abs() as usize, true));
            blocks.extend(std::iter::repeat(1).take(n.unsigned_abs() as usize));
        }
    }
    let mut p = SdpProblem::new(blocks);
    for _ in 0..m {
        let b = real(next("rhs")?)?;
        p.add_constraint(Vec::new(), b);
    }
    let rest: Vec<&str> = tokens.collect();
    if rest.len() % 5 != 0 {
        return parse_err("entry lines must have five fields");
    }
    for f in rest.chunks(5) {
        let (j, blk, i, k, v) = (int(f[0])?, int(f[1])?, int(f[2])?, int(f[3])?, real(f[4])?);
        if j < 0 || j > m || blk < 1 || blk > nb || i < 1 || k < 1 {
            return parse_err(format!("entry out of range: {}", f.join(" ")));
        }
        let (first, size, diag) = layout[blk as usize - 1];
        let (i, k) = (i as usize - 1, k as usize - 1);
        if i >= size || k >= size {
            return parse_err(format!("index beyond block size: {}", f.join(" ")));
        }
        let e = if diag {
            if i != k {
                return parse_err("off-diagonal entry in a diagonal block");
            }
            Entry::new(first + i, 0, 0, v)
        } else {
            Entry::new(first, i, k, v)
        };
        if j == 0 {
            p.objective.push(e);
        } else {
            p.constraints[j as usize - 1].entries.push(e);
        }
    }
    Ok(p)
}
