//! Form cache: one text file per form.
//!
//! Header `MAASS v1 <parity> <t> <N_max> <certified_error>`, then one line
//! `<n> <a(n)>` per coefficient. Reals are written with 17 significant
//! digits, so a write followed by a read gives back the same bits.
//! Cached forms are Hecke-normalised.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use maass_core::automorphic::{MaassForm, Normalization, Parity};

use crate::error::{CliError, CliResult};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "MAASS_CACHE_DIR";
const MAGIC: &str = "MAASS";
const VERSION: &str = "v1";
const EXTENSION: &str = "maass";

/// `$MAASS_CACHE_DIR`, or `maass-cache` in the working directory.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("maass-cache"))
}

/// Serialises a form to the cache text format.
pub fn format_form(form: &MaassForm) -> String {
    let mut s = format!(
        "{MAGIC} {VERSION} {} {:.16e} {} {:.16e}\n",
        form.parity.as_str(),
        form.t,
        form.n_max(),
        form.certified_error
    );
    for (i, a) in form.coefficients.iter().enumerate() {
        s.push_str(&format!("{} {:.16e}\n", i + 1, a));
    }
    s
}

/// Parses the cache text format. `path` only labels errors.
pub fn parse_form(text: &str, path: &Path) -> CliResult<MaassForm> {
    let bad = |line: usize, reason: &str| CliError::Cache {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 6 || h[0] != MAGIC {
        return Err(bad(
            1,
            "expected `MAASS v1 <parity> <t> <N_max> <certified_error>`",
        ));
    }
    if h[1] != VERSION {
        return Err(bad(1, "unsupported cache version"));
    }
    let parity = Parity::parse(h[2]).map_err(|_| bad(1, "unknown parity"))?;
    let t: f64 = h[3].parse().map_err(|_| bad(1, "bad t"))?;
    let n_max: usize = h[4].parse().map_err(|_| bad(1, "bad N_max"))?;
    let certified_error: f64 = h[5].parse().map_err(|_| bad(1, "bad certified error"))?;
    if !(t > 0.0) || n_max == 0 {
        return Err(bad(1, "t and N_max must be positive"));
    }
    let mut coefficients = Vec::with_capacity(n_max);
    for (k, line) in lines.enumerate() {
        let ln = k + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(ln, "bad index"))?;
        let a: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(ln, "bad coefficient"))?;
        if it.next().is_some() {
            return Err(bad(ln, "trailing fields"));
        }
        if n != coefficients.len() + 1 {
            return Err(bad(ln, "coefficients out of order"));
        }
        coefficients.push(a);
    }
    if coefficients.len() != n_max {
        return Err(bad(n_max + 1, "fewer coefficients than N_max"));
    }
    Ok(MaassForm {
        parity,
        t,
        coefficients,
        normalization: Normalization::Hecke,
        certified_error,
    })
}

/// File name of a form inside the cache directory.
pub fn file_name(form: &MaassForm) -> String {
    format!("{}-{:.10}.{EXTENSION}", form.parity.as_str(), form.t)
}

/// Writes a form into `dir`, creating the directory if needed.
pub fn write_form(dir: &Path, form: &MaassForm) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(file_name(form));
    let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(format_form(form).as_bytes())
        .map_err(|e| CliError::io(&path, e))?;
    w.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Reads one cache file.
pub fn read_form(path: &Path) -> CliResult<MaassForm> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut text = String::new();
    for line in BufReader::new(file).lines() {
        text.push_str(&line.map_err(|e| CliError::io(path, e))?);
        text.push('\n');
    }
    parse_form(&text, path)
}

/// Every cached form in `dir`, sorted by parity and then `t`.
///
/// A missing or empty directory is a capacity error.
pub fn read_all(dir: &Path) -> CliResult<Vec<MaassForm>> {
    let entries = fs::read_dir(dir).map_err(|_| {
        CliError::MissingData(format!(
            "no form cache at {}; run `maass solve` first",
            dir.display()
        ))
    })?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e.map_err(|e| CliError::io(dir, e))?.path();
        if p.extension().and_then(|x| x.to_str()) == Some(EXTENSION) {
            paths.push(p);
        }
    }
    paths.sort();
    let mut forms = paths
        .iter()
        .map(|p| read_form(p))
        .collect::<CliResult<Vec<_>>>()?;
    if forms.is_empty() {
        return Err(CliError::MissingData(format!(
            "form cache {} is empty; run `maass solve` first",
            dir.display()
        )));
    }
    sort_forms(&mut forms);
    Ok(forms)
}

/// Sorts even forms before odd ones, each by increasing `t`.
pub fn sort_forms(forms: &mut [MaassForm]) {
    forms.sort_by(|a, b| {
        let pa = matches!(a.parity, Parity::Odd);
        let pb = matches!(b.parity, Parity::Odd);
        pa.cmp(&pb).then(a.t.total_cmp(&b.t))
    });
}

/// Even forms in increasing `t`.
pub fn even_forms(forms: &[MaassForm]) -> Vec<&MaassForm> {
    forms.iter().filter(|f| f.parity == Parity::Even).collect()
}
