//! Comma lists with optional inclusive integer ranges: `1,3,5`, `2..6`,
//! `-3..-1,4`.

pub fn parse_ints(text: &str) -> Result<Vec<i64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = split_range(item) {
            let lo: i64 = lo
                .parse()
                .map_err(|_| format!("bad range start in '{item}'"))?;
            let hi: i64 = hi
                .parse()
                .map_err(|_| format!("bad range end in '{item}'"))?;
            if hi < lo {
                return Err(format!("empty range '{item}'"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(item.parse().map_err(|_| format!("bad integer '{item}'"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

pub fn parse_floats(text: &str) -> Result<Vec<f64>, String> {
    let out = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("bad number '{s}'"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

pub fn parse_sites(text: &str) -> Result<Vec<u64>, String> {
    parse_ints(text)?
        .into_iter()
        .map(|v| {
            u64::try_from(v)
                .ok()
                .filter(|&v| v >= 1)
                .ok_or(format!("site {v} must be >= 1"))
        })
        .collect()
}

/// Splits at the `..` that is not part of a leading sign.
fn split_range(item: &str) -> Option<(&str, &str)> {
    let pos = item.get(1..)?.find("..")? + 1;
    Some((&item[..pos], &item[pos + 2..]))
}

/// `start, start + step, …` up to `stop` (inclusive within rounding).
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    let ordered = step > 0.0 && stop >= start;
    if !ordered || !start.is_finite() || !stop.is_finite() {
        return Err(format!("bad grid {start}..{stop} step {step}"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(format!("grid of {n} points is too large"));
    }
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}
