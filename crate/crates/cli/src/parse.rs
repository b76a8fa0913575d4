//! Value parsers for list, range and rate arguments.

/// Parses `3..13`, `3,5,7` or a mix such as `3..9,13`. Ranges keep odd values only.
pub fn distances(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let lo: usize = a.trim().parse().map_err(|_| format!("bad range start '{a}'"))?;
            let hi: usize = b.trim().parse().map_err(|_| format!("bad range end '{b}'"))?;
            if lo > hi {
                return Err(format!("empty range '{part}'"));
            }
            out.extend((lo..=hi).filter(|d| d % 2 == 1));
        } else {
            let d: usize = part.parse().map_err(|_| format!("bad distance '{part}'"))?;
            if d.is_multiple_of(2) {
                return Err(format!("distance {d} is even; code distances must be odd"));
            }
            out.push(d);
        }
    }
    if out.is_empty() {
        return Err(format!("no odd distances in '{s}'"));
    }
    Ok(out)
}

/// A probability given as a decimal (`0.005`) or a percentage (`0.5%`).
pub fn rate(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.strip_suffix('%') {
        Some(pct) => pct.trim().parse::<f64>().map(|v| v / 100.0),
        None => s.parse::<f64>(),
    }
    .map_err(|_| format!("bad rate '{s}'"))?;
    if !(0.0..=1.0).contains(&value) {
        return Err(format!("rate {s} outside [0, 1]"));
    }
    Ok(value)
}

pub fn rates(s: &str) -> Result<Vec<f64>, String> {
    let out = s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(rate).collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err("no rates given".into());
    }
    Ok(out)
}

pub fn decoders(s: &str) -> Result<Vec<clique_core::Decoder>, String> {
    let mut out: Vec<clique_core::Decoder> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let d = part.parse().map_err(|e: clique_core::CliqueError| e.to_string())?;
        if !out.contains(&d) {
            out.push(d);
        }
    }
    if out.is_empty() {
        return Err("no decoders given".into());
    }
    Ok(out)
}

/// Inclusive `lo..hi` window.
pub fn window(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected lo..hi, got '{s}'"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo = a.trim().parse().map_err(|_| format!("bad window start '{a}'"))?;
    let hi = b.trim().parse().map_err(|_| format!("bad window end '{b}'"))?;
    if lo > hi {
        return Err(format!("empty window '{s}'"));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_ranges_keep_odd_values() {
        assert_eq!(distances("3..13").unwrap(), vec![3, 5, 7, 9, 11, 13]);
        assert_eq!(distances("4..8").unwrap(), vec![5, 7]);
        assert_eq!(distances("3..7,11").unwrap(), vec![3, 5, 7, 11]);
        assert_eq!(distances("3..=5").unwrap(), vec![3, 5]);
        assert!(distances("4").is_err());
        assert!(distances("9..3").is_err());
        assert!(distances("x").is_err());
    }

    #[test]
    fn rates_accept_percent() {
        assert_eq!(rates("0.001,0.5%").unwrap(), vec![0.001, 0.005]);
        assert_eq!(rate("10%").unwrap(), 0.1);
        assert!(rate("150%").is_err());
        assert!(rate("-0.1").is_err());
        assert!(rate("abc").is_err());
    }

    #[test]
    fn decoder_lists_dedupe() {
        use clique_core::Decoder;
        assert_eq!(decoders("l1,l2,l1").unwrap(), vec![Decoder::L1, Decoder::L2]);
        assert!(decoders("l3").is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(window("9..19").unwrap(), (9, 19));
        assert!(window("19").is_err());
    }
}
