//! CSV reporting contract: one row per reported scalar or component,
//! columns `experiment,label,component,estimate,stderr,N,seed,dt,T,model,
//! verdict`. Sweep runs prepend a `sweep` column. Numbers use Rust's
//! shortest round-trip formatting, so identical runs produce identical
//! bytes.

use crate::report::CsvRow;

pub const HEADER: &str = "experiment,label,component,estimate,stderr,N,seed,dt,T,model,verdict";

fn field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn format_row(r: &CsvRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        field(&r.experiment),
        field(&r.label),
        field(&r.component),
        r.estimate,
        r.stderr,
        r.n,
        r.seed,
        r.dt,
        r.t,
        field(&r.model),
        r.verdict.as_str()
    )
}

pub fn to_csv(rows: &[CsvRow]) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format_row(r));
        s.push('\n');
    }
    s
}

/// Sweep variant with a leading `sweep` column holding the parameter value.
pub fn to_sweep_csv(rows: &[(String, CsvRow)]) -> String {
    let mut s = String::from("sweep,");
    s.push_str(HEADER);
    s.push('\n');
    for (sweep, r) in rows {
        s.push_str(&field(sweep));
        s.push(',');
        s.push_str(&format_row(r));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    #[test]
    fn rows_format_deterministically() {
        let r = CsvRow {
            experiment: "ibp".into(),
            label: "combo,1".into(),
            component: "diff".into(),
            estimate: 0.1234567890123,
            stderr: 1e-4,
            n: 1000,
            seed: 42,
            dt: 0.001,
            t: 1.0,
            model: "euclidean2".into(),
            verdict: Verdict::Holds,
        };
        let line = format_row(&r);
        assert_eq!(
            line,
            "ibp,\"combo,1\",diff,0.1234567890123,0.0001,1000,42,0.001,1,euclidean2,holds"
        );
    }
}
