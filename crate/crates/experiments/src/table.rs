//! Small CSV tables with string key columns and numeric value columns.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub keys: Vec<String>,
    pub values: Vec<String>,
    pub rows: Vec<(Vec<String>, Vec<f64>)>,
}

/// Shortest round-trip form; non-finite values print as `NaN`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        "NaN".into()
    }
}

impl Table {
    pub fn new(keys: &[&str], values: &[&str]) -> Self {
        Table {
            keys: keys.iter().map(|s| s.to_string()).collect(),
            values: values.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, keys: Vec<String>, values: Vec<f64>) {
        debug_assert_eq!(keys.len(), self.keys.len());
        debug_assert_eq!(values.len(), self.values.len());
        self.rows.push((keys, values));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column index of a value column.
    pub fn col(&self, name: &str) -> Option<usize> {
        self.values.iter().position(|c| c == name)
    }

    /// Values of a column, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.col(name)?;
        Some(self.rows.iter().map(|r| r.1[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self
            .keys
            .iter()
            .chain(&self.values)
            .cloned()
            .collect::<Vec<_>>()
            .join(",");
        s.push('\n');
        for (k, v) in &self.rows {
            let cells: Vec<String> = k.iter().cloned().chain(v.iter().map(|x| num(*x))).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    /// Row-wise mean and sample standard deviation across tables with the
    /// same keys, over finite values only. Adds `n_seeds`, then
    /// `<col>_mean,<col>_std` per value column.
    pub fn aggregate(tables: &[Table]) -> Table {
        let Some(first) = tables.first() else {
            return Table::new(&[], &[]);
        };
        let mut values = vec!["n_seeds".to_string()];
        for c in &first.values {
            values.push(format!("{c}_mean"));
            values.push(format!("{c}_std"));
        }
        let mut out = Table {
            keys: first.keys.clone(),
            values,
            rows: Vec::new(),
        };
        for (r, (key, _)) in first.rows.iter().enumerate() {
            let mut row = vec![tables.len() as f64];
            for c in 0..first.values.len() {
                let xs: Vec<f64> = tables
                    .iter()
                    .filter_map(|t| t.rows.get(r))
                    .map(|row| row.1[c])
                    .filter(|x| x.is_finite())
                    .collect();
                let (m, s) = mean_std(&xs);
                row.push(m);
                row.push(s);
            }
            out.rows.push((key.clone(), row));
        }
        out
    }
}

/// Mean and sample (n - 1) standard deviation; NaN when undefined.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (m, f64::NAN);
    }
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (m, v.sqrt())
}
