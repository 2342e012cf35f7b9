//! Tabular output as CSV or JSON, numbers at 12 significant digits.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    /// Empty CSV field, JSON null.
    Missing,
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Value::Missing, Value::Num)
    }
}

/// `x` with 12 significant digits: fixed notation for moderate magnitudes,
/// scientific otherwise. Trailing zeros are kept so columns line up.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("exponent");
    if (-4..6).contains(&exp) {
        format!("{x:.prec$}", prec = (11 - exp) as usize)
    } else {
        sci
    }
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::Num(x) => sig12(*x),
                    Value::Int(i) => i.to_string(),
                    Value::Text(t) => t.clone(),
                    Value::Missing => String::new(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| {
                        let j = match v {
                            Value::Num(x) => sig12(*x)
                                .parse::<f64>()
                                .ok()
                                .and_then(serde_json::Number::from_f64)
                                .map_or(serde_json::Value::Null, serde_json::Value::Number),
                            Value::Int(i) => serde_json::Value::from(*i),
                            Value::Text(t) => serde_json::Value::from(t.clone()),
                            Value::Missing => serde_json::Value::Null,
                        };
                        (k.clone(), j)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(2f64.sqrt() - 1.0), "0.414213562373");
        assert_eq!(sig12(1.0), "1.00000000000");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1234.5), "1234.50000000");
        assert_eq!(sig12(3.2e-12), "3.20000000000e-12");
        assert_eq!(sig12(-0.25), "-0.250000000000");
        for x in [0.123456789012345, 7.1e-5, 99999.99999999, 1e9] {
            let back: f64 = sig12(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11, "{x}");
        }
    }

    #[test]
    fn csv_and_json() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![Value::Num(0.5), Value::Missing, Value::Text("x".into())]);
        assert_eq!(t.to_csv(), "a,b,c\n0.500000000000,,x\n");
        let j: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(j[0]["a"], 0.5);
        assert!(j[0]["b"].is_null());
        assert_eq!(Table::new(&["p"]).to_csv(), "p\n");
    }
}
