//! Tables and scalar facts rendered as aligned text, long-form CSV or one
//! JSON document.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Structured,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub name: String,
    #[serde(skip)]
    pub label: String,
    pub values: Vec<Option<i64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub name: String,
    pub column_label: String,
    pub columns: Vec<i64>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(name: &str, column_label: &str, columns: Vec<i64>) -> Self {
        Table { name: name.into(), column_label: column_label.into(), columns, rows: Vec::new() }
    }

    pub fn row(&mut self, name: &str, label: &str, values: Vec<Option<i64>>) {
        self.rows.push(Row { name: name.into(), label: label.into(), values });
    }
}

/// Output of one command: named facts followed by tables.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Document {
    pub command: String,
    pub facts: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
}

impl Document {
    pub fn new(command: &str) -> Self {
        Document { command: command.into(), ..Default::default() }
    }

    pub fn fact(&mut self, key: &str, v: impl Serialize) {
        self.facts.insert(key.into(), serde_json::to_value(v).expect("serializable fact"));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(self).expect("serializable document");
                s.push('\n');
                s
            }
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let width = self.facts.keys().map(|k| k.len()).max().unwrap_or(0);
        for (k, v) in &self.facts {
            out.push_str(&format!("{k:<width$}  {}\n", plain(v)));
        }
        for t in &self.tables {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("{}\n", t.name));
            let cell = |v: &Option<i64>| v.map_or("?".to_string(), |x| x.to_string());
            let lw = t.rows.iter().map(|r| r.label.chars().count()).max().unwrap_or(0).max(t.column_label.len());
            let cw: Vec<usize> = t
                .columns
                .iter()
                .enumerate()
                .map(|(i, c)| t.rows.iter().map(|r| cell(&r.values[i]).len()).max().unwrap_or(0).max(c.to_string().len()))
                .collect();
            out.push_str(&pad(&t.column_label, lw));
            for (c, w) in t.columns.iter().zip(&cw) {
                out.push_str(&format!(" {c:>w$}"));
            }
            out.push('\n');
            for r in &t.rows {
                out.push_str(&pad(&r.label, lw));
                for (v, w) in r.values.iter().zip(&cw) {
                    out.push_str(&format!(" {:>w$}", cell(v)));
                }
                out.push('\n');
            }
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["table", "row", "column", "value"]).unwrap();
        for (k, v) in &self.facts {
            w.write_record(["facts", k, "", &plain(v)]).unwrap();
        }
        for t in &self.tables {
            for r in &t.rows {
                for (c, v) in t.columns.iter().zip(&r.values) {
                    let v = v.map_or(String::new(), |x| x.to_string());
                    w.write_record([t.name.as_str(), &r.name, &c.to_string(), &v]).unwrap();
                }
            }
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

fn pad(s: &str, w: usize) -> String {
    let n = s.chars().count();
    format!("{s}{}", " ".repeat(w.saturating_sub(n)))
}

/// Scalars without JSON quoting.
pub fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> Document {
        let mut d = Document::new("e1");
        d.fact("n", 4);
        let mut t = Table::new("first page", "k", vec![4, 5]);
        t.row("mu", "μ", vec![Some(1), Some(4)]);
        t.row("nu", "ν", vec![Some(0), None]);
        d.tables.push(t);
        d
    }

    #[test]
    fn formats() {
        let d = doc();
        assert_eq!(d.render(Format::Text), "n  4\n\nfirst page\nk 4 5\nμ 1 4\nν 0 ?\n");
        assert_eq!(
            d.render(Format::Csv),
            "table,row,column,value\nfacts,n,,4\nfirst page,mu,4,1\nfirst page,mu,5,4\nfirst page,nu,4,0\nfirst page,nu,5,\n"
        );
        let v: Value = serde_json::from_str(&d.render(Format::Structured)).unwrap();
        assert_eq!(v["tables"][0]["rows"][1]["values"], serde_json::json!([0, null]));
    }
}
