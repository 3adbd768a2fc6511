use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::RunConfig;

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

pub struct Report {
    command: String,
    fields: Map<String, Value>,
    table: Option<Table>,
}

pub fn val(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), fields: Map::new(), table: None }
    }

    pub fn field(mut self, key: &str, v: impl Serialize) -> Self {
        self.fields.insert(key.to_string(), val(v));
        self
    }

    pub fn table(mut self, columns: &[&str], rows: Vec<Vec<Value>>) -> Self {
        self.table = Some(Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows });
        self
    }

    pub fn to_json(&self, cfg: &RunConfig) -> String {
        let mut out = Map::new();
        out.insert("schema_version".into(), val(projconvex::io::SCHEMA_VERSION));
        out.insert("command".into(), val(&self.command));
        let mut echo = cfg.clone();
        echo.output = None;
        out.insert("config".into(), val(&echo));
        for (k, v) in &self.fields {
            out.insert(k.clone(), v.clone());
        }
        if let Some(t) = &self.table {
            out.insert("columns".into(), val(&t.columns));
            out.insert("rows".into(), Value::Array(t.rows.iter().map(|r| Value::Array(r.clone())).collect()));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(out)).expect("report serializes");
        s.push('\n');
        s
    }

    /// The table, or `key,value` lines when the command has none.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        };
        match &self.table {
            Some(t) => {
                w.write_record(&t.columns).expect("in-memory csv");
                for r in &t.rows {
                    w.write_record(r.iter().map(cell)).expect("in-memory csv");
                }
            }
            None => {
                w.write_record(["key", "value"]).expect("in-memory csv");
                for (k, v) in &self.fields {
                    w.write_record([k.clone(), cell(v)]).expect("in-memory csv");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }

    /// Scalar fields as `# key = value` lines, for stderr alongside CSV output.
    pub fn summary(&self) -> String {
        self.fields
            .iter()
            .filter(|(_, v)| !v.is_array() && !v.is_object())
            .map(|(k, v)| format!("# {k} = {v}\n"))
            .collect()
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }
}
