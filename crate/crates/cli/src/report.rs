use std::io::Write;

use crate::{CliError, ReportArgs};

/// Ordered `key=value` pairs.
#[derive(Debug, Default)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// Adds module lines of the form `key=value`; other lines are ignored.
    pub fn extend_lines(&mut self, lines: impl IntoIterator<Item = String>) {
        for line in lines {
            if let Some((k, v)) = line.split_once('=') {
                self.entries.push((k.to_string(), v.to_string()));
            }
        }
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let map: serde_json::Map<String, serde_json::Value> =
                self.entries.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
            return serde_json::Value::Object(map).to_string() + "\n";
        }
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Prints to stdout and, if asked, writes the same text to the report file.
    pub fn emit(&self, args: &ReportArgs) -> Result<(), CliError> {
        let text = self.render(args.json);
        print!("{text}");
        let _ = std::io::stdout().flush();
        if let Some(path) = &args.report {
            std::fs::write(path, &text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        }
        Ok(())
    }
}

pub fn join_ids(ids: &[usize]) -> String {
    ids.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_lines_and_json() {
        let mut r = Report::default();
        r.push("decision", "YES");
        r.extend_lines(["passes=1".to_string(), "no equals sign".to_string()]);
        assert_eq!(r.render(false), "decision=YES\npasses=1\n");
        let v: serde_json::Value = serde_json::from_str(&r.render(true)).unwrap();
        assert_eq!(v["passes"], "1");
    }

    #[test]
    fn ids_are_comma_separated() {
        assert_eq!(join_ids(&[3, 1]), "3,1");
        assert_eq!(join_ids(&[]), "");
    }
}
