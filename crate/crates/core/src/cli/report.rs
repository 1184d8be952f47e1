use std::fmt::{Display, Write};
use std::time::{Duration, Instant};

use clap::ValueEnum;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    /// One `key = value` line per result, keys dotted.
    Structured,
}

/// Ordered key-value results of one command.
#[derive(Debug)]
pub struct Report {
    command: String,
    entries: Vec<(String, String)>,
    timings: Vec<(String, Duration)>,
    total: Option<Duration>,
    failure: Option<Error>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), entries: Vec::new(), timings: Vec::new(), total: None, failure: None }
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push((label.to_string(), start.elapsed()));
        out
    }

    pub fn set_total(&mut self, total: Duration) {
        self.total = Some(total);
    }

    /// Records the first failure; the report is still printed.
    pub fn fail(&mut self, e: Error) {
        self.failure.get_or_insert(e);
    }

    pub fn failure(&self) -> Option<&Error> {
        self.failure.as_ref()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => self.structured(),
            Format::Human => self.human(),
        }
    }

    fn timing_lines(&self) -> Vec<(String, Duration)> {
        let mut lines = self.timings.clone();
        if let Some(t) = self.total {
            lines.push(("total".into(), t));
        }
        lines
    }

    fn structured(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "engine.version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "command = {}", self.command);
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        for (label, d) in self.timing_lines() {
            let _ = writeln!(out, "timing.{label}_ms = {:.3}", d.as_secs_f64() * 1e3);
        }
        out
    }

    fn human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sullivan {} {}", env!("CARGO_PKG_VERSION"), self.command);
        let width = self
            .entries
            .iter()
            .map(|(k, _)| k.split_once('.').map_or(k.len(), |(_, rest)| rest.len()))
            .max()
            .unwrap_or(0);
        let mut section = "";
        for (k, v) in &self.entries {
            let (head, rest) = k.split_once('.').unwrap_or((k.as_str(), ""));
            if head != section {
                let _ = writeln!(out, "\n{head}");
                section = head;
            }
            let _ = writeln!(out, "  {rest:width$}  {v}");
        }
        let timings: Vec<String> =
            self.timing_lines().iter().map(|(label, d)| format!("{label} {:.1} ms", d.as_secs_f64() * 1e3)).collect();
        if !timings.is_empty() {
            let _ = writeln!(out, "\ntime: {}", timings.join(", "));
        }
        out
    }
}
