//! Machine-checkable verification records.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleId {
    ParallelLines,
    InfinitesimalEquality,
    EllipseParabola,
    ProductRule,
}

impl ExampleId {
    pub const ALL: [ExampleId; 4] = [
        ExampleId::ParallelLines,
        ExampleId::InfinitesimalEquality,
        ExampleId::EllipseParabola,
        ExampleId::ProductRule,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleId::ParallelLines => "parallel_lines",
            ExampleId::InfinitesimalEquality => "infinitesimal_equality",
            ExampleId::EllipseParabola => "ellipse_parabola",
            ExampleId::ProductRule => "product_rule",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.as_str() == name)
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub description: String,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

/// One reproduced example. `pass` holds exactly when every claim passes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GalleryReport {
    pub example: ExampleId,
    pub parameters: Vec<String>,
    pub claims: Vec<Claim>,
    pub pass: bool,
}

impl GalleryReport {
    pub fn new(example: ExampleId) -> Self {
        GalleryReport { example, parameters: Vec::new(), claims: Vec::new(), pass: true }
    }

    pub fn parameter(&mut self, p: impl Into<String>) {
        self.parameters.push(p.into());
    }

    /// Records a claim that passes when `computed == expected`.
    pub fn check_eq(
        &mut self,
        description: impl Into<String>,
        computed: impl ToString,
        expected: impl ToString,
    ) -> bool {
        let (computed, expected) = (computed.to_string(), expected.to_string());
        let pass = computed == expected;
        self.push(description, computed, expected, pass)
    }

    pub fn push(
        &mut self,
        description: impl Into<String>,
        computed: impl Into<String>,
        expected: impl Into<String>,
        pass: bool,
    ) -> bool {
        self.claims.push(Claim {
            description: description.into(),
            computed: computed.into(),
            expected: expected.into(),
            pass,
        });
        self.pass &= pass;
        pass
    }

    /// Appends another report's parameters and claims.
    pub fn absorb(&mut self, other: GalleryReport) {
        self.parameters.extend(other.parameters);
        for c in other.claims {
            self.push(c.description, c.computed, c.expected, c.pass);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialization cannot fail")
    }
}

impl fmt::Display for GalleryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "example: {}", self.example)?;
        if !self.parameters.is_empty() {
            writeln!(f, "parameters: {}", self.parameters.join(", "))?;
        }
        for c in &self.claims {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            writeln!(f, "[{mark}] {}", c.description)?;
            writeln!(f, "       computed: {}", c.computed)?;
            writeln!(f, "       expected: {}", c.expected)?;
        }
        write!(f, "result: {}", if self.pass { "pass" } else { "fail" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_tracks_every_claim() {
        let mut r = GalleryReport::new(ExampleId::ProductRule);
        assert!(r.check_eq("a", 1, 1));
        assert!(r.pass);
        assert!(!r.check_eq("b", 2, 3));
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn json_schema() {
        let mut r = GalleryReport::new(ExampleId::EllipseParabola);
        r.parameter("x0=2");
        r.check_eq("st", "0", "0");
        let v = r.to_json();
        assert_eq!(v["example"], "ellipse_parabola");
        assert_eq!(v["parameters"][0], "x0=2");
        assert_eq!(v["claims"][0]["pass"], true);
        assert_eq!(v["pass"], true);
        assert_eq!(v.as_object().unwrap().len(), 4);
    }

    #[test]
    fn ids_round_trip() {
        for id in ExampleId::ALL {
            assert_eq!(ExampleId::parse(id.as_str()), Some(id));
        }
        assert_eq!(ExampleId::parse("bogus_id"), None);
    }
}
