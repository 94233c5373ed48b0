//! Machine-readable reports. Every number is an exact `"p/q"` string;
//! optional decimal columns sit next to, never instead of, the exact ones.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use groves_core::analysis::Witness;
use groves_core::mechanism::{Decision, TaxReport};
use groves_core::rational::to_decimal_string;
use groves_core::{parse_rational, to_exact_string, Rational, Setting, TypeProfile};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliResult;

/// A rational that serializes as `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_exact_string(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map(Exact).map_err(D::Error::custom)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_exact_string(&self.0))
    }
}

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact(r)
    }
}

impl From<&Rational> for Exact {
    fn from(r: &Rational) -> Self {
        Exact(r.clone())
    }
}

pub fn exact_vec(v: &[Rational]) -> Vec<Exact> {
    v.iter().map(Exact::from).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingEcho {
    pub domain: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shares: Option<Vec<Exact>>,
}

impl SettingEcho {
    pub fn of(setting: &Setting) -> Self {
        match setting {
            Setting::Auction(a) => SettingEcho {
                domain: "auction".into(),
                n: a.n(),
                m: Some(a.m()),
                lower: Some(a.lower().into()),
                upper: Some(a.upper().into()),
                cost: None,
                shares: None,
            },
            Setting::PublicProject(p) => SettingEcho {
                domain: "public".into(),
                n: p.n(),
                m: None,
                lower: None,
                upper: None,
                cost: Some(p.cost().into()),
                shares: Some(exact_vec(p.shares())),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub profile: Vec<Exact>,
    /// Winners (1-based) for auctions, `build` / `no-build` for projects.
    pub decision: String,
    pub taxes: Vec<Exact>,
    /// Rebate on top of the VCG tax, per agent.
    pub rebates: Vec<Exact>,
    pub total_tax: Exact,
    pub utilities: Vec<Exact>,
    pub welfare: Exact,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taxes_decimal: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_tax_decimal: Option<String>,
}

impl ProfileRow {
    pub fn new(
        profile: &TypeProfile,
        r: &TaxReport,
        rebates: &[Rational],
        decimal: Option<usize>,
    ) -> Self {
        let decision = match &r.decision {
            Decision::Allocation(w) => w
                .iter()
                .map(|i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(","),
            Decision::Project(true) => "build".into(),
            Decision::Project(false) => "no-build".into(),
        };
        ProfileRow {
            profile: exact_vec(profile.values()),
            decision,
            taxes: exact_vec(&r.taxes),
            rebates: exact_vec(rebates),
            total_tax: (&r.total_tax).into(),
            utilities: exact_vec(&r.utilities),
            welfare: (&r.welfare).into(),
            taxes_decimal: decimal
                .map(|k| r.taxes.iter().map(|t| to_decimal_string(t, k)).collect()),
            total_tax_decimal: decimal.map(|k| to_decimal_string(&r.total_tax, k)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub kind: String,
    pub profile: Vec<Exact>,
    /// 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<usize>,
    pub value: Exact,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_decimal: Option<String>,
}

impl WitnessRow {
    pub fn new(kind: &str, w: &Witness, decimal: Option<usize>) -> Self {
        WitnessRow {
            kind: kind.into(),
            profile: exact_vec(w.profile.values()),
            agent: w.agent.map(|i| i + 1),
            value: (&w.value).into(),
            value_decimal: decimal.map(|k| to_decimal_string(&w.value, k)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub setting: SettingEcho,
    pub mechanisms: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<Exact>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<ProfileRow>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub verdicts: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Exact>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessRow>,
    /// LP improvement `Δ`, keyed by the descending multiset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, Exact>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Report {
    pub fn new(scenario: &str, setting: &Setting) -> Self {
        Report {
            scenario: scenario.into(),
            setting: SettingEcho::of(setting),
            mechanisms: Vec::new(),
            grid: Vec::new(),
            rows: Vec::new(),
            verdicts: BTreeMap::new(),
            values: BTreeMap::new(),
            witnesses: Vec::new(),
            table: None,
            notes: Vec::new(),
            runtime_ms: None,
            timestamp: None,
        }
    }

    pub fn verdict(&mut self, key: &str, value: impl ToString) {
        self.verdicts.insert(key.into(), value.to_string());
    }

    pub fn value(&mut self, key: &str, value: &Rational) {
        self.values.insert(key.into(), value.into());
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> CliResult<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    /// Profile rows as a table when there are any; otherwise one
    /// `section,key,value` record per verdict, value and witness.
    pub fn write_csv<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(out);
        if !self.rows.is_empty() {
            let decimal = self.rows[0].taxes_decimal.is_some();
            let mut header = vec![
                "profile",
                "decision",
                "taxes",
                "rebates",
                "total_tax",
                "utilities",
                "welfare",
            ];
            if decimal {
                header.extend(["taxes_decimal", "total_tax_decimal"]);
            }
            w.write_record(&header)?;
            for r in &self.rows {
                let mut rec = vec![
                    join(&r.profile),
                    r.decision.clone(),
                    join(&r.taxes),
                    join(&r.rebates),
                    r.total_tax.to_string(),
                    join(&r.utilities),
                    r.welfare.to_string(),
                ];
                if decimal {
                    rec.push(r.taxes_decimal.clone().unwrap_or_default().join(";"));
                    rec.push(r.total_tax_decimal.clone().unwrap_or_default());
                }
                w.write_record(&rec)?;
            }
        } else {
            w.write_record(["section", "key", "value"])?;
            w.write_record(["scenario", "id", &self.scenario])?;
            for m in &self.mechanisms {
                w.write_record(["mechanism", "spec", m])?;
            }
            for (k, v) in &self.verdicts {
                w.write_record(["verdict", k, v])?;
            }
            for (k, v) in &self.values {
                w.write_record(["value", k, &v.to_string()])?;
            }
            for wit in &self.witnesses {
                let agent = wit.agent.map(|a| format!(" agent {a}")).unwrap_or_default();
                let detail = format!("({}){agent}: {}", join(&wit.profile), wit.value);
                w.write_record(["witness", &wit.kind, &detail])?;
            }
            if let Some(t) = &self.table {
                for (k, v) in t {
                    w.write_record(["table", k, &v.to_string()])?;
                }
            }
            for n in &self.notes {
                w.write_record(["note", "", n])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn join(v: &[Exact]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

#[cfg(test)]
mod tests {
    use super::*;
    use groves_core::rational::{int, rat};
    use groves_core::AuctionSetting;

    #[test]
    fn exact_serializes_as_fraction() {
        let v = serde_json::to_string(&Exact(rat(-10, 4))).unwrap();
        assert_eq!(v, "\"-5/2\"");
        let back: Exact = serde_json::from_str(&v).unwrap();
        assert_eq!(back.0, rat(-5, 2));
        assert_eq!(serde_json::to_string(&Exact(int(0))).unwrap(), "\"0/1\"");
    }

    #[test]
    fn report_round_trips() {
        let s: Setting = AuctionSetting::new(3, 1, int(0), int(2)).unwrap().into();
        let mut r = Report::new("test", &s);
        r.verdict("dominates", "yes");
        r.value("optimum", &rat(7, 3));
        r.notes.push("grid-certified".into());
        let text = serde_json::to_string(&r).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
