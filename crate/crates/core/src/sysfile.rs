//! TOML system-definition files.
//!
//! ```toml
//! [system]
//! name = "tw_model(2,1)"
//! coordinates = ["theta1:angle:a1", "theta2:angle:a2"]
//! structure = { kind = "twisted_b", c = 1.0, singular = "a1" }
//!
//! [integrals]
//! f1 = "log(abs(a1))"
//! f2 = "a2"
//!
//! [verify]
//! samples = 1000
//! seed = 42
//! ```
//!
//! A coordinate is `name:angle|real[:fiber]`; the fiber defaults to `p_<name>`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::{BaseCoord, CoordKind, PhaseChart, PoissonStructure, StructureKind};
use crate::systems::{IntegrableSystem, NamedIntegral, Tolerances, VerifyConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureSpec {
    Canonical,
    TwistedB { c: f64, singular: String },
    CanonicalB { singular: String },
    Custom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        singular: Option<String>,
        matrix: Vec<Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub name: String,
    pub coordinates: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transverse: Vec<String>,
    pub structure: StructureSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jacobi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involutivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transversality: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSection>,
}

/// Parsed system file; `import` followed by `export` reproduces the same data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub system: SystemSection,
    /// Integral name -> expression, in file order.
    pub integrals: toml::Table,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
}

fn parse_coordinate(spec: &str) -> Result<BaseCoord> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let kind = match parts.get(1).copied() {
        Some("angle") => CoordKind::Angle,
        Some("real") => CoordKind::Real,
        _ => {
            return Err(Error::Format(format!(
                "coordinate `{spec}` must be `name:angle` or `name:real` (optionally `:fiber`)"
            )))
        }
    };
    match parts.as_slice() {
        [name, _] => Ok(BaseCoord::new(*name, kind)),
        [name, _, fiber] => Ok(BaseCoord::with_fiber(*name, kind, *fiber)),
        _ => Err(Error::Format(format!("coordinate `{spec}` has too many parts"))),
    }
}

fn format_coordinate(b: &BaseCoord) -> String {
    let kind = match b.kind {
        CoordKind::Angle => "angle",
        CoordKind::Real => "real",
    };
    if b.fiber == format!("p_{}", b.name) {
        format!("{}:{kind}", b.name)
    } else {
        format!("{}:{kind}:{}", b.name, b.fiber)
    }
}

fn context(what: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Format(format!("{what}: {e}"))
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string().trim_end().to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_system(sys: &IntegrableSystem, verify: Option<VerifySection>) -> Self {
        let chart = sys.chart();
        let singular_name = chart.singular().map(|s| chart.name(s).to_string());
        let structure = match sys.structure().kind() {
            StructureKind::Canonical => StructureSpec::Canonical,
            StructureKind::TwistedB { c } => {
                StructureSpec::TwistedB { c: *c, singular: singular_name.unwrap_or_default() }
            }
            StructureKind::CanonicalB => StructureSpec::CanonicalB { singular: singular_name.unwrap_or_default() },
            StructureKind::Custom => StructureSpec::Custom {
                singular: singular_name,
                matrix: sys
                    .structure()
                    .matrix_exprs()
                    .iter()
                    .map(|row| row.iter().map(|e| e.to_string()).collect())
                    .collect(),
            },
        };
        let mut integrals = toml::Table::new();
        for i in sys.integrals() {
            integrals.insert(i.name.clone(), toml::Value::String(i.function.to_string()));
        }
        SystemFile {
            system: SystemSection {
                name: sys.name.clone(),
                coordinates: chart.base().iter().map(format_coordinate).collect(),
                transverse: chart.transverse().to_vec(),
                structure,
            },
            integrals,
            verify,
        }
    }

    pub fn to_system(&self) -> Result<IntegrableSystem> {
        let base = self.system.coordinates.iter().map(|c| parse_coordinate(c)).collect::<Result<Vec<_>>>()?;
        let singular = match &self.system.structure {
            StructureSpec::Canonical => None,
            StructureSpec::TwistedB { singular, .. } | StructureSpec::CanonicalB { singular } => Some(singular.as_str()),
            StructureSpec::Custom { singular, .. } => singular.as_deref(),
        };
        let chart = PhaseChart::new(base, self.system.transverse.clone(), singular).map_err(context("coordinates"))?;
        let structure = match &self.system.structure {
            StructureSpec::Canonical => PoissonStructure::canonical(&chart),
            StructureSpec::TwistedB { c, .. } => PoissonStructure::twisted_b(&chart, *c).map_err(context("structure"))?,
            StructureSpec::CanonicalB { .. } => PoissonStructure::canonical_b(&chart).map_err(context("structure"))?,
            StructureSpec::Custom { matrix, .. } => {
                let rows = matrix
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, src)| chart.parse_expr(src).map_err(context(&format!("structure.matrix[{i}][{j}]"))))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                PoissonStructure::custom(&chart, rows).map_err(context("structure"))?
            }
        };
        let mut integrals = Vec::new();
        for (name, value) in &self.integrals {
            let src = value
                .as_str()
                .ok_or_else(|| Error::Format(format!("integrals.{name}: expected an expression string")))?;
            let f = chart.parse_bfunction(src).map_err(context(&format!("integrals.{name}")))?;
            integrals.push(NamedIntegral::new(name.clone(), f));
        }
        IntegrableSystem::new(self.system.name.clone(), chart, structure, integrals)
    }

    /// Verification settings: defaults overridden by the `[verify]` section.
    pub fn verify_config(&self) -> VerifyConfig {
        let mut cfg = VerifyConfig::default();
        if let Some(v) = &self.verify {
            cfg.samples = v.samples.unwrap_or(cfg.samples);
            cfg.seed = v.seed.unwrap_or(cfg.seed);
            cfg.box_half_width = v.box_half_width.unwrap_or(cfg.box_half_width);
            cfg.z_cutoff = v.z_cutoff.unwrap_or(cfg.z_cutoff);
            if let Some(t) = &v.tolerances {
                let d = Tolerances::default();
                cfg.tolerances = Tolerances {
                    jacobi: t.jacobi.unwrap_or(d.jacobi),
                    involutivity: t.involutivity.unwrap_or(d.involutivity),
                    independence: t.independence.unwrap_or(d.independence),
                    rank: t.rank.unwrap_or(d.rank),
                    transversality: t.transversality.unwrap_or(d.transversality),
                };
            }
        }
        cfg
    }
}

pub fn import(text: &str) -> Result<IntegrableSystem> {
    SystemFile::parse(text)?.to_system()
}

pub fn export(sys: &IntegrableSystem) -> Result<String> {
    SystemFile::from_system(sys, None).to_toml()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn catalog_round_trips() {
        for id in [
            "can_model(2)",
            "tw_model(3,2.5)",
            "bdarboux(2)",
            "oscillator_b",
            "hyperbolic(1)",
            "focusfocus(1)",
            "affine(2,3,twisted_b:c=3)",
            "poisson_product(1,3)",
        ] {
            let sys = catalog::get(id).unwrap().system;
            let text = export(&sys).unwrap();
            let back = import(&text).unwrap_or_else(|e| panic!("{id}: {e}\n{text}"));
            assert_eq!(back, sys, "{id}\n{text}");
            assert_eq!(export(&back).unwrap(), text);
        }
    }

    #[test]
    fn file_data_round_trips() {
        let text = r#"
[system]
name = "demo"
coordinates = ["theta:angle:a", "x:real"]
structure = { kind = "custom", singular = "a", matrix = [["0", "0", "a", "0"], ["0", "0", "0", "1"], ["-a", "0", "0", "0"], ["0", "-1", "0", "0"]] }

[integrals]
zeta = "log(abs(a))"
alpha = "p_x"

[verify]
samples = 200
seed = 7
box = 1.5
tolerances = { involutivity = 1e-8 }
"#;
        let file = SystemFile::parse(text).unwrap();
        assert_eq!(file.integrals.keys().collect::<Vec<_>>(), ["zeta", "alpha"]);
        let again = SystemFile::parse(&file.to_toml().unwrap()).unwrap();
        assert_eq!(again, file);
        let cfg = file.verify_config();
        assert_eq!((cfg.samples, cfg.seed, cfg.box_half_width), (200, 7, 1.5));
        assert_eq!(cfg.tolerances.involutivity, 1e-8);
        let sys = file.to_system().unwrap();
        assert_eq!(sys.chart().names(), ["theta", "x", "a", "p_x"]);
    }

    #[test]
    fn diagnostics_are_located() {
        let bad = "[system]\nname = \"x\"\ncoordinates = [\"q:real\"]\nstructure = { kind = \"canonical\" }\n[integrals]\nf = \"q +* 1\"\n";
        let err = import(bad).unwrap_err().to_string();
        assert!(err.contains("integrals.f") && err.contains("byte"), "{err}");
        let err = import("[system]\nname = 1\n").unwrap_err();
        assert!(matches!(err, Error::Format(_)));
        let bad = "[system]\nname = \"x\"\ncoordinates = [\"q:real\"]\nstructure = { kind = \"canonical\" }\n[integrals]\nf = \"w\"\n";
        assert!(import(bad).unwrap_err().to_string().contains("`w`"));
    }
}
