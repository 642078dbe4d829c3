//! JSON and text forms of optical networks and compiled subspace settings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hdpath_core::optics::{Element, Mode, Network, Pol, Port, SubspaceSetting, SubspaceVerification};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{PipelineError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDoc {
    pub port: [i32; 2],
    pub pol: String,
}

impl From<Mode> for ModeDoc {
    fn from(m: Mode) -> Self {
        Self { port: [m.port.0, m.port.1], pol: pol_str(m.pol).into() }
    }
}

impl TryFrom<&ModeDoc> for Mode {
    type Error = PipelineError;

    fn try_from(m: &ModeDoc) -> Result<Mode> {
        let pol = match m.pol.as_str() {
            "H" => Pol::H,
            "V" => Pol::V,
            other => return Err(PipelineError::Config(format!("unknown polarization '{other}'"))),
        };
        Ok(Mode::new((m.port[0], m.port[1]), pol))
    }
}

fn pol_str(p: Pol) -> &'static str {
    match p {
        Pol::H => "H",
        Pol::V => "V",
    }
}

/// One element as `{kind, params, ports}`. Per-port values in `params` are
/// listed in the order of `ports`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementDoc {
    pub kind: String,
    pub params: Value,
    pub ports: Option<Vec<[i32; 2]>>,
}

fn port_list<'a>(ports: impl Iterator<Item = &'a Port>) -> Vec<[i32; 2]> {
    ports.map(|p| [p.0, p.1]).collect()
}

impl From<&Element> for ElementDoc {
    fn from(e: &Element) -> Self {
        let kind = e.kind().to_string();
        let (params, ports) = match e {
            Element::Hwp { angle_deg, ports } => (json!({ "angle_deg": angle_deg }), ports.as_ref().map(|p| port_list(p.iter()))),
            Element::HwpArray { angles } => {
                (json!({ "angles_deg": angles.values().collect::<Vec<_>>() }), Some(port_list(angles.keys())))
            }
            Element::Bd { offset } => (json!({ "offset": [offset.0, offset.1] }), None),
            Element::Pbs { reflect } => (json!({ "reflect": [reflect.0, reflect.1] }), None),
            Element::SlmPhase { phases } => {
                (json!({ "phases_rad": phases.values().collect::<Vec<_>>() }), Some(port_list(phases.keys())))
            }
            Element::PostSelectH => (json!({}), None),
        };
        Self { kind, params, ports }
    }
}

impl TryFrom<&ElementDoc> for Element {
    type Error = PipelineError;

    fn try_from(doc: &ElementDoc) -> Result<Element> {
        let bad = |what: &str| PipelineError::Config(format!("{} element: {what}", doc.kind));
        let num = |key: &str| doc.params.get(key).and_then(Value::as_f64).ok_or_else(|| bad(&format!("missing '{key}'")));
        let pair = |key: &str| -> Result<Port> {
            let v: [i32; 2] = serde_json::from_value(doc.params.get(key).cloned().unwrap_or(Value::Null))
                .map_err(|_| bad(&format!("'{key}' must be [x, y]")))?;
            Ok((v[0], v[1]))
        };
        let per_port = |key: &str| -> Result<BTreeMap<Port, f64>> {
            let values: Vec<f64> = serde_json::from_value(doc.params.get(key).cloned().unwrap_or(Value::Null))
                .map_err(|_| bad(&format!("'{key}' must be a list of numbers")))?;
            let ports = doc.ports.as_ref().ok_or_else(|| bad("missing ports"))?;
            if ports.len() != values.len() {
                return Err(bad("ports and values differ in length"));
            }
            Ok(ports.iter().map(|p| (p[0], p[1])).zip(values).collect())
        };
        let element = match doc.kind.as_str() {
            "hwp" => Element::Hwp {
                angle_deg: num("angle_deg")?,
                ports: doc.ports.as_ref().map(|p| p.iter().map(|q| (q[0], q[1])).collect()),
            },
            "hwp_array" => Element::HwpArray { angles: per_port("angles_deg")? },
            "bd" => Element::Bd { offset: pair("offset")? },
            "pbs" => Element::Pbs { reflect: pair("reflect")? },
            "slm_phase" => Element::SlmPhase { phases: per_port("phases_rad")? },
            "post_select_h" => Element::PostSelectH,
            _ => return Err(bad("unknown kind")),
        };
        element.validate()?;
        Ok(element)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub inputs: Vec<ModeDoc>,
    pub outputs: Vec<ModeDoc>,
    pub transmission: f64,
    pub elements: Vec<ElementDoc>,
}

impl From<&Network> for NetworkDoc {
    fn from(n: &Network) -> Self {
        Self {
            inputs: n.inputs.iter().copied().map(ModeDoc::from).collect(),
            outputs: n.outputs.iter().copied().map(ModeDoc::from).collect(),
            transmission: n.transmission,
            elements: n.elements.iter().map(ElementDoc::from).collect(),
        }
    }
}

impl TryFrom<&NetworkDoc> for Network {
    type Error = PipelineError;

    fn try_from(doc: &NetworkDoc) -> Result<Network> {
        let modes = |m: &[ModeDoc]| m.iter().map(Mode::try_from).collect::<Result<Vec<_>>>();
        let elements = doc.elements.iter().map(Element::try_from).collect::<Result<Vec<_>>>()?;
        let net = Network::new(elements, modes(&doc.inputs)?, modes(&doc.outputs)?).with_transmission(doc.transmission);
        net.validate()?;
        Ok(net)
    }
}

fn complex(z: hdpath_core::C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Stage list, detector, network and verifier verdict of one setting.
pub fn setting_json(setting: &SubspaceSetting, verification: &SubspaceVerification) -> Value {
    let stages: Vec<Value> = setting
        .stages
        .iter()
        .map(|s| {
            json!({
                "name": s.name,
                "role": s.role.label(),
                "plates": s.plates.iter().map(|(p, a)| json!({ "port": [p.0, p.1], "angle_deg": a })).collect::<Vec<_>>(),
                "whole_plate_deg": s.whole_plate,
                "phase": s.phase.map(|(p, phi)| json!({ "port": [p.0, p.1], "rad": phi })),
            })
        })
        .collect();
    json!({
        "pair": [setting.pair.0, setting.pair.1],
        "dim": setting.dim,
        "alpha": complex(setting.alpha),
        "beta": complex(setting.beta),
        "stages": stages,
        "detector": ModeDoc::from(setting.detector),
        "network": NetworkDoc::from(&setting.network()),
        "verification": verification_json(verification),
    })
}

pub fn verification_json(v: &SubspaceVerification) -> Value {
    json!({
        "passed": v.passed(),
        "max_leakage": v.max_leakage,
        "born_error": v.born_error,
        "failures": v.failures.iter().map(|f| json!({ "stage": f.stage, "reason": f.reason })).collect::<Vec<_>>(),
    })
}

const CELL: usize = 10;

/// One line per setting in the column layout of the published settings
/// table: the subspace, then one role label per plate column.
pub fn subspace_table(settings: &[SubspaceSetting]) -> String {
    let mut out = String::new();
    let Some(first) = settings.first() else {
        return out;
    };
    write!(out, "{:<CELL$}", "subspace").unwrap();
    for s in &first.stages {
        write!(out, "{:<CELL$}", s.name).unwrap();
    }
    trim_push(&mut out);
    for setting in settings {
        write!(out, "{:<CELL$}", format!("({},{})", setting.pair.0, setting.pair.1)).unwrap();
        for s in &setting.stages {
            write!(out, "{:<CELL$}", s.role.label()).unwrap();
        }
        trim_push(&mut out);
    }
    out
}

fn trim_push(out: &mut String) {
    let len = out.trim_end().len();
    out.truncate(len);
    out.push('\n');
}

/// Plate angles and SLM phase of every column.
pub fn stage_details(setting: &SubspaceSetting) -> String {
    let mut out = String::new();
    for s in &setting.stages {
        write!(out, "{:<6} {:<9}", s.name, s.role.label()).unwrap();
        if let Some((p, phi)) = s.phase {
            write!(out, " slm ({},{}) {:.6} rad", p.0, p.1, phi).unwrap();
        }
        for (p, a) in &s.plates {
            write!(out, " ({},{})@{:.4}", p.0, p.1, a).unwrap();
        }
        if let Some(a) = s.whole_plate {
            write!(out, " all@{a:.4}").unwrap();
        }
        trim_push(&mut out);
    }
    let det = setting.detector;
    writeln!(out, "detector ({},{}) {}", det.port.0, det.port.1, pol_str(det.pol)).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use hdpath_core::optics::{build_source_array, compile_mub_network, compile_subspace, intensity_regulator, verify_subspace_setting};

    fn round_trip(net: &Network) {
        let doc = NetworkDoc::from(net);
        let text = serde_json::to_string(&doc).unwrap();
        let back: NetworkDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(&Network::try_from(&back).unwrap(), net);
    }

    #[test]
    fn networks_round_trip() {
        round_trip(&compile_mub_network(3, &[0.1, 0.2, 0.3]).unwrap());
        round_trip(&build_source_array(32).unwrap());
        round_trip(&intensity_regulator(1.0).with_transmission(0.9));
        round_trip(&compile_subspace(3, 12, 16).unwrap().network());
    }

    #[test]
    fn malformed_elements_rejected() {
        let doc = |kind: &str, params: Value, ports: Option<Vec<[i32; 2]>>| ElementDoc { kind: kind.into(), params, ports };
        assert!(Element::try_from(&doc("mirror", json!({}), None)).is_err());
        assert!(Element::try_from(&doc("bd", json!({ "offset": [0, 0] }), None)).is_err());
        assert!(Element::try_from(&doc("hwp_array", json!({ "angles_deg": [1.0, 2.0] }), Some(vec![[0, 0]]))).is_err());
        assert!(Element::try_from(&doc("hwp", json!({}), None)).is_err());
    }

    #[test]
    fn table_layout() {
        let rows: Vec<_> = [1, 2].iter().map(|&j| compile_subspace(0, j, 32).unwrap()).collect();
        let t = subspace_table(&rows);
        let lines: Vec<_> = t.lines().collect();
        assert_eq!(lines[0], "subspace  HWPA2     HWPA3     HWPA4     HWPA5     HWP");
        assert_eq!(lines[1], "(0,1)     SSM       HWP@0°    HWP@0°    HWP@0°    HWP1@45°");
        assert_eq!(lines[2], "(0,2)     θ2@0°     SSM       HWP@0°    HWP@0°    HWP1@45°");
    }

    #[test]
    fn setting_json_fields() {
        let s = compile_subspace(0, 1, 4).unwrap();
        let v = verify_subspace_setting(&s, s.alpha, s.beta).unwrap();
        let j = setting_json(&s, &v);
        assert_eq!(j["pair"], json!([0, 1]));
        assert_eq!(j["verification"]["passed"], json!(true));
        assert_eq!(j["stages"].as_array().unwrap().len(), 2);
        assert!(stage_details(&s).contains("detector"));
    }
}
