use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BasisKey, PolyForm};
use crate::error::{Error, Result};
use crate::scalar::GaussScalar;

#[derive(Serialize, Deserialize)]
struct TermJson {
    a: Vec<u16>,
    #[serde(rename = "I")]
    indices: Vec<usize>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    n: usize,
    p: usize,
    terms: Vec<TermJson>,
}

impl PolyForm {
    fn to_json_repr(&self) -> FormJson {
        // BTreeMap order on BasisKey is already (I, a) lexicographic
        let terms = self
            .terms()
            .map(|(k, v)| {
                let [re, im] = v.to_strings();
                TermJson { a: k.exps.clone(), indices: k.indices.iter().map(|&j| j as usize + 1).collect(), re, im }
            })
            .collect();
        FormJson { n: self.n(), p: self.degree(), terms }
    }

    fn from_json_repr(repr: FormJson) -> Result<PolyForm> {
        if repr.p > repr.n || repr.n > 32 {
            return Err(Error::Parse(format!("invalid shape n={} p={}", repr.n, repr.p)));
        }
        let mut out = PolyForm::zero(repr.n, repr.p);
        for t in repr.terms {
            if t.a.len() != repr.n || t.indices.len() != repr.p {
                return Err(Error::Parse("term shape does not match the form".into()));
            }
            if t.indices.windows(2).any(|w| w[0] >= w[1]) || t.indices.iter().any(|&j| j == 0 || j > repr.n) {
                return Err(Error::Parse(format!("bad index set {:?}", t.indices)));
            }
            let key = BasisKey { indices: t.indices.iter().map(|&j| (j - 1) as u8).collect(), exps: t.a };
            out.add_term(key, GaussScalar::from_strings(&t.re, &t.im)?);
        }
        Ok(out)
    }

    /// Canonical JSON encoding.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_repr()).expect("form serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<PolyForm> {
        let repr: FormJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        PolyForm::from_json_repr(repr)
    }
}

impl Serialize for PolyForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FormJson::deserialize(d)?;
        PolyForm::from_json_repr(repr).map_err(serde::de::Error::custom)
    }
}
