//! JSON form `{dim, N, N_t, terms: [{exps, re, im}]}`.
//!
//! `exps` is the flat exponent list `[q_1..q_n, p_1..p_n, l_1..l_n, t_1..t_n]`.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Monomial, SeriesSpace, TruncatedSeries, Truncation};

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exps: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    dim: usize,
    #[serde(rename = "N")]
    degree: u32,
    #[serde(rename = "N_t")]
    t_degree: u32,
    terms: Vec<TermRepr>,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dim = self.dim();
        SeriesRepr {
            dim,
            degree: self.truncation().degree,
            t_degree: self.truncation().t_degree,
            terms: self
                .iter()
                .map(|(m, c)| TermRepr {
                    exps: m.to_flat(dim),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        let trunc = Truncation::new(repr.degree, repr.t_degree).map_err(D::Error::custom)?;
        let space = SeriesSpace::new(repr.dim, trunc).map_err(D::Error::custom)?;
        let mut out = space.zero();
        for t in repr.terms {
            let m = Monomial::from_flat(repr.dim, &t.exps)
                .ok_or_else(|| D::Error::custom(format!("bad exponent vector {:?}", t.exps)))?;
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(D::Error::custom("non-finite coefficient"));
            }
            if !trunc.admits(&m) {
                return Err(D::Error::custom(format!("term {m} exceeds truncation")));
            }
            out.add_term(m, Complex64::new(t.re, t.im));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::parse_series;

    #[test]
    fn json_shape_and_roundtrip() {
        let sp = SeriesSpace::new(2, Truncation::new(6, 2).unwrap()).unwrap();
        let s = parse_series("(1-2i)*q1*p2^2 + 0.5*l2*t1", &sp).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["N"], 6);
        assert_eq!(v["N_t"], 2);
        assert_eq!(v["terms"].as_array().unwrap().len(), 2);
        let back: TruncatedSeries = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_terms_beyond_truncation() {
        let json = r#"{"dim":1,"N":2,"N_t":1,"terms":[{"exps":[3,0,0,0],"re":1.0,"im":0.0}]}"#;
        assert!(serde_json::from_str::<TruncatedSeries>(json).is_err());
    }
}
