//! Complex numbers in JSON as {"re": .., "im": ..}.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C> for Cx {
    fn from(z: C) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

impl From<Cx> for C {
    fn from(z: Cx) -> Self {
        C::new(z.re, z.im)
    }
}

pub fn ser<S: Serializer>(z: &C, s: S) -> Result<S::Ok, S::Error> {
    Cx::from(*z).serialize(s)
}

pub fn ser_vec<S: Serializer>(zs: &[C], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(zs.iter().map(|z| Cx::from(*z)))
}

pub fn ser_opt<S: Serializer>(z: &Option<C>, s: S) -> Result<S::Ok, S::Error> {
    z.map(Cx::from).serialize(s)
}
