use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{mask_squares, Component, QuantumBoardState, MAX_SQUARES};

#[derive(Serialize, Deserialize)]
struct TermRepr {
    bits: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ComponentRepr {
    squares: Vec<usize>,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct StateRepr {
    num_squares: usize,
    /// Classically occupied squares.
    occupied: Vec<usize>,
    components: Vec<ComponentRepr>,
}

impl Serialize for Component {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        component_repr(self).serialize(serializer)
    }
}

fn component_repr(comp: &Component) -> ComponentRepr {
    let squares = comp.squares();
    let terms = comp
        .terms
        .iter()
        .map(|(k, a)| TermRepr {
            bits: squares
                .iter()
                .map(|&s| if k >> s & 1 == 1 { '1' } else { '0' })
                .collect(),
            re: a.re,
            im: a.im,
        })
        .collect();
    ComponentRepr { squares, terms }
}

impl Serialize for QuantumBoardState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StateRepr {
            num_squares: self.num_squares,
            occupied: mask_squares(self.classical).collect(),
            components: self.components.iter().map(component_repr).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuantumBoardState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = StateRepr::deserialize(deserializer)?;
        if repr.num_squares > MAX_SQUARES {
            return Err(de::Error::custom("too many squares"));
        }
        let mut used = 0u64;
        let mut classical = 0u64;
        for s in repr.occupied {
            if s >= repr.num_squares {
                return Err(de::Error::custom(format!("square {s} out of range")));
            }
            classical |= 1u64 << s;
        }
        let mut components = Vec::with_capacity(repr.components.len());
        for c in repr.components {
            let mut mask = 0u64;
            for &s in &c.squares {
                if s >= repr.num_squares || mask >> s & 1 == 1 {
                    return Err(de::Error::custom(format!("bad component square {s}")));
                }
                mask |= 1u64 << s;
            }
            if mask & used != 0 || mask & classical != 0 {
                return Err(de::Error::custom("components overlap"));
            }
            used |= mask;
            let mut terms = Vec::with_capacity(c.terms.len());
            for t in c.terms {
                if t.bits.len() != c.squares.len() {
                    return Err(de::Error::custom("term bit length mismatch"));
                }
                let mut key = 0u64;
                for (ch, &s) in t.bits.chars().zip(&c.squares) {
                    match ch {
                        '1' => key |= 1u64 << s,
                        '0' => {}
                        _ => return Err(de::Error::custom("bits must be 0 or 1")),
                    }
                }
                if !t.re.is_finite() || !t.im.is_finite() {
                    return Err(de::Error::custom("non-finite amplitude"));
                }
                terms.push((key, Complex64::new(t.re, t.im)));
            }
            components.push(Component::new(mask, terms));
        }
        Ok(QuantumBoardState {
            num_squares: repr.num_squares,
            classical,
            components,
        })
    }
}
