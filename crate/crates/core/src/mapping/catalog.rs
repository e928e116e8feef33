//! Built-in mappings with default parameters and coefficient streams.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::arith::{rat, ExtRational};

use super::{CoefficientStream, Mapping, MappingError};

pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "eq1-qrt",
        description: "x[n+1] x[n-1] = a (x[n] - b)/(x[n] - 1), a=2, b=3",
    },
    CatalogEntry {
        name: "eq12-dp1-mult",
        description: "x[n+1] + x[n-1] = a[n]/x[n] + 1/x[n]^2, a[n] = 1 + n/2",
    },
    CatalogEntry {
        name: "eq14-hv",
        description: "x[n+1] + x[n-1] = x[n] + 1/x[n]^2",
    },
    CatalogEntry {
        name: "eq17-hv-k",
        description: "x[n+1] + x[n-1] = 1 + a[n]/x[n]^2, a[n+4] = -a[n] (k=2)",
    },
    CatalogEntry {
        name: "eq20-bedford-kim",
        description: "x[n+1] = (x[n] - a)/(x[n-1] - b), a=2, b=3",
    },
    CatalogEntry {
        name: "eq27-dp1-add",
        description: "x[n+1] + x[n] + x[n-1] = 1 + a[n]/x[n], a[n] = a[n-1] + a[n-2] - a[n-3]",
    },
    CatalogEntry {
        name: "eq31-biquadratic",
        description:
            "biquadratic correspondence solved for x[n+1], c,d,a,b = 2,3,5,7, z[n] = 1/2 + n/3",
    },
];

fn params(kv: &[(&str, i64)]) -> BTreeMap<String, ExtRational> {
    kv.iter()
        .map(|(k, v)| (k.to_string(), ExtRational::from_integer(*v)))
        .collect()
}

fn one_stream(name: &str, s: CoefficientStream) -> BTreeMap<String, CoefficientStream> {
    let mut m = BTreeMap::new();
    m.insert(name.to_string(), s);
    m
}

fn q_list(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&k| rat(k, 1)).collect()
}

/// `1 + n + n^2/2`: satisfies none of the confinement constraints.
fn quadratic_stream() -> CoefficientStream {
    CoefficientStream::polynomial(vec![rat(1, 1), rat(1, 1), rat(1, 2)]).expect("valid")
}

const BIQUADRATIC: &str = "(z[+1] + z)*(y + x - z[-1] - z)*(x^2 - c^2)*(x^2 - d^2) \
    / ((y + x - z[-1] - z)*(x^2 - c^2)*(x^2 - d^2) - ((x - z)^2 - a^2)*((x - z)^2 - b^2)*(y + x)) - x";

/// Looks up a catalog mapping by name with its default coefficients.
pub fn get(name: &str) -> Result<Mapping, MappingError> {
    let none = BTreeMap::new;
    match name {
        "eq1-qrt" => Mapping::new(
            name,
            "a*(x - b)/((x - 1)*y)",
            params(&[("a", 2), ("b", 3)]),
            none(),
        ),
        "eq12-dp1-mult" => Mapping::new(
            name,
            "a/x + 1/x^2 - y",
            BTreeMap::new(),
            one_stream(
                "a",
                CoefficientStream::polynomial(vec![rat(1, 1), rat(1, 2)])?,
            ),
        ),
        "eq14-hv" => Mapping::new(name, "x + 1/x^2 - y", BTreeMap::new(), none()),
        "eq17-hv-k" => hv_k(2),
        "eq20-bedford-kim" => Mapping::new(
            name,
            "(x - a)/(y - b)",
            params(&[("a", 2), ("b", 3)]),
            none(),
        ),
        "eq27-dp1-add" => Mapping::new(
            name,
            "1 + a/x - x - y",
            BTreeMap::new(),
            one_stream(
                "a",
                CoefficientStream::recurrence(
                    q_list(&[1, 1, -1]),
                    vec![rat(1, 1), rat(2, 1), rat(5, 2)],
                )?,
            ),
        ),
        "eq31-biquadratic" => Mapping::new(
            name,
            BIQUADRATIC,
            params(&[("c", 2), ("d", 3), ("a", 5), ("b", 7)]),
            one_stream(
                "z",
                CoefficientStream::polynomial(vec![rat(1, 2), rat(1, 3)])?,
            ),
        ),
        _ => Err(MappingError::UnknownMapping(name.to_string())),
    }
}

/// The same mapping with its constraint-violating "generic" coefficient
/// stream `1 + n + n^2/2`, for the mappings that carry a stream.
pub fn generic(name: &str) -> Result<Mapping, MappingError> {
    let m = get(name)?;
    let stream = match name {
        "eq12-dp1-mult" | "eq17-hv-k" | "eq27-dp1-add" => "a",
        "eq31-biquadratic" => "z",
        _ => return Err(MappingError::UnknownMapping(format!("{name} (no stream)"))),
    };
    let mut g = m.with_stream(stream, quadratic_stream())?;
    g.name = format!("{name}-generic");
    Ok(g)
}

/// `x[n+1] + x[n-1] = 1 + a[n]/x[n]^k` with the stream constraint that
/// confines its singularity: `a[n+4] = -a[n]` for k ≥ 2 and
/// `a[n+4] = a[n+3] + a[n+1] - a[n]` for k = 1.
pub fn hv_k(k: u32) -> Result<Mapping, MappingError> {
    let stream = match k {
        0 => return Err(MappingError::BadDefinition("k must be positive".into())),
        1 => CoefficientStream::recurrence(
            q_list(&[1, 0, 1, -1]),
            vec![rat(1, 1), rat(2, 1), rat(3, 1), rat(5, 1)],
        )?,
        _ => CoefficientStream::periodic(q_list(&[1, 2, 3, 5, -1, -2, -3, -5]))?,
    };
    let update = if k == 1 {
        "1 + a/x - y".to_string()
    } else {
        format!("1 + a/x^{k} - y")
    };
    let mut m = Mapping::new(
        "eq17-hv-k",
        &update,
        BTreeMap::new(),
        one_stream("a", stream),
    )?;
    if k != 2 {
        m.name = format!("eq17-hv-k{k}");
    }
    Ok(m)
}

/// The two-parameter map with `b = 0`.
pub fn bedford_kim_b0() -> Result<Mapping, MappingError> {
    let mut m = get("eq20-bedford-kim")?.with_parameter("b", rat(0, 1))?;
    m.name = "eq20-bedford-kim-b0".to_string();
    Ok(m)
}

/// Variant names accepted by [`resolve`] besides [`ENTRIES`].
pub const VARIANTS: &[CatalogEntry] = &[
    CatalogEntry {
        name: "eq17-hv-k1",
        description: "eq17-hv-k with x[n]^1 and a[n+4] = a[n+3] + a[n+1] - a[n]",
    },
    CatalogEntry {
        name: "eq17-hv-k3",
        description: "eq17-hv-k with x[n]^3",
    },
    CatalogEntry {
        name: "eq20-bedford-kim-b0",
        description: "eq20-bedford-kim with b = 0",
    },
    CatalogEntry {
        name: "<name>-generic",
        description: "stream replaced by 1 + n + n^2/2 (eq12, eq17, eq27, eq31)",
    },
];

/// [`get`], plus the variants `eq17-hv-kK`, `eq20-bedford-kim-b0` and
/// `<name>-generic`.
pub fn resolve(name: &str) -> Result<Mapping, MappingError> {
    if let Some(base) = name.strip_suffix("-generic") {
        return generic(base);
    }
    if name == "eq20-bedford-kim-b0" {
        return bedford_kim_b0();
    }
    if let Some(k) = name.strip_prefix("eq17-hv-k").filter(|k| !k.is_empty()) {
        let k: u32 = k
            .parse()
            .map_err(|_| MappingError::UnknownMapping(name.to_string()))?;
        return hv_k(k);
    }
    get(name)
}

/// Every catalog mapping by name.
pub fn all() -> Vec<Mapping> {
    ENTRIES
        .iter()
        .map(|e| get(e.name).expect("catalog entries parse"))
        .collect()
}
