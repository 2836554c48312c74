//! Deterministic generators of finite Blaschke products.
//!
//! Random families draw from `ChaCha8Rng::seed_from_u64(seed)` (the
//! ChaCha stream cipher with 8 rounds, as in the `rand_chacha` crate).
//! Uniform reals are `(next_u64() >> 11)·2⁻⁵³`. A zero is drawn as two
//! consecutive reals `u, v`: its hyperbolic radius solves
//! `cosh s = 1 + u(cosh S - 1)` with `S = 2 artanh(r_max)`, its Euclidean
//! modulus is `tanh(s/2)` and its argument `2πv`.

use std::f64::consts::TAU;

use apha_core::blaschke::BlaschkeProduct;
use apha_core::geometry::DiskPoint;
use apha_core::{Error, Result};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

fn default_r_max() -> f64 {
    0.9
}

/// A named generator with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `z, z², …, z^{d_max}`.
    Monomials { d_max: usize },
    /// `n` products of degree `d` with hyperbolic-area uniform zeros in
    /// `|a| ≤ r_max`. With `centered` the first zero is `0`.
    RandomUniform {
        n: usize,
        d: usize,
        #[serde(default = "default_r_max")]
        r_max: f64,
        #[serde(default)]
        centered: bool,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Members `j = 1..=k`, member `j` with zeros `1 - 2^{-i}`, `i ≤ j`.
    RadialChain { k: usize },
    /// Members `j = 1..=n`, member `j` with `j` zeros on `|a| = 1 - spread`
    /// spread over an angle `spread` around `center_theta`, plus a zero at
    /// the origin.
    Cluster { n: usize, center_theta: f64, spread: f64 },
    /// `F∘G` for each listed pair.
    Compositions { pairs: Vec<(ZeroList, ZeroList)> },
    /// Explicit products.
    Explicit { members: Vec<ZeroList> },
}

/// Zeros as `[re, im]` pairs with a rotation angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroList {
    pub zeros: Vec<[f64; 2]>,
    #[serde(default)]
    pub rotation_theta: f64,
}

impl ZeroList {
    pub fn to_product(&self) -> Result<BlaschkeProduct> {
        let pts = self
            .zeros
            .iter()
            .map(|&[x, y]| DiskPoint::new(x, y))
            .collect::<Result<Vec<_>>>()?;
        BlaschkeProduct::new(&pts, self.rotation_theta)
    }
}

/// A generated product with a stable identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub id: String,
    pub product: BlaschkeProduct,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A zero equidistributed for hyperbolic area in `|a| ≤ r_max`.
pub fn hyperbolic_uniform_zero(rng: &mut ChaCha8Rng, r_max: f64) -> Result<DiskPoint> {
    let big_s = 2.0 * r_max.atanh();
    let (u, v) = (uniform(rng), uniform(rng));
    let s = (1.0 + u * (big_s.cosh() - 1.0)).acosh();
    DiskPoint::from_polar((0.5 * s).tanh(), TAU * v)
}

impl FamilySpec {
    /// Short label, e.g. `radial_chain(5)`.
    pub fn label(&self) -> String {
        match self {
            FamilySpec::Monomials { d_max } => format!("monomials({d_max})"),
            FamilySpec::RandomUniform { n, d, .. } => format!("random_uniform({n},{d})"),
            FamilySpec::RadialChain { k } => format!("radial_chain({k})"),
            FamilySpec::Cluster { n, .. } => format!("cluster({n})"),
            FamilySpec::Compositions { pairs } => format!("compositions({})", pairs.len()),
            FamilySpec::Explicit { members } => format!("explicit({})", members.len()),
        }
    }

    /// The members, in a fixed order. `default_seed` is used when the spec
    /// carries no seed of its own.
    pub fn generate(&self, default_seed: u64) -> Result<Vec<Member>> {
        let label = self.label();
        let products: Vec<BlaschkeProduct> = match self {
            FamilySpec::Monomials { d_max } => {
                if *d_max == 0 {
                    return Err(Error::InvalidArgument("monomials needs d_max ≥ 1".into()));
                }
                (1..=*d_max).map(BlaschkeProduct::monomial).collect()
            }
            FamilySpec::RandomUniform {
                n,
                d,
                r_max,
                centered,
                seed,
            } => {
                if *d == 0 || !(*r_max > 0.0 && *r_max < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "random_uniform needs d ≥ 1 and 0 < r_max < 1, got d = {d}, r_max = {r_max}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(default_seed));
                let mut out = Vec::with_capacity(*n);
                for _ in 0..*n {
                    let mut zeros = Vec::with_capacity(*d);
                    if *centered {
                        zeros.push(DiskPoint::ORIGIN);
                    }
                    while zeros.len() < *d {
                        zeros.push(hyperbolic_uniform_zero(&mut rng, *r_max)?);
                    }
                    out.push(BlaschkeProduct::new(&zeros, 0.0)?);
                }
                out
            }
            FamilySpec::RadialChain { k } => (1..=*k)
                .map(|j| {
                    let zeros: Vec<DiskPoint> = (1..=j)
                        .map(|i| DiskPoint::real(1.0 - 0.5f64.powi(i as i32)))
                        .collect::<Result<_>>()?;
                    BlaschkeProduct::new(&zeros, 0.0)
                })
                .collect::<Result<_>>()?,
            FamilySpec::Cluster {
                n,
                center_theta,
                spread,
            } => {
                if !(*spread > 0.0 && *spread < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "cluster spread {spread} must lie in (0, 1)"
                    )));
                }
                (1..=*n)
                    .map(|j| {
                        let mut zeros = vec![DiskPoint::ORIGIN];
                        for i in 0..j {
                            let t = if j == 1 { 0.0 } else { i as f64 / (j - 1) as f64 - 0.5 };
                            zeros.push(DiskPoint::from_polar(1.0 - spread, center_theta + spread * t)?);
                        }
                        BlaschkeProduct::new(&zeros, 0.0)
                    })
                    .collect::<Result<_>>()?
            }
            FamilySpec::Compositions { pairs } => pairs
                .iter()
                .map(|(f, g)| f.to_product()?.compose(&g.to_product()?))
                .collect::<Result<_>>()?,
            FamilySpec::Explicit { members } => members.iter().map(ZeroList::to_product).collect::<Result<_>>()?,
        };
        Ok(products
            .into_iter()
            .enumerate()
            .map(|(i, product)| Member {
                id: format!("{label}#{i}"),
                product,
            })
            .collect())
    }
}
