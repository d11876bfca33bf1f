//! Edit-operation costs and the exact rational arithmetic they use.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact distance values.
pub type Rational = Ratio<i64>;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// The six per-operation costs that define graph edit distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostModel {
    pub node_ins: Rational,
    pub node_del: Rational,
    pub node_sub: Rational,
    pub edge_ins: Rational,
    pub edge_del: Rational,
    pub edge_sub: Rational,
}

impl Default for CostModel {
    fn default() -> Self {
        Self::unit()
    }
}

impl CostModel {
    pub fn unit() -> Self {
        let one = rational(1);
        CostModel { node_ins: one, node_del: one, node_sub: one, edge_ins: one, edge_del: one, edge_sub: one }
    }

    pub fn as_array(&self) -> [Rational; 6] {
        [self.node_ins, self.node_del, self.node_sub, self.edge_ins, self.edge_del, self.edge_sub]
    }

    pub fn from_array(c: [Rational; 6]) -> Self {
        CostModel { node_ins: c[0], node_del: c[1], node_sub: c[2], edge_ins: c[3], edge_del: c[4], edge_sub: c[5] }
    }

    /// Non-negativity and non-decomposable substitutions.
    pub fn check(&self) -> Result<()> {
        if self.as_array().iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidCostModel("costs must be non-negative".into()));
        }
        if self.node_sub > self.node_ins + self.node_del {
            return Err(Error::InvalidCostModel("node substitution exceeds deletion + insertion".into()));
        }
        if self.edge_sub > self.edge_ins + self.edge_del {
            return Err(Error::InvalidCostModel("edge substitution exceeds deletion + insertion".into()));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.node_ins == self.node_del && self.edge_ins == self.edge_del
    }

    /// Valid and symmetric, so that GED is a metric.
    pub fn check_metric(&self) -> Result<()> {
        self.check()?;
        if !self.is_symmetric() {
            return Err(Error::InvalidCostModel(
                "metric mode requires insertion and deletion costs to match".into(),
            ));
        }
        Ok(())
    }

    /// Integer costs in units of `1/scale`, where `scale` is twice the
    /// least common multiple of the denominators so halved edge costs stay
    /// integral.
    pub fn scaled(&self) -> Result<ScaledCosts> {
        self.check()?;
        let lcm = self.as_array().iter().fold(1i64, |acc, c| acc.lcm(c.denom()));
        let scale = lcm.checked_mul(2).ok_or(Error::Overflow)?;
        let conv = |c: Rational| -> Result<i64> {
            c.numer().checked_mul(scale / c.denom()).ok_or(Error::Overflow)
        };
        Ok(ScaledCosts {
            scale,
            node_ins: conv(self.node_ins)?,
            node_del: conv(self.node_del)?,
            node_sub: conv(self.node_sub)?,
            edge_ins: conv(self.edge_ins)?,
            edge_del: conv(self.edge_del)?,
            edge_sub: conv(self.edge_sub)?,
        })
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.as_array().iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses six comma-separated rationals in the order
/// `node_ins,node_del,node_sub,edge_ins,edge_del,edge_sub`.
impl FromStr for CostModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<Rational>()
                    .map_err(|e| Error::InvalidCostModel(format!("`{p}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let arr: [Rational; 6] = values
            .try_into()
            .map_err(|v: Vec<_>| Error::InvalidCostModel(format!("expected 6 costs, got {}", v.len())))?;
        let model = CostModel::from_array(arr);
        model.check()?;
        Ok(model)
    }
}

/// Integer image of a [`CostModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledCosts {
    pub scale: i64,
    pub node_ins: i64,
    pub node_del: i64,
    pub node_sub: i64,
    pub edge_ins: i64,
    pub edge_del: i64,
    pub edge_sub: i64,
}

impl ScaledCosts {
    pub fn to_rational(&self, value: i64) -> Rational {
        Rational::new(value, self.scale)
    }

    /// Scaled value of `r`, rounded down.
    pub fn floor_scaled(&self, r: Rational) -> i64 {
        (r * rational(self.scale)).floor().to_integer()
    }

    /// Cheapest way to turn multiset `a` into multiset `b`, both given as
    /// per-label counts indexed by interned label id.
    pub fn multiset_cost(&self, a: &[u32], b: &[u32], sub: i64, del: i64, ins: i64) -> i64 {
        let (mut na, mut nb, mut common) = (0i64, 0i64, 0i64);
        for (x, y) in a.iter().zip(b) {
            na += *x as i64;
            nb += *y as i64;
            common += (*x).min(*y) as i64;
        }
        let matched = na.min(nb);
        let surplus = if na > nb { (na - nb) * del } else { (nb - na) * ins };
        sub * (matched - common) + surplus
    }
}
