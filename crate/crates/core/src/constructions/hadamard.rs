use serde::{Deserialize, Serialize};

use super::{ConstructionBundle, ConstructionObject, PredictedStatus};
use crate::error::{Error, Result};
use crate::spaces::NormSpec;

/// Largest supported Sylvester exponent (order 8192).
pub const MAX_HADAMARD_EXPONENT: u32 = 13;
/// Orders up to `2^8` are re-verified after construction.
const VERIFY_UP_TO: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadamardMatrix {
    entries: Vec<Vec<i8>>,
}

impl HadamardMatrix {
    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.entries
    }

    /// `H H^T == n I` in integer arithmetic.
    pub fn is_orthogonal(&self) -> bool {
        let n = self.order();
        self.entries.iter().enumerate().all(|(i, a)| {
            self.entries.iter().enumerate().all(|(j, b)| {
                let dot: i64 = a.iter().zip(b).map(|(&x, &y)| i64::from(x) * i64::from(y)).sum();
                dot == if i == j { n as i64 } else { 0 }
            })
        })
    }
}

/// `H_1 = [1]`, `H_2n = [[H, H], [H, -H]]`.
pub fn sylvester_hadamard(m: u32) -> Result<HadamardMatrix> {
    if m > MAX_HADAMARD_EXPONENT {
        return Err(Error::input(format!("Hadamard exponent {m} exceeds {MAX_HADAMARD_EXPONENT}")));
    }
    let mut h: Vec<Vec<i8>> = vec![vec![1]];
    for _ in 0..m {
        let top = h.iter().map(|r| r.iter().chain(r.iter()).copied().collect());
        let bottom = h.iter().map(|r| r.iter().copied().chain(r.iter().map(|x| -x)).collect());
        h = top.chain(bottom).collect();
    }
    let h = HadamardMatrix { entries: h };
    if m <= VERIFY_UP_TO && !h.is_orthogonal() {
        return Err(Error::degenerate("Sylvester recursion produced a non-orthogonal matrix"));
    }
    Ok(h)
}

/// Rows of the order-`2^m` Hadamard matrix scaled to unit `l_p` norm,
/// predicted shattered at `1/sqrt(n)`.
pub fn hadamard_shattered_set(m: u32, p: NormSpec) -> Result<ConstructionBundle> {
    if m == 0 {
        return Err(Error::input("Hadamard point set needs m >= 1"));
    }
    let h = sylvester_hadamard(m)?;
    let n = h.order() as f64;
    let scale = if p.is_linf() { 1.0 } else { n.powf(-1.0 / p.p()) };
    let points = h.rows().iter().map(|r| r.iter().map(|&x| f64::from(x) * scale).collect()).collect();
    let notice = (p.p() <= 2.0)
        .then(|| format!("p = {p}: the construction is valid but 1/sqrt(n) is not the tight rate for p <= 2"));
    Ok(ConstructionBundle {
        name: format!("hadamard_m{m}_p{p}"),
        object: ConstructionObject::PointSet { p, points },
        predicted_gamma: n.sqrt().recip(),
        predicted_status: PredictedStatus::Shattered,
        provenance:
            "rows of the Sylvester Hadamard matrix scaled by n^(-1/p); ||sum l_i x_i||_p >= n^(-1/2) for unit-l1 l"
                .into(),
        witnesses: vec![],
        violation: None,
        notice,
    })
}

/// The `n` standard basis vectors of `l_p^n`, shattered exactly up to
/// `||uniform||_p = n^(1/p - 1)`.
pub fn standard_basis_set(n: usize, p: NormSpec) -> Result<ConstructionBundle> {
    if n == 0 {
        return Err(Error::input("standard basis needs n >= 1"));
    }
    let points = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let exponent = if p.is_linf() { -1.0 } else { 1.0 / p.p() - 1.0 };
    Ok(ConstructionBundle {
        name: format!("basis_n{n}_p{p}"),
        object: ConstructionObject::PointSet { p, points },
        predicted_gamma: (n as f64).powf(exponent),
        predicted_status: PredictedStatus::Shattered,
        provenance: "standard basis; ||l||_p >= n^(1/p-1) ||l||_1 with equality at uniform |l|".into(),
        witnesses: vec![],
        violation: None,
        notice: None,
    })
}
