//! Exact fixtures: the (α, Ω) monodromy matrix around w = 1/4 and the
//! connection matrix C(0, 1/4) of the order-six χ⁽³⁾ operator.

use std::fmt;

use rug::{Float, Rational};
use serde_json::json;

use super::symbolic::SymbolicMatrix;
use crate::constants::eval_basis_element;
use crate::error::Result;
use crate::kernel::linalg::CMatrix;
use crate::kernel::mvpoly::{BiPoly, MultivarRatFun};
use crate::kernel::BigComplex;

fn term(q: i64, a: usize, b: usize) -> BiPoly {
    BiPoly::monomial(Rational::from(q), a, b)
}

fn sum(ts: &[(i64, usize, usize)]) -> BiPoly {
    ts.iter().fold(BiPoly::zero(), |acc, &(q, a, b)| &acc + &term(q, a, b))
}

/// `24α⁴·M(α, Ω)` with the blocks as printed.
fn chi3_numerators() -> Vec<Vec<BiPoly>> {
    let z = BiPoly::zero;
    let rho1 = sum(&[(5, 4, 0), (8, 0, 2), (8, 2, 2)]);
    let rho2 = sum(&[(4, 2, 1), (-75, 0, 1), (-15, 2, 0)]);
    let rho3 = sum(&[(5, 2, 0), (4, 0, 1), (4, 2, 1)]);
    let a4 = || term(24, 4, 0);
    vec![
        vec![term(-24, 4, 0), z(), z(), z(), z(), z()],
        vec![term(-48, 4, 0), a4(), term(-144, 2, 1), z(), z(), z()],
        vec![z(), z(), a4(), z(), z(), z()],
        vec![
            &term(-48, 0, 0) * &rho1,
            &term(32, 0, 1) * &rho2,
            &term(48, 0, 1) * &sum(&[(9, 2, 0), (80, 0, 1)]),
            a4(),
            term(-384, 2, 1),
            term(1536, 0, 2),
        ],
        vec![
            &term(12, 2, 0) * &rho3,
            &sum(&[(75, 0, 0), (-4, 2, 0)]) * &term(4, 2, 1),
            term(-300, 2, 1),
            z(),
            a4(),
            term(-192, 2, 1),
        ],
        vec![
            &sum(&[(-87, 0, 0), (-8, 2, 0)]) * &term(1, 4, 0),
            z(),
            &sum(&[(4, 2, 0), (-75, 0, 0)]) * &term(3, 2, 1),
            z(),
            z(),
            a4(),
        ],
    ]
}

/// `M_{w=0}(1/4)(α, Ω)`: the printed matrix divided by `24α⁴`.
pub fn chi3_fixture() -> SymbolicMatrix {
    let den = term(24, 4, 0);
    let rows = chi3_numerators();
    SymbolicMatrix::from_fn(6, |i, j| MultivarRatFun::new(rows[i][j].clone(), den.clone()))
}

/// `M(α, kΩ)`.
pub fn scale_omega(m: &SymbolicMatrix, k: i64) -> SymbolicMatrix {
    let k = Rational::from(k);
    SymbolicMatrix::from_fn(m.size(), |i, j| m.get(i, j).scale_omega(&k))
}

/// First differing entry of `lhs − rhs`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub difference: String,
}

fn witness(lhs: &SymbolicMatrix, rhs: &SymbolicMatrix) -> Option<Witness> {
    let d = lhs.sub(rhs);
    for i in 0..d.size() {
        for j in 0..d.size() {
            if !d.get(i, j).is_zero() {
                return Some(Witness { row: i + 1, col: j + 1, difference: d.get(i, j).to_string() });
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct Chi3Report {
    pub identities: Vec<IdentityCheck>,
    pub det: String,
    /// `(N, holds, witness)` for `M^N = M(α, NΩ)`, N = 1..6.
    pub powers: Vec<(u64, bool, Option<Witness>)>,
}

impl Chi3Report {
    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.identities.iter().find(|c| c.name == name)
    }

    pub fn power_holds(&self) -> Vec<u64> {
        self.powers.iter().filter(|p| p.1).map(|p| p.0).collect()
    }

    pub fn all_identities_hold(&self) -> bool {
        self.identities.iter().all(|c| c.holds)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let w = |w: &Option<Witness>| match w {
            Some(w) => json!({"row": w.row, "col": w.col, "difference": w.difference}),
            None => serde_json::Value::Null,
        };
        json!({
            "identities": self.identities.iter().map(|c| json!({
                "name": c.name,
                "statement": c.statement,
                "holds": c.holds,
                "witness": w(&c.witness),
            })).collect::<Vec<_>>(),
            "det": self.det,
            "power_statement": self.powers.iter().map(|(n, h, wi)| json!({
                "N": n,
                "holds": h,
                "witness": w(wi),
            })).collect::<Vec<_>>(),
        })
    }
}

fn check(name: &'static str, statement: &'static str, lhs: &SymbolicMatrix, rhs: &SymbolicMatrix) -> IdentityCheck {
    let witness = witness(lhs, rhs);
    IdentityCheck { name, statement, holds: witness.is_none(), witness }
}

/// Exact identities of the fixture over ℚ(α, Ω).
pub fn chi3_fixture_checks() -> Chi3Report {
    let m = chi3_fixture();
    let id = SymbolicMatrix::identity(6);
    let m0 = scale_omega(&m, 0);
    let mut identities = vec![
        check("a", "M(a,W) M(a,-W) = Id", &m.mul(&scale_omega(&m, -1)), &id),
        check("b", "M(a,W)^3 = M(a,3W)", &m.pow(3), &scale_omega(&m, 3)),
        check("c", "M(a,W)^2 = M(a,0) M(a,2W)", &m.pow(2), &m0.mul(&scale_omega(&m, 2))),
    ];
    let det = m.det();
    let minus_one = MultivarRatFun::constant(Rational::from(-1));
    let dd = &det - &minus_one;
    identities.push(IdentityCheck {
        name: "d",
        statement: "det M(a,W) = -1",
        holds: dd.is_zero(),
        witness: (!dd.is_zero()).then(|| Witness { row: 0, col: 0, difference: dd.to_string() }),
    });
    identities.push(check("e", "M(a,0)^2 = Id", &m0.pow(2), &id));
    let powers = (1..=6u64)
        .map(|n| {
            let w = witness(&m.pow(n), &scale_omega(&m, n as i64));
            (n, w.is_none(), w)
        })
        .collect();
    Chi3Report { identities, det: det.to_string(), powers }
}

/// Elements of the constant basis used by the connection-matrix fixture.
pub const C014_BASIS: [&str; 8] = ["1", "pi", "pi^2", "1/pi", "1/pi^2", "sqrt3/pi", "pi*sqrt3", "I3plus"];

/// Rational combination over [`C014_BASIS`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstantForm {
    pub coeffs: [Rational; 8],
}

impl ConstantForm {
    pub fn zero() -> Self {
        ConstantForm { coeffs: Default::default() }
    }

    fn with(terms: &[(usize, i64, i64)]) -> Self {
        let mut f = ConstantForm::zero();
        for &(k, n, d) in terms {
            f.coeffs[k] += Rational::from((n, d));
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    pub fn eval(&self, digits: u32) -> Result<BigComplex> {
        let mut acc = BigComplex::zero(digits + 10);
        for (c, name) in self.coeffs.iter().zip(C014_BASIS) {
            if *c != 0 {
                acc = acc + eval_basis_element(name, digits + 10)?.mul_rational(c);
            }
        }
        Ok(acc.with_digits(digits))
    }

    pub fn eval_real(&self, digits: u32) -> Result<Float> {
        Ok(self.eval(digits)?.re)
    }
}

impl fmt::Display for ConstantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        for (c, name) in self.coeffs.iter().zip(C014_BASIS) {
            if *c == 0 {
                continue;
            }
            parts.push(if name == "1" { c.to_string() } else { format!("{c}*{name}") });
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

/// C(0, 1/4) exactly as printed.
pub fn c014_fixture() -> Vec<Vec<ConstantForm>> {
    let c = ConstantForm::with;
    let z = ConstantForm::zero;
    // basis indices: 0:1 1:π 2:π² 3:1/π 4:1/π² 5:√3/π 6:π√3 7:I₃⁺
    vec![
        vec![c(&[(0, 1, 1)]), z(), z(), z(), z(), z()],
        vec![c(&[(0, 1, 1)]), z(), c(&[(5, -9, 64)]), z(), z(), z()],
        vec![z(), c(&[(6, -3, 32)]), z(), z(), z(), z()],
        vec![c(&[(0, 5, 1)]), c(&[(0, 1, 3), (7, -2, 1)]), c(&[(5, 3, 64)]), z(), z(), c(&[(4, 1, 16)])],
        vec![c(&[(0, -5, 4)]), c(&[(6, -3, 32)]), c(&[(5, 45, 256)]), z(), c(&[(0, 1, 32)]), z()],
        vec![
            c(&[(0, 29, 16), (2, -2, 3)]),
            c(&[(6, 15, 64)]),
            c(&[(5, -225, 1024), (6, -3, 64)]),
            c(&[(2, 1, 64)]),
            z(),
            z(),
        ],
    ]
}

/// Numeric rendering of [`c014_fixture`].
pub fn c014_numeric(digits: u32) -> Result<CMatrix> {
    c014_fixture().iter().map(|r| r.iter().map(|f| f.eval(digits)).collect()).collect()
}
