//! Extraction of the associative algebra on `Ext^•(E,E)` from a cubic
//! potential, and the unit / associativity / Calabi-Yau pairing checks.
//!
//! Basis elements correspond to coordinates: `e_v` to `alpha_v`, `omega_v`
//! to `beta_v`, one degree-1 class per arrow coordinate. The triple products
//! are read off cyclic coefficients of the potential through the pairing:
//!
//! ```text
//! <m2(a,b), c> = eps(a,b,c) · (3 / orbit size) · coeff_W(z_a z_b z_c)
//! eps(a,b,c)   = (-1)^{deg z_b · deg e_a + deg z_c · (deg e_a + deg e_b)}
//! ```
//!
//! where `deg e = 1 - deg z`. The sign is the Koszul cost of pulling the
//! coordinates out of `<m2(gamma,gamma), gamma>` for the odd superfield
//! `gamma = sum z_a e_a`; the stabilizer factor handles repeated-letter
//! orbits. This is the normalization under which the degree-0 classes act as
//! the unit.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::words::{canonical_cyclic, CyclicClass, VarKind};
use crate::{Alphabet, CyclicSeries, EngineError, Result, Scalar, VarId, Word};

/// A graded basis element of `Ext^•`, tied to the coordinate it is dual to.
#[derive(Clone, Debug)]
pub struct BasisElem {
    pub label: String,
    pub deg: i64,
    pub coord: VarId,
}

/// Structure constants and pairing of the extracted algebra.
#[derive(Clone, Debug)]
pub struct AlgebraTable {
    pub basis: Vec<BasisElem>,
    /// `product[a][b][c]`: coefficient of basis `c` in `m2(a, b)`.
    pub product: Vec<Vec<Vec<Scalar>>>,
    /// `pairing[a][b] = <a, b>`.
    pub pairing: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn reading_coeff(alpha: &Alphabet, w: &CyclicSeries, word: &Word) -> Result<Scalar> {
    if !alpha.compose_check(word, false) || !alpha.compose_check(word, true) {
        return Ok(Scalar::zero());
    }
    Ok(match canonical_cyclic(alpha, word)? {
        CyclicClass::Zero => Scalar::zero(),
        CyclicClass::NonZero { rep, sign } => {
            let c = w.coeff(&rep);
            if sign < 0 {
                -c
            } else {
                c
            }
        }
    })
}

fn orbit_size(word: &Word) -> usize {
    let n = word.len();
    let mut distinct = 0;
    'outer: for r in 0..n {
        for s in 0..r {
            let same = (0..n).all(|i| word.letters[(i + r) % n] == word.letters[(i + s) % n]);
            if same {
                continue 'outer;
            }
        }
        distinct += 1;
    }
    distinct.max(1)
}

/// Reads the algebra of a cubic Maurer-Cartan potential.
pub fn extract_algebra(alpha: &Alphabet, w: &CyclicSeries) -> Result<AlgebraTable> {
    let degs = w.degrees(alpha);
    if degs.iter().any(|&(_, cyc, _)| cyc != 3) {
        return Err(EngineError::NotCubic(format!("degrees {degs:?}")));
    }
    let residual = crate::bracket::master_residual(alpha, w)?;
    if !residual.is_zero() {
        return Err(EngineError::NotMaurerCartan(residual.display(alpha)));
    }

    let mut basis = Vec::new();
    for z in alpha.ids() {
        let v = alpha.var(z);
        let (label, deg) = match v.kind {
            VarKind::Alpha => (v.name.replacen("alpha", "e", 1), 0),
            VarKind::Beta => (v.name.replacen("beta", "omega", 1), 2),
            VarKind::Arrow => (format!("[{}]", v.name), 1),
        };
        basis.push(BasisElem {
            label,
            deg,
            coord: z,
        });
    }
    let dim = basis.len();

    let mut pairing = vec![vec![Scalar::zero(); dim]; dim];
    for (i, bi) in basis.iter().enumerate() {
        let dual = alpha.dual(bi.coord)?;
        let j = basis.iter().position(|b| b.coord == dual).unwrap();
        let v = alpha.var(bi.coord);
        pairing[i][j] = match v.kind {
            VarKind::Alpha | VarKind::Beta => Scalar::one(),
            VarKind::Arrow => {
                if v.pair_leader {
                    Scalar::one()
                } else {
                    -Scalar::one()
                }
            }
        };
    }

    // triple brackets <m2(a,b), c>
    let mut triple = vec![vec![vec![Scalar::zero(); dim]; dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let word = Word::new(vec![basis[a].coord, basis[b].coord, basis[c].coord]);
                let raw = reading_coeff(alpha, w, &word)?;
                if raw.is_zero() {
                    continue;
                }
                let zb = 1 - basis[b].deg;
                let zc = 1 - basis[c].deg;
                let ea = basis[a].deg;
                let eb = basis[b].deg;
                let exp = (zb * ea + zc * (ea + eb)).rem_euclid(2);
                let eps = if exp == 0 { Scalar::one() } else { -Scalar::one() };
                let orbit = orbit_size(&word) as i64;
                triple[a][b][c] =
                    eps * raw * Scalar::new(3.into(), orbit.into());
            }
        }
    }

    // invert the pairing to turn <m2(a,b), c> into coefficients of m2(a,b)
    let pinv = invert(&pairing).ok_or_else(|| {
        EngineError::NotUnital("pairing matrix is singular".to_string())
    })?;
    let mut product = vec![vec![vec![Scalar::zero(); dim]; dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            // lambda_d with sum_d lambda_d <e_d, e_c> = <m2(a,b), e_c>
            for d in 0..dim {
                let mut acc = Scalar::zero();
                for c in 0..dim {
                    acc += &triple[a][b][c] * &pinv[c][d];
                }
                product[a][b][d] = acc;
            }
            // grading: products land in degree deg a + deg b
            for d in 0..dim {
                if !product[a][b][d].is_zero()
                    && basis[d].deg != basis[a].deg + basis[b].deg
                {
                    return Err(EngineError::NotUnital(format!(
                        "product {}·{} has a component in degree {}",
                        basis[a].label, basis[b].label, basis[d].deg
                    )));
                }
            }
        }
    }

    let table = AlgebraTable {
        basis,
        product,
        pairing,
    };
    let unit = check_unit_assoc(&table);
    if unit.failures.iter().any(|f| f.starts_with("unit")) {
        return Err(EngineError::NotUnital(unit.failures.join("; ")));
    }
    Ok(table)
}

/// Exact inverse of a small square matrix; `None` when singular.
fn invert(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut inv: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let pivot = a[c][c].clone();
        for j in 0..n {
            a[c][j] /= &pivot;
            inv[c][j] /= &pivot;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                let t = &a[c][j] * &f;
                a[r][j] -= t;
                let t = &inv[c][j] * &f;
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

/// Exact determinant (used for nondegeneracy reporting).
pub fn determinant(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut det = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Scalar::zero();
        };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        let pivot = a[c][c].clone();
        det *= &pivot;
        for r in (c + 1)..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &pivot;
            for j in c..n {
                let t = &a[c][j] * &f;
                a[r][j] -= t;
            }
        }
    }
    det
}

/// Verifies the two-sided unit law and full associativity over all triples.
pub fn check_unit_assoc(t: &AlgebraTable) -> CheckReport {
    let dim = t.basis.len();
    let mut failures = Vec::new();
    // e = sum of degree-0 basis elements
    let unit: Vec<usize> = (0..dim).filter(|&i| t.basis[i].deg == 0).collect();
    for b in 0..dim {
        for c in 0..dim {
            let mut left = Scalar::zero();
            let mut right = Scalar::zero();
            for &e in &unit {
                left += &t.product[e][b][c];
                right += &t.product[b][e][c];
            }
            let expect = if b == c { Scalar::one() } else { Scalar::zero() };
            if left != expect {
                failures.push(format!(
                    "unit: e·{} differs from {} in component {}",
                    t.basis[b].label, t.basis[b].label, t.basis[c].label
                ));
            }
            if right != expect {
                failures.push(format!(
                    "unit: {}·e differs from {} in component {}",
                    t.basis[b].label, t.basis[b].label, t.basis[c].label
                ));
            }
        }
    }
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for out in 0..dim {
                    let mut lhs = Scalar::zero();
                    let mut rhs = Scalar::zero();
                    for d in 0..dim {
                        lhs += &t.product[a][b][d] * &t.product[d][c][out];
                        rhs += &t.product[b][c][d] * &t.product[a][d][out];
                    }
                    if lhs != rhs {
                        failures.push(format!(
                            "assoc: ({}·{})·{} != {}·({}·{}) in component {}",
                            t.basis[a].label,
                            t.basis[b].label,
                            t.basis[c].label,
                            t.basis[a].label,
                            t.basis[b].label,
                            t.basis[c].label,
                            t.basis[out].label
                        ));
                    }
                }
            }
        }
    }
    CheckReport {
        name: "unit_assoc".to_string(),
        failures,
    }
}

/// Verifies nondegeneracy, invariance `<ab,c> = <a,bc>`, grading of the
/// pairing, and antisymmetry of the degree-1 block.
pub fn check_cy_pairing(t: &AlgebraTable) -> CheckReport {
    let dim = t.basis.len();
    let mut failures = Vec::new();
    if determinant(&t.pairing).is_zero() {
        failures.push("pairing matrix is singular".to_string());
    }
    for a in 0..dim {
        for b in 0..dim {
            if !t.pairing[a][b].is_zero() && t.basis[a].deg + t.basis[b].deg != 2 {
                failures.push(format!(
                    "pairing pairs degrees {} and {}",
                    t.basis[a].deg, t.basis[b].deg
                ));
            }
            if t.basis[a].deg == 1 && t.basis[b].deg == 1 {
                let sym = &t.pairing[a][b] + &t.pairing[b][a];
                if !sym.is_zero() {
                    failures.push(format!(
                        "Ext^1 block not antisymmetric at ({}, {})",
                        t.basis[a].label, t.basis[b].label
                    ));
                }
            }
            for c in 0..dim {
                // <ab, c> vs <a, bc>
                let mut lhs = Scalar::zero();
                let mut rhs = Scalar::zero();
                for d in 0..dim {
                    lhs += &t.product[a][b][d] * &t.pairing[d][c];
                    rhs += &t.product[b][c][d] * &t.pairing[a][d];
                }
                if lhs != rhs {
                    failures.push(format!(
                        "invariance fails at ({}, {}, {})",
                        t.basis[a].label, t.basis[b].label, t.basis[c].label
                    ));
                }
            }
        }
    }
    CheckReport {
        name: "cy_pairing".to_string(),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{canonical_potential, one_vertex_quiver, shifted_alphabet};

    fn table(n: usize) -> AlgebraTable {
        let q = one_vertex_quiver(n).unwrap();
        let a = shifted_alphabet(&q).unwrap();
        let w = canonical_potential(&q).unwrap();
        extract_algebra(&a, &w).unwrap()
    }

    fn idx(t: &AlgebraTable, label: &str) -> usize {
        t.basis.iter().position(|b| b.label == label).unwrap()
    }

    #[test]
    fn wcan_n1_unit_and_products() {
        let t = table(1);
        let e = idx(&t, "e");
        let x = idx(&t, "[x1]");
        let xi = idx(&t, "[xi1]");
        let om = idx(&t, "omega");
        for z in 0..t.basis.len() {
            for c in 0..t.basis.len() {
                let expect = if z == c { Scalar::one() } else { Scalar::zero() };
                assert_eq!(t.product[e][z][c], expect);
                assert_eq!(t.product[z][e][c], expect);
            }
        }
        // x·xi = ±ω, xi·x the opposite sign
        let s = t.product[x][xi][om].clone();
        assert!(s == Scalar::one() || s == -Scalar::one());
        assert_eq!(t.product[xi][x][om], -s);
        // ω annihilates degree-1 classes
        for c in 0..t.basis.len() {
            assert!(t.product[om][x][c].is_zero());
            assert!(t.product[x][om][c].is_zero());
        }
    }

    #[test]
    fn wcan_tables_pass_checks() {
        for n in 1..=4usize {
            let t = table(n);
            assert!(check_unit_assoc(&t).pass(), "n={n}");
            assert!(check_cy_pairing(&t).pass(), "n={n}");
            // grading of structure constants
            for a in 0..t.basis.len() {
                for b in 0..t.basis.len() {
                    for c in 0..t.basis.len() {
                        if !t.product[a][b][c].is_zero() {
                            assert_eq!(t.basis[c].deg, t.basis[a].deg + t.basis[b].deg);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn n0_table_passes() {
        let t = table(0);
        assert_eq!(t.basis.len(), 2);
        assert!(check_unit_assoc(&t).pass());
        assert!(check_cy_pairing(&t).pass());
    }

    #[test]
    fn pairing_n1_shape() {
        let t = table(1);
        let x = idx(&t, "[x1]");
        let xi = idx(&t, "[xi1]");
        assert_eq!(t.pairing[x][xi], Scalar::one());
        assert_eq!(t.pairing[xi][x], -Scalar::one());
        assert!(!determinant(&t.pairing).is_zero());
    }

    #[test]
    fn broken_table_detected() {
        // symmetric product on the loop pair against an antisymmetric pairing
        let mut t = table(1);
        let x = idx(&t, "[x1]");
        let xi = idx(&t, "[xi1]");
        let om = idx(&t, "omega");
        t.product[xi][x][om] = t.product[x][xi][om].clone();
        let rep = check_cy_pairing(&t);
        assert!(!rep.pass());
    }

    #[test]
    fn zero_pairing_row_detected() {
        let mut t = table(1);
        for v in t.pairing[0].iter_mut() {
            *v = Scalar::zero();
        }
        let rep = check_cy_pairing(&t);
        assert!(rep.failures.iter().any(|f| f.contains("singular")));
    }

    #[test]
    fn non_cubic_rejected() {
        let a = crate::quiver::one_vertex_alphabet(1);
        let x = a.lookup("x1").unwrap();
        let xi = a.lookup("xi1").unwrap();
        let w = CyclicSeries::from_words(
            &a,
            &[(Word::new(vec![x, xi, x, xi]), Scalar::one())],
        )
        .unwrap();
        assert!(matches!(
            extract_algebra(&a, &w),
            Err(EngineError::NotCubic(_))
        ));
    }
}
