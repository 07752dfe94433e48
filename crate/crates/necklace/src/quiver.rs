//! Symmetric quivers, the classification map from Ext-dimension data, and
//! the canonical potential.
//!
//! The canonical potential of a validated quiver is
//! `sum_v alpha_v^2 beta_v + sum_{pairs (z, z*)} (alpha_{s(z)} z z* - alpha_{t(z)} z* z)`,
//! which restricts to the single-vertex formula on loops. Construction
//! verifies the master equation and fails loudly if it does not hold.

use serde::{Deserialize, Serialize};

use crate::bracket::master_residual;
use crate::words::{scalar_int, GradedVariable, VarKind};
use crate::{Alphabet, CyclicSeries, EngineError, Result, Word};

#[derive(Clone, Debug)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

/// A validated symmetric quiver: even loop count at each vertex and a
/// fixed-point-free, endpoint-reversing arrow involution.
#[derive(Clone, Debug)]
pub struct SymmetricQuiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    /// arrow index -> index of its involution partner
    pub involution: Vec<usize>,
}

/// Wire form of a quiver; field names are part of the JSON schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawQuiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<RawArrow>,
    pub involution: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawArrow {
    pub id: String,
    pub src: String,
    pub dst: String,
}

fn invalid(code: &str, message: String) -> EngineError {
    EngineError::InvalidQuiver {
        code: code.to_string(),
        message,
    }
}

/// Checks symmetry, even loop counts and the involution axioms.
pub fn validate_quiver(raw: &RawQuiver) -> Result<SymmetricQuiver> {
    let vertex_index = |name: &str| -> Result<usize> {
        raw.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| invalid("unknown_vertex", format!("vertex {name} not declared")))
    };
    let mut arrows = Vec::new();
    for a in &raw.arrows {
        arrows.push(Arrow {
            id: a.id.clone(),
            source: vertex_index(&a.src)?,
            target: vertex_index(&a.dst)?,
        });
    }
    let nv = raw.vertices.len();
    let mut adjacency = vec![vec![0usize; nv]; nv];
    for a in &arrows {
        adjacency[a.source][a.target] += 1;
    }
    for i in 0..nv {
        for j in 0..nv {
            if adjacency[i][j] != adjacency[j][i] {
                return Err(invalid(
                    "not_symmetric",
                    format!(
                        "{} arrows {} -> {} but {} arrows {} -> {}",
                        adjacency[i][j],
                        raw.vertices[i],
                        raw.vertices[j],
                        adjacency[j][i],
                        raw.vertices[j],
                        raw.vertices[i]
                    ),
                ));
            }
        }
        if adjacency[i][i] % 2 != 0 {
            return Err(invalid(
                "odd_loops",
                format!(
                    "vertex {} has {} loops; an even number is required",
                    raw.vertices[i], adjacency[i][i]
                ),
            ));
        }
    }

    let arrow_index = |name: &str| -> Result<usize> {
        arrows
            .iter()
            .position(|a| a.id == name)
            .ok_or_else(|| invalid("unknown_arrow", format!("arrow {name} not declared")))
    };
    let mut involution = vec![usize::MAX; arrows.len()];
    for (a, b) in &raw.involution {
        let ia = arrow_index(a)?;
        let ib = arrow_index(b)?;
        if ia == ib {
            return Err(invalid(
                "involution_fixed_point",
                format!("arrow {a} is paired with itself"),
            ));
        }
        if involution[ia] != usize::MAX || involution[ib] != usize::MAX {
            return Err(invalid(
                "involution_not_pairing",
                format!("arrow {a} or {b} appears in more than one pair"),
            ));
        }
        if arrows[ia].source != arrows[ib].target || arrows[ia].target != arrows[ib].source {
            return Err(invalid(
                "involution_not_reversing",
                format!("pair ({a}, {b}) does not reverse endpoints"),
            ));
        }
        involution[ia] = ib;
        involution[ib] = ia;
    }
    if let Some(k) = involution.iter().position(|&p| p == usize::MAX) {
        return Err(invalid(
            "involution_not_total",
            format!("arrow {} has no involution partner", arrows[k].id),
        ));
    }
    Ok(SymmetricQuiver {
        vertices: raw.vertices.clone(),
        arrows,
        involution,
    })
}

impl SymmetricQuiver {
    pub fn to_raw(&self) -> RawQuiver {
        let mut pairs = Vec::new();
        for (i, &j) in self.involution.iter().enumerate() {
            if i < j {
                pairs.push((self.arrows[i].id.clone(), self.arrows[j].id.clone()));
            }
        }
        RawQuiver {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| RawArrow {
                    id: a.id.clone(),
                    src: self.vertices[a.source].clone(),
                    dst: self.vertices[a.target].clone(),
                })
                .collect(),
            involution: pairs,
        }
    }
}

/// Ext-dimension data: `ext1_dim[i][j] = dim Ext^1(E_i, E_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtData {
    pub generators: Vec<String>,
    pub ext1_dim: Vec<Vec<usize>>,
}

/// The classification map: builds the quiver whose arrow multiplicities are
/// the Ext^1 dimensions. Loops and cross arrows are paired in declaration
/// order.
pub fn phi_from_ext(ext: &ExtData) -> Result<SymmetricQuiver> {
    let n = ext.generators.len();
    if ext.ext1_dim.len() != n || ext.ext1_dim.iter().any(|row| row.len() != n) {
        return Err(invalid(
            "not_square",
            format!("ext1_dim must be {n} x {n}"),
        ));
    }
    for i in 0..n {
        for j in 0..n {
            if ext.ext1_dim[i][j] != ext.ext1_dim[j][i] {
                return Err(invalid(
                    "not_symmetric",
                    format!("ext1_dim[{i}][{j}] != ext1_dim[{j}][{i}]"),
                ));
            }
        }
        if ext.ext1_dim[i][i] % 2 != 0 {
            return Err(invalid(
                "odd_diagonal",
                format!(
                    "dim Ext^1(E_{i}, E_{i}) = {} is odd",
                    ext.ext1_dim[i][i]
                ),
            ));
        }
    }
    let single = n == 1;
    let mut arrows: Vec<RawArrow> = Vec::new();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (i, v) in ext.generators.iter().enumerate() {
        let loops = ext.ext1_dim[i][i];
        for k in 1..=loops / 2 {
            let (x, xi) = if single {
                (format!("x{k}"), format!("xi{k}"))
            } else {
                (format!("x{k}_{v}"), format!("xi{k}_{v}"))
            };
            arrows.push(RawArrow {
                id: x.clone(),
                src: v.clone(),
                dst: v.clone(),
            });
            arrows.push(RawArrow {
                id: xi.clone(),
                src: v.clone(),
                dst: v.clone(),
            });
            pairs.push((x, xi));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 1..=ext.ext1_dim[i][j] {
                let gi = &ext.generators[i];
                let gj = &ext.generators[j];
                let fwd = format!("a{k}_{gi}_{gj}");
                let bwd = format!("a{k}_{gj}_{gi}");
                arrows.push(RawArrow {
                    id: fwd.clone(),
                    src: gi.clone(),
                    dst: gj.clone(),
                });
                arrows.push(RawArrow {
                    id: bwd.clone(),
                    src: gj.clone(),
                    dst: gi.clone(),
                });
                pairs.push((fwd, bwd));
            }
        }
    }
    validate_quiver(&RawQuiver {
        vertices: ext.generators.clone(),
        arrows,
        involution: pairs,
    })
}

/// Inverse reading of [`phi_from_ext`] on arrow multiplicities.
pub fn ext_of(q: &SymmetricQuiver) -> ExtData {
    let n = q.vertices.len();
    let mut ext1_dim = vec![vec![0usize; n]; n];
    for a in &q.arrows {
        ext1_dim[a.source][a.target] += 1;
    }
    ExtData {
        generators: q.vertices.clone(),
        ext1_dim,
    }
}

/// The graded coordinate alphabet on `Ext^•(E,E)[1]`: one `(alpha_v, beta_v)`
/// pair per vertex, one degree-0 coordinate per arrow.
pub fn shifted_alphabet(q: &SymmetricQuiver) -> Result<Alphabet> {
    let single = q.vertices.len() == 1;
    let mut alpha = Alphabet::new(q.vertices.clone());
    for (v, name) in q.vertices.iter().enumerate() {
        let (an, bn) = if single {
            ("alpha".to_string(), "beta".to_string())
        } else {
            (format!("alpha_{name}"), format!("beta_{name}"))
        };
        let a_id = alpha.add_var(GradedVariable {
            name: an,
            coh_deg: 1,
            source: v,
            target: v,
            kind: VarKind::Alpha,
            dual: None,
            pair_leader: true,
        })?;
        let b_id = alpha.add_var(GradedVariable {
            name: bn,
            coh_deg: -1,
            source: v,
            target: v,
            kind: VarKind::Beta,
            dual: None,
            pair_leader: false,
        })?;
        alpha.set_dual(a_id, b_id);
    }
    let base = 2 * q.vertices.len() as u32;
    for a in &q.arrows {
        alpha.add_var(GradedVariable {
            name: a.id.clone(),
            coh_deg: 0,
            source: a.source,
            target: a.target,
            kind: VarKind::Arrow,
            dual: None,
            pair_leader: false,
        })?;
    }
    for (i, &j) in q.involution.iter().enumerate() {
        let this = crate::VarId(base + i as u32);
        let partner = crate::VarId(base + j as u32);
        alpha.set_dual(this, partner);
        if i < j {
            alpha.set_pair_leader(this);
        }
    }
    Ok(alpha)
}

/// `W_can`: certified against the master equation at construction.
pub fn canonical_potential(q: &SymmetricQuiver) -> Result<CyclicSeries> {
    let alpha = shifted_alphabet(q)?;
    canonical_potential_in(q, &alpha)
}

pub fn canonical_potential_in(q: &SymmetricQuiver, alpha: &Alphabet) -> Result<CyclicSeries> {
    let single = q.vertices.len() == 1;
    let mut w = CyclicSeries::zero();
    for (v, name) in q.vertices.iter().enumerate() {
        let (an, bn) = if single {
            ("alpha".to_string(), "beta".to_string())
        } else {
            (format!("alpha_{name}"), format!("beta_{name}"))
        };
        let a = alpha.lookup(&an)?;
        let b = alpha.lookup(&bn)?;
        let _ = v;
        w.add_word(alpha, &Word::new(vec![a, a, b]), &scalar_int(1))?;
    }
    for (i, &j) in q.involution.iter().enumerate() {
        if i > j {
            continue;
        }
        let z = alpha.lookup(&q.arrows[i].id)?;
        let zbar = alpha.lookup(&q.arrows[j].id)?;
        let src = q.arrows[i].source;
        let dst = q.arrows[i].target;
        let alpha_at = |v: usize| -> Result<crate::VarId> {
            let name = if single {
                "alpha".to_string()
            } else {
                format!("alpha_{}", q.vertices[v])
            };
            alpha.lookup(&name)
        };
        w.add_word(
            alpha,
            &Word::new(vec![alpha_at(src)?, z, zbar]),
            &scalar_int(1),
        )?;
        w.add_word(
            alpha,
            &Word::new(vec![alpha_at(dst)?, zbar, z]),
            &scalar_int(-1),
        )?;
    }
    let residual = master_residual(alpha, &w)?;
    if !residual.is_zero() {
        return Err(EngineError::NotMaurerCartan(format!(
            "canonical potential arrangement failed: residual {}",
            residual.display(alpha)
        )));
    }
    Ok(w)
}

/// One vertex, `2n` loops paired `(x_k, xi_k)`.
pub fn one_vertex_quiver(n: usize) -> Result<SymmetricQuiver> {
    phi_from_ext(&ExtData {
        generators: vec!["v".to_string()],
        ext1_dim: vec![vec![2 * n]],
    })
}

/// Convenience: the shifted alphabet `{alpha, beta, x1..xn, xi1..xin}`.
pub fn one_vertex_alphabet(n: usize) -> Alphabet {
    shifted_alphabet(&one_vertex_quiver(n).expect("valid one-vertex quiver"))
        .expect("alphabet construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_vertex_two_loops_valid() {
        let q = one_vertex_quiver(1).unwrap();
        assert_eq!(q.vertices.len(), 1);
        assert_eq!(q.arrows.len(), 2);
    }

    #[test]
    fn odd_loops_rejected() {
        let raw = RawQuiver {
            vertices: vec!["v".into()],
            arrows: vec![
                RawArrow { id: "a".into(), src: "v".into(), dst: "v".into() },
                RawArrow { id: "b".into(), src: "v".into(), dst: "v".into() },
                RawArrow { id: "c".into(), src: "v".into(), dst: "v".into() },
            ],
            involution: vec![],
        };
        match validate_quiver(&raw) {
            Err(EngineError::InvalidQuiver { code, .. }) => assert_eq!(code, "odd_loops"),
            other => panic!("expected odd_loops, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_rejected() {
        let raw = RawQuiver {
            vertices: vec!["1".into(), "2".into()],
            arrows: vec![RawArrow { id: "a".into(), src: "1".into(), dst: "2".into() }],
            involution: vec![],
        };
        match validate_quiver(&raw) {
            Err(EngineError::InvalidQuiver { code, .. }) => assert_eq!(code, "not_symmetric"),
            other => panic!("expected not_symmetric, got {other:?}"),
        }
    }

    #[test]
    fn phi_from_ext_examples() {
        let q = phi_from_ext(&ExtData {
            generators: vec!["E".into()],
            ext1_dim: vec![vec![4]],
        })
        .unwrap();
        assert_eq!(q.arrows.len(), 4);

        let q = phi_from_ext(&ExtData {
            generators: vec!["1".into(), "2".into()],
            ext1_dim: vec![vec![2, 1], vec![1, 0]],
        })
        .unwrap();
        assert_eq!(q.vertices.len(), 2);
        assert_eq!(q.arrows.len(), 4);
        let e = ext_of(&q);
        assert_eq!(e.ext1_dim, vec![vec![2, 1], vec![1, 0]]);

        match phi_from_ext(&ExtData {
            generators: vec!["E".into()],
            ext1_dim: vec![vec![1]],
        }) {
            Err(EngineError::InvalidQuiver { code, .. }) => assert_eq!(code, "odd_diagonal"),
            other => panic!("expected odd_diagonal, got {other:?}"),
        }
    }

    #[test]
    fn shifted_alphabet_shapes() {
        let a = one_vertex_alphabet(2);
        for name in ["alpha", "beta", "x1", "xi1", "x2", "xi2"] {
            a.lookup(name).unwrap();
        }
        assert_eq!(a.len(), 6);
        let a0 = one_vertex_alphabet(0);
        assert_eq!(a0.len(), 2);

        let q = phi_from_ext(&ExtData {
            generators: vec!["1".into(), "2".into()],
            ext1_dim: vec![vec![0, 1], vec![1, 0]],
        })
        .unwrap();
        let a2 = shifted_alphabet(&q).unwrap();
        assert_eq!(a2.len(), 6);
        for name in ["alpha_1", "beta_1", "alpha_2", "beta_2", "a1_1_2", "a1_2_1"] {
            a2.lookup(name).unwrap();
        }
    }

    #[test]
    fn canonical_potential_examples() {
        let q = one_vertex_quiver(1).unwrap();
        let a = shifted_alphabet(&q).unwrap();
        let w = canonical_potential(&q).unwrap();
        assert_eq!(w.num_terms(), 3);
        assert_eq!(w.degrees(&a), vec![(1, 3, 2)]);
        for (word, _) in w.terms() {
            assert!(a.compose_check(word, true));
        }

        let q0 = one_vertex_quiver(0).unwrap();
        let w0 = canonical_potential(&q0).unwrap();
        assert_eq!(w0.num_terms(), 1);

        // 2 vertices, single cross pair: certified by the master equation
        let q2 = phi_from_ext(&ExtData {
            generators: vec!["1".into(), "2".into()],
            ext1_dim: vec![vec![0, 1], vec![1, 0]],
        })
        .unwrap();
        let a2 = shifted_alphabet(&q2).unwrap();
        let w2 = canonical_potential(&q2).unwrap();
        assert!(master_residual(&a2, &w2).unwrap().is_zero());
    }

    #[test]
    fn ext_round_trip_grid() {
        // all valid ExtData with entries <= 5, sizes <= 3 over a coarse grid
        for size in 1..=3usize {
            let cells = size * (size + 1) / 2;
            // step through a reduced grid to keep the loop cheap
            let vals: Vec<usize> = vec![0, 1, 2, 5];
            let mut idx = vec![0usize; cells];
            loop {
                let mut m = vec![vec![0usize; size]; size];
                let mut c = 0;
                for i in 0..size {
                    for j in i..size {
                        let v = vals[idx[c]];
                        m[i][j] = v;
                        m[j][i] = v;
                        c += 1;
                    }
                }
                let diag_even = (0..size).all(|i| m[i][i] % 2 == 0);
                let ext = ExtData {
                    generators: (0..size).map(|i| format!("g{i}")).collect(),
                    ext1_dim: m.clone(),
                };
                match phi_from_ext(&ext) {
                    Ok(q) => {
                        assert!(diag_even);
                        assert_eq!(ext_of(&q), ext);
                    }
                    Err(_) => assert!(!diag_even),
                }
                // advance
                let mut k = 0;
                loop {
                    if k == cells {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < vals.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == cells {
                    break;
                }
            }
        }
    }
}
