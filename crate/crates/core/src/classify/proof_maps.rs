//! Explicit isomorphisms between two-dimensional evolution algebras,
//! instantiated over every admissible parameter value of a field.

use serde::Serialize;

use crate::evoalg::EvolutionAlgebra;
use crate::gf::{FieldElement, FieldSpec};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProofMap {
    /// `(e1, c e1) -> (e1, c m^2 e1)` by `diag(1, 1/m)`.
    SquareScale,
    /// `(e1, c e1) -> (e2, c e2)`.
    HeadSwap,
    /// `(e1, c (c+1)^2 e1) -> (e1+e2, c (e1+e2))`, `c != -1`.
    SumHead,
    /// `(e1, d e2) -> (e1, e2)`.
    UnitDiagonal,
    /// `(e1, d e1 + e2) -> (e1+e2, d e2)`.
    SumToHead,
    /// `(e2, c^2 m^3 e1) -> (e2, c e1)`.
    CubeSwap,
    /// `(e2, (e1+e2)/c) -> (e1+e2, c e1)`.
    InverseSum,
    /// `(e1+e2, c e1 + d e2) -> (e1+e2, c^2/d^3 e1 + c/d^2 e2)`, `c != d`.
    Involution,
    /// `(e1, c e1 + d e2) -> (e1, g e1 + h e2)` whenever `c h^2 = d^2 g`.
    DiagonalRatio,
    /// `(e2, c e1 + d e2) -> (e2, c/m^3 e1 + d/m^2 e2)` by `diag(m, m^2)`.
    CubeScale,
}

impl ProofMap {
    pub const RANK_ONE: [ProofMap; 3] = [ProofMap::SquareScale, ProofMap::HeadSwap, ProofMap::SumHead];
    pub const RANK_TWO: [ProofMap; 7] = [
        ProofMap::UnitDiagonal,
        ProofMap::SumToHead,
        ProofMap::CubeSwap,
        ProofMap::InverseSum,
        ProofMap::Involution,
        ProofMap::DiagonalRatio,
        ProofMap::CubeScale,
    ];
}

/// A claimed isomorphism `map: source -> target`.
#[derive(Clone, Debug)]
pub struct ProofInstance {
    pub kind: ProofMap,
    pub params: Vec<FieldElement>,
    pub source: EvolutionAlgebra,
    pub target: EvolutionAlgebra,
    pub map: Matrix,
}

fn alg(f: &FieldSpec, r0: [FieldElement; 2], r1: [FieldElement; 2]) -> EvolutionAlgebra {
    EvolutionAlgebra::new(f.clone(), Matrix::from_rows(vec![r0.to_vec(), r1.to_vec()])).expect("2x2")
}

fn mat(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Matrix {
    Matrix::from_rows(vec![vec![a, b], vec![c, d]])
}

fn inv(f: &FieldSpec, x: FieldElement) -> FieldElement {
    f.inv(x).expect("nonzero by construction")
}

/// Every instance of `kind` over `f` with parameters in range.
pub fn instances(f: &FieldSpec, kind: ProofMap) -> Vec<ProofInstance> {
    let (z, o) = (f.zero(), f.one());
    let units: Vec<FieldElement> = f.units().collect();
    let mut out = Vec::new();
    let mut push = |params: Vec<FieldElement>, source, target, map| out.push(ProofInstance { kind, params, source, target, map });
    match kind {
        ProofMap::SquareScale => {
            for &c in &units {
                for &m in &units {
                    let cm2 = f.mul(c, f.mul(m, m));
                    push(vec![c, m], alg(f, [o, z], [c, z]), alg(f, [o, z], [cm2, z]), Matrix::diagonal(&[o, inv(f, m)]));
                }
            }
        }
        ProofMap::HeadSwap => {
            for &c in &units {
                push(vec![c], alg(f, [o, z], [c, z]), alg(f, [z, o], [z, c]), mat(z, inv(f, c), o, z));
            }
        }
        ProofMap::SumHead => {
            for &c in units.iter().filter(|&&c| !f.add(c, o).is_zero()) {
                let c1 = f.add(c, o);
                let src = f.mul(c, f.mul(c1, c1));
                let i1 = inv(f, c1);
                push(vec![c], alg(f, [o, z], [src, z]), alg(f, [o, o], [c, c]), mat(i1, i1, f.neg(c), o));
            }
        }
        ProofMap::UnitDiagonal => {
            for &d in &units {
                push(vec![d], alg(f, [o, z], [z, d]), alg(f, [o, z], [z, o]), mat(z, o, d, z));
            }
        }
        ProofMap::SumToHead => {
            for &d in &units {
                push(vec![d], alg(f, [o, z], [d, o]), alg(f, [o, o], [z, d]), mat(z, inv(f, d), o, z));
            }
        }
        ProofMap::CubeSwap => {
            for &c in &units {
                for &m in &units {
                    let src = f.mul(f.mul(c, c), f.pow(m, 3));
                    push(vec![c, m], alg(f, [z, o], [src, z]), alg(f, [z, o], [c, z]), mat(z, m, f.mul(c, f.mul(m, m)), z));
                }
            }
        }
        ProofMap::InverseSum => {
            for &c in &units {
                let ic = inv(f, c);
                push(vec![c], alg(f, [z, o], [ic, ic]), alg(f, [o, o], [c, z]), mat(z, ic, ic, z));
            }
        }
        ProofMap::Involution => {
            for &c in &units {
                for &d in units.iter().filter(|&&d| d != c) {
                    let d2 = f.mul(d, d);
                    let gamma = f.div(f.mul(c, c), f.mul(d2, d)).expect("unit");
                    let delta = f.div(c, d2).expect("unit");
                    push(vec![c, d], alg(f, [o, o], [c, d]), alg(f, [o, o], [gamma, delta]), mat(z, inv(f, delta), d, z));
                }
            }
        }
        ProofMap::DiagonalRatio => {
            for c in f.elements() {
                for &d in &units {
                    for g in f.elements() {
                        for &h in &units {
                            if f.mul(c, f.mul(h, h)) == f.mul(f.mul(d, d), g) {
                                let r = f.div(d, h).expect("unit");
                                push(vec![c, d, g, h], alg(f, [o, z], [c, d]), alg(f, [o, z], [g, h]), Matrix::diagonal(&[o, r]));
                            }
                        }
                    }
                }
            }
        }
        ProofMap::CubeScale => {
            for &c in &units {
                for &d in &units {
                    for &m in &units {
                        let c2 = f.div(c, f.pow(m, 3)).expect("unit");
                        let d2 = f.div(d, f.mul(m, m)).expect("unit");
                        push(vec![c, d, m], alg(f, [z, o], [c, d]), alg(f, [z, o], [c2, d2]), Matrix::diagonal(&[m, f.mul(m, m)]));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::verify_isomorphism;

    #[test]
    fn all_maps_verify_small_fields() {
        for q in [3, 4, 5] {
            let f = FieldSpec::from_order(q).unwrap();
            for kind in ProofMap::RANK_ONE.into_iter().chain(ProofMap::RANK_TWO) {
                let inst = instances(&f, kind);
                assert!(!inst.is_empty());
                for i in inst {
                    assert!(verify_isomorphism(&i.source, &i.target, &i.map).unwrap(), "{kind:?} {:?}", i.params);
                }
            }
        }
    }

    #[test]
    fn sum_head_excludes_minus_one() {
        let f = FieldSpec::from_order(5).unwrap();
        let params: Vec<_> = instances(&f, ProofMap::SumHead).into_iter().map(|i| i.params[0].index()).collect();
        assert_eq!(params, [1, 2, 3]);
    }
}
