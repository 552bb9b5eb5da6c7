//! JSON interchange formats. Rationals serialize as `"p/q"` strings so round
//! trips stay exact; floating matrix entries serialize as JSON numbers.

use crate::error::{Error, Result};
use crate::opmodel::{BlockAlgebra, BlockMatrix, BlockOperator, Operator, C64};
use crate::rat::{format_rat, parse_rat, Rat};
use crate::seq::{DyadicSequence, IndexSet, Tail};
use crate::step::{InfTail, StepFunction, ZeroTail};
use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailDto {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
}

impl TailDto {
    fn from_tail(t: &Tail) -> TailDto {
        match t {
            Tail::Zero => TailDto {
                kind: "zero".into(),
                c: None,
                r: None,
            },
            Tail::Geometric { c, r } => TailDto {
                kind: "geom".into(),
                c: Some(format_rat(c)),
                r: Some(format_rat(r)),
            },
        }
    }

    fn to_tail(&self) -> Result<Tail> {
        match self.kind.as_str() {
            "zero" => Ok(Tail::Zero),
            "geom" => {
                let c = parse_rat(self.c.as_deref().ok_or_else(missing("c"))?)
                    .map_err(Error::Parse)?;
                let r = parse_rat(self.r.as_deref().ok_or_else(missing("r"))?)
                    .map_err(Error::Parse)?;
                Ok(Tail::geometric(c, r))
            }
            other => Err(Error::Parse(format!("unknown tail kind {other:?}"))),
        }
    }
}

fn missing(field: &'static str) -> impl Fn() -> Error {
    move || Error::Parse(format!("missing field {field:?}"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceDto {
    pub lo: i64,
    pub hi: i64,
    pub values: Vec<String>,
    pub left: TailDto,
    pub right: TailDto,
    pub index_set: String,
}

pub fn sequence_to_dto(x: &DyadicSequence) -> SequenceDto {
    SequenceDto {
        lo: x.lo(),
        hi: x.hi(),
        values: x.window().iter().map(format_rat).collect(),
        left: TailDto::from_tail(x.left_tail()),
        right: TailDto::from_tail(x.right_tail()),
        index_set: match x.index_set() {
            IndexSet::Z => "Z".into(),
            IndexSet::ZPlus => "Z+".into(),
            IndexSet::ZMinus => "Z-".into(),
        },
    }
}

pub fn sequence_from_dto(dto: &SequenceDto) -> Result<DyadicSequence> {
    if dto.hi - dto.lo + 1 != dto.values.len() as i64 {
        return Err(Error::Parse("window length does not match lo..hi".into()));
    }
    let values = dto
        .values
        .iter()
        .map(|s| parse_rat(s).map_err(Error::Parse))
        .collect::<Result<Vec<Rat>>>()?;
    let index_set = match dto.index_set.as_str() {
        "Z" => IndexSet::Z,
        "Z+" => IndexSet::ZPlus,
        "Z-" => IndexSet::ZMinus,
        other => return Err(Error::Parse(format!("unknown index set {other:?}"))),
    };
    DyadicSequence::with_index_set(
        dto.lo,
        values,
        dto.left.to_tail()?,
        dto.right.to_tail()?,
        index_set,
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroTailDto {
    pub c: String,
    pub r: String,
    pub lo: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfGeomDto {
    pub c: String,
    pub r: String,
    pub hi: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepDto {
    pub zero_tail: Option<ZeroTailDto>,
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
    pub v_inf: String,
    /// Geometric staircase beyond the last breakpoint (carried by images of
    /// sequences with geometric right tails); absent for spec-plain data.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inf_geom: Option<InfGeomDto>,
}

pub fn step_to_dto(f: &StepFunction) -> StepDto {
    let (v_inf, inf_geom) = match f.inf_tail() {
        InfTail::Const(v) => (format_rat(v), None),
        InfTail::Geom { c, r, hi } => (
            format_rat(&Rat::zero()),
            Some(InfGeomDto {
                c: format_rat(c),
                r: format_rat(r),
                hi: *hi,
            }),
        ),
    };
    StepDto {
        zero_tail: f.zero_tail().map(|zt| ZeroTailDto {
            c: format_rat(&zt.c),
            r: format_rat(&zt.r),
            lo: zt.lo,
        }),
        breakpoints: f.breakpoints().iter().map(format_rat).collect(),
        values: f.piece_values().iter().map(format_rat).collect(),
        v_inf,
        inf_geom,
    }
}

pub fn step_from_dto(dto: &StepDto) -> Result<StepFunction> {
    let zero_tail = dto
        .zero_tail
        .as_ref()
        .map(|zt| -> Result<ZeroTail> {
            Ok(ZeroTail {
                c: parse_rat(&zt.c).map_err(Error::Parse)?,
                r: parse_rat(&zt.r).map_err(Error::Parse)?,
                lo: zt.lo,
            })
        })
        .transpose()?;
    let breakpoints = dto
        .breakpoints
        .iter()
        .map(|s| parse_rat(s).map_err(Error::Parse))
        .collect::<Result<Vec<Rat>>>()?;
    let values = dto
        .values
        .iter()
        .map(|s| parse_rat(s).map_err(Error::Parse))
        .collect::<Result<Vec<Rat>>>()?;
    let inf_tail = match &dto.inf_geom {
        Some(g) => InfTail::Geom {
            c: parse_rat(&g.c).map_err(Error::Parse)?,
            r: parse_rat(&g.r).map_err(Error::Parse)?,
            hi: g.hi,
        },
        None => InfTail::Const(parse_rat(&dto.v_inf).map_err(Error::Parse)?),
    };
    StepFunction::new(zero_tail, breakpoints, values, inf_tail)
}

/// A matrix entry: exact rational string for the exact tier, JSON numbers
/// for the floating tier.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumDto {
    Str(String),
    Num(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntryDto {
    pub re: NumDto,
    pub im: NumDto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockDto {
    pub d: usize,
    pub w: String,
    pub matrix: Vec<Vec<EntryDto>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum OperatorDto {
    #[serde(rename = "block")]
    Block { blocks: Vec<BlockDto> },
    #[serde(rename = "commutative")]
    Commutative { f: StepDto },
}

pub fn operator_to_dto(x: &Operator) -> OperatorDto {
    match x {
        Operator::Commutative(f) => OperatorDto::Commutative { f: step_to_dto(f) },
        Operator::Block(b) => {
            let blocks = b
                .algebra
                .blocks
                .iter()
                .zip(&b.matrices)
                .map(|(spec, m)| {
                    let matrix = match m {
                        BlockMatrix::Diag(d) => (0..spec.dim)
                            .map(|i| {
                                (0..spec.dim)
                                    .map(|j| EntryDto {
                                        re: NumDto::Str(if i == j {
                                            format_rat(&d[i])
                                        } else {
                                            "0/1".into()
                                        }),
                                        im: NumDto::Str("0/1".into()),
                                    })
                                    .collect()
                            })
                            .collect(),
                        BlockMatrix::Dense(m) => (0..spec.dim)
                            .map(|i| {
                                (0..spec.dim)
                                    .map(|j| EntryDto {
                                        re: NumDto::Num(m[(i, j)].re),
                                        im: NumDto::Num(m[(i, j)].im),
                                    })
                                    .collect()
                            })
                            .collect(),
                    };
                    BlockDto {
                        d: spec.dim,
                        w: format_rat(&spec.weight),
                        matrix,
                    }
                })
                .collect();
            OperatorDto::Block { blocks }
        }
    }
}

pub fn operator_from_dto(dto: &OperatorDto) -> Result<Operator> {
    match dto {
        OperatorDto::Commutative { f } => Ok(Operator::Commutative(step_from_dto(f)?)),
        OperatorDto::Block { blocks } => {
            let mut specs = Vec::new();
            let mut matrices = Vec::new();
            for b in blocks {
                let w = parse_rat(&b.w).map_err(Error::Parse)?;
                specs.push((b.d, w));
                if b.matrix.len() != b.d || b.matrix.iter().any(|row| row.len() != b.d) {
                    return Err(Error::Parse("matrix shape must be d x d".into()));
                }
                // exact tier: every entry an exact rational string, the
                // matrix real diagonal
                let mut exact_diag: Option<Vec<Rat>> = Some(vec![Rat::zero(); b.d]);
                'exact: for (i, row) in b.matrix.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        match (&e.re, &e.im) {
                            (NumDto::Str(re), NumDto::Str(im)) => {
                                let re = parse_rat(re).map_err(Error::Parse)?;
                                let im = parse_rat(im).map_err(Error::Parse)?;
                                if !im.is_zero() || (i != j && !re.is_zero()) {
                                    exact_diag = None;
                                    break 'exact;
                                }
                                if i == j {
                                    if let Some(d) = &mut exact_diag {
                                        d[i] = re;
                                    }
                                }
                            }
                            _ => {
                                exact_diag = None;
                                break 'exact;
                            }
                        }
                    }
                }
                match exact_diag {
                    Some(d) => matrices.push(BlockMatrix::Diag(d)),
                    None => {
                        let mut m = DMatrix::<C64>::zeros(b.d, b.d);
                        for (i, row) in b.matrix.iter().enumerate() {
                            for (j, e) in row.iter().enumerate() {
                                m[(i, j)] = C64::new(num_of(&e.re)?, num_of(&e.im)?);
                            }
                        }
                        matrices.push(BlockMatrix::Dense(m));
                    }
                }
            }
            let algebra = BlockAlgebra::new(specs)?;
            Ok(Operator::Block(BlockOperator { algebra, matrices }))
        }
    }
}

fn num_of(n: &NumDto) -> Result<f64> {
    match n {
        NumDto::Num(v) => Ok(*v),
        NumDto::Str(s) => Ok(crate::rat::rat_to_f64(&parse_rat(s).map_err(Error::Parse)?)),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartDto {
    pub k: i64,
    pub op: OperatorDto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PartsDto {
    #[serde(rename = "block")]
    Block { parts: Vec<PartDto> },
    #[serde(rename = "cells")]
    Cells { shift: i64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepDto {
    pub subject: OperatorDto,
    pub parts: PartsDto,
    pub coefficients: SequenceDto,
    pub residuals: SequenceDto,
}

pub fn rep_to_dto(rep: &crate::dyadic::DyadicRep) -> RepDto {
    let parts = match &rep.parts {
        crate::dyadic::Parts::Block(parts) => PartsDto::Block {
            parts: parts
                .iter()
                .map(|(k, op)| PartDto {
                    k: *k,
                    op: operator_to_dto(op),
                })
                .collect(),
        },
        crate::dyadic::Parts::CommutativeCells { shift } => PartsDto::Cells { shift: *shift },
    };
    RepDto {
        subject: operator_to_dto(&rep.subject),
        parts,
        coefficients: sequence_to_dto(&rep.coefficients),
        residuals: sequence_to_dto(&rep.residuals),
    }
}

pub fn rep_from_dto(dto: &RepDto) -> Result<crate::dyadic::DyadicRep> {
    let subject = operator_from_dto(&dto.subject)?;
    match &dto.parts {
        PartsDto::Block { parts } => {
            let parts = parts
                .iter()
                .map(|p| Ok((p.k, operator_from_dto(&p.op)?)))
                .collect::<Result<Vec<_>>>()?;
            // coefficients and residuals are recomputed from the parts; the
            // stored sequences are advisory on input
            crate::dyadic::from_block_parts(subject, parts)
        }
        PartsDto::Cells { shift } => {
            let Operator::Commutative(f) = &subject else {
                return Err(Error::Parse("cell parts need a commutative subject".into()));
            };
            crate::dyadic::cell_rep(f, *shift)
        }
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serialization cannot fail")
}

pub fn parse_json<'a, T: Deserialize<'a>>(s: &'a str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("{e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }
    fn ri(p: i64) -> Rat {
        r(p, 1)
    }

    #[test]
    fn sequence_round_trip() {
        let x = DyadicSequence::new(
            -2,
            vec![r(5, 2), ri(-3), r(7, 3)],
            Tail::Geometric { c: ri(2), r: r(3, 2) },
            Tail::Geometric { c: ri(-4), r: r(1, 2) },
        )
        .unwrap();
        let json = to_json_string(&sequence_to_dto(&x));
        let back = sequence_from_dto(&parse_json(&json).unwrap()).unwrap();
        assert_eq!(back, x);
        assert!(json.contains("\"index_set\":\"Z\""));
    }

    #[test]
    fn step_round_trip_with_tails() {
        let f = StepFunction::new(
            Some(ZeroTail {
                c: ri(1),
                r: r(3, 2),
                lo: 0,
            }),
            vec![ri(1), ri(2)],
            vec![r(7, 2)],
            InfTail::Geom {
                c: ri(1),
                r: r(1, 2),
                hi: 0,
            },
        )
        .unwrap();
        let json = to_json_string(&step_to_dto(&f));
        let back = step_from_dto(&parse_json(&json).unwrap()).unwrap();
        assert_eq!(back, f);
        // spec-plain data has no staircase field
        let plain = StepFunction::from_pieces(vec![ri(0), ri(1)], vec![ri(5)]).unwrap();
        let pj = to_json_string(&step_to_dto(&plain));
        assert!(!pj.contains("inf_geom"));
        assert!(pj.contains("\"v_inf\":\"0/1\""));
    }

    #[test]
    fn operator_round_trip_diag_and_dense() {
        let alg = crate::opmodel::BlockAlgebra::new(vec![(2, ri(1)), (1, r(1, 2))]).unwrap();
        let x = Operator::diagonal(alg, vec![vec![ri(3), r(-1, 2)], vec![ri(0)]]).unwrap();
        let json = to_json_string(&operator_to_dto(&x));
        let back = operator_from_dto(&parse_json(&json).unwrap()).unwrap();
        assert!(back.is_exact_tier());
        assert_eq!(
            back.singular_value_function().unwrap(),
            x.singular_value_function().unwrap()
        );
        assert_eq!(back.trace(), x.trace());
        // dense entries round-trip as numbers
        let alg2 = crate::opmodel::BlockAlgebra::single(2, ri(1));
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::new(1.5, -0.25);
        let d = Operator::dense(alg2, vec![m]).unwrap();
        let dj = to_json_string(&operator_to_dto(&d));
        let dback = operator_from_dto(&parse_json(&dj).unwrap()).unwrap();
        assert!(!dback.is_exact_tier());
        assert!((dback.trace().approx() - d.trace().approx()).abs() < 1e-15);
    }

    #[test]
    fn malformed_inputs_error() {
        assert!(parse_json::<SequenceDto>("{\"lo\": 0").is_err());
        let bad = "{\"lo\":0,\"hi\":1,\"values\":[\"1/1\"],\"left\":{\"kind\":\"zero\"},\"right\":{\"kind\":\"zero\"},\"index_set\":\"Z\"}";
        let dto: SequenceDto = parse_json(bad).unwrap();
        assert!(sequence_from_dto(&dto).is_err()); // window length mismatch
    }
}
