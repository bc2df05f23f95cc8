//! Expression trees over FIN, `𝕀₃` and the `m`/`a` combinators, the named
//! ideals of the hierarchy, and bounded membership evaluation on eventually
//! periodic points.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{fin_member, i3_member, ColumnTable, EpPoint, IdealError, Membership};
use crate::words::pair_mod;

/// Work units `ideal_member` may spend before giving up with `Unknown`.
pub const DEFAULT_WORK_BUDGET: u64 = 1 << 22;

const MAX_VIEW_DEPTH: usize = 24;
const MAX_NAMED_INDEX: u64 = 400;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdealExpr {
    Fin,
    I3,
    /// `(𝒥_0, 𝒥_1, …)^m`: every section `^n(α)` lies in `𝒥_n`.
    M(Children),
    /// `(𝒥_0, 𝒥_1, …)^a`: all but finitely many sections do.
    A(Children),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Children {
    /// `(𝒥, 𝒥, …)`.
    Uniform(Arc<IdealExpr>),
    /// An explicit initial segment; sections past it are unspecified.
    Listed(Vec<Arc<IdealExpr>>),
    Family(Family),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `(𝕀_3, 𝕀_5, 𝕀_7, …)`.
    IOdd,
    /// `(FIN, 𝕀_4, 𝕀_6, …)`.
    JEven,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::IOdd => "odd",
            Family::JEven => "even",
        }
    }
}

impl Children {
    fn child(&self, n: u64) -> Option<Arc<IdealExpr>> {
        match self {
            Children::Uniform(e) => Some(e.clone()),
            Children::Listed(v) => v.get(n as usize).cloned(),
            Children::Family(Family::IOdd) => finite_index(3 + 2 * n).ok().map(Arc::new),
            Children::Family(Family::JEven) if n == 0 => Some(Arc::new(IdealExpr::Fin)),
            Children::Family(Family::JEven) => finite_index(2 + 2 * n).ok().map(Arc::new),
        }
    }
}

impl IdealExpr {
    pub fn m(child: IdealExpr) -> Self {
        IdealExpr::M(Children::Uniform(Arc::new(child)))
    }

    pub fn a(child: IdealExpr) -> Self {
        IdealExpr::A(Children::Uniform(Arc::new(child)))
    }
}

/// `𝕀_k` for finite `k ≥ 3`: `𝕀_{4+2n} = 𝕀_{3+2n}^a`, `𝕀_{5+2n} = 𝕀_{4+2n}^m`.
fn finite_index(k: u64) -> Result<IdealExpr, IdealError> {
    if !(3..=MAX_NAMED_INDEX).contains(&k) {
        return Err(IdealError::UnknownName(format!("I{k}")));
    }
    let mut e = IdealExpr::I3;
    for j in 4..=k {
        e = if j % 2 == 0 {
            IdealExpr::a(e)
        } else {
            IdealExpr::m(e)
        };
    }
    Ok(e)
}

/// `𝕀_{ω+k}` or `𝕁_{ω+k}`; the two alternate `m`/`a` in opposite phase.
fn omega_plus(j: bool, k: u64) -> Result<IdealExpr, IdealError> {
    if k > MAX_NAMED_INDEX {
        return Err(IdealError::UnknownName(format!("omega+{k}")));
    }
    let mut e = if j {
        IdealExpr::M(Children::Family(Family::JEven))
    } else {
        IdealExpr::A(Children::Family(Family::IOdd))
    };
    for step in 1..=k {
        let odd = step % 2 == 1;
        e = if odd != j {
            IdealExpr::m(e)
        } else {
            IdealExpr::a(e)
        };
    }
    Ok(e)
}

/// Parse a named ideal: `FIN`, `I3`, `I<k>`, `I_omega`, `J_omega`,
/// `I_omega+<k>`, `J_omega+<k>`, or `I_lambda:<ξ0>,<ξ1>,…` / `J_lambda:…` with
/// a strictly increasing cofinal list.
pub fn named_ideal(name: &str) -> Result<IdealExpr, IdealError> {
    let unknown = || IdealError::UnknownName(name.to_string());
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "fin" => return Ok(IdealExpr::Fin),
        "i3" => return Ok(IdealExpr::I3),
        "i_omega" => return omega_plus(false, 0),
        "j_omega" => return omega_plus(true, 0),
        _ => {}
    }
    for (tag, j) in [("i_omega+", false), ("j_omega+", true)] {
        if let Some(rest) = lower.strip_prefix(tag) {
            return omega_plus(j, rest.parse().map_err(|_| unknown())?);
        }
    }
    for (tag, j) in [("i_lambda:", false), ("j_lambda:", true)] {
        if let Some(rest) = lower.strip_prefix(tag) {
            let xs: Vec<u64> = rest
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| unknown()))
                .collect::<Result<_, _>>()?;
            if xs.windows(2).any(|p| p[0] >= p[1]) {
                return Err(IdealError::Malformed(
                    "cofinal sequence must increase".into(),
                ));
            }
            let children = xs
                .iter()
                .map(|&xi| omega_plus(j, 2 * xi + 1).map(Arc::new))
                .collect::<Result<_, _>>()?;
            let c = Children::Listed(children);
            return Ok(if j { IdealExpr::M(c) } else { IdealExpr::A(c) });
        }
    }
    if let Some(k) = lower.strip_prefix('i').and_then(|r| r.parse::<u64>().ok()) {
        return finite_index(k);
    }
    Err(unknown())
}

#[derive(Serialize, Deserialize)]
struct RawExpr {
    op: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<RawExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

impl From<&IdealExpr> for RawExpr {
    fn from(e: &IdealExpr) -> Self {
        let leaf = |op: &str| RawExpr {
            op: op.into(),
            children: vec![],
            family: None,
            name: None,
        };
        let node = |op: &str, c: &Children| {
            let mut r = leaf(op);
            match c {
                Children::Uniform(e) => r.children = vec![RawExpr::from(e.as_ref())],
                Children::Listed(v) => {
                    r.children = v.iter().map(|e| RawExpr::from(e.as_ref())).collect()
                }
                Children::Family(f) => r.family = Some(f.name().into()),
            }
            r
        };
        match e {
            IdealExpr::Fin => leaf("FIN"),
            IdealExpr::I3 => leaf("I3"),
            IdealExpr::M(c) => node("M", c),
            IdealExpr::A(c) => node("A", c),
        }
    }
}

impl TryFrom<RawExpr> for IdealExpr {
    type Error = IdealError;

    fn try_from(r: RawExpr) -> Result<Self, Self::Error> {
        let op = r.op.to_ascii_uppercase();
        if let Some(name) = r.name {
            if op != "NAMED" {
                return Err(IdealError::Malformed(format!("`name` given with op {op}")));
            }
            return named_ideal(&name);
        }
        let children =
            |family: Option<String>, kids: Vec<RawExpr>| -> Result<Children, IdealError> {
                match (family, kids.len()) {
                    (Some(f), 0) => match f.as_str() {
                        "odd" => Ok(Children::Family(Family::IOdd)),
                        "even" => Ok(Children::Family(Family::JEven)),
                        other => Err(IdealError::Malformed(format!("unknown family {other:?}"))),
                    },
                    (Some(_), _) => Err(IdealError::Malformed(
                        "both `family` and `children` given".into(),
                    )),
                    (None, 0) => Err(IdealError::Malformed(format!("{op} needs children"))),
                    _ => {
                        let mut kids = kids
                            .into_iter()
                            .map(|c| IdealExpr::try_from(c).map(Arc::new))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(if kids.len() == 1 {
                            Children::Uniform(kids.pop().unwrap())
                        } else {
                            Children::Listed(kids)
                        })
                    }
                }
            };
        match op.as_str() {
            "FIN" | "I3" if !r.children.is_empty() || r.family.is_some() => {
                Err(IdealError::Malformed(format!("{op} takes no children")))
            }
            "FIN" => Ok(IdealExpr::Fin),
            "I3" => Ok(IdealExpr::I3),
            "M" => Ok(IdealExpr::M(children(r.family, r.children)?)),
            "A" => Ok(IdealExpr::A(children(r.family, r.children)?)),
            other => Err(IdealError::Malformed(format!("unknown op {other:?}"))),
        }
    }
}

impl Serialize for IdealExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawExpr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for IdealExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        IdealExpr::try_from(RawExpr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// A point `β(a) = x(h(a))` where `h` applies the sections `^{n_1}, …, ^{n_d}`.
///
/// Unfolding the pairing, `h(⟨c, y⟩) = ⟨g(c), y⟩` with
/// `g(c) = ⟨n_1, ⟨n_2, … ⟨n_d, c⟩ …⟩⟩`. The residue of `h(a)` mod `K` depends
/// on `g(c)` and `y` mod `2K`, and `g(c)` mod `2K` depends on `n_i` mod
/// `2^(i+1) K` and on `c` mod `2^(d+1) K`. Every residue class is infinite, so
/// `β` has infinitely many ones iff some class lands on a hot column.
struct Evaluator {
    table: ColumnTable,
    bound: u64,
    budget: u64,
}

enum Step {
    Done(Membership),
    Exhausted,
}

impl Evaluator {
    /// Whether the view has infinitely many ones. `None` once over budget.
    fn view_infinite(&mut self, view: &[u64]) -> Option<bool> {
        let k = self.table.k();
        let d = view.len();
        let span = (2 * k) << d;
        if self.budget < span * (d as u64 + 1) {
            return None;
        }
        self.budget -= span * (d as u64 + 1);
        Some((0..span).any(|c| {
            let mut v = c;
            for i in (1..=d).rev() {
                v = pair_mod(view[i - 1], v, k << i);
            }
            self.table.hot(v)
        }))
    }

    fn eval(&mut self, e: &IdealExpr, view: &mut Vec<u64>) -> Step {
        match e {
            IdealExpr::Fin | IdealExpr::I3 => match self.view_infinite(view) {
                Some(bad) => Step::Done(Membership::from_bool(!bad)),
                None => Step::Exhausted,
            },
            IdealExpr::M(_) | IdealExpr::A(_) if view.len() >= MAX_VIEW_DEPTH => {
                Step::Done(Membership::Unknown { bound: self.bound })
            }
            IdealExpr::M(c) => self.eval_m(c, view),
            IdealExpr::A(c) => self.eval_a(c, view),
        }
    }

    /// Verdicts at `view + [n]` depend on `n` only mod this period.
    fn section_period(&self, view: &[u64]) -> u64 {
        (4 * self.table.k()) << view.len()
    }

    fn eval_m(&mut self, c: &Children, view: &mut Vec<u64>) -> Step {
        let period = self.section_period(view);
        let exhaustive = matches!(c, Children::Uniform(_)) && period - 1 <= self.bound;
        let last = if exhaustive { period - 1 } else { self.bound };
        let mut all_in = true;
        for n in 0..=last {
            let Some(child) = c.child(n) else {
                all_in = false;
                break;
            };
            view.push(n);
            let r = self.eval(&child, view);
            view.pop();
            match r {
                Step::Exhausted => return Step::Exhausted,
                Step::Done(Membership::Out) => return Step::Done(Membership::Out),
                Step::Done(Membership::In) => {}
                Step::Done(Membership::Unknown { .. }) => all_in = false,
            }
        }
        Step::Done(if exhaustive && all_in {
            Membership::In
        } else {
            Membership::Unknown { bound: self.bound }
        })
    }

    fn eval_a(&mut self, c: &Children, view: &mut Vec<u64>) -> Step {
        let period = self.section_period(view);
        let Children::Uniform(child) = c else {
            return Step::Done(Membership::Unknown { bound: self.bound });
        };
        if period - 1 > self.bound {
            return Step::Done(Membership::Unknown { bound: self.bound });
        }
        let mut all_in = true;
        for n in 0..period {
            view.push(n);
            let r = self.eval(child, view);
            view.pop();
            match r {
                Step::Exhausted => return Step::Exhausted,
                // One bad residue recurs at infinitely many sections.
                Step::Done(Membership::Out) => return Step::Done(Membership::Out),
                Step::Done(Membership::In) => {}
                Step::Done(Membership::Unknown { .. }) => all_in = false,
            }
        }
        Step::Done(if all_in {
            Membership::In
        } else {
            Membership::Unknown { bound: self.bound }
        })
    }
}

/// Membership of `x` in the ideal `e`, searching section indices up to
/// `bound`. Returns `In`/`Out` only with a certificate: finitely supported
/// points lie in every ideal built from free ones; an `Out` section refutes `M`;
/// a full period of uniform sections decides both combinators. Anything else,
/// or running past [`DEFAULT_WORK_BUDGET`], is `Unknown(bound)`.
pub fn ideal_member(e: &IdealExpr, x: &EpPoint, bound: u64) -> Membership {
    match e {
        IdealExpr::Fin => return fin_member(x),
        IdealExpr::I3 => return i3_member(x),
        _ if x.is_finitely_supported() => return Membership::In,
        _ => {}
    }
    let mut ev = Evaluator {
        table: ColumnTable::new(x),
        bound,
        budget: DEFAULT_WORK_BUDGET,
    };
    match ev.eval(e, &mut Vec::new()) {
        Step::Done(m) => m,
        Step::Exhausted => Membership::Unknown { bound },
    }
}
