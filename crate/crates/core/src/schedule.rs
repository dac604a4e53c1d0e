//! Tolerance schedules for the finite solves (`delta_bar_k`) and the
//! lower-level solves (`delta_{k,i}`).

use std::fmt;
use std::str::FromStr;

use crate::error::{config, Result, SipError};

/// How an objective schedule reaches zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Zero from index `k0` on.
    EventuallyZero(usize),
    Summable,
    /// Neither; accepted by the core loop, rejected by the drivers.
    Unqualified,
}

/// Objective tolerance schedule `k -> delta_bar_k`.
#[derive(Clone, Debug, PartialEq)]
pub enum ObjSchedule {
    /// `before` for `k < k0`, then 0 (served at the solver floor).
    EventuallyZero {
        k0: usize,
        before: f64,
    },
    /// `min(cap, scale * ratio^k)` with `ratio < 1`.
    Geometric {
        scale: f64,
        ratio: f64,
        cap: f64,
    },
    Constant(f64),
}

impl ObjSchedule {
    /// `0.1 * 2^-k`.
    pub fn default_summable() -> Self {
        Self::geometric(0.1, 0.5)
    }

    /// Zero from the start.
    pub fn zero() -> Self {
        Self::EventuallyZero { k0: 0, before: 0.0 }
    }

    pub fn geometric(scale: f64, ratio: f64) -> Self {
        Self::Geometric {
            scale,
            ratio,
            cap: f64::INFINITY,
        }
    }

    pub fn at(&self, k: usize) -> f64 {
        match *self {
            Self::EventuallyZero { k0, before } => {
                if k < k0 {
                    before
                } else {
                    0.0
                }
            }
            Self::Geometric { scale, ratio, cap } => cap.min(scale * ratio.powf(k as f64)),
            Self::Constant(c) => c,
        }
    }

    pub fn regime(&self) -> Regime {
        match *self {
            Self::EventuallyZero { k0, .. } => Regime::EventuallyZero(k0),
            Self::Geometric { .. } => Regime::Summable,
            Self::Constant(0.0) => Regime::EventuallyZero(0),
            Self::Constant(_) => Regime::Unqualified,
        }
    }

    /// `sup_{k >= offset} delta_bar_k`.
    pub fn sup_from(&self, offset: usize) -> f64 {
        match *self {
            Self::EventuallyZero { k0, before } => {
                if offset < k0 {
                    before
                } else {
                    0.0
                }
            }
            // nonincreasing
            Self::Geometric { .. } => self.at(offset),
            Self::Constant(c) => c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::EventuallyZero { before, .. } => before >= 0.0 && before.is_finite(),
            Self::Geometric { scale, ratio, cap } => {
                scale >= 0.0 && scale.is_finite() && (0.0..1.0).contains(&ratio) && cap >= 0.0
            }
            Self::Constant(c) => c >= 0.0 && c.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(config(format!("invalid objective schedule {self}")))
        }
    }
}

impl fmt::Display for ObjSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::EventuallyZero { k0, before } if before == 0.0 || k0 == 0 => {
                write!(f, "eventually_zero({k0})")
            }
            Self::EventuallyZero { k0, before } => write!(f, "eventually_zero({k0},{before})"),
            Self::Geometric { scale, ratio, cap } if cap.is_infinite() => {
                write!(f, "geometric({ratio},{scale})")
            }
            Self::Geometric { scale, ratio, cap } => write!(f, "geometric({ratio},{scale},{cap})"),
            Self::Constant(c) => write!(f, "constant({c})"),
        }
    }
}

/// Parses the CLI presets `geometric(q)`, `geometric(q,scale)`,
/// `geometric(q,scale,cap)`, `eventually_zero(k0)`,
/// `eventually_zero(k0,before)` and `constant(c)`.
impl FromStr for ObjSchedule {
    type Err = SipError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || config(format!("unrecognized schedule `{s}`"));
        let open = s.find('(').ok_or_else(bad)?;
        let name = &s[..open];
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let args: Vec<f64> = inner
            .split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let sched = match (name, args.as_slice()) {
            ("geometric", [q]) => Self::geometric(0.1, *q),
            ("geometric", [q, scale]) => Self::geometric(*scale, *q),
            ("geometric", [q, scale, cap]) => Self::Geometric {
                scale: *scale,
                ratio: *q,
                cap: *cap,
            },
            ("eventually_zero", [k0]) if k0.fract() == 0.0 && *k0 >= 0.0 => Self::EventuallyZero {
                k0: *k0 as usize,
                before: 0.1,
            },
            ("eventually_zero", [k0, before]) if k0.fract() == 0.0 && *k0 >= 0.0 => {
                Self::EventuallyZero {
                    k0: *k0 as usize,
                    before: *before,
                }
            }
            ("constant", [c]) => Self::Constant(*c),
            _ => return Err(bad()),
        };
        sched.validate()?;
        Ok(sched)
    }
}

/// Lower-level tolerance schedule `(k, i) -> delta_{k,i}`, identical across
/// families.
#[derive(Clone, Debug, PartialEq)]
pub enum AuxSchedule {
    Geometric { scale: f64, ratio: f64 },
    Constant(f64),
}

impl Default for AuxSchedule {
    fn default() -> Self {
        Self::Geometric {
            scale: 0.1,
            ratio: 0.5,
        }
    }
}

/// Smallest tolerance handed to the lower-level solver.
pub const AUX_FLOOR: f64 = 1e-12;

impl AuxSchedule {
    /// Tolerance for iteration `k`; family index `_i` is accepted for
    /// symmetry with the per-family tolerances `delta_{k,i}`.
    pub fn at(&self, k: usize, _i: usize) -> f64 {
        let v = match *self {
            Self::Geometric { scale, ratio } => scale * ratio.powf(k as f64),
            Self::Constant(c) => c,
        };
        v.max(AUX_FLOOR)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Geometric { scale, ratio } => {
                scale > 0.0 && scale.is_finite() && (0.0..1.0).contains(&ratio)
            }
            Self::Constant(c) => c > 0.0 && c.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(config(format!("invalid lower-level schedule {self:?}")))
        }
    }

    /// Whether the schedule decays to zero.
    pub fn vanishes(&self) -> bool {
        matches!(self, Self::Geometric { .. })
    }
}

/// Both schedules plus an index shift, so that `obj_tol(k)` reads
/// `delta_bar_{offset + k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ToleranceSchedule {
    pub obj: ObjSchedule,
    pub aux: AuxSchedule,
    pub offset: usize,
}

impl ToleranceSchedule {
    pub fn new(obj: ObjSchedule, aux: AuxSchedule) -> Self {
        Self {
            obj,
            aux,
            offset: 0,
        }
    }

    pub fn obj_tol(&self, k: usize) -> f64 {
        self.obj.at(self.offset + k)
    }

    pub fn aux_tol(&self, k: usize, i: usize) -> f64 {
        self.aux.at(k, i)
    }

    pub fn regime(&self) -> Regime {
        match self.obj.regime() {
            Regime::EventuallyZero(k0) => Regime::EventuallyZero(k0.saturating_sub(self.offset)),
            r => r,
        }
    }

    /// The objective schedule read from index `m` on; the lower-level
    /// schedule is not shifted.
    pub fn shifted(&self, m: usize) -> Self {
        Self {
            offset: self.offset + m,
            ..self.clone()
        }
    }

    pub fn obj_sup(&self) -> f64 {
        self.obj.sup_from(self.offset)
    }

    pub fn validate(&self) -> Result<()> {
        self.obj.validate()?;
        self.aux.validate()
    }

    /// Conditions on the schedules that the drivers' guarantees need:
    /// vanishing lower-level tolerances and an objective schedule that is
    /// eventually zero, or summable with `rho != 0`.
    pub fn check_convergence_conditions(&self, rho: f64) -> Result<()> {
        if !self.aux.vanishes() {
            return Err(config("lower-level tolerances must decay to zero"));
        }
        match self.regime() {
            Regime::EventuallyZero(_) => Ok(()),
            Regime::Summable if rho != 0.0 => Ok(()),
            Regime::Summable => Err(config("a summable objective schedule requires rho != 0")),
            Regime::Unqualified => Err(config(
                "objective schedule must be eventually zero or summable",
            )),
        }
    }
}

impl Default for ToleranceSchedule {
    fn default() -> Self {
        Self::new(ObjSchedule::default_summable(), AuxSchedule::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        assert_eq!(
            "geometric(0.5)".parse::<ObjSchedule>().unwrap(),
            ObjSchedule::geometric(0.1, 0.5)
        );
        let ez: ObjSchedule = "eventually_zero(3)".parse().unwrap();
        assert_eq!(ez.at(2), 0.1);
        assert_eq!(ez.at(3), 0.0);
        assert_eq!(ez.regime(), Regime::EventuallyZero(3));
        assert!("geometric(1.5)".parse::<ObjSchedule>().is_err());
        assert!("bogus(1)".parse::<ObjSchedule>().is_err());
        assert!("eventually_zero(1.5)".parse::<ObjSchedule>().is_err());
        for s in [
            "geometric(0.5,0.01)",
            "eventually_zero(2,0.3)",
            "constant(0.001)",
        ] {
            let p: ObjSchedule = s.parse().unwrap();
            assert_eq!(p.to_string().parse::<ObjSchedule>().unwrap(), p);
        }
    }

    #[test]
    fn aux_schedule_vanishes() {
        let a = AuxSchedule::default();
        assert_eq!(a.at(0, 0), 0.1);
        assert!(a.at(1_000, 0) <= 1e-11);
        assert!(a.at(1_000_000, 3) <= 1e-11);
    }

    #[test]
    fn shift_reads_later_entries() {
        let s = ToleranceSchedule::new(ObjSchedule::geometric(1.0, 0.5), AuxSchedule::default());
        let t = s.shifted(3);
        assert_eq!(t.obj_tol(0), s.obj_tol(3));
        assert_eq!(t.aux_tol(0, 0), s.aux_tol(0, 0));
        assert_eq!(t.obj_sup(), 0.125);
    }

    #[test]
    fn convergence_conditions() {
        let s = ToleranceSchedule::default();
        assert!(s.check_convergence_conditions(0.0).is_err());
        assert!(s.check_convergence_conditions(f64::INFINITY).is_ok());
        let z = ToleranceSchedule::new(ObjSchedule::zero(), AuxSchedule::default());
        assert!(z.check_convergence_conditions(0.0).is_ok());
        let c = ToleranceSchedule::new(ObjSchedule::Constant(1e-3), AuxSchedule::Constant(1e-3));
        assert!(c.check_convergence_conditions(1.0).is_err());
    }
}
