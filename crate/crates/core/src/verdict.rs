use std::fmt;

use serde::Serialize;

use crate::expr::{Expr, ZeroTest};

/// Three-valued outcome of an identity or membership check.
///
/// `ProbablyHolds` means every residual was either exactly zero or vanished
/// at all numerical samples, with at least one of the latter. Variants are
/// ordered from worst to best so that combining checks takes the minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Fails,
    ProbablyHolds,
    Holds,
}

impl Verdict {
    pub fn from_zero_test(z: ZeroTest) -> Verdict {
        match z {
            ZeroTest::Zero => Verdict::Holds,
            ZeroTest::ProbablyZero => Verdict::ProbablyHolds,
            ZeroTest::NonZero => Verdict::Fails,
        }
    }

    /// Verdict for "this residual vanishes".
    pub fn vanishes(e: &Expr) -> Verdict {
        Verdict::from_zero_test(e.is_zero())
    }

    /// Verdict for "all residuals vanish".
    pub fn all_vanish<'a>(es: impl IntoIterator<Item = &'a Expr>) -> Verdict {
        let mut v = Verdict::Holds;
        for e in es {
            v = v.and(Verdict::vanishes(e));
            if v == Verdict::Fails {
                break;
            }
        }
        v
    }

    pub fn and(self, other: Verdict) -> Verdict {
        self.min(other)
    }

    /// True unless the check failed.
    pub fn holds(self) -> bool {
        self != Verdict::Fails
    }

    pub fn is_exact(self) -> bool {
        self != Verdict::ProbablyHolds
    }
}

impl FromIterator<Verdict> for Verdict {
    fn from_iter<I: IntoIterator<Item = Verdict>>(iter: I) -> Verdict {
        iter.into_iter().fold(Verdict::Holds, Verdict::and)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::ProbablyHolds => "probably holds",
            Verdict::Fails => "fails",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_takes_the_weakest() {
        assert_eq!(
            Verdict::Holds.and(Verdict::ProbablyHolds),
            Verdict::ProbablyHolds
        );
        assert_eq!(Verdict::ProbablyHolds.and(Verdict::Fails), Verdict::Fails);
        let all: Verdict = [Verdict::Holds, Verdict::Holds].into_iter().collect();
        assert_eq!(all, Verdict::Holds);
    }
}
