//! Irrationality indices: the least efficiency levels ω at which GARP(ω)
//! and HARP(ω) hold.

use crate::axioms::{garp_on_ratios, harp_witness, preference_ratios, GarpWitness, HarpWitness, Witness};
use crate::matrix::SquareMatrix;
use crate::scalar::Scalar;
use crate::semiring::max_cycle_geomean;
use crate::trade::TradeStatistics;

/// GARP infimum together with whether GARP holds at the infimum itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarpIndex<T> {
    pub omega: T,
    pub attained: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrrationalityReport<T> {
    pub omega_g: T,
    pub attained_g: bool,
    pub omega_h: T,
    /// Violation of GARP(ω) just below `omega_g` (none when `omega_g == 0`).
    pub garp_witness: Option<GarpWitness>,
    /// Cycle attaining `omega_h` (none for `T < 2`).
    pub harp_witness: Option<HarpWitness<T>>,
}

/// Largest cycle geometric mean of the Paasche matrix. Single-period
/// statistics have no cycles and get the value 1.
pub fn harp_irrationality<T: Scalar>(ts: &TradeStatistics<T>) -> T {
    if ts.periods() < 2 {
        return T::one();
    }
    max_cycle_geomean(ts.paasche_matrix().matrix(), 2)
        .expect("Paasche entries are positive")
        .value
}

/// Sorted distinct off-diagonal ratios `px[t][t] / px[t][s]`.
pub fn garp_breakpoints<T: Scalar>(ts: &TradeStatistics<T>) -> Vec<T> {
    breakpoints(&preference_ratios(&ts.cross_value_matrix()))
}

fn breakpoints<T: Scalar>(b: &SquareMatrix<T>) -> Vec<T> {
    let n = b.dim();
    let mut v: Vec<T> = (0..n)
        .flat_map(|t| (0..n).filter(move |&s| s != t).map(move |s| (t, s)))
        .map(|(t, s)| b.get(t, s))
        .collect();
    v.sort_by(|a, c| a.partial_cmp(c).expect("ratios are finite"));
    v.dedup();
    v
}

/// Infimum of `{ω > 0 : GARP(ω)}`.
///
/// The relation and the violation test only change at breakpoints, so GARP
/// is constant on each open interval between consecutive breakpoints. The
/// pieces `(0,b1), b1, (b1,b2), b2, …` are searched by bisection on their
/// index, which is exact because GARP(ω) is monotone in ω.
pub fn garp_irrationality<T: Scalar>(ts: &TradeStatistics<T>) -> GarpIndex<T> {
    garp_index_with_witness(&preference_ratios(&ts.cross_value_matrix())).0
}

fn garp_index_with_witness<T: Scalar>(b: &SquareMatrix<T>) -> (GarpIndex<T>, Option<GarpWitness>) {
    let bp = breakpoints(b);
    let two = T::lit(2.0);
    // piece 2i: open interval below bp[i]; piece 2i+1: bp[i] itself;
    // piece 2k: (bp[k-1], inf), where GARP always holds
    let probe = |piece: usize| -> T {
        let i = piece / 2;
        if piece % 2 == 1 {
            bp[i]
        } else if i == 0 {
            bp[0] / two
        } else if i == bp.len() {
            bp[i - 1] * two
        } else {
            (bp[i - 1] + bp[i]) / two
        }
    };
    if bp.is_empty() {
        return (
            GarpIndex {
                omega: T::zero(),
                attained: false,
            },
            None,
        );
    }
    let holds = |piece: usize| garp_on_ratios(b, probe(piece), T::zero());
    // first piece where GARP holds; the last piece always holds
    let (mut lo, mut hi) = (0usize, 2 * bp.len());
    if holds(0).satisfied {
        hi = 0;
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if holds(mid).satisfied {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let first = hi;
    let index = if first == 0 {
        GarpIndex {
            omega: T::zero(),
            attained: false,
        }
    } else if first % 2 == 1 {
        GarpIndex {
            omega: bp[first / 2],
            attained: true,
        }
    } else {
        GarpIndex {
            omega: bp[first / 2 - 1],
            attained: false,
        }
    };
    let witness = first
        .checked_sub(1)
        .and_then(|p| holds(p).witness)
        .and_then(|w| match w {
            Witness::Garp(g) => Some(g),
            _ => None,
        });
    (index, witness)
}

/// Independent estimate of the GARP infimum by bisection on ω over
/// `[lo, hi]`, where `hi` is the largest breakpoint (GARP always holds
/// there). Returns `lo` if GARP already holds at `lo`.
pub fn garp_irrationality_bisection<T: Scalar>(ts: &TradeStatistics<T>, lo: T, tol: T) -> T {
    let b = preference_ratios(&ts.cross_value_matrix());
    let bp = breakpoints(&b);
    let Some(&top) = bp.last() else {
        return T::zero();
    };
    let holds = |w: T| garp_on_ratios(&b, w, T::zero()).satisfied;
    let (mut lo, mut hi) = (lo, top);
    if holds(lo) {
        return lo;
    }
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn irrationality_report<T: Scalar>(ts: &TradeStatistics<T>) -> IrrationalityReport<T> {
    let b = preference_ratios(&ts.cross_value_matrix());
    let (g, garp_witness) = garp_index_with_witness(&b);
    let harp = (ts.periods() >= 2).then(|| harp_witness(&ts.paasche_matrix()));
    IrrationalityReport {
        omega_g: g.omega,
        attained_g: g.attained,
        omega_h: harp_irrationality(ts),
        garp_witness,
        harp_witness: harp,
    }
}
