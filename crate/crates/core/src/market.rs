//! Tenor and curve data model, discount factors, Black's formula and the
//! swaption payoff evaluated relative to the maturity-bond numeraire.

use crate::error::{Error, Result};

/// Ordered payment dates `T_0 < ... < T_N` with year-fraction accruals.
#[derive(Debug, Clone, PartialEq)]
pub struct TenorStructure {
    dates: Vec<f64>,
    accruals: Vec<f64>,
}

impl TenorStructure {
    /// Builds a tenor structure from strictly increasing dates.
    pub fn new(dates: Vec<f64>) -> Result<Self> {
        if dates.len() < 2 {
            return Err(Error::InvalidInput(
                "tenor structure needs at least two dates".into(),
            ));
        }
        if dates.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidInput("tenor dates must be finite".into()));
        }
        let accruals: Vec<f64> = dates.windows(2).map(|w| w[1] - w[0]).collect();
        if accruals.iter().any(|&a| a <= 0.0) {
            return Err(Error::InvalidInput(
                "tenor dates must be strictly increasing".into(),
            ));
        }
        Ok(Self { dates, accruals })
    }

    /// Annual tenor `T_i = i` for `i = 0..=n_forwards`, one forward per year.
    pub fn annual(n_forwards: usize) -> Self {
        let dates = (0..=n_forwards).map(|i| i as f64).collect();
        Self::new(dates).expect("annual tenor is strictly increasing")
    }

    /// Payment date `T_i`.
    pub fn date(&self, i: usize) -> f64 {
        self.dates[i]
    }

    /// Accrual `tau_i = T_{i+1} - T_i`.
    pub fn accrual(&self, i: usize) -> f64 {
        self.accruals[i]
    }

    /// Number of forward rates `N` spanned by the dates (`dates.len() - 1`).
    pub fn forward_count(&self) -> usize {
        self.accruals.len()
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    pub fn accruals(&self) -> &[f64] {
        &self.accruals
    }
}

/// Initial forwards `F_i(0)` and their Black volatilities, one per forward.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketCurve {
    pub forwards0: Vec<f64>,
    pub black_vols: Vec<f64>,
}

impl MarketCurve {
    pub fn new(forwards0: Vec<f64>, black_vols: Vec<f64>) -> Result<Self> {
        if forwards0.len() != black_vols.len() {
            return Err(Error::InvalidInput(
                "forwards and Black vols must have equal length".into(),
            ));
        }
        if forwards0.iter().any(|&f| !(f >= 0.0) || !f.is_finite()) {
            return Err(Error::InvalidInput(
                "initial forwards must be finite and non-negative".into(),
            ));
        }
        if black_vols.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput(
                "Black volatilities must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            forwards0,
            black_vols,
        })
    }

    /// Checks that the curve covers every forward of `tenor`.
    pub fn validate_against(&self, tenor: &TenorStructure) -> Result<()> {
        if self.forwards0.len() != tenor.forward_count() {
            return Err(Error::InvalidInput(format!(
                "curve has {} forwards, tenor spans {}",
                self.forwards0.len(),
                tenor.forward_count()
            )));
        }
        Ok(())
    }
}

/// A European `T_a x (T_b - T_a)` swaption struck at `strike`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwaptionSpec {
    /// Maturity index `a`: the option expires at `T_a`.
    pub maturity_index: usize,
    /// End index `b`: the underlying swap pays at `T_{a+1}..=T_b`.
    pub end_index: usize,
    /// Fixed rate exchanged in the underlying swap.
    pub strike: f64,
}

impl SwaptionSpec {
    pub fn new(maturity_index: usize, end_index: usize, strike: f64) -> Result<Self> {
        let spec = Self {
            maturity_index,
            end_index,
            strike,
        };
        if maturity_index == 0 || maturity_index >= end_index {
            return Err(Error::InvalidInput(format!(
                "swaption indices must satisfy 0 < a < b, got a={maturity_index}, b={end_index}"
            )));
        }
        if !(strike > 0.0) || !strike.is_finite() {
            return Err(Error::InvalidInput("strike must be positive".into()));
        }
        Ok(spec)
    }

    pub fn validate_against(&self, tenor: &TenorStructure) -> Result<()> {
        if self.end_index > tenor.forward_count() {
            return Err(Error::InvalidInput(format!(
                "swaption end index {} exceeds tenor forward count {}",
                self.end_index,
                tenor.forward_count()
            )));
        }
        Ok(())
    }

    /// Number of forward rates the payoff depends on (`b - a`).
    pub fn forward_span(&self) -> usize {
        self.end_index - self.maturity_index
    }

    /// PDE/MC state dimension: the spanned forwards plus the volatility.
    pub fn state_dimension(&self) -> usize {
        self.forward_span() + 1
    }
}

/// Standard normal cumulative distribution function.
///
/// Routed through `erfc` so the absolute error stays below 1e-12 over the
/// whole real line.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Black's formula `F Phi(d1) - K Phi(d2)` for total volatility `nu`.
///
/// `nu = 0` returns the intrinsic value `max(F - K, 0)`.
pub fn black_price(strike: f64, forward: f64, nu: f64) -> f64 {
    debug_assert!(strike > 0.0 && forward > 0.0 && nu >= 0.0);
    if nu == 0.0 {
        return (forward - strike).max(0.0);
    }
    let d1 = ((forward / strike).ln() + 0.5 * nu * nu) / nu;
    let d2 = d1 - nu;
    forward * norm_cdf(d1) - strike * norm_cdf(d2)
}

/// Discount factor `P(T_i, T_j)` from forwards observed at `T_i`.
///
/// `forwards` holds `F_i..F_{j-1}` (so `forwards[k]` is the rate for the
/// period starting at `T_{i+k}`).
pub fn bond_price(forwards: &[f64], i: usize, j: usize, tenor: &TenorStructure) -> Result<f64> {
    debug_assert!(i <= j && j <= tenor.forward_count() + 1);
    debug_assert!(forwards.len() >= j - i);
    let mut p = 1.0;
    for k in i..j {
        let factor = 1.0 + tenor.accrual(k) * forwards[k - i];
        if factor <= 0.0 {
            return Err(Error::DegenerateForward { index: k, factor });
        }
        p /= factor;
    }
    Ok(p)
}

/// Swaption payoff at `T_a` relative to the numeraire `P(t, T_a)`.
///
/// `state_forwards` holds `F_a..F_{b-1}` observed at `T_a`. Returns
/// `( sum_i P(T_a, T_{i+1}) tau_i (F_i - K) )^+` with `P(T_a, T_a) = 1`.
pub fn swaption_payoff(
    state_forwards: &[f64],
    spec: &SwaptionSpec,
    tenor: &TenorStructure,
) -> Result<f64> {
    let a = spec.maturity_index;
    debug_assert_eq!(state_forwards.len(), spec.forward_span());
    let mut swap = 0.0;
    let mut discount = 1.0;
    for (offset, &f) in state_forwards.iter().enumerate() {
        let i = a + offset;
        let tau = tenor.accrual(i);
        let factor = 1.0 + tau * f;
        if factor <= 0.0 {
            return Err(Error::DegenerateForward { index: i, factor });
        }
        discount /= factor; // P(T_a, T_{i+1})
        swap += discount * tau * (f - spec.strike);
    }
    Ok(swap.max(0.0))
}

/// Black caplet value `P(T_0, T_{i+1}) tau_i Bl(K, F_i(0), sigma_i sqrt(T_i - T_0))`.
pub fn caplet_black_value(
    curve: &MarketCurve,
    tenor: &TenorStructure,
    i: usize,
    strike: f64,
) -> Result<f64> {
    if i == 0 || i >= tenor.forward_count() {
        return Err(Error::InvalidInput(format!(
            "caplet index {i} outside 1..{}",
            tenor.forward_count()
        )));
    }
    let discount = bond_price(&curve.forwards0[..=i], 0, i + 1, tenor)?;
    let expiry = tenor.date(i) - tenor.date(0);
    let nu = curve.black_vols[i] * expiry.sqrt();
    Ok(discount * tenor.accrual(i) * black_price(strike, curve.forwards0[i], nu))
}

/// EURIBOR market data as of 27 July 2004: nine annual forwards with their
/// Black volatilities, the standard data set used by the experiment defaults.
pub mod euribor_2004 {
    use super::{MarketCurve, TenorStructure};

    pub const FORWARDS: [f64; 9] = [
        0.02423306, 0.03281384, 0.03931690, 0.04364818, 0.04680236, 0.04933085, 0.05135066,
        0.05273314, 0.05376115,
    ];

    pub const BLACK_VOLS: [f64; 9] = [
        0.0, 0.2473, 0.2245, 0.1936, 0.1743, 0.1615, 0.1502, 0.1424, 0.1342,
    ];

    pub const STRIKE: f64 = 0.055;

    pub fn tenor() -> TenorStructure {
        TenorStructure::annual(FORWARDS.len())
    }

    pub fn curve() -> MarketCurve {
        MarketCurve::new(FORWARDS.to_vec(), BLACK_VOLS.to_vec()).expect("reference data is valid")
    }
}
