use std::fmt;

use crate::multiindex::MultiIndex;

/// Which symbol an atom is a derivative of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// The target symbol `sigma`.
    Sigma,
    /// The difference symbol `sigma - sigma_0`.
    Delta,
    /// The baseline symbol `sigma_0`.
    Baseline,
    /// The time-drift factor `-d_t phi_0 - x . d_t psi_0`.
    TimeDrift,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Sigma => "sig",
            Family::Delta => "dsig",
            Family::Baseline => "sig0",
            Family::TimeDrift => "drift",
        }
    }
}

/// A symbolic factor `d^eps_xi s(x, xi)` (base) or `d^eps_xi s_l(xi)` (slope).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomKey {
    pub family: Family,
    /// `0` for the base symbol, `l >= 1` for the slope symbol of direction `l`.
    pub slope: u8,
    pub deriv: MultiIndex,
}

impl AtomKey {
    pub fn base(family: Family, deriv: MultiIndex) -> Self {
        AtomKey {
            family,
            slope: 0,
            deriv,
        }
    }

    /// Slope atom with 1-based direction `l`.
    pub fn slope(family: Family, l: usize, deriv: MultiIndex) -> Self {
        assert!(l >= 1 && l <= deriv.dim(), "slope direction out of range");
        AtomKey {
            family,
            slope: l as u8,
            deriv,
        }
    }

    pub fn sigma(deriv: MultiIndex) -> Self {
        Self::base(Family::Sigma, deriv)
    }

    pub fn sigma_slope(l: usize, deriv: MultiIndex) -> Self {
        Self::slope(Family::Sigma, l, deriv)
    }

    pub fn is_base(&self) -> bool {
        self.slope == 0
    }

    /// 0-based slope direction.
    pub fn direction(&self) -> Option<usize> {
        (self.slope > 0).then(|| self.slope as usize - 1)
    }

    pub fn dim(&self) -> usize {
        self.deriv.dim()
    }

    /// `d_{x_l}` of the atom: base atoms become slope atoms, slope atoms are
    /// x-constant. `l` is 0-based.
    pub fn derive_x(&self, l: usize) -> Option<AtomKey> {
        self.is_base().then(|| AtomKey {
            family: self.family,
            slope: l as u8 + 1,
            deriv: self.deriv.clone(),
        })
    }
}

impl fmt::Debug for AtomKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AtomKey {
    /// `sig`, `sig[1]`, `sig_1`, `sig_2[0,1]`, `dsig[2]`, `drift_1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family.name())?;
        if self.slope > 0 {
            write!(f, "_{}", self.slope)?;
        }
        if !self.deriv.is_zero() {
            let parts: Vec<String> = self.deriv.entries().iter().map(|e| e.to_string()).collect();
            write!(f, "[{}]", parts.join(","))?;
        }
        Ok(())
    }
}
