use crate::error::{Error, Result};
use crate::scalar::Real;

/// Absolute tolerance on total probability mass.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<R> {
    pub location: R,
    pub mass: R,
}

/// Probability measure on `[1, ∞]` with finitely many atoms in `[1, ∞)` and a
/// separate mass at `∞`.
///
/// Tail sums `P((x, ∞])` and first moments `∫_{[1,x]} u P(du)` are cached so that
/// every view of the measure is evaluated in `O(log n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<R> {
    atoms: Vec<Atom<R>>,
    mass_infinity: R,
    // tails[i] = sum of masses of atoms i.. plus mass_infinity
    tails: Vec<R>,
    // moments[i] = sum over atoms < i of location * mass
    moments: Vec<R>,
}

impl<R: Real> DiscreteMeasure<R> {
    pub fn new(atoms: Vec<Atom<R>>, mass_infinity: R) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !a.location.is_finite() || a.location < R::one() {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i}: location must be finite and >= 1, got {}",
                    a.location
                )));
            }
            if !(a.mass > R::zero()) || !a.mass.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom {i}: mass must be positive, got {}", a.mass)));
            }
            if i > 0 && !(a.location > atoms[i - 1].location) {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i}: locations must be strictly increasing ({} after {})",
                    a.location,
                    atoms[i - 1].location
                )));
            }
        }
        if !(mass_infinity >= R::zero() && mass_infinity <= R::one()) {
            return Err(Error::InvalidMeasure(format!("mass at infinity must lie in [0,1], got {mass_infinity}")));
        }
        let total = atoms.iter().fold(mass_infinity, |s, a| s + a.mass);
        if (total - R::one()).abs() > R::lit(MASS_TOLERANCE) {
            return Err(Error::InvalidMeasure(format!("total mass is {total}, expected 1")));
        }
        Ok(Self::from_parts_unchecked(atoms, mass_infinity))
    }

    pub(crate) fn from_parts_unchecked(atoms: Vec<Atom<R>>, mass_infinity: R) -> Self {
        let n = atoms.len();
        let mut tails = vec![mass_infinity; n + 1];
        for i in (0..n).rev() {
            tails[i] = (tails[i + 1] + atoms[i].mass).min(R::one());
        }
        let mut moments = vec![R::zero(); n + 1];
        for i in 0..n {
            moments[i + 1] = moments[i] + atoms[i].location * atoms[i].mass;
        }
        DiscreteMeasure { atoms, mass_infinity, tails, moments }
    }

    /// Builds a measure from `(location, mass)` pairs, merging atoms at equal locations and
    /// dropping zero masses.
    pub fn from_pairs(pairs: &[(R, R)], mass_infinity: R) -> Result<Self> {
        let mut sorted: Vec<(R, R)> = pairs.iter().copied().filter(|p| p.1 != R::zero()).collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut atoms: Vec<Atom<R>> = Vec::with_capacity(sorted.len());
        for (location, mass) in sorted {
            match atoms.last_mut() {
                Some(last) if last.location == location => last.mass = last.mass + mass,
                _ => atoms.push(Atom { location, mass }),
            }
        }
        Self::new(atoms, mass_infinity)
    }

    /// δ_u.
    pub fn point_mass(u: R) -> Result<Self> {
        Self::new(vec![Atom { location: u, mass: R::one() }], R::zero())
    }

    /// δ_∞.
    pub fn at_infinity() -> Self {
        Self::from_parts_unchecked(Vec::new(), R::one())
    }

    pub fn atoms(&self) -> &[Atom<R>] {
        &self.atoms
    }

    pub fn mass_infinity(&self) -> R {
        self.mass_infinity
    }

    /// Number of atoms with location `<= x`.
    fn rank(&self, x: R) -> usize {
        self.atoms.partition_point(|a| a.location <= x)
    }

    /// `P((x, ∞])`.
    pub fn tail(&self, x: R) -> R {
        self.tails[self.rank(x)]
    }

    /// `∫_{[1,x]} u P(du)`: the scaled ASLA of the measure.
    pub fn asla_value(&self, y: R) -> R {
        self.moments[self.rank(y)]
    }

    /// `∫_{[1,x]} u P(du) + x P((x, ∞])`: the spine of the measure.
    pub fn spine_value(&self, x: R) -> R {
        let k = self.rank(x);
        self.moments[k] + x * self.tails[k]
    }

    /// `∫_{[1,X*]} u P(du) + X P((X*, ∞])`: the ALA of the measure, evaluated directly.
    pub fn ala_value(&self, x_star: R, x: R) -> R {
        let k = self.rank(x_star);
        self.moments[k] + x * self.tails[k]
    }

    /// Scales finite atoms by `(1 - c)` and adds `c` to the mass at infinity.
    pub fn mix_with_cash(&self, c: R) -> Result<Self> {
        if !(c >= R::zero() && c <= R::one()) {
            return Err(Error::InvalidMeasure(format!("cash fraction must lie in [0,1], got {c}")));
        }
        let keep = R::one() - c;
        let atoms: Vec<Atom<R>> = self
            .atoms
            .iter()
            .map(|a| Atom { location: a.location, mass: a.mass * keep })
            .filter(|a| a.mass > R::zero())
            .collect();
        Ok(Self::from_parts_unchecked(atoms, c + keep * self.mass_infinity))
    }

    pub fn total_mass(&self) -> R {
        self.tails[0]
    }
}
