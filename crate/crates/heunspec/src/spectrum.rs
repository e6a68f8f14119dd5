//! Closed-form bound-state energies, quarkonium mass spectra, the
//! quasi-exact Coulomb-strength relation, and parameter scans.

use crate::error::{Error, Result};
use crate::model::{derive_scales, preset, DerivedScales, FieldConfig, PhysParams, Species};

/// How the Coulomb strength of a level was fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GConstraint {
    /// `g = (n + l + 1) b sqrt(1 / (2 a mu))`, the field-independent
    /// relation the preset mass table uses (with `l = m`).
    QuasiExactRelation,
    /// A root of the series termination condition `C_{n+1} = 0`.
    TerminationRoot,
    /// Not constrained; the closed-form energy does not involve `g`.
    Unconstrained,
}

/// One closed-form level.
#[derive(Debug, Clone)]
pub struct LevelResult {
    pub energy: f64,
    pub n: u32,
    pub m: i32,
    pub scales: DerivedScales,
    pub g_constraint: GConstraint,
}

/// Closed-form level energy
/// `E = (2 sqrt(8 mu a + B^2) (n + 1 + |m+nu|) + (m+nu) B - mu^2 b^2 / (8 mu a + B^2)) / (2 mu)`
/// for `n >= 1`.
pub fn energy(params: &PhysParams, fields: &FieldConfig, n: u32, m: i32) -> Result<LevelResult> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!("n = {n} (need n >= 1)")));
    }
    let scales = derive_scales(params, fields, m)?;
    let radical_sq = 8.0 * params.mu * params.a + fields.b_field * fields.b_field;
    if radical_sq <= 0.0 || radical_sq.is_nan() {
        return Err(Error::DegenerateScale(radical_sq / 4.0));
    }
    let radical = radical_sq.sqrt();
    let two_mu_e = 2.0 * radical * (n as f64 + 1.0 + scales.alpha)
        + scales.m_plus_nu * fields.b_field
        - (params.mu * params.b).powi(2) / radical_sq;
    Ok(LevelResult {
        energy: two_mu_e / (2.0 * params.mu),
        n,
        m,
        scales,
        g_constraint: GConstraint::Unconstrained,
    })
}

/// Residual of the defining energy relation at `(energy, n, m)`:
/// `2 sqrt(8 mu a + B^2)(n+1+alpha) - 2 mu E + (m+nu) B - mu^2 b^2/(8 mu a + B^2)`.
/// Vanishes (to rounding) on the value returned by [`energy`].
pub fn energy_equation_residual(
    params: &PhysParams,
    fields: &FieldConfig,
    n: u32,
    m: i32,
    energy: f64,
) -> Result<f64> {
    let scales = derive_scales(params, fields, m)?;
    let radical_sq = 8.0 * params.mu * params.a + fields.b_field * fields.b_field;
    let radical = radical_sq.sqrt();
    Ok(2.0 * radical * (n as f64 + 1.0 + scales.alpha) - 2.0 * params.mu * energy
        + scales.m_plus_nu * fields.b_field
        - (params.mu * params.b).powi(2) / radical_sq)
}

/// One row of a mass table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEntry {
    pub species: Species,
    pub n: u32,
    pub m: i32,
    pub b_field: f64,
    pub nu: f64,
    /// Coulomb strength from the quasi-exact relation with `l = m`.
    pub g: f64,
    /// Binding energy of the level.
    pub energy: f64,
    /// `M = 2 m_q + E`.
    pub mass: f64,
}

/// Quarkonium mass `M = 2 m_q + E(n, m)`; requires `quark_mass`.
pub fn mass(params: &PhysParams, fields: &FieldConfig, n: u32, m: i32) -> Result<MassEntry> {
    let m_q = params.quark_mass.ok_or(Error::MissingQuarkMass)?;
    let level = energy(params, fields, n, m)?;
    let species = if (params.mu - 2.34).abs() < 1e-12 {
        Species::Bottomonium
    } else {
        Species::Charmonium
    };
    Ok(MassEntry {
        species,
        n,
        m,
        b_field: fields.b_field,
        nu: fields.nu,
        g: quasi_exact_g(n, m, params.a, params.b, params.mu),
        energy: level.energy,
        mass: 2.0 * m_q + level.energy,
    })
}

/// Quasi-exact Coulomb strength `g = (n + l + 1) b sqrt(1 / (2 a mu))`.
/// Field-independent by construction; the series termination condition
/// generally disagrees with it at `B > 0` (the oracle reports the gap).
pub fn quasi_exact_g(n: u32, l: i32, a: f64, b: f64, mu: f64) -> f64 {
    (n as f64 + l as f64 + 1.0) * b * (1.0 / (2.0 * a * mu)).sqrt()
}

/// The nine-row preset mass table: charmonium at `B = 2` and `B = 4`,
/// bottomonium at `B = 2`, each for `(n, m)` in `{(1,1), (2,1), (2,2)}`,
/// all at `nu = 2` and with `g` from the quasi-exact relation (`l = m`).
/// Ordering: charmonium `B = 2` rows, charmonium `B = 4` rows, bottomonium
/// rows, each block by `(n, m)`.
pub fn mass_table(species: Option<Species>) -> Vec<MassEntry> {
    const LEVELS: [(u32, i32); 3] = [(1, 1), (2, 1), (2, 2)];
    let mut rows = Vec::with_capacity(9);
    let mut push_block = |sp: Species, b_field: f64| {
        let (params, mut fields) = preset(sp);
        fields.b_field = b_field;
        for &(n, m) in &LEVELS {
            rows.push(mass(&params, &fields, n, m).expect("preset table row"));
        }
    };
    match species {
        None => {
            push_block(Species::Charmonium, 2.0);
            push_block(Species::Charmonium, 4.0);
            push_block(Species::Bottomonium, 2.0);
        }
        Some(Species::Charmonium) => {
            push_block(Species::Charmonium, 2.0);
            push_block(Species::Charmonium, 4.0);
        }
        Some(Species::Bottomonium) => push_block(Species::Bottomonium, 2.0),
    }
    rows
}

/// Reference values the mass-table self-check verifies against, to `1e-6`
/// relative. Rows are `(n, m, value)` in natural units, at `nu = 2`.
pub mod reference {
    use crate::model::Species;

    pub const CHARMONIUM_MASS_B2: [(u32, i32, f64); 3] = [
        (1, 1, 20.93557326),
        (2, 1, 23.72100966),
        (2, 2, 27.85779742),
    ];
    pub const CHARMONIUM_MASS_B4: [(u32, i32, f64); 3] = [
        (1, 1, 38.30284487),
        (2, 1, 43.75008836),
        (2, 2, 51.90003455),
    ];
    pub const BOTTOMONIUM_MASS_B2: [(u32, i32, f64); 3] = [
        (1, 1, 16.12549012),
        (2, 1, 17.2297556),
        (2, 2, 18.76137168),
    ];
    pub const CHARMONIUM_G: [(u32, i32, f64); 3] = [
        (1, 1, 3.068357313),
        (2, 1, 4.091143084),
        (2, 2, 5.113928855),
    ];
    pub const BOTTOMONIUM_G: [(u32, i32, f64); 3] = [
        (1, 1, 1.705231169),
        (2, 1, 2.273641559),
        (2, 2, 2.842051949),
    ];

    pub fn expected_mass(species: Species, n: u32, m: i32, b_field: f64) -> Option<f64> {
        let table = match (species, b_field as i32) {
            (Species::Charmonium, 2) => &CHARMONIUM_MASS_B2,
            (Species::Charmonium, 4) => &CHARMONIUM_MASS_B4,
            (Species::Bottomonium, 2) => &BOTTOMONIUM_MASS_B2,
            _ => return None,
        };
        table.iter().find(|&&(tn, tm, _)| tn == n && tm == m).map(|&(_, _, v)| v)
    }

    pub fn expected_g(species: Species, n: u32, m: i32) -> Option<f64> {
        let table = match species {
            Species::Charmonium => &CHARMONIUM_G,
            Species::Bottomonium => &BOTTOMONIUM_G,
        };
        table.iter().find(|&&(tn, tm, _)| tn == n && tm == m).map(|&(_, _, v)| v)
    }
}

/// Which parameter a scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    QuadraticStrength,
    LinearStrength,
    MagneticField,
    FluxRatio,
}

impl std::str::FromStr for ScanAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(ScanAxis::QuadraticStrength),
            "b" => Ok(ScanAxis::LinearStrength),
            "B" => Ok(ScanAxis::MagneticField),
            "nu" => Ok(ScanAxis::FluxRatio),
            other => Err(Error::InvalidParameter(format!(
                "axis `{other}` (expected a, b, B, or nu)"
            ))),
        }
    }
}

impl ScanAxis {
    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::QuadraticStrength => "a",
            ScanAxis::LinearStrength => "b",
            ScanAxis::MagneticField => "B",
            ScanAxis::FluxRatio => "nu",
        }
    }
}

/// One scan row; `energy` is `None` where the point was invalid (the scan
/// continues past bad rows).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub x: f64,
    pub energy: Option<f64>,
}

/// Uniformly sample the closed-form energy along one parameter axis,
/// holding everything else fixed.
#[allow(clippy::too_many_arguments)]
pub fn scan_energy(
    params: &PhysParams,
    fields: &FieldConfig,
    n: u32,
    m: i32,
    axis: ScanAxis,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<Vec<ScanPoint>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("steps = {steps} (need >= 2)")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!("range [{lo}, {hi}]")));
    }
    let mut out = Vec::with_capacity(steps);
    for i in 0..steps {
        let x = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let point = (|| -> Result<f64> {
            let (p, f) = match axis {
                ScanAxis::QuadraticStrength => (PhysParams::new(params.mu, x, params.b, params.g)?, *fields),
                ScanAxis::LinearStrength => (PhysParams::new(params.mu, params.a, x, params.g)?, *fields),
                ScanAxis::MagneticField => (*params, FieldConfig::new(x, fields.nu)?),
                ScanAxis::FluxRatio => (*params, FieldConfig::new(fields.b_field, x)?),
            };
            Ok(energy(&p, &f, n, m)?.energy)
        })();
        out.push(ScanPoint { x, energy: point.ok() });
    }
    Ok(out)
}
