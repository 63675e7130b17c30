//! JSON file formats.
//!
//! Floats are printed by serde_json's shortest round-trip formatter, so a
//! value read back is bit-identical to the value written.

use ncfun_core::ncfun::{from_poly, from_realization, from_series, HandleBody};
use ncfun_core::verify::{ControlKind, NegativeControl, PropertyReport};
use ncfun_core::realization::ScanReport;
use ncfun_core::taylor::TaylorExpansion;
use ncfun_core::{
    ComplexMatrix, Domain, DomainKind, FreePoly, Handle, MatrixTuple, NcFunction, PolyMatrix,
    Realization, SeriesFunction, Word, C64,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<C64> for ComplexFile {
    fn from(z: C64) -> Self {
        ComplexFile { re: z.re, im: z.im }
    }
}

impl From<ComplexFile> for C64 {
    fn from(z: ComplexFile) -> Self {
        C64::new(z.re, z.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<ComplexFile>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixFile {
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows())
                .map(|i| m.row(i).iter().map(|&z| z.into()).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(CliError::Format(format!(
                "matrix declares {}x{} but its entries do not match",
                self.rows, self.cols
            )));
        }
        let data = self.entries.iter().flatten().map(|&z| z.into()).collect();
        Ok(ComplexMatrix::from_vec(self.rows, self.cols, data)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub word: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFile {
    pub d: usize,
    pub terms: Vec<TermFile>,
}

impl PolyFile {
    /// Terms in canonical (graded-lexicographic) order.
    pub fn from_poly(p: &FreePoly) -> Self {
        PolyFile {
            d: p.arity(),
            terms: p
                .terms()
                .map(|(w, c)| TermFile {
                    word: w.letters().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<FreePoly> {
        let terms = self
            .terms
            .iter()
            .map(|t| (Word::new(t.word.clone()), C64::new(t.re, t.im)));
        Ok(FreePoly::from_terms(self.d, terms)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    pub d: usize,
    pub n: usize,
    pub components: Vec<MatrixFile>,
}

impl PointFile {
    pub fn from_tuple(x: &MatrixTuple) -> Self {
        PointFile {
            d: x.arity(),
            n: x.dim(),
            components: x.components().iter().map(MatrixFile::from_matrix).collect(),
        }
    }

    pub fn to_tuple(&self) -> Result<MatrixTuple> {
        if self.components.len() != self.d {
            return Err(CliError::Format(format!(
                "point declares d = {} but has {} components",
                self.d,
                self.components.len()
            )));
        }
        let comps = self
            .components
            .iter()
            .map(|m| {
                let m = m.to_matrix()?;
                if m.shape() != (self.n, self.n) {
                    return Err(CliError::Format(format!(
                        "point declares n = {} but has a {}x{} component",
                        self.n,
                        m.rows(),
                        m.cols()
                    )));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixTuple::new(comps)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaFile {
    #[serde(rename = "I")]
    pub rows: usize,
    #[serde(rename = "J")]
    pub cols: usize,
    pub entries: Vec<Vec<PolyFile>>,
}

impl DeltaFile {
    pub fn from_delta(delta: &PolyMatrix) -> Self {
        DeltaFile {
            rows: delta.rows(),
            cols: delta.cols(),
            entries: (0..delta.rows())
                .map(|i| (0..delta.cols()).map(|j| PolyFile::from_poly(delta.entry(i, j))).collect())
                .collect(),
        }
    }

    pub fn to_delta(&self) -> Result<PolyMatrix> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(CliError::Format(format!(
                "delta declares {}x{} but its entries do not match",
                self.rows, self.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .flatten()
            .map(PolyFile::to_poly)
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix::new(self.rows, self.cols, entries)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizationFile {
    pub delta: DeltaFile,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: ComplexFile,
    #[serde(rename = "B")]
    pub b: MatrixFile,
    #[serde(rename = "C")]
    pub c: MatrixFile,
    #[serde(rename = "D")]
    pub d: MatrixFile,
}

impl RealizationFile {
    pub fn from_realization(r: &Realization) -> Self {
        RealizationFile {
            delta: DeltaFile::from_delta(r.delta()),
            m: r.aux_dim(),
            a: r.a().into(),
            b: MatrixFile::from_matrix(r.b()),
            c: MatrixFile::from_matrix(r.c()),
            d: MatrixFile::from_matrix(r.d()),
        }
    }

    pub fn to_realization(&self) -> Result<Realization> {
        Ok(Realization::new(
            self.delta.to_delta()?,
            self.m,
            self.a.into(),
            self.b.to_matrix()?,
            self.c.to_matrix()?,
            self.d.to_matrix()?,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainShape {
    Polydisk { radius: f64 },
    Rowball { radius: f64 },
    Deltaball {
        delta: DeltaFile,
        #[serde(default)]
        margin: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    #[serde(flatten)]
    pub shape: DomainShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_cap: Option<f64>,
}

impl DomainFile {
    pub fn from_domain(domain: &Domain) -> Self {
        let shape = match domain.kind() {
            DomainKind::Polydisk { radius } => DomainShape::Polydisk { radius: *radius },
            DomainKind::RowBall { radius } => DomainShape::Rowball { radius: *radius },
            DomainKind::DeltaBall { delta, margin } => DomainShape::Deltaball {
                delta: DeltaFile::from_delta(delta),
                margin: *margin,
            },
        };
        DomainFile {
            shape,
            norm_cap: domain.norm_cap(),
        }
    }

    pub fn to_domain(&self) -> Result<Domain> {
        let domain = match &self.shape {
            DomainShape::Polydisk { radius } => Domain::polydisk(*radius)?,
            DomainShape::Rowball { radius } => Domain::rowball(*radius)?,
            DomainShape::Deltaball { delta, margin } => Domain::delta_ball(delta.to_delta()?, *margin)?,
        };
        Ok(match self.norm_cap {
            Some(cap) => domain.with_norm_cap(cap)?,
            None => domain,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HandleKind {
    Poly,
    Series,
    Realization,
    Control,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandleFile {
    pub kind: HandleKind,
    pub payload: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    pub parts: Vec<PolyFile>,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlName {
    NonGraded,
    EntrywiseConjugate,
    CornerScalar,
}

impl From<ControlName> for ControlKind {
    fn from(c: ControlName) -> Self {
        match c {
            ControlName::NonGraded => ControlKind::NonGraded,
            ControlName::EntrywiseConjugate => ControlKind::EntrywiseConjugate,
            ControlName::CornerScalar => ControlKind::CornerScalar,
        }
    }
}

impl From<ControlKind> for ControlName {
    fn from(c: ControlKind) -> Self {
        match c {
            ControlKind::NonGraded => ControlName::NonGraded,
            ControlKind::EntrywiseConjugate => ControlName::EntrywiseConjugate,
            ControlKind::CornerScalar => ControlName::CornerScalar,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlFile {
    pub control: ControlName,
    pub d: usize,
}

/// A handle read from disk: a built-in NC function or a negative control.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedHandle {
    Builtin(Handle),
    Control(NegativeControl),
}

impl LoadedHandle {
    pub fn realization(&self) -> Option<&Realization> {
        match self {
            LoadedHandle::Builtin(h) => match h.body() {
                HandleBody::Realization(r) => Some(r),
                _ => None,
            },
            LoadedHandle::Control(_) => None,
        }
    }
}

impl NcFunction for LoadedHandle {
    fn arity(&self) -> usize {
        match self {
            LoadedHandle::Builtin(h) => h.arity(),
            LoadedHandle::Control(c) => c.arity(),
        }
    }

    fn domain(&self) -> &Domain {
        match self {
            LoadedHandle::Builtin(h) => h.domain(),
            LoadedHandle::Control(c) => c.domain(),
        }
    }

    fn eval_unchecked(&self, x: &MatrixTuple) -> ncfun_core::Result<ComplexMatrix> {
        match self {
            LoadedHandle::Builtin(h) => h.eval_unchecked(x),
            LoadedHandle::Control(c) => c.eval_unchecked(x),
        }
    }
}

fn payload<T: serde::de::DeserializeOwned>(value: &serde_json::Value, what: &str) -> Result<T> {
    serde_json::from_value(value.clone()).map_err(|e| CliError::Format(format!("{what} payload: {e}")))
}

impl HandleFile {
    pub fn from_handle(h: &Handle) -> Self {
        let (kind, payload) = match h.body() {
            HandleBody::Poly(p) => (HandleKind::Poly, serde_json::to_value(PolyFile::from_poly(p))),
            HandleBody::Series { series, truncation, .. } => (
                HandleKind::Series,
                serde_json::to_value(SeriesFile {
                    parts: series.parts().iter().map(PolyFile::from_poly).collect(),
                    radius: series.radius(),
                    truncation: Some(*truncation),
                }),
            ),
            HandleBody::Realization(r) => (
                HandleKind::Realization,
                serde_json::to_value(RealizationFile::from_realization(r)),
            ),
        };
        HandleFile {
            kind,
            payload: payload.expect("plain data serializes"),
            domain: Some(DomainFile::from_domain(h.domain())),
        }
    }

    pub fn control(kind: ControlKind, d: usize) -> Self {
        HandleFile {
            kind: HandleKind::Control,
            payload: serde_json::to_value(ControlFile {
                control: kind.into(),
                d,
            })
            .expect("plain data serializes"),
            domain: None,
        }
    }

    /// Builds the handle. Without a `domain` entry, polynomials and controls
    /// get the unit polydisk, series the polydisk of half their radius, and
    /// realizations their own δ-ball.
    pub fn load(&self, default_truncation: usize) -> Result<LoadedHandle> {
        let domain = self.domain.as_ref().map(DomainFile::to_domain).transpose()?;
        Ok(match self.kind {
            HandleKind::Poly => {
                let p = payload::<PolyFile>(&self.payload, "poly")?.to_poly()?;
                LoadedHandle::Builtin(from_poly(p, domain.unwrap_or_default()))
            }
            HandleKind::Series => {
                let s: SeriesFile = payload(&self.payload, "series")?;
                let parts = s.parts.iter().map(PolyFile::to_poly).collect::<Result<Vec<_>>>()?;
                let series = SeriesFunction::new(parts, s.radius)?;
                let domain = match domain {
                    Some(d) => d,
                    None => Domain::polydisk(0.5 * s.radius)?,
                };
                let truncation = s.truncation.unwrap_or(default_truncation);
                LoadedHandle::Builtin(from_series(series, truncation, domain)?)
            }
            HandleKind::Realization => {
                let r = payload::<RealizationFile>(&self.payload, "realization")?.to_realization()?;
                let h = from_realization(r);
                LoadedHandle::Builtin(match domain {
                    Some(d) => h.with_domain(d),
                    None => h,
                })
            }
            HandleKind::Control => {
                let c: ControlFile = payload(&self.payload, "control")?;
                let domain = domain.unwrap_or_default();
                LoadedHandle::Control(NegativeControl::new(c.control.into(), c.d, domain)?)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordReport {
    pub word: Vec<usize>,
    pub re: f64,
    pub im: f64,
    pub scalarity_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsFile {
    pub max_degree: usize,
    pub balanced: bool,
    pub max_scalarity_residual: f64,
    pub scalar_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub words: Vec<WordReport>,
}

impl DiagnosticsFile {
    pub fn new(t: &TaylorExpansion, scalar_tolerance: f64) -> Self {
        DiagnosticsFile {
            max_degree: t.max_degree(),
            balanced: t.balanced,
            max_scalarity_residual: t.max_residual(),
            scalar_tolerance,
            note: (!t.balanced)
                .then(|| "domain not known to be balanced; the expansion may not represent F globally".into()),
            words: t
                .diagnostics
                .iter()
                .map(|w| WordReport {
                    word: w.word.letters().to_vec(),
                    re: w.coefficient.re,
                    im: w.coefficient.im,
                    scalarity_residual: w.scalarity_residual,
                })
                .collect(),
        }
    }
}

/// A property report. Infinite residuals are written as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyFile {
    pub name: String,
    pub trials: usize,
    pub worst_residual: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl From<&PropertyReport> for PropertyFile {
    fn from(r: &PropertyReport) -> Self {
        PropertyFile {
            name: r.name.clone(),
            trials: r.trials,
            worst_residual: r.worst_residual.is_finite().then_some(r.worst_residual),
            threshold: r.threshold,
            passed: r.passed,
            seed: r.seed,
            note: r.note.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanFile {
    pub dim: usize,
    pub samples: usize,
    pub draws: usize,
    pub seed: u64,
    pub max_norm: f64,
    pub passed: bool,
}

impl From<&ScanReport> for ScanFile {
    fn from(r: &ScanReport) -> Self {
        ScanFile {
            dim: r.dim,
            samples: r.samples,
            draws: r.draws,
            seed: r.seed,
            max_norm: r.max_norm,
            passed: r.passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryFile {
    pub isometry_residual: f64,
    pub tolerance: f64,
    pub isometric: bool,
}
