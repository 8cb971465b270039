//! Diagnostic codes and the crate error type.

use std::fmt;

use serde::Serialize;

/// Machine-readable diagnostic code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    // surface validation
    ArcOccurrence,
    MultipleBseg,
    CornerMismatch,
    NonorientableGluing,
    BadEuler,
    XDegree,
    // involutions
    NotOrderTwo,
    FixedMarkedPoint,
    FixedPolygon,
    UnreversedFixedArc,
    OrientationReversed,
    IncompatibleMap,
    // presentations
    DegreeExceeded,
    SuccessorClash,
    InfiniteDimensional,
    OvergluedVertex,
    NotGentle,
    EndAssignmentFailure,
    SizeLimit,
    Disconnected,
    // algebra
    NotStabilized,
    NotIdempotent,
    BadInvolution,
    // morphisms, covers, curves
    CornerMapRelationFailure,
    CoverMapRelationFailure,
    InternalGluing,
    CurveThroughBranch,
    InvalidCurve,
    BoundaryPoint,
    NotConnectedToAnchor,
    // input files
    Syntax,
    UnknownId,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        use Code::*;
        match self {
            ArcOccurrence => "ARC_OCCURRENCE",
            MultipleBseg => "MULTIPLE_BSEG",
            CornerMismatch => "CORNER_MISMATCH",
            NonorientableGluing => "NONORIENTABLE_GLUING",
            BadEuler => "BAD_EULER",
            XDegree => "X_DEGREE",
            NotOrderTwo => "NOT_ORDER_TWO",
            FixedMarkedPoint => "FIXED_MARKED_POINT",
            FixedPolygon => "FIXED_POLYGON",
            UnreversedFixedArc => "UNREVERSED_FIXED_ARC",
            OrientationReversed => "ORIENTATION_REVERSED",
            IncompatibleMap => "INCOMPATIBLE_MAP",
            DegreeExceeded => "DEGREE_EXCEEDED",
            SuccessorClash => "SUCCESSOR_CLASH",
            InfiniteDimensional => "INFINITE_DIMENSIONAL",
            OvergluedVertex => "OVERGLUED_VERTEX",
            NotGentle => "NOT_GENTLE",
            EndAssignmentFailure => "END_ASSIGNMENT_FAILURE",
            SizeLimit => "SIZE_LIMIT",
            Disconnected => "DISCONNECTED",
            NotStabilized => "NOT_STABILIZED",
            NotIdempotent => "NOT_IDEMPOTENT",
            BadInvolution => "BAD_INVOLUTION",
            CornerMapRelationFailure => "PHI_RELATION_FAILURE",
            CoverMapRelationFailure => "PSI_RELATION_FAILURE",
            InternalGluing => "INTERNAL_GLUING",
            CurveThroughBranch => "CURVE_THROUGH_BRANCH",
            InvalidCurve => "INVALID_CURVE",
            BoundaryPoint => "BOUNDARY_POINT",
            NotConnectedToAnchor => "NOT_CONNECTED_TO_ANCHOR",
            Syntax => "SYNTAX",
            UnknownId => "UNKNOWN_ID",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One reported problem, attached to the id of the offending object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: Code,
    pub subject: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
}

impl Diagnostic {
    pub fn new(code: Code, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { code, subject: subject.into(), message: message.into(), line: None }
    }

    pub fn at_line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}(line {}) {}: {}", self.code, l, self.subject, self.message),
            None => write!(f, "{} {}: {}", self.code, self.subject, self.message),
        }
    }
}

/// Error carrying one or more diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", render(.diagnostics))]
pub struct Error {
    pub diagnostics: Vec<Diagnostic>,
}

fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub fn new(code: Code, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Error { diagnostics: vec![Diagnostic::new(code, subject, message)] }
    }

    pub fn from_diagnostics(diagnostics: Vec<Diagnostic>) -> Self {
        Error { diagnostics }
    }

    /// Code of the first diagnostic.
    pub fn code(&self) -> Code {
        self.diagnostics[0].code
    }

    pub fn has(&self, code: Code) -> bool {
        self.diagnostics.iter().any(|d| d.code == code)
    }
}

impl From<Diagnostic> for Error {
    fn from(d: Diagnostic) -> Self {
        Error { diagnostics: vec![d] }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Turn a diagnostics list into `Ok(())` when empty.
pub fn check(diags: Vec<Diagnostic>) -> Result<()> {
    if diags.is_empty() {
        Ok(())
    } else {
        Err(Error::from_diagnostics(diags))
    }
}
