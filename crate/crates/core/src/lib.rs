//! Join decompositions of Artin defining graphs, covering-walk schedules, the
//! contracting-element word built from them, and a checkable certificate that
//! its hyperplanes are nested, with dihedral and Coxeter-quotient oracles.

pub mod certificate;
pub mod coxeter;
pub mod graph;
pub mod pipeline;
pub mod quotient;
pub mod shadow;
pub mod walks;
pub mod word;

pub use certificate::{verify_document, CertificateDoc, DocumentReport};
pub use graph::{parse_graph, DefiningGraph};
pub use pipeline::{construct, ConstructError, ConstructOptions, Construction};
