//! Exact computation of invariants and rank of planar webs presented by an
//! implicit first-order differential equation `F(x, y, y') = 0`.

pub mod abelian;
pub mod blaschke;
pub mod connection;
pub mod corpus;
pub mod dynamics;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod presentation;
pub mod rank;
pub mod series;

pub use abelian::{AbelianCandidate, SlopeSystem};
pub use connection::{ConnectionData, LinearizabilityReport};
pub use dynamics::PwPolynomial;
pub use error::{Result, WebError};
pub use matrix::{RankDecision, SeriesMatrix};
pub use poly::SlopePolynomial;
pub use presentation::{SubwebSelector, WebPresentation};
pub use rank::RankCertificate;
pub use series::{Rational, TruncatedSeries};
