//! Semantic hypermedia engine for eLearning objects.
//!
//! Content lives in self-contained eLearning objects ([`elo`]) arranged in a
//! re-use DAG ([`store`]). Hyperlinks are kept outside the content in a link
//! base ([`linkbase`]) and translated, together with object metadata, into an
//! RDF statement graph ([`graph`]) where every link reifies the relation it
//! asserts. Link contexts ([`context`]) are RDQL queries ([`rdql`]) over that
//! graph; the renderer ([`render`]) decorates pages with the links selected by
//! the contexts a learner has switched on.

pub mod context;
pub mod elo;
pub mod graph;
pub mod ids;
pub mod layout;
pub mod linkbase;
pub mod ns;
pub mod rdql;
pub mod render;
pub mod store;
pub mod workspace;
mod xml;

pub use ids::{AnchorId, ContextId, EloId, LinkId};
