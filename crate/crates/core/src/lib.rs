//! Double-framed quiver representations, the invariant coordinates of their
//! moduli spaces, and the neural networks they encode.
//!
//! A network quiver `Q` has sources (inputs), sinks (outputs) and hidden
//! vertices. Splitting a representation of `Q` at its framed ends gives a
//! triple `(V, f, h)` acted on by invertible base changes at hidden
//! vertices; [`moduli::project`] sends a triple to the gauge-invariant
//! composites `h_j V_ω f_i`. [`network`] and [`grad`] read thin
//! representations as weighted networks and [`relu`] handles the momentum
//! map used for ReLU networks.
//!
//! ```
//! use std::sync::Arc;
//! use qmn::{fixtures, moduli, FramedQuiver, RankTolerance};
//!
//! let q = Arc::new(fixtures::a3_quiver());
//! let frame = Arc::new(FramedQuiver::thin(q));
//! let t = qmn::split(&frame, &fixtures::a3_rep(2.0, 3.0)).unwrap();
//! let point = moduli::project(&t).unwrap();
//! assert_eq!(point.flatten(), vec![6.0]);
//! assert!(moduli::is_simple(&t, RankTolerance::default()));
//! ```

pub mod error;
pub mod fixtures;
pub mod grad;
pub mod linalg;
pub mod moduli;
pub mod network;
pub mod quiver;
pub mod random;
pub mod relu;
pub mod rep;
pub mod thincat;

pub use error::{Error, Result};
pub use grad::{GradientRep, Loss, Sample};
pub use linalg::{RankTolerance, Scalar};
pub use moduli::{ModuliLayout, ModuliPoint, RankVector};
pub use network::{ActivationTag, ForwardTrace, NetSpec, NeuralNetwork};
pub use quiver::{
    ArrowId, ArrowSpec, DimensionVector, Path, Quiver, QuiverSpec, Role, VertexId,
};
pub use relu::Level;
pub use rep::{
    join, split, DeframedQuiver, DoubleFramedTriple, FramedQuiver, GaugeElement, RepSpec,
    Representation,
};
pub use thincat::{NetworkMorphism, ThinRep};
