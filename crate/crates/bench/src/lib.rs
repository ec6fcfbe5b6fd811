//! Shared inputs for the criterion benches under `benches/`.

use std::sync::Arc;

use qmn::fixtures;
use qmn::grad::Sample;
use qmn::random::{random_network_quiver, random_thin, random_triple, rng};
use qmn::{ActivationTag, DimensionVector, DoubleFramedTriple, FramedQuiver, NeuralNetwork, Quiver};

/// A random network quiver with the given hidden width and hidden dims `d`.
pub fn random_triple_on(hidden: usize, d: usize, seed: u64) -> DoubleFramedTriple {
    let mut r = rng(seed);
    let q = Arc::new(random_network_quiver(2, hidden, 2, 0.4, &mut r));
    let dims = DimensionVector(q.vertices().map(|v| if q.is_hidden(v) { d } else { 1 }).collect());
    let frame = Arc::new(FramedQuiver::new(q, dims).expect("positive framed dims"));
    random_triple(&frame, &mut r)
}

/// Fully connected tanh network with bias.
pub fn mlp(widths: &[usize], seed: u64) -> NeuralNetwork {
    let q: Arc<Quiver> = Arc::new(fixtures::mlp_quiver(widths, true).into_network().expect("mlp is a network"));
    let w = random_thin(&q, &mut rng(seed));
    NeuralNetwork::uniform(w, ActivationTag::Tanh).expect("valid network")
}

pub fn samples(n: &NeuralNetwork, count: usize, seed: u64) -> Vec<Sample> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| Sample {
            x: qmn::random::random_matrix::<f64>(n.inputs().len(), 1, &mut r).as_slice().to_vec(),
            y: qmn::random::random_matrix::<f64>(n.outputs().len(), 1, &mut r).as_slice().to_vec(),
        })
        .collect()
}
