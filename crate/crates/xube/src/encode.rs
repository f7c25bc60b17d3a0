//! Encoding of (state, goal) pairs into flat numeric vectors for
//! function approximators. One encoder is registered per domain per
//! architecture; the encoder fixes the approximator's input width.

use ndarray::Array2;

/// Converts a `(state, goal)` pair into a fixed-width numeric row.
/// Encoding must be deterministic: equal inputs give bitwise-equal rows.
pub trait Encoder<S, G>: Send + Sync {
    /// Width of every encoded row.
    fn dim(&self) -> usize;

    /// Write the encoding of `(s, g)` into `out` (`out.len() == dim()`).
    fn encode_into(&self, s: &S, g: &G, out: &mut [f32]);

    fn encode(&self, s: &S, g: &G) -> Vec<f32> {
        let mut row = vec![0.0; self.dim()];
        self.encode_into(s, g, &mut row);
        row
    }
}

/// Stack the encodings of `pairs` into a row-per-pair matrix.
pub fn encode_rows<S, G, E: Encoder<S, G> + ?Sized>(
    encoder: &E,
    pairs: &[(&S, &G)],
) -> Array2<f32> {
    let dim = encoder.dim();
    let mut out = Array2::zeros((pairs.len(), dim));
    for (i, (s, g)) in pairs.iter().enumerate() {
        let row = out.row_mut(i).into_slice().expect("contiguous row");
        encoder.encode_into(s, g, row);
    }
    out
}
