//! Exemplar-based word sense disambiguation.
//!
//! One classifier is learned per ambiguous word from sense-tagged
//! sentences. Each occurrence is encoded over four knowledge sources:
//! the POS tags of the three words on either side plus the target's
//! morphological form, binary indicators for automatically selected
//! co-occurring keywords, the exact word strings in nine collocation
//! windows around the target, and the verb governing a noun target.
//! Classification finds the stored training example at minimum distance,
//! where the distance between two symbolic feature values is the L1
//! difference of their conditional sense distributions.
//!
//! Pipeline: [`corpus`] parses tagged datasets, [`features`] induces the
//! per-word schema and encodes instances, [`classifier`] trains and
//! queries the nearest-neighbor model, [`eval`] reproduces the repeated
//! random-trial protocol with baselines and ablations. The `wsd` binary
//! wires them together.

pub mod classifier;
pub mod corpus;
pub mod eval;
pub mod features;
