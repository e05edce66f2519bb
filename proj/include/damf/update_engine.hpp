#pragma once

#include <vector>

#include "damf/factor_state.hpp"
#include "damf/graph.hpp"
#include "damf/projection_update.hpp"

namespace damf {

// Space projection for a node change: b is the appended column over the
// U-side rows. With u_is_x the U side is X (column append, Y gains the new
// node's row); with u_is_x == false the roles are swapped, which is how the
// row half of a node event runs. The returned update is always expressed in
// X/Y terms.
ProjectionUpdate update_embedding_n(const FactorState& s, const SparseVec& b,
                                    bool u_is_x = true);

// Space projection for an edge change: tracked matrix gains b c^T.
ProjectionUpdate update_embedding_e(const FactorState& s, const SparseVec& b,
                                    const SparseVec& c);

struct HandledEvent {
  std::vector<ProjectionUpdate> updates;
  std::vector<AppliedDelta> applied;
};

// Runs the update(s) for one event's delta sequence, applying each
// immediately. The applied deltas carry what the enhancer needs.
HandledEvent handle_event(FactorState& s,
                          const std::vector<DeltaVectors>& deltas);

}  // namespace damf
