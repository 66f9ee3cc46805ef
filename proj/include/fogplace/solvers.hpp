#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogplace/evaluator.hpp"
#include "fogplace/random.hpp"

namespace fogplace {

enum class MoveKind { vnf_reassign, bulk_vnf_reassign, request_reassign, bulk_request_reassign };

const char* to_string(MoveKind k);

// One neighborhood step. Moves relocate deployed instances or shuffle
// assignments among deployed instances; none of them grows the deployment.
// Which fields matter depends on the kind:
//   vnf_reassign:          type_idx, instance, source_node, target_node
//   bulk_vnf_reassign:     source_node, target_node
//   request_reassign:      request, slot, type_idx, source_instance,
//                          target_instance
//   bulk_request_reassign: type_idx, source_instance, target_instance
struct Move {
  MoveKind kind{MoveKind::vnf_reassign};
  int type_idx{-1};
  int instance{-1};
  int request{-1};
  int slot{-1};
  int source_node{-1};
  int target_node{-1};
  int source_instance{-1};
  int target_instance{-1};
};

// Reverting deltas; instances emptied by a request move are undeployed on
// apply and restored on revert.
struct MoveUndo {
  std::vector<std::array<int, 3>> deployed;  // (type, instance, previous node)
  std::vector<std::array<int, 3>> assigned;  // (request, slot, previous instance)
};

MoveUndo apply_move(Placement& p, const Move& m, const Evaluator& ev);
void revert_move(Placement& p, const MoveUndo& u);

// A move is forbidden while the key of the step that would undo a recent move
// is still remembered; re-remembering a key restarts its tenure.
using TabuKey = std::array<int, 4>;

TabuKey probe_key(const Move& m);
TabuKey reverse_key(const Move& m);

class TabuList {
 public:
  explicit TabuList(int tenure) : tenure_(tenure) {}
  void remember(const TabuKey& k, long iter) { expiry_[k] = iter + tenure_; }
  bool is_tabu(const TabuKey& k, long iter) const {
    auto it = expiry_.find(k);
    return it != expiry_.end() && iter <= it->second;
  }
  std::size_t size() const { return expiry_.size(); }

 private:
  int tenure_;
  std::map<TabuKey, long> expiry_;
};

enum class TargetPolicy { guided, uniform };

// Draws candidate moves. Subjects are picked uniformly; targets are picked by
// an aggregated local score of time, hosting cost and communication with
// predecessors and users (ties to the lowest node id) under the guided
// policy, or uniformly under the uniform policy. Capacity-infeasible targets
// are discarded up front.
class MoveGenerator {
 public:
  MoveGenerator(const Evaluator& ev, double alpha, TargetPolicy policy)
      : ev_(&ev), alpha_(alpha), policy_(policy) {}

  // `count` draws; throws NoMoveAvailable when not a single move can be
  // constructed (degenerate networks).
  std::vector<Move> propose(const Placement& p, Rng& rng, int count) const;

 private:
  std::optional<Move> propose_one(const Placement& p, Rng& rng) const;
  std::optional<Move> make_vnf_move(const Placement& p, Rng& rng) const;
  std::optional<Move> make_bulk_vnf_move(const Placement& p, Rng& rng) const;
  std::optional<Move> make_request_move(const Placement& p, Rng& rng) const;
  std::optional<Move> make_bulk_request_move(const Placement& p, Rng& rng) const;
  // Subject-fixed constructors shared by the random draws and the sweep.
  std::optional<Move> vnf_move_for(const Placement& p, int t, int i, Rng& rng) const;
  std::optional<Move> bulk_vnf_move_for(const Placement& p, int src, Rng& rng) const;
  std::optional<Move> request_move_for(const Placement& p, int r, int slot, Rng& rng) const;
  std::optional<Move> bulk_request_move_for(const Placement& p, int t, int i, Rng& rng) const;

  const Evaluator* ev_;
  double alpha_{0.5};
  TargetPolicy policy_{TargetPolicy::guided};
};

struct TabuParams {
  int tenure{60};
  int stop_after{20};    // stop once this many consecutive iterations bring no improvement
  int neighborhood{16};
  std::uint64_t seed{1};
  long max_iterations{100000};
};

struct TraceRow {
  long iteration{0};
  double fitness{0.0};       // current solution after this iteration
  double best_fitness{0.0};
  MoveKind kind{MoveKind::vnf_reassign};
  bool moved{false};
  double elapsed_ms{0.0};
};

struct SolveResult {
  Placement best;
  double best_fitness{0.0};
  std::vector<TraceRow> trace;
  double wall_ms{0.0};
  double obj_scale{0.0};
  long evaluated{0};         // placements scored (exhaustive search only)
  std::string status{"ok"};
};

// Seeded starting point: one instance per required type on a random
// capacity-respecting node (full node fallback), every slot assigned to it.
Placement initial_placement(const Evaluator& ev, std::uint64_t seed);

// Per-iteration admission rule: non-tabu, or better than the incumbent best.
inline bool move_admissible(const TabuList& tabu, const TabuKey& key, long iter,
                            double fitness, double best_fitness) {
  return !tabu.is_tabu(key, iter) || fitness < best_fitness;
}

// Tabu search over the four-move neighborhood. Each iteration evaluates
// `neighborhood` candidates, steps to the best admissible one (even uphill),
// and remembers the undo key of the step taken; stops after stop_after+1
// consecutive iterations without a new best. The penalty scale is frozen to
// the raw objective of the seed's initial placement so fitness values are
// comparable across solvers of the same seed.
SolveResult tabu_search(const Evaluator& ev, double alpha, const TabuParams& params,
                        TargetPolicy policy = TargetPolicy::guided);

// First-fit pass over requests in order: reuse a deployed instance with spare
// capacity, otherwise instantiate on the node with the least time-and-
// communication score among capacity-feasible nodes (lowest id fallback when
// nothing fits). The seed only pins the fitness scale; the placement itself
// is deterministic.
SolveResult greedy_place(const Evaluator& ev, double alpha, std::uint64_t seed);

// Plans on a copy of the network with every node pinned to its initial
// position (mobility ignored), then reports that placement. The returned
// fitness is the static-world one; re-evaluate under the true model to see
// what the plan actually delivers.
SolveResult psf_place(const NetworkModel& net, const Workload& wl, double alpha,
                      const TabuParams& params);

struct ExhaustiveLimits {
  int max_nodes{4};
  int max_types{3};
  int max_instances{2};
  int max_requests{3};
};

// Full enumeration: per-type node multisets (instances are interchangeable)
// crossed with every slot-to-instance assignment, scored like any other
// placement. Throws TooLarge beyond the limits.
SolveResult exhaustive_optimal(const Evaluator& ev, double alpha, std::uint64_t seed,
                               const ExhaustiveLimits& limits = {});

}  // namespace fogplace
