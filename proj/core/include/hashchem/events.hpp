#pragma once

#include <cstdint>

#include "hashchem/core.hpp"
#include "hashchem/fitness.hpp"

namespace hashchem {

/// Per-iteration bookkeeping. For the spatial model `matches` counts group
/// evaluations and births/deaths count replicated/deleted groups.
struct StepSummary {
  std::int64_t t = 0;
  std::uint64_t population_size = 0;
  std::uint64_t matches = 0;
  std::uint64_t births = 0;
  std::uint64_t deaths = 0;
  std::uint64_t mutated_multisets = 0;
  bool extinct = false;

  friend bool operator==(const StepSummary&, const StepSummary&) = default;
};

/// One successful replication.
struct ReplicationEvent {
  std::int64_t run_id = 0;
  std::int64_t t = 0;
  Multiset multiset;
  FitnessValue fitness;

  friend bool operator==(const ReplicationEvent&, const ReplicationEvent&) = default;
};

/// Receives the output stream of a simulation run. Both callbacks default to
/// no-ops so sinks only override what they consume.
class EventSink {
 public:
  virtual ~EventSink() = default;

  virtual void on_replication(std::int64_t t, const Multiset& copy, FitnessValue f) {
    (void)t;
    (void)copy;
    (void)f;
  }
  virtual void on_step(const StepSummary& summary) { (void)summary; }
};

/// Discards everything; used when timing runs.
class NullSink final : public EventSink {};

}  // namespace hashchem
