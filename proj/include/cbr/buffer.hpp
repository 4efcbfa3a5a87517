#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <string_view>

#include "cbr/dataset.hpp"
#include "cbr/random.hpp"

namespace cbr {

enum class BufferPolicy { ReservoirSampling, Fifo };

std::string_view to_string(BufferPolicy policy);

/// Fixed-capacity store of one class's instances.
///
/// `seen` counts instances of this class offered so far. Iteration order is
/// storage order: arrival order for FIFO, slot order for reservoir sampling.
class PairBuffer {
public:
    /// Throws InvalidInput when capacity is zero.
    PairBuffer(std::size_t capacity, BufferPolicy policy);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    std::uint64_t seen() const noexcept { return seen_; }
    BufferPolicy policy() const noexcept { return policy_; }

    const std::deque<Instance>& items() const noexcept { return items_; }
    auto begin() const noexcept { return items_.begin(); }
    auto end() const noexcept { return items_.end(); }

    /// Caller-side counter step that precedes update().
    void count_arrival() noexcept { ++seen_; }

    /// Below capacity: append. At capacity, FIFO evicts the oldest item; RS
    /// accepts with probability capacity/seen (one draw) and then overwrites a
    /// uniformly chosen slot (second draw, only on acceptance).
    /// Requires seen() >= size() + 1, i.e. count_arrival() already called.
    void update(const Instance& x, SplitMix64& rng);

    friend bool operator==(const PairBuffer&, const PairBuffer&) = default;

private:
    std::size_t capacity_;
    BufferPolicy policy_;
    std::uint64_t seen_ = 0;
    std::deque<Instance> items_;
};

/// The per-instance bookkeeping of the buffered pairwise framework: count the
/// arrival, update the instance's own-class buffer, then hand back the
/// opposite-class buffer the ranker is to be paired against. Both trainers
/// (confidence-weighted and first-order) drive their buffers through this.
class BufferedStream {
public:
    BufferedStream(BufferPolicy policy, std::size_t pos_capacity, std::size_t neg_capacity, std::uint64_t seed);

    /// Throws InvalidInput for a label outside {+1, -1}.
    const PairBuffer& admit(const Instance& x);

    const PairBuffer& positives() const noexcept { return pos_; }
    const PairBuffer& negatives() const noexcept { return neg_; }

private:
    PairBuffer pos_;
    PairBuffer neg_;
    SplitMix64 rng_;
};

}  // namespace cbr

namespace cbr {

/// Called after each instance's buffer update, before the ranker update.
/// Arguments: 0-based stream position and the buffers' state.
using AdmitObserver = std::function<void(std::size_t, const BufferedStream&)>;

/// Counters shared by every trainer.
struct TrainStats {
    std::size_t instances = 0;
    std::size_t pair_steps = 0;    // ranker steps attempted (one per buffered opposite instance)
    std::size_t active_steps = 0;  // steps that changed the model
    bool single_class = false;     // stream never contained both labels: no pair could form
};

}  // namespace cbr
