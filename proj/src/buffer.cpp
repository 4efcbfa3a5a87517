#include "cbr/buffer.hpp"

#include "cbr/error.hpp"

namespace cbr {

std::string_view to_string(BufferPolicy policy) {
    return policy == BufferPolicy::Fifo ? "fifo" : "rs";
}

PairBuffer::PairBuffer(std::size_t capacity, BufferPolicy policy) : capacity_(capacity), policy_(policy) {
    if (capacity == 0) throw InvalidInput("buffer capacity must be at least 1");
}

void PairBuffer::update(const Instance& x, SplitMix64& rng) {
    if (items_.size() < capacity_) {
        items_.push_back(x);
        return;
    }
    if (policy_ == BufferPolicy::Fifo) {
        items_.pop_front();
        items_.push_back(x);
        return;
    }
    if (seen_ <= capacity_) {
        throw ContractViolation("reservoir update at capacity requires count_arrival() first");
    }
    if (rng.bounded(seen_) < capacity_) {
        items_[rng.bounded(capacity_)] = x;
    }
}

BufferedStream::BufferedStream(BufferPolicy policy, std::size_t pos_capacity, std::size_t neg_capacity,
                               std::uint64_t seed)
    : pos_(pos_capacity, policy), neg_(neg_capacity, policy), rng_(seed) {}

const PairBuffer& BufferedStream::admit(const Instance& x) {
    if (x.label != 1 && x.label != -1) throw InvalidInput("instance label must be +1 or -1");
    PairBuffer& own = x.label > 0 ? pos_ : neg_;
    own.count_arrival();
    own.update(x, rng_);
    return x.label > 0 ? neg_ : pos_;
}

}  // namespace cbr
