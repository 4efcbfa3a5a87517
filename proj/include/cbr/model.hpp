#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "cbr/baseline.hpp"
#include "cbr/cw_ranker.hpp"
#include "cbr/dataset.hpp"

namespace cbr {

/// First-order models keep which method produced them so snapshots are tagged.
struct UniExpModel {
    LinearRanker ranker;
    friend bool operator==(const UniExpModel&, const UniExpModel&) = default;
};
struct PaPairModel {
    LinearRanker ranker;
    friend bool operator==(const PaPairModel&, const PaPairModel&) = default;
};

using Model = std::variant<GaussianRanker, DiagGaussianRanker, UniExpModel, PaPairModel>;

/// Snapshot variant tag: "cbr", "cbr-diag", "uniexp" or "pa-pair".
std::string_view variant_tag(const Model& model);

std::size_t model_dim(const Model& model);

double score(const Model& model, const Instance& x);

/// A trained model plus the feature scaling fitted on its training data.
struct Snapshot {
    Model model;
    std::optional<ScalingRecord> scaling;
};

// Text layout, one record per line, reals in shortest round-trip form
// (bit-exact on reload):
//
//   cbr-snapshot 1
//   variant <tag>
//   dim <d>
//   eta <eta>                      (cbr, cbr-diag)
//   penalty <C>                    (cbr, cbr-diag)
//   mean <d reals>
//   covariance                     (cbr) followed by d lines of d reals
//   confidence <d reals>           (cbr-diag)
//   scaling <k> <dim>              optional, then k lines "<index> <min> <max>"
//   end
void write_snapshot(std::ostream& out, const Snapshot& snapshot);

/// Throws ParseError (with the offending line) on malformed input.
Snapshot read_snapshot(std::istream& in);

void save_snapshot(const std::string& path, const Snapshot& snapshot);
Snapshot load_snapshot(const std::string& path);

}  // namespace cbr
