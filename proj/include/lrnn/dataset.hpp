#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrnn/numerics.hpp"

namespace lrnn {

/// Paired sequences: inputs[i] is M x L, targets[i] is S x L (or S x 1 for
/// last-state readouts).
struct SequenceDataset {
    std::vector<RMatrix> inputs;
    std::vector<RMatrix> targets;

    std::size_t size() const { return inputs.size(); }
    bool empty() const { return inputs.empty(); }
};

struct DatasetMeta {
    std::string generator;
    std::uint64_t seed = 0;
    std::string params;
    std::uint64_t rejected = 0;
};

struct TrajectoryDataset : SequenceDataset {
    DatasetMeta meta;
};

} // namespace lrnn
