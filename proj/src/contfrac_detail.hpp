#pragma once

#include <cstdint>
#include <vector>

#include "ffcf/contfrac.hpp"

namespace ffcf::detail {

/// Prefix sums over the degree sequence deg[0..L-1] (deg[0] = deg b_0, unused).
struct StatsPrefix {
    std::vector<std::int64_t> sum;            // sum_{j=1}^k deg b_j
    std::vector<std::int64_t> literal;        // #{j in [1,k] : deg b_{j+1} >= D}
    std::vector<std::int64_t> strict;         // #{j in [1,k] : deg b_{j+1} >= D+1}
    std::vector<std::int64_t> literal_proof;  // #{j in [1,k] : deg b_j >= D}
    std::vector<std::int64_t> strict_proof;   // #{j in [1,k] : deg b_j >= D+1}
};

StatsPrefix stats_prefix(const std::vector<std::int64_t>& deg, std::int64_t threshold);

/// Requires b_{n+1} in the prefix (n <= L - 2).
CFStats stats_at(const StatsPrefix& p, std::int64_t n, std::int64_t threshold, bool with_sums);

}  // namespace ffcf::detail
