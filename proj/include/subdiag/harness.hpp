#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "subdiag/lp_metrics.hpp"

namespace subdiag {

enum class BlockStrategy { AllOnes, Coarse, Mixed };

struct SuiteConfig {
    int dim_min = 2;
    int dim_max = 5;
    std::vector<BlockStrategy> strategies = {BlockStrategy::AllOnes, BlockStrategy::Coarse,
                                             BlockStrategy::Mixed};
    std::vector<double> p_values = {1.0, 2.0, std::numeric_limits<double>::infinity()};
    int trials = 100;
    std::uint64_t master_seed = 0;
};

struct PropertyRecord {
    std::string name;
    long trials = 0;
    long failures = 0;
    double worst_residual = 0.0;
    std::string config;
    std::vector<nlohmann::json> failure_inputs;  // serialized replay data (capped)
};

struct VerificationReport {
    std::vector<PropertyRecord> properties;
    std::uint64_t master_seed = 0;
    std::string timestamp;
    std::string version;

    long total_failures() const;
    nlohmann::json to_json() const;
    std::string to_table() const;
};

/// Runs every library invariant as a named randomized property across
/// dimensions, block strategies and p values. Deterministic given
/// master_seed: trial t draws from its own stream derived from
/// (master_seed, t). Property failures are recorded, never thrown.
VerificationReport run_suite(const SuiteConfig& config);

/// Brute-force oracle for the determinant infimum at n = 2, blocks [1,1]:
/// refined grid search over d = diag(t, 1/t) and a = [[0, s], [0, 0]]
/// with complex s. Independent of the szego_infimum implementation.
double grid_oracle_szego(const CMatrix& h, const BlockStructure& bs, PNorm p,
                         int grid_density = 16);

}  // namespace subdiag
