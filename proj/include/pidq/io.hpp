#pragma once

#include <string>

#include <json.hpp>

#include "pidq/discretize.hpp"
#include "pidq/dist.hpp"
#include "pidq/model.hpp"

namespace pidq::io {

inline constexpr int kSchemaVersion = 1;

// --- distribution files -----------------------------------------------------
// {"cardinalities": [n1, n2, ny], "p": [ ... n1*n2*ny reals ... ]}
// flat index order: (i1*n2 + i2)*ny + iy
nlohmann::json dist_to_json(const JointDist& d);
JointDist dist_from_json(const nlohmann::json& j, int64_t cell_cap = kDefaultCellCap);
JointDist load_dist(const std::string& path, int64_t cell_cap = kDefaultCellCap);
void save_dist(const JointDist& d, const std::string& path);

// --- marginal files ----------------------------------------------------------
// {"m1y": [[...]], "m2y": [[...]], "m12": [[...]] (optional)}
nlohmann::json marginals_to_json(const PairwiseMarginals& m);
PairwiseMarginals marginals_from_json(const nlohmann::json& j);
PairwiseMarginals load_marginals(const std::string& path);
void save_marginals(const PairwiseMarginals& m, const std::string& path);

// --- sample files -------------------------------------------------------------
// Delimited text with a header row. Feature columns are either "x1" or
// "x1_0".."x1_{d-1}" (same for x2); the label column is "y".
SampleTable load_samples(const std::string& path);
void save_samples(const SampleTable& t, const std::string& path);

// --- model libraries ----------------------------------------------------------
nlohmann::json library_to_json(const ModelLibrary& lib);
ModelLibrary library_from_json(const nlohmann::json& j);
ModelLibrary load_library(const std::string& path);
void save_library(const ModelLibrary& lib, const std::string& path);

// Write via a temp file in the same directory plus an atomic rename, so a
// failed run never leaves a partial file behind.
void atomic_write_text(const std::string& path, const std::string& content);

// Round every number in the tree to `significant` digits for printing.
nlohmann::json round_numbers(const nlohmann::json& j, int significant);

// The tensor cell cap, honoring the PIDQ_MAX_CELLS environment override.
int64_t cell_cap_from_env();

}  // namespace pidq::io
