#pragma once

#include <random>
#include <string>

#include "qigraph/io.hpp"

namespace testing_support {

inline std::string fixture(const std::string& name) { return std::string(QIGRAPH_FIXTURE_DIR) + "/" + name; }

inline qigraph::NahGraph load_fixture_graph(const std::string& name) { return qigraph::load_graph(fixture(name)); }
inline qigraph::HGraph load_fixture_h_graph(const std::string& name) { return qigraph::load_h_graph(fixture(name)); }

inline std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed * 0x9E3779B97F4A7C15ULL + 7); }

}  // namespace testing_support
