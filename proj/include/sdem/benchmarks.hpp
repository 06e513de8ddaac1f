#pragma once
// The bundled benchmark corpus and the published closure-size table.

#include <string>
#include <vector>

#include "sdem/model.hpp"

#ifndef SDEM_BENCHMARK_DIR
#define SDEM_BENCHMARK_DIR "benchmarks"
#endif

namespace sdem {

struct Table1Row {
    std::string benchmark;
    std::vector<Monomial::Exponent> alpha;
    std::size_t expected_size;
    bool expected_prosolvable;
};

inline const std::vector<Table1Row>& table1_rows() {
    static const std::vector<Table1Row> rows = {
        {"ou-env", {0, 2}, 8, true},
        {"ou-env", {0, 3}, 15, true},
        {"ou-env", {0, 4}, 24, true},
        {"ou-env", {0, 5}, 35, true},
        {"ou-env", {0, 10}, 120, true},
        {"gene", {1, 0, 0, 0, 1}, 23, true},
        {"gene", {0, 0, 0, 0, 2}, 85, true},
        {"gene", {1, 0, 0, 0, 2}, 115, true},
        {"consensus", {1, 1}, 3, true},
        // variable order (p1, v1, p2, v2): the published |S| = 13 belongs to p2^2
        {"vehicles", {0, 0, 2, 0}, 13, true},
        {"oscillator", {0, 1, 2}, 6, true},
        {"coupled3d", {2, 2, 0}, 3, false},
    };
    return rows;
}

inline const std::vector<std::string>& benchmark_names() {
    static const std::vector<std::string> names = {"ou-env",     "gene",      "consensus",  "vehicles",
                                                   "oscillator", "coupled3d", "double-well"};
    return names;
}

inline std::string benchmark_path(const std::string& name, const std::string& dir = SDEM_BENCHMARK_DIR) {
    return dir + "/" + name + ".json";
}

inline SdeModel load_benchmark(const std::string& name, const std::string& dir = SDEM_BENCHMARK_DIR) {
    return load_model_file(benchmark_path(name, dir));
}

}  // namespace sdem
