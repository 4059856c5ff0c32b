#pragma once

#include "rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace sparselab {

// Flat key=value configuration. Lines hold one pair each; '#' starts a
// comment; later keys override earlier ones.
struct run_config {
    std::map<std::string, std::string> kv;

    static run_config parse(const std::string& text);

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    std::string get(const std::string& key, const std::string& def) const;
    std::string require(const std::string& key) const;
    double get_num(const std::string& key, double def) const;
    long long get_int(const std::string& key, long long def) const;
    rat get_rat(const std::string& key, const std::string& def) const;
    // "a,b,c" or a halving/doubling range "first..last"
    std::vector<double> get_list(const std::string& key, const std::string& def) const;
    // "a,b,c" or a unit-step range "first..last"
    std::vector<int> get_int_list(const std::string& key, const std::string& def) const;
};

struct run_result {
    int exit_code = 0; // 0 = pass, 1 = tolerance gate failed
    std::string summary;
    std::string csv;
};

// Dispatches on the `task` key: sharpness, continuity, lp-decay,
// sparse-check, radius-perturbation, pointwise-bound, average. Configuration
// problems raise errors; quantitative gate failures set exit_code = 1.
run_result run_task(const std::string& config_text);

} // namespace sparselab
