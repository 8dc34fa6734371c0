#pragma once

#include <map>
#include <string>
#include <vector>

#include "hicap/bounds.hpp"
#include "hicap/config.hpp"
#include "hicap/montecarlo.hpp"

namespace hicap {

// key=value configuration text: one pair per line, '#' starts a comment.
// Paths ending in .json are treated as run manifests and the embedded
// "config" object is loaded instead.
std::map<std::string, std::string> read_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

// Builds a SystemConfig (plus trial count) from parsed keys; unknown keys are
// a config_error. Dimensions are not derived here.
struct ParsedConfig {
    SystemConfig sys;
    int trials = 100;
};
ParsedConfig config_from_keys(const std::map<std::string, std::string>& keys);
std::map<std::string, std::string> config_to_keys(const SystemConfig& cfg, int trials);

// Stable text form used everywhere a double is serialized, so re-runs are
// byte-identical: shortest round-trip decimal, 'inf' for infinities.
std::string format_double(double v);
double parse_double(const std::string& text);  // accepts 'inf'/'-inf'

std::string metrics_csv(const AggregateResult& result);
std::string bounds_csv_header();
std::string validation_csv_header();

struct ManifestInfo {
    std::string command;
    std::string tool_version;
    std::string timestamp;   // ISO-8601 UTC
    uint64_t seed = 0;
    std::vector<std::string> outputs;
    std::map<std::string, std::string> args;  // non-config flags (bounds grid)
};

std::string manifest_json(const ManifestInfo& info, const SystemConfig& cfg, int trials);
std::string manifest_json(const ManifestInfo& info);  // config-free commands

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string tool_version();
std::string iso8601_utc_now();

}  // namespace hicap
