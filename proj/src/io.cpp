#include "hicap/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

namespace hicap {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int out = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw config_error("invalid integer for '" + key + "': " + v);
    }
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const unsigned long long out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw config_error("invalid integer for '" + key + "': " + v);
    }
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> keys;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error("config line is not key=value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("empty key in config line: " + line);
        keys[key] = value;
    }
    return keys;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(buf.str());
        } catch (const std::exception& e) {
            throw config_error(std::string("invalid manifest json: ") + e.what());
        }
        if (!doc.contains("config") || !doc["config"].is_object())
            throw config_error("manifest has no config object: " + path);
        std::map<std::string, std::string> keys;
        for (const auto& [k, v] : doc["config"].items())
            keys[k] = v.is_string() ? v.get<std::string>() : v.dump();
        return keys;
    }
    return parse_config_text(buf.str());
}

ParsedConfig config_from_keys(const std::map<std::string, std::string>& keys) {
    ParsedConfig out;
    SystemConfig& cfg = out.sys;
    for (const auto& [key, value] : keys) {
        if (key == "n") cfg.n = parse_int(key, value);
        else if (key == "s") cfg.s = parse_int(key, value);
        else if (key == "k_s") cfg.k_s = parse_int(key, value);
        else if (key == "t") cfg.t = parse_int(key, value);
        else if (key == "p_u") cfg.p_u = parse_double(value);
        else if (key == "kbar_u") cfg.kbar_u = parse_int(key, value);
        else if (key == "m") cfg.m = parse_int(key, value);
        else if (key == "snr_db") {
            cfg.snr_db = parse_double(value);
            cfg.noise_free = std::isinf(cfg.snr_db) && cfg.snr_db > 0;
        } else if (key == "noise_free") {
            if (value != "true" && value != "false")
                throw config_error("noise_free must be true or false");
            cfg.noise_free = value == "true";
        } else if (key == "seed") cfg.seed = parse_u64(key, value);
        else if (key == "detector_mode") {
            if (value == "topk") cfg.detector_mode = DetectorMode::topk;
            else if (value == "threshold") cfg.detector_mode = DetectorMode::threshold;
            else throw config_error("detector_mode must be topk or threshold");
        } else if (key == "xi") cfg.xi = parse_double(value);
        else if (key == "iterations") cfg.iterations = parse_int(key, value);
        else if (key == "birthday_pool") {
            if (value == "u") cfg.birthday_pool = BirthdayPool::per_subchannel_blocks;
            else if (value == "n") cfg.birthday_pool = BirthdayPool::signal_dim;
            else throw config_error("birthday_pool must be u or n");
        } else if (key == "load_mode") {
            if (value == "deterministic") cfg.load_mode = LoadMode::deterministic;
            else if (value == "binomial") cfg.load_mode = LoadMode::binomial;
            else throw config_error("load_mode must be deterministic or binomial");
        } else if (key == "total_users") cfg.total_users = parse_int(key, value);
        else if (key == "trials") out.trials = parse_int(key, value);
        else if (key == "u" || key == "c") {
            // derived values are accepted (manifests embed them) and re-derived
        } else {
            throw config_error("unknown config key: " + key);
        }
    }
    return out;
}

std::map<std::string, std::string> config_to_keys(const SystemConfig& cfg, int trials) {
    std::map<std::string, std::string> keys;
    keys["n"] = std::to_string(cfg.n);
    keys["s"] = std::to_string(cfg.s);
    keys["k_s"] = std::to_string(cfg.k_s);
    keys["t"] = std::to_string(cfg.t);
    keys["p_u"] = format_double(cfg.p_u);
    keys["kbar_u"] = std::to_string(cfg.kbar_u);
    keys["m"] = std::to_string(cfg.m);
    keys["u"] = std::to_string(cfg.u);
    keys["c"] = std::to_string(cfg.c);
    keys["snr_db"] = format_double(cfg.snr_db);
    keys["noise_free"] = cfg.noise_free ? "true" : "false";
    keys["seed"] = std::to_string(cfg.seed);
    keys["detector_mode"] = cfg.detector_mode == DetectorMode::topk ? "topk" : "threshold";
    keys["xi"] = format_double(cfg.xi);
    keys["iterations"] = std::to_string(cfg.iterations);
    keys["birthday_pool"] =
        cfg.birthday_pool == BirthdayPool::per_subchannel_blocks ? "u" : "n";
    keys["load_mode"] = cfg.load_mode == LoadMode::deterministic ? "deterministic" : "binomial";
    keys["total_users"] = std::to_string(cfg.total_users);
    keys["trials"] = std::to_string(trials);
    return keys;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    if (v == 0.0) return "0";
    if (v == std::floor(v) && std::fabs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    // shortest representation that round-trips a double
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw config_error("invalid number: " + text);
    }
}

std::string metrics_csv(const AggregateResult& result) {
    std::string csv =
        "n,m,c,kbar_u,snr_db,trials,mean_supported,std_supported,p_md,p_fa,ser\n";
    for (const auto& p : result.points) {
        csv += std::to_string(p.config.n) + ',' + std::to_string(p.config.m) + ',' +
               std::to_string(p.config.c) + ',' + std::to_string(p.config.kbar_u) + ',' +
               format_double(p.config.noise_free
                                 ? std::numeric_limits<double>::infinity()
                                 : p.config.snr_db) +
               ',' + std::to_string(p.trials) + ',' + format_double(p.mean_supported) + ',' +
               format_double(p.std_supported) + ',' + format_double(p.mean_pmd) + ',' +
               format_double(p.mean_pfa) + ',' + format_double(p.mean_ser) + '\n';
    }
    return csv;
}

std::string bounds_csv_header() {
    return "bound,k,k_s,k_u,m,n,t,c,x,eps,xi,snr_db,raw_value,clamped_value\n";
}

std::string validation_csv_header() { return "check,parameters,empirical,bound,pass\n"; }

namespace {

nlohmann::json manifest_base(const ManifestInfo& info) {
    nlohmann::json doc;
    doc["tool"] = "hicap";
    doc["version"] = info.tool_version;
    doc["command"] = info.command;
    doc["timestamp"] = info.timestamp;
    doc["seed"] = info.seed;
    doc["outputs"] = info.outputs;
    if (!info.args.empty()) {
        nlohmann::json args;
        for (const auto& [k, v] : info.args) args[k] = v;
        doc["args"] = args;
    }
    return doc;
}

}  // namespace

std::string manifest_json(const ManifestInfo& info, const SystemConfig& cfg, int trials) {
    nlohmann::json doc = manifest_base(info);
    nlohmann::json conf;
    for (const auto& [k, v] : config_to_keys(cfg, trials)) conf[k] = v;
    doc["config"] = conf;
    return doc.dump(2) + "\n";
}

std::string manifest_json(const ManifestInfo& info) { return manifest_base(info).dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string tool_version() { return "0.1.0"; }

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace hicap
