#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rga {

struct Metric {
    std::string name;
    double value = 0;
    std::optional<double> bound;
    std::optional<bool> pass;
    std::vector<double> witness;
    std::string units;
};

// Deterministic verification record: same config + seed => byte-identical
// canonical JSON (wall time deliberately excluded from the canonical form).
struct VerificationReport {
    std::string suite;
    std::map<std::string, std::string> config;
    std::vector<Metric> metrics;
    double wall_time_s = 0;
    std::string version = "1.0.0";
    int schema_version = 1;

    void add(const std::string& name, double value);
    void add_bounded(const std::string& name, double value, double bound);
    void add_bounded(const std::string& name, double value, double bound,
                     const std::vector<double>& witness);
    void add_flag(const std::string& name, bool pass);
    void merge(const std::string& prefix, const VerificationReport& other);
    bool all_pass() const;
    const Metric* find(const std::string& name) const;
};

std::string to_json(const VerificationReport& r, bool include_timing = false);
void emit_json(const VerificationReport& r, const std::string& path,
               bool include_timing = false);
void emit_csv(const VerificationReport& r, const std::string& path);
VerificationReport parse_json(const std::string& text);
VerificationReport parse_json_file(const std::string& path);

} // namespace rga
