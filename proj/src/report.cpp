#include "rga/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rga/errors.hpp"

namespace rga {

void VerificationReport::add(const std::string& name, double value) {
    Metric m;
    m.name = name;
    m.value = value;
    metrics.push_back(std::move(m));
}

void VerificationReport::add_bounded(const std::string& name, double value, double bound) {
    Metric m;
    m.name = name;
    m.value = value;
    m.bound = bound;
    m.pass = value <= bound;
    metrics.push_back(std::move(m));
}

void VerificationReport::add_bounded(const std::string& name, double value, double bound,
                                     const std::vector<double>& witness) {
    add_bounded(name, value, bound);
    metrics.back().witness = witness;
}

void VerificationReport::add_flag(const std::string& name, bool pass) {
    Metric m;
    m.name = name;
    m.value = pass ? 1.0 : 0.0;
    m.pass = pass;
    metrics.push_back(std::move(m));
}

void VerificationReport::merge(const std::string& prefix, const VerificationReport& other) {
    for (const auto& [k, v] : other.config)
        if (!config.count(k) || !prefix.empty()) config[prefix.empty() ? k : prefix + k] = v;
    for (Metric m : other.metrics) {
        m.name = prefix + m.name;
        metrics.push_back(std::move(m));
    }
    wall_time_s += other.wall_time_s;
}

bool VerificationReport::all_pass() const {
    for (const auto& m : metrics)
        if (m.pass.has_value() && !*m.pass) return false;
    return true;
}

const Metric* VerificationReport::find(const std::string& name) const {
    for (const auto& m : metrics)
        if (m.name == name) return &m;
    return nullptr;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string jstr(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += "\"";
    return out;
}

// Keys inside each object emitted in sorted order.
void metric_json(std::ostream& os, const Metric& m) {
    os << "{";
    bool first = true;
    auto field = [&](const std::string& k, const std::string& raw) {
        if (!first) os << ",";
        first = false;
        os << jstr(k) << ":" << raw;
    };
    if (m.bound) field("bound", fmt(*m.bound));
    field("name", jstr(m.name));
    if (m.pass) field("pass", *m.pass ? "true" : "false");
    if (!m.units.empty()) field("units", jstr(m.units));
    field("value", fmt(m.value));
    if (!m.witness.empty()) {
        std::string w = "[";
        for (std::size_t i = 0; i < m.witness.size(); ++i) {
            if (i) w += ",";
            w += fmt(m.witness[i]);
        }
        w += "]";
        field("witness", w);
    }
    os << "}";
}

} // namespace

std::string to_json(const VerificationReport& r, bool include_timing) {
    std::ostringstream os;
    os << "{";
    os << jstr("config") << ":{";
    bool first = true;
    for (const auto& [k, v] : r.config) {
        if (!first) os << ",";
        first = false;
        os << jstr(k) << ":" << jstr(v);
    }
    os << "},";
    os << jstr("metrics") << ":[";
    for (std::size_t i = 0; i < r.metrics.size(); ++i) {
        if (i) os << ",";
        metric_json(os, r.metrics[i]);
    }
    os << "],";
    os << jstr("schema_version") << ":" << r.schema_version << ",";
    os << jstr("suite") << ":" << jstr(r.suite) << ",";
    os << jstr("version") << ":" << jstr(r.version);
    if (include_timing) os << "," << jstr("wall_time_s") << ":" << fmt(r.wall_time_s);
    os << "}\n";
    return os.str();
}

void emit_json(const VerificationReport& r, const std::string& path, bool include_timing) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    out << to_json(r, include_timing);
    if (!out) throw IoFailure("write failed for '" + path + "'");
}

void emit_csv(const VerificationReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    out << "name,value,bound,pass\n";
    for (const auto& m : r.metrics) {
        out << m.name << "," << fmt(m.value) << ",";
        if (m.bound) out << fmt(*m.bound);
        out << ",";
        if (m.pass) out << (*m.pass ? "true" : "false");
        out << "\n";
    }
    if (!out) throw IoFailure("write failed for '" + path + "'");
}

VerificationReport parse_json(const std::string& text) {
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        VerificationReport r;
        r.suite = j.at("suite").get<std::string>();
        r.version = j.at("version").get<std::string>();
        r.schema_version = j.at("schema_version").get<int>();
        for (auto it = j.at("config").begin(); it != j.at("config").end(); ++it)
            r.config[it.key()] = it.value().get<std::string>();
        for (const auto& jm : j.at("metrics")) {
            Metric m;
            m.name = jm.at("name").get<std::string>();
            m.value = jm.at("value").get<double>();
            if (jm.contains("bound")) m.bound = jm["bound"].get<double>();
            if (jm.contains("pass")) m.pass = jm["pass"].get<bool>();
            if (jm.contains("units")) m.units = jm["units"].get<std::string>();
            if (jm.contains("witness"))
                for (const auto& w : jm["witness"]) m.witness.push_back(w.get<double>());
            r.metrics.push_back(std::move(m));
        }
        if (j.contains("wall_time_s")) r.wall_time_s = j["wall_time_s"].get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("report parse: ") + e.what());
    }
}

VerificationReport parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str());
}

} // namespace rga
