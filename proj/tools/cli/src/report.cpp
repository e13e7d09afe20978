#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fabtwin/cli/cli.hpp"

namespace fabtwin::cli {

double num(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

Section Section::adopt(json values, std::map<std::string, std::string> units) {
    Section s;
    s.values_ = std::move(values);
    s.units_ = std::move(units);
    return s;
}

Section& Section::put(const std::string& key, json value, const std::string& unit) {
    if (value.is_number_float()) value = num(value.get<double>());
    units_[value.is_array() ? key + "[]" : key] = unit;
    values_[key] = std::move(value);
    return *this;
}

Section& Section::text(const std::string& key, json value) {
    values_[key] = std::move(value);
    return *this;
}

Section& Section::put(const std::string& key, const Ratio& ratio, int precision) {
    Section r;
    r.text("display", ratio.display(precision));
    r.put("precision", precision, "digits");
    r.put("numerator", ratio.numerator, "ratio");
    r.put("denominator", ratio.denominator, "ratio");
    r.put("value", ratio.value(), "ratio");
    return section(key, r);
}

Section& Section::section(const std::string& key, const Section& child) {
    values_[key] = child.values_;
    for (const auto& [path, unit] : child.units_) units_[key + "." + path] = unit;
    return *this;
}

Section& Section::list(const std::string& key, const std::vector<Section>& items) {
    json arr = json::array();
    for (const auto& item : items) {
        arr.push_back(item.values_);
        for (const auto& [path, unit] : item.units_) units_[key + "[]." + path] = unit;
    }
    values_[key] = std::move(arr);
    return *this;
}

namespace {

void flatten_into(const json& value, const std::string& prefix, const std::string& pattern,
                  std::vector<std::pair<std::string, json>>& out, std::vector<std::string>* patterns) {
    if (value.is_object()) {
        for (const auto& [k, v] : value.items()) {
            flatten_into(v, prefix.empty() ? k : prefix + "." + k, pattern.empty() ? k : pattern + "." + k, out,
                         patterns);
        }
    } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            flatten_into(value[i], prefix + "[" + std::to_string(i) + "]", pattern + "[]", out, patterns);
        }
    } else {
        out.emplace_back(prefix, value);
        if (patterns) patterns->push_back(pattern);
    }
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::vector<std::pair<std::string, json>> flatten(const json& value) {
    std::vector<std::pair<std::string, json>> out;
    std::vector<std::string> patterns;
    flatten_into(value, "", "", out, &patterns);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].first = patterns[i];
    return out;
}

std::string render(const Document& doc, OutputFormat format, bool pretty) {
    std::vector<std::pair<std::string, json>> leaves;
    std::vector<std::string> patterns;
    flatten_into(doc.results.values(), "", "", leaves, &patterns);
    auto unit_of = [&](std::size_t i) {
        auto it = doc.results.units().find(patterns[i]);
        return it == doc.results.units().end() ? std::string() : it->second;
    };

    if (pretty) {
        std::size_t width = 0;
        for (const auto& [k, v] : leaves) width = std::max(width, k.size());
        std::string out = doc.command + " (" + doc.spec_name + ")\n";
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            const auto& [k, v] = leaves[i];
            out += "  " + k + std::string(width - k.size() + 2, ' ') + scalar_text(v);
            const auto unit = unit_of(i);
            if (!unit.empty()) out += " " + unit;
            out += "\n";
        }
        for (const auto& w : doc.warnings) out += "warning: " + w + "\n";
        return out;
    }

    if (format == OutputFormat::Csv) {
        std::string out = "key,value,unit\n";
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            out += csv_field(leaves[i].first) + "," + csv_field(scalar_text(leaves[i].second)) + "," +
                   csv_field(unit_of(i)) + "\n";
        }
        for (std::size_t i = 0; i < doc.warnings.size(); ++i) {
            out += csv_field("warnings[" + std::to_string(i) + "]") + "," + csv_field(doc.warnings[i]) + ",\n";
        }
        return out;
    }

    json j;
    j["tool_version"] = kToolVersion;
    j["spec_name"] = doc.spec_name;
    j["command"] = doc.command;
    j["inputs"] = doc.inputs;
    j["results"] = doc.results.values();
    j["units"] = doc.results.units();
    j["warnings"] = doc.warnings;
    return j.dump() + "\n";
}

}  // namespace fabtwin::cli
