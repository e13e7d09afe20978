#pragma once

#include <map>
#include <string>
#include <vector>

#include "fabtwin/path_analytics.hpp"
#include "json.hpp"

namespace fabtwin::cli {

using nlohmann::json;

// Rounds to 12 significant digits so printed values stay stable and short.
double num(double v);

// A block of results plus the unit of every numeric leaf.
class Section {
  public:
    static Section adopt(json values, std::map<std::string, std::string> units);

    Section& put(const std::string& key, json value, const std::string& unit);
    Section& text(const std::string& key, json value);
    Section& put(const std::string& key, const Ratio& ratio, int precision = 2);
    Section& section(const std::string& key, const Section& child);
    Section& list(const std::string& key, const std::vector<Section>& items);

    const json& values() const { return values_; }
    const std::map<std::string, std::string>& units() const { return units_; }

  private:
    json values_ = json::object();
    std::map<std::string, std::string> units_;
};

enum class OutputFormat { Json, Csv };

struct Document {
    std::string spec_name;
    std::string command;
    json inputs = json::object();
    Section results;
    std::vector<std::string> warnings;
};

std::string render(const Document& doc, OutputFormat format, bool pretty);

// Dotted paths of numeric leaves, array indices written as `[]`.
std::vector<std::pair<std::string, json>> flatten(const json& value);

}  // namespace fabtwin::cli
