#include "dualpair/cli.hpp"

#include "dualpair/error.hpp"

#include <utility>

namespace dualpair {

namespace {

#include "corpus_data.inc"

}  // namespace

const std::vector<std::string>& corpus_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, text] : corpus_entries) out.emplace_back(name);
        return out;
    }();
    return names;
}

std::string corpus_get(std::string_view name)
{
    for (const auto& [n, text] : corpus_entries)
        if (name == n) return text;
    std::string available;
    for (const auto& n : corpus_names()) available += (available.empty() ? "" : ", ") + n;
    throw ConfigError("corpus", "unknown corpus entry '" + std::string(name) + "'; available: " + available);
}

}  // namespace dualpair
