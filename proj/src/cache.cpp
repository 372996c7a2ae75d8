#include "qpp/cache.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

namespace qpp {

using nlohmann::json;

SpectrumCache::SpectrumCache(std::filesystem::path file) : file_(std::move(file)) {
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    std::ifstream in(file_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (row.is_discarded() || !row.is_object()) continue;
        try {
            Key key{row.at("length").get<std::uint32_t>(), row.at("q1").get<std::uint32_t>(),
                    row.at("q2").get<std::uint32_t>(), row.at("input_weight_cap").get<int>()};
            std::vector<SpectrumTerm> terms;
            for (const auto& t : row.at("terms"))
                terms.push_back({t.at(0).get<std::uint32_t>(), t.at(1).get<std::uint64_t>(),
                                 t.at(2).get<std::uint64_t>()});
            auto& slot = rows_[key];
            if (terms.size() > slot.size()) slot = std::move(terms);
        } catch (const json::exception&) {
            continue;
        }
    }
}

std::optional<DistanceSpectrum> SpectrumCache::lookup(const QppPolynomial& p, int num_terms,
                                                      int input_weight_cap) const {
    std::lock_guard lock(mu_);
    auto it = rows_.find(Key{p.length, p.q1, p.q2, input_weight_cap});
    if (it == rows_.end() || it->second.size() < static_cast<std::size_t>(num_terms))
        return std::nullopt;
    DistanceSpectrum out;
    out.terms.assign(it->second.begin(), it->second.begin() + num_terms);
    out.num_terms_requested = num_terms;
    out.input_weight_cap = input_weight_cap;
    out.threshold_used = out.terms.empty() ? 0 : out.terms.back().distance;
    return out;
}

void SpectrumCache::store(const QppPolynomial& p, const DistanceSpectrum& spectrum) {
    if (spectrum.truncated) return;
    std::lock_guard lock(mu_);
    auto& slot = rows_[Key{p.length, p.q1, p.q2, spectrum.input_weight_cap}];
    if (spectrum.terms.size() <= slot.size()) return;
    slot = spectrum.terms;

    json row{{"length", p.length},
             {"q1", p.q1},
             {"q2", p.q2},
             {"input_weight_cap", spectrum.input_weight_cap},
             {"terms", json::array()}};
    for (const auto& t : spectrum.terms)
        row["terms"].push_back({t.distance, t.multiplicity, t.input_weight_sum});
    std::ofstream out(file_, std::ios::app);
    out << row.dump() << '\n';
}

std::size_t SpectrumCache::rows() const {
    std::lock_guard lock(mu_);
    return rows_.size();
}

std::filesystem::path SpectrumCache::default_path() {
    if (const char* dir = std::getenv("QPP_CACHE_DIR"); dir && *dir)
        return std::filesystem::path(dir) / "spectra.jsonl";
    return std::filesystem::path(".qpp-cache") / "spectra.jsonl";
}

}  // namespace qpp
