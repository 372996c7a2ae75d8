#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "qpp/polynomial.hpp"
#include "qpp/spectrum.hpp"

namespace qpp {

// Append-only spectrum store, one JSON object per line, keyed by
// (length, q1, q2, input_weight_cap). A stored result with N terms serves any
// request for <= N terms, since the leading terms of a longer exact spectrum
// are the shorter spectrum. Truncated results are never stored or served.
// Thread-safe; safe to point several runs at the same file (lines are
// appended whole and duplicates are harmless).
class SpectrumCache {
public:
    // Opens (and creates if needed) the backing file, loading existing rows.
    // Malformed lines are skipped.
    explicit SpectrumCache(std::filesystem::path file);

    std::optional<DistanceSpectrum> lookup(const QppPolynomial& p, int num_terms,
                                           int input_weight_cap) const;
    void store(const QppPolynomial& p, const DistanceSpectrum& spectrum);

    const std::filesystem::path& path() const { return file_; }
    std::size_t rows() const;

    // $QPP_CACHE_DIR/spectra.jsonl if the variable is set, else
    // .qpp-cache/spectra.jsonl under the current directory.
    static std::filesystem::path default_path();

private:
    struct Key {
        std::uint32_t length, q1, q2;
        int cap;
        auto operator<=>(const Key&) const = default;
    };

    std::filesystem::path file_;
    mutable std::mutex mu_;
    std::map<Key, std::vector<SpectrumTerm>> rows_;
};

}  // namespace qpp
