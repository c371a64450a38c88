#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rjmix {

// Quantile-grouped observations: K-1 interval boundaries, K per-group
// counts, optionally K per-group means. The underlying sample itself is
// not observed.
struct GroupedData {
    std::vector<double> boundaries;        // strictly increasing, positive
    std::vector<long long> counts;         // one per group, all >= 1
    std::vector<double> group_means;       // empty, or one per group

    int groups() const { return static_cast<int>(counts.size()); }
    long long total() const;
    bool has_means() const { return !group_means.empty(); }

    // Lower/upper edge of group k (0-based); k=0 starts at 0, the top
    // group is unbounded.
    double lower_edge(int k) const;
    double upper_edge(int k) const;

    void validate() const;
};

// CSV schema, one row per group: k,t_upper,count,mean (t_upper empty on
// the last row, mean column empty when means are absent). Values are
// round-trip decimal strings, so write-then-read reproduces bits.
GroupedData read_grouped_csv(std::istream& in);
GroupedData read_grouped_csv(const std::string& path);
void write_grouped_csv(const GroupedData& data, std::ostream& out);
void write_grouped_csv(const GroupedData& data, const std::string& path);

// FNV-1a over a file's bytes; used to tie draws back to their dataset.
std::uint64_t hash_file(const std::string& path);

}  // namespace rjmix
