#include "rjmix/grouped_data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rjmix {

long long GroupedData::total() const {
    long long n = 0;
    for (long long c : counts) n += c;
    return n;
}

double GroupedData::lower_edge(int k) const { return k == 0 ? 0.0 : boundaries[k - 1]; }

double GroupedData::upper_edge(int k) const {
    return k == groups() - 1 ? std::numeric_limits<double>::infinity() : boundaries[k];
}

void GroupedData::validate() const {
    const int k = groups();
    if (k < 1) throw std::invalid_argument("GroupedData: needs at least one group");
    if (static_cast<int>(boundaries.size()) != k - 1)
        throw std::invalid_argument("GroupedData: boundary count must be one less than group count");
    double prev = 0.0;
    for (double t : boundaries) {
        if (!(t > prev))
            throw std::invalid_argument("GroupedData: boundaries must be positive and strictly increasing");
        prev = t;
    }
    for (long long c : counts)
        if (c < 1) throw std::invalid_argument("GroupedData: every group count must be >= 1");
    if (!group_means.empty()) {
        if (static_cast<int>(group_means.size()) != k)
            throw std::invalid_argument("GroupedData: group_means must match group count");
        for (int i = 0; i < k; ++i) {
            const double m = group_means[i];
            const double lo = lower_edge(i);
            const double hi = upper_edge(i);
            if (!(m > lo) || !(m <= hi)) {
                std::ostringstream msg;
                msg << "GroupedData: mean " << m << " of group " << (i + 1)
                    << " falls outside (" << lo << ", " << hi << "]";
                throw std::invalid_argument(msg.str());
            }
        }
    }
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        std::ostringstream msg;
        msg << "grouped CSV line " << line_no << ": cannot parse number '" << s << "'";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

GroupedData read_grouped_csv(std::istream& in) {
    GroupedData data;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    int expected_k = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("k,", 0) == 0) continue;  // header row
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            std::ostringstream msg;
            msg << "grouped CSV line " << line_no << ": expected 4 fields, got " << fields.size();
            throw std::invalid_argument(msg.str());
        }
        const long long k = static_cast<long long>(parse_double(fields[0], line_no));
        if (k != expected_k) {
            std::ostringstream msg;
            msg << "grouped CSV line " << line_no << ": group index " << k << ", expected "
                << expected_k;
            throw std::invalid_argument(msg.str());
        }
        ++expected_k;
        if (!fields[1].empty()) data.boundaries.push_back(parse_double(fields[1], line_no));
        data.counts.push_back(static_cast<long long>(parse_double(fields[2], line_no)));
        if (!fields[3].empty()) data.group_means.push_back(parse_double(fields[3], line_no));
    }
    if (!data.group_means.empty() &&
        data.group_means.size() != data.counts.size())
        throw std::invalid_argument("grouped CSV: mean column must be filled for every group or none");
    data.validate();
    return data;
}

GroupedData read_grouped_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open grouped CSV: " + path);
    return read_grouped_csv(in);
}

void write_grouped_csv(const GroupedData& data, std::ostream& out) {
    data.validate();
    out << "k,t_upper,count,mean\n";
    for (int k = 0; k < data.groups(); ++k) {
        out << (k + 1) << ',';
        if (k < data.groups() - 1) out << format_double(data.boundaries[k]);
        out << ',' << data.counts[k] << ',';
        if (data.has_means()) out << format_double(data.group_means[k]);
        out << '\n';
    }
}

void write_grouped_csv(const GroupedData& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write grouped CSV: " + path);
    write_grouped_csv(data, out);
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    return h;
}

}  // namespace rjmix
