#include "rjmix/draws_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rjmix {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
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

double to_double(const std::string& s, int line_no) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw std::invalid_argument("draws CSV line " + std::to_string(line_no) +
                                    ": bad number '" + s + "'");
    }
}

}  // namespace

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_draws_csv(const Draws& draws, const std::string& path) {
    std::ostringstream out;
    out << "# rjmix draws mln v1\n";
    for (const auto& rec : draws.records) {
        out << rec.iteration << ',' << rec.r;
        for (double w : rec.weights) out << ',' << format_double(w);
        for (double m : rec.mus) out << ',' << format_double(m);
        for (double s2 : rec.sigma2s) out << ',' << format_double(s2);
        out << ',' << format_double(rec.mu) << ',' << format_double(rec.tau2) << ','
            << format_double(rec.beta) << ',' << format_double(rec.log_lik) << ','
            << (rec.birth_death_accepted ? 1 : 0) << ','
            << (rec.split_combine_accepted ? 1 : 0) << '\n';
    }
    atomic_write_text(path, out.str());
}

Draws read_draws_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open draws CSV: " + path);
    Draws draws;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line_no == 1 && line.find("gb2") != std::string::npos)
                throw std::invalid_argument(path + " holds gb2 draws, not mixture draws");
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() < 2)
            throw std::invalid_argument("draws CSV line " + std::to_string(line_no) +
                                        ": too few fields");
        DrawRecord rec;
        rec.iteration = static_cast<long long>(to_double(fields[0], line_no));
        rec.r = static_cast<int>(to_double(fields[1], line_no));
        if (rec.r < 1 || fields.size() != static_cast<std::size_t>(2 + 3 * rec.r + 6))
            throw std::invalid_argument("draws CSV line " + std::to_string(line_no) +
                                        ": field count does not match R");
        std::size_t pos = 2;
        for (int j = 0; j < rec.r; ++j) rec.weights.push_back(to_double(fields[pos++], line_no));
        for (int j = 0; j < rec.r; ++j) rec.mus.push_back(to_double(fields[pos++], line_no));
        for (int j = 0; j < rec.r; ++j) rec.sigma2s.push_back(to_double(fields[pos++], line_no));
        rec.mu = to_double(fields[pos++], line_no);
        rec.tau2 = to_double(fields[pos++], line_no);
        rec.beta = to_double(fields[pos++], line_no);
        rec.log_lik = to_double(fields[pos++], line_no);
        rec.birth_death_accepted = to_double(fields[pos++], line_no) != 0.0;
        rec.split_combine_accepted = to_double(fields[pos++], line_no) != 0.0;
        draws.records.push_back(std::move(rec));
    }
    return draws;
}

void write_gb2_draws_csv(const Gb2Draws& draws, const std::string& path) {
    std::ostringstream out;
    out << "# rjmix draws gb2 v1\n";
    for (const auto& rec : draws.records) {
        out << rec.iteration << ',' << format_double(rec.params.a) << ','
            << format_double(rec.params.b) << ',' << format_double(rec.params.p) << ','
            << format_double(rec.params.q) << ',' << format_double(rec.log_lik) << '\n';
    }
    atomic_write_text(path, out.str());
}

Gb2Draws read_gb2_draws_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open draws CSV: " + path);
    Gb2Draws draws;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line_no == 1 && line.find("mln") != std::string::npos)
                throw std::invalid_argument(path + " holds mixture draws, not gb2 draws");
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 6)
            throw std::invalid_argument("draws CSV line " + std::to_string(line_no) +
                                        ": expected 6 fields");
        Gb2DrawRecord rec;
        rec.iteration = static_cast<long long>(to_double(fields[0], line_no));
        rec.params = Gb2Params{to_double(fields[1], line_no), to_double(fields[2], line_no),
                               to_double(fields[3], line_no), to_double(fields[4], line_no)};
        rec.log_lik = to_double(fields[5], line_no);
        draws.records.push_back(rec);
    }
    return draws;
}

std::string peek_draws_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open draws CSV: " + path);
    std::string line;
    if (std::getline(in, line) && !line.empty() && line[0] == '#') {
        if (line.find("gb2") != std::string::npos) return "gb2";
        if (line.find("mln") != std::string::npos) return "mln";
    }
    return "mln";
}

}  // namespace rjmix
