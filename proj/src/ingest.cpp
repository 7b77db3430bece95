#include "serve/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "serve/error.hpp"

namespace serve {

namespace csv {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

bool next_row(std::istream& in, std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fields = split_line(line);
        return true;
    }
    return false;
}

}  // namespace csv

bool ServeCounts::valid() const {
    auto nn = [](std::int64_t v) { return v >= 0; };
    return nn(N) && nn(n_x1) && nn(n_x2) && nn(n_f1) && nn(n_f2) && nn(n_k1) && nn(n_k2) &&
           n_f1 + n_k1 <= n_x1 && n_x1 <= N && n_x2 <= N - n_x1 && n_f2 + n_k2 <= n_x2;
}

ServeCounts& ServeCounts::operator+=(const ServeCounts& o) {
    N += o.N;
    n_x1 += o.n_x1;
    n_x2 += o.n_x2;
    n_f1 += o.n_f1;
    n_f2 += o.n_f2;
    n_k1 += o.n_k1;
    n_k2 += o.n_k2;
    n_matches += o.n_matches;
    return *this;
}

namespace {

const char* const kPointColumns[] = {"match_id",   "server_id",    "serve_number",
                                     "serve_in",   "rally_length", "server_won"};

bool parse_bool(const std::string& s, std::size_t row, const char* col) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw TypeError(row, col, "expected true|false, got '" + s + "'");
}

}  // namespace

std::vector<PointRecord> parse_points_csv(std::istream& in) {
    std::vector<std::string> header;
    if (!csv::next_row(in, header)) throw EmptyFile();

    int idx[6];
    for (int c = 0; c < 6; ++c) {
        auto it = std::find(header.begin(), header.end(), kPointColumns[c]);
        if (it == header.end()) throw MissingColumn(kPointColumns[c]);
        idx[c] = static_cast<int>(it - header.begin());
    }

    std::vector<PointRecord> out;
    std::vector<std::string> f;
    std::size_t row = 0;
    while (csv::next_row(in, f)) {
        ++row;
        if (f.size() < header.size())
            throw TypeError(row, kPointColumns[0], "expected " + std::to_string(header.size()) +
                                                       " fields, got " + std::to_string(f.size()));
        PointRecord p;
        p.match_id = f[idx[0]];
        p.server_id = f[idx[1]];
        const std::string& sn = f[idx[2]];
        if (sn == "First")
            p.serve_number = ServeNumber::First;
        else if (sn == "Second")
            p.serve_number = ServeNumber::Second;
        else
            throw TypeError(row, "serve_number", "expected First|Second, got '" + sn + "'");
        p.serve_in = parse_bool(f[idx[3]], row, "serve_in");

        const std::string& rl = f[idx[4]];
        auto [end, ec] = std::from_chars(rl.data(), rl.data() + rl.size(), p.rally_length);
        if (ec != std::errc() || end != rl.data() + rl.size() || p.rally_length < 0)
            throw TypeError(row, "rally_length", "expected non-negative integer, got '" + rl + "'");
        p.server_won = parse_bool(f[idx[5]], row, "server_won");

        if (!p.serve_in) {
            if (p.rally_length != 0 || p.server_won)
                throw InconsistentOutcome(row, "fault must have rally_length 0 and server_won false");
        } else {
            if (p.rally_length == 0)
                throw InconsistentOutcome(row, "serve in but rally_length is 0");
            if (p.server_won != (p.rally_length % 2 == 1))
                throw InconsistentOutcome(row, "server wins exactly the odd-length rallies");
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::map<std::string, ServeCounts> aggregate_counts(const std::vector<PointRecord>& points,
                                                    int min_matches) {
    std::map<std::string, ServeCounts> acc;
    std::map<std::string, std::set<std::string>> matches;
    std::map<std::string, std::int64_t> second_rows;

    // Counting is per serve attempt, so the result does not depend on row order.
    for (const auto& p : points) {
        ServeCounts& c = acc[p.server_id];
        c.player_id = p.server_id;
        matches[p.server_id].insert(p.match_id);
        const bool one_shot = p.serve_in && p.rally_length == 1;
        const bool multi_shot = p.serve_in && p.server_won && p.rally_length >= 3;
        if (p.serve_number == ServeNumber::First) {
            ++c.N;
            c.n_x1 += p.serve_in;
            c.n_f1 += one_shot;
            c.n_k1 += multi_shot;
        } else {
            ++second_rows[p.server_id];
            c.n_x2 += p.serve_in;
            c.n_f2 += one_shot;
            c.n_k2 += multi_shot;
        }
    }

    std::map<std::string, ServeCounts> out;
    for (auto& [id, c] : acc) {
        if (second_rows[id] > c.N - c.n_x1)
            throw InconsistentOutcome(0, "player '" + id + "' has more second serves than first-serve faults");
        c.n_matches = static_cast<std::int64_t>(matches[id].size());
        if (c.n_matches >= min_matches) out.emplace(id, c);
    }
    return out;
}

void write_counts_csv(std::ostream& out, const std::map<std::string, ServeCounts>& counts) {
    out << "player_id,n_matches,N,n_x1,n_x2,n_f1,n_f2,n_k1,n_k2\n";
    for (const auto& [id, c] : counts) {
        out << id << ',' << c.n_matches << ',' << c.N << ',' << c.n_x1 << ',' << c.n_x2 << ','
            << c.n_f1 << ',' << c.n_f2 << ',' << c.n_k1 << ',' << c.n_k2 << '\n';
    }
}

std::map<std::string, ServeCounts> read_counts_csv(std::istream& in) {
    static const char* const cols[] = {"player_id", "n_matches", "N",    "n_x1", "n_x2",
                                       "n_f1",      "n_f2",      "n_k1", "n_k2"};
    std::vector<std::string> header;
    if (!csv::next_row(in, header)) throw EmptyFile();
    int idx[9];
    for (int c = 0; c < 9; ++c) {
        auto it = std::find(header.begin(), header.end(), cols[c]);
        if (it == header.end()) throw MissingColumn(cols[c]);
        idx[c] = static_cast<int>(it - header.begin());
    }
    std::map<std::string, ServeCounts> out;
    std::vector<std::string> f;
    std::size_t row = 0;
    while (csv::next_row(in, f)) {
        ++row;
        if (f.size() < header.size()) throw TypeError(row, "player_id", "short row");
        ServeCounts c;
        c.player_id = f[idx[0]];
        std::int64_t* dst[] = {&c.n_matches, &c.N,    &c.n_x1, &c.n_x2,
                               &c.n_f1,      &c.n_f2, &c.n_k1, &c.n_k2};
        for (int k = 0; k < 8; ++k) {
            const std::string& s = f[idx[k + 1]];
            auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), *dst[k]);
            if (ec != std::errc() || end != s.data() + s.size())
                throw TypeError(row, cols[k + 1], "expected integer, got '" + s + "'");
        }
        if (!c.valid()) throw InconsistentOutcome(row, "counts violate the serve tree");
        out.emplace(c.player_id, c);
    }
    return out;
}

}  // namespace serve
