#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace serve {

enum class ServeNumber { First, Second };

// One serve attempt. A service point is a First row, followed by a Second
// row when the first serve was a fault.
struct PointRecord {
    std::string match_id;
    std::string server_id;
    ServeNumber serve_number = ServeNumber::First;
    bool serve_in = false;
    int rally_length = 0;  // shots landed in court
    bool server_won = false;
};

// Leaves of the serve outcome tree for one player.
struct ServeCounts {
    std::string player_id;
    std::int64_t N = 0;     // service points
    std::int64_t n_x1 = 0;  // first serves in
    std::int64_t n_x2 = 0;  // second serves in
    std::int64_t n_f1 = 0;  // one-shot wins, first serve
    std::int64_t n_f2 = 0;
    std::int64_t n_k1 = 0;  // multi-shot wins, first serve
    std::int64_t n_k2 = 0;
    std::int64_t n_matches = 0;

    bool valid() const;
    ServeCounts& operator+=(const ServeCounts& o);
    bool operator==(const ServeCounts&) const = default;
};

// Throws EmptyFile, MissingColumn, TypeError, InconsistentOutcome.
// Row indices in errors are 1-based data rows (the header is row 0).
std::vector<PointRecord> parse_points_csv(std::istream& in);

// Players charted in fewer than `min_matches` distinct matches are dropped.
std::map<std::string, ServeCounts> aggregate_counts(const std::vector<PointRecord>& points,
                                                    int min_matches = 20);

void write_counts_csv(std::ostream& out, const std::map<std::string, ServeCounts>& counts);
std::map<std::string, ServeCounts> read_counts_csv(std::istream& in);

// Minimal CSV helpers shared by the readers in this library.
namespace csv {
std::vector<std::string> split_line(const std::string& line);
// Reads header + rows; returns false at EOF. Strips a trailing '\r'.
bool next_row(std::istream& in, std::vector<std::string>& fields);
}  // namespace csv

}  // namespace serve
