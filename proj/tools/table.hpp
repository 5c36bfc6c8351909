#pragma once

#include <json.hpp>

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace semiclass::cli {

/// Empty cells print as nothing in CSV and as null in JSON.
using Cell = std::variant<std::monostate, long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Shortest representation that round-trips.
std::string format_double(double x);

void write_csv(const Table& t, std::ostream& os);
nlohmann::json to_json(const Table& t);
void write_json(const Table& t, std::ostream& os);

} // namespace semiclass::cli
