// csv.hpp - minimal CSV reading/writing with fixed formatting so identical
// inputs always produce identical bytes.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace evobench::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a named column; throws std::runtime_error naming the column.
    std::size_t column(const std::string& name) const;
};

Table read(const std::string& path);

void write(const std::string& path, const Table& table);

// Fixed numeric formats shared by every emitted CSV: doubles carry six
// decimal places, integers are plain.
std::string fmt(double value);
std::string fmt(std::int64_t value);
std::string fmt(std::uint64_t value);

} // namespace evobench::csv
