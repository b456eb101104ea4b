// csv.hpp: CSV tables with '#'-prefixed metadata lines

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nltc {

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os, int precision = 12);

    void meta(const std::string& key, const std::string& value);
    void meta(const std::string& key, double value);
    void comment(const std::string& text);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);

private:
    std::ostream& os_;
    std::size_t columns_{0};
};

}  // namespace nltc
