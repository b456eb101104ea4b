#include "nltc/csv.hpp"

#include <stdexcept>

namespace nltc {

CsvWriter::CsvWriter(std::ostream& os, int precision) : os_(os) { os_.precision(precision); }

void CsvWriter::meta(const std::string& key, const std::string& value) { os_ << "# " << key << ": " << value << '\n'; }

void CsvWriter::meta(const std::string& key, double value) { os_ << "# " << key << ": " << value << '\n'; }

void CsvWriter::comment(const std::string& text) { os_ << "# " << text << '\n'; }

void CsvWriter::header(const std::vector<std::string>& columns) {
    columns_ = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (columns_ != 0 && values.size() != columns_) throw std::invalid_argument("CSV row width differs from header");
    for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << values[i];
    os_ << '\n';
}

}  // namespace nltc
