/*
* Copyright (C) 2026 Epizone
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef EPIZONE_CSV_H
#define EPIZONE_CSV_H

#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace epizone
{

/// Minimal RFC 4180 style reader: comma separated, optional double quotes, one record per line.
class CsvReader
{
public:
    CsvReader(std::istream& in, std::string source);

    /// Reads the header row and checks that it starts with `expected` (extra columns allowed
    /// only if listed in `optional`). Returns the header.
    std::vector<std::string> expect_header(const std::vector<std::string>& expected,
                                           const std::vector<std::string>& optional = {});

    /// Next nonempty record; false at end of input.
    bool next(std::vector<std::string>& fields);

    /// 1-based line number of the last record returned.
    int line() const
    {
        return m_line;
    }

    [[noreturn]] void fail(const std::string& reason) const;

    double parse_double(const std::string& field, const char* what) const;
    long parse_long(const std::string& field, const char* what) const;

private:
    std::istream& m_in;
    std::string m_source;
    int m_line = 0;
};

/// Opens a file for reading; throws Error(InputNotFound) if it does not exist.
std::ifstream open_input(const std::filesystem::path& path);

std::string csv_field(std::string_view value);

/// `%.*g` formatting with the given number of significant digits.
std::string format_number(double value, int significant = 9);

} // namespace epizone

#endif // EPIZONE_CSV_H
