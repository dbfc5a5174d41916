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
#include "epizone/csv.h"
#include "epizone/error.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace epizone
{

namespace
{

void trim_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

bool split_record(const std::string& line, std::vector<std::string>& fields)
{
    fields.clear();
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                }
                else {
                    quoted = false;
                }
            }
            else {
                current += c;
            }
        }
        else if (c == '"') {
            quoted = true;
        }
        else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        }
        else {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return !quoted;
}

} // namespace

CsvReader::CsvReader(std::istream& in, std::string source)
    : m_in(in)
    , m_source(std::move(source))
{
}

std::vector<std::string> CsvReader::expect_header(const std::vector<std::string>& expected,
                                                  const std::vector<std::string>& optional)
{
    std::vector<std::string> header;
    if (!next(header)) {
        fail("empty file, expected header");
    }
    if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
        header[0].erase(0, 3);
    }
    bool ok = header.size() >= expected.size() && header.size() <= expected.size() + optional.size() &&
              std::equal(expected.begin(), expected.end(), header.begin());
    for (std::size_t i = expected.size(); ok && i < header.size(); ++i) {
        ok = header[i] == optional[i - expected.size()];
    }
    if (!ok) {
        std::string want;
        for (const auto& h : expected) {
            want += (want.empty() ? "" : ",") + h;
        }
        fail("expected header '" + want + "'");
    }
    return header;
}

bool CsvReader::next(std::vector<std::string>& fields)
{
    std::string line;
    while (std::getline(m_in, line)) {
        ++m_line;
        trim_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        if (!split_record(line, fields)) {
            fail("unterminated quote");
        }
        return true;
    }
    return false;
}

void CsvReader::fail(const std::string& reason) const
{
    throw Error(ErrorCode::ParseError, m_source + ":" + std::to_string(m_line) + ": " + reason);
}

double CsvReader::parse_double(const std::string& field, const char* what) const
{
    if (field.empty()) {
        fail(std::string("empty ") + what);
    }
    char* end = nullptr;
    errno = 0;
    double value = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || errno == ERANGE) {
        fail(std::string("invalid ") + what + " '" + field + "'");
    }
    return value;
}

long CsvReader::parse_long(const std::string& field, const char* what) const
{
    char* end = nullptr;
    errno = 0;
    long value = std::strtol(field.c_str(), &end, 10);
    if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE) {
        fail(std::string("invalid ") + what + " '" + field + "'");
    }
    return value;
}

std::ifstream open_input(const std::filesystem::path& path)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorCode::InputNotFound, "input not found: " + path.string());
    }
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return in;
}

std::string csv_field(std::string_view value)
{
    if (value.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(value);
    }
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double value, int significant)
{
    if (value == 0.0) {
        return "0"; // avoids "-0"
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, value);
    return buf;
}

} // namespace epizone
