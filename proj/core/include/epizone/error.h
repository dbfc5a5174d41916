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
#ifndef EPIZONE_ERROR_H
#define EPIZONE_ERROR_H

#include <stdexcept>
#include <string>

namespace epizone
{

/**
 * Every failure raised by the library carries one of these codes so that callers
 * (and the command line tool) can report errors in a structured way.
 */
enum class ErrorCode
{
    InvalidArgument,
    InputNotFound,
    InvalidConfig,
    IoError,
    // core
    MissingGeometry,
    CalendarMismatch,
    DuplicateUnit,
    NegativeCount,
    EmptyOverlap,
    // ingest
    ParseError,
    DuplicateRecord,
    MissingTargetYear,
    EmptyBaseline,
    UnmappedUnit,
    MissingUnitProperty,
    InvalidRing,
    // repro
    InvalidParams,
    EmptySeries,
    InvalidWindow,
    // dtwdist
    InfeasibleWindow,
    AllInvalid,
    // geograph
    MissingPolygon,
    DuplicateCentroid,
    Disconnected,
    // zoner
    EmptyCluster,
    EmptyFrontier,
    InfeasibleMinSize,
    SeedOverlap,
    // synth
    InvalidProfile,
    DisconnectedRegion,
    UnitMismatch,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message)
        , m_code(code)
        , m_message(message)
    {
    }

    ErrorCode code() const noexcept
    {
        return m_code;
    }

    /// Message without the code prefix.
    const std::string& message() const noexcept
    {
        return m_message;
    }

private:
    ErrorCode m_code;
    std::string m_message;
};

} // namespace epizone

#endif // EPIZONE_ERROR_H
