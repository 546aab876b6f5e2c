#pragma once

// JSON file formats.
//
//   sequence:        {"variables": n, "order": 2k,
//                     "moments": [{"word": "X^2*Y", "value": 0.5}, ...]}
//   representation:  {"weights": [l1, ...], "atoms": [[rows of A_1, rows of A_2, ...], ...]}
//   certificate:     {"verdict": ..., "gram": [rows], "squares": ["<poly>", ...],
//                     "witness": <sequence> | null, "residuals": {...}}

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tracial/gns.hpp"
#include "tracial/sequence.hpp"
#include "tracial/theta2.hpp"

namespace tracial {

using Json = nlohmann::ordered_json;

/// Throws ParseError on malformed JSON or words, InputError on incomplete or
/// inconsistent moments (duplicates of one class that disagree).
TracialSequence sequence_from_json(const Json& j);
Json sequence_to_json(const TracialSequence& y);

/// Validates symmetry, equal sizes within an atom, nonnegative weights summing to 1.
TracialRepresentation representation_from_json(const Json& j);
Json representation_to_json(const TracialRepresentation& rep);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json certificate_to_json(const Theta2Result& result, const std::vector<Polynomial>& squares);

Json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);
std::string dump(const Json& j);

TracialSequence read_sequence(const std::filesystem::path& path);
void write_sequence(const std::filesystem::path& path, const TracialSequence& y);

}  // namespace tracial
