#pragma once

// JSON export of the expression types. Field names follow the C++ structs.

#include <json.hpp>

#include "cef/cexp.hpp"

namespace cef {

inline constexpr int kJsonSchemaVersion = 1;

nlohmann::json to_json(const Rational& r);
nlohmann::json to_json(const LRat& x);
nlohmann::json to_json(const LinForm& f);
nlohmann::json to_json(const PresAtom& a);
nlohmann::json to_json(const VTerm& v);
nlohmann::json to_json(const RTerm& r);
nlohmann::json to_json(const CondAtom& c);
nlohmann::json to_json(const CExpTerm& t);
nlohmann::json to_json(const CExp& e);

}  // namespace cef
