#pragma once

// nlohmann/json: the single-header copy in vendor/ when present, the system
// package otherwise.
#if __has_include(<json.hpp>)
#include <json.hpp>
#else
#include <nlohmann/json.hpp>
#endif
