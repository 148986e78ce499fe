#pragma once

#include <string>

#include "fracspec/error.hpp"

namespace fracspec {

enum class Boundary { dirichlet, neumann };

inline const char* to_string(Boundary b) { return b == Boundary::dirichlet ? "dirichlet" : "neumann"; }

inline Boundary parse_boundary(const std::string& s) {
    if (s == "dirichlet" || s == "D") return Boundary::dirichlet;
    if (s == "neumann" || s == "N") return Boundary::neumann;
    throw ConfigError("unknown boundary condition '" + s + "'");
}

}  // namespace fracspec
